use std::process::Command;

use fnrte_cli::*;
use proptest::prelude::*;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fnrte"))
}

fn method() -> impl Strategy<Value = Method> {
    prop_oneof![Just(Method::Fn), Just(Method::Mrrf), Just(Method::Mc)]
}

proptest! {
    #[test]
    fn config_survives_a_round_trip(
        mu_a in 1e-3f64..10.0,
        mu_s in 1e-2f64..500.0,
        g in 0.001f64..0.99,
        big_l in 1usize..30,
        l_max in prop::collection::vec(1usize..40, 1..4),
        methods in prop::collection::vec(method(), 1..4),
        q0_min in 0.0f64..5.0,
        q0_span in 0.0f64..20.0,
        q0_steps in 1usize..100,
        n_mu in prop::option::of(1usize..200),
        photons in 2usize..10_000_000,
        seed in any::<u64>(),
    ) {
        let c = RunConfig {
            mu_a, mu_s, g, big_l, l_max, methods, q0_min,
            q0_max: q0_min + q0_span,
            q0_steps, n_mu, n_phi: None, photons, seed,
            out: Some("curves.csv".into()),
        };
        prop_assert_eq!(RunConfig::parse(&c.serialize()).unwrap(), c);
    }
}

#[test]
fn config_text_accepts_comments_and_lists() {
    let c = RunConfig::parse("# sweep\nmu_a = 0.05\nlmax = 5, 9,13\nmethod = fn,mrrf  # both\n\nq0_steps = 3\n").unwrap();
    assert_eq!(c.l_max, vec![5, 9, 13]);
    assert_eq!(c.methods, vec![Method::Fn, Method::Mrrf]);
    assert_eq!(c.q0_steps, 3);
    assert!(matches!(RunConfig::parse("colour = blue"), Err(CliError::Config(_))));
    assert!(matches!(RunConfig::parse("g 0.3"), Err(CliError::Config(_))));
    assert!(matches!(RunConfig::parse("method = sn"), Err(CliError::Config(_))));
}

#[test]
fn invalid_configs_name_the_violated_invariant() {
    let cases: Vec<(RunConfig, &str)> = vec![
        (RunConfig { methods: vec![], ..Default::default() }, "no method"),
        (RunConfig { l_max: vec![5], ..Default::default() }, "below L"),
        (RunConfig { q0_steps: 0, ..Default::default() }, "empty"),
        (RunConfig { q0_min: 3.0, q0_max: 1.0, ..Default::default() }, "q0 range"),
        (RunConfig { g: 1.2, ..Default::default() }, "g"),
    ];
    for (c, needle) in cases {
        match c.validate() {
            Err(e @ CliError::Config(_)) => {
                assert_eq!(e.exit_code(), 2);
                assert!(e.to_string().contains(needle), "`{e}` lacks `{needle}`");
            }
            other => panic!("expected config error for {needle}, got {other:?}"),
        }
    }
}

#[test]
fn grid_includes_both_endpoints() {
    let c = RunConfig { q0_min: 0.0, q0_max: 10.0, q0_steps: 20, ..Default::default() };
    let q = c.q0_grid();
    assert_eq!(q.len(), 20);
    assert_eq!((q[0], q[19]), (0.0, 10.0));
    assert!((q[1] - 10.0 / 19.0).abs() < 1e-15);
    let single = RunConfig { q0_min: 2.5, q0_steps: 1, ..Default::default() };
    assert_eq!(single.q0_grid(), vec![2.5]);
}

#[test]
fn csv_has_the_stable_schema() {
    let curves = vec![
        FluxCurve { method: Method::Fn, l_max: Some(9), q0: vec![0.0, 1.0], j_plus: vec![0.5, 0.25], stderr: None },
        FluxCurve { method: Method::Mc, l_max: None, q0: vec![0.0], j_plus: vec![0.5], stderr: Some(vec![0.001]) },
    ];
    let mut out = Vec::new();
    write_csv(&curves, &mut out).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "q0_per_ellstar,method,l_max,J_plus,stderr");
    assert_eq!(lines[1], "0.00000000000e0,fn,9,5.00000000000e-1,");
    assert_eq!(lines[3], "0.00000000000e0,mc,,5.00000000000e-1,1.00000000000e-3");
    // 12 significant digits
    assert_eq!(format_number(std::f64::consts::PI), "3.14159265359e0");
}

#[test]
fn run_produces_one_curve_per_method_and_cutoff() {
    let c = RunConfig {
        mu_a: 0.5,
        mu_s: 1.0,
        g: 0.5,
        big_l: 3,
        l_max: vec![3, 5],
        methods: vec![Method::Fn, Method::Mrrf, Method::Mc],
        q0_max: 2.0,
        q0_steps: 3,
        photons: 20_000,
        ..Default::default()
    };
    let curves = run(&c).unwrap();
    let tags: Vec<_> = curves.iter().map(|c| (c.method, c.l_max)).collect();
    assert_eq!(
        tags,
        vec![(Method::Fn, Some(3)), (Method::Fn, Some(5)), (Method::Mrrf, Some(3)), (Method::Mrrf, Some(5)), (Method::Mc, None)]
    );
    for curve in &curves {
        assert_eq!(curve.j_plus.len(), 3);
        assert!(curve.j_plus.windows(2).all(|w| w[1] < w[0]), "{curve:?}");
    }
    assert_eq!(run(&c).unwrap(), curves, "not deterministic");
}

#[test]
fn binary_writes_csv_and_reports_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    let out = dir.path().join("out.csv");
    std::fs::write(&cfg, "mu_a = 0.5\nmu_s = 1\ng = 0.5\nL = 3\nlmax = 3\nq0_steps = 2\nq0_max = 1\n").unwrap();
    let status = bin()
        .args(["--config", cfg.to_str().unwrap(), "--method", "fn", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.starts_with(CSV_HEADER));

    let bad = bin().args(["--method", "fn", "--g", "1.5"]).output().unwrap();
    assert_eq!(bad.status.code(), Some(2));
    let missing = bin().args(["--config", dir.path().join("nope.cfg").to_str().unwrap()]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));

    // the rotated-frame system breaks down at a large cutoff and high frequency
    let broken = bin()
        .args(["--method", "mrrf", "--lmax", "25", "--L", "9", "--q0-min", "10", "--q0-steps", "1"])
        .output()
        .unwrap();
    assert_eq!(broken.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&broken.stderr).contains("mrrf"));
}
