use fnrte::special_functions::gauss_legendre;
use fnrte::spectrum::*;

fn isotropic_root(albedo: f64) -> f64 {
    // 1 = (albedo nu / 2) ln((nu+1)/(nu-1)), bisection on (1, 1e6)
    let f = |nu: f64| 0.5 * albedo * nu * ((nu + 1.0) / (nu - 1.0)).ln() - 1.0;
    let (mut lo, mut hi) = (1.0 + 1e-15, 1e6);
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn reference_media() -> Vec<OpticalMedium> {
    let mut v = Vec::new();
    for g in [0.01, 0.9] {
        for l in [9usize, 25] {
            v.push(OpticalMedium::new(0.05, 100.0, g, l).unwrap());
        }
    }
    v.push(OpticalMedium::new(0.2, 0.8, 0.5, 4).unwrap());
    v
}

#[test]
fn isotropic_root_matches_b_matrix() {
    for albedo in [0.3, 0.6, 0.9, 0.99] {
        let med = OpticalMedium::from_coefficients(albedo, vec![1.0]).unwrap();
        let nus = discrete_eigenvalues(0, &med, 60).unwrap();
        assert_eq!(nus.len(), 1);
        let want = isotropic_root(albedo);
        assert!((nus[0] - want).abs() < 1e-8, "albedo {albedo}: {} vs {want}", nus[0]);
    }
}

#[test]
fn discrete_eigenvalues_are_dispersion_zeros() {
    let quad = gauss_legendre(64).unwrap();
    for med in reference_media() {
        let l_b = default_l_b(med.big_l(), &med);
        for m in 0..=med.big_l() as i64 {
            for nu in discrete_eigenvalues(m, &med, l_b).unwrap() {
                let lam = lambda_dispersion(m, nu, &med, &quad).unwrap();
                assert!(lam.abs() < 1e-7, "g={} L={} m={m} nu={nu}: Lambda={lam:e}", med.g(), med.big_l());
            }
        }
    }
}

#[test]
fn discrete_spectrum_converged_in_l_b() {
    for med in reference_media() {
        let l_b = default_l_b(med.big_l(), &med);
        for m in 0..=med.big_l() as i64 {
            let a = discrete_eigenvalues(m, &med, l_b).unwrap();
            let b = discrete_eigenvalues(m, &med, 2 * l_b).unwrap();
            let c = discrete_eigenvalues(m, &med, l_b + 2).unwrap();
            assert_eq!(a.len(), b.len());
            assert_eq!(a.len(), c.len());
            for ((x, y), z) in a.iter().zip(&b).zip(&c) {
                assert!((x - y).abs() < 1e-9 && (x - z).abs() < 1e-9, "m={m}: {x} {y} {z}");
            }
        }
    }
}

#[test]
fn backward_recursion_satisfies_recurrence() {
    for med in reference_media() {
        let l_b = default_l_b(med.big_l(), &med);
        for m in 0..=med.big_l() as i64 {
            for nu in discrete_eigenvalues(m, &med, l_b).unwrap() {
                let col = chandrasekhar_g_backward(m, nu, 26, &med).unwrap();
                let seed = fnrte::special_functions::seed_coefficient(m as usize);
                assert!((col[0] - seed).abs() <= 1e-15 * seed.max(1.0));
                let r = chandrasekhar_residual(m, nu, &col, &med);
                assert!(r < 1e-8, "m={m} nu={nu}: residual {r:e}");
            }
        }
    }
}

#[test]
fn chandrasekhar_decays_at_eigenvalue() {
    // nearly isotropic medium: g_l^0(nu_0) relative to p_l^0(nu_0) tends to zero
    let med = OpticalMedium::new(0.05, 100.0, 0.01, 9).unwrap();
    let nu0 = discrete_eigenvalues(0, &med, 80).unwrap()[0];
    let g = chandrasekhar_g_backward(0, nu0, 40, &med).unwrap();
    let p = fnrte::special_functions::normalized_p_column(0, 40, nu0);
    assert!((g[40] / p[40]).abs() < 1e-10);
    assert!((g[40] / p[40]).abs() < (g[10] / p[10]).abs());
}

#[test]
fn parity_relations() {
    let med = OpticalMedium::new(0.2, 0.8, 0.6, 5).unwrap();
    for &nu in &[0.13, 0.5, 0.87] {
        for m in 0..=5i64 {
            let pos = chandrasekhar_g_forward(m, nu, 12, &med);
            let neg = chandrasekhar_g_forward(m, -nu, 12, &med);
            let negm = chandrasekhar_g_forward(-m, nu, 12, &med);
            for (k, ((a, b), c)) in pos.iter().zip(&neg).zip(&negm).enumerate() {
                let l = m + k as i64;
                let s = if (l + m) % 2 == 0 { 1.0 } else { -1.0 };
                let sm = if m % 2 == 0 { 1.0 } else { -1.0 };
                assert!((b - s * a).abs() < 1e-12 * a.abs().max(1.0));
                assert!((c - sm * a).abs() < 1e-15 * a.abs().max(1.0));
            }
        }
    }
}

#[test]
fn normalization_matches_direct_integral() {
    // N^m(nu) = int mu phi^2 (1-mu^2)^{|m|}, phi = (albedo nu / 2) g^m(nu, mu) / (nu - mu)
    let quad = gauss_legendre(64).unwrap();
    let fine = gauss_legendre(400).unwrap();
    for med in [OpticalMedium::new(0.2, 0.8, 0.5, 4).unwrap(), OpticalMedium::new(0.05, 100.0, 0.9, 9).unwrap()] {
        for m in 0..=med.big_l() as i64 {
            for nu in discrete_eigenvalues(m, &med, 80).unwrap() {
                if nu < 1.001 {
                    continue;
                }
                let n = normalization_factor(m, nu, &med, &quad).unwrap();
                let kernel = GKernel::discrete(m, nu, &med).unwrap();
                let direct = fine.integrate(|mu| {
                    let phi = 0.5 * med.albedo() * nu * kernel.eval(mu.into(), &med).re / (nu - mu);
                    mu * phi * phi * (1.0 - mu * mu).powi(m as i32)
                });
                println!("g={} m={m} nu={nu:.6} N={n:.6e} direct={direct:.6e}", med.g());
                assert!((n - direct).abs() < 1e-4 * direct.abs(), "m={m} nu={nu}: {n} vs {direct}");
                assert!(n > 0.0);
            }
        }
    }
}
