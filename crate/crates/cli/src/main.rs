use std::fs::File;
use std::io::BufWriter;
use std::process::ExitCode;

use clap::Parser;
use fnrte_cli::{run, write_csv, CliError, Method, RunConfig};

/// Exitance of a half-space under structured illumination.
#[derive(Debug, Parser)]
#[command(name = "fnrte", version)]
struct Args {
    /// `key = value` file; flags override it.
    #[arg(long)]
    config: Option<String>,
    #[arg(long = "mu-a")]
    mu_a: Option<f64>,
    #[arg(long = "mu-s")]
    mu_s: Option<f64>,
    #[arg(long)]
    g: Option<f64>,
    /// Order of the phase-function expansion.
    #[arg(long = "L")]
    big_l: Option<usize>,
    /// Cutoff degree; repeat or separate with commas for several.
    #[arg(long, value_delimiter = ',')]
    lmax: Vec<usize>,
    /// fn, mrrf or mc; repeatable.
    #[arg(long, value_delimiter = ',')]
    method: Vec<Method>,
    /// Frequencies in units of 1 / ell*.
    #[arg(long = "q0-min")]
    q0_min: Option<f64>,
    #[arg(long = "q0-max")]
    q0_max: Option<f64>,
    /// Number of grid points, endpoints included.
    #[arg(long = "q0-steps")]
    q0_steps: Option<usize>,
    #[arg(long = "n-mu")]
    n_mu: Option<usize>,
    #[arg(long = "n-phi")]
    n_phi: Option<usize>,
    #[arg(long)]
    photons: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// CSV destination; stdout when absent.
    #[arg(long)]
    out: Option<String>,
}

fn build_config(args: Args) -> Result<RunConfig, CliError> {
    let mut c = RunConfig::default();
    if let Some(path) = &args.config {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{path}: {e}")))?;
        c.merge_text(&text)?;
    }
    macro_rules! over {
        ($($field:ident),*) => { $(if let Some(v) = args.$field { c.$field = v; })* };
    }
    over!(mu_a, mu_s, g, big_l, q0_min, q0_max, q0_steps, photons, seed);
    if args.n_mu.is_some() {
        c.n_mu = args.n_mu;
    }
    if args.n_phi.is_some() {
        c.n_phi = args.n_phi;
    }
    if args.out.is_some() {
        c.out = args.out;
    }
    if !args.lmax.is_empty() {
        c.l_max = args.lmax;
    }
    if !args.method.is_empty() {
        c.methods = args.method;
    }
    Ok(c)
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = build_config(args).and_then(|config| {
        let curves = run(&config)?;
        match &config.out {
            Some(path) => write_csv(&curves, BufWriter::new(File::create(path)?))?,
            None => write_csv(&curves, std::io::stdout().lock())?,
        }
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
