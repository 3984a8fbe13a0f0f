//! Exitance sweeps over spatial frequency for the F_N, MRRF and Monte Carlo
//! backends, written as CSV.
//!
//! Configuration comes from a flat `key = value` file, overridden by
//! command-line flags. Frequencies on the command line and in the output are
//! per transport mean free path; the solvers see internal units.

use std::fmt::Write as _;
use std::io::Write;
use std::str::FromStr;

use fnrte::fn_solver::{FnConfig, FnSolver};
use fnrte::mc_oracle::{flux_fourier, simulate};
use fnrte::mrrf_solver::MrrfSolver;
use fnrte::spectrum::OpticalMedium;
use fnrte::units::convert_units;

pub const CSV_HEADER: &str = "q0_per_ellstar,method,l_max,J_plus,stderr";

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{method} failed at q0 = {q0} / ell*: {source}")]
    Solver {
        method: Method,
        q0: f64,
        #[source]
        source: fnrte::Error,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solver { .. } | CliError::Io(_) => 3,
        }
    }
}

fn config_err(msg: impl Into<String>) -> CliError {
    CliError::Config(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Fn,
    Mrrf,
    Mc,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Fn => "fn",
            Method::Mrrf => "mrrf",
            Method::Mc => "mc",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "fn" => Ok(Method::Fn),
            "mrrf" => Ok(Method::Mrrf),
            "mc" => Ok(Method::Mc),
            other => Err(format!("unknown method `{other}` (expected fn, mrrf or mc)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mu_a: f64,
    pub mu_s: f64,
    pub g: f64,
    pub big_l: usize,
    /// Every cutoff in the list is run for `fn` and `mrrf`.
    pub l_max: Vec<usize>,
    pub methods: Vec<Method>,
    /// Frequency grid in `1 / ell*`, endpoints included.
    pub q0_min: f64,
    pub q0_max: f64,
    pub q0_steps: usize,
    /// `None` uses the F_N defaults for each cutoff.
    pub n_mu: Option<usize>,
    pub n_phi: Option<usize>,
    pub photons: usize,
    pub seed: u64,
    /// `None` writes to stdout.
    pub out: Option<String>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            mu_a: 0.05,
            mu_s: 100.0,
            g: 0.01,
            big_l: 9,
            l_max: vec![9],
            methods: vec![Method::Fn],
            q0_min: 0.0,
            q0_max: 10.0,
            q0_steps: 20,
            n_mu: None,
            n_phi: None,
            photons: 200_000,
            seed: 1,
            out: None,
        }
    }
}

fn parse_list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    v.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| s.trim().parse::<T>().map_err(|e| config_err(format!("{key}: {e}"))))
        .collect()
}

fn parse_one<T: FromStr>(key: &str, v: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    v.trim().parse::<T>().map_err(|e| config_err(format!("{key} = `{}`: {e}", v.trim())))
}

impl RunConfig {
    /// Sets one key from a config file. Keys use underscores; `L` is the
    /// phase-function order.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        match key {
            "mu_a" => self.mu_a = parse_one(key, value)?,
            "mu_s" => self.mu_s = parse_one(key, value)?,
            "g" => self.g = parse_one(key, value)?,
            "L" => self.big_l = parse_one(key, value)?,
            "lmax" | "l_max" => self.l_max = parse_list(key, value)?,
            "method" | "methods" => self.methods = parse_list(key, value)?,
            "q0_min" => self.q0_min = parse_one(key, value)?,
            "q0_max" => self.q0_max = parse_one(key, value)?,
            "q0_steps" => self.q0_steps = parse_one(key, value)?,
            "n_mu" => self.n_mu = Some(parse_one(key, value)?),
            "n_phi" => self.n_phi = Some(parse_one(key, value)?),
            "photons" => self.photons = parse_one(key, value)?,
            "seed" => self.seed = parse_one(key, value)?,
            "out" => self.out = Some(value.trim().to_string()),
            _ => return Err(config_err(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` document on top of `self`. Blank lines and
    /// `#` comments are skipped.
    pub fn merge_text(&mut self, text: &str) -> Result<(), CliError> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| config_err(format!("line {}: expected `key = value`", i + 1)))?;
            self.set(k.trim(), v)?;
        }
        Ok(())
    }

    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut c = RunConfig::default();
        c.merge_text(text)?;
        Ok(c)
    }

    pub fn serialize(&self) -> String {
        let join = |v: Vec<String>| v.join(", ");
        let mut s = String::new();
        let _ = writeln!(s, "mu_a = {:?}", self.mu_a);
        let _ = writeln!(s, "mu_s = {:?}", self.mu_s);
        let _ = writeln!(s, "g = {:?}", self.g);
        let _ = writeln!(s, "L = {}", self.big_l);
        let _ = writeln!(s, "lmax = {}", join(self.l_max.iter().map(|l| l.to_string()).collect()));
        let _ = writeln!(s, "method = {}", join(self.methods.iter().map(|m| m.to_string()).collect()));
        let _ = writeln!(s, "q0_min = {:?}", self.q0_min);
        let _ = writeln!(s, "q0_max = {:?}", self.q0_max);
        let _ = writeln!(s, "q0_steps = {}", self.q0_steps);
        if let Some(n) = self.n_mu {
            let _ = writeln!(s, "n_mu = {n}");
        }
        if let Some(n) = self.n_phi {
            let _ = writeln!(s, "n_phi = {n}");
        }
        let _ = writeln!(s, "photons = {}", self.photons);
        let _ = writeln!(s, "seed = {}", self.seed);
        if let Some(o) = &self.out {
            let _ = writeln!(s, "out = {o}");
        }
        s
    }

    pub fn medium(&self) -> Result<OpticalMedium, CliError> {
        OpticalMedium::new(self.mu_a, self.mu_s, self.g, self.big_l).map_err(|e| config_err(e.to_string()))
    }

    /// Checks every invariant and names the first one violated.
    pub fn validate(&self) -> Result<OpticalMedium, CliError> {
        let medium = self.medium()?;
        if self.methods.is_empty() {
            return Err(config_err("no method requested (use --method fn|mrrf|mc)"));
        }
        if self.l_max.is_empty() {
            return Err(config_err("no l_max given"));
        }
        if let Some(l) = self.l_max.iter().find(|&&l| l < self.big_l) {
            return Err(config_err(format!("l_max = {l} is below L = {}", self.big_l)));
        }
        if self.q0_steps == 0 {
            return Err(config_err("q0 grid is empty (q0_steps = 0)"));
        }
        if !(self.q0_min >= 0.0 && self.q0_max >= self.q0_min && self.q0_max.is_finite()) {
            return Err(config_err(format!("q0 range [{}, {}] must satisfy 0 <= min <= max", self.q0_min, self.q0_max)));
        }
        if self.methods.contains(&Method::Mc) && self.photons < 2 {
            return Err(config_err("photons must be at least 2"));
        }
        if self.methods.contains(&Method::Fn) {
            for &l in &self.l_max {
                self.fn_config(l).validate(&medium).map_err(|e| config_err(e.to_string()))?;
            }
        }
        Ok(medium)
    }

    pub fn fn_config(&self, l_max: usize) -> FnConfig {
        let mut c = FnConfig::new(l_max);
        if let Some(n) = self.n_mu {
            c.n_mu = n;
        }
        if let Some(n) = self.n_phi {
            c.n_phi = n;
        }
        c
    }

    /// Frequencies in `1 / ell*`.
    pub fn q0_grid(&self) -> Vec<f64> {
        if self.q0_steps == 1 {
            return vec![self.q0_min];
        }
        let step = (self.q0_max - self.q0_min) / (self.q0_steps - 1) as f64;
        (0..self.q0_steps).map(|i| self.q0_min + step * i as f64).collect()
    }
}

/// One exitance curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FluxCurve {
    pub method: Method,
    /// `None` for Monte Carlo.
    pub l_max: Option<usize>,
    /// `1 / ell*`.
    pub q0: Vec<f64>,
    pub j_plus: Vec<f64>,
    /// Standard errors; `None` for deterministic methods.
    pub stderr: Option<Vec<f64>>,
}

/// Runs every requested method over the grid.
pub fn run(config: &RunConfig) -> Result<Vec<FluxCurve>, CliError> {
    let medium = config.validate()?;
    let grid = config.q0_grid();
    let internal: Vec<f64> = grid.iter().map(|&q| convert_units(q, &medium)).collect();
    let mut curves = Vec::new();
    for &method in &config.methods {
        let tag = |q0: f64| move |source| CliError::Solver { method, q0, source };
        match method {
            Method::Fn | Method::Mrrf => {
                for &l in &config.l_max {
                    let mut j_plus = Vec::with_capacity(grid.len());
                    if method == Method::Fn {
                        let solver = FnSolver::new(&medium, &config.fn_config(l)).map_err(tag(grid[0]))?;
                        for (&q, &qi) in grid.iter().zip(&internal) {
                            j_plus.push(solver.solve(qi).map_err(tag(q))?.hemispheric_flux());
                        }
                    } else {
                        let solver = MrrfSolver::new(&medium, l).map_err(tag(grid[0]))?;
                        for (&q, &qi) in grid.iter().zip(&internal) {
                            j_plus.push(solver.solve(qi).map_err(tag(q))?.hemispheric_flux());
                        }
                    }
                    curves.push(FluxCurve { method, l_max: Some(l), q0: grid.clone(), j_plus, stderr: None });
                }
            }
            Method::Mc => {
                let records = simulate(&medium, config.photons, config.seed);
                let fluxes: Vec<_> = internal.iter().map(|&q| flux_fourier(&records, q, config.photons)).collect();
                curves.push(FluxCurve {
                    method,
                    l_max: None,
                    q0: grid.clone(),
                    j_plus: fluxes.iter().map(|f| f.j).collect(),
                    stderr: Some(fluxes.iter().map(|f| f.stderr).collect()),
                });
            }
        }
    }
    Ok(curves)
}

/// 12 significant digits.
pub fn format_number(v: f64) -> String {
    format!("{v:.11e}")
}

pub fn write_csv(curves: &[FluxCurve], mut w: impl Write) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for c in curves {
        let l = c.l_max.map(|l| l.to_string()).unwrap_or_default();
        for (i, (&q, &j)) in c.q0.iter().zip(&c.j_plus).enumerate() {
            let se = c.stderr.as_ref().map(|s| format_number(s[i])).unwrap_or_default();
            writeln!(w, "{},{},{l},{},{se}", format_number(q), c.method, format_number(j))?;
        }
    }
    Ok(())
}
