//! F_N collocation for the half-space under a normally incident beam
//! modulated as `exp(-i q0 x)`.
//!
//! Unknowns are the reduced coefficients `c_{lm}(q0)`, `m = 0..=l_max`,
//! `l = m, m+2, ..`, of the reflected intensity. Rows are collocation points
//! `xi` of every azimuthal order `m' = 0..=l_max`.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use num_traits::{Float, FloatConst};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::extended::{lift, lower, CDd, Dd, DenseLu, DD_EPSILON};
use crate::rotated_frames::khat_z;
use crate::special_functions::{gauss_legendre, ln_factorial, normalized_p_column, wigner_d_continued_in, WignerDTable};
use crate::spectrum::{default_l_b, n_col, GKernel, OpticalMedium, SpectralBasis};

const C0: Complex64 = Complex64::new(0.0, 0.0);

fn czero() -> CDd {
    Complex::new(Dd::from(0.0), Dd::from(0.0))
}

/// Largest accepted condition number of `J_+`: the double-precision bound
/// `1e12` carried over to double-double roundoff.
pub const MAX_CONDITION: f64 = 1e12 * (f64::EPSILON / DD_EPSILON);

#[derive(Debug, Clone, PartialEq)]
pub struct FnConfig {
    pub l_max: usize,
    /// Gauss-Legendre nodes on `mu in (0, 1)`.
    pub n_mu: usize,
    /// Trapezoid nodes on `phi in [0, 2 pi)`.
    pub n_phi: usize,
    /// Truncation of the `B(m)` eigenproblem; `None` picks [`default_l_b`].
    pub l_b: Option<usize>,
}

impl FnConfig {
    pub fn new(l_max: usize) -> Self {
        FnConfig { l_max, n_mu: 4 * l_max.max(1), n_phi: 8 * l_max.max(1), l_b: None }
    }

    pub fn validate(&self, medium: &OpticalMedium) -> Result<()> {
        if self.l_max < medium.big_l() {
            return Err(Error::config(format!("l_max = {} is below L = {}", self.l_max, medium.big_l())));
        }
        if self.n_mu < 2 * self.l_max {
            return Err(Error::config(format!("n_mu = {} must be at least 2 l_max = {}", self.n_mu, 2 * self.l_max)));
        }
        if self.n_phi < 4 * self.l_max {
            return Err(Error::config(format!("n_phi = {} must be at least 4 l_max = {}", self.n_phi, 4 * self.l_max)));
        }
        Ok(())
    }
}

/// Size of the reduced system.
pub fn n_total(l_max: usize) -> usize {
    if l_max.is_multiple_of(2) {
        (l_max + 2) * (l_max + 2) / 4
    } else {
        (l_max + 1) * (l_max + 3) / 4
    }
}

/// `int_0^1 mu P_l(mu) dmu` for even `l`.
pub fn flux_moment(l: usize) -> f64 {
    assert!(l.is_multiple_of(2), "flux moment needs an even degree");
    if l == 0 {
        return 0.5;
    }
    let lf = l as f64;
    let h = l / 2;
    let sign = if h.is_multiple_of(2) { -1.0 } else { 1.0 };
    let log_mag = ln_factorial(l) - lf * 2f64.ln() - 2.0 * ln_factorial(h);
    sign * log_mag.exp() / ((lf - 1.0) * (lf + 2.0))
}

/// `A_{lm}^{m'}(xi, q)` for one row, all `|m| <= l <= l_max` with `l - |m|` even.
#[derive(Debug, Clone)]
pub struct ATable {
    l_max: usize,
    values: Vec<Complex64>,
}

impl ATable {
    fn index(l_max: usize, l: usize, m: i64) -> usize {
        l * (2 * l_max + 1) + (m + l_max as i64) as usize
    }

    pub fn get(&self, l: usize, m: i64) -> Complex64 {
        assert!(l <= self.l_max && m.unsigned_abs() as usize <= l);
        self.values[Self::index(self.l_max, l, m)]
    }
}

/// Per-node values `sqrt((l-m)!/(l+m)!) P_l^m(mu)` on the polar rule.
struct LegendreTable {
    l_max: usize,
    values: Vec<Vec<f64>>,
}

impl LegendreTable {
    fn new(l_max: usize, nodes: &[f64]) -> Self {
        let values = nodes
            .iter()
            .map(|&mu| {
                let mut row = vec![0.0; (l_max + 1) * (2 * l_max + 1)];
                let sin = (1.0 - mu * mu).max(0.0).sqrt();
                for m in -(l_max as i64)..=l_max as i64 {
                    let am = m.unsigned_abs() as usize;
                    let factor = if m.rem_euclid(2) == 1 { -1.0 } else { 1.0 } * sin.powi(am as i32);
                    for (k, p) in normalized_p_column(m, l_max, mu).into_iter().enumerate() {
                        row[ATable::index(l_max, am + k, m)] = factor * p;
                    }
                }
                row
            })
            .collect();
        LegendreTable { l_max, values }
    }

    fn get(&self, node: usize, l: usize, m: i64) -> f64 {
        self.values[node][ATable::index(self.l_max, l, m)]
    }
}

/// Solved reduced system at one spatial frequency.
#[derive(Debug, Clone)]
pub struct FnSystem {
    pub l_max: usize,
    /// Internal spatial frequency (units of `mu_t`).
    pub q0: f64,
    pub a: DMatrix<Complex64>,
    pub k: DVector<Complex64>,
    /// Reduced coefficients in column order.
    pub c: DVector<Complex64>,
    /// `(l, m)` of each column.
    pub columns: Vec<(usize, usize)>,
    /// Row-equilibrated relative residual of the solve.
    pub relative_residual: f64,
    /// Relative condition number of `J_+` under relative perturbations of
    /// the matrix and source entries; this is what the solve is gated on.
    pub condition: f64,
    /// 1-norm condition number of the equilibrated matrix.
    pub matrix_condition: f64,
    c_ext: Vec<CDd>,
}

impl FnSystem {
    /// `c_{lm}(q0)` for either sign of `m`, using `c_{l,-m} = (-1)^m c_{lm}`.
    pub fn coefficient(&self, l: usize, m: i64) -> Complex64 {
        lower(self.coefficient_ext(l, m))
    }

    fn coefficient_ext(&self, l: usize, m: i64) -> CDd {
        let am = m.unsigned_abs() as usize;
        if am > l || l > self.l_max || (l - am) % 2 == 1 {
            return czero();
        }
        let v = self.c_ext[column_index(self.l_max, l, am)];
        if m < 0 && am % 2 == 1 {
            -v
        } else {
            v
        }
    }

    /// Exiting hemispheric flux `J_+(q0)`.
    ///
    /// The coefficients are large with alternating phases at high `q0`, so
    /// the sum runs in double-double.
    pub fn hemispheric_flux(&self) -> f64 {
        let sum = (0..=self.l_max)
            .step_by(2)
            .fold(czero(), |acc, l| acc + self.coefficient_ext(l, 0) * Dd::from(((2 * l + 1) as f64).sqrt() * flux_moment(l)));
        lower(sum).norm() / (4.0 * PI.powf(1.5))
    }

    /// Reflected intensity `I(q0, z = 0, -s)` at `s = (mu, phi)`, `mu in (0, 1]`,
    /// from the truncated expansion with `phi_q0 = 0`.
    pub fn reflected_intensity(&self, mu: f64, phi: f64) -> Result<Complex64> {
        if !(mu > 0.0 && mu <= 1.0) {
            return Err(Error::domain(format!("reflected directions need mu in (0, 1], got {mu}")));
        }
        let l_max = self.l_max;
        let sin = (1.0 - mu * mu).max(0.0).sqrt();
        let mut acc = czero();
        for m in -(l_max as i64)..=l_max as i64 {
            let am = m.unsigned_abs() as usize;
            let p = normalized_p_column(m, l_max, mu);
            let phase = lift(Complex64::from_polar(1.0, m as f64 * phi));
            let cs = if m.rem_euclid(2) == 1 { -1.0 } else { 1.0 };
            for l in (am..=l_max).step_by(2) {
                // Y_lm = sqrt((2l+1)/4pi) (-1)^m p_l^m sin^|m| e^{im phi}
                let y = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt() * cs * p[l - am] * sin.powi(am as i32);
                acc = acc + self.coefficient_ext(l, m) * phase * Dd::from(y);
            }
        }
        Ok(lower(acc))
    }
}

/// Column of `(l, m)`, `m >= 0`: `m` outer, `l = m + 2 alpha` inner.
pub fn column_index(l_max: usize, l: usize, m: usize) -> usize {
    (0..m).map(|mm| n_col(mm, l_max)).sum::<usize>() + (l - m) / 2
}

/// Precomputed, frequency-independent data of the F_N method.
pub struct FnSolver {
    medium: OpticalMedium,
    config: FnConfig,
    bases: Vec<SpectralBasis>,
    kernels: Vec<Vec<GKernel>>,
    columns: Vec<(usize, usize)>,
    rows: Vec<(usize, usize)>,
    mu_nodes: Vec<f64>,
    mu_weights: Vec<f64>,
    legendre: LegendreTable,
    /// `exp(i M phi_j)` for `M = -2 l_max..=2 l_max`, times the trapezoid weight.
    harmonics: Vec<Vec<Complex64>>,
}

impl FnSolver {
    pub fn new(medium: &OpticalMedium, config: &FnConfig) -> Result<Self> {
        config.validate(medium)?;
        let l_max = config.l_max;
        let l_b = config.l_b.unwrap_or_else(|| default_l_b(l_max, medium));
        let bases = (0..=l_max as i64)
            .map(|mp| SpectralBasis::build(mp, medium, l_max, l_b))
            .collect::<Result<Vec<_>>>()?;
        let kernels = bases
            .iter()
            .map(|b| b.g_table.iter().map(|col| GKernel::from_coefficients(b.m, col, medium)).collect())
            .collect();
        let columns: Vec<_> = (0..=l_max).flat_map(|m| (m..=l_max).step_by(2).map(move |l| (l, m))).collect();
        let rows: Vec<_> = bases
            .iter()
            .enumerate()
            .flat_map(|(mp, b)| (0..b.collocation.len()).map(move |j| (mp, j)))
            .collect();
        debug_assert_eq!(columns.len(), n_total(l_max));
        debug_assert_eq!(rows.len(), columns.len());
        let quad = gauss_legendre(config.n_mu)?.mapped(0.0, 1.0);
        let legendre = LegendreTable::new(l_max, &quad.nodes);
        let w = 2.0 * PI / config.n_phi as f64;
        let harmonics = (-2 * l_max as i64..=2 * l_max as i64)
            .map(|big_m| {
                (0..config.n_phi)
                    .map(|j| w * Complex64::from_polar(1.0, big_m as f64 * j as f64 * w))
                    .collect()
            })
            .collect();
        Ok(FnSolver {
            medium: medium.clone(),
            config: config.clone(),
            bases,
            kernels,
            columns,
            rows,
            mu_nodes: quad.nodes,
            mu_weights: quad.weights,
            legendre,
            harmonics,
        })
    }

    pub fn medium(&self) -> &OpticalMedium {
        &self.medium
    }

    pub fn config(&self) -> &FnConfig {
        &self.config
    }

    pub fn basis(&self, mp: usize) -> &SpectralBasis {
        &self.bases[mp]
    }

    /// `(m', j)` of each row: order and index into that order's collocation points.
    pub fn rows(&self) -> &[(usize, usize)] {
        &self.rows
    }

    pub fn columns(&self) -> &[(usize, usize)] {
        &self.columns
    }

    /// All `A_{lm}^{m'}(xi_j, q)` of one row, with `phi_q = 0`.
    pub fn a_table(&self, mp: usize, j: usize, q: f64) -> Result<ATable> {
        let values = self.a_values_ext(mp, j, q)?.into_iter().map(lower).collect();
        Ok(ATable { l_max: self.config.l_max, values })
    }

    /// [`FnSolver::a_table`] in double-double: the Wigner-weighted closed-form
    /// terms are evaluated in extended precision, the quadrature term in `f64`.
    fn a_values_ext(&self, mp: usize, j: usize, q: f64) -> Result<Vec<CDd>> {
        let l_max = self.config.l_max;
        let basis = &self.bases[mp];
        let xi = basis.collocation_ext[j];
        let x = (xi * Dd::from(q)).abs();
        let one = Dd::from(1.0);
        let k = (one + x * x).sqrt();
        let d = wigner_d_continued_in(l_max, x)?;
        let mpi = mp as i64;
        let g = |l: i64| if l < 0 { Dd::from(0.0) } else { basis.g_ext(j, l) };
        let sq = |v: Dd| if v > Dd::from(0.0) { v.sqrt() } else { Dd::from(0.0) };
        let half_ix = Complex::new(Dd::from(0.0), -x / Dd::from(2.0));
        let mut values = vec![czero(); (l_max + 1) * (2 * l_max + 1)];

        let third = self.third_term(mp, j, basis.collocation[j], q, &d)?;
        for l in 0..=l_max {
            let li = l as i64;
            let lf = Dd::from(l as f64);
            let mf = Dd::from(mp as f64);
            let pre = (Dd::PI() / (Dd::from(2.0) * lf + one)).sqrt();
            let (g_up, g_down) = (g(li + 1), g(li - 1));
            let streaming = sq((lf + one) * (lf + one) - mf * mf) * g_up + sq(lf * lf - mf * mf) * g_down;
            let a_minus = sq((lf - mf + one) * (lf - mf));
            let a_plus = sq((lf + mf + one) * (lf + mf));
            let lower_c = a_minus * g_down - a_plus * g_up;
            let upper_c = a_minus * g_up - a_plus * g_down;
            for m in -li..=li {
                if (li - m.abs()) % 2 == 1 {
                    continue;
                }
                let sm = if m.rem_euclid(2) == 1 { -pre } else { pre };
                let t1 = d.get(l, m, mpi) * (sm * k * streaming);
                let t2 = (d.get(l, m, mpi - 1) * lower_c + d.get(l, m, mpi + 1) * upper_c) * half_ix * sm;
                let idx = ATable::index(l_max, l, m);
                values[idx] = t1 + t2 + lift(third[idx]);
            }
        }
        Ok(values)
    }

    /// Hemisphere integral term of `A_{lm}^{m'}`; zero when `m' > L`.
    fn third_term(&self, mp: usize, j: usize, xi: f64, q: f64, d: &WignerDTable<Dd>) -> Result<Vec<Complex64>> {
        let l_max = self.config.l_max;
        let mut out = vec![C0; (l_max + 1) * (2 * l_max + 1)];
        let kernel = &self.kernels[mp][j];
        if kernel.is_zero() {
            return Ok(out);
        }
        let x = xi * q;
        let k = khat_z(x);
        let n_phi = self.config.n_phi;
        let a = mp as i64;
        let shift = 2 * l_max as i64;
        let cos_phi: Vec<f64> = (0..n_phi).map(|p| (2.0 * PI * p as f64 / n_phi as f64).cos()).collect();

        // Fourier coefficients F_M(mu_i) = int G(mu_i, phi) e^{i M phi} dphi, M = m + m''
        let m_range = l_max as i64 + a;
        let mut fourier = vec![vec![C0; (2 * m_range + 1) as usize]; self.mu_nodes.len()];
        let mut samples = vec![C0; n_phi];
        for (i, &mu) in self.mu_nodes.iter().enumerate() {
            let sin = (1.0 - mu * mu).max(0.0).sqrt();
            for (p, s) in samples.iter_mut().enumerate() {
                let z = Complex64::new(k * mu, -x * sin * cos_phi[p]);
                let den = xi + z;
                if den.norm() < 1e-14 {
                    return Err(Error::Singular(format!("hemisphere kernel denominator vanishes at mu = {mu}")));
                }
                // g^{m'}(-xi, z) = g^{m'}(xi, -z)
                *s = kernel.eval(-z, &self.medium) / den;
            }
            for big_m in -m_range..=m_range {
                let h = &self.harmonics[(big_m + shift) as usize];
                fourier[i][(big_m + m_range) as usize] = samples.iter().zip(h).map(|(s, e)| s * e).sum();
            }
        }

        let c_a = (-0.5 * ln_factorial(2 * mp) + mp as f64 * 2f64.ln() + ln_factorial(mp)).exp();
        let pref = 0.5 * self.medium.albedo() * xi * c_a;
        let weights: Vec<Complex64> = (-a..=a)
            .map(|mpp| if mpp.rem_euclid(2) == 1 { -1.0 } else { 1.0 } * lower(d.get(mp, mpp, -a)))
            .collect();
        for l in 0..=l_max {
            let li = l as i64;
            let sl = if l % 2 == 1 { -1.0 } else { 1.0 };
            let norm = ((2 * l + 1) as f64 / (4.0 * PI)).sqrt();
            for m in -li..=li {
                if (li - m.abs()) % 2 == 1 {
                    continue;
                }
                let mut acc = C0;
                for (w_idx, mpp) in (-a..=a).enumerate() {
                    if weights[w_idx] == C0 {
                        continue;
                    }
                    let col = (m + mpp + m_range) as usize;
                    let mut integral = C0;
                    for i in 0..self.mu_nodes.len() {
                        let radial = self.mu_weights[i]
                            * self.mu_nodes[i]
                            * self.legendre.get(i, mp, mpp)
                            * self.legendre.get(i, l, m);
                        integral += radial * fourier[i][col];
                    }
                    acc += weights[w_idx] * integral;
                }
                out[ATable::index(l_max, l, m)] = pref * sl * norm * acc;
            }
        }
        Ok(out)
    }

    /// Source amplitude of one row for the normally incident beam.
    pub fn k_entry(&self, mp: usize, j: usize, q0: f64) -> Result<Complex64> {
        self.k_entry_ext(mp, j, q0).map(lower)
    }

    fn k_entry_ext(&self, mp: usize, j: usize, q0: f64) -> Result<CDd> {
        let big_l = self.medium.big_l();
        if mp > big_l {
            return Ok(czero());
        }
        let basis = &self.bases[mp];
        let xi = basis.collocation_ext[j];
        let x = (xi * Dd::from(q0)).abs();
        let k = (Dd::from(1.0) + x * x).sqrt();
        let d = wigner_d_continued_in(big_l, x)?;
        let sum = (mp..=big_l).fold(czero(), |acc, l| {
            let w = basis.g_ext(j, l as i64) * Dd::from(self.medium.beta(l));
            let term = d.get(l, 0, mp as i64) * w;
            if l % 2 == 1 {
                acc - term
            } else {
                acc + term
            }
        });
        let pref = -Dd::from(2.0) * Dd::PI() * Dd::PI() * Dd::from(self.medium.albedo()) * xi / (xi + k);
        Ok(sum * pref)
    }

    /// One reduced-matrix row: `A_{l,m} + (1 - delta_{m0}) (-1)^m A_{l,-m}`.
    pub fn reduced_row(&self, mp: usize, j: usize, q0: f64) -> Result<Vec<Complex64>> {
        Ok(self.reduced_row_ext(mp, j, q0)?.into_iter().map(lower).collect())
    }

    fn reduced_row_ext(&self, mp: usize, j: usize, q0: f64) -> Result<Vec<CDd>> {
        let values = self.a_values_ext(mp, j, q0)?;
        let l_max = self.config.l_max;
        Ok(self
            .columns
            .iter()
            .map(|&(l, m)| {
                let mi = m as i64;
                let v = values[ATable::index(l_max, l, mi)];
                if m == 0 {
                    return v;
                }
                let w = values[ATable::index(l_max, l, -mi)];
                if m % 2 == 1 {
                    v - w
                } else {
                    v + w
                }
            })
            .collect())
    }

    /// Reduced matrix and right-hand side, rounded to `f64`.
    pub fn assemble(&self, q0: f64) -> Result<(DMatrix<Complex64>, DVector<Complex64>)> {
        let n = self.columns.len();
        let (a, k) = self.assemble_ext(q0)?;
        Ok((DMatrix::from_fn(n, n, |r, c| lower(a[r * n + c])), DVector::from_fn(n, |r, _| lower(k[r]))))
    }

    /// Row-major reduced matrix and right-hand side in double-double.
    fn assemble_ext(&self, q0: f64) -> Result<(Vec<CDd>, Vec<CDd>)> {
        let rows = self
            .rows
            .par_iter()
            .map(|&(mp, j)| Ok((self.reduced_row_ext(mp, j, q0)?, self.k_entry_ext(mp, j, q0)?)))
            .collect::<Result<Vec<_>>>()?;
        let mut a = Vec::with_capacity(rows.len() * rows.len());
        let mut k = Vec::with_capacity(rows.len());
        for (row, kv) in rows {
            a.extend(row);
            k.push(kv);
        }
        Ok((a, k))
    }

    pub fn solve(&self, q0: f64) -> Result<FnSystem> {
        let n = self.columns.len();
        let (a, k) = self.assemble_ext(q0)?;
        let weights: Vec<CDd> = self
            .columns
            .iter()
            .map(|&(l, m)| {
                let w = if m == 0 { ((2 * l + 1) as f64).sqrt() * flux_moment(l) } else { 0.0 };
                lift(Complex64::new(w, 0.0))
            })
            .collect();
        let sol = solve_dense(n, &a, &k, &weights)?;
        Ok(FnSystem {
            l_max: self.config.l_max,
            q0,
            a: DMatrix::from_fn(n, n, |r, c| lower(a[r * n + c])),
            k: DVector::from_fn(n, |r, _| lower(k[r])),
            c: DVector::from_fn(n, |r, _| lower(sol.c[r])),
            columns: self.columns.clone(),
            relative_residual: sol.residual,
            condition: sol.condition,
            matrix_condition: sol.matrix_condition,
            c_ext: sol.c,
        })
    }
}

struct DenseSolution {
    c: Vec<CDd>,
    residual: f64,
    condition: f64,
    matrix_condition: f64,
}

/// Dense double-double solve of `A c = K`.
///
/// Rows and columns are scaled to unit max-norm first: rows of large
/// discrete `xi` carry Wigner factors growing like `(xi q)^l`. The residual
/// refers to the scaled system. The system is Vandermonde-like, so the
/// normwise condition badly overstates the error of the flux; the gate uses
/// the componentwise condition of the functional `w . c` instead, from one
/// transposed solve.
fn solve_dense(n: usize, a: &[CDd], k: &[CDd], w: &[CDd]) -> Result<DenseSolution> {
    let lu = DenseLu::new(n, a)?;
    let matrix_condition = lu.condition(a);
    if k.iter().all(|v| v.re == Dd::from(0.0) && v.im == Dd::from(0.0)) {
        return Ok(DenseSolution { c: vec![czero(); n], residual: 0.0, condition: 1.0, matrix_condition });
    }
    let c = lu.solve(k);
    let (mut r2, mut k2) = (0.0, 0.0);
    for r in 0..n {
        let s = lu.row_scale(r);
        let ac = (0..n).fold(czero(), |acc, col| acc + a[r * n + col] * c[col]);
        r2 += (lower(k[r] - ac) * s).norm_sqr();
        k2 += (lower(k[r]) * s).norm_sqr();
    }
    let residual = (r2 / k2).sqrt();
    let condition = functional_condition(&lu, a, k, w, &c);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::IllConditioned {
            condition,
            advice: "change l_max or the quadrature sizes n_mu / n_phi".into(),
        });
    }
    if !(residual < 1e-8) {
        return Err(Error::NonConvergence { what: "F_N linear solve".into(), residual });
    }
    Ok(DenseSolution { c, residual, condition, matrix_condition })
}

/// `(sum |y_i| (|A| |c| + |K|)_i) / |w . c|` with `A^T y = w`: first-order
/// relative change of `w . c` under relative perturbations of every entry of
/// `A` and `K`.
fn functional_condition(lu: &DenseLu, a: &[CDd], k: &[CDd], w: &[CDd], c: &[CDd]) -> f64 {
    let n = c.len();
    let y = lu.solve_transpose(w);
    let value = lower(w.iter().zip(c).fold(czero(), |acc, (wi, ci)| acc + *wi * *ci)).norm();
    let c_abs: Vec<f64> = c.iter().map(|v| lower(*v).norm()).collect();
    let mut bound = 0.0;
    for r in 0..n {
        let yr = lower(y[r]).norm();
        let row: f64 = (0..n).map(|col| (lower(a[r * n + col]).norm() * c_abs[col]).powi(2)).sum::<f64>() + lower(k[r]).norm_sqr();
        bound += yr * yr * row;
    }
    let bound = bound.sqrt();
    if value > 0.0 {
        bound / value
    } else {
        f64::INFINITY
    }
}

/// Solves the F_N system at one internal frequency.
pub fn solve_fn(config: &FnConfig, medium: &OpticalMedium, q0: f64) -> Result<FnSystem> {
    FnSolver::new(medium, config)?.solve(q0)
}
