//! Chandrasekhar polynomials and the one-dimensional transport spectrum:
//! discrete eigenvalues, the dispersion function, normalization factors and
//! the collocation points used by the F_N system.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::extended::{real, Dd, Real};
use crate::special_functions::{gauss_legendre, seed_coefficient, QuadratureRule};

/// Eigenvalues of `B(m)` closer than this to 1 are continuum leakage.
pub const CONTINUUM_GUARD: f64 = 1e-9;

/// Homogeneous scattering medium with a truncated Legendre phase function.
#[derive(Debug, Clone, PartialEq)]
pub struct OpticalMedium {
    mu_a: f64,
    mu_s: f64,
    g: f64,
    betas: Vec<f64>,
}

impl OpticalMedium {
    /// Medium with `beta_l = (2l+1) g^l` for `l <= big_l`.
    pub fn new(mu_a: f64, mu_s: f64, g: f64, big_l: usize) -> Result<Self> {
        if !(mu_a > 0.0 && mu_a.is_finite()) || !(mu_s > 0.0 && mu_s.is_finite()) {
            return Err(Error::config(format!(
                "mu_a and mu_s must be positive and finite (mu_a = {mu_a}, mu_s = {mu_s})"
            )));
        }
        if !(g > 0.0 && g < 1.0) {
            return Err(Error::config(format!("anisotropy g must lie in (0, 1), got {g}")));
        }
        if big_l < 1 {
            return Err(Error::config("phase-function truncation L must be >= 1"));
        }
        let betas = (0..=big_l).map(|l| (2 * l + 1) as f64 * g.powi(l as i32)).collect();
        Ok(OpticalMedium { mu_a, mu_s, g, betas })
    }

    /// Medium given directly by its albedo and phase coefficients, with
    /// `mu_t = 1`. Allows `L = 0`; `g` is reported as `beta_1 / 3`.
    pub fn from_coefficients(albedo: f64, betas: Vec<f64>) -> Result<Self> {
        if !(albedo > 0.0 && albedo < 1.0) {
            return Err(Error::config(format!("albedo must lie in (0, 1), got {albedo}")));
        }
        if betas.first() != Some(&1.0) {
            return Err(Error::config("beta_0 must equal 1"));
        }
        for (l, &b) in betas.iter().enumerate().skip(1) {
            if !(b > 0.0 && b < (2 * l + 1) as f64) {
                return Err(Error::config(format!("beta_{l} = {b} outside (0, {})", 2 * l + 1)));
            }
        }
        let g = betas.get(1).map_or(0.0, |b| b / 3.0);
        Ok(OpticalMedium { mu_a: 1.0 - albedo, mu_s: albedo, g, betas })
    }

    pub fn mu_a(&self) -> f64 {
        self.mu_a
    }

    pub fn mu_s(&self) -> f64 {
        self.mu_s
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn mu_t(&self) -> f64 {
        self.mu_a + self.mu_s
    }

    pub fn albedo(&self) -> f64 {
        self.mu_s / self.mu_t()
    }

    /// Truncation degree `L` of the phase function.
    pub fn big_l(&self) -> usize {
        self.betas.len() - 1
    }

    pub fn beta(&self, l: usize) -> f64 {
        self.betas.get(l).copied().unwrap_or(0.0)
    }

    /// Transport mean free path `1 / (mu_t - mu_s g)` in physical units.
    pub fn ell_star(&self) -> f64 {
        1.0 / (self.mu_t() - self.mu_s * self.g)
    }
}

/// `h_l = 2l + 1 - albedo * beta_l` (the scattering term only up to `L`).
pub fn h_coeff(l: usize, medium: &OpticalMedium) -> f64 {
    (2 * l + 1) as f64 - medium.albedo() * medium.beta(l)
}

/// Chandrasekhar polynomials `g_l^m(nu)` for `l = |m|..=l_hi` by upward
/// recursion from the seed. Stable for `|nu| <= 1`.
pub fn chandrasekhar_g_forward(m: i64, nu: f64, l_hi: usize, medium: &OpticalMedium) -> Vec<f64> {
    let am = m.unsigned_abs() as usize;
    if l_hi < am {
        return Vec::new();
    }
    let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    let mf = am as f64;
    let mut out = Vec::with_capacity(l_hi - am + 1);
    let (mut prev, mut cur) = (0.0, seed_coefficient(am));
    out.push(cur);
    for l in am..l_hi {
        let lf = l as f64;
        let next = (nu * h_coeff(l, medium) * cur - (lf * lf - mf * mf).sqrt() * prev)
            / ((lf + 1.0) * (lf + 1.0) - mf * mf).sqrt();
        prev = cur;
        cur = next;
        out.push(cur);
    }
    out.iter().map(|v| sign * v).collect()
}

/// Largest relative residual of the recurrence over the interior degrees of
/// a column produced for order `m`.
pub fn chandrasekhar_residual(m: i64, nu: f64, column: &[f64], medium: &OpticalMedium) -> f64 {
    let am = m.unsigned_abs() as usize;
    let mf = am as f64;
    let mut worst: f64 = 0.0;
    for k in 0..column.len().saturating_sub(1) {
        let l = am + k;
        let lf = l as f64;
        let below = if k == 0 { 0.0 } else { column[k - 1] };
        let lhs = nu * h_coeff(l, medium) * column[k];
        let up = ((lf + 1.0) * (lf + 1.0) - mf * mf).sqrt() * column[k + 1];
        let down = (lf * lf - mf * mf).sqrt() * below;
        let scale = lhs.abs().max(up.abs()).max(down.abs()).max(f64::MIN_POSITIVE);
        worst = worst.max((lhs - up - down).abs() / scale);
    }
    worst
}

/// Chandrasekhar polynomials at a discrete eigenvalue `nu > 1` by Miller's
/// backward recursion, normalized to the seed at `l = |m|`.
///
/// The start degree begins at `l_hi + 40` and doubles until successive
/// normalized results agree to `1e-10`.
pub fn chandrasekhar_g_backward(m: i64, nu: f64, l_hi: usize, medium: &OpticalMedium) -> Result<Vec<f64>> {
    let am = m.unsigned_abs() as usize;
    if l_hi < am {
        return Ok(Vec::new());
    }
    let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    let mf = am as f64;
    let run = |l_start: usize| -> Vec<f64> {
        let n = l_start - am + 2;
        let mut g = vec![0.0; n];
        g[n - 2] = 1.0;
        for k in (1..n - 1).rev() {
            let l = (am + k) as f64;
            let v = (nu * h_coeff(am + k, medium) * g[k] - ((l + 1.0) * (l + 1.0) - mf * mf).sqrt() * g[k + 1])
                / (l * l - mf * mf).sqrt();
            g[k - 1] = v;
            if v.abs() > 1e150 {
                g[k - 1..].iter_mut().for_each(|x| *x *= 1e-150);
            }
        }
        let scale = seed_coefficient(am) / g[0];
        g.truncate(l_hi - am + 1);
        g.iter().map(|x| x * scale).collect()
    };
    let mut l_start = l_hi + 40;
    let mut prev = run(l_start);
    let mut change = f64::INFINITY;
    for _ in 0..8 {
        l_start *= 2;
        let next = run(l_start);
        let norm = next.iter().fold(0.0f64, |a, x| a.max(x.abs())).max(f64::MIN_POSITIVE);
        change = next.iter().zip(&prev).fold(0.0f64, |a, (x, y)| a.max((x - y).abs())) / norm;
        prev = next;
        if change < 1e-10 {
            return Ok(prev.iter().map(|v| sign * v).collect());
        }
    }
    Err(Error::NonConvergence { what: format!("backward recursion for g_l^{m}({nu})"), residual: change })
}

/// Zero-diagonal symmetric tridiagonal matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTridiagonal {
    pub off_diagonal: Vec<f64>,
}

impl SymTridiagonal {
    pub fn dim(&self) -> usize {
        self.off_diagonal.len() + 1
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.dim();
        let mut a = DMatrix::zeros(n, n);
        for (i, &b) in self.off_diagonal.iter().enumerate() {
            a[(i, i + 1)] = b;
            a[(i + 1, i)] = b;
        }
        a
    }

    /// Eigenpairs sorted by descending eigenvalue; eigenvectors are columns.
    pub fn eigen(&self) -> (Vec<f64>, DMatrix<f64>) {
        let eig = SymmetricEigen::new(self.to_dense());
        let n = self.dim();
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
        let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
        (values, vectors)
    }
}

/// The matrix `B(m)` on degrees `|m|..=l_b`, off-diagonals
/// `b_l = sqrt((l^2 - m^2) / (h_l h_{l-1}))`.
pub fn build_b_matrix(m: i64, l_b: usize, medium: &OpticalMedium) -> Result<SymTridiagonal> {
    if l_b < medium.big_l() {
        return Err(Error::domain(format!("l_B = {l_b} below phase truncation L = {}", medium.big_l())));
    }
    let am = m.unsigned_abs() as usize;
    if am > l_b {
        return Err(Error::domain(format!("|m| = {am} exceeds l_B = {l_b}")));
    }
    let mf = am as f64;
    let off_diagonal = ((am + 1)..=l_b)
        .map(|l| {
            let lf = l as f64;
            ((lf * lf - mf * mf) / (h_coeff(l, medium) * h_coeff(l - 1, medium))).sqrt()
        })
        .collect();
    Ok(SymTridiagonal { off_diagonal })
}

/// Default `l_B`: `max(2 l_max, 4 L, 60)`.
pub fn default_l_b(l_max: usize, medium: &OpticalMedium) -> usize {
    (2 * l_max).max(4 * medium.big_l()).max(60)
}

/// Discrete eigenvalues `nu_j^m > 1`, descending.
///
/// Eigenvalues of `B(m)` close to 1 converge slowly in `l_b`; when the
/// eigenvector has not decayed by the last degree the value is refined by a
/// secant iteration on `Lambda^m`.
pub fn discrete_eigenvalues(m: i64, medium: &OpticalMedium, l_b: usize) -> Result<Vec<f64>> {
    let b = build_b_matrix(m, l_b, medium)?;
    let (values, vectors) = b.eigen();
    let quad = gauss_legendre(64)?;
    let last = vectors.nrows() - 1;
    let mut out = Vec::new();
    for (j, &v) in values.iter().enumerate() {
        if v <= 1.0 + CONTINUUM_GUARD {
            continue;
        }
        let truncated = vectors[(last, j)].abs() > 1e-13;
        out.push(if truncated { refine_eigenvalue(m, v, medium, &quad).unwrap_or(v) } else { v });
    }
    out.sort_by(|a, b| b.total_cmp(a));
    Ok(out)
}

fn refine_eigenvalue(m: i64, start: f64, medium: &OpticalMedium, quad: &QuadratureRule) -> Option<f64> {
    let gap = start - 1.0;
    let lam = |w: f64| lambda_dispersion(m, w, medium, quad).ok();
    let (mut x0, mut x1) = (start, start + 1e-6 * gap);
    let (mut f0, mut f1) = (lam(x0)?, lam(x1)?);
    for _ in 0..60 {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        if !x2.is_finite() || x2 <= 1.0 || (x2 - start).abs() > 0.5 * gap {
            return None;
        }
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = lam(x1)?;
        if (x1 - x0).abs() <= 1e-15 * x1 {
            break;
        }
    }
    (f1.abs() < 1e-9).then_some(x1)
}

fn g_big_poly(m: i64, g_coeffs: &[f64], mu: Complex64, medium: &OpticalMedium) -> Complex64 {
    // sum_{l=|m|}^{L} beta_l p_l^m(mu) g_l^m, with p evaluated at complex mu
    let am = m.unsigned_abs() as usize;
    let big_l = medium.big_l();
    if am > big_l {
        return Complex64::new(0.0, 0.0);
    }
    let sign = if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 };
    let mf = am as f64;
    let (mut prev, mut cur) = (Complex64::new(0.0, 0.0), Complex64::new(seed_coefficient(am), 0.0));
    let mut acc = Complex64::new(0.0, 0.0);
    for l in am..=big_l {
        acc += medium.beta(l) * g_coeffs[l - am] * cur;
        let lf = l as f64;
        let next = ((2.0 * lf + 1.0) * mu * cur - (lf * lf - mf * mf).sqrt() * prev)
            / ((lf + 1.0) * (lf + 1.0) - mf * mf).sqrt();
        prev = cur;
        cur = next;
    }
    sign * acc
}

/// `g^m(nu, mu) = sum_{l=|m|}^{L} beta_l p_l^m(mu) g_l^m(nu)`.
pub fn g_big(m: i64, nu: f64, mu: f64, medium: &OpticalMedium) -> Result<f64> {
    if m.unsigned_abs() as usize > medium.big_l() {
        return Err(Error::domain(format!("|m| = {} exceeds L = {}", m.abs(), medium.big_l())));
    }
    Ok(g_big_complex(m, nu, mu.into(), medium).re)
}

/// `g^m(nu, z)` at a complex direction cosine `z`; identically zero for `|m| > L`.
pub fn g_big_complex(m: i64, nu: f64, z: Complex64, medium: &OpticalMedium) -> Complex64 {
    let am = m.unsigned_abs() as usize;
    if am > medium.big_l() {
        return Complex64::new(0.0, 0.0);
    }
    // sign of g_l^{-m} cancels against that of p_l^{-m}
    let coeffs = chandrasekhar_g_forward(am as i64, nu, medium.big_l(), medium);
    g_big_poly(am as i64, &coeffs, z, medium)
}

/// Precomputed kernel `mu -> g^m(nu, mu)` for one `(m, nu)` pair.
#[derive(Debug, Clone)]
pub struct GKernel {
    m: i64,
    coeffs: Vec<f64>,
}

impl GKernel {
    pub fn new(m: i64, nu: f64, medium: &OpticalMedium) -> Self {
        let am = m.unsigned_abs() as usize;
        let coeffs = if am > medium.big_l() {
            Vec::new()
        } else {
            chandrasekhar_g_forward(am as i64, nu, medium.big_l(), medium)
        };
        GKernel { m: am as i64, coeffs }
    }

    /// Kernel from precomputed `g_l^m(nu)` for `l = |m|..`; at least `L - |m| + 1`
    /// entries are needed when `|m| <= L`.
    pub fn from_coefficients(m: i64, coeffs: &[f64], medium: &OpticalMedium) -> Self {
        let am = m.unsigned_abs() as usize;
        if am > medium.big_l() {
            return GKernel { m: am as i64, coeffs: Vec::new() };
        }
        let n = medium.big_l() - am + 1;
        assert!(coeffs.len() >= n, "need {n} Chandrasekhar coefficients, got {}", coeffs.len());
        GKernel { m: am as i64, coeffs: coeffs[..n].to_vec() }
    }

    /// Kernel at a discrete eigenvalue, with the coefficients taken from the
    /// backward recursion. Use this whenever `nu` is a root of `Lambda^m`.
    pub fn discrete(m: i64, nu: f64, medium: &OpticalMedium) -> Result<Self> {
        let am = m.unsigned_abs() as usize;
        let coeffs = if am > medium.big_l() {
            Vec::new()
        } else {
            chandrasekhar_g_backward(am as i64, nu, medium.big_l(), medium)?
        };
        Ok(GKernel { m: am as i64, coeffs })
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, z: Complex64, medium: &OpticalMedium) -> Complex64 {
        if self.coeffs.is_empty() {
            return Complex64::new(0.0, 0.0);
        }
        g_big_poly(self.m, &self.coeffs, z, medium)
    }
}

/// Dispersion function `Lambda^m(w)` for real `|w| > 1`, written as
/// `1 - albedo w sum_l beta_l g_l^m(w) q_l^m(w)` with the second-kind moments
/// from [`second_kind_moments`]. Expanding in degree keeps the sum well
/// conditioned at large `w`, where `g^m(w, mu)` itself cancels badly.
pub fn lambda_dispersion(m: i64, w: f64, medium: &OpticalMedium, quad: &QuadratureRule) -> Result<f64> {
    if w.abs() <= 1.0 || !w.is_finite() {
        return Err(Error::domain(format!("dispersion function needs |w| > 1, got {w}")));
    }
    let am = m.unsigned_abs() as usize;
    let big_l = medium.big_l();
    if am > big_l {
        return Ok(1.0);
    }
    let g = chandrasekhar_g_forward(am as i64, w, big_l, medium);
    let q = second_kind_moments(am, w, big_l, quad)?;
    let sum: f64 = (am..=big_l).map(|l| medium.beta(l) * g[l - am] * q[l - am]).sum();
    Ok(1.0 - medium.albedo() * w * sum)
}

const SPLIT_RADIUS: f64 = 1.05;

/// `q_l^m(w) = (1/2) int_{-1}^{1} p_l^m(mu) (1-mu^2)^{m/2} / (w - mu) dmu` for
/// `l = m..=l_hi`, `m >= 0`, `|w| > 1`, where `p_l^m (1-mu^2)^{m/2}` is the
/// normalized associated Legendre function.
///
/// The moments obey the Legendre recurrence above `l = m` and form its
/// minimal solution, so they come from a backward sweep normalized to the
/// `l = m` moment, which is integrated directly.
pub fn second_kind_moments(m: usize, w: f64, l_hi: usize, quad: &QuadratureRule) -> Result<Vec<f64>> {
    if w.abs() <= 1.0 || !w.is_finite() {
        return Err(Error::domain(format!("second-kind moments need |w| > 1, got {w}")));
    }
    if l_hi < m {
        return Ok(Vec::new());
    }
    let seed = seed_coefficient(m);
    let weight = |mu: f64| (1.0 - mu * mu).powi(m as i32);
    let first = if w.abs() < SPLIT_RADIUS {
        let fw = weight(w);
        quad.integrate(|mu| (weight(mu) - fw) / (w - mu)) + fw * ((w + 1.0) / (w - 1.0)).ln()
    } else {
        quad.integrate(|mu| weight(mu) / (w - mu))
    };
    let first = 0.5 * seed * first;
    if l_hi == m {
        return Ok(vec![first]);
    }
    // minimal solution decays like rho^{-l}
    let a = w.abs();
    let rho = a + (a * a - 1.0).sqrt();
    let extra = ((40.0 / rho.ln()).ceil() as usize).clamp(20, 200_000);
    let n = l_hi - m + extra;
    let mf = m as f64;
    let mut q = vec![0.0; n + 2];
    q[n] = 1e-300_f64.sqrt();
    for k in (1..=n).rev() {
        let l = (m + k) as f64;
        let v = ((2.0 * l + 1.0) * w * q[k] - ((l + 1.0) * (l + 1.0) - mf * mf).sqrt() * q[k + 1])
            / (l * l - mf * mf).sqrt();
        q[k - 1] = v;
        if v.abs() > 1e150 {
            q[k - 1..].iter_mut().for_each(|x| *x *= 1e-150);
        }
    }
    let scale = first / q[0];
    q.truncate(l_hi - m + 1);
    Ok(q.into_iter().map(|x| x * scale).collect())
}

/// Normalization factor `N^m(nu_j) = int mu phi^m(nu_j, mu)^2 (1-mu^2)^{|m|} dmu`
/// at a discrete eigenvalue, evaluated as `albedo nu_j^2 g^m(nu_j, nu_j) Lambda'(nu_j) / 2`.
/// The derivative is a five-point central difference with step
/// `1e-3 (nu_j - 1)`, the distance to the branch point setting the scale.
pub fn normalization_factor(m: i64, nu: f64, medium: &OpticalMedium, quad: &QuadratureRule) -> Result<f64> {
    if nu <= 1.0 {
        return Err(Error::domain(format!("normalization needs a discrete eigenvalue > 1, got {nu}")));
    }
    let h = 1e-3 * (nu - 1.0);
    let lam = |x: f64| lambda_dispersion(m, x, medium, quad);
    let d_lambda = (8.0 * (lam(nu + h)? - lam(nu - h)?) - (lam(nu + 2.0 * h)? - lam(nu - 2.0 * h)?)) / (12.0 * h);
    let g_nn = GKernel::discrete(m, nu, medium)?.eval(nu.into(), medium).re;
    Ok(0.5 * medium.albedo() * nu * nu * g_nn * d_lambda)
}

/// Number of collocation points for order `m`: `floor((l_max - m)/2) + 1`.
pub fn n_col(m: usize, l_max: usize) -> usize {
    if m > l_max {
        0
    } else {
        (l_max - m) / 2 + 1
    }
}

/// Discrete eigenvalues followed by `n_col - M` cosine-spaced continuum points.
pub fn collocation_points(m: i64, n_col: usize, discrete: &[f64]) -> Result<Vec<f64>> {
    let big_m = discrete.len();
    if n_col < big_m {
        return Err(Error::config(format!(
            "order m = {m} has {big_m} discrete eigenvalues but only {n_col} collocation rows; raise l_max"
        )));
    }
    let denom = (n_col - big_m + 1) as f64;
    let mut points = discrete.to_vec();
    points.extend(
        ((big_m + 1)..=n_col).map(|j| (0.5 * std::f64::consts::PI * (j - big_m) as f64 / denom).cos()),
    );
    Ok(points)
}

/// `h_l` in precision `T`.
pub fn h_coeff_in<T: Real>(l: usize, medium: &OpticalMedium) -> T {
    real::<T>((2 * l + 1) as f64) - real::<T>(medium.albedo()) * real::<T>(medium.beta(l))
}

fn seed_in<T: Real>(m: usize) -> T {
    (1..=m).fold(T::one(), |acc, k| acc * (real::<T>((2 * k - 1) as f64) / real::<T>((2 * k) as f64)).sqrt())
}

fn recurrence_weight<T: Real>(l: usize, am: usize) -> T {
    let (lf, mf) = (real::<T>(l as f64), real::<T>(am as f64));
    (lf * lf - mf * mf).sqrt()
}

/// [`chandrasekhar_g_forward`] in precision `T`.
pub fn chandrasekhar_g_forward_in<T: Real>(m: i64, nu: T, l_hi: usize, medium: &OpticalMedium) -> Vec<T> {
    let am = m.unsigned_abs() as usize;
    if l_hi < am {
        return Vec::new();
    }
    let mut out = Vec::with_capacity(l_hi - am + 1);
    let (mut prev, mut cur) = (T::zero(), seed_in::<T>(am));
    out.push(cur);
    for l in am..l_hi {
        let next = (nu * h_coeff_in::<T>(l, medium) * cur - recurrence_weight::<T>(l, am) * prev)
            / recurrence_weight::<T>(l + 1, am);
        prev = cur;
        cur = next;
        out.push(cur);
    }
    if m < 0 && am % 2 == 1 {
        out.iter_mut().for_each(|v| *v = -*v);
    }
    out
}

/// Ratios `r_l = g_l / g_{l-1}` of the minimal solution for `l = |m|+1..=l_hi`,
/// by the backward continued fraction started far enough out that its
/// truncation is below double-double roundoff. Needs `nu > 1`.
fn minimal_ratios(am: usize, nu: Dd, l_hi: usize, medium: &OpticalMedium) -> Vec<Dd> {
    let nf = f64::from(nu);
    let ln_rho = (nf + (nf * nf - 1.0).max(0.0).sqrt()).ln().max(1e-6);
    let extra = ((40.0 / ln_rho).ceil() as usize).clamp(20, 400_000);
    let top = l_hi.max(am + 1) + extra;
    let mut ratios = vec![Dd::from(0.0); top - am + 1];
    let mut r_next = Dd::from(0.0);
    for l in (am + 1..=top).rev() {
        let r = recurrence_weight::<Dd>(l, am)
            / (nu * h_coeff_in::<Dd>(l, medium) - recurrence_weight::<Dd>(l + 1, am) * r_next);
        ratios[l - am] = r;
        r_next = r;
    }
    ratios.truncate(l_hi.max(am + 1) - am + 1);
    ratios
}

/// Residual of the lowest-degree equation for the minimal solution; zero
/// exactly at the discrete eigenvalues of order `m`.
fn minimal_residual(am: usize, nu: Dd, medium: &OpticalMedium) -> Dd {
    let r = minimal_ratios(am, nu, am + 1, medium);
    nu * h_coeff_in::<Dd>(am, medium) - recurrence_weight::<Dd>(am + 1, am) * r[1]
}

/// Polishes a discrete eigenvalue to double-double accuracy by the secant
/// method on [`minimal_residual`].
pub fn polish_discrete(m: i64, nu: f64, medium: &OpticalMedium) -> Result<Dd> {
    let am = m.unsigned_abs() as usize;
    if nu <= 1.0 {
        return Err(Error::domain(format!("discrete eigenvalues exceed 1, got {nu}")));
    }
    let f = |x: Dd| minimal_residual(am, x, medium);
    let mut x0 = Dd::from(nu);
    let mut x1 = x0 + Dd::from(1e-9 * (nu - 1.0));
    let (mut f0, mut f1) = (f(x0), f(x1));
    for _ in 0..60 {
        if f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        let step = f64::from(x2 - x1).abs();
        x0 = x1;
        f0 = f1;
        x1 = x2;
        f1 = f(x1);
        if step <= 1e-31 * nu {
            break;
        }
    }
    let drift = f64::from(x1) - nu;
    if !f64::from(x1).is_finite() || drift.abs() > 1e-6 * (nu - 1.0) {
        return Err(Error::NonConvergence {
            what: format!("polishing discrete eigenvalue {nu} of order {m}"),
            residual: f64::from(f1).abs(),
        });
    }
    Ok(x1)
}

/// Minimal-solution `g_l^m(nu)` for `l = |m|..=l_hi` in double-double.
pub fn chandrasekhar_g_minimal(m: i64, nu: Dd, l_hi: usize, medium: &OpticalMedium) -> Vec<Dd> {
    let am = m.unsigned_abs() as usize;
    if l_hi < am {
        return Vec::new();
    }
    let ratios = minimal_ratios(am, nu, l_hi, medium);
    let mut out = Vec::with_capacity(l_hi - am + 1);
    let mut cur = seed_in::<Dd>(am);
    out.push(cur);
    for l in am + 1..=l_hi {
        cur *= ratios[l - am];
        out.push(cur);
    }
    if m < 0 && am % 2 == 1 {
        out.iter_mut().for_each(|v| *v = -*v);
    }
    out
}

/// Spectral data for one azimuthal order.
///
/// Discrete eigenvalues are polished to double-double accuracy; the `f64`
/// fields are the rounded values of the extended ones.
#[derive(Debug, Clone)]
pub struct SpectralBasis {
    pub m: i64,
    pub discrete: Vec<f64>,
    pub collocation: Vec<f64>,
    /// `g_table[j][k] = g_{|m|+k}^m(collocation[j])` for degrees up to `l_max + 1`.
    pub g_table: Vec<Vec<f64>>,
    pub collocation_ext: Vec<Dd>,
    pub g_table_ext: Vec<Vec<Dd>>,
}

impl SpectralBasis {
    pub fn build(m: i64, medium: &OpticalMedium, l_max: usize, l_b: usize) -> Result<Self> {
        let am = m.unsigned_abs() as usize;
        let rough = if am <= l_b { discrete_eigenvalues(m, medium, l_b)? } else { Vec::new() };
        let polished = rough.iter().map(|&nu| polish_discrete(m, nu, medium)).collect::<Result<Vec<_>>>()?;
        let discrete: Vec<f64> = polished.iter().map(|&v| f64::from(v)).collect();
        let collocation = collocation_points(m, n_col(am, l_max), &discrete)?;
        let collocation_ext: Vec<Dd> = polished
            .iter()
            .copied()
            .chain(collocation[polished.len()..].iter().map(|&x| Dd::from(x)))
            .collect();
        let g_table_ext: Vec<Vec<Dd>> = collocation_ext
            .iter()
            .enumerate()
            .map(|(j, &xi)| {
                if j < polished.len() {
                    chandrasekhar_g_minimal(m, xi, l_max + 1, medium)
                } else {
                    chandrasekhar_g_forward_in(m, xi, l_max + 1, medium)
                }
            })
            .collect();
        let g_table = g_table_ext.iter().map(|col| col.iter().map(|&v| f64::from(v)).collect()).collect();
        Ok(SpectralBasis { m, discrete, collocation, g_table, collocation_ext, g_table_ext })
    }

    pub fn num_discrete(&self) -> usize {
        self.discrete.len()
    }

    /// `g_l^m(xi_j)`, zero below `|m|`.
    #[inline]
    pub fn g(&self, j: usize, l: i64) -> f64 {
        let am = self.m.abs();
        if l < am {
            return 0.0;
        }
        self.g_table[j].get((l - am) as usize).copied().unwrap_or(0.0)
    }

    /// [`SpectralBasis::g`] in double-double.
    #[inline]
    pub fn g_ext(&self, j: usize, l: i64) -> Dd {
        let am = self.m.abs();
        if l < am {
            return Dd::from(0.0);
        }
        self.g_table_ext[j].get((l - am) as usize).copied().unwrap_or(Dd::from(0.0))
    }
}
