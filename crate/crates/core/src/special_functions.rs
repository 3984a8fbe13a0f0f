//! Legendre-family polynomials, Gauss-Legendre quadrature and Wigner
//! d-matrices continued to imaginary rotation angles.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::{Complex, Complex64};

use crate::error::{Error, Result};
use crate::extended::{real, Real};

/// Legendre polynomial `P_l(mu)` by the upward three-term recurrence.
pub fn legendre_p(l: usize, mu: f64) -> f64 {
    let (mut p_prev, mut p) = (1.0, mu);
    if l == 0 {
        return p_prev;
    }
    for n in 1..l {
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * mu * p - nf * p_prev) / (nf + 1.0);
        p_prev = p;
        p = next;
    }
    p
}

/// `(2m-1)!! / sqrt((2m)!)`, the common seed of `p_m^m` and `g_m^m`.
///
/// Accumulated as a product of `sqrt((2k-1)/(2k))` so it never overflows.
pub fn seed_coefficient(m: usize) -> f64 {
    (1..=m)
        .map(|k| ((2 * k - 1) as f64 / (2 * k) as f64).sqrt())
        .product()
}

/// `ln(n!)`. Exact table below 21, summed logarithms above.
pub fn ln_factorial(n: usize) -> f64 {
    if n <= 20 {
        ((1..=n as u64).product::<u64>() as f64).ln()
    } else {
        (2..=n).map(|k| (k as f64).ln()).sum()
    }
}

/// `sqrt((l-m)!/(l+m)!)` for `|m| <= l`, evaluated in log space.
pub fn factorial_ratio_sqrt(l: usize, m: i64) -> f64 {
    let lm = l as i64;
    debug_assert!(m.abs() <= lm);
    (0.5 * (ln_factorial((lm - m) as usize) - ln_factorial((lm + m) as usize))).exp()
}

/// All `p_l^m(mu)` for `l = |m|..=l_hi`; index `k` holds degree `|m| + k`.
///
/// Negative orders use `p_l^{-m} = (-1)^m p_l^m`.
pub fn normalized_p_column(m: i64, l_hi: usize, mu: f64) -> Vec<f64> {
    normalized_p_column_in(m, l_hi, mu)
}

/// [`normalized_p_column`] in any [`Real`] precision.
pub fn normalized_p_column_in<T: Real>(m: i64, l_hi: usize, mu: T) -> Vec<T> {
    let am = m.unsigned_abs() as usize;
    if l_hi < am {
        return Vec::new();
    }
    let sign: T = real(if m < 0 && am % 2 == 1 { -1.0 } else { 1.0 });
    let mut out = Vec::with_capacity(l_hi - am + 1);
    let mf = am as f64;
    let mut prev = T::zero();
    let mut cur = (1..=am).fold(T::one(), |acc, k| acc * (real::<T>((2 * k - 1) as f64) / real((2 * k) as f64)).sqrt());
    out.push(sign * cur);
    for l in am..l_hi {
        let lf = l as f64;
        let a = real::<T>(lf * lf - mf * mf).sqrt();
        let c = real::<T>((lf + 1.0) * (lf + 1.0) - mf * mf).sqrt();
        let next = (real::<T>(2.0 * lf + 1.0) * mu * cur - a * prev) / c;
        prev = cur;
        cur = next;
        out.push(sign * cur);
    }
    out
}

/// Normalized polynomial `p_l^m(mu) = sqrt((l-m)!/(l+m)!) d^m P_l / dmu^m`.
pub fn normalized_p(l: usize, m: i64, mu: f64) -> Result<f64> {
    if m.unsigned_abs() as usize > l {
        return Err(Error::domain(format!("|m| = {} exceeds degree l = {l}", m.abs())));
    }
    Ok(*normalized_p_column(m, l, mu).last().expect("non-empty column"))
}

/// Associated Legendre function `P_l^m(mu)` with the Condon-Shortley phase,
/// for either sign of `m`.
pub fn assoc_legendre(l: usize, m: i64, mu: f64) -> f64 {
    let am = m.unsigned_abs() as usize;
    if am > l {
        return 0.0;
    }
    let p = *normalized_p_column(am as i64, l, mu).last().unwrap();
    let sin_pow = (1.0 - mu * mu).max(0.0).powf(am as f64 / 2.0);
    let cs = if am % 2 == 1 { -1.0 } else { 1.0 };
    // P_l^m = (-1)^m sqrt((l+m)!/(l-m)!) p_l^m (1-mu^2)^{m/2}
    let pos = cs * p * sin_pow / factorial_ratio_sqrt(l, am as i64);
    if m >= 0 {
        pos
    } else {
        // P_l^{-m} = (-1)^m (l-m)!/(l+m)! P_l^m
        cs * factorial_ratio_sqrt(l, am as i64).powi(2) * pos
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// The same rule affinely mapped onto `[a, b]`.
    pub fn mapped(&self, a: f64, b: f64) -> QuadratureRule {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (b + a);
        QuadratureRule {
            nodes: self.nodes.iter().map(|x| mid + half * x).collect(),
            weights: self.weights.iter().map(|w| half * w).collect(),
        }
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes.iter().zip(&self.weights).map(|(&x, &w)| w * f(x)).sum()
    }
}

/// `n`-point Gauss-Legendre rule from the eigen-decomposition of the Jacobi
/// matrix (Golub-Welsch).
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    if n == 0 {
        return Err(Error::domain("quadrature needs at least one node"));
    }
    let mut jacobi = DMatrix::<f64>::zeros(n, n);
    for i in 1..n {
        let k = i as f64;
        let b = k / (4.0 * k * k - 1.0).sqrt();
        jacobi[(i, i - 1)] = b;
        jacobi[(i - 1, i)] = b;
    }
    let eigen = SymmetricEigen::new(jacobi);
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eigen.eigenvectors[(0, i)];
            (eigen.eigenvalues[i], 2.0 * v0 * v0)
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // Symmetrize: the rule is exactly even, the eigensolver is not.
    let mut nodes: Vec<f64> = pairs.iter().map(|p| p.0).collect();
    let mut weights: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        let w = 0.5 * (weights[i] + weights[j]);
        nodes[i] = -x;
        nodes[j] = x;
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Ok(QuadratureRule { nodes, weights })
}

/// Gauss-Legendre rule on `[-1, 1]` with nodes polished by Newton steps on
/// `P_n` in the working precision of `T`.
pub fn gauss_legendre_in<T: Real>(n: usize) -> Result<(Vec<T>, Vec<T>)> {
    let start = gauss_legendre(n)?;
    let eval = |x: T| {
        // P_n(x) and P_n'(x) by the three-term recurrence
        let (mut p0, mut p1) = (T::one(), x);
        for k in 1..n {
            let kf = k as f64;
            let p2 = (real::<T>(2.0 * kf + 1.0) * x * p1 - real::<T>(kf) * p0) / real(kf + 1.0);
            p0 = p1;
            p1 = p2;
        }
        let (pn, pn1) = if n == 1 { (x, T::one()) } else { (p1, p0) };
        let dp = real::<T>(n as f64) * (x * pn - pn1) / (x * x - T::one());
        (pn, dp)
    };
    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &x0 in &start.nodes {
        let mut x: T = real(x0);
        for _ in 0..3 {
            let (p, dp) = eval(x);
            x = x - p / dp;
        }
        let (_, dp) = eval(x);
        nodes.push(x);
        weights.push(real::<T>(2.0) / ((T::one() - x * x) * dp * dp));
    }
    Ok((nodes, weights))
}

/// Wigner d-matrices `d^l_{mm'}[i tau(x)]` for the complex polar angle with
/// `cos(theta) = sqrt(1 + x^2)` and `sin(theta) = i x`, for all `l <= l_max`.
#[derive(Debug, Clone)]
pub struct WignerDTable<T: Real = f64> {
    x: T,
    l_max: usize,
    blocks: Vec<Vec<Complex<T>>>,
}

impl<T: Real> WignerDTable<T> {
    pub fn argument(&self) -> T {
        self.x
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    /// `d^l_{m m'}`; zero outside `|m|, |m'| <= l` or above `l_max`.
    #[inline]
    pub fn get(&self, l: usize, m: i64, mp: i64) -> Complex<T> {
        let li = l as i64;
        if l > self.l_max || m.abs() > li || mp.abs() > li {
            return Complex::new(T::zero(), T::zero());
        }
        let w = 2 * l + 1;
        self.blocks[l][(m + li) as usize * w + (mp + li) as usize]
    }
}

impl WignerDTable<f64> {
    /// Max deviation of `sum_{m'} d_{m'm} d_{m'm''}` from `delta_{mm''}` at
    /// degree `l`.
    ///
    /// Each deviation is divided by `max(1, sum_{m'} |d_{m'm}| |d_{m'm''}|)`:
    /// for large `x` the entries grow geometrically in `l` and the orthogonality
    /// sums are cancellations among terms of that size.
    pub fn unitarity_residual(&self, l: usize) -> f64 {
        let li = l as i64;
        let mut worst: f64 = 0.0;
        for m in -li..=li {
            for m2 in -li..=li {
                let (mut s, mut scale) = (Complex64::new(0.0, 0.0), 0.0);
                for mp in -li..=li {
                    let (a, b) = (self.get(l, mp, m), self.get(l, mp, m2));
                    s += a * b;
                    scale += a.norm() * b.norm();
                }
                let target = if m == m2 { 1.0 } else { 0.0 };
                worst = worst.max((s - target).norm() / scale.max(1.0));
            }
        }
        worst
    }
}

/// Builds the continued Wigner table by the pyramid of recurrences seeded at
/// `l = 1`, completing the remaining entries through the index symmetries.
pub fn wigner_d_continued(l_max: usize, x: f64) -> Result<WignerDTable> {
    wigner_d_continued_in(l_max, x)
}

/// [`wigner_d_continued`] in any [`Real`] precision.
pub fn wigner_d_continued_in<T: Real>(l_max: usize, x: T) -> Result<WignerDTable<T>> {
    if !x.is_finite() || x < T::zero() {
        return Err(Error::domain(format!("Wigner argument must be finite and >= 0, got {x:?}")));
    }
    let r = |v: f64| -> T { real(v) };
    let zero = Complex::new(T::zero(), T::zero());
    let mul_i = |z: Complex<T>| Complex::new(-z.im, z.re);
    let one = T::one();
    let k = (one + x * x).sqrt();
    let d11 = r(0.5) * (one + k);
    // 1 - k without cancellation
    let d1m1 = -(x * x) / (r(2.0) * (one + k));
    // sqrt|d^1_{1,-1} / d^1_{11}|
    let ratio = (d1m1 / d11).abs().sqrt();

    let mut blocks: Vec<Vec<Complex<T>>> = Vec::with_capacity(l_max + 1);
    blocks.push(vec![Complex::new(one, T::zero())]);
    for l in 1..=l_max {
        let li = l as i64;
        let w = 2 * l + 1;
        let idx = |m: i64, mp: i64| (m + li) as usize * w + (mp + li) as usize;
        let mut blk: Vec<Option<Complex<T>>> = vec![None; w * w];
        let lf = r(l as f64);

        if l == 1 {
            blk[idx(0, 0)] = Some(Complex::new(k, T::zero()));
            blk[idx(1, 1)] = Some(Complex::new(d11, T::zero()));
            blk[idx(1, 0)] = Some(Complex::new(T::zero(), -x / r(2.0).sqrt()));
            blk[idx(1, -1)] = Some(Complex::new(d1m1, T::zero()));
        } else {
            let prev = &blocks[l - 1];
            let prev2 = &blocks[l - 2];
            let get1 = |m: i64, mp: i64| prev[(m + li - 1) as usize * (w - 2) + (mp + li - 1) as usize];
            let get2 = |m: i64, mp: i64| prev2[(m + li - 2) as usize * (w - 4) + (mp + li - 2) as usize];
            for m in 0..=(li - 2) {
                for mp in -m..=m {
                    let (mf, mpf) = (r(m as f64), r(mp as f64));
                    let pre = lf * (r(2.0) * lf - one) / ((lf * lf - mf * mf) * (lf * lf - mpf * mpf)).sqrt();
                    let a = k - mf * mpf / (lf * (lf - one));
                    let l1 = lf - one;
                    let b = ((l1 * l1 - mf * mf) * (l1 * l1 - mpf * mpf)).sqrt() / (l1 * (r(2.0) * lf - one));
                    let lower = if (m as usize) <= l - 2 && (mp.unsigned_abs() as usize) <= l - 2 {
                        get2(m, mp)
                    } else {
                        zero
                    };
                    blk[idx(m, mp)] = Some((get1(m, mp) * a - lower * b) * pre);
                }
            }
            let corner = get1(li - 1, li - 1);
            blk[idx(li, li)] = Some(corner * d11);
            blk[idx(li - 1, li - 1)] = Some(corner * (lf * k - lf + one));
        }

        // Lower m' along the rows m = l and m = l - 1.
        for mp in (-li..li).rev() {
            let f = (r((li + mp + 1) as f64) / r((li - mp) as f64)).sqrt() * ratio;
            let up = blk[idx(li, mp + 1)].expect("filled from the corner");
            blk[idx(li, mp)] = Some(-mul_i(up * f));
        }
        if l >= 2 {
            for mp in ((1 - li)..=(li - 2)).rev() {
                let mpf = r(mp as f64);
                let f = (lf * k - mpf) / (lf * k - mpf - one)
                    * (r((li + mp + 1) as f64) / r((li - mp) as f64)).sqrt()
                    * ratio;
                let up = blk[idx(li - 1, mp + 1)].expect("filled from the corner");
                blk[idx(li - 1, mp)] = Some(-mul_i(up * f));
            }
        }

        // Remaining entries from d_{mm'} = d_{-m',-m} = (-1)^{m+m'} d_{-m,-m'} = (-1)^{m+m'} d_{m'm}.
        let mut full = vec![zero; w * w];
        for m in -li..=li {
            for mp in -li..=li {
                let odd = (m + mp).rem_euclid(2) == 1;
                let candidates = [(m, mp, false), (-mp, -m, false), (-m, -mp, odd), (mp, m, odd)];
                let v = candidates
                    .iter()
                    .find_map(|&(a, b, flip)| blk[idx(a, b)].map(|v| if flip { -v } else { v }))
                    .expect("every symmetry orbit contains a computed entry");
                full[idx(m, mp)] = v;
            }
        }
        blocks.push(full);
    }
    Ok(WignerDTable { x, l_max, blocks })
}
