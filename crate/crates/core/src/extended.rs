//! Double-double arithmetic for the collocation system.
//!
//! The F_N matrix mixes entries growing like `(xi q)^l` with order-one
//! entries, and the rows of different continuum points are nearly
//! dependent once `q` is a few inverse mean free paths. Double precision
//! loses every digit of `J_+` there, so the closed-form matrix terms, the
//! discrete eigenvalues they depend on, and the solve run in double-double.

use std::fmt::Debug;

use num_complex::Complex;
use num_traits::Float;

use crate::error::{Error, Result};

pub use crate::dd::Dd;

pub type CDd = Complex<Dd>;

/// Scalars the generic recurrences run on.
pub trait Real: Float + From<f64> + Send + Sync + Debug + 'static {
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f64 {}
impl Real for Dd {}

#[inline]
pub fn real<T: Real>(v: f64) -> T {
    <T as From<f64>>::from(v)
}

#[inline]
pub fn cplx<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn lift(z: Complex<f64>) -> CDd {
    Complex::new(Dd::from(z.re), Dd::from(z.im))
}

#[inline]
pub fn lower<T: Real>(z: Complex<T>) -> Complex<f64> {
    Complex::new(z.re.to_f64_lossy(), z.im.to_f64_lossy())
}

/// Unit roundoff of [`Dd`].
pub const DD_EPSILON: f64 = 4.93e-32;

/// Dense complex LU with partial pivoting in double-double, applied to the
/// row- and column-equilibrated matrix.
#[derive(Debug, Clone)]
pub struct DenseLu {
    n: usize,
    lu: Vec<CDd>,
    perm: Vec<usize>,
    row_scale: Vec<f64>,
    col_scale: Vec<f64>,
}

impl DenseLu {
    /// Factors the row-major `n x n` matrix `a`.
    pub fn new(n: usize, a: &[CDd]) -> Result<Self> {
        assert_eq!(a.len(), n * n);
        // powers of two keep the scaling exact
        let pow2 = |m: f64| if m > 0.0 { 2f64.powi(-(m.log2().round() as i32)) } else { 1.0 };
        let row_scale: Vec<f64> = (0..n)
            .map(|r| pow2((0..n).map(|c| abs1(a[r * n + c])).fold(0.0, f64::max)))
            .collect();
        let col_scale: Vec<f64> = (0..n)
            .map(|c| pow2((0..n).map(|r| abs1(a[r * n + c]) * row_scale[r]).fold(0.0, f64::max)))
            .collect();
        let mut lu: Vec<CDd> = (0..n * n)
            .map(|i| {
                let s = Dd::from(row_scale[i / n] * col_scale[i % n]);
                a[i] * s
            })
            .collect();
        let mut perm: Vec<usize> = (0..n).collect();
        for col in 0..n {
            let piv = (col..n)
                .max_by(|&i, &j| abs1(lu[i * n + col]).total_cmp(&abs1(lu[j * n + col])))
                .expect("non-empty pivot range");
            if abs1(lu[piv * n + col]) == 0.0 {
                return Err(Error::Singular(format!("zero pivot in column {col}")));
            }
            if piv != col {
                for c in 0..n {
                    lu.swap(piv * n + c, col * n + c);
                }
                perm.swap(piv, col);
            }
            let inv = Complex::new(Dd::from(1.0), Dd::from(0.0)) / lu[col * n + col];
            for r in col + 1..n {
                let f = lu[r * n + col] * inv;
                lu[r * n + col] = f;
                if f.re == Dd::from(0.0) && f.im == Dd::from(0.0) {
                    continue;
                }
                for c in col + 1..n {
                    let t = lu[col * n + c];
                    lu[r * n + c] = lu[r * n + c] - f * t;
                }
            }
        }
        Ok(DenseLu { n, lu, perm, row_scale, col_scale })
    }

    /// Power-of-two scale applied to row `r` before factoring.
    pub fn row_scale(&self, r: usize) -> f64 {
        self.row_scale[r]
    }

    /// Solves `A x = b` for the original, unscaled matrix.
    pub fn solve(&self, b: &[CDd]) -> Vec<CDd> {
        let mut y: Vec<CDd> = self.perm.iter().map(|&p| b[p] * Dd::from(self.row_scale[p])).collect();
        self.substitute(&mut y);
        y.iter().zip(&self.col_scale).map(|(v, s)| *v * Dd::from(*s)).collect()
    }

    /// Solves `A^T y = b` (plain transpose) for the original matrix.
    pub fn solve_transpose(&self, b: &[CDd]) -> Vec<CDd> {
        let n = self.n;
        let mut u: Vec<CDd> = b.iter().zip(&self.col_scale).map(|(v, s)| *v * Dd::from(*s)).collect();
        for r in 0..n {
            let mut s = u[r];
            for c in 0..r {
                s = s - self.lu[c * n + r] * u[c];
            }
            u[r] = s / self.lu[r * n + r];
        }
        for r in (0..n).rev() {
            let mut s = u[r];
            for c in r + 1..n {
                s = s - self.lu[c * n + r] * u[c];
            }
            u[r] = s;
        }
        let mut y = vec![Complex::new(Dd::from(0.0), Dd::from(0.0)); n];
        for (i, &p) in self.perm.iter().enumerate() {
            y[p] = u[i] * Dd::from(self.row_scale[p]);
        }
        y
    }

    fn substitute(&self, y: &mut [CDd]) {
        let n = self.n;
        for r in 0..n {
            let mut s = y[r];
            for c in 0..r {
                s = s - self.lu[r * n + c] * y[c];
            }
            y[r] = s;
        }
        for r in (0..n).rev() {
            let mut s = y[r];
            for c in r + 1..n {
                s = s - self.lu[r * n + c] * y[c];
            }
            y[r] = s / self.lu[r * n + r];
        }
    }

    /// 1-norm condition number of the equilibrated matrix, from its explicit
    /// inverse.
    pub fn condition(&self, a: &[CDd]) -> f64 {
        let n = self.n;
        let scaled = |r: usize, c: usize| abs1(a[r * n + c]) * self.row_scale[r] * self.col_scale[c];
        let norm_a = (0..n).map(|c| (0..n).map(|r| scaled(r, c)).sum::<f64>()).fold(0.0, f64::max);
        let mut norm_inv: f64 = 0.0;
        for c in 0..n {
            let mut e = vec![Complex::new(Dd::from(0.0), Dd::from(0.0)); n];
            // column c of the scaled inverse: solve P L U y = e_c
            let pos = self.perm.iter().position(|&p| p == c).expect("permutation");
            e[pos] = Complex::new(Dd::from(1.0), Dd::from(0.0));
            self.substitute(&mut e);
            norm_inv = norm_inv.max(e.iter().map(|v| abs1(*v)).sum());
        }
        norm_a * norm_inv
    }
}

/// `|re| + |im|` rounded to `f64`.
#[inline]
pub fn abs1(z: CDd) -> f64 {
    f64::from(z.re).abs() + f64::from(z.im).abs()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lu_solves_small_system() {
        let c = |re: f64, im: f64| Complex::new(Dd::from(re), Dd::from(im));
        let a = vec![c(2.0, 0.0), c(1.0, 1.0), c(0.0, -1.0), c(3.0, 0.5)];
        let x = vec![c(1.0, -2.0), c(0.25, 4.0)];
        let b: Vec<CDd> = (0..2).map(|r| a[2 * r] * x[0] + a[2 * r + 1] * x[1]).collect();
        let lu = DenseLu::new(2, &a).unwrap();
        let got = lu.solve(&b);
        for (g, w) in got.iter().zip(&x) {
            assert!(abs1(*g - *w) < 1e-28);
        }
        assert!(lu.condition(&a) >= 1.0);
    }

    #[test]
    fn transpose_solve_matches_definition() {
        let c = |re: f64, im: f64| Complex::new(Dd::from(re), Dd::from(im));
        let a = vec![
            c(1e-3, 0.0), c(2.0, 1.0), c(0.5, 0.0),
            c(4.0, -1.0), c(0.0, 3.0), c(1.0, 1.0),
            c(-2.0, 0.0), c(1e3, 0.0), c(0.25, -0.5),
        ];
        let b = vec![c(1.0, 0.0), c(-1.0, 2.0), c(0.5, 0.5)];
        let lu = DenseLu::new(3, &a).unwrap();
        let y = lu.solve_transpose(&b);
        for col in 0..3 {
            let s = (0..3).fold(c(0.0, 0.0), |acc, r| acc + a[r * 3 + col] * y[r]);
            assert!(abs1(s - b[col]) < 1e-26, "{:e}", abs1(s - b[col]));
        }
    }

    #[test]
    fn singular_matrix_is_rejected() {
        let z = Complex::new(Dd::from(0.0), Dd::from(0.0));
        let one = Complex::new(Dd::from(1.0), Dd::from(0.0));
        assert!(DenseLu::new(2, &[one, one, z, z]).is_err());
    }
}
