//! Method of rotated reference frames for the structured-illumination
//! boundary problem.
//!
//! Plane-wave modes are built from the eigenvectors of `B(M)` and rotated
//! onto `k(nu, q)` with continued Wigner matrices; their amplitudes follow
//! from half-range (Marshak) projections of the vacuum boundary condition.
//! The modes grow like `(nu q)^l`, so the system degrades quickly with
//! `l_max`. Eigenpairs, moments, Wigner factors and the solve are carried in
//! double-double so that what fails is the method, not the arithmetic.
//! Nothing is regularized: the condition number is reported with every
//! solution, and a solve whose residual misses `1e-8` comes back as
//! [`Error::IllConditioned`].

use nalgebra::{DMatrix, DVector};
use num_complex::{Complex, Complex64};
use num_traits::{Float, FloatConst, Zero};

use crate::error::{Error, Result};
use crate::extended::{lower, CDd, Dd, DenseLu};
use crate::special_functions::{gauss_legendre_in, normalized_p_column_in, wigner_d_continued_in, WignerDTable};
use crate::spectrum::{build_b_matrix, h_coeff_in, OpticalMedium};

/// Condition number above which a solution is flagged as unreliable.
pub const CONDITION_WARNING: f64 = 1e12;

fn czero() -> CDd {
    Complex::new(Dd::zero(), Dd::zero())
}

/// `B_{ll'}^m` for all `m <= l, l' <= l_max`, in double-double:
/// `moments[(l - m, l' - m)]`.
fn half_range_moments(m: usize, l_max: usize) -> Vec<Vec<Dd>> {
    let n = l_max - m + 1;
    let (nodes, weights) = gauss_legendre_in::<Dd>(l_max + 2).expect("non-empty rule");
    let half = Dd::from(0.5);
    let mut acc = vec![vec![Dd::zero(); n]; n];
    for (&x, &w) in nodes.iter().zip(&weights) {
        let mu = half * (x + Dd::from(1.0));
        let p = normalized_p_column_in(m as i64, l_max, mu);
        let taper = (Dd::from(1.0) - mu * mu).powi(m as i32) * w * half;
        for a in 0..n {
            for b in 0..n {
                acc[a][b] += taper * p[a] * p[b];
            }
        }
    }
    for (a, row) in acc.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            let (l, lp) = (m + a, m + b);
            *v = *v * half * Dd::from(((2 * l + 1) * (2 * lp + 1)) as f64).sqrt();
        }
    }
    acc
}

/// `B_{ll'}^m = 1/2 sqrt((2l+1)(2l'+1)) int_0^1 p~_l^m p~_{l'}^m dmu` with the
/// unit-normalized associated Legendre functions
/// `p~_l^m = sqrt((l-m)!/(l+m)!) P_l^m`.
pub fn half_range_moment(l: usize, lp: usize, m: usize) -> f64 {
    assert!(m <= l.min(lp), "half-range moment needs m <= min(l, l')");
    f64::from(half_range_moments(m, l.max(lp))[l - m][lp - m])
}

/// Eigenpair of a zero-diagonal symmetric tridiagonal matrix refined by
/// Rayleigh-quotient iteration in double-double.
fn refine_eigenpair(off: &[Dd], nu: f64, start: &[f64]) -> (Dd, Vec<Dd>) {
    let n = start.len();
    let apply = |y: &[Dd]| -> Vec<Dd> {
        (0..n)
            .map(|i| {
                let mut v = Dd::zero();
                if i > 0 {
                    v += off[i - 1] * y[i - 1];
                }
                if i + 1 < n {
                    v += off[i] * y[i + 1];
                }
                v
            })
            .collect()
    };
    let normalize = |y: Vec<Dd>| -> Vec<Dd> {
        let norm = y.iter().fold(Dd::zero(), |a, v| a + *v * *v).sqrt();
        y.into_iter().map(|v| v / norm).collect()
    };
    let mut y = normalize(start.iter().map(|&v| Dd::from(v)).collect());
    let mut sigma = Dd::from(nu);
    for _ in 0..3 {
        // (T - sigma) z = y by the Thomas algorithm
        let mut c = vec![Dd::zero(); n];
        let mut d = vec![Dd::zero(); n];
        for i in 0..n {
            let mut denom = -sigma;
            let mut rhs = y[i];
            if i > 0 {
                denom -= off[i - 1] * c[i - 1];
                rhs -= off[i - 1] * d[i - 1];
            }
            // an exact hit on the eigenvalue only needs a tiny nonzero pivot
            if denom.abs() < Dd::from(1e-40) {
                denom = Dd::from(1e-40);
            }
            if i + 1 < n {
                c[i] = off[i] / denom;
            }
            d[i] = rhs / denom;
        }
        let mut z = vec![Dd::zero(); n];
        for i in (0..n).rev() {
            z[i] = if i + 1 < n { d[i] - c[i] * z[i + 1] } else { d[i] };
        }
        let z = normalize(z);
        let dot = z.iter().zip(&y).fold(Dd::zero(), |a, (p, q)| a + *p * *q);
        y = if dot < Dd::zero() { z.into_iter().map(|v| -v).collect() } else { z };
        let ty = apply(&y);
        sigma = y.iter().zip(&ty).fold(Dd::zero(), |a, (p, q)| a + *p * *q);
    }
    (sigma, y)
}

/// Positive eigenpairs of `B(M)` truncated at `l_max`.
#[derive(Debug, Clone)]
pub struct MrrfBasis {
    pub m: usize,
    /// Positive eigenvalues, descending.
    pub eigenvalues: Vec<f64>,
    /// `vectors[j][l - m]` is `<l|y_j>`; each vector has unit 2-norm.
    pub vectors: Vec<Vec<f64>>,
    nu_ext: Vec<Dd>,
    vectors_ext: Vec<Vec<Dd>>,
}

impl MrrfBasis {
    pub fn build(m: usize, l_max: usize, medium: &OpticalMedium) -> Result<Self> {
        let b = build_b_matrix(m as i64, l_max, medium)?;
        let (values, vectors) = b.eigen();
        // the spectrum is symmetric about zero; odd sizes carry one zero
        let n_pos = b.dim() / 2;
        if let Some(bad) = values[..n_pos].iter().find(|&&v| !(v > 0.0)) {
            return Err(Error::NonConvergence { what: format!("positive spectrum of B({m})"), residual: *bad });
        }
        let off: Vec<Dd> = ((m + 1)..=l_max)
            .map(|l| {
                let num = Dd::from((l * l - m * m) as f64);
                (num / (h_coeff_in::<Dd>(l, medium) * h_coeff_in::<Dd>(l - 1, medium))).sqrt()
            })
            .collect();
        let (nu_ext, vectors_ext): (Vec<Dd>, Vec<Vec<Dd>>) = (0..n_pos)
            .map(|j| {
                let start: Vec<f64> = vectors.column(j).iter().copied().collect();
                refine_eigenpair(&off, values[j], &start)
            })
            .unzip();
        Ok(MrrfBasis {
            m,
            eigenvalues: nu_ext.iter().map(|&v| f64::from(v)).collect(),
            vectors: vectors_ext.iter().map(|v| v.iter().map(|&x| f64::from(x)).collect()).collect(),
            nu_ext,
            vectors_ext,
        })
    }

    pub fn component(&self, j: usize, l: usize) -> f64 {
        if l < self.m {
            0.0
        } else {
            self.vectors[j][l - self.m]
        }
    }

    fn component_ext(&self, j: usize, l: usize) -> Dd {
        if l < self.m {
            Dd::zero()
        } else {
            self.vectors_ext[j][l - self.m]
        }
    }
}

/// Solved MRRF system at one frequency.
#[derive(Debug, Clone)]
pub struct MrrfSystem {
    pub l_max: usize,
    pub q0: f64,
    /// Amplitudes `f_M^{(+)}`, columns ordered by `M` then eigenvalue.
    pub f: DVector<Complex64>,
    /// `(M, j)` of each column.
    pub columns: Vec<(usize, usize)>,
    /// 1-norm condition number of the row- and column-equilibrated matrix.
    pub condition: f64,
    /// Row-equilibrated relative residual of the solve.
    pub relative_residual: f64,
    flux: f64,
}

impl MrrfSystem {
    /// `J_+ = |K_10 / sqrt(pi h_1) - 1|` for the normally incident beam.
    pub fn hemispheric_flux(&self) -> f64 {
        self.flux
    }

    pub fn is_well_conditioned(&self) -> bool {
        self.condition <= CONDITION_WARNING
    }
}

/// Frequency-independent MRRF data.
pub struct MrrfSolver {
    medium: OpticalMedium,
    l_max: usize,
    bases: Vec<MrrfBasis>,
    /// `moments[m][l - m][l' - m]`.
    moments: Vec<Vec<Vec<Dd>>>,
    rows: Vec<(usize, usize)>,
    columns: Vec<(usize, usize)>,
}

impl MrrfSolver {
    pub fn new(medium: &OpticalMedium, l_max: usize) -> Result<Self> {
        if l_max < medium.big_l() {
            return Err(Error::config(format!("l_max = {l_max} is below L = {}", medium.big_l())));
        }
        let bases = (0..=l_max).map(|m| MrrfBasis::build(m, l_max, medium)).collect::<Result<Vec<_>>>()?;
        let moments = (0..=l_max).map(|m| half_range_moments(m, l_max)).collect();
        // odd-parity half-range projections of the boundary condition
        let rows: Vec<_> = (0..=l_max).flat_map(|m| ((m + 1)..=l_max).step_by(2).map(move |l| (l, m))).collect();
        let columns: Vec<_> = bases
            .iter()
            .flat_map(|b| (0..b.eigenvalues.len()).map(move |j| (b.m, j)))
            .collect();
        if rows.len() != columns.len() {
            return Err(Error::config(format!("{} projections for {} modes", rows.len(), columns.len())));
        }
        Ok(MrrfSolver { medium: medium.clone(), l_max, bases, moments, rows, columns })
    }

    pub fn l_max(&self) -> usize {
        self.l_max
    }

    pub fn basis(&self, m: usize) -> &MrrfBasis {
        &self.bases[m]
    }

    /// `(l, m)` of each projection row.
    pub fn rows(&self) -> &[(usize, usize)] {
        &self.rows
    }

    pub fn columns(&self) -> &[(usize, usize)] {
        &self.columns
    }

    pub fn moment(&self, l: usize, lp: usize, m: usize) -> f64 {
        f64::from(self.moments[m][l - m][lp - m])
    }

    fn wigner_tables(&self, q0: f64) -> Result<Vec<Vec<WignerDTable<Dd>>>> {
        let q = Dd::from(q0);
        self.bases
            .iter()
            .map(|b| b.nu_ext.iter().map(|&nu| wigner_d_continued_in(self.l_max, nu * q)).collect())
            .collect()
    }

    /// `d^l_{mM} + (1 - delta_{M0}) (-1)^M d^l_{m,-M}`.
    fn paired_d(d: &WignerDTable<Dd>, l: usize, m: usize, big_m: usize) -> CDd {
        if m > l || big_m > l {
            return czero();
        }
        let (mi, bi) = (m as i64, big_m as i64);
        let v = d.get(l, mi, bi);
        if big_m == 0 {
            v
        } else if big_m % 2 == 1 {
            v - d.get(l, mi, -bi)
        } else {
            v + d.get(l, mi, -bi)
        }
    }

    fn assemble_ext(&self, tables: &[Vec<WignerDTable<Dd>>]) -> (Vec<CDd>, Vec<CDd>) {
        let l_max = self.l_max;
        let weight: Vec<Dd> = (0..=l_max)
            .map(|l| (Dd::from((2 * l + 1) as f64) / h_coeff_in::<Dd>(l, &self.medium)).sqrt())
            .collect();
        let n = self.rows.len();
        let mut a = vec![czero(); n * n];
        for (r, &(l, m)) in self.rows.iter().enumerate() {
            for (c, &(big_m, j)) in self.columns.iter().enumerate() {
                let basis = &self.bases[big_m];
                let d = &tables[big_m][j];
                a[r * n + c] = (m.max(big_m)..=l_max).fold(czero(), |acc, lp| {
                    let s = weight[lp] * self.moments[m][l - m][lp - m] * basis.component_ext(j, lp);
                    acc + Self::paired_d(d, lp, m, big_m) * s
                });
            }
        }
        let four_pi = Dd::from(4.0) * Dd::PI();
        let v = self
            .rows
            .iter()
            .map(|&(l, m)| {
                if m != 0 {
                    return czero();
                }
                let s = (0..=l_max).fold(Dd::zero(), |acc, lp| {
                    acc + self.moments[0][l][lp] * (Dd::from((2 * lp + 1) as f64) / four_pi).sqrt()
                });
                Complex::new(s, Dd::zero())
            })
            .collect();
        (a, v)
    }

    /// Projection matrix and right-hand side at `q0` (internal units),
    /// rounded from the double-double assembly.
    pub fn assemble(&self, q0: f64) -> Result<(DMatrix<Complex64>, DVector<Complex64>)> {
        let tables = self.wigner_tables(q0)?;
        let (a, v) = self.assemble_ext(&tables);
        let n = self.rows.len();
        Ok((DMatrix::from_fn(n, n, |r, c| lower(a[r * n + c])), DVector::from_fn(n, |r, _| lower(v[r]))))
    }

    pub fn solve(&self, q0: f64) -> Result<MrrfSystem> {
        let tables = self.wigner_tables(q0)?;
        let (a, v) = self.assemble_ext(&tables);
        let n = self.rows.len();
        let lu = DenseLu::new(n, &a)?;
        let condition = lu.condition(&a);
        let f = lu.solve(&v);
        let (mut r2, mut v2) = (0.0, 0.0);
        for r in 0..n {
            let s = lu.row_scale(r);
            let res = (0..n).fold(-v[r], |acc, c| acc + a[r * n + c] * f[c]);
            r2 += (lower(res) * s).norm_sqr();
            v2 += (lower(v[r]) * s).norm_sqr();
        }
        let relative_residual = (r2 / v2).sqrt();
        if !(relative_residual < 1e-8) {
            return Err(Error::IllConditioned {
                condition,
                advice: format!("residual {relative_residual:.1e}; lower l_max or q0"),
            });
        }
        let k10 = self
            .columns
            .iter()
            .zip(&f)
            .filter(|((big_m, _), _)| *big_m <= 1)
            .fold(czero(), |acc, (&(big_m, j), fv)| {
                let y = self.bases[big_m].component_ext(j, 1);
                acc + *fv * Self::paired_d(&tables[big_m][j], 1, 0, big_m) * y
            });
        let two_pi = Dd::from(2.0) * Dd::PI();
        let scale = two_pi / (Dd::PI() * h_coeff_in::<Dd>(1, &self.medium)).sqrt();
        let flux = lower(k10 * scale - Complex::new(Dd::from(1.0), Dd::zero())).norm();
        Ok(MrrfSystem {
            l_max: self.l_max,
            q0,
            f: DVector::from_iterator(n, f.iter().map(|&z| lower(z))),
            columns: self.columns.clone(),
            condition,
            relative_residual,
            flux,
        })
    }
}

/// Solves the MRRF system at one internal frequency.
pub fn solve_mrrf(medium: &OpticalMedium, l_max: usize, q0: f64) -> Result<MrrfSystem> {
    MrrfSolver::new(medium, l_max)?.solve(q0)
}
