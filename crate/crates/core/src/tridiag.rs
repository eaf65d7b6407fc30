//! Complex tridiagonal solves (Thomas algorithm) with a reusable
//! factorization, for implicit time stepping with a fixed matrix.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// LU factorization of a tridiagonal matrix without pivoting.
///
/// Row `i` of the matrix is `lower[i-1]·x[i-1] + diag[i]·x[i] + upper[i]·x[i+1]`.
#[derive(Debug, Clone)]
pub struct TridiagonalLu {
    lower: Vec<Complex64>,
    // modified super-diagonal c'_i = upper_i / pivot_i
    upper_mod: Vec<Complex64>,
    pivot: Vec<Complex64>,
}

impl TridiagonalLu {
    pub fn factor(lower: &[Complex64], diag: &[Complex64], upper: &[Complex64]) -> Result<Self> {
        let n = diag.len();
        assert!(n >= 1);
        assert_eq!(lower.len(), n - 1);
        assert_eq!(upper.len(), n - 1);

        let scale = diag.iter().map(|d| d.norm()).fold(0.0, f64::max);
        let min_diag = diag.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
        let tiny = f64::EPSILON * scale;

        let mut pivot = Vec::with_capacity(n);
        let mut upper_mod = Vec::with_capacity(n.saturating_sub(1));
        for i in 0..n {
            let p = if i == 0 {
                diag[0]
            } else {
                diag[i] - lower[i - 1] * upper_mod[i - 1]
            };
            if !(p.norm() > tiny) || !p.re.is_finite() || !p.im.is_finite() {
                return Err(Error::SingularSystem {
                    row: i,
                    pivot: p.norm(),
                    min_diag,
                });
            }
            pivot.push(p);
            if i + 1 < n {
                upper_mod.push(upper[i] / p);
            }
        }
        Ok(Self {
            lower: lower.to_vec(),
            upper_mod,
            pivot,
        })
    }

    pub fn len(&self) -> usize {
        self.pivot.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pivot.is_empty()
    }

    /// Smallest pivot magnitude met during elimination.
    pub fn min_pivot(&self) -> f64 {
        self.pivot.iter().map(|p| p.norm()).fold(f64::INFINITY, f64::min)
    }

    pub fn solve_in_place(&self, rhs: &mut [Complex64]) {
        let n = self.pivot.len();
        assert_eq!(rhs.len(), n);
        rhs[0] /= self.pivot[0];
        for i in 1..n {
            rhs[i] = (rhs[i] - self.lower[i - 1] * rhs[i - 1]) / self.pivot[i];
        }
        for i in (0..n - 1).rev() {
            let next = rhs[i + 1];
            rhs[i] -= self.upper_mod[i] * next;
        }
    }
}

/// One-shot solve of `A x = rhs`, overwriting `rhs` with `x`.
pub fn solve_tridiagonal(
    lower: &[Complex64],
    diag: &[Complex64],
    upper: &[Complex64],
    rhs: &mut [Complex64],
) -> Result<()> {
    TridiagonalLu::factor(lower, diag, upper)?.solve_in_place(rhs);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn matvec(l: &[Complex64], d: &[Complex64], u: &[Complex64], x: &[Complex64]) -> Vec<Complex64> {
        let n = d.len();
        (0..n)
            .map(|i| {
                let mut s = d[i] * x[i];
                if i > 0 {
                    s += l[i - 1] * x[i - 1];
                }
                if i + 1 < n {
                    s += u[i] * x[i + 1];
                }
                s
            })
            .collect()
    }

    #[test]
    fn solves_small_system() {
        let l = vec![c(1.0, 0.0), c(0.0, 1.0)];
        let d = vec![c(4.0, 0.0), c(4.0, 1.0), c(3.0, -1.0)];
        let u = vec![c(1.0, -1.0), c(2.0, 0.0)];
        let x = vec![c(1.0, 2.0), c(-1.0, 0.5), c(0.25, -3.0)];
        let mut b = matvec(&l, &d, &u, &x);
        solve_tridiagonal(&l, &d, &u, &mut b).unwrap();
        for (got, want) in b.iter().zip(&x) {
            assert!((got - want).norm() < 1e-14);
        }
    }

    #[test]
    fn reports_singular_pivot() {
        let l = vec![c(1.0, 0.0)];
        let d = vec![c(1.0, 0.0), c(1.0, 0.0)];
        let u = vec![c(1.0, 0.0)];
        let err = TridiagonalLu::factor(&l, &d, &u).unwrap_err();
        assert!(matches!(err, Error::SingularSystem { row: 1, .. }));
    }

    proptest! {
        // matrices of the Cayley form 1 + i·(real symmetric tridiagonal)
        #[test]
        fn cayley_form_residual_small(
            n in 2usize..40,
            seed_d in proptest::collection::vec(-50.0f64..50.0, 40),
            seed_o in proptest::collection::vec(-20.0f64..20.0, 40),
            seed_x in proptest::collection::vec(-1.0f64..1.0, 80),
        ) {
            let d: Vec<_> = (0..n).map(|i| c(1.0, seed_d[i])).collect();
            let o: Vec<_> = (0..n - 1).map(|i| c(0.0, seed_o[i])).collect();
            let x: Vec<_> = (0..n).map(|i| c(seed_x[i], seed_x[i + 40])).collect();
            let mut b = matvec(&o, &d, &o, &x);
            solve_tridiagonal(&o, &d, &o, &mut b).unwrap();
            let r = matvec(&o, &d, &o, &b);
            let bb = matvec(&o, &d, &o, &x);
            let scale = bb.iter().map(|z| z.norm()).fold(1.0, f64::max);
            for (ri, bi) in r.iter().zip(&bb) {
                prop_assert!((ri - bi).norm() < 1e-10 * scale);
            }
        }
    }
}
