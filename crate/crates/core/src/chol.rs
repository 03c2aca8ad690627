//! Minimal Cholesky factorization for symmetric positive-definite matrices.
//!
//! The classical comparator statistics need `A^{-1} B` solves and
//! log-determinants for small covariance blocks (dimension at most the
//! sample size). A dense lower-triangular Cholesky with plain loops covers
//! both; there is deliberately no conditioning heuristic — a non-positive
//! pivot is the definition of "numerically singular" here, and callers turn
//! it into their own error.

use ndarray::{Array2, ArrayView2};

/// Lower-triangular Cholesky factor `L` with `A = L L'`.
#[derive(Debug, Clone)]
pub(crate) struct SpdCholesky {
    l: Array2<f64>,
}

/// Why factorization failed: the pivot at `index` was non-positive (or not
/// finite), so the matrix is not numerically positive definite.
#[derive(Debug, Clone, Copy)]
pub(crate) struct NotPositiveDefinite {
    pub index: usize,
    pub pivot: f64,
}

impl SpdCholesky {
    /// Factor a symmetric matrix. The strict lower triangle (plus diagonal)
    /// is read; symmetry is the caller's responsibility (covariance blocks
    /// are stored exactly symmetrized).
    pub fn factor(a: ArrayView2<'_, f64>) -> Result<Self, NotPositiveDefinite> {
        let m = a.nrows();
        debug_assert_eq!(m, a.ncols(), "Cholesky input must be square");
        let mut l = Array2::<f64>::zeros((m, m));
        for i in 0..m {
            for j in 0..=i {
                let mut sum = a[[i, j]];
                for k in 0..j {
                    sum -= l[[i, k]] * l[[j, k]];
                }
                if i == j {
                    if !(sum > 0.0) || !sum.is_finite() {
                        return Err(NotPositiveDefinite {
                            index: i,
                            pivot: sum,
                        });
                    }
                    l[[i, i]] = sum.sqrt();
                } else {
                    l[[i, j]] = sum / l[[j, j]];
                }
            }
        }
        Ok(Self { l })
    }

    /// Dimension of the factored matrix.
    pub fn dim(&self) -> usize {
        self.l.nrows()
    }

    /// `log det A = 2 * sum_i log L_ii`.
    pub fn log_det(&self) -> f64 {
        2.0 * self.l.diag().iter().map(|&d| d.ln()).sum::<f64>()
    }

    /// Solve `A X = B` for a matrix right-hand side (forward then backward
    /// substitution through `L`).
    pub fn solve_matrix(&self, b: ArrayView2<'_, f64>) -> Array2<f64> {
        let m = self.dim();
        debug_assert_eq!(b.nrows(), m, "right-hand side has wrong row count");
        let cols = b.ncols();
        let mut x = b.to_owned();
        let l = &self.l;
        for c in 0..cols {
            // L z = b
            for i in 0..m {
                let mut v = x[[i, c]];
                for k in 0..i {
                    v -= l[[i, k]] * x[[k, c]];
                }
                x[[i, c]] = v / l[[i, i]];
            }
            // L' x = z
            for i in (0..m).rev() {
                let mut v = x[[i, c]];
                for k in (i + 1)..m {
                    v -= l[[k, i]] * x[[k, c]];
                }
                x[[i, c]] = v / l[[i, i]];
            }
        }
        x
    }
}
