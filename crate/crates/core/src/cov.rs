//! Sample covariance computation and its block decomposition.
//!
//! All trace functionals downstream reduce to elementwise-product sums over
//! covariance blocks, so this module provides the blocks plus small trace
//! helpers; no general-purpose linear algebra beyond a matrix product is
//! needed to form them.

use ndarray::{s, Array2, ArrayView2, Axis};

use crate::data::{BlockSpec, DataMatrix};
use crate::error::{Error, Result};

/// Relative tolerance for symmetry validation of covariance blocks.
pub(crate) const SYMMETRY_RTOL: f64 = 1e-12;

/// Compute the sample covariance `S = Zc' Zc / n` of an `N x p` observation
/// matrix, where `Zc` is the column-centered data and `n = N - 1`.
///
/// Returns `(S, n)`; the divisor `n` is the degrees of freedom every
/// downstream statistic is normalized by. Requires `N >= 2`.
pub fn sample_covariance(data: &DataMatrix) -> (Array2<f64>, usize) {
    let z = data.values();
    let n = z.nrows() - 1; // DataMatrix guarantees N >= 2
    let mean = z.mean_axis(Axis(0)).expect("non-empty rows");
    let centered = z - &mean;
    let s = centered.t().dot(&centered) / n as f64;
    (s, n)
}

/// Center the columns of an observation matrix (subtract column means).
pub(crate) fn center_columns(data: &DataMatrix) -> Array2<f64> {
    let z = data.values();
    let mean = z.mean_axis(Axis(0)).expect("non-empty rows");
    z - &mean
}

/// Sum of the diagonal, `tr(A)`, of a square matrix view.
pub fn trace(a: ArrayView2<'_, f64>) -> f64 {
    a.diag().sum()
}

/// Sum of squared entries, `sum_ij a_ij^2`.
///
/// For a symmetric `A` this equals `tr(A^2)`; for a rectangular cross block
/// `Sxy` it equals `tr(Sxy Syx)` with `Syx = Sxy'`.
pub fn sum_squared_entries(a: ArrayView2<'_, f64>) -> f64 {
    a.iter().map(|&v| v * v).sum()
}

/// Validate that `a` is square and symmetric within [`SYMMETRY_RTOL`]
/// (relative to its largest absolute entry), naming `name` on failure.
pub(crate) fn check_symmetric(a: ArrayView2<'_, f64>, name: &'static str) -> Result<()> {
    let (r, c) = a.dim();
    if r != c {
        return Err(Error::InvalidData(format!(
            "matrix `{name}` must be square (got {r} x {c})"
        )));
    }
    let mut max_abs = 0.0f64;
    let mut max_asym = 0.0f64;
    for i in 0..r {
        for j in (i + 1)..r {
            let (u, v) = (a[[i, j]], a[[j, i]]);
            max_asym = max_asym.max((u - v).abs());
            max_abs = max_abs.max(u.abs()).max(v.abs());
        }
        max_abs = max_abs.max(a[[i, i]].abs());
    }
    let tolerance = SYMMETRY_RTOL * max_abs.max(1.0);
    if max_asym > tolerance {
        return Err(Error::NotSymmetric {
            name,
            asymmetry: max_asym,
            tolerance,
        });
    }
    Ok(())
}

/// Replace `a` by its exactly symmetric part `(A + A') / 2`.
fn symmetrize(a: &mut Array2<f64>) {
    let r = a.nrows();
    for i in 0..r {
        for j in (i + 1)..r {
            let m = 0.5 * (a[[i, j]] + a[[j, i]]);
            a[[i, j]] = m;
            a[[j, i]] = m;
        }
    }
}

/// The block decomposition of a joint sample covariance:
///
/// ```text
/// S = [ Sxx  Sxy ]
///     [ Syx  Syy ]
/// ```
///
/// with `Sxx` of shape `p1 x p1`, `Syy` of shape `p2 x p2`, and the cross
/// block `Sxy` of shape `p1 x p2` (`Syx = Sxy'` is never stored). The
/// degrees-of-freedom divisor `n` used to form `S` travels with the blocks.
///
/// Construction validates that the diagonal blocks are symmetric within a
/// relative tolerance of `1e-12` and have non-negative diagonals, then stores
/// them exactly symmetrized, so trace functionals see bitwise-symmetric
/// inputs.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceBlocks {
    sxx: Array2<f64>,
    sxy: Array2<f64>,
    syy: Array2<f64>,
    n: usize,
}

impl CovarianceBlocks {
    /// Split a full `(p1+p2) x (p1+p2)` covariance matrix into blocks.
    pub fn split(s: ArrayView2<'_, f64>, n: usize, spec: &BlockSpec) -> Result<Self> {
        let (r, c) = s.dim();
        if r != c {
            return Err(Error::InvalidData(format!(
                "covariance matrix must be square (got {r} x {c})"
            )));
        }
        spec.check_covers(r)?;
        let p1 = spec.p1();
        let sxx = s.slice(s![..p1, ..p1]).to_owned();
        let sxy = s.slice(s![..p1, p1..]).to_owned();
        let syy = s.slice(s![p1.., p1..]).to_owned();
        Self::from_parts(sxx, sxy, syy, n)
    }

    /// Assemble blocks directly. `sxx` and `syy` must be square, symmetric
    /// within tolerance, with non-negative diagonals; `sxy` must be
    /// `p1 x p2`; `n >= 1`.
    pub fn from_parts(
        mut sxx: Array2<f64>,
        sxy: Array2<f64>,
        mut syy: Array2<f64>,
        n: usize,
    ) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter {
                name: "n",
                message: "degrees of freedom must be at least 1".into(),
                value: "0".into(),
            });
        }
        check_symmetric(sxx.view(), "sxx")?;
        check_symmetric(syy.view(), "syy")?;
        let (p1, p2) = (sxx.nrows(), syy.nrows());
        if p1 == 0 || p2 == 0 {
            return Err(Error::InvalidData(
                "covariance blocks must have positive dimension".into(),
            ));
        }
        if sxy.dim() != (p1, p2) {
            return Err(Error::InvalidData(format!(
                "cross block must be {p1} x {p2} to match the diagonal blocks (got {} x {})",
                sxy.nrows(),
                sxy.ncols()
            )));
        }
        for (m, name) in [(&sxx, "sxx"), (&syy, "syy")] {
            for (i, &d) in m.diag().iter().enumerate() {
                if d < 0.0 {
                    return Err(Error::InvalidData(format!(
                        "diagonal entry {} of `{name}` is negative ({d:.6e}); not a covariance",
                        i + 1
                    )));
                }
            }
        }
        symmetrize(&mut sxx);
        symmetrize(&mut syy);
        Ok(Self { sxx, sxy, syy, n })
    }

    /// Compute the blocks straight from data: covariance of the joint matrix,
    /// split according to `spec` (which must cover all columns).
    pub fn from_data(data: &DataMatrix, spec: &BlockSpec) -> Result<Self> {
        spec.check_covers(data.n_variables())?;
        let (s, n) = sample_covariance(data);
        Self::split(s.view(), n, spec)
    }

    /// First diagonal block (`p1 x p1`).
    pub fn sxx(&self) -> ArrayView2<'_, f64> {
        self.sxx.view()
    }

    /// Cross block (`p1 x p2`).
    pub fn sxy(&self) -> ArrayView2<'_, f64> {
        self.sxy.view()
    }

    /// Second diagonal block (`p2 x p2`).
    pub fn syy(&self) -> ArrayView2<'_, f64> {
        self.syy.view()
    }

    /// Degrees-of-freedom divisor used to form the covariance.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Width of the first block.
    pub fn p1(&self) -> usize {
        self.sxx.nrows()
    }

    /// Width of the second block.
    pub fn p2(&self) -> usize {
        self.syy.nrows()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use ndarray::array;

    /// Independent two-pass covariance oracle: explicit mean, then an
    /// entrywise accumulation of outer products. Shares no code with
    /// `sample_covariance`.
    fn covariance_oracle(z: &Array2<f64>) -> Array2<f64> {
        let (n_obs, p) = z.dim();
        let mut mean = vec![0.0; p];
        for row in z.rows() {
            for (j, &v) in row.iter().enumerate() {
                mean[j] += v;
            }
        }
        for m in &mut mean {
            *m /= n_obs as f64;
        }
        let mut s = Array2::zeros((p, p));
        for row in z.rows() {
            for a in 0..p {
                for b in 0..p {
                    s[[a, b]] += (row[a] - mean[a]) * (row[b] - mean[b]);
                }
            }
        }
        s / (n_obs - 1) as f64
    }

    #[test]
    fn covariance_matches_two_pass_oracle() {
        let data = DataMatrix::new(array![
            [1.0, 2.0, 0.5],
            [-1.0, 0.0, 1.5],
            [2.0, -3.0, 2.0],
            [0.0, 1.0, -0.5],
            [4.0, 2.5, 0.0],
        ])
        .unwrap();
        let (s, n) = sample_covariance(&data);
        assert_eq!(n, 4);
        let oracle = covariance_oracle(data.values());
        for ((i, j), &v) in s.indexed_iter() {
            assert_abs_diff_eq!(v, oracle[[i, j]], epsilon = 1e-12);
        }
    }

    #[test]
    fn covariance_of_two_point_sample() {
        // N = 2, p = 1: S = ((x1 - mean)^2 + (x2 - mean)^2) / 1 = (x1 - x2)^2 / 2.
        let data = DataMatrix::new(array![[1.0], [4.0]]).unwrap();
        let (s, n) = sample_covariance(&data);
        assert_eq!(n, 1);
        assert_abs_diff_eq!(s[[0, 0]], 4.5, epsilon = 1e-15);
    }

    #[test]
    fn trace_helpers() {
        let a = array![[1.0, 2.0], [3.0, 4.0]];
        assert_eq!(trace(a.view()), 5.0);
        assert_eq!(sum_squared_entries(a.view()), 30.0);
    }

    #[test]
    fn sum_squared_entries_equals_trace_of_square_for_symmetric() {
        let a = array![[2.0, -1.0, 0.5], [-1.0, 3.0, 1.0], [0.5, 1.0, 1.5]];
        let a2 = a.dot(&a);
        assert_abs_diff_eq!(
            sum_squared_entries(a.view()),
            trace(a2.view()),
            epsilon = 1e-12
        );
    }

    #[test]
    fn split_assigns_blocks() {
        let s = array![
            [1.0, 0.1, 0.2, 0.3],
            [0.1, 2.0, 0.4, 0.5],
            [0.2, 0.4, 3.0, 0.6],
            [0.3, 0.5, 0.6, 4.0],
        ];
        let spec = BlockSpec::new(1, 3).unwrap();
        let blocks = CovarianceBlocks::split(s.view(), 7, &spec).unwrap();
        assert_eq!(blocks.p1(), 1);
        assert_eq!(blocks.p2(), 3);
        assert_eq!(blocks.n(), 7);
        assert_eq!(blocks.sxx()[[0, 0]], 1.0);
        assert_eq!(blocks.sxy()[[0, 2]], 0.3);
        assert_eq!(blocks.syy()[[2, 2]], 4.0);
    }

    #[test]
    fn split_rejects_mismatched_spec() {
        let s = Array2::<f64>::eye(4);
        let spec = BlockSpec::new(2, 3).unwrap();
        let err = CovarianceBlocks::split(s.view(), 5, &spec).unwrap_err();
        assert!(matches!(err, Error::InvalidBlockSpec(_)));
    }

    #[test]
    fn from_parts_rejects_asymmetry_beyond_tolerance() {
        let sxx = array![[1.0, 0.5], [0.5 + 1e-6, 1.0]];
        let syy = Array2::eye(2);
        let sxy = Array2::zeros((2, 2));
        let err = CovarianceBlocks::from_parts(sxx, sxy, syy, 5).unwrap_err();
        match err {
            Error::NotSymmetric { name, .. } => assert_eq!(name, "sxx"),
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn from_parts_symmetrizes_within_tolerance() {
        // Asymmetry of 1e-13 relative: accepted and averaged away.
        let sxx = array![[1.0, 0.5], [0.5 + 1e-13, 1.0]];
        let syy = Array2::eye(2);
        let sxy = Array2::zeros((2, 2));
        let blocks = CovarianceBlocks::from_parts(sxx, sxy, syy, 5).unwrap();
        assert_eq!(blocks.sxx()[[0, 1]], blocks.sxx()[[1, 0]]);
    }

    #[test]
    fn from_parts_rejects_negative_diagonal() {
        let sxx = array![[-0.1]];
        let syy = Array2::eye(2);
        let sxy = Array2::zeros((1, 2));
        let err = CovarianceBlocks::from_parts(sxx, sxy, syy, 5).unwrap_err();
        assert!(err.to_string().contains("sxx"));
    }

    #[test]
    fn from_parts_rejects_cross_shape_mismatch() {
        let sxx = Array2::eye(2);
        let syy = Array2::eye(3);
        let sxy = Array2::zeros((2, 2));
        assert!(CovarianceBlocks::from_parts(sxx, sxy, syy, 5).is_err());
    }

    #[test]
    fn from_data_round_trips_through_split() {
        let data = DataMatrix::new(array![
            [1.0, 0.0, 2.0],
            [0.0, 1.0, -1.0],
            [2.0, 2.0, 0.0],
            [-1.0, 0.5, 1.0],
        ])
        .unwrap();
        let spec = BlockSpec::new(2, 1).unwrap();
        let blocks = CovarianceBlocks::from_data(&data, &spec).unwrap();
        let (s, n) = sample_covariance(&data);
        assert_eq!(blocks.n(), n);
        assert_abs_diff_eq!(blocks.syy()[[0, 0]], s[[2, 2]], epsilon = 1e-15);
        assert_abs_diff_eq!(blocks.sxy()[[1, 0]], s[[1, 2]], epsilon = 1e-15);
    }
}
