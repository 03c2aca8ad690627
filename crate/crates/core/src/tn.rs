//! The normalized trace statistic and its asymptotic test.
//!
//! With `gamma_xy`, `gamma_xx`, `gamma_yy` the unbiased trace estimators of
//! the cross and within blocks, the statistic
//!
//! ```text
//! T = n / sqrt(2 kn) * gamma_xy / sqrt(gamma_xx * gamma_yy)
//! ```
//!
//! is asymptotically standard normal when the two blocks are independent,
//! as the second block's dimension grows with the sample. Dependence pushes
//! `T` to the right, so the test is calibrated one-sided against the upper
//! normal tail: `p = P(Z > T)`.

use crate::cov::CovarianceBlocks;
use crate::data::{BlockSpec, DataMatrix};
use crate::error::{Error, Result};
use crate::estimator::{gamma_hat_block, gamma_hat_xy, kn};
use crate::outcome::{Method, TestOutcome};

/// Compute the normalized trace statistic from covariance blocks.
///
/// Fails with a degenerate-variance error if either block-scale estimate
/// `gamma_xx`, `gamma_yy` is non-positive (then the normalization is
/// undefined — e.g. constant data), rather than returning a non-finite value.
pub fn t_statistic(blocks: &CovarianceBlocks) -> Result<f64> {
    let n = blocks.n();
    let k = kn(n)?;
    let g_xx = gamma_hat_block(blocks.sxx(), n)?;
    if !(g_xx > 0.0) {
        return Err(Error::DegenerateVariance {
            name: "gamma_xx",
            value: g_xx,
        });
    }
    let g_yy = gamma_hat_block(blocks.syy(), n)?;
    if !(g_yy > 0.0) {
        return Err(Error::DegenerateVariance {
            name: "gamma_yy",
            value: g_yy,
        });
    }
    let g_xy = gamma_hat_xy(blocks)?;
    Ok((n as f64 / (2.0 * k).sqrt()) * g_xy / (g_xx * g_yy).sqrt())
}

/// Upper tail of the standard normal: `P(Z > t)`, via the complementary
/// error function.
pub fn normal_upper_pvalue(t: f64) -> f64 {
    0.5 * libm::erfc(t / std::f64::consts::SQRT_2)
}

/// Run the asymptotic trace test on joint data split by `spec`.
///
/// Requires at least 3 observations (so the trace estimators have their
/// minimum 2 degrees of freedom) and a block spec covering all columns.
/// The p-value is the one-sided upper normal tail.
pub fn test_tn(data: &DataMatrix, spec: &BlockSpec, alpha: f64) -> Result<TestOutcome> {
    if data.n_observations() < 3 {
        return Err(Error::InsufficientObservations {
            message: "the normalized trace test needs at least 3 observations".into(),
            got: data.n_observations(),
        });
    }
    let blocks = CovarianceBlocks::from_data(data, spec)?;
    let t = t_statistic(&blocks)?;
    TestOutcome::new(Method::Tn, t, normal_upper_pvalue(t), alpha)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use ndarray::{array, Array2};

    #[test]
    fn statistic_on_identity_blocks() {
        // Sxx = I2, Sxy = 0, Syy = I3, n = 10. All three estimators are
        // exact rationals (-5/9, 40/27, 35/18); the statistic evaluates to
        // the frozen value below.
        let blocks = CovarianceBlocks::from_parts(
            Array2::<f64>::eye(2),
            Array2::<f64>::zeros((2, 3)),
            Array2::<f64>::eye(3),
            10,
        )
        .unwrap();
        let t = t_statistic(&blocks).unwrap();
        assert_relative_eq!(t, -2.405_351_177_211_819_5, max_relative = 1e-15);
    }

    #[test]
    fn degenerate_variance_is_an_error() {
        // A constant first block: Sxx = 0 gives gamma_xx = 0.
        let blocks = CovarianceBlocks::from_parts(
            Array2::<f64>::zeros((2, 2)),
            Array2::<f64>::zeros((2, 3)),
            Array2::<f64>::eye(3),
            10,
        )
        .unwrap();
        match t_statistic(&blocks).unwrap_err() {
            Error::DegenerateVariance { name, value } => {
                assert_eq!(name, "gamma_xx");
                assert_eq!(value, 0.0);
            }
            other => panic!("unexpected error: {other:?}"),
        }
    }

    #[test]
    fn upper_pvalue_reference_points() {
        assert_eq!(normal_upper_pvalue(0.0), 0.5);
        // Standard normal 97.5% point.
        assert_abs_diff_eq!(normal_upper_pvalue(1.959_963_984_540_054), 0.025, epsilon = 1e-12);
        // Symmetry: P(Z > t) + P(Z > -t) = 1.
        for t in [-3.0, -0.7, 0.3, 2.5] {
            assert_abs_diff_eq!(
                normal_upper_pvalue(t) + normal_upper_pvalue(-t),
                1.0,
                epsilon = 1e-14
            );
        }
        // Monotone decreasing.
        assert!(normal_upper_pvalue(1.0) > normal_upper_pvalue(2.0));
    }

    #[test]
    fn test_requires_three_observations() {
        let data = DataMatrix::new(array![[1.0, 2.0, 0.0], [0.5, -1.0, 1.0]]).unwrap();
        let spec = BlockSpec::new(1, 2).unwrap();
        let err = test_tn(&data, &spec, 0.05).unwrap_err();
        assert!(matches!(err, Error::InsufficientObservations { got: 2, .. }));
    }

    #[test]
    fn test_checks_block_coverage() {
        let data = DataMatrix::new(array![
            [1.0, 2.0, 0.0],
            [0.5, -1.0, 1.0],
            [0.0, 0.3, -0.5],
            [1.5, 0.1, 0.2],
        ])
        .unwrap();
        let spec = BlockSpec::new(2, 2).unwrap();
        assert!(test_tn(&data, &spec, 0.05).is_err());
    }

    #[test]
    fn test_end_to_end_on_small_sample() {
        // Deterministic small dataset; the outcome must be internally
        // consistent: p = P(Z > T), reject = p < alpha.
        let data = DataMatrix::new(array![
            [0.2, -1.1, 0.4, 1.3],
            [1.0, 0.3, -0.2, 0.8],
            [-0.7, 0.9, 1.1, -0.4],
            [0.5, -0.3, 0.6, 0.1],
            [-1.2, 0.7, -0.9, 0.5],
            [0.3, 1.4, 0.2, -1.0],
        ])
        .unwrap();
        let spec = BlockSpec::new(2, 2).unwrap();
        let out = test_tn(&data, &spec, 0.05).unwrap();
        assert_eq!(out.method, Method::Tn);
        assert_abs_diff_eq!(
            out.p_value,
            normal_upper_pvalue(out.statistic),
            epsilon = 0.0
        );
        assert_eq!(out.reject, out.p_value < 0.05);
    }

    #[test]
    fn constant_column_dataset_fails_loudly() {
        // First block constant across observations -> zero variance.
        let data = DataMatrix::new(array![
            [2.0, -1.1, 0.4],
            [2.0, 0.3, -0.2],
            [2.0, 0.9, 1.1],
            [2.0, -0.3, 0.6],
        ])
        .unwrap();
        let spec = BlockSpec::new(1, 2).unwrap();
        assert!(matches!(
            test_tn(&data, &spec, 0.05).unwrap_err(),
            Error::DegenerateVariance { .. }
        ));
    }
}
