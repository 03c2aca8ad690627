//! Unbiased trace-functional estimators.
//!
//! For a covariance `Sigma` estimated by a sample covariance `S` with `n`
//! degrees of freedom, the quantity `tr(S^2) - tr(S)^2 / n`, rescaled by
//! `kn = n^2 / ((n-1)(n+2))`, is an unbiased estimator of `tr(Sigma^2)`
//! under normality. Applied to the blocks of a joint covariance it yields
//! the cross-dependence measure `gamma_xy` (an unbiased estimator of
//! `tr(Sigma_xy Sigma_yx)`) together with the block scales `gamma_xx`,
//! `gamma_yy` that normalize it.
//!
//! The cross estimator is implemented twice, on purpose, via algebraically
//! equal but computationally independent routes:
//! * [`gamma_hat_xy`] works from the cross block directly
//!   (`tr(Sxy Syx) - tr(Sxx) tr(Syy) / n`);
//! * [`gamma_hat_xy_decomposed`] works from the full joint covariance by
//!   subtracting the within-block contributions.
//!
//! Keeping the two routes separate lets tests cross-check the identity on
//! real inputs instead of trusting a single derivation.

use ndarray::{s, ArrayView2};

use crate::cov::{check_symmetric, sum_squared_entries, trace, CovarianceBlocks};
use crate::data::BlockSpec;
use crate::error::{Error, Result};

/// Normalizing constant `kn = n^2 / ((n-1)(n+2))`. Requires `n >= 2`.
pub fn kn(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InsufficientObservations {
            message: "the unbiased trace estimator needs at least 2 degrees of freedom".into(),
            got: n,
        });
    }
    let nf = n as f64;
    Ok(nf * nf / ((nf - 1.0) * (nf + 2.0)))
}

/// Unbiased estimator of `tr(Sigma^2)` from a single symmetric covariance
/// block `s` with `n` degrees of freedom:
///
/// ```text
/// gamma = kn * ( tr(S^2) - tr(S)^2 / n )
/// ```
///
/// `s` must be square and symmetric within the crate-wide relative tolerance.
pub fn gamma_hat_block(s: ArrayView2<'_, f64>, n: usize) -> Result<f64> {
    check_symmetric(s, "s")?;
    let k = kn(n)?;
    let tr_sq = sum_squared_entries(s);
    let tr = trace(s);
    Ok(k * (tr_sq - tr * tr / n as f64))
}

/// Unbiased estimator of the cross-trace `tr(Sigma_xy Sigma_yx)`, computed
/// from the covariance blocks:
///
/// ```text
/// gamma_xy = kn * ( tr(Sxy Syx) - tr(Sxx) tr(Syy) / n )
/// ```
pub fn gamma_hat_xy(blocks: &CovarianceBlocks) -> Result<f64> {
    let k = kn(blocks.n())?;
    Ok(k * cross_trace_gap(blocks))
}

/// The unscaled kernel `tr(Sxy Syx) - tr(Sxx) tr(Syy) / n` shared by
/// [`gamma_hat_xy`] and the `C2` comparator statistic (which is exactly this
/// quantity; the two differ only by the factor `kn`).
pub(crate) fn cross_trace_gap(blocks: &CovarianceBlocks) -> f64 {
    let cross = sum_squared_entries(blocks.sxy());
    let tr_xx = trace(blocks.sxx());
    let tr_yy = trace(blocks.syy());
    cross - tr_xx * tr_yy / blocks.n() as f64
}

/// The same estimator as [`gamma_hat_xy`], derived instead from the full
/// joint covariance `s` by subtracting the within-block parts:
///
/// ```text
/// gamma_xy = (kn/2) * { tr(S^2) - tr(Sxx^2) - tr(Syy^2)
///                       - [ tr(S)^2 - tr(Sxx)^2 - tr(Syy)^2 ] / n }
/// ```
///
/// `s` is the full `(p1+p2) x (p1+p2)` symmetric covariance; `spec` says how
/// its rows/columns split into the two blocks. Algebraically identical to the
/// direct route; numerically it exercises different summations, which is the
/// point.
pub fn gamma_hat_xy_decomposed(
    s: ArrayView2<'_, f64>,
    spec: &BlockSpec,
    n: usize,
) -> Result<f64> {
    let (r, c) = s.dim();
    if r != c {
        return Err(Error::InvalidData(format!(
            "joint covariance must be square (got {r} x {c})"
        )));
    }
    spec.check_covers(r)?;
    check_symmetric(s, "s")?;
    let k = kn(n)?;
    let p1 = spec.p1();
    let sxx = s.slice(s![..p1, ..p1]);
    let syy = s.slice(s![p1.., p1..]);
    let q_full = sum_squared_entries(s);
    let q_xx = sum_squared_entries(sxx);
    let q_yy = sum_squared_entries(syy);
    let t_full = trace(s);
    let t_xx = trace(sxx);
    let t_yy = trace(syy);
    let nf = n as f64;
    Ok(0.5
        * k
        * (q_full - q_xx - q_yy - (t_full * t_full - t_xx * t_xx - t_yy * t_yy) / nf))
}

/// The elementary kernel the estimators average over pairs of observation
/// vectors `x, y` of common length `n`:
///
/// ```text
/// psi(x, y) = (x'y)^2 / n - (x'x)(y'y) / n^2
/// ```
///
/// For independent standard normal vectors its mean is zero; its second
/// moments are what give the trace statistic its limiting variance.
pub fn psi(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.is_empty() {
        return Err(Error::InvalidData("psi kernel inputs must be non-empty".into()));
    }
    if x.len() != y.len() {
        return Err(Error::InvalidData(format!(
            "psi kernel inputs must have equal length (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    let n = x.len() as f64;
    let mut xy = 0.0;
    let mut xx = 0.0;
    let mut yy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        xy += a * b;
        xx += a * a;
        yy += b * b;
    }
    Ok(xy * xy / n - xx * yy / (n * n))
}
