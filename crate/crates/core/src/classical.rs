//! Classical fixed-dimension comparator statistics.
//!
//! These are the standard likelihood-ratio and canonical-correlation
//! statistics for independence of two blocks. They require inverting the
//! diagonal covariance blocks, so unlike the trace statistic they are only
//! defined when the dimensions are small relative to the sample; outside
//! that regime they report [`Error::StatisticUnavailable`] instead of a
//! value. Their null distributions degrade as dimensions grow, which is why
//! the crate pairs them with permutation calibration (see [`crate::perm`]).

use ndarray::{Array2, ArrayView2};

use crate::chol::SpdCholesky;
use crate::cov::{trace, CovarianceBlocks};
use crate::error::{Error, Result};
use crate::estimator::cross_trace_gap;

pub(crate) fn spd_factor(
    block: &'static str,
    a: ArrayView2<'_, f64>,
) -> Result<SpdCholesky> {
    SpdCholesky::factor(a).map_err(|e| Error::SingularBlock {
        block,
        pivot: e.pivot,
        index: e.index,
    })
}

/// Likelihood-ratio determinant statistic
///
/// ```text
/// Lambda = ( det(Sxx - Sxy Syy^{-1} Syx) / det(Sxx) )^(N/2)
/// ```
///
/// evaluated through Cholesky log-determinants of `Sxx` and its Schur
/// complement. `n_obs` is the number of observations `N` (the exponent);
/// the blocks carry the degrees of freedom `n = N - 1`.
///
/// Preconditions: `p1 + p2 < n` (else unavailable), both `Sxx` and `Syy`
/// numerically positive definite (else a singular-block error naming the
/// block). Values lie in `[0, 1]`: independence pushes `Lambda` toward 1,
/// and an exactly singular Schur complement (perfect linear dependence
/// between the blocks) yields 0.
pub fn wilks_lambda(blocks: &CovarianceBlocks, n_obs: usize) -> Result<f64> {
    let (p1, p2, n) = (blocks.p1(), blocks.p2(), blocks.n());
    if p1 + p2 >= n {
        return Err(Error::StatisticUnavailable {
            statistic: "wilks",
            constraint: format!("requires p1 + p2 < n (got {p1} + {p2} with n = {n})"),
        });
    }
    if n_obs < 2 {
        return Err(Error::InvalidParameter {
            name: "n_obs",
            message: "observation count must be at least 2".into(),
            value: n_obs.to_string(),
        });
    }
    let chol_yy = spd_factor("syy", blocks.syy())?;
    let chol_xx = spd_factor("sxx", blocks.sxx())?;
    let log_ratio = log_wilks_ratio(blocks.sxx(), blocks.sxy(), &chol_xx, &chol_yy);
    Ok((0.5 * n_obs as f64 * log_ratio).exp())
}

/// Log of the determinant ratio `det(Schur) / det(Sxx)`, clamped to be
/// non-positive (the ratio cannot exceed 1 in exact arithmetic; the clamp
/// removes last-ulp excursions). Returns `-inf` when the Schur complement is
/// numerically singular, i.e. `Lambda = 0`. Factors are passed in so
/// permutation loops, where only `sxy` changes, can reuse them.
pub(crate) fn log_wilks_ratio(
    sxx: ArrayView2<'_, f64>,
    sxy: ArrayView2<'_, f64>,
    chol_xx: &SpdCholesky,
    chol_yy: &SpdCholesky,
) -> f64 {
    let schur = schur_complement(sxx, sxy, chol_yy);
    match SpdCholesky::factor(schur.view()) {
        Err(_) => f64::NEG_INFINITY,
        Ok(chol_schur) => (chol_schur.log_det() - chol_xx.log_det()).min(0.0),
    }
}

/// `Sxx - Sxy Syy^{-1} Syx`, exactly symmetrized.
fn schur_complement(
    sxx: ArrayView2<'_, f64>,
    sxy: ArrayView2<'_, f64>,
    chol_yy: &SpdCholesky,
) -> Array2<f64> {
    let z = chol_yy.solve_matrix(sxy.t()); // Syy^{-1} Syx, p2 x p1
    let b = sxy.dot(&z); // p1 x p1
    let p1 = sxx.nrows();
    let mut schur = Array2::<f64>::zeros((p1, p1));
    for i in 0..p1 {
        schur[[i, i]] = sxx[[i, i]] - b[[i, i]];
        for j in (i + 1)..p1 {
            let v = sxx[[i, j]] - 0.5 * (b[[i, j]] + b[[j, i]]);
            schur[[i, j]] = v;
            schur[[j, i]] = v;
        }
    }
    schur
}

/// Canonical-correlation trace statistic
///
/// ```text
/// C1 = tr( Sxy Syy^{-1} Syx Sxx^{-1} )
/// ```
///
/// the sum of squared sample canonical correlations; it lies in
/// `[0, min(p1, p2)]` up to rounding. Preconditions: `max(p1, p2) < n`
/// (else unavailable), both diagonal blocks positive definite.
pub fn c1_statistic(blocks: &CovarianceBlocks) -> Result<f64> {
    let (p1, p2, n) = (blocks.p1(), blocks.p2(), blocks.n());
    if p1.max(p2) >= n {
        return Err(Error::StatisticUnavailable {
            statistic: "c1",
            constraint: format!("requires max(p1, p2) < n (got {p1}, {p2} with n = {n})"),
        });
    }
    let chol_yy = spd_factor("syy", blocks.syy())?;
    let chol_xx = spd_factor("sxx", blocks.sxx())?;
    Ok(c1_kernel(blocks.sxy(), &chol_xx, &chol_yy))
}

/// `tr(Sxy Syy^{-1} Syx Sxx^{-1})` given pre-computed factors of the
/// diagonal blocks (which permutation loops hold fixed).
pub(crate) fn c1_kernel(
    sxy: ArrayView2<'_, f64>,
    chol_xx: &SpdCholesky,
    chol_yy: &SpdCholesky,
) -> f64 {
    let z = chol_yy.solve_matrix(sxy.t()); // Syy^{-1} Syx
    let b = sxy.dot(&z); // Sxy Syy^{-1} Syx, p1 x p1
    let w = chol_xx.solve_matrix(b.view()); // Sxx^{-1} applied (trace is basis-free)
    trace(w.view())
}

/// Centered cross-trace statistic
///
/// ```text
/// C2 = tr(Sxy Syx) - tr(Sxx) tr(Syy) / n
/// ```
///
/// No inverses, so it is defined for any dimensions; it equals the
/// cross-trace estimator [`crate::estimator::gamma_hat_xy`] divided by `kn`
/// exactly (the two share their kernel).
pub fn c2_statistic(blocks: &CovarianceBlocks) -> f64 {
    cross_trace_gap(blocks)
}
