//! Permutation calibration.
//!
//! Under independence of the two blocks, re-pairing the second block's rows
//! with a uniformly random permutation leaves the joint distribution
//! unchanged, so the observed statistic can be ranked against statistics
//! recomputed on permuted pairings. The resulting p-value
//! `(1 + #{extreme-or-tied}) / (B + 1)` is finite-sample valid at any `B`.
//!
//! Only the cross block `Sxy` depends on the permutation — `Sxx`, `Syy`,
//! their traces, and their Cholesky factors are computed once and shared
//! across all `B` recomputations, which keeps a permutation test at roughly
//! `B` cross-products rather than `B` full covariance passes.

use ndarray::{Array2, ArrayView2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chol::SpdCholesky;
use crate::classical::{c1_kernel, log_wilks_ratio, spd_factor};
use crate::cov::{center_columns, sum_squared_entries, trace, CovarianceBlocks};
use crate::data::{BlockSpec, DataMatrix};
use crate::error::{Error, Result};
use crate::estimator::{gamma_hat_block, kn};
use crate::outcome::{validate_alpha, Method, Statistic, TestOutcome};
use crate::seed::{stream_seed, Stream};

/// How many permutations to draw and from which seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PermutationPlan {
    permutations: usize,
    seed: u64,
}

impl PermutationPlan {
    /// Fewer than this many permutations cannot resolve conventional levels
    /// (at `B = 99` the smallest attainable p-value is 0.01).
    pub const MIN_PERMUTATIONS: usize = 99;

    /// Default used by harnesses and the CLI.
    pub const DEFAULT_PERMUTATIONS: usize = 199;

    /// A plan with `permutations >= 99` random permutations drawn from
    /// streams derived from `seed`.
    pub fn new(permutations: usize, seed: u64) -> Result<Self> {
        if permutations < Self::MIN_PERMUTATIONS {
            return Err(Error::InvalidParameter {
                name: "permutations",
                message: format!(
                    "at least {} permutations are required",
                    Self::MIN_PERMUTATIONS
                ),
                value: permutations.to_string(),
            });
        }
        Ok(Self { permutations, seed })
    }

    /// Number of permutations `B`.
    pub fn permutations(&self) -> usize {
        self.permutations
    }

    /// Master seed for the permutation streams.
    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// The same number of permutations under a different derived seed
    /// (used by drivers that need per-replication or per-pair independence).
    pub(crate) fn reseeded(&self, seed: u64) -> Self {
        Self {
            permutations: self.permutations,
            seed,
        }
    }
}

/// Everything that survives a permutation unchanged, computed once.
struct PermEngine<'a> {
    xc: Array2<f64>,
    yc: Array2<f64>,
    n: usize,
    n_obs: usize,
    statistics: &'a [Statistic],
    tr_sxx: f64,
    tr_syy: f64,
    /// `n / sqrt(2 kn) * kn / sqrt(gamma_xx * gamma_yy)`: maps the raw
    /// cross-trace gap to the normalized statistic.
    tn_scale: f64,
    chol_xx: Option<SpdCholesky>,
    chol_yy: Option<SpdCholesky>,
    sxx: Array2<f64>,
}

/// Comparison values for all requested statistics at one permutation.
/// (For the determinant statistic the comparison value is the log ratio,
/// which orders identically to the reported value without underflow.)
type CmpValues = [f64; 4];

impl<'a> PermEngine<'a> {
    fn build(
        data: &DataMatrix,
        spec: &BlockSpec,
        statistics: &'a [Statistic],
    ) -> Result<Self> {
        let n_obs = data.n_observations();
        if n_obs < 3 {
            return Err(Error::InsufficientObservations {
                message: "permutation tests need at least 3 observations".into(),
                got: n_obs,
            });
        }
        let blocks = CovarianceBlocks::from_data(data, spec)?;
        let n = blocks.n();
        let centered = center_columns(data);
        let p1 = spec.p1();
        let xc = centered.slice(ndarray::s![.., ..p1]).to_owned();
        let yc = centered.slice(ndarray::s![.., p1..]).to_owned();

        let tr_sxx = trace(blocks.sxx());
        let tr_syy = trace(blocks.syy());

        let needs_tn = statistics.contains(&Statistic::Tn);
        let needs_wilks = statistics.contains(&Statistic::Wilks);
        let needs_c1 = statistics.contains(&Statistic::C1);

        let tn_scale = if needs_tn {
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
            (n as f64 / (2.0 * k).sqrt()) * k / (g_xx * g_yy).sqrt()
        } else {
            0.0
        };

        if needs_wilks && spec.p1() + spec.p2() >= n {
            return Err(Error::StatisticUnavailable {
                statistic: "wilks",
                constraint: format!(
                    "requires p1 + p2 < n (got {} + {} with n = {n})",
                    spec.p1(),
                    spec.p2()
                ),
            });
        }
        if needs_c1 && spec.p1().max(spec.p2()) >= n {
            return Err(Error::StatisticUnavailable {
                statistic: "c1",
                constraint: format!(
                    "requires max(p1, p2) < n (got {}, {} with n = {n})",
                    spec.p1(),
                    spec.p2()
                ),
            });
        }
        let needs_factors = needs_wilks || needs_c1;
        let (chol_xx, chol_yy) = if needs_factors {
            (
                Some(spd_factor("sxx", blocks.sxx())?),
                Some(spd_factor("syy", blocks.syy())?),
            )
        } else {
            (None, None)
        };

        Ok(Self {
            xc,
            yc,
            n,
            n_obs,
            statistics,
            tr_sxx,
            tr_syy,
            tn_scale,
            chol_xx,
            chol_yy,
            sxx: blocks.sxx().to_owned(),
        })
    }

    /// Cross block for a given row assignment of the second block.
    fn sxy_for(&self, assignment: &[usize]) -> Array2<f64> {
        let yp = self.yc.select(Axis(0), assignment);
        self.xc.t().dot(&yp) / self.n as f64
    }

    /// Comparison values of all requested statistics at one assignment.
    fn eval(&self, sxy: ArrayView2<'_, f64>) -> CmpValues {
        let mut out = [0.0; 4];
        let mut cross_gap = None;
        for (slot, stat) in self.statistics.iter().enumerate() {
            out[slot] = match stat {
                Statistic::Tn | Statistic::C2 => {
                    let gap = *cross_gap.get_or_insert_with(|| {
                        sum_squared_entries(sxy) - self.tr_sxx * self.tr_syy / self.n as f64
                    });
                    if *stat == Statistic::Tn {
                        self.tn_scale * gap
                    } else {
                        gap
                    }
                }
                Statistic::Wilks => log_wilks_ratio(
                    self.sxx.view(),
                    sxy,
                    self.chol_xx.as_ref().expect("factors precomputed"),
                    self.chol_yy.as_ref().expect("factors precomputed"),
                ),
                Statistic::C1 => c1_kernel(
                    sxy,
                    self.chol_xx.as_ref().expect("factors precomputed"),
                    self.chol_yy.as_ref().expect("factors precomputed"),
                ),
            };
        }
        out
    }

    /// Reported value of statistic `stat` given its comparison value.
    fn report_value(&self, stat: Statistic, cmp: f64) -> f64 {
        match stat {
            Statistic::Wilks => (0.5 * self.n_obs as f64 * cmp).exp(),
            _ => cmp,
        }
    }
}

/// Permutation p-values for several statistics on the same data, sharing one
/// set of permutation draws.
///
/// Rows of the second block are re-paired against the first block `B` times;
/// each requested statistic is ranked within its own null recomputations
/// (counting ties as extreme), giving `p = (1 + #extreme) / (B + 1)`.
/// Outcomes are returned in the order the statistics were requested.
///
/// Preconditions of every requested statistic are enforced up front
/// (dimension constraints for the inverted statistics, positive variance
/// estimates for the normalized trace statistic), so an unavailable
/// statistic is a hard error here rather than a silent omission.
pub fn permutation_pvalues(
    data: &DataMatrix,
    spec: &BlockSpec,
    statistics: &[Statistic],
    alpha: f64,
    plan: &PermutationPlan,
) -> Result<Vec<TestOutcome>> {
    validate_alpha(alpha)?;
    if statistics.is_empty() {
        return Err(Error::InvalidParameter {
            name: "statistics",
            message: "at least one statistic is required".into(),
            value: "[]".into(),
        });
    }
    if statistics.len() > 4 {
        return Err(Error::InvalidParameter {
            name: "statistics",
            message: "at most 4 statistics per invocation".into(),
            value: statistics.len().to_string(),
        });
    }
    for (i, s) in statistics.iter().enumerate() {
        if statistics[..i].contains(s) {
            return Err(Error::InvalidParameter {
                name: "statistics",
                message: "statistics must be distinct".into(),
                value: s.to_string(),
            });
        }
    }
    spec.check_covers(data.n_variables())?;

    let engine = PermEngine::build(data, spec, statistics)?;
    let n_obs = engine.n_obs;

    let identity: Vec<usize> = (0..n_obs).collect();
    let obs = engine.eval(engine.sxy_for(&identity).view());

    let b_total = plan.permutations();
    let counts = (0..b_total)
        .into_par_iter()
        .with_min_len(8)
        .map(|b| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(
                plan.seed(),
                Stream::Permutation,
                b as u64,
            ));
            let mut assignment: Vec<usize> = (0..n_obs).collect();
            assignment.shuffle(&mut rng);
            let vals = engine.eval(engine.sxy_for(&assignment).view());
            let mut extreme = [0u64; 4];
            for (slot, stat) in statistics.iter().enumerate() {
                let hit = if stat.larger_is_more_extreme() {
                    vals[slot] >= obs[slot]
                } else {
                    vals[slot] <= obs[slot]
                };
                extreme[slot] = hit as u64;
            }
            extreme
        })
        .reduce(
            || [0u64; 4],
            |mut acc, item| {
                for (a, b) in acc.iter_mut().zip(item) {
                    *a += b;
                }
                acc
            },
        );

    statistics
        .iter()
        .enumerate()
        .map(|(slot, &stat)| {
            let p = (1 + counts[slot]) as f64 / (b_total + 1) as f64;
            let method = match stat {
                Statistic::Tn => Method::PermTn,
                Statistic::Wilks => Method::PermWilks,
                Statistic::C1 => Method::PermC1,
                Statistic::C2 => Method::PermC2,
            };
            TestOutcome::new(method, engine.report_value(stat, obs[slot]), p, alpha)
        })
        .collect()
}

/// Permutation p-value for a single statistic (see [`permutation_pvalues`]).
pub fn permutation_pvalue(
    data: &DataMatrix,
    spec: &BlockSpec,
    statistic: Statistic,
    alpha: f64,
    plan: &PermutationPlan,
) -> Result<TestOutcome> {
    let mut outcomes = permutation_pvalues(data, spec, &[statistic], alpha, plan)?;
    Ok(outcomes.remove(0))
}
