//! Monte-Carlo verification of the psi kernel's moment identities.
//!
//! For independent `u, v, w ~ N(0, I_n)` the kernel
//! `psi(x, y) = (x'y)^2/n - (x'x)(y'y)/n^2` satisfies
//!
//! ```text
//! E[psi(u, v)]                    = 0
//! E[psi(v, v)]                    = (n-1)(n+2)/n
//! E[psi(u, v)^2]                  = 2 (n-1)(n+2) / n^2
//! E[psi(u, v) psi(w, v)]          = (2/n) E[psi(u, w)]   (checked as a
//!                                   mean-zero difference)
//! ```
//!
//! These four identities are what make the normalized trace statistic's
//! variance work out; this verifier estimates each left-hand side by
//! simulation and checks it against the exact target within 3 standard
//! errors. Draws are batched with per-batch derived seeds and the batches
//! are reduced in a fixed order, so the estimates are bit-reproducible.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::psi;
use crate::seed::{stream_seed, Stream};

/// Observations per deterministic accumulation batch.
const BATCH: usize = 1000;

/// How many standard errors an estimate may deviate from its target.
const TOLERANCE_SIGMAS: f64 = 3.0;

/// One verified moment identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentCheck {
    /// Which moment, e.g. `"mean psi(u,v)"`.
    pub name: String,
    /// Monte-Carlo estimate of the moment.
    pub estimate: f64,
    /// Exact target value.
    pub target: f64,
    /// Standard error of the estimate.
    pub std_error: f64,
    /// `(estimate - target) / std_error`.
    pub z_score: f64,
    /// Whether `|z| <= 3`.
    pub pass: bool,
}

/// Full verification report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PsiMomentReport {
    /// Vector dimension the kernel was evaluated at.
    pub n: usize,
    pub replications: usize,
    pub seed: u64,
    pub tolerance_sigmas: f64,
    pub checks: Vec<MomentCheck>,
    pub all_pass: bool,
}

/// Sum and sum-of-squares accumulators for the four tracked quantities.
#[derive(Debug, Default, Clone, Copy)]
struct Sums {
    s: [f64; 4],
    sq: [f64; 4],
}

impl Sums {
    fn add(&mut self, vals: [f64; 4]) {
        for i in 0..4 {
            self.s[i] += vals[i];
            self.sq[i] += vals[i] * vals[i];
        }
    }

    fn merge(&mut self, other: &Sums) {
        for i in 0..4 {
            self.s[i] += other.s[i];
            self.sq[i] += other.sq[i];
        }
    }
}

/// Estimate the four kernel moments at dimension `n` from `replications`
/// independent `(u, v, w)` triples and compare each against its exact
/// target within 3 standard errors.
///
/// Requires `n >= 2` (the targets divide by `n` and vanish at `n = 1`) and
/// `replications >= 10_000` (below that the standard errors are too wide
/// for the check to mean anything).
pub fn psi_moment_check(n: usize, replications: usize, seed: u64) -> Result<PsiMomentReport> {
    if n < 2 {
        return Err(Error::InvalidParameter {
            name: "n",
            message: "kernel moment checks need dimension at least 2".into(),
            value: n.to_string(),
        });
    }
    if replications < 10_000 {
        return Err(Error::InvalidParameter {
            name: "replications",
            message: "kernel moment checks need at least 10000 replications".into(),
            value: replications.to_string(),
        });
    }

    let batches = replications.div_ceil(BATCH);
    // Each batch accumulates sequentially under its own derived seed; the
    // ordered sequential fold below makes the result independent of thread
    // scheduling.
    let partials: Vec<Sums> = (0..batches)
        .into_par_iter()
        .map(|batch| {
            let start = batch * BATCH;
            let count = BATCH.min(replications - start);
            let mut rng =
                ChaCha8Rng::seed_from_u64(stream_seed(seed, Stream::MomentBatch, batch as u64));
            let mut u = vec![0.0f64; n];
            let mut v = vec![0.0f64; n];
            let mut w = vec![0.0f64; n];
            let mut sums = Sums::default();
            for _ in 0..count {
                for x in u.iter_mut() {
                    *x = StandardNormal.sample(&mut rng);
                }
                for x in v.iter_mut() {
                    *x = StandardNormal.sample(&mut rng);
                }
                for x in w.iter_mut() {
                    *x = StandardNormal.sample(&mut rng);
                }
                let psi_uv = psi(&u, &v).expect("equal-length non-empty vectors");
                let psi_vv = psi(&v, &v).expect("equal-length non-empty vectors");
                let psi_wv = psi(&w, &v).expect("equal-length non-empty vectors");
                let psi_uw = psi(&u, &w).expect("equal-length non-empty vectors");
                let cross = psi_uv * psi_wv - (2.0 / n as f64) * psi_uw;
                sums.add([psi_uv, psi_vv, psi_uv * psi_uv, cross]);
            }
            sums
        })
        .collect();

    let mut total = Sums::default();
    for p in &partials {
        total.merge(p);
    }

    let nf = n as f64;
    let targets = [
        0.0,
        (nf - 1.0) * (nf + 2.0) / nf,
        2.0 * (nf - 1.0) * (nf + 2.0) / (nf * nf),
        0.0,
    ];
    let names = [
        "mean psi(u,v)",
        "mean psi(v,v)",
        "mean psi(u,v)^2",
        "mean psi(u,v) psi(w,v) - (2/n) psi(u,w)",
    ];

    let r = replications as f64;
    let checks: Vec<MomentCheck> = (0..4)
        .map(|i| {
            let estimate = total.s[i] / r;
            let var = ((total.sq[i] - total.s[i] * total.s[i] / r) / (r - 1.0)).max(0.0);
            let std_error = (var / r).sqrt();
            let z_score = if std_error > 0.0 {
                (estimate - targets[i]) / std_error
            } else if estimate == targets[i] {
                0.0
            } else {
                f64::INFINITY
            };
            MomentCheck {
                name: names[i].to_string(),
                estimate,
                target: targets[i],
                std_error,
                z_score,
                pass: z_score.abs() <= TOLERANCE_SIGMAS,
            }
        })
        .collect();

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(PsiMomentReport {
        n,
        replications,
        seed,
        tolerance_sigmas: TOLERANCE_SIGMAS,
        checks,
        all_pass,
    })
}
