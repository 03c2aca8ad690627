//! Trace-based independence testing between two random vectors.
//!
//! This crate tests whether two jointly observed random vectors are
//! independent in the regime where one vector is low-dimensional and the
//! other's dimension is large relative to the sample size. The centerpiece is
//! a normalized trace statistic with a standard normal limit that needs no
//! dimension-specific tables; classical determinant- and trace-based
//! comparators are provided with permutation calibration, alongside
//! Monte-Carlo harnesses for size/power studies, a moment verifier for the
//! underlying kernel, and a pairwise screening driver for grouped variables.
//!
//! Quick tour:
//! * [`data`]: validated observation matrices and block layouts.
//! * [`cov`]: sample covariance and its block decomposition.
//! * [`estimator`]: unbiased trace-functional estimators and the psi kernel.
//! * [`tn`]: the normalized trace statistic and its asymptotic test.
//! * [`classical`]: Wilks determinant and canonical-trace comparators.
//! * [`perm`]: permutation calibration for any of the statistics.
//! * [`simulate`]: seeded size/power studies and the kernel moment check.
//! * [`pairwise`]: all-pairs screening over grouped variables with F-score
//!   evaluation.

pub mod classical;
pub mod cov;
pub mod data;
pub mod error;
pub mod estimator;
pub mod outcome;
pub mod pairwise;
pub mod perm;
pub mod simulate;
pub mod tn;

mod chol;
mod seed;

pub use cov::{sample_covariance, CovarianceBlocks};
pub use data::{BlockSpec, DataMatrix};
pub use error::{Error, ErrorCategory, Result};
pub use estimator::{gamma_hat_block, gamma_hat_xy, gamma_hat_xy_decomposed, kn, psi};
pub use outcome::{Method, Statistic, TestOutcome};
pub use perm::{permutation_pvalue, permutation_pvalues, PermutationPlan};
pub use tn::{normal_upper_pvalue, t_statistic, test_tn};
