//! Seeded Monte-Carlo studies: size/power harnesses, data-generating
//! models, and the kernel moment verifier.

mod harness;
mod model;
mod psi_check;

pub use crate::seed::derive_seed;
pub use harness::{
    csv_float, empirical_size, power_curve, reports_to_csv, MethodCell, SimConfig,
    SizePowerReport, Sweep, SweepPoint,
};
pub use model::TruthModel;
pub use psi_check::{psi_moment_check, MomentCheck, PsiMomentReport};
