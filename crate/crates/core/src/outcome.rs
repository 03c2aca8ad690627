//! Test methods, raw statistics, and the common outcome record.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The raw statistic a test is built on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Statistic {
    /// Normalized trace statistic (asymptotically standard normal).
    Tn,
    /// Likelihood-ratio determinant statistic (values in `(0, 1]`, small
    /// values indicate dependence).
    Wilks,
    /// Trace of the squared canonical-correlation matrix.
    C1,
    /// Unnormalized cross-trace gap `tr(Sxy Syx) - tr(Sxx) tr(Syy) / n`.
    C2,
}

impl Statistic {
    /// Whether large values of the statistic indicate dependence. Wilks is
    /// the one statistic where *small* values do.
    pub fn larger_is_more_extreme(&self) -> bool {
        !matches!(self, Statistic::Wilks)
    }

    /// Stable lower-case name (matches the CLI spelling).
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::Tn => "tn",
            Statistic::Wilks => "wilks",
            Statistic::C1 => "c1",
            Statistic::C2 => "c2",
        }
    }
}

impl fmt::Display for Statistic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A complete testing method: a statistic plus its calibration.
///
/// `Tn` is calibrated against its normal limit; the `Perm*` methods calibrate
/// the named statistic by permutation of the second block's observations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// Normalized trace statistic with its asymptotic normal calibration.
    Tn,
    /// Permutation-calibrated trace statistic.
    PermTn,
    /// Permutation-calibrated Wilks determinant statistic.
    PermWilks,
    /// Permutation-calibrated canonical-trace statistic.
    PermC1,
    /// Permutation-calibrated cross-trace gap.
    PermC2,
}

impl Method {
    /// All supported methods, in canonical order.
    pub const ALL: [Method; 5] = [
        Method::Tn,
        Method::PermTn,
        Method::PermWilks,
        Method::PermC1,
        Method::PermC2,
    ];

    /// The statistic this method thresholds.
    pub fn statistic(&self) -> Statistic {
        match self {
            Method::Tn | Method::PermTn => Statistic::Tn,
            Method::PermWilks => Statistic::Wilks,
            Method::PermC1 => Statistic::C1,
            Method::PermC2 => Statistic::C2,
        }
    }

    /// Whether the method is calibrated by permutation (as opposed to an
    /// asymptotic reference distribution).
    pub fn is_permutation(&self) -> bool {
        !matches!(self, Method::Tn)
    }

    /// Stable kebab-case name (matches the CLI spelling).
    pub fn name(&self) -> &'static str {
        match self {
            Method::Tn => "tn",
            Method::PermTn => "perm-tn",
            Method::PermWilks => "perm-wilks",
            Method::PermC1 => "perm-c1",
            Method::PermC2 => "perm-c2",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tn" => Ok(Method::Tn),
            "perm-tn" => Ok(Method::PermTn),
            "perm-wilks" => Ok(Method::PermWilks),
            "perm-c1" => Ok(Method::PermC1),
            "perm-c2" => Ok(Method::PermC2),
            other => Err(Error::InvalidParameter {
                name: "method",
                message: "expected one of tn, perm-tn, perm-wilks, perm-c1, perm-c2".into(),
                value: other.into(),
            }),
        }
    }
}

/// Validate a significance level: finite, `0 < alpha <= 1`.
///
/// `alpha = 1` is admitted deliberately — it makes every test reject whenever
/// its p-value is below 1, which calibration harnesses use as a degenerate
/// sanity case.
pub fn validate_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha > 1.0 {
        return Err(Error::InvalidParameter {
            name: "alpha",
            message: "significance level must lie in (0, 1]".into(),
            value: format!("{alpha}"),
        });
    }
    Ok(())
}

/// The outcome of one hypothesis test: the observed statistic, its p-value,
/// and the decision at the stated level. `reject` is always `p_value < alpha`
/// by construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub method: Method,
    pub statistic: f64,
    pub p_value: f64,
    pub alpha: f64,
    pub reject: bool,
}

impl TestOutcome {
    /// Assemble an outcome, validating `alpha` and the p-value range and
    /// deriving the rejection decision.
    pub fn new(method: Method, statistic: f64, p_value: f64, alpha: f64) -> Result<Self> {
        validate_alpha(alpha)?;
        if !statistic.is_finite() {
            return Err(Error::InvalidData(format!(
                "test statistic is not finite ({statistic})"
            )));
        }
        if !(0.0..=1.0).contains(&p_value) {
            return Err(Error::InvalidData(format!(
                "p-value {p_value} is outside [0, 1]"
            )));
        }
        Ok(Self {
            method,
            statistic,
            p_value,
            alpha,
            reject: p_value < alpha,
        })
    }
}
