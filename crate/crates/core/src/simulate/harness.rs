//! Monte-Carlo size and power studies.
//!
//! A study fixes a data-generating [`TruthModel`], a sample size, and a set
//! of testing methods, then estimates each method's rejection probability
//! over seeded replications. Every replication derives its own RNG stream
//! from the master seed (and permutation tests derive theirs from the
//! replication's), so results are bit-reproducible and independent of how
//! work is scheduled across threads — rejection counts are integers, and
//! integer sums are order-free.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::data::BlockSpec;
use crate::error::{Error, Result};
use crate::outcome::{validate_alpha, Method, Statistic};
use crate::perm::{permutation_pvalues, PermutationPlan};
use crate::seed::{stream_seed, Stream};
use crate::simulate::model::TruthModel;
use crate::tn::test_tn;

/// Configuration of one Monte-Carlo study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    /// Data-generating truth.
    pub model: TruthModel,
    /// Observations per replication (`N`; the statistics see `n = N - 1`
    /// degrees of freedom).
    pub sample_size: usize,
    /// Monte-Carlo replications (at least 100).
    pub replications: usize,
    /// Significance level in `(0, 1]`.
    pub alpha: f64,
    /// Master seed; every replication and permutation stream derives from it.
    pub seed: u64,
    /// Methods to evaluate on each replication.
    pub methods: Vec<Method>,
    /// Permutations per permutation-calibrated test.
    #[serde(default = "default_permutations")]
    pub permutations: usize,
}

fn default_permutations() -> usize {
    PermutationPlan::DEFAULT_PERMUTATIONS
}

impl SimConfig {
    /// Validate every field (see the field docs for the domains).
    pub fn validate(&self) -> Result<()> {
        self.model.validate()?;
        if self.sample_size < 3 {
            return Err(Error::InsufficientObservations {
                message: "simulation needs at least 3 observations per replication".into(),
                got: self.sample_size,
            });
        }
        if self.replications < 100 {
            return Err(Error::InvalidParameter {
                name: "replications",
                message: "at least 100 replications are required for a meaningful proportion"
                    .into(),
                value: self.replications.to_string(),
            });
        }
        validate_alpha(self.alpha)?;
        if self.methods.is_empty() {
            return Err(Error::InvalidParameter {
                name: "methods",
                message: "at least one method is required".into(),
                value: "[]".into(),
            });
        }
        for (i, m) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(m) {
                return Err(Error::InvalidParameter {
                    name: "methods",
                    message: "methods must be distinct".into(),
                    value: m.to_string(),
                });
            }
        }
        if self.methods.iter().any(Method::is_permutation) {
            // Delegate the bound check to the plan type.
            PermutationPlan::new(self.permutations, self.seed)?;
        }
        Ok(())
    }
}

/// One method's estimated rejection probability at one grid point, or the
/// reason the method was unavailable there.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodCell {
    pub method: Method,
    /// `None` when the method's preconditions fail at these dimensions; the
    /// cell is reported (never silently dropped) with `unavailable` set.
    pub rejections: Option<u64>,
    pub replications: usize,
    /// Rejection proportion; `None` when unavailable.
    pub proportion: Option<f64>,
    /// Binomial standard error `sqrt(p (1-p) / reps)`; `None` when unavailable.
    pub std_error: Option<f64>,
    /// Why the method could not run, when it could not.
    pub unavailable: Option<String>,
}

/// Identifies the swept parameter value a report belongs to.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    /// `"gamma"` or `"p2"`.
    pub parameter: String,
    pub value: f64,
}

/// Results of one study at one grid point: the effective configuration
/// (model updated to the grid value) plus one cell per requested method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SizePowerReport {
    pub config: SimConfig,
    pub sweep: Option<SweepPoint>,
    pub cells: Vec<MethodCell>,
}

/// A parameter sweep for power curves.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "parameter", content = "values", rename_all = "kebab-case")]
pub enum Sweep {
    /// Sweep the coupling strength.
    Gamma(Vec<f64>),
    /// Sweep the second block's width.
    P2(Vec<usize>),
}

impl Sweep {
    fn validate(&self) -> Result<()> {
        let len = match self {
            Sweep::Gamma(v) => v.len(),
            Sweep::P2(v) => v.len(),
        };
        if len == 0 {
            return Err(Error::InvalidParameter {
                name: "sweep",
                message: "a sweep needs at least one grid value".into(),
                value: "[]".into(),
            });
        }
        Ok(())
    }
}

/// Estimate the empirical size (null rejection rate) of each configured
/// method. The model must actually be a null (`gamma = 0`); estimating
/// "size" under dependence would silently conflate size with power.
pub fn empirical_size(config: &SimConfig) -> Result<SizePowerReport> {
    config.validate()?;
    if !config.model.is_null() {
        return Err(Error::InvalidParameter {
            name: "model",
            message: "empirical size requires an independent-blocks model (gamma = 0)".into(),
            value: format!("gamma = {}", config.model.gamma()),
        });
    }
    let cells = run_point(&config.model, config, 0)?;
    Ok(SizePowerReport {
        config: config.clone(),
        sweep: None,
        cells,
    })
}

/// Estimate rejection probabilities along a sweep of the coupling strength
/// or the second block's width, one report per grid value. Each report's
/// `config` echoes the effective model at that grid point.
pub fn power_curve(config: &SimConfig, sweep: &Sweep) -> Result<Vec<SizePowerReport>> {
    config.validate()?;
    sweep.validate()?;
    let mut reports = Vec::new();
    match sweep {
        Sweep::Gamma(values) => {
            for (i, &gamma) in values.iter().enumerate() {
                let model = config.model.with_gamma(gamma)?;
                reports.push(sweep_report(config, model, "gamma", gamma, i as u64)?);
            }
        }
        Sweep::P2(values) => {
            for (i, &p2) in values.iter().enumerate() {
                let model = config.model.with_p2(p2)?;
                reports.push(sweep_report(config, model, "p2", p2 as f64, i as u64)?);
            }
        }
    }
    Ok(reports)
}

fn sweep_report(
    config: &SimConfig,
    model: TruthModel,
    parameter: &str,
    value: f64,
    grid_index: u64,
) -> Result<SizePowerReport> {
    let cells = run_point(&model, config, grid_index)?;
    let mut effective = config.clone();
    effective.model = model;
    Ok(SizePowerReport {
        config: effective,
        sweep: Some(SweepPoint {
            parameter: parameter.to_string(),
            value,
        }),
        cells,
    })
}

/// Availability of a method at given dimensions, mirroring the statistic
/// preconditions (`n = N - 1` degrees of freedom).
fn availability(method: Method, p1: usize, p2: usize, n: usize) -> Option<String> {
    match method.statistic() {
        Statistic::Tn | Statistic::C2 => None,
        Statistic::Wilks => (p1 + p2 >= n).then(|| {
            format!("wilks requires p1 + p2 < n (got {p1} + {p2} with n = {n})")
        }),
        Statistic::C1 => (p1.max(p2) >= n).then(|| {
            format!("c1 requires max(p1, p2) < n (got {p1}, {p2} with n = {n})")
        }),
    }
}

/// Run all replications of one grid point and aggregate rejection counts.
fn run_point(model: &TruthModel, config: &SimConfig, grid_index: u64) -> Result<Vec<MethodCell>> {
    let (p1, p2) = (model.p1(), model.p2());
    let spec = BlockSpec::new(p1, p2)?;
    let n = config.sample_size - 1;

    let unavailable: Vec<Option<String>> = config
        .methods
        .iter()
        .map(|&m| availability(m, p1, p2, n))
        .collect();

    // Active methods, partitioned into the direct test and the permutation
    // statistics (which share one set of permutation draws per replication).
    let direct_tn = config
        .methods
        .iter()
        .zip(&unavailable)
        .any(|(&m, u)| m == Method::Tn && u.is_none());
    let perm_stats: Vec<Statistic> = config
        .methods
        .iter()
        .zip(&unavailable)
        .filter(|(m, u)| m.is_permutation() && u.is_none())
        .map(|(m, _)| m.statistic())
        .collect();

    let reps = config.replications;
    let alpha = config.alpha;
    let counts = (0..reps)
        .into_par_iter()
        .with_min_len(4)
        .map(|rep| -> Result<RejectionCounts> {
            let data_seed =
                stream_seed(config.seed, Stream::Replication(grid_index), rep as u64);
            let data = model.generate(config.sample_size, data_seed)?;
            let mut counts = RejectionCounts::default();
            if direct_tn && test_tn(&data, &spec, alpha)?.reject {
                counts.add(Method::Tn);
            }
            if !perm_stats.is_empty() {
                let plan_seed = stream_seed(data_seed, Stream::Permutation, 0);
                let plan = PermutationPlan::new(config.permutations, plan_seed)?;
                for outcome in permutation_pvalues(&data, &spec, &perm_stats, alpha, &plan)? {
                    if outcome.reject {
                        counts.add(outcome.method);
                    }
                }
            }
            Ok(counts)
        })
        .try_reduce(RejectionCounts::default, |a, b| Ok(a.merge(b)))?;

    Ok(config
        .methods
        .iter()
        .zip(unavailable)
        .map(|(&method, reason)| match reason {
            Some(reason) => MethodCell {
                method,
                rejections: None,
                replications: reps,
                proportion: None,
                std_error: None,
                unavailable: Some(reason),
            },
            None => {
                let r = counts.get(method);
                let p = r as f64 / reps as f64;
                MethodCell {
                    method,
                    rejections: Some(r),
                    replications: reps,
                    proportion: Some(p),
                    std_error: Some((p * (1.0 - p) / reps as f64).sqrt()),
                    unavailable: None,
                }
            }
        })
        .collect())
}

/// Per-method rejection counters (indexed by the canonical method order).
#[derive(Debug, Default, Clone, Copy)]
struct RejectionCounts([u64; Method::ALL.len()]);

impl RejectionCounts {
    fn slot(method: Method) -> usize {
        Method::ALL
            .iter()
            .position(|&m| m == method)
            .expect("method is in the canonical list")
    }

    fn add(&mut self, method: Method) {
        self.0[Self::slot(method)] += 1;
    }

    fn get(&self, method: Method) -> u64 {
        self.0[Self::slot(method)]
    }

    fn merge(mut self, other: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(other.0) {
            *a += b;
        }
        self
    }
}

/// Format a float with 17 significant digits (scientific notation), enough
/// to round-trip an `f64` exactly; CSV output uses this for every float so
/// reruns are byte-comparable.
pub fn csv_float(x: f64) -> String {
    format!("{x:.16e}")
}

/// Render reports as CSV: one row per method and grid point, with columns
/// `method, grid_value, rejections, replications, proportion, std_error`.
/// Unavailable cells carry `NA` in the numeric columns. The `grid_value`
/// column is empty for plain (non-sweep) size reports.
pub fn reports_to_csv(reports: &[SizePowerReport]) -> String {
    let mut out = String::from("method,grid_value,rejections,replications,proportion,std_error\n");
    for report in reports {
        let grid = report
            .sweep
            .as_ref()
            .map(|s| csv_float(s.value))
            .unwrap_or_default();
        for cell in &report.cells {
            let (rej, prop, se) = match (cell.rejections, cell.proportion, cell.std_error) {
                (Some(r), Some(p), Some(se)) => {
                    (r.to_string(), csv_float(p), csv_float(se))
                }
                _ => ("NA".into(), "NA".into(), "NA".into()),
            };
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                cell.method, grid, rej, cell.replications, prop, se
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base_config() -> SimConfig {
        SimConfig {
            model: TruthModel::null_identity(2, 5).unwrap(),
            sample_size: 21,
            replications: 200,
            alpha: 0.05,
            seed: 42,
            methods: vec![Method::Tn],
            permutations: 99,
        }
    }

    #[test]
    fn config_validation() {
        assert!(base_config().validate().is_ok());
        let mut c = base_config();
        c.replications = 99;
        assert!(c.validate().is_err());
        let mut c = base_config();
        c.alpha = 0.0;
        assert!(c.validate().is_err());
        let mut c = base_config();
        c.methods.clear();
        assert!(c.validate().is_err());
        let mut c = base_config();
        c.methods = vec![Method::Tn, Method::Tn];
        assert!(c.validate().is_err());
        let mut c = base_config();
        c.methods = vec![Method::PermTn];
        c.permutations = 98;
        assert!(c.validate().is_err());
        // Direct-only configs ignore the permutation count.
        let mut c = base_config();
        c.permutations = 0;
        assert!(c.validate().is_ok());
    }

    #[test]
    fn empirical_size_requires_null_model() {
        let mut c = base_config();
        c.model = TruthModel::mixture(2, 5, 0.5).unwrap();
        assert!(empirical_size(&c).is_err());
        c.model = TruthModel::mixture(2, 5, 0.0).unwrap();
        assert!(empirical_size(&c).is_ok());
    }

    #[test]
    fn size_report_is_deterministic_and_sane() {
        let c = base_config();
        let a = empirical_size(&c).unwrap();
        let b = empirical_size(&c).unwrap();
        assert_eq!(a, b);
        let cell = &a.cells[0];
        assert_eq!(cell.method, Method::Tn);
        let prop = cell.proportion.unwrap();
        // A 5%-level test on null data rejects rarely; 200 reps put a loose
        // but deterministic ceiling on the proportion.
        assert!(prop < 0.20, "null rejection rate {prop} is implausible");
        assert_eq!(
            cell.rejections.unwrap() as f64 / cell.replications as f64,
            prop
        );
    }

    #[test]
    fn alpha_one_rejects_everything() {
        // At alpha = 1 every p-value below 1 rejects; the direct test's
        // p-values are strictly below 1 almost surely.
        let mut c = base_config();
        c.alpha = 1.0;
        c.replications = 100;
        let report = empirical_size(&c).unwrap();
        assert_eq!(report.cells[0].proportion.unwrap(), 1.0);
    }

    #[test]
    fn unavailable_methods_are_marked_not_dropped() {
        // n = 9, p1 + p2 = 12: the determinant statistic cannot run, the
        // trace statistics can.
        let mut c = base_config();
        c.model = TruthModel::null_identity(4, 8).unwrap();
        c.sample_size = 10;
        c.replications = 100;
        c.methods = vec![Method::Tn, Method::PermWilks, Method::PermC2];
        let report = empirical_size(&c).unwrap();
        assert_eq!(report.cells.len(), 3);
        let wilks = &report.cells[1];
        assert_eq!(wilks.method, Method::PermWilks);
        assert!(wilks.proportion.is_none());
        assert!(wilks.unavailable.as_deref().unwrap().contains("p1 + p2"));
        assert!(report.cells[0].proportion.is_some());
        assert!(report.cells[2].proportion.is_some());
    }

    #[test]
    fn power_grows_with_coupling() {
        let mut c = base_config();
        c.model = TruthModel::mixture(2, 10, 0.0).unwrap();
        c.sample_size = 31;
        c.replications = 150;
        let sweep = Sweep::Gamma(vec![0.0, 0.9]);
        let reports = power_curve(&c, &sweep).unwrap();
        assert_eq!(reports.len(), 2);
        let p_null = reports[0].cells[0].proportion.unwrap();
        let p_strong = reports[1].cells[0].proportion.unwrap();
        assert!(
            p_strong > p_null + 0.3,
            "power at gamma = 0.9 ({p_strong}) should dominate size ({p_null})"
        );
        // Report metadata reflects the grid.
        assert_eq!(reports[1].sweep.as_ref().unwrap().parameter, "gamma");
        assert_eq!(reports[1].sweep.as_ref().unwrap().value, 0.9);
        assert_eq!(reports[1].config.model.gamma(), 0.9);
    }

    #[test]
    fn p2_sweep_updates_dimensions() {
        let mut c = base_config();
        c.model = TruthModel::mixture(2, 5, 0.5).unwrap();
        c.replications = 100;
        let reports = power_curve(&c, &Sweep::P2(vec![5, 9])).unwrap();
        assert_eq!(reports[1].config.model.p2(), 9);
    }

    #[test]
    fn sweep_on_null_model_fails() {
        let c = base_config();
        assert!(power_curve(&c, &Sweep::Gamma(vec![0.1])).is_err());
        assert!(power_curve(&c, &Sweep::Gamma(vec![])).is_err());
    }

    #[test]
    fn csv_shape_and_na_markers() {
        let mut c = base_config();
        c.model = TruthModel::null_identity(4, 8).unwrap();
        c.sample_size = 10;
        c.replications = 100;
        c.methods = vec![Method::Tn, Method::PermWilks];
        let report = empirical_size(&c).unwrap();
        let csv = reports_to_csv(std::slice::from_ref(&report));
        let lines: Vec<&str> = csv.trim_end().lines().collect();
        assert_eq!(lines.len(), 3);
        assert_eq!(
            lines[0],
            "method,grid_value,rejections,replications,proportion,std_error"
        );
        assert!(lines[1].starts_with("tn,,"));
        assert!(lines[2].starts_with("perm-wilks,,NA,100,NA,NA"));
        // Byte-stable across reruns.
        let again = reports_to_csv(&[empirical_size(&c).unwrap()]);
        assert_eq!(csv, again);
    }

    #[test]
    fn csv_float_has_17_significant_digits() {
        let s = csv_float(0.05);
        assert_eq!(s, "5.0000000000000003e-2");
        let parsed: f64 = s.parse().unwrap();
        assert_eq!(parsed, 0.05);
        // Round-trip at full precision for an irrational-ish value.
        let x = std::f64::consts::PI / 7.0;
        let back: f64 = csv_float(x).parse().unwrap();
        assert_eq!(back, x);
    }

    #[test]
    fn json_round_trip() {
        let report = empirical_size(&base_config()).unwrap();
        let json = serde_json::to_string(&report).unwrap();
        let back: SizePowerReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }
}
