//! All-pairs dependence screening over grouped variables.
//!
//! A wide observation matrix whose columns are partitioned into named groups
//! (say, gene sets) defines a screening problem: for every unordered pair of
//! groups, test whether the two blocks are dependent, and report the set of
//! pairs that reject as predicted "edges" of a dependence network. Predicted
//! edges can then be scored against a ground-truth edge set with
//! precision/recall/F-measure.

pub mod io;

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use ndarray::concatenate;

use crate::data::{BlockSpec, DataMatrix};
use crate::error::{Error, ErrorCategory, Result};
use crate::outcome::{validate_alpha, Method, TestOutcome};
use crate::perm::{permutation_pvalue, PermutationPlan};
use crate::seed::{stream_seed, Stream};
use crate::tn::test_tn;

/// A named, contiguous span of columns in a grouped dataset.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    name: String,
    start: usize,
    width: usize,
}

impl Group {
    /// Group name (unique within a dataset).
    pub fn name(&self) -> &str {
        &self.name
    }

    /// First column of the group's span.
    pub fn start(&self) -> usize {
        self.start
    }

    /// Number of variables in the group.
    pub fn width(&self) -> usize {
        self.width
    }
}

/// An observation matrix whose columns are partitioned, in order, into named
/// groups. Group widths must exactly cover the columns, widths must be
/// positive, and names must be unique and non-empty.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedDataset {
    data: DataMatrix,
    groups: Vec<Group>,
}

impl GroupedDataset {
    /// Partition `data`'s columns into consecutive groups of the given
    /// `(name, width)` spans.
    pub fn new(data: DataMatrix, layout: Vec<(String, usize)>) -> Result<Self> {
        if layout.is_empty() {
            return Err(Error::InvalidData(
                "a grouped dataset needs at least one group".into(),
            ));
        }
        let mut groups = Vec::with_capacity(layout.len());
        let mut start = 0usize;
        for (name, width) in layout {
            if name.is_empty() {
                return Err(Error::InvalidData("group names must be non-empty".into()));
            }
            if width == 0 {
                return Err(Error::InvalidData(format!(
                    "group `{name}` has width 0; groups must contain at least one variable"
                )));
            }
            if groups.iter().any(|g: &Group| g.name == name) {
                return Err(Error::InvalidData(format!(
                    "duplicate group name `{name}`"
                )));
            }
            groups.push(Group { name, start, width });
            start += width;
        }
        let total = start;
        if total != data.n_variables() {
            return Err(Error::InvalidData(format!(
                "group widths sum to {total} but the data has {} columns",
                data.n_variables()
            )));
        }
        Ok(Self { data, groups })
    }

    /// The underlying observation matrix.
    pub fn data(&self) -> &DataMatrix {
        &self.data
    }

    /// All groups in column order.
    pub fn groups(&self) -> &[Group] {
        &self.groups
    }

    /// Number of observations.
    pub fn n_observations(&self) -> usize {
        self.data.n_observations()
    }

    /// The columns of one group as a standalone matrix.
    pub fn group_matrix(&self, group: &Group) -> Result<DataMatrix> {
        self.data.select_columns(group.start, group.width)
    }

    /// Every unordered pair of group names — the universe predicted and
    /// truth edge sets must live inside.
    pub fn all_pairs(&self) -> EdgeSet {
        let mut set = EdgeSet::default();
        for (i, a) in self.groups.iter().enumerate() {
            for b in &self.groups[i + 1..] {
                set.insert(&a.name, &b.name)
                    .expect("distinct validated group names");
            }
        }
        set
    }
}

/// A set of unordered group-name pairs, stored canonically (each pair sorted
/// lexicographically, the set ordered). Self-pairs are rejected.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct EdgeSet(BTreeSet<(String, String)>);

impl EdgeSet {
    /// Insert the unordered pair `{a, b}`; order of arguments is irrelevant.
    pub fn insert(&mut self, a: &str, b: &str) -> Result<()> {
        if a == b {
            return Err(Error::InvalidEvaluation(format!(
                "self-pair `{a}`-`{b}` is not a valid edge"
            )));
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.0.insert((lo.to_string(), hi.to_string()));
        Ok(())
    }

    /// Build from an iterator of pairs.
    pub fn from_pairs<I, S>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, S)>,
        S: AsRef<str>,
    {
        let mut set = Self::default();
        for (a, b) in pairs {
            set.insert(a.as_ref(), b.as_ref())?;
        }
        Ok(set)
    }

    /// Membership test (argument order irrelevant).
    pub fn contains(&self, a: &str, b: &str) -> bool {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.0.contains(&(lo.to_string(), hi.to_string()))
    }

    /// Number of edges.
    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Whether the set is empty.
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Iterate edges in canonical order.
    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(a, b)| (a.as_str(), b.as_str()))
    }

    fn first_edge_outside(&self, other: &EdgeSet) -> Option<&(String, String)> {
        self.0.iter().find(|e| !other.0.contains(*e))
    }
}

/// The result of testing one pair of groups.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum PairStatus {
    /// The test ran; the outcome carries statistic, p-value, and decision.
    Tested { outcome: TestOutcome },
    /// The method could not run on this pair (dimension preconditions,
    /// degenerate variance, singular blocks); the reason is recorded so the
    /// pair is visibly missing rather than silently absent.
    Unavailable { reason: String },
}

/// One screened pair: canonical names plus status. `low_block` records which
/// group served as the first (low-dimensional) block of the test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub group_a: String,
    pub group_b: String,
    pub low_block: String,
    #[serde(flatten)]
    pub status: PairStatus,
}

/// Results of screening every pair of groups with one method.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScreeningResult {
    pub method: Method,
    pub alpha: f64,
    /// Total number of pairs examined (carried so downstream users can
    /// multiplicity-correct if they wish; the screen itself applies `alpha`
    /// per pair).
    pub pair_count: usize,
    pub pairs: Vec<PairOutcome>,
    /// Pairs whose test rejected.
    pub predicted: EdgeSet,
}

/// Test every unordered pair of groups for dependence.
///
/// Pairs are enumerated in lexicographic name order. For each pair the
/// smaller-width group is used as the first (low-dimensional) block — ties
/// broken toward the lexicographically smaller name — matching the test's
/// intended small-`p1`, large-`p2` orientation. Permutation methods derive a
/// per-pair seed from the plan's, so single-pair results do not depend on
/// which other groups happen to be in the dataset.
///
/// Pairs on which the method cannot run are reported as
/// [`PairStatus::Unavailable`] with the reason; structural errors (which
/// indicate a broken dataset rather than an awkward pair) still abort.
pub fn screen_pairs(
    dataset: &GroupedDataset,
    alpha: f64,
    method: Method,
    plan: &PermutationPlan,
) -> Result<ScreeningResult> {
    validate_alpha(alpha)?;
    if dataset.groups().len() < 2 {
        return Err(Error::InvalidData(
            "screening needs at least 2 groups".into(),
        ));
    }

    let mut order: Vec<&Group> = dataset.groups().iter().collect();
    order.sort_by(|a, b| a.name.cmp(&b.name));
    let mut pairs_idx = Vec::new();
    for i in 0..order.len() {
        for j in (i + 1)..order.len() {
            pairs_idx.push((order[i], order[j]));
        }
    }

    let pairs: Vec<PairOutcome> = pairs_idx
        .par_iter()
        .enumerate()
        .map(|(pair_index, &(ga, gb))| -> Result<PairOutcome> {
            // Smaller width first; ties keep canonical name order.
            let (first, second) = if gb.width < ga.width { (gb, ga) } else { (ga, gb) };
            let left = dataset.group_matrix(first)?;
            let right = dataset.group_matrix(second)?;
            let joint = DataMatrix::new(concatenate(
                ndarray::Axis(1),
                &[left.values().view(), right.values().view()],
            )
            .map_err(|e| Error::InvalidData(e.to_string()))?)?;
            let spec = BlockSpec::new(first.width, second.width)?;

            let attempt = if method.is_permutation() {
                let pair_plan =
                    plan.reseeded(stream_seed(plan.seed(), Stream::Pair, pair_index as u64));
                permutation_pvalue(&joint, &spec, method.statistic(), alpha, &pair_plan)
            } else {
                test_tn(&joint, &spec, alpha)
            };
            let status = match attempt {
                Ok(outcome) => PairStatus::Tested { outcome },
                Err(e) if e.category() == ErrorCategory::Degeneracy => {
                    PairStatus::Unavailable {
                        reason: e.to_string(),
                    }
                }
                Err(e) => return Err(e),
            };
            Ok(PairOutcome {
                group_a: ga.name.clone(),
                group_b: gb.name.clone(),
                low_block: first.name.clone(),
                status,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let mut predicted = EdgeSet::default();
    for p in &pairs {
        if let PairStatus::Tested { outcome } = &p.status {
            if outcome.reject {
                predicted.insert(&p.group_a, &p.group_b)?;
            }
        }
    }

    Ok(ScreeningResult {
        method,
        alpha,
        pair_count: pairs.len(),
        pairs,
        predicted,
    })
}

/// Precision / recall / F-measure of a predicted edge set against a truth
/// edge set within a common universe of candidate edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FScore {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub true_positives: usize,
    pub false_positives: usize,
    pub false_negatives: usize,
}

/// Score `predicted` against `truth`.
///
/// Both sets must be subsets of `universe` (the edges that were actually
/// examinable — typically [`GroupedDataset::all_pairs`]); an edge outside it
/// is an evaluation error naming the edge. `truth` must be non-empty (recall
/// against an empty truth is undefined). Precision of an empty prediction is
/// 0 by convention, and the F-measure is 0 whenever precision and recall are
/// both 0.
pub fn f_score(predicted: &EdgeSet, truth: &EdgeSet, universe: &EdgeSet) -> Result<FScore> {
    if truth.is_empty() {
        return Err(Error::InvalidEvaluation(
            "truth edge set is empty; recall is undefined".into(),
        ));
    }
    if let Some((a, b)) = truth.first_edge_outside(universe) {
        return Err(Error::InvalidEvaluation(format!(
            "truth edge `{a}`-`{b}` is outside the candidate universe"
        )));
    }
    if let Some((a, b)) = predicted.first_edge_outside(universe) {
        return Err(Error::InvalidEvaluation(format!(
            "predicted edge `{a}`-`{b}` is outside the candidate universe"
        )));
    }
    let tp = predicted.0.intersection(&truth.0).count();
    let fp = predicted.len() - tp;
    let fn_ = truth.len() - tp;
    let precision = if predicted.is_empty() {
        0.0
    } else {
        tp as f64 / (tp + fp) as f64
    };
    let recall = tp as f64 / (tp + fn_) as f64;
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    Ok(FScore {
        precision,
        recall,
        f1,
        true_positives: tp,
        false_positives: fp,
        false_negatives: fn_,
    })
}
