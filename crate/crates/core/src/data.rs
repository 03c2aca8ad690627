//! Validated input containers: observation matrices and block layouts.

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An `N x p` matrix of joint observations: `N` rows (observations) over `p`
/// columns (variables). Construction validates shape and finiteness once, so
/// downstream code can assume a well-formed matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DataMatrix {
    values: Array2<f64>,
}

impl DataMatrix {
    /// Wrap a raw matrix, requiring at least 2 rows, at least 1 column, and
    /// all entries finite. Errors name the first offending entry (1-based).
    pub fn new(values: Array2<f64>) -> Result<Self> {
        let (n_obs, p) = values.dim();
        if p == 0 {
            return Err(Error::InvalidData(
                "observation matrix has no columns".into(),
            ));
        }
        if n_obs < 2 {
            return Err(Error::InsufficientObservations {
                message: "an observation matrix needs at least 2 rows".into(),
                got: n_obs,
            });
        }
        for ((i, j), &v) in values.indexed_iter() {
            if !v.is_finite() {
                return Err(Error::InvalidValue {
                    row: i + 1,
                    column: j + 1,
                    message: format!("not a finite number (got {v})"),
                });
            }
        }
        Ok(Self { values })
    }

    /// Build from a flat row-major buffer.
    pub fn from_rows(n_obs: usize, p: usize, flat: Vec<f64>) -> Result<Self> {
        let expected = n_obs.checked_mul(p).ok_or_else(|| {
            Error::InvalidData(format!("matrix shape {n_obs} x {p} overflows"))
        })?;
        if flat.len() != expected {
            return Err(Error::InvalidData(format!(
                "buffer of length {} cannot fill a {n_obs} x {p} matrix",
                flat.len()
            )));
        }
        let values = Array2::from_shape_vec((n_obs, p), flat)
            .map_err(|e| Error::InvalidData(e.to_string()))?;
        Self::new(values)
    }

    /// Number of observations (rows).
    pub fn n_observations(&self) -> usize {
        self.values.nrows()
    }

    /// Number of variables (columns).
    pub fn n_variables(&self) -> usize {
        self.values.ncols()
    }

    /// Borrow the underlying matrix.
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    /// Select a contiguous span of columns `[start, start + width)` as a new
    /// matrix (used to carve group sub-matrices out of a wider dataset).
    pub fn select_columns(&self, start: usize, width: usize) -> Result<Self> {
        let p = self.n_variables();
        let end = start.checked_add(width).filter(|&e| e <= p).ok_or_else(|| {
            Error::InvalidBlockSpec(format!(
                "column span [{start}, {start}+{width}) exceeds the {p} available columns"
            ))
        })?;
        if width == 0 {
            return Err(Error::InvalidBlockSpec("column span is empty".into()));
        }
        let values = self.values.slice(ndarray::s![.., start..end]).to_owned();
        // Entries were validated at construction; re-wrap directly.
        Ok(Self { values })
    }
}

/// Splits the `p = p1 + p2` columns of a joint observation matrix into a
/// first block of `p1` variables and a second block of `p2` variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockSpec {
    p1: usize,
    p2: usize,
}

impl BlockSpec {
    /// Both block widths must be at least 1.
    pub fn new(p1: usize, p2: usize) -> Result<Self> {
        if p1 == 0 || p2 == 0 {
            return Err(Error::InvalidBlockSpec(format!(
                "both block widths must be positive (got p1 = {p1}, p2 = {p2})"
            )));
        }
        Ok(Self { p1, p2 })
    }

    /// Width of the first block.
    pub fn p1(&self) -> usize {
        self.p1
    }

    /// Width of the second block.
    pub fn p2(&self) -> usize {
        self.p2
    }

    /// Total number of variables covered.
    pub fn total(&self) -> usize {
        self.p1 + self.p2
    }

    /// Check that this split exactly covers a matrix with `p` columns.
    pub fn check_covers(&self, p: usize) -> Result<()> {
        if self.total() != p {
            return Err(Error::InvalidBlockSpec(format!(
                "block widths {} + {} do not cover the {} columns of the data",
                self.p1, self.p2, p
            )));
        }
        Ok(())
    }
}
