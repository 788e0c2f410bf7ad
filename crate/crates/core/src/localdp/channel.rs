use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::neumaier_sum;

const ROW_TOL: f64 = 1e-12;

/// Row-stochastic matrix `Q(y|x)`, `x` indexing rows.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawChannel", into = "RawChannel")]
pub struct Channel {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct RawChannel {
    matrix: Vec<Vec<f64>>,
}

impl TryFrom<RawChannel> for Channel {
    type Error = Error;
    fn try_from(r: RawChannel) -> Result<Self> {
        Channel::new(r.matrix)
    }
}

impl From<Channel> for RawChannel {
    fn from(c: Channel) -> Self {
        RawChannel { matrix: c.to_rows() }
    }
}

impl Channel {
    /// Rows must share a length, be non-negative and sum to 1 within
    /// `1e-12`.
    pub fn new(matrix: Vec<Vec<f64>>) -> Result<Self> {
        Self::check_shape(&matrix, ROW_TOL)?;
        Ok(Self::from_rows_unchecked(matrix))
    }

    /// Accepts rows summing to 1 within `tol` and rescales them.
    pub fn normalized(matrix: Vec<Vec<f64>>, tol: f64) -> Result<Self> {
        Self::check_shape(&matrix, tol)?;
        let rows = matrix
            .into_iter()
            .map(|r| {
                let s = neumaier_sum(r.iter().copied());
                r.into_iter().map(|v| v / s).collect()
            })
            .collect();
        Ok(Self::from_rows_unchecked(rows))
    }

    fn check_shape(matrix: &[Vec<f64>], tol: f64) -> Result<()> {
        if matrix.is_empty() || matrix[0].is_empty() {
            return Err(Error::Validation("channel matrix is empty".into()));
        }
        let cols = matrix[0].len();
        for (x, r) in matrix.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::Validation(format!("row {x} has {} entries, expected {cols}", r.len())));
            }
            if r.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::Validation(format!("row {x} has a negative or non-finite entry")));
            }
            let s = neumaier_sum(r.iter().copied());
            if (s - 1.0).abs() > tol {
                return Err(Error::Validation(format!("row {x} sums to {s}, not 1")));
            }
        }
        Ok(())
    }

    pub(crate) fn from_rows_unchecked(matrix: Vec<Vec<f64>>) -> Self {
        let rows = matrix.len();
        let cols = matrix[0].len();
        Channel {
            rows,
            cols,
            data: matrix.into_iter().flatten().collect(),
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.cols..(x + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|x| self.row(x).to_vec()).collect()
    }

    /// Appends an erasure output of probability `alpha` to every row.
    pub fn erase(&self, alpha: f64) -> Self {
        let rows = (0..self.rows)
            .map(|x| {
                self.row(x)
                    .iter()
                    .map(|v| (1.0 - alpha) * v)
                    .chain(std::iter::once(alpha))
                    .collect()
            })
            .collect();
        Self::from_rows_unchecked(rows)
    }
}
