//! Time series of the three pair-state populations.

use serde::{Deserialize, Serialize};

/// Populations of `|0,0>`, `S|1,-1>` and `S|2,-2>` on a time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopulationTrajectory {
    /// Times in seconds.
    pub times: Vec<f64>,
    /// `P_{|0,0>}`.
    pub p00: Vec<f64>,
    /// `P_{S|1,-1>}`.
    pub p1m1: Vec<f64>,
    /// `P_{S|2,-2>}`.
    pub p2m2: Vec<f64>,
    /// Per-point standard errors, when known.
    pub stderr: Option<[Vec<f64>; 3]>,
}

impl PopulationTrajectory {
    pub fn from_rows(times: Vec<f64>, rows: &[[f64; 3]]) -> Self {
        Self {
            times,
            p00: rows.iter().map(|r| r[0]).collect(),
            p1m1: rows.iter().map(|r| r[1]).collect(),
            p2m2: rows.iter().map(|r| r[2]).collect(),
            stderr: None,
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn row(&self, i: usize) -> [f64; 3] {
        [self.p00[i], self.p1m1[i], self.p2m2[i]]
    }

    pub fn series(&self) -> [&[f64]; 3] {
        [&self.p00, &self.p1m1, &self.p2m2]
    }

    /// Largest deviation of the population sum from `total`.
    pub fn max_sum_error(&self, total: f64) -> f64 {
        (0..self.len())
            .map(|i| (self.row(i).iter().sum::<f64>() - total).abs())
            .fold(0.0, f64::max)
    }
}
