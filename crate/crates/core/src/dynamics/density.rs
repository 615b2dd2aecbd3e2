use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::spectrum::{symmetric_eigen, SpinMotionState};
use super::thermal::ThermalEnsemble;
use crate::error::{Error, Result};

use faer::Mat;

/// Two-atom spin states spanning the reduced density matrix, in order.
pub const SPIN_LABELS: [&str; 5] = ["|0,0>", "|-1,1>", "|1,-1>", "|-2,2>", "|2,-2>"];

/// Trace tolerance when assembling from simulated blocks.
pub const TRACE_TOLERANCE: f64 = 1e-6;

/// Spin density matrix with the motion traced out, over
/// `(|0,0>, |-1,1>, |1,-1>, |-2,2>, |2,-2>)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReducedDensityMatrix {
    pub entries: [[Complex64; 5]; 5],
    /// Block coefficients `rho_ij`, `i, j` in `0..3`.
    pub blocks: [[Complex64; 3]; 3],
}

/// Sector selected by postselection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sector {
    /// Atoms in `m = +1` and `m = -1`.
    PlusMinusOne,
    /// Atoms in `m = +2` and `m = -2`.
    PlusMinusTwo,
}

impl Sector {
    fn indices(self) -> [usize; 2] {
        match self {
            Sector::PlusMinusOne => [1, 2],
            Sector::PlusMinusTwo => [3, 4],
        }
    }
}

/// Outcome of postselecting on a sector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Postselection {
    pub probability: f64,
    /// Fidelity of the renormalised sector with the symmetric Bell state;
    /// `None` when the sector is empty.
    pub fidelity: Option<f64>,
}

fn expand(blocks: &[[Complex64; 3]; 3]) -> [[Complex64; 5]; 5] {
    // spin block of each reduced basis state and its amplitude factor
    let owner = [0usize, 1, 1, 2, 2];
    let factor = [1.0, std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2];
    let mut out = [[Complex64::new(0.0, 0.0); 5]; 5];
    for a in 0..5 {
        for b in 0..5 {
            out[a][b] = blocks[owner[a]][owner[b]] * (factor[a] * factor[b]);
        }
    }
    out
}

impl ReducedDensityMatrix {
    /// Assembles from the block coefficients `rho_ij`.
    pub fn from_blocks(blocks: [[Complex64; 3]; 3], tolerance: f64) -> Result<Self> {
        let rho = Self {
            entries: expand(&blocks),
            blocks,
        };
        let trace = rho.trace();
        if (trace - 1.0).abs() > tolerance {
            return Err(Error::numeric(format!("reduced density matrix trace is {trace}")));
        }
        Ok(rho)
    }

    /// Reduced density matrix of a pure spin-motion state.
    pub fn from_state(state: &SpinMotionState) -> Result<Self> {
        let mut blocks = [[Complex64::new(0.0, 0.0); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                blocks[i][j] = state.blocks[i]
                    .iter()
                    .zip(&state.blocks[j])
                    .map(|(a, b)| a * b.conj())
                    .sum();
            }
        }
        Self::from_blocks(blocks, TRACE_TOLERANCE)
    }

    /// Wraps an explicit 5x5 matrix, which must already follow the
    /// symmetric block pattern.
    pub fn from_matrix(entries: [[Complex64; 5]; 5], tolerance: f64) -> Result<Self> {
        let r2 = std::f64::consts::SQRT_2;
        let blocks = [
            [entries[0][0], entries[0][1] * r2, entries[0][3] * r2],
            [entries[1][0] * r2, entries[1][1] * 2.0, entries[1][3] * 2.0],
            [entries[3][0] * r2, entries[3][1] * 2.0, entries[3][3] * 2.0],
        ];
        let rho = Self { entries, blocks };
        let trace = rho.trace();
        if (trace - 1.0).abs() > tolerance {
            return Err(Error::numeric(format!("reduced density matrix trace is {trace}")));
        }
        Ok(rho)
    }

    pub fn trace(&self) -> f64 {
        (0..5).map(|i| self.entries[i][i].re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let mut worst = 0.0f64;
        for a in 0..5 {
            for b in 0..5 {
                worst = worst.max((self.entries[a][b] - self.entries[b][a].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitian matrix, via its real 10x10 embedding.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let m = Mat::from_fn(10, 10, |i, j| {
            let z = self.entries[i % 5][j % 5];
            match (i / 5, j / 5) {
                (0, 0) | (1, 1) => z.re,
                (0, 1) => -z.im,
                _ => z.im,
            }
        });
        let (values, _) = symmetric_eigen(m.as_ref())?;
        // each eigenvalue appears twice in the embedding
        Ok(values.chunks(2).map(|c| 0.5 * (c[0] + c[1])).collect())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self.eigenvalues()?.into_iter().fold(f64::INFINITY, f64::min))
    }

    /// Largest deviation among the four entries of each symmetric sector.
    pub fn sector_spread(&self) -> f64 {
        let mut worst = 0.0f64;
        for [a, b] in [Sector::PlusMinusOne.indices(), Sector::PlusMinusTwo.indices()] {
            let reference = self.entries[a][a];
            for z in [self.entries[a][b], self.entries[b][a], self.entries[b][b]] {
                worst = worst.max((z - reference).norm());
            }
        }
        worst
    }
}

/// Probability of a sector and the fidelity of the renormalised sector
/// with `(|m,-m> + |-m,m>) / sqrt 2`.
pub fn postselect_entangled(rho: &ReducedDensityMatrix, sector: Sector) -> Postselection {
    let [a, b] = sector.indices();
    let e = &rho.entries;
    let probability = e[a][a].re + e[b][b].re;
    if probability <= 0.0 {
        return Postselection {
            probability: probability.max(0.0),
            fidelity: None,
        };
    }
    let overlap = 0.5 * (e[a][a] + e[a][b] + e[b][a] + e[b][b]).re;
    Postselection {
        probability,
        fidelity: Some(overlap / probability),
    }
}

/// Reduced density matrix of a thermal ensemble at each time (seconds).
pub fn reduced_density_matrix(ensemble: &ThermalEnsemble<'_>, times: &[f64]) -> Result<Vec<ReducedDensityMatrix>> {
    ensemble
        .coherences(times)?
        .into_iter()
        .map(|blocks| ReducedDensityMatrix::from_blocks(blocks, TRACE_TOLERANCE))
        .collect()
}
