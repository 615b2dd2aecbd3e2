//! Gaussian and contact pseudopotentials in the relative-motion basis.
//!
//! Lengths passed to [`coupling_matrix`] and [`delta_coupling_vector`] are in
//! internal units: the mean oscillator length `sqrt(hbar / (mu omega_bar))`.

use std::f64::consts::PI;

use faer::Mat;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::motional_basis::{BasisSet, ModeIndex, TrapFrequencies};
use crate::overlap::OverlapTable;
use crate::spin_channels::ScatteringLengths;
use crate::units::OscillatorUnits;

/// Normalised Gaussian `exp(-r^2 / (2 w^2)) / (2 pi w^2)^(3/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianPotential {
    width: f64,
}

impl GaussianPotential {
    pub fn new(width: f64) -> Result<Self> {
        if !(width.is_finite() && width > 0.0) {
            return Err(Error::input(format!("Gaussian width must be positive, got {width}")));
        }
        Ok(Self { width })
    }

    /// Width given in Bohr radii, converted to internal units.
    pub fn from_bohr(width_bohr: f64, units: &OscillatorUnits) -> Result<Self> {
        Self::new(units.length_from_bohr(width_bohr))
    }

    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn normalization(&self) -> f64 {
        (2.0 * PI * self.width * self.width).powf(-1.5)
    }
}

/// Width whose Born cross section matches the contact potential at low
/// energy, `w^2 = sum a_F^4 / sum a_F^2`, in the units of `lengths`.
pub fn gaussian_width(lengths: &ScatteringLengths) -> Result<f64> {
    let a = lengths.as_array();
    let a2: f64 = a.iter().map(|x| x * x).sum();
    if !(a2.is_finite() && a2 > 0.0) {
        return Err(Error::input("Gaussian width needs at least one nonzero scattering length"));
    }
    let a4: f64 = a.iter().map(|x| x.powi(4)).sum();
    Ok((a4 / a2).sqrt())
}

/// Symmetric mode-coupling matrix of a pseudopotential over a basis.
#[derive(Debug, Clone)]
pub struct CouplingMatrix {
    matrix: Mat<f64>,
    /// Oscillator length per axis.
    pub sigma: [f64; 3],
    /// `alpha_i` with `2 alpha_i^2 = 1 + sigma_i^2 / (2 w^2)`; absent for the
    /// contact backend.
    pub alpha: Option<[f64; 3]>,
}

impl CouplingMatrix {
    pub fn from_matrix(matrix: Mat<f64>, sigma: [f64; 3], alpha: Option<[f64; 3]>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::DimensionMismatch {
                expected: matrix.nrows(),
                found: matrix.ncols(),
            });
        }
        Ok(Self { matrix, sigma, alpha })
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.matrix[(i, j)]
    }

    /// Root-mean-square over all entries.
    pub fn rms(&self) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for j in 0..n {
            for i in 0..n {
                acc += self.matrix[(i, j)].powi(2);
            }
        }
        (acc / (n * n) as f64).sqrt()
    }
}

/// Gaussian coupling matrix `T = I_x I_y I_z / (2 pi w^2)^(3/2)`, built from
/// per-axis overlap tables.
pub fn coupling_matrix(basis: &BasisSet, trap: &TrapFrequencies, pot: &GaussianPotential) -> Result<CouplingMatrix> {
    if basis.is_empty() {
        return Err(Error::input("coupling matrix needs a nonempty basis"));
    }
    let sigma = trap.relative_lengths();
    let w = pot.width();
    let max_q = basis.max_quanta();
    let tables = [
        OverlapTable::new(max_q[0], sigma[0], w)?,
        OverlapTable::new(max_q[1], sigma[1], w)?,
        OverlapTable::new(max_q[2], sigma[2], w)?,
    ];
    let norm = pot.normalization();
    let modes = basis.modes();
    let n = modes.len();
    let rows: Vec<Vec<f64>> = modes
        .par_iter()
        .map(|a| {
            modes
                .iter()
                .map(|b| {
                    tables[0].get(a.nx, b.nx) * tables[1].get(a.ny, b.ny) * tables[2].get(a.nz, b.nz) * norm
                })
                .collect()
        })
        .collect();
    for (i, row) in rows.iter().enumerate() {
        if let Some(j) = row.iter().position(|v| !v.is_finite()) {
            return Err(Error::numeric(format!(
                "coupling matrix entry between {} and {} is not finite",
                modes[i], modes[j]
            )));
        }
    }
    let matrix = Mat::from_fn(n, n, |i, j| rows[i][j]);
    let alpha = sigma.map(|s| (0.5 * (1.0 + s * s / (2.0 * w * w))).sqrt());
    CouplingMatrix::from_matrix(matrix, sigma, Some(alpha))
}

/// `phi_n(0)` of a unit-length oscillator eigenfunction,
/// `(-1)^(n/2) sqrt(n!) / (2^(n/2) (n/2)!) / pi^(1/4)` for even `n`.
pub fn oscillator_at_origin(n: u32) -> f64 {
    if n % 2 == 1 {
        return 0.0;
    }
    let mut v = PI.powf(-0.25);
    for j in 0..n / 2 {
        v *= -((2 * j + 1) as f64 / (2 * j + 2) as f64).sqrt();
    }
    v
}

/// Contact-potential couplings `phi_n(0)` of every basis mode.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeltaCouplingVector {
    pub values: Vec<f64>,
}

impl DeltaCouplingVector {
    /// Rank-one coupling matrix `phi phi^T`.
    pub fn outer(&self, sigma: [f64; 3]) -> CouplingMatrix {
        let v = &self.values;
        let matrix = Mat::from_fn(v.len(), v.len(), |i, j| v[i] * v[j]);
        CouplingMatrix {
            matrix,
            sigma,
            alpha: None,
        }
    }
}

pub fn mode_at_origin(mode: &ModeIndex, sigma: &[f64; 3]) -> f64 {
    mode.as_array()
        .iter()
        .zip(sigma)
        .map(|(&n, s)| oscillator_at_origin(n) / s.sqrt())
        .product()
}

pub fn delta_coupling_vector(basis: &BasisSet, trap: &TrapFrequencies) -> Result<DeltaCouplingVector> {
    if basis.is_empty() {
        return Err(Error::input("contact coupling needs a nonempty basis"));
    }
    let sigma = trap.relative_lengths();
    Ok(DeltaCouplingVector {
        values: basis.modes().iter().map(|m| mode_at_origin(m, &sigma)).collect(),
    })
}

/// Interaction model used for the mode couplings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CouplingBackend {
    Gaussian(GaussianPotential),
    Delta,
}

/// Coupling matrix for either backend.
pub fn backend_matrix(basis: &BasisSet, backend: &CouplingBackend) -> Result<CouplingMatrix> {
    let trap = basis.trap();
    match backend {
        CouplingBackend::Gaussian(pot) => coupling_matrix(basis, trap, pot),
        CouplingBackend::Delta => Ok(delta_coupling_vector(basis, trap)?.outer(trap.relative_lengths())),
    }
}

/// Model whose Born cross section is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrossSectionModel {
    Gaussian { width: f64 },
    Delta,
}

/// Total Born cross section summed over the three channels, in the square
/// of the length unit of `lengths` (with `k` in its inverse).
pub fn total_cross_section(k: f64, lengths: &ScatteringLengths, model: CrossSectionModel) -> Result<f64> {
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::input(format!("wavenumber must be nonnegative, got {k}")));
    }
    let channel = |a: f64| -> f64 {
        let low = 8.0 * PI * a * a;
        match model {
            CrossSectionModel::Gaussian { width } => {
                let x = 2.0 * width * width * k * k;
                if x == 0.0 {
                    low
                } else {
                    low * -(-x).exp_m1() / x
                }
            }
            CrossSectionModel::Delta => low / (1.0 + k * k * a * a),
        }
    };
    Ok(lengths.as_array().iter().map(|&a| channel(a)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::motional_basis::enumerate_basis;
    use approx::assert_relative_eq;

    #[test]
    fn width_examples() {
        let w = gaussian_width(&ScatteringLengths::rb85()).unwrap();
        assert!((w - 646.8).abs() < 1.0, "{w}");
        let w = gaussian_width(&ScatteringLengths::new(-3.0, -3.0, -3.0).unwrap()).unwrap();
        assert_relative_eq!(w, 3.0, max_relative = 1e-15);
        let lengths = ScatteringLengths {
            a0: 1.0,
            a2: 0.0,
            a4: 0.0,
        };
        assert_eq!(gaussian_width(&lengths).unwrap(), 1.0);
        let zero = ScatteringLengths {
            a0: 0.0,
            a2: 0.0,
            a4: 0.0,
        };
        assert!(gaussian_width(&zero).is_err());
    }

    #[test]
    fn origin_values() {
        assert_relative_eq!(oscillator_at_origin(0), PI.powf(-0.25), max_relative = 1e-15);
        // H_2(0) = -2 gives phi_2(0) = -phi_0(0) / sqrt 2
        assert_relative_eq!(oscillator_at_origin(2), -PI.powf(-0.25) / 2f64.sqrt(), max_relative = 1e-15);
        assert_eq!(oscillator_at_origin(3), 0.0);
    }

    #[test]
    fn single_mode_gaussian() {
        let trap = TrapFrequencies::new(1.0, 2.0, 3.0).unwrap();
        let basis = enumerate_basis(&trap, 0.5 * trap.relative().iter().sum::<f64>()).unwrap();
        let pot = GaussianPotential::new(0.3).unwrap();
        let t = coupling_matrix(&basis, &trap, &pot).unwrap();
        let alpha = t.alpha.unwrap();
        let expected: f64 = alpha.iter().map(|a| 1.0 / (2f64.sqrt() * a)).product::<f64>() * pot.normalization();
        assert_eq!(t.dim(), 1);
        assert_relative_eq!(t.get(0, 0), expected, max_relative = 1e-14);
    }

    #[test]
    fn cross_sections_at_zero() {
        let l = ScatteringLengths::rb85();
        let expected = 8.0 * PI * l.as_array().iter().map(|a| a * a).sum::<f64>();
        let w = gaussian_width(&l).unwrap();
        assert_eq!(total_cross_section(0.0, &l, CrossSectionModel::Delta).unwrap(), expected);
        assert_eq!(total_cross_section(0.0, &l, CrossSectionModel::Gaussian { width: w }).unwrap(), expected);
        let k = 1e-3 / w;
        let g = total_cross_section(k, &l, CrossSectionModel::Gaussian { width: w }).unwrap();
        let d = total_cross_section(k, &l, CrossSectionModel::Delta).unwrap();
        assert!((g / d - 1.0).abs() < 1e-6);
    }
}
