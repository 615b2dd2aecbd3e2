use faer::Mat;

use crate::error::{Error, Result};
use crate::motional_basis::BasisSet;
use crate::pseudopotential::CouplingMatrix;
use crate::spin_channels::SpinBlockMatrix;
use crate::units::ZeemanShifts;

use std::f64::consts::PI;

/// Spin-motion Hamiltonian over `[spin 0 | spin 1 | spin 2] x modes`, in
/// units of `hbar * omega_bar`.
#[derive(Debug, Clone)]
pub struct HamiltonianMatrix {
    matrix: Mat<f64>,
    n_modes: usize,
    /// Bias field, gauss.
    pub b_field: f64,
    pub zeeman: ZeemanShifts,
    /// Zeeman offsets of blocks 1 and 2 in units of `hbar * omega_bar`.
    pub offsets: [f64; 2],
    /// Geometric-mean trap frequency, rad/s.
    pub omega_bar: f64,
}

impl HamiltonianMatrix {
    pub fn matrix(&self) -> &Mat<f64> {
        &self.matrix
    }

    pub fn n_modes(&self) -> usize {
        self.n_modes
    }

    pub fn dim(&self) -> usize {
        3 * self.n_modes
    }

    /// Largest `|H - H^T|`; zero by construction.
    pub fn asymmetry(&self) -> f64 {
        let n = self.dim();
        let mut worst = 0.0f64;
        for j in 0..n {
            for i in 0..j {
                worst = worst.max((self.matrix[(i, j)] - self.matrix[(j, i)]).abs());
            }
        }
        worst
    }

    /// Spin-0 diagonal block `diag(e) + g00_00 T`.
    pub fn spin0_block(&self) -> Mat<f64> {
        let n = self.n_modes;
        Mat::from_fn(n, n, |i, j| self.matrix[(i, j)])
    }

    /// Converts seconds to internal time.
    pub fn internal_time(&self, seconds: f64) -> f64 {
        seconds * self.omega_bar
    }
}

/// Zeeman offsets `h q B^2` of the two excited spin blocks in units of
/// `hbar * omega_bar`.
pub fn zeeman_offsets(zeeman: &ZeemanShifts, b_gauss: f64, omega_bar: f64) -> [f64; 2] {
    let (f1, f2) = zeeman.frequencies_hz(b_gauss);
    [2.0 * PI * f1 / omega_bar, 2.0 * PI * f2 / omega_bar]
}

/// Assembles the Hamiltonian with the default rubidium-85 Zeeman
/// coefficients.
pub fn assemble_hamiltonian(
    basis: &BasisSet,
    coupling: &CouplingMatrix,
    spin: &SpinBlockMatrix,
    b_gauss: f64,
) -> Result<HamiltonianMatrix> {
    assemble_hamiltonian_with(basis, coupling, spin, b_gauss, &ZeemanShifts::default())
}

pub fn assemble_hamiltonian_with(
    basis: &BasisSet,
    coupling: &CouplingMatrix,
    spin: &SpinBlockMatrix,
    b_gauss: f64,
    zeeman: &ZeemanShifts,
) -> Result<HamiltonianMatrix> {
    let n = basis.len();
    if coupling.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: coupling.dim(),
        });
    }
    if !(b_gauss.is_finite() && b_gauss >= 0.0) {
        return Err(Error::input(format!("bias field must be nonnegative, got {b_gauss} G")));
    }
    if !spin.is_symmetric() {
        return Err(Error::input("spin block matrix is not symmetric"));
    }
    let omega_bar = basis.trap().omega_bar();
    let offsets = zeeman_offsets(zeeman, b_gauss, omega_bar);
    let diag_offset = [0.0, offsets[0], offsets[1]];
    let t = coupling.matrix();
    let energies = basis.energies();
    let dim = 3 * n;
    let mut h = Mat::<f64>::zeros(dim, dim);
    for sj in 0..3 {
        for si in sj..3 {
            let g = spin.entry(si, sj);
            for j in 0..n {
                let col = sj * n + j;
                let i_start = if si == sj { j } else { 0 };
                for i in i_start..n {
                    let row = si * n + i;
                    let mut v = g * t[(i, j)];
                    if row == col {
                        v += energies[i] + diag_offset[si];
                    }
                    h[(row, col)] = v;
                    h[(col, row)] = v;
                }
            }
        }
    }
    Ok(HamiltonianMatrix {
        matrix: h,
        n_modes: n,
        b_field: b_gauss,
        zeeman: *zeeman,
        offsets,
        omega_bar,
    })
}
