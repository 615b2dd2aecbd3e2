//! Spin-motion Hamiltonian, spectral time evolution, thermal averaging and
//! the reduced spin density matrix.
//!
//! All energies are in units of `hbar * omega_bar`; public time arguments
//! are in seconds.

mod density;
mod hamiltonian;
mod spectrum;
mod thermal;

pub use density::{
    postselect_entangled, reduced_density_matrix, Postselection, ReducedDensityMatrix, Sector, SPIN_LABELS,
    TRACE_TOLERANCE,
};
pub use hamiltonian::{assemble_hamiltonian, assemble_hamiltonian_with, zeeman_offsets, HamiltonianMatrix};
pub use spectrum::{
    evolve, groundstate_energy, groundstate_initial, symmetric_eigen, EvolutionResult, SpinMotionState, Spectrum,
};
pub use thermal::ThermalEnsemble;

use crate::error::Result;
use crate::motional_basis::ThermalDistribution;
use crate::trajectory::PopulationTrajectory;

/// Boltzmann-weighted spin populations of an ensemble started in `|0,0>`.
pub fn thermal_populations(
    spectrum: &Spectrum,
    thermal: &ThermalDistribution,
    times: &[f64],
) -> Result<PopulationTrajectory> {
    ThermalEnsemble::new(spectrum, &thermal.probabilities)?.populations(times)
}
