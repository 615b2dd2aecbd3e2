//! Two-atom spin-changing collisions of spin-2 atoms in an anisotropic
//! harmonic trap.
//!
//! The crate covers the spin-channel couplings, the exchange-even motional
//! basis with its thermal weights, Gaussian and contact pseudopotentials,
//! spectral time evolution with thermal averaging and the reduced spin
//! density matrix, the incoherent rate model, and the measurement
//! statistics used to quantify number squeezing.

pub mod dynamics;
pub mod error;
mod exact;
pub mod measurement;
pub mod motional_basis;
pub mod overlap;
pub mod pseudopotential;
pub mod rate_model;
pub mod simulation;
pub mod spin_channels;
pub mod trajectory;
pub mod units;

pub use dynamics::{
    assemble_hamiltonian, evolve, groundstate_initial, postselect_entangled, reduced_density_matrix,
    thermal_populations, EvolutionResult, HamiltonianMatrix, ReducedDensityMatrix, Sector, SpinMotionState,
    Spectrum, ThermalEnsemble,
};
pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use measurement::{
    chi_squared_uniformity, detection_variance, squeezing_from_outcomes, DetectionModel, EjectionOutcome,
    SqueezingResult,
};
pub use motional_basis::{
    boltzmann_probability, enumerate_basis, frozen_fraction, mode_energy, partition_functions, BasisSet,
    CutoffPolicy, ModeIndex, ThermalDistribution, TrapFrequencies,
};
pub use overlap::overlap_integral;
pub use pseudopotential::{
    coupling_matrix, delta_coupling_vector, gaussian_width, total_cross_section, CouplingMatrix,
    DeltaCouplingVector, GaussianPotential,
};
pub use rate_model::{fit_rate, rate_ratios, solve_rate_equations, RateParams};
pub use simulation::{BackendKind, Prepared, Scenario};
pub use spin_channels::{
    clebsch_gordan, coupling_coefficient_general, coupling_table, spin_block_matrix, CouplingTable,
    ScatteringLengths, SpinBlockMatrix,
};
pub use trajectory::PopulationTrajectory;
pub use units::{OscillatorUnits, UnitSystem, ZeemanShifts};
