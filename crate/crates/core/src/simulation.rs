//! Convenience layer wiring the modules into a ready-to-run setup.

use serde::{Deserialize, Serialize};

use crate::dynamics::{assemble_hamiltonian_with, HamiltonianMatrix};
use crate::error::{Error, Result};
use crate::motional_basis::{enumerate_basis, resolve_cutoff, BasisSet, CutoffPolicy, ThermalDistribution, TrapFrequencies};
use crate::pseudopotential::{backend_matrix, gaussian_width, CouplingBackend, CouplingMatrix, GaussianPotential};
use crate::spin_channels::{coupling_table, spin_block_matrix, CouplingTable, ScatteringLengths, SpinBlockMatrix};
use crate::units::{OscillatorUnits, UnitSystem, ZeemanShifts};

/// Which pseudopotential provides the mode couplings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendKind {
    #[default]
    Gaussian,
    Delta,
}

impl std::str::FromStr for BackendKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gaussian" => Ok(Self::Gaussian),
            "delta" => Ok(Self::Delta),
            other => Err(Error::input(format!("unknown backend {other:?}; expected gaussian or delta"))),
        }
    }
}

/// Physical inputs of a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub trap: TrapFrequencies,
    pub lengths: ScatteringLengths,
    pub backend: BackendKind,
    pub zeeman: ZeemanShifts,
    pub cutoff: CutoffPolicy,
    /// Ensemble temperature, kelvin.
    pub temperature: f64,
}

impl Scenario {
    /// Rubidium-85 in the `(8.9, 55.5, 56.055)` kHz trap.
    pub fn rb85(temperature: f64) -> Result<Self> {
        Ok(Self {
            trap: TrapFrequencies::from_khz(8.9, 55.5, 56.055)?,
            lengths: ScatteringLengths::rb85(),
            backend: BackendKind::Gaussian,
            zeeman: ZeemanShifts::default(),
            cutoff: CutoffPolicy::default(),
            temperature,
        })
    }

    pub fn units(&self) -> OscillatorUnits {
        self.trap.rb85_units()
    }

    /// Couplings in internal units.
    pub fn coupling_table(&self) -> Result<CouplingTable> {
        coupling_table(&self.lengths, &UnitSystem::Oscillator(self.units()))
    }

    pub fn spin_block(&self) -> Result<SpinBlockMatrix> {
        Ok(spin_block_matrix(&self.coupling_table()?))
    }

    /// Gaussian width in Bohr radii.
    pub fn width_bohr(&self) -> Result<f64> {
        gaussian_width(&self.lengths)
    }

    pub fn coupling_backend(&self) -> Result<CouplingBackend> {
        Ok(match self.backend {
            BackendKind::Gaussian => {
                CouplingBackend::Gaussian(GaussianPotential::from_bohr(self.width_bohr()?, &self.units())?)
            }
            BackendKind::Delta => CouplingBackend::Delta,
        })
    }

    /// Cutoff energy in units of `hbar * omega_bar`.
    pub fn cutoff_energy(&self) -> Result<f64> {
        resolve_cutoff(&self.trap, Some(self.temperature), self.cutoff)
    }

    pub fn basis(&self) -> Result<BasisSet> {
        enumerate_basis(&self.trap, self.cutoff_energy()?)
    }

    /// Builds basis, thermal weights, coupling matrix and spin block.
    pub fn prepare(&self) -> Result<Prepared> {
        let basis = self.basis()?;
        self.prepare_with_basis(basis)
    }

    pub fn prepare_with_basis(&self, basis: BasisSet) -> Result<Prepared> {
        let thermal = ThermalDistribution::new(&basis, self.temperature)?;
        let coupling = backend_matrix(&basis, &self.coupling_backend()?)?;
        Ok(Prepared {
            spin: self.spin_block()?,
            zeeman: self.zeeman,
            basis,
            thermal,
            coupling,
        })
    }
}

/// Field-independent pieces of the Hamiltonian.
#[derive(Debug, Clone)]
pub struct Prepared {
    pub basis: BasisSet,
    pub thermal: ThermalDistribution,
    pub coupling: CouplingMatrix,
    pub spin: SpinBlockMatrix,
    pub zeeman: ZeemanShifts,
}

impl Prepared {
    pub fn hamiltonian(&self, b_gauss: f64) -> Result<HamiltonianMatrix> {
        assemble_hamiltonian_with(&self.basis, &self.coupling, &self.spin, b_gauss, &self.zeeman)
    }

    /// RMS of the `|0,0> <-> S|1,-1>` coupling block, `sqrt2 g00_1m1 T`.
    pub fn rms_exchange_coupling(&self) -> f64 {
        (self.spin.entry(0, 1) * self.coupling.rms()).abs()
    }

    /// Smallest field at which `h q1 B^2` exceeds `factor` times the RMS
    /// exchange coupling.
    pub fn decoupling_field(&self, factor: f64) -> f64 {
        let omega_bar = self.basis.trap().omega_bar();
        let per_g2 = 2.0 * std::f64::consts::PI * self.zeeman.q1 / omega_bar;
        (factor * self.rms_exchange_coupling() / per_g2).sqrt()
    }
}
