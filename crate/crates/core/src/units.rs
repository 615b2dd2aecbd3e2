//! Physical constants and the conversion layer between laboratory units
//! (kelvin, hertz, gauss, Bohr radii) and the dimensionless oscillator units
//! used internally, where the reduced mass, the geometric-mean trap frequency
//! and the reduced Planck constant are all one.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

/// Reduced Planck constant, J s.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant, J s.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Boltzmann constant, J/K.
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Bohr radius, m.
pub const BOHR_RADIUS: f64 = 5.291_772_109_03e-11;
/// Atomic mass unit, kg.
pub const ATOMIC_MASS_UNIT: f64 = 1.660_539_066_60e-27;
/// Atomic mass of rubidium-85 in atomic mass units.
pub const RB85_MASS_U: f64 = 84.911_789_738;

/// Mass of a single rubidium-85 atom, kg.
pub fn rb85_mass() -> f64 {
    RB85_MASS_U * ATOMIC_MASS_UNIT
}

/// Quadratic Zeeman coefficients of the two symmetrised pair states
/// relative to `|0,0>`, in Hz/G^2 (cyclic frequency per gauss squared).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeemanShifts {
    pub q1: f64,
    pub q2: f64,
}

impl Default for ZeemanShifts {
    fn default() -> Self {
        Self {
            q1: 143.776,
            q2: 575.104,
        }
    }
}

impl ZeemanShifts {
    /// Shifts `(q1 B^2, q2 B^2)` in Hz for a bias field in gauss.
    pub fn frequencies_hz(&self, b_gauss: f64) -> (f64, f64) {
        let b2 = b_gauss * b_gauss;
        (self.q1 * b2, self.q2 * b2)
    }
}

/// Oscillator units anchored at a reduced mass and a reference angular
/// frequency (normally the geometric mean of the trap frequencies).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OscillatorUnits {
    /// Reduced mass of the pair, kg.
    pub reduced_mass: f64,
    /// Reference angular frequency, rad/s.
    pub omega: f64,
}

impl OscillatorUnits {
    pub fn new(reduced_mass: f64, omega: f64) -> Self {
        Self {
            reduced_mass,
            omega,
        }
    }

    /// Units for a pair of rubidium-85 atoms.
    pub fn rb85_pair(omega: f64) -> Self {
        Self::new(rb85_mass() / 2.0, omega)
    }

    /// Oscillator length `sqrt(hbar / (mu omega))` in metres.
    pub fn length(&self) -> f64 {
        (HBAR / (self.reduced_mass * self.omega)).sqrt()
    }

    /// Energy unit `hbar omega` in joules.
    pub fn energy(&self) -> f64 {
        HBAR * self.omega
    }

    /// Time unit `1 / omega` in seconds.
    pub fn time(&self) -> f64 {
        1.0 / self.omega
    }

    pub fn length_from_bohr(&self, a: f64) -> f64 {
        a * BOHR_RADIUS / self.length()
    }

    pub fn length_to_bohr(&self, x: f64) -> f64 {
        x * self.length() / BOHR_RADIUS
    }

    pub fn seconds_to_internal(&self, t: f64) -> f64 {
        t * self.omega
    }

    pub fn internal_to_seconds(&self, t: f64) -> f64 {
        t / self.omega
    }

    /// `hbar omega / (k_B T)`, the inverse temperature in internal units.
    pub fn beta(&self, kelvin: f64) -> f64 {
        self.energy() / (BOLTZMANN * kelvin)
    }

    /// Converts a cyclic frequency in Hz to an energy `h f` in internal units.
    pub fn energy_from_hz(&self, hz: f64) -> f64 {
        2.0 * PI * hz / self.omega
    }

    /// Coupling `4 pi hbar^2 a / m = 2 pi hbar^2 a / mu` for a scattering length
    /// of one Bohr radius, in units of `hbar omega * length^3`.
    pub fn coupling_per_bohr(&self) -> f64 {
        2.0 * PI * BOHR_RADIUS / self.length()
    }
}

/// Unit system in which spin-channel couplings `g_F` are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum UnitSystem {
    /// `g_F` numerically equal to `a_F` in Bohr radii.
    ScatteringLength,
    /// Dimensionless oscillator units.
    Oscillator(OscillatorUnits),
}

impl UnitSystem {
    pub fn coupling_per_bohr(&self) -> f64 {
        match self {
            UnitSystem::ScatteringLength => 1.0,
            UnitSystem::Oscillator(u) => u.coupling_per_bohr(),
        }
    }
}
