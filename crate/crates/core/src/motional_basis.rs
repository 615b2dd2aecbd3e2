//! Relative-motion eigenbasis of the anisotropic harmonic trap.
//!
//! Energies are expressed in units of `hbar * omega_bar`, where `omega_bar`
//! is the geometric mean of the three trap frequencies. Only modes with
//! `nx + ny + nz` even survive exchange symmetrisation of the pair.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{OscillatorUnits, BOLTZMANN, HBAR};

/// Hard limit on enumerated modes while searching for a capture cutoff.
pub const MAX_ENUMERATED_MODES: usize = 20_000_000;

/// Trap angular frequencies, rad/s.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrapFrequencies {
    pub wx: f64,
    pub wy: f64,
    pub wz: f64,
}

impl TrapFrequencies {
    pub fn new(wx: f64, wy: f64, wz: f64) -> Result<Self> {
        for (axis, w) in ["x", "y", "z"].iter().zip([wx, wy, wz]) {
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::input(format!(
                    "trap frequency along {axis} must be positive and finite, got {w}"
                )));
            }
        }
        Ok(Self { wx, wy, wz })
    }

    /// Builds from cyclic frequencies in kHz.
    pub fn from_khz(fx: f64, fy: f64, fz: f64) -> Result<Self> {
        let k = 2.0 * PI * 1.0e3;
        Self::new(k * fx, k * fy, k * fz)
    }

    pub fn isotropic(w: f64) -> Result<Self> {
        Self::new(w, w, w)
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.wx, self.wy, self.wz]
    }

    /// Geometric mean frequency.
    pub fn omega_bar(&self) -> f64 {
        (self.wx * self.wy * self.wz).cbrt()
    }

    /// Frequencies in units of `omega_bar`.
    pub fn relative(&self) -> [f64; 3] {
        let w = self.omega_bar();
        self.as_array().map(|x| x / w)
    }

    /// Oscillator lengths per axis, in units of the mean oscillator length.
    pub fn relative_lengths(&self) -> [f64; 3] {
        self.relative().map(|r| 1.0 / r.sqrt())
    }

    /// Internal units for a rubidium-85 pair in this trap.
    pub fn rb85_units(&self) -> OscillatorUnits {
        OscillatorUnits::rb85_pair(self.omega_bar())
    }

    /// `hbar omega_bar / (k_B T)`.
    pub fn beta(&self, kelvin: f64) -> Result<f64> {
        if !(kelvin.is_finite() && kelvin > 0.0) {
            return Err(Error::input(format!(
                "temperature must be positive and finite, got {kelvin} K"
            )));
        }
        Ok(HBAR * self.omega_bar() / (BOLTZMANN * kelvin))
    }
}

/// Harmonic-oscillator quantum numbers of the relative motion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ModeIndex {
    pub nx: u32,
    pub ny: u32,
    pub nz: u32,
}

impl ModeIndex {
    pub const GROUND: ModeIndex = ModeIndex { nx: 0, ny: 0, nz: 0 };

    pub fn new(nx: u32, ny: u32, nz: u32) -> Self {
        Self { nx, ny, nz }
    }

    pub fn as_array(&self) -> [u32; 3] {
        [self.nx, self.ny, self.nz]
    }

    pub fn is_exchange_even(&self) -> bool {
        (self.nx + self.ny + self.nz) % 2 == 0
    }

    /// Parity class as a bitmask, bit `i` set when axis `i` is odd.
    pub fn parity_class(&self) -> u8 {
        (self.nx % 2) as u8 | ((self.ny % 2) as u8) << 1 | ((self.nz % 2) as u8) << 2
    }

    /// True for the exchange-even classes with exactly two odd axes.
    pub fn is_mixed_parity(&self) -> bool {
        self.is_exchange_even() && self.parity_class() != 0
    }
}

impl std::fmt::Display for ModeIndex {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{})", self.nx, self.ny, self.nz)
    }
}

fn energy_relative(n: &ModeIndex, rel: &[f64; 3]) -> f64 {
    rel[0] * (n.nx as f64 + 0.5) + rel[1] * (n.ny as f64 + 0.5) + rel[2] * (n.nz as f64 + 0.5)
}

/// Mode energy in units of `hbar * omega_bar`.
pub fn mode_energy(n: &ModeIndex, trap: &TrapFrequencies) -> f64 {
    energy_relative(n, &trap.relative())
}

/// Ordered set of exchange-even modes below an energy cutoff.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BasisSet {
    modes: Vec<ModeIndex>,
    energies: Vec<f64>,
    cutoff: f64,
    trap: TrapFrequencies,
}

impl BasisSet {
    pub fn len(&self) -> usize {
        self.modes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.modes.is_empty()
    }

    pub fn modes(&self) -> &[ModeIndex] {
        &self.modes
    }

    /// Energies in units of `hbar * omega_bar`, aligned with `modes`.
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn trap(&self) -> &TrapFrequencies {
        &self.trap
    }

    pub fn position(&self, mode: &ModeIndex) -> Option<usize> {
        self.modes.iter().position(|m| m == mode)
    }

    /// Largest quantum number per axis.
    pub fn max_quanta(&self) -> [u32; 3] {
        self.modes.iter().fold([0; 3], |acc, m| {
            [acc[0].max(m.nx), acc[1].max(m.ny), acc[2].max(m.nz)]
        })
    }
}

fn sort_modes(modes: &mut [(f64, ModeIndex)]) {
    modes.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
}

fn collect_modes(rel: &[f64; 3], e_cut: f64, limit: usize) -> Result<Vec<(f64, ModeIndex)>> {
    let slack = e_cut * 1e-12;
    let e0 = 0.5 * (rel[0] + rel[1] + rel[2]);
    let mut out = Vec::new();
    let budget = e_cut + slack - e0;
    if budget < 0.0 {
        return Ok(out);
    }
    let nx_max = (budget / rel[0]).floor() as u32;
    for nx in 0..=nx_max {
        let bx = budget - rel[0] * nx as f64;
        let ny_max = (bx / rel[1]).floor() as u32;
        for ny in 0..=ny_max {
            let by = bx - rel[1] * ny as f64;
            let nz_max = (by / rel[2]).floor() as u32;
            let start = (nx + ny) % 2;
            for nz in (start..=nz_max).step_by(2) {
                let mode = ModeIndex { nx, ny, nz };
                let e = energy_relative(&mode, rel);
                if e <= e_cut + slack {
                    if out.len() >= limit {
                        return Err(Error::input(format!(
                            "basis enumeration exceeds {limit} modes at cutoff {e_cut}"
                        )));
                    }
                    out.push((e, mode));
                }
            }
        }
    }
    Ok(out)
}

/// All exchange-even modes with energy at most `e_cut` (units of
/// `hbar * omega_bar`), ordered by energy then lexicographically.
pub fn enumerate_basis(trap: &TrapFrequencies, e_cut: f64) -> Result<BasisSet> {
    if !e_cut.is_finite() {
        return Err(Error::input(format!("cutoff energy must be finite, got {e_cut}")));
    }
    let rel = trap.relative();
    let mut modes = collect_modes(&rel, e_cut, MAX_ENUMERATED_MODES)?;
    if modes.is_empty() {
        return Err(Error::input(format!(
            "cutoff {e_cut} lies below the ground-state energy {}",
            0.5 * rel.iter().sum::<f64>()
        )));
    }
    sort_modes(&mut modes);
    let (energies, modes) = modes.into_iter().unzip();
    Ok(BasisSet {
        modes,
        energies,
        cutoff: e_cut,
        trap: *trap,
    })
}

/// Closed-form partition functions of the exchange-even sector.
///
/// The raw values `z_even`, `z_odd`, `z` underflow at low temperature, so
/// each also carries a ground-shifted counterpart scaled by
/// `exp(beta * e_ground)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PartitionFunctions {
    /// `hbar omega_bar / (k_B T)`.
    pub beta: f64,
    /// `beta * hbar * omega_i` per axis.
    pub x: [f64; 3],
    pub z_even: [f64; 3],
    pub z_odd: [f64; 3],
    pub z: f64,
    /// `z_even * exp(x / 2)` per axis.
    pub z_even_shifted: [f64; 3],
    /// `z_odd * exp(x / 2)` per axis.
    pub z_odd_shifted: [f64; 3],
    /// `z * exp(beta * e_ground)`.
    pub z_shifted: f64,
}

impl PartitionFunctions {
    /// From the dimensionless inverse temperatures `x_i = beta hbar omega_i`.
    pub fn from_axis_betas(beta: f64, x: [f64; 3]) -> Result<Self> {
        for xi in x {
            if !(xi.is_finite() && xi > 0.0) {
                return Err(Error::input(format!("axis inverse temperature must be positive, got {xi}")));
            }
        }
        let denom = x.map(|xi| -(-2.0 * xi).exp_m1());
        let even_s: [f64; 3] = std::array::from_fn(|i| 1.0 / denom[i]);
        let odd_s: [f64; 3] = std::array::from_fn(|i| (-x[i]).exp() / denom[i]);
        let even: [f64; 3] = std::array::from_fn(|i| (-0.5 * x[i]).exp() * even_s[i]);
        let odd: [f64; 3] = std::array::from_fn(|i| (-0.5 * x[i]).exp() * odd_s[i]);
        let combine = |e: &[f64; 3], o: &[f64; 3]| {
            e[0] * e[1] * e[2] + o[0] * o[1] * e[2] + o[0] * e[1] * o[2] + e[0] * o[1] * o[2]
        };
        Ok(Self {
            beta,
            x,
            z_even: even,
            z_odd: odd,
            z: combine(&even, &odd),
            z_even_shifted: even_s,
            z_odd_shifted: odd_s,
            z_shifted: combine(&even_s, &odd_s),
        })
    }

    /// Thermal weight of the three classes with two odd axes.
    pub fn frozen_fraction(&self) -> f64 {
        let (e, o) = (&self.z_even_shifted, &self.z_odd_shifted);
        (o[0] * o[1] * e[2] + o[0] * e[1] * o[2] + e[0] * o[1] * o[2]) / self.z_shifted
    }

    /// Boltzmann probability of a mode with energy `e` above the ground
    /// energy `e_ground` (both in units of `hbar * omega_bar`).
    pub fn probability_from_excitation(&self, excitation: f64) -> f64 {
        (-self.beta * excitation).exp() / self.z_shifted
    }
}

/// Partition functions of the trap at `kelvin`.
pub fn partition_functions(trap: &TrapFrequencies, kelvin: f64) -> Result<PartitionFunctions> {
    let beta = trap.beta(kelvin)?;
    PartitionFunctions::from_axis_betas(beta, trap.relative().map(|r| beta * r))
}

fn ground_energy(trap: &TrapFrequencies) -> f64 {
    mode_energy(&ModeIndex::GROUND, trap)
}

/// Boltzmann probability of an exchange-even mode, normalised over the
/// whole exchange-even space.
pub fn boltzmann_probability(n: &ModeIndex, trap: &TrapFrequencies, kelvin: f64) -> Result<f64> {
    if !n.is_exchange_even() {
        return Err(Error::input(format!("mode {n} is exchange-odd")));
    }
    let pf = partition_functions(trap, kelvin)?;
    Ok(pf.probability_from_excitation(mode_energy(n, trap) - ground_energy(trap)))
}

/// Fraction of the thermal ensemble in classes with two odd axes, which a
/// contact interaction cannot couple to other spin states.
pub fn frozen_fraction(trap: &TrapFrequencies, kelvin: f64) -> Result<f64> {
    Ok(partition_functions(trap, kelvin)?.frozen_fraction())
}

/// How the basis cutoff is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutoffPolicy {
    /// Smallest cutoff whose captured thermal weight reaches the fraction.
    Capture(f64),
    /// Explicit cutoff in units of `hbar * omega_bar`.
    Energy(f64),
    /// Smallest cutoff containing at least this many modes; degenerate
    /// shells are kept whole.
    Modes(usize),
}

impl Default for CutoffPolicy {
    fn default() -> Self {
        CutoffPolicy::Capture(0.999)
    }
}

fn cutoff_for_count(rel: &[f64; 3], count: usize, weight: impl Fn(f64) -> f64, target: f64) -> Result<f64> {
    let e0 = 0.5 * (rel[0] + rel[1] + rel[2]);
    let step = rel.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut e_cut = e0 + 2.0 * step;
    loop {
        let mut modes = collect_modes(rel, e_cut, MAX_ENUMERATED_MODES)?;
        sort_modes(&mut modes);
        let mut acc = 0.0;
        for (i, (e, _)) in modes.iter().enumerate() {
            acc += weight(*e - e0);
            if acc >= target || i + 1 >= count {
                // keep degenerate shells whole
                return Ok(*e);
            }
        }
        e_cut = e0 + 2.0 * (e_cut - e0);
    }
}

/// Resolves a cutoff policy to an energy in units of `hbar * omega_bar`.
pub fn resolve_cutoff(trap: &TrapFrequencies, kelvin: Option<f64>, policy: CutoffPolicy) -> Result<f64> {
    let rel = trap.relative();
    match policy {
        CutoffPolicy::Energy(e) => Ok(e),
        CutoffPolicy::Modes(n) => {
            if n == 0 {
                return Err(Error::input("mode-count cutoff must be at least 1"));
            }
            cutoff_for_count(&rel, n, |_| 0.0, f64::INFINITY)
        }
        CutoffPolicy::Capture(fraction) => {
            if !(fraction > 0.0 && fraction < 1.0) {
                return Err(Error::input(format!("capture fraction must lie in (0, 1), got {fraction}")));
            }
            let kelvin = kelvin.ok_or_else(|| Error::input("capture cutoff needs a temperature"))?;
            let pf = partition_functions(trap, kelvin)?;
            cutoff_for_count(&rel, usize::MAX, |de| pf.probability_from_excitation(de), fraction)
        }
    }
}

/// Boltzmann weights of the basis members at a temperature.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThermalDistribution {
    pub kelvin: f64,
    /// `hbar omega_bar / (k_B T)`.
    pub beta: f64,
    pub partition: PartitionFunctions,
    /// Probability of each basis member, normalised over the full space.
    pub probabilities: Vec<f64>,
    pub captured_weight: f64,
}

impl ThermalDistribution {
    pub fn new(basis: &BasisSet, kelvin: f64) -> Result<Self> {
        let trap = basis.trap();
        let partition = partition_functions(trap, kelvin)?;
        let e0 = ground_energy(trap);
        let probabilities: Vec<f64> = basis
            .energies()
            .iter()
            .map(|e| partition.probability_from_excitation(e - e0))
            .collect();
        let captured_weight = probabilities.iter().sum();
        Ok(Self {
            kelvin,
            beta: partition.beta,
            partition,
            probabilities,
            captured_weight,
        })
    }

    /// Probabilities renormalised to sum to one over the basis.
    pub fn normalized(&self) -> Vec<f64> {
        self.probabilities.iter().map(|p| p / self.captured_weight).collect()
    }
}
