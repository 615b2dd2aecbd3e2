//! Spin-channel coupling constants for two spin-2 atoms.
//!
//! Collisions between two `f = 2` atoms proceed through the even total-spin
//! channels `F = 0, 2, 4`, each with its own s-wave scattering length. For a
//! pair starting in `|0,0>` only the magnetisation-zero states are reachable,
//! and the interaction reduces to six distinct couplings between `|0,0>`,
//! `S|1,-1>` and `S|2,-2>`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact;
use crate::units::UnitSystem;

/// Single-atom hyperfine spin.
pub const ATOM_SPIN: i32 = 2;
/// Total-spin channels available to two identical spin-2 bosons.
pub const CHANNELS: [i32; 3] = [0, 2, 4];

/// s-wave scattering lengths of the `F = 0, 2, 4` channels, in Bohr radii.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatteringLengths {
    pub a0: f64,
    pub a2: f64,
    pub a4: f64,
}

/// One-sigma uncertainties of the rubidium-85 scattering lengths, Bohr radii.
pub const RB85_UNCERTAINTIES: [f64; 3] = [60.0, 50.0, 20.0];

impl ScatteringLengths {
    pub fn new(a0: f64, a2: f64, a4: f64) -> Result<Self> {
        let lengths = Self { a0, a2, a4 };
        lengths.validate()?;
        Ok(lengths)
    }

    /// Predicted rubidium-85 values.
    pub fn rb85() -> Self {
        Self {
            a0: -740.0,
            a2: -570.0,
            a4: -390.0,
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.a0, self.a2, self.a4]
    }

    pub fn validate(&self) -> Result<()> {
        for (f, a) in CHANNELS.iter().zip(self.as_array()) {
            if !a.is_finite() || a == 0.0 {
                return Err(Error::input(format!(
                    "scattering length a_{f} must be finite and nonzero, got {a}"
                )));
            }
        }
        Ok(())
    }
}

/// The six distinct couplings `g_{m1,m2}^{m3,m4}` between the
/// magnetisation-zero pair states.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingTable {
    pub g00_00: f64,
    pub g00_1m1: f64,
    pub g00_2m2: f64,
    pub g1m1_1m1: f64,
    pub g1m1_2m2: f64,
    pub g2m2_2m2: f64,
}

impl CouplingTable {
    pub fn zero() -> Self {
        Self {
            g00_00: 0.0,
            g00_1m1: 0.0,
            g00_2m2: 0.0,
            g1m1_1m1: 0.0,
            g1m1_2m2: 0.0,
            g2m2_2m2: 0.0,
        }
    }

    /// Closed forms in terms of the channel couplings `g = (g_0, g_2, g_4)`.
    pub fn from_channel_couplings(g: [f64; 3]) -> Self {
        Self {
            g00_00: closed_form([7.0, 10.0, 18.0], 35.0, g),
            g00_1m1: closed_form([-7.0, -5.0, 12.0], 35.0, g),
            g00_2m2: closed_form([7.0, -10.0, 3.0], 35.0, g),
            g1m1_1m1: closed_form([14.0, 5.0, 16.0], 70.0, g),
            g1m1_2m2: closed_form([-7.0, 5.0, 2.0], 35.0, g),
            g2m2_2m2: closed_form([14.0, 20.0, 1.0], 70.0, g),
        }
    }

    /// Looks up `g_{m,-m}^{m',-m'}` for `m, m'` in `{0, 1, 2}`.
    pub fn get(&self, m: usize, m_prime: usize) -> f64 {
        match (m.min(m_prime), m.max(m_prime)) {
            (0, 0) => self.g00_00,
            (0, 1) => self.g00_1m1,
            (0, 2) => self.g00_2m2,
            (1, 1) => self.g1m1_1m1,
            (1, 2) => self.g1m1_2m2,
            (2, 2) => self.g2m2_2m2,
            _ => panic!("spin index out of range: ({m}, {m_prime})"),
        }
    }
}

/// Interaction in the symmetrised basis `(|0,0>, S|1,-1>, S|2,-2>)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpinBlockMatrix(pub [[f64; 3]; 3]);

impl SpinBlockMatrix {
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        self.0[i][j]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| self.0[i][j] == self.0[j][i]))
    }
}

/// Clebsch-Gordan coefficient `<j1 m1; j2 m2 | J M>` for integer spins, in
/// the Condon-Shortley phase convention.
///
/// Evaluated with the Racah formula in exact integer arithmetic, rounded
/// once at the end.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> Result<f64> {
    if j1 < 0 || j2 < 0 || j < 0 {
        return Err(Error::input(format!(
            "negative angular momentum in <{j1} {m1}; {j2} {m2} | {j} {m}>"
        )));
    }
    if m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return Err(Error::input(format!(
            "projection out of range in <{j1} {m1}; {j2} {m2} | {j} {m}>"
        )));
    }
    if j < (j1 - j2).abs() || j > j1 + j2 {
        return Err(Error::input(format!(
            "triangle condition violated in <{j1} {m1}; {j2} {m2} | {j} {m}>"
        )));
    }
    if m1 + m2 != m {
        return Ok(0.0);
    }

    let f = |n: i32| exact::factorial(n as u32);

    // squared prefactor as an exact ratio
    let num = BigUint::from((2 * j + 1) as u32)
        * f(j + j1 - j2)
        * f(j - j1 + j2)
        * f(j1 + j2 - j)
        * f(j + m)
        * f(j - m)
        * f(j1 - m1)
        * f(j1 + m1)
        * f(j2 - m2)
        * f(j2 + m2);
    let den = f(j1 + j2 + j + 1);

    let k_min = 0.max(j2 - j - m1).max(j1 - j + m2);
    let k_max = (j1 + j2 - j).min(j1 - m1).min(j2 + m2);

    let denominators: Vec<BigUint> = (k_min..=k_max)
        .map(|k| {
            f(k) * f(j1 + j2 - j - k) * f(j1 - m1 - k) * f(j2 + m2 - k) * f(j - j2 + m1 + k)
                * f(j - j1 - m2 + k)
        })
        .collect();
    let lcm = denominators
        .iter()
        .fold(BigUint::one(), |acc, d| acc.lcm(d));
    let mut series = BigInt::zero();
    for (k, d) in (k_min..=k_max).zip(&denominators) {
        let term = BigInt::from(&lcm / d);
        if k % 2 == 0 {
            series += term;
        } else {
            series -= term;
        }
    }
    if series.is_zero() {
        return Ok(0.0);
    }

    // value = series / lcm * sqrt(num / den)
    let s = exact::abs_biguint(&series);
    let magnitude = exact::sqrt_ratio(&(num * &s * &s), &(den * &lcm * &lcm));
    Ok(if series.is_negative() { -magnitude } else { magnitude })
}

fn check_projection(m: i32) -> Result<()> {
    if m.abs() > ATOM_SPIN {
        return Err(Error::input(format!(
            "single-atom projection {m} outside [-{ATOM_SPIN}, {ATOM_SPIN}]"
        )));
    }
    Ok(())
}

/// `g_{m1,m2}^{m3,m4} = sum_{F,M} g_F <m3,m4|F,M><F,M|m1,m2>` over the even
/// channels, with `g = (g_0, g_2, g_4)`.
pub fn coupling_coefficient_general(m1: i32, m2: i32, m3: i32, m4: i32, g: [f64; 3]) -> Result<f64> {
    for m in [m1, m2, m3, m4] {
        check_projection(m)?;
    }
    if m1 + m2 != m3 + m4 {
        return Ok(0.0);
    }
    let total_m = m1 + m2;
    let mut acc = 0.0;
    for (f, g_f) in CHANNELS.iter().zip(g) {
        if total_m.abs() > *f {
            continue;
        }
        let out = clebsch_gordan(ATOM_SPIN, m3, ATOM_SPIN, m4, *f, total_m)?;
        let inc = clebsch_gordan(ATOM_SPIN, m1, ATOM_SPIN, m2, *f, total_m)?;
        acc += g_f * out * inc;
    }
    Ok(acc)
}

/// Coupling table for the given scattering lengths, with `g_F = 4 pi hbar^2 a_F / m`
/// expressed in `units`.
pub fn coupling_table(lengths: &ScatteringLengths, units: &UnitSystem) -> Result<CouplingTable> {
    lengths.validate()?;
    let scale = units.coupling_per_bohr();
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::input(format!("invalid coupling scale {scale}")));
    }
    let g = lengths.as_array().map(|a| a * scale);
    Ok(CouplingTable::from_channel_couplings(g))
}

/// `c . g / denominator` with the dot product compensated so that
/// cancelling channels keep full relative accuracy.
fn closed_form(c: [f64; 3], denominator: f64, g: [f64; 3]) -> f64 {
    let mut sum = 0.0;
    let mut err = 0.0;
    for (ci, gi) in c.into_iter().zip(g) {
        let prod = ci * gi;
        let prod_err = ci.mul_add(gi, -prod);
        let t = sum + prod;
        let z = t - sum;
        err += (sum - (t - z)) + (prod - z) + prod_err;
        sum = t;
    }
    (sum + err) / denominator
}

/// Interaction matrix over `(|0,0>, S|1,-1>, S|2,-2>)`; the symmetrised
/// states pick up factors of `sqrt 2` and `2`.
pub fn spin_block_matrix(table: &CouplingTable) -> SpinBlockMatrix {
    let r2 = std::f64::consts::SQRT_2;
    let a = r2 * table.g00_1m1;
    let b = r2 * table.g00_2m2;
    let c = 2.0 * table.g1m1_2m2;
    SpinBlockMatrix([
        [table.g00_00, a, b],
        [a, 2.0 * table.g1m1_1m1, c],
        [b, c, 2.0 * table.g2m2_2m2],
    ])
}
