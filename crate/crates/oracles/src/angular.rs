//! Clebsch-Gordan coefficients by explicit construction of coupled states.
//!
//! The stretched state `|j1+j2, j1+j2>` is lowered with `J-`; each lower
//! `j` starts from the top-`m` vector orthogonal to all larger-`j` states,
//! phased so that `<j1 j1; j2 (j - j1) | j j> > 0`.

use std::collections::HashMap;

use astro_float::{BigFloat, RoundingMode};

use crate::quadrature::to_f64;

const RM: RoundingMode = RoundingMode::ToEven;

/// Uncoupled basis index for `(m1, m2)`, spins in doubled units.
fn index(tj1: i32, tm1: i32, tj2: i32, tm2: i32) -> usize {
    let i1 = ((tj1 - tm1) / 2) as usize;
    let i2 = ((tj2 - tm2) / 2) as usize;
    i1 * (tj2 as usize + 1) + i2
}

fn lower_coefficient(tj: i32, tm: i32) -> f64 {
    // J- |j m> = sqrt(j(j+1) - m(m-1)) |j m-1>, doubled units
    let j = tj as f64 / 2.0;
    let m = tm as f64 / 2.0;
    (j * (j + 1.0) - m * (m - 1.0)).sqrt()
}

fn lower(v: &[f64], tj1: i32, tj2: i32) -> Vec<f64> {
    let mut out = vec![0.0; v.len()];
    for tm1 in (-tj1..=tj1).step_by(2) {
        for tm2 in (-tj2..=tj2).step_by(2) {
            let a = v[index(tj1, tm1, tj2, tm2)];
            if a == 0.0 {
                continue;
            }
            if tm1 > -tj1 {
                out[index(tj1, tm1 - 2, tj2, tm2)] += a * lower_coefficient(tj1, tm1);
            }
            if tm2 > -tj2 {
                out[index(tj1, tm1, tj2, tm2 - 2)] += a * lower_coefficient(tj2, tm2);
            }
        }
    }
    out
}

fn normalize(v: &mut [f64]) {
    let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= n);
}

/// Table of coupled states for fixed `j1, j2` (doubled units).
pub struct CoupledStates {
    tj1: i32,
    tj2: i32,
    states: HashMap<(i32, i32), Vec<f64>>,
}

impl CoupledStates {
    pub fn new(tj1: i32, tj2: i32) -> Self {
        assert!(tj1 >= 0 && tj2 >= 0);
        let dim = ((tj1 + 1) * (tj2 + 1)) as usize;
        let mut states: HashMap<(i32, i32), Vec<f64>> = HashMap::new();
        let tj_max = tj1 + tj2;
        let tj_min = (tj1 - tj2).abs();
        for tj in (tj_min..=tj_max).rev().step_by(2) {
            let mut top = vec![0.0; dim];
            if tj == tj_max {
                top[index(tj1, tj1, tj2, tj2)] = 1.0;
            } else {
                // generic vector in the m = j subspace, orthogonalised
                for tm1 in (-tj1..=tj1).step_by(2) {
                    let tm2 = tj - tm1;
                    if tm2.abs() <= tj2 && (tj2 - tm2) % 2 == 0 {
                        top[index(tj1, tm1, tj2, tm2)] = 1.0 + 0.1 * tm1 as f64;
                    }
                }
                for _ in 0..2 {
                    for tjp in ((tj + 2)..=tj_max).step_by(2) {
                        let other = &states[&(tjp, tj)];
                        let dot: f64 = other.iter().zip(&top).map(|(a, b)| a * b).sum();
                        top.iter_mut().zip(other).for_each(|(t, o)| *t -= dot * o);
                    }
                }
                normalize(&mut top);
                let pivot = index(tj1, tj1, tj2, tj - tj1);
                if top[pivot] < 0.0 {
                    top.iter_mut().for_each(|x| *x = -*x);
                }
            }
            let mut v = top;
            let mut tm = tj;
            loop {
                states.insert((tj, tm), v.clone());
                if tm == -tj {
                    break;
                }
                v = lower(&v, tj1, tj2);
                normalize(&mut v);
                tm -= 2;
            }
        }
        Self { tj1, tj2, states }
    }

    /// `<j1 m1; j2 m2 | j m>`, all arguments doubled.
    pub fn coefficient(&self, tm1: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
        if tm1 + tm2 != tm || tm1.abs() > self.tj1 || tm2.abs() > self.tj2 {
            return 0.0;
        }
        match self.states.get(&(tj, tm)) {
            Some(v) => v[index(self.tj1, tm1, self.tj2, tm2)],
            None => 0.0,
        }
    }
}

/// `<j1 m1; j2 m2 | j m>` for integer spins.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> f64 {
    CoupledStates::new(2 * j1, 2 * j2).coefficient(2 * m1, 2 * m2, 2 * j, 2 * m)
}

/// Coupled states as in [`CoupledStates`], carried in `precision`-bit
/// arithmetic.
pub struct PreciseCoupledStates {
    tj1: i32,
    tj2: i32,
    precision: usize,
    states: HashMap<(i32, i32), Vec<BigFloat>>,
}

impl PreciseCoupledStates {
    pub fn new(tj1: i32, tj2: i32, precision: usize) -> Self {
        assert!(tj1 >= 0 && tj2 >= 0);
        let p = precision;
        let zero = || BigFloat::from_f64(0.0, p);
        let dim = ((tj1 + 1) * (tj2 + 1)) as usize;
        let lower_coefficient = |tj: i32, tm: i32| {
            // (j(j+1) - m(m-1)) in quarters, exact
            BigFloat::from_f64((tj * (tj + 2) - tm * (tm - 2)) as f64 / 4.0, p).sqrt(p, RM)
        };
        let normalize = |v: &mut Vec<BigFloat>| {
            let mut n = zero();
            for x in v.iter() {
                n = n.add(&x.mul(x, p, RM), p, RM);
            }
            let n = n.sqrt(p, RM);
            for x in v.iter_mut() {
                *x = x.div(&n, p, RM);
            }
        };
        let mut states: HashMap<(i32, i32), Vec<BigFloat>> = HashMap::new();
        let tj_max = tj1 + tj2;
        let tj_min = (tj1 - tj2).abs();
        for tj in (tj_min..=tj_max).rev().step_by(2) {
            let mut top: Vec<BigFloat> = (0..dim).map(|_| zero()).collect();
            if tj == tj_max {
                top[index(tj1, tj1, tj2, tj2)] = BigFloat::from_f64(1.0, p);
            } else {
                for tm1 in (-tj1..=tj1).step_by(2) {
                    let tm2 = tj - tm1;
                    if tm2.abs() <= tj2 && (tj2 - tm2) % 2 == 0 {
                        top[index(tj1, tm1, tj2, tm2)] = BigFloat::from_f64(1.0 + 0.1 * tm1 as f64, p);
                    }
                }
                for _ in 0..2 {
                    for tjp in ((tj + 2)..=tj_max).step_by(2) {
                        let other = &states[&(tjp, tj)];
                        let mut dot = zero();
                        for (a, b) in other.iter().zip(&top) {
                            dot = dot.add(&a.mul(b, p, RM), p, RM);
                        }
                        for (t, o) in top.iter_mut().zip(other) {
                            *t = t.sub(&dot.mul(o, p, RM), p, RM);
                        }
                    }
                }
                normalize(&mut top);
                if top[index(tj1, tj1, tj2, tj - tj1)].is_negative() {
                    top.iter_mut().for_each(|x| *x = x.neg());
                }
            }
            let mut v = top;
            let mut tm = tj;
            loop {
                states.insert((tj, tm), v.clone());
                if tm == -tj {
                    break;
                }
                let mut out: Vec<BigFloat> = (0..dim).map(|_| zero()).collect();
                for tm1 in (-tj1..=tj1).step_by(2) {
                    for tm2 in (-tj2..=tj2).step_by(2) {
                        let a = &v[index(tj1, tm1, tj2, tm2)];
                        if a.is_zero() {
                            continue;
                        }
                        if tm1 > -tj1 {
                            let i = index(tj1, tm1 - 2, tj2, tm2);
                            out[i] = out[i].add(&a.mul(&lower_coefficient(tj1, tm1), p, RM), p, RM);
                        }
                        if tm2 > -tj2 {
                            let i = index(tj1, tm1, tj2, tm2 - 2);
                            out[i] = out[i].add(&a.mul(&lower_coefficient(tj2, tm2), p, RM), p, RM);
                        }
                    }
                }
                normalize(&mut out);
                v = out;
                tm -= 2;
            }
        }
        Self {
            tj1,
            tj2,
            precision,
            states,
        }
    }

    /// `<j1 m1; j2 m2 | j m>`, all arguments doubled.
    pub fn coefficient(&self, tm1: i32, tm2: i32, tj: i32, tm: i32) -> BigFloat {
        let zero = BigFloat::from_f64(0.0, self.precision);
        if tm1 + tm2 != tm || tm1.abs() > self.tj1 || tm2.abs() > self.tj2 {
            return zero;
        }
        match self.states.get(&(tj, tm)) {
            Some(v) => v[index(self.tj1, tm1, self.tj2, tm2)].clone(),
            None => zero,
        }
    }
}

/// Spin-2 pair coupling `sum_{F,M} g_F <m3 m4|F M><F M|m1 m2>` for
/// `g = (g0, g2, g4)`, accumulated in multiprecision and rounded once.
pub fn pair_coupling(states: &PreciseCoupledStates, m: [i32; 4], g: [f64; 3]) -> f64 {
    assert!(states.tj1 == 4 && states.tj2 == 4, "pair coupling needs two spin-2 atoms");
    let p = states.precision;
    let mut acc = BigFloat::from_f64(0.0, p);
    for (f, gf) in [0, 2, 4].into_iter().zip(g) {
        let gf = BigFloat::from_f64(gf, p);
        for mm in -f..=f {
            let a = states.coefficient(2 * m[2], 2 * m[3], 2 * f, 2 * mm);
            let b = states.coefficient(2 * m[0], 2 * m[1], 2 * f, 2 * mm);
            acc = acc.add(&gf.mul(&a, p, RM).mul(&b, p, RM), p, RM);
        }
    }
    to_f64(&acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spin_half_singlet_and_triplet() {
        let t = CoupledStates::new(1, 1);
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((t.coefficient(1, -1, 0, 0) - r).abs() < 1e-15);
        assert!((t.coefficient(-1, 1, 0, 0) + r).abs() < 1e-15);
        assert!((t.coefficient(1, -1, 2, 0) - r).abs() < 1e-15);
    }

    #[test]
    fn precise_states_agree_with_double() {
        let a = CoupledStates::new(4, 4);
        let b = PreciseCoupledStates::new(4, 4, 256);
        for tj in (0i32..=8).step_by(2) {
            for tm1 in (-4i32..=4).step_by(2) {
                for tm2 in (-4..=4).step_by(2) {
                    let tm = tm1 + tm2;
                    if tm.abs() > tj {
                        continue;
                    }
                    let x = to_f64(&b.coefficient(tm1, tm2, tj, tm));
                    assert!((x - a.coefficient(tm1, tm2, tj, tm)).abs() < 1e-14);
                }
            }
        }
    }

    #[test]
    fn pair_coupling_resolves_cancellation() {
        // 12 g4 = 7 g0 + 5 g2 makes g00_1m1 vanish
        let states = PreciseCoupledStates::new(4, 4, 256);
        let v = pair_coupling(&states, [0, 0, 1, -1], [12.0, 12.0, 12.0]);
        assert!(v.abs() < 1e-60, "{v}");
    }

    #[test]
    fn two_two_to_zero() {
        // <2 m; 2 -m | 0 0> = (-1)^(2-m) / sqrt 5
        for m in -2..=2 {
            let expected = if (2 - m) % 2 == 0 { 1.0 } else { -1.0 } / 5f64.sqrt();
            assert!((clebsch_gordan(2, m, 2, -m, 0, 0) - expected).abs() < 1e-14);
        }
    }
}
