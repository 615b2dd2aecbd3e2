//! One-dimensional overlap integrals of oscillator eigenfunctions with a
//! Gaussian weight,
//!
//! ```text
//! I_{n,m}(sigma, w) = integral phi_n(x) phi_m(x) exp(-x^2 / (2 w^2)) dx,
//! ```
//!
//! where `phi_n` is the normalised eigenfunction of oscillator length
//! `sigma`. In closed form `I_{n,m}` is a prefactor times the terminating
//! series `2F1(-m, -n; (1 - n - m)/2; z)` with `z = alpha^2 / (2 alpha^2 - 1)`
//! and `2 alpha^2 = 1 + sigma^2 / (2 w^2)`.
//!
//! The series alternates and cancels catastrophically once `sigma / w` is
//! large, so it is evaluated exactly: `s = sigma^2 / (2 w^2)` is a dyadic
//! rational `p / q` once rounded to `f64`, every term is rational in `s`,
//! and the only roundings are the final division and square root.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact;

/// Exact dyadic representation `s = p / q` of a positive finite `f64`.
#[derive(Debug, Clone)]
struct Dyadic {
    p: BigUint,
    q: BigUint,
}

impl Dyadic {
    fn new(s: f64) -> Self {
        debug_assert!(s.is_finite() && s > 0.0);
        let bits = s.to_bits();
        let exp_bits = ((bits >> 52) & 0x7ff) as i64;
        let frac = bits & ((1u64 << 52) - 1);
        let (mantissa, exp) = if exp_bits == 0 {
            (frac, -1074)
        } else {
            (frac | (1u64 << 52), exp_bits - 1075)
        };
        let tz = mantissa.trailing_zeros() as i64;
        let mantissa = mantissa >> tz;
        let exp = exp + tz;
        if exp >= 0 {
            Self {
                p: BigUint::from(mantissa) << exp as u64,
                q: BigUint::one(),
            }
        } else {
            Self {
                p: BigUint::from(mantissa),
                q: BigUint::one() << (-exp) as u64,
            }
        }
    }
}

/// Number of terms in the terminating series for `(n, m)`.
pub fn series_terms(n: u32, m: u32) -> u32 {
    n.min(m) + 1
}

/// Terminating `2F1(-m, -n; (1 - n - m)/2; z)` in `f64`, summed term by term
/// with Neumaier compensation. Returns the value and the number of terms
/// summed, which is always `min(n, m) + 1`.
///
/// Accurate only when the terms do not cancel; see [`overlap_integral`] for
/// the exact evaluation.
pub fn terminating_hyp2f1(n: u32, m: u32, z: f64) -> (f64, u32) {
    let big_n = (n + m) as f64;
    let c = 0.5 * (1.0 - big_n);
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut comp = 0.0;
    let k_max = n.min(m);
    for k in 1..=k_max {
        let kf = k as f64;
        term *= (kf - 1.0 - m as f64) * (kf - 1.0 - n as f64) / ((c + kf - 1.0) * kf) * z;
        let t = sum + term;
        if sum.abs() >= term.abs() {
            comp += (sum - t) + term;
        } else {
            comp += (term - t) + sum;
        }
        sum = t;
    }
    (sum + comp, k_max + 1)
}

/// `I_{n,m}` with `s = sigma^2 / (2 w^2)` given directly.
pub fn overlap_from_ratio(n: u32, m: u32, s: f64) -> Result<f64> {
    if !(s.is_finite() && s > 0.0) {
        return Err(Error::input(format!("overlap needs a positive finite width ratio, got s = {s}")));
    }
    if (n + m) % 2 == 1 {
        return Ok(0.0);
    }
    let value = overlap_exact(n, m, &Dyadic::new(s));
    if !value.is_finite() {
        return Err(Error::numeric(format!("overlap I_({n},{m}) at s = {s} is not finite")));
    }
    Ok(value)
}

/// Overlap integral `I_{n,m}(sigma, w)`; zero when `n + m` is odd and
/// symmetric in `(n, m)`.
pub fn overlap_integral(n: u32, m: u32, sigma: f64, w: f64) -> Result<f64> {
    if !(sigma.is_finite() && sigma > 0.0 && w.is_finite() && w > 0.0) {
        return Err(Error::input(format!(
            "overlap needs positive finite lengths, got sigma = {sigma}, w = {w}"
        )));
    }
    let r = sigma / w;
    overlap_from_ratio(n, m, 0.5 * r * r)
}

fn overlap_exact(n: u32, m: u32, s: &Dyadic) -> f64 {
    let (n, m) = if n <= m { (n, m) } else { (m, n) };
    let big_n = (n + m) as i64;
    let k_max = n as i64;
    let p = BigInt::from(s.p.clone());
    let pq = BigInt::from(&s.p + &s.q);

    // Horner evaluation of sum_k prod_{j<=k} r_j with
    // r_j = (j-1-m)(j-1-n)(p+q) / ((2j-1-N) j p); the value is a / b.
    let mut a = BigInt::one();
    let mut b = BigInt::one();
    let mut d = BigInt::one();
    for k in (1..=k_max).rev() {
        let num_k = BigInt::from((k - 1 - m as i64) * (k - 1 - n as i64));
        let den_k = BigInt::from((2 * k - 1 - big_n) * k);
        let scaled_b = &den_k * &p * &b;
        a = &scaled_b + num_k * &pq * &a;
        b = scaled_b;
        d *= den_k;
    }
    if a.is_zero() {
        return 0.0;
    }
    // b = d p^K, so I^2 = ((N-1)!! a)^2 p^(N-2K) q / (n! m! (p+q)^(N+1) d^2)
    let sign_negative = (big_n / 2 % 2 == 1) ^ a.is_negative() ^ d.is_negative();
    let dfact = exact::odd_double_factorial((big_n / 2) as u32);
    let a_abs = exact::abs_biguint(&a);
    let d_abs = exact::abs_biguint(&d);
    let num = {
        let t = &dfact * &a_abs;
        &t * &t * s.p.pow((big_n - 2 * k_max) as u32) * &s.q
    };
    let den = exact::factorial(n)
        * exact::factorial(m)
        * (&s.p + &s.q).pow((big_n + 1) as u32)
        * &d_abs
        * &d_abs;
    let magnitude = exact::sqrt_ratio(&num, &den);
    if sign_negative {
        -magnitude
    } else {
        magnitude
    }
}

/// Dense table `I_{n,m}` for `0 <= n, m <= n_max` along one axis, stored
/// row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct OverlapTable {
    size: usize,
    values: Vec<f64>,
}

impl OverlapTable {
    pub fn new(n_max: u32, sigma: f64, w: f64) -> Result<Self> {
        if !(sigma.is_finite() && sigma > 0.0 && w.is_finite() && w > 0.0) {
            return Err(Error::input(format!(
                "overlap needs positive finite lengths, got sigma = {sigma}, w = {w}"
            )));
        }
        let r = sigma / w;
        let s = 0.5 * r * r;
        if !(s.is_finite() && s > 0.0) {
            return Err(Error::input(format!("width ratio out of range: sigma / w = {r}")));
        }
        let dy = Dyadic::new(s);
        let size = n_max as usize + 1;
        let pairs: Vec<(u32, u32)> = (0..=n_max)
            .flat_map(|n| (n..=n_max).filter(move |m| (n + m) % 2 == 0).map(move |m| (n, m)))
            .collect();
        let computed: Vec<f64> = pairs.par_iter().map(|&(n, m)| overlap_exact(n, m, &dy)).collect();
        let mut values = vec![0.0; size * size];
        for (&(n, m), v) in pairs.iter().zip(computed) {
            if !v.is_finite() {
                return Err(Error::numeric(format!("overlap I_({n},{m}) is not finite")));
            }
            values[n as usize * size + m as usize] = v;
            values[m as usize * size + n as usize] = v;
        }
        Ok(Self { size, values })
    }

    pub fn n_max(&self) -> u32 {
        self.size as u32 - 1
    }

    pub fn get(&self, n: u32, m: u32) -> f64 {
        self.values[n as usize * self.size + m as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn dyadic_is_exact() {
        for s in [0.5, 3.0, 0.1, 1e-300, 7.5e10] {
            let d = Dyadic::new(s);
            let back = exact::ratio_to_f64(&BigInt::from(d.p), &BigInt::from(d.q));
            assert_eq!(back, s);
        }
    }

    #[test]
    fn ground_overlap_closed_form() {
        for r in [0.1, 1.0, 10.0] {
            let alpha = ((1.0 + 0.5 * r * r) / 2.0f64).sqrt();
            let v = overlap_integral(0, 0, r, 1.0).unwrap();
            assert_relative_eq!(v, 1.0 / (2f64.sqrt() * alpha), max_relative = 1e-15);
        }
    }

    #[test]
    fn parity_and_symmetry() {
        assert_eq!(overlap_integral(3, 0, 1.0, 1.0).unwrap(), 0.0);
        assert_eq!(
            overlap_integral(7, 19, 2.0, 0.7).unwrap(),
            overlap_integral(19, 7, 2.0, 0.7).unwrap()
        );
    }

    #[test]
    fn high_precision_reference_values() {
        // 60-digit reference evaluations
        let cases = [
            (0.1, 2, 0, -0.00350918216845074),
            (0.1, 40, 40, 0.825082890233302),
            (0.1, 0, 40, 3.04855352555638e-47),
            (0.1, 38, 40, -0.0814421752978664),
            (1.0, 2, 0, -0.192450089729875),
            (1.0, 40, 40, 0.0892135270270476),
            (1.0, 0, 40, 8.29138878911589e-11),
            (1.0, 20, 40, 0.00368839041858892),
            (10.0, 2, 0, -0.0970732885271249),
            (10.0, 40, 40, 0.0106194874639067),
            (10.0, 0, 40, 0.0333664098934577),
            (10.0, 20, 40, 0.013370239941424),
            (10.0, 38, 40, -0.0108254787090186),
        ];
        for (r, n, m, expected) in cases {
            let v = overlap_integral(n, m, r, 1.0).unwrap();
            assert_relative_eq!(v, expected, max_relative = 1e-13);
        }
    }

    #[test]
    fn term_count_is_min_plus_one() {
        for (n, m) in [(0, 0), (3, 5), (40, 12), (7, 7)] {
            assert_eq!(terminating_hyp2f1(n, m, 0.3).1, n.min(m) + 1);
            assert_eq!(series_terms(n, m), n.min(m) + 1);
        }
    }

    #[test]
    fn float_series_matches_expanded_terms() {
        let r = 0.1f64;
        let s = 0.5 * r * r;
        let a2 = 0.5 * (1.0 + s);
        let z = a2 / (2.0 * a2 - 1.0);
        let (f, _) = terminating_hyp2f1(2, 0, z);
        assert_eq!(f, 1.0);
        let (f, _) = terminating_hyp2f1(2, 2, z);
        assert_relative_eq!(f, 1.0 + 4.0 / -1.5 * z + 0.5 * 4.0 / (-1.5 * -0.5) * z * z, max_relative = 1e-14);
    }

    #[test]
    fn table_matches_pointwise() {
        let t = OverlapTable::new(12, 1.3, 0.4).unwrap();
        for n in 0..=12 {
            for m in 0..=12 {
                assert_eq!(t.get(n, m), overlap_integral(n, m, 1.3, 0.4).unwrap());
            }
        }
    }
}
