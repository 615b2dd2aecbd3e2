//! Small helpers for exact integer arithmetic that ends in a single rounding
//! to `f64`.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};

pub(crate) fn factorial(n: u32) -> BigUint {
    (2..=n).fold(BigUint::one(), |acc, k| acc * k)
}

/// `(2n - 1)!!`, with the convention `(-1)!! = 1`.
pub(crate) fn odd_double_factorial(n: u32) -> BigUint {
    (1..n).fold(BigUint::one(), |acc, k| acc * (2 * k + 1))
}

/// Multiplies `x` by `2^exp` without intermediate overflow.
pub(crate) fn ldexp(mut x: f64, mut exp: i64) -> f64 {
    while exp > 1000 {
        x *= 2f64.powi(1000);
        exp -= 1000;
    }
    while exp < -1000 {
        x *= 2f64.powi(-1000);
        exp += 1000;
    }
    x * 2f64.powi(exp as i32)
}

/// Splits the positive rational `num / den` into `(mantissa, exponent)` with
/// `num / den = mantissa * 2^exponent` and `mantissa` in `[2^63, 2^65)`.
fn split_ratio(num: &BigUint, den: &BigUint) -> (f64, i64) {
    debug_assert!(!num.is_zero() && !den.is_zero());
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    (q.to_f64().unwrap_or(f64::NAN), -shift)
}

/// `num / den` rounded to `f64`.
#[cfg(test)]
pub(crate) fn ratio_to_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let negative = num.is_negative() != den.is_negative();
    let (m, e) = split_ratio(num.magnitude(), den.magnitude());
    let v = ldexp(m, e);
    if negative {
        -v
    } else {
        v
    }
}

/// `sqrt(num / den)` for a nonnegative ratio, rounded to `f64`.
pub(crate) fn sqrt_ratio(num: &BigUint, den: &BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let (mut m, mut e) = split_ratio(num, den);
    if e % 2 != 0 {
        m *= 2.0;
        e -= 1;
    }
    ldexp(m.sqrt(), e / 2)
}

pub(crate) fn abs_biguint(x: &BigInt) -> BigUint {
    x.abs().to_biguint().unwrap_or_default()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratios_round_correctly() {
        let v = ratio_to_f64(&BigInt::from(1), &BigInt::from(3));
        assert_eq!(v, 1.0 / 3.0);
        let v = ratio_to_f64(&BigInt::from(-22), &BigInt::from(7));
        assert_eq!(v, -22.0 / 7.0);
        let big = BigInt::from(10).pow(400);
        let v = ratio_to_f64(&big, &(big.clone() * 4));
        assert_eq!(v, 0.25);
    }

    #[test]
    fn square_roots_of_ratios() {
        let v = sqrt_ratio(&BigUint::from(1u32), &BigUint::from(5u32));
        assert!((v - 0.2f64.sqrt()).abs() < 1e-16);
        let v = sqrt_ratio(&BigUint::from(9u32), &BigUint::from(2u32));
        assert!((v - 4.5f64.sqrt()).abs() < 1e-15);
        let tiny = BigUint::from(10u32).pow(300);
        let v = sqrt_ratio(&BigUint::one(), &tiny);
        assert!((v / 1e-150 - 1.0).abs() < 1e-14);
    }

    #[test]
    fn factorials() {
        assert_eq!(factorial(0), BigUint::one());
        assert_eq!(factorial(10), BigUint::from(3_628_800u32));
        assert_eq!(odd_double_factorial(0), BigUint::one());
        assert_eq!(odd_double_factorial(4), BigUint::from(105u32));
    }
}
