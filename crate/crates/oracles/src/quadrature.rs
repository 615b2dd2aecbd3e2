//! Multiprecision trapezoidal quadrature of
//! `integral psi_n(x) psi_m(x) exp(-s x^2) dx` over the real line.
//!
//! The integrand is entire and decays like a Gaussian, so the trapezoidal
//! rule converges geometrically in the step; the step is halved until every
//! requested integral is stable.

use astro_float::{BigFloat, Consts, RoundingMode};

const RM: RoundingMode = RoundingMode::ToEven;

pub fn to_f64(x: &BigFloat) -> f64 {
    let s = format!("{x}");
    s.parse::<f64>().unwrap_or_else(|_| panic!("unparseable multiprecision value {s}"))
}

/// All `I_{n,m}` for `0 <= n <= m <= n_max` with `n + m` even, as a dense
/// `(n_max + 1)^2` row-major table (odd pairs left at zero).
pub struct OverlapQuadrature {
    pub n_max: usize,
    pub values: Vec<f64>,
    pub levels: usize,
}

impl OverlapQuadrature {
    pub fn get(&self, n: usize, m: usize) -> f64 {
        self.values[n * (self.n_max + 1) + m]
    }
}

/// `rel_tol` is the required agreement between successive step halvings,
/// relative to each integral, with `abs_floor` as an absolute floor.
pub fn overlaps(n_max: usize, s: f64, precision: usize, rel_tol: f64, abs_floor: f64) -> OverlapQuadrature {
    assert!(s > 0.0 && s.is_finite());
    let p = precision;
    let mut cc = Consts::new().expect("constants cache");
    let one = BigFloat::from_f64(1.0, p);
    let two = BigFloat::from_f64(2.0, p);
    let s_big = BigFloat::from_f64(s, p);
    let a = one.add(&s_big, p, RM);

    // ln of the tail bound: integrand below 10^-120 beyond |x| = x_max
    let mut x_max = 8.0f64;
    for _ in 0..4 {
        let log_poly = 2.0 * n_max as f64 * x_max.max(2.0).ln();
        x_max = ((276.0 + log_poly) / (1.0 + s)).sqrt();
    }

    let pi = cc.pi(p, RM);
    let norm = pi.sqrt(p, RM).sqrt(p, RM).reciprocal(p, RM);
    let up: Vec<BigFloat> = (0..=n_max)
        .map(|k| two.div(&BigFloat::from_f64((k + 1) as f64, p), p, RM).sqrt(p, RM))
        .collect();
    let down: Vec<BigFloat> = (0..=n_max)
        .map(|k| {
            BigFloat::from_f64(k as f64, p)
                .div(&BigFloat::from_f64((k + 1) as f64, p), p, RM)
                .sqrt(p, RM)
        })
        .collect();

    let size = n_max + 1;
    let pairs: Vec<(usize, usize)> = (0..=n_max)
        .flat_map(|n| (n..=n_max).filter(move |m| (n + m) % 2 == 0).map(move |m| (n, m)))
        .collect();

    // accumulate f(x) for x = k h over k in the given index set (x >= 0
    // only, doubling the off-origin nodes by symmetry of the even integrand)
    let accumulate = |h: f64, ks: &mut dyn Iterator<Item = u64>, cc: &mut Consts| -> Vec<BigFloat> {
        let mut sums: Vec<BigFloat> = vec![BigFloat::from_f64(0.0, p); pairs.len()];
        let h_big = BigFloat::from_f64(h, p);
        for k in ks {
            let x = h_big.mul(&BigFloat::from_f64(k as f64, p), p, RM);
            let x2 = x.mul(&x, p, RM);
            let weight = a.mul(&x2, p, RM).neg().exp(p, RM, cc);
            let weight = if k == 0 { weight } else { weight.mul(&two, p, RM) };
            let mut h_vals: Vec<BigFloat> = Vec::with_capacity(size);
            h_vals.push(norm.clone());
            for j in 0..n_max {
                let mut next = up[j].mul(&x, p, RM).mul(&h_vals[j], p, RM);
                if j > 0 {
                    next = next.sub(&down[j].mul(&h_vals[j - 1], p, RM), p, RM);
                }
                h_vals.push(next);
            }
            let weighted: Vec<BigFloat> = h_vals.iter().map(|v| v.mul(&weight, p, RM)).collect();
            for (slot, &(n, m)) in sums.iter_mut().zip(&pairs) {
                *slot = slot.add(&weighted[n].mul(&h_vals[m], p, RM), p, RM);
            }
        }
        sums
    };

    let mut h = 0.25 / (1.0 + s).sqrt();
    let k_max = (x_max / h).ceil() as u64;
    let mut raw = accumulate(h, &mut (0..=k_max), &mut cc);
    let mut estimate: Vec<BigFloat> = raw.iter().map(|v| v.mul(&BigFloat::from_f64(h, p), p, RM)).collect();
    let mut levels = 1;
    loop {
        let h_new = 0.5 * h;
        let k_max = (x_max / h_new).ceil() as u64;
        let odd = accumulate(h_new, &mut (0..=k_max).filter(|k| k % 2 == 1), &mut cc);
        // nodes of the coarse grid beyond its own range were never added;
        // the tail bound makes them negligible
        raw = raw.iter().zip(&odd).map(|(r, o)| r.add(o, p, RM)).collect();
        let next: Vec<BigFloat> = raw.iter().map(|v| v.mul(&BigFloat::from_f64(h_new, p), p, RM)).collect();
        levels += 1;
        let converged = estimate.iter().zip(&next).all(|(old, new)| {
            let diff = to_f64(&new.sub(old, p, RM)).abs();
            diff <= rel_tol * to_f64(new).abs() + abs_floor
        });
        estimate = next;
        h = h_new;
        if converged || levels >= 12 {
            break;
        }
    }
    let mut values = vec![0.0; size * size];
    for (v, &(n, m)) in estimate.iter().zip(&pairs) {
        let f = to_f64(v);
        values[n * size + m] = f;
        values[m * size + n] = f;
    }
    OverlapQuadrature {
        n_max,
        values,
        levels,
    }
}
