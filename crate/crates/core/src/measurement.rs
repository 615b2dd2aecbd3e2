//! Postselected number squeezing, the detection-error model, and Pearson
//! chi-squared tests on population classes.
//!
//! After state-selective ejection of the `m = +-1` atoms, `P_n` is the
//! probability that `n` atoms remain. Postselection keeps `n = 0` (one atom
//! in each of `+1` and `-1`) and `n = 1` (one atom in `+-1`, the other
//! elsewhere), giving `<J_z> = 0` and `(Delta J_z)^2 = P1 / (4 (P0 + P1))`.

use std::io::Read;

use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};

/// Probabilities that 0, 1 or 2 atoms remain after ejection.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EjectionOutcome {
    pub p0: f64,
    pub p1: f64,
    pub p2: f64,
}

impl EjectionOutcome {
    pub fn new(p0: f64, p1: f64, p2: f64) -> Result<Self> {
        for (name, p) in [("P0", p0), ("P1", p1), ("P2", p2)] {
            if !(p.is_finite() && (0.0..=1.0).contains(&p)) {
                return Err(Error::input(format!("{name} must lie in [0, 1], got {p}")));
            }
        }
        if p0 + p1 + p2 > 1.0 + 1e-12 {
            return Err(Error::input(format!("outcome probabilities sum to {}", p0 + p1 + p2)));
        }
        Ok(Self { p0, p1, p2 })
    }

    /// Perfectly correlated truth: a `+-1` pair with probability `pair`,
    /// otherwise both atoms stay.
    pub fn perfect_pairs(pair: f64) -> Result<Self> {
        Self::new(pair, 0.0, 1.0 - pair)
    }
}

/// Number squeezing of the postselected imbalance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezingResult {
    pub mean: f64,
    pub variance: f64,
    pub zeta2: f64,
    /// `10 log10(zeta2)`; `-inf` when `zeta2 = 0`.
    pub db: f64,
    /// No imbalance fluctuations at all.
    pub perfect: bool,
}

/// `10 log10(zeta2)`.
pub fn to_db(zeta2: f64) -> f64 {
    10.0 * zeta2.log10()
}

pub fn from_db(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Squeezing from a directly measured `(Delta J_z)^2` with `n_atoms` atoms.
pub fn squeezing_from_variance(variance: f64, n_atoms: u32) -> Result<SqueezingResult> {
    if !(variance.is_finite() && variance >= 0.0) {
        return Err(Error::input(format!("variance must be nonnegative, got {variance}")));
    }
    if n_atoms == 0 {
        return Err(Error::input("atom number must be at least one"));
    }
    let zeta2 = variance / (n_atoms as f64 / 4.0);
    Ok(SqueezingResult {
        mean: 0.0,
        variance,
        zeta2,
        db: to_db(zeta2),
        perfect: zeta2 == 0.0,
    })
}

/// Squeezing from postselected ejection outcomes; `P2` is discarded.
pub fn squeezing_from_outcomes(out: &EjectionOutcome, n_atoms: u32) -> Result<SqueezingResult> {
    let kept = out.p0 + out.p1;
    if kept <= 0.0 {
        return Err(Error::input("postselected probability P0 + P1 is zero; squeezing undefined"));
    }
    // J_z = 0 for n = 0 and +-1/2 with equal weight for n = 1
    let mean = 0.0;
    let variance = 0.25 * out.p1 / kept;
    let mut r = squeezing_from_variance(variance, n_atoms)?;
    r.mean = mean;
    Ok(r)
}

/// Detection efficiencies: `eta_f2` for atoms that should remain and
/// `eta_f3` for atoms that should be ejected.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionModel {
    pub eta_f2: f64,
    pub eta_f3: f64,
}

impl DetectionModel {
    pub fn new(eta_f2: f64, eta_f3: f64) -> Result<Self> {
        for (name, e) in [("eta_f2", eta_f2), ("eta_f3", eta_f3)] {
            if !(e.is_finite() && (0.0..=1.0).contains(&e)) {
                return Err(Error::input(format!("{name} must lie in [0, 1], got {e}")));
            }
        }
        Ok(Self { eta_f2, eta_f3 })
    }

    /// Measured rubidium-85 efficiencies.
    pub fn rb85() -> Self {
        Self {
            eta_f2: 0.944,
            eta_f3: 0.997,
        }
    }

    /// Apparent outcome distribution: each atom that should remain is
    /// missed with probability `1 - eta_f2`, each atom that should be
    /// ejected survives with probability `1 - eta_f3`.
    pub fn apparent(&self, truth: &EjectionOutcome) -> EjectionOutcome {
        let (k2, m2) = (self.eta_f2, 1.0 - self.eta_f2);
        let (k3, m3) = (self.eta_f3, 1.0 - self.eta_f3);
        // truth n = 0: two ejected atoms; n = 1: one kept, one ejected;
        // n = 2: two kept
        let from0 = [k3 * k3, 2.0 * k3 * m3, m3 * m3];
        let from1 = [m2 * k3, k2 * k3 + m2 * m3, k2 * m3];
        let from2 = [m2 * m2, 2.0 * k2 * m2, k2 * k2];
        let p: [f64; 3] =
            std::array::from_fn(|n| truth.p0 * from0[n] + truth.p1 * from1[n] + truth.p2 * from2[n]);
        EjectionOutcome {
            p0: p[0],
            p1: p[1],
            p2: p[2],
        }
    }
}

/// Expected measured `(Delta J_z)^2` for a true outcome distribution.
pub fn detection_variance(model: &DetectionModel, truth: &EjectionOutcome) -> Result<f64> {
    Ok(squeezing_from_outcomes(&model.apparent(truth), 2)?.variance)
}

/// Monte-Carlo estimate of [`detection_variance`] from `trials` simulated
/// pairs.
pub fn detection_variance_monte_carlo<R: Rng + ?Sized>(
    model: &DetectionModel,
    truth: &EjectionOutcome,
    trials: u64,
    rng: &mut R,
) -> Result<f64> {
    let total = truth.p0 + truth.p1 + truth.p2;
    if total <= 0.0 {
        return Err(Error::input("true outcome probabilities sum to zero"));
    }
    let mut counts = [0u64; 3];
    for _ in 0..trials {
        let u: f64 = rng.random::<f64>() * total;
        let kept = if u < truth.p0 {
            0
        } else if u < truth.p0 + truth.p1 {
            1
        } else {
            2
        };
        let mut remaining = 0;
        for _ in 0..kept {
            if rng.random::<f64>() < model.eta_f2 {
                remaining += 1;
            }
        }
        for _ in kept..2 {
            if rng.random::<f64>() >= model.eta_f3 {
                remaining += 1;
            }
        }
        counts[remaining] += 1;
    }
    let n = trials as f64;
    let out = EjectionOutcome {
        p0: counts[0] as f64 / n,
        p1: counts[1] as f64 / n,
        p2: counts[2] as f64 / n,
    };
    Ok(squeezing_from_outcomes(&out, 2)?.variance)
}

/// Pair fractions whose perfectly correlated truth reproduces `target`
/// within `tolerance`, scanned on a uniform grid of `steps` points.
pub fn pair_fraction_band(model: &DetectionModel, target: f64, tolerance: f64, steps: usize) -> Option<(f64, f64)> {
    let mut band: Option<(f64, f64)> = None;
    for i in 1..steps {
        let p = i as f64 / steps as f64;
        let truth = EjectionOutcome::perfect_pairs(p).ok()?;
        if let Ok(v) = detection_variance(model, &truth) {
            if (v - target).abs() <= tolerance {
                band = Some(band.map_or((p, p), |(lo, _)| (lo, p)));
            }
        }
    }
    band
}

/// Pearson chi-squared statistic, degrees of freedom and p-value.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquaredTest {
    pub statistic: f64,
    pub df: u32,
    pub p_value: f64,
}

/// Pearson test of observed class counts against expected probabilities,
/// which are renormalised. `df` defaults to `classes - 1`.
pub fn chi_squared_uniformity(observed: &[f64], expected: &[f64], df: Option<u32>) -> Result<ChiSquaredTest> {
    if observed.len() != expected.len() || observed.is_empty() {
        return Err(Error::input("observed and expected must be nonempty and equally long"));
    }
    if observed.iter().any(|o| !(o.is_finite() && *o >= 0.0)) {
        return Err(Error::input("observed counts must be nonnegative"));
    }
    let n: f64 = observed.iter().sum();
    if n <= 0.0 {
        return Err(Error::input("observed counts sum to zero"));
    }
    if expected.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
        return Err(Error::input("expected probabilities must be positive"));
    }
    let norm: f64 = expected.iter().sum();
    let statistic: f64 = observed
        .iter()
        .zip(expected)
        .map(|(o, e)| {
            let e = n * e / norm;
            (o - e).powi(2) / e
        })
        .sum();
    let df = df.unwrap_or(observed.len() as u32 - 1);
    if df == 0 {
        return Err(Error::input("chi-squared test needs at least one degree of freedom"));
    }
    let dist = ChiSquared::new(df as f64).map_err(|e| Error::numeric(e.to_string()))?;
    Ok(ChiSquaredTest {
        statistic,
        df,
        p_value: dist.sf(statistic),
    })
}

/// Row of an outcome table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRow {
    pub time_s: f64,
    pub outcome: EjectionOutcome,
}

/// Reads an outcome table with columns `time_s, p0, p1, p2`.
pub fn read_outcomes_csv<R: Read>(reader: R) -> Result<Vec<OutcomeRow>> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(true).trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::Parse {
            line: 1,
            column: String::new(),
            message: e.to_string(),
        })?
        .clone();
    let names = ["time_s", "p0", "p1", "p2"];
    let mut idx = [0usize; 4];
    for (slot, name) in idx.iter_mut().zip(names) {
        *slot = headers.iter().position(|h| h == name).ok_or_else(|| Error::Parse {
            line: 1,
            column: name.into(),
            message: "missing required column".into(),
        })?;
    }
    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| Error::Parse {
            line: e.position().map_or(0, |p| p.line()),
            column: String::new(),
            message: e.to_string(),
        })?;
        let line = record.position().map_or(0, |p| p.line());
        let mut v = [0.0; 4];
        for (k, (&i, name)) in idx.iter().zip(names).enumerate() {
            let raw = record.get(i).unwrap_or("");
            v[k] = raw.parse().map_err(|_| Error::Parse {
                line,
                column: name.into(),
                message: format!("cannot parse {raw:?} as a number"),
            })?;
        }
        let outcome = EjectionOutcome::new(v[1], v[2], v[3]).map_err(|e| Error::Parse {
            line,
            column: "p0/p1/p2".into(),
            message: e.to_string(),
        })?;
        rows.push(OutcomeRow { time_s: v[0], outcome });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn measured_variance_converts_to_decibels() {
        let r = squeezing_from_variance(0.032, 2).unwrap();
        assert!((r.zeta2 - 0.064).abs() < 1e-15);
        assert!((r.db + 11.94).abs() < 0.005);
    }

    #[test]
    fn outcome_examples() {
        let r = squeezing_from_outcomes(&EjectionOutcome::new(0.5, 0.0, 0.0).unwrap(), 2).unwrap();
        assert!(r.perfect);
        assert_eq!(r.db, f64::NEG_INFINITY);
        let r = squeezing_from_outcomes(&EjectionOutcome::new(0.5, 0.5, 0.0).unwrap(), 2).unwrap();
        assert_eq!(r.zeta2, 0.25);
        assert!(squeezing_from_outcomes(&EjectionOutcome::new(0.0, 0.0, 1.0).unwrap(), 2).is_err());
    }

    #[test]
    fn perfect_detection_has_no_variance() {
        let model = DetectionModel::new(1.0, 1.0).unwrap();
        let truth = EjectionOutcome::perfect_pairs(1.0 / 3.0).unwrap();
        assert_eq!(detection_variance(&model, &truth).unwrap(), 0.0);
    }

    #[test]
    fn apparent_distribution_is_normalised() {
        let model = DetectionModel::rb85();
        let truth = EjectionOutcome::new(0.2, 0.3, 0.5).unwrap();
        let a = model.apparent(&truth);
        assert!((a.p0 + a.p1 + a.p2 - 1.0).abs() < 1e-15);
    }

    #[test]
    fn chi_squared_examples() {
        let r = chi_squared_uniformity(&[100.0, 100.0, 100.0], &[1.0, 1.0, 1.0], None).unwrap();
        assert_eq!(r.statistic, 0.0);
        assert_eq!(r.p_value, 1.0);
        assert_eq!(r.df, 2);
        assert!(chi_squared_uniformity(&[1.0, 2.0], &[0.0, 1.0], None).is_err());
        let r = chi_squared_uniformity(&[10.0, 20.0, 30.0], &[1.0, 2.0, 3.0], Some(3)).unwrap();
        assert!(r.statistic.abs() < 1e-12);
    }

    #[test]
    fn outcome_csv() {
        let rows = read_outcomes_csv("time_s,p0,p1,p2\n0.15,0.9,0.1,0\n".as_bytes()).unwrap();
        assert_eq!(rows[0].outcome.p1, 0.1);
        assert!(read_outcomes_csv("time_s,p0,p1,p2\n0.15,0.9,oops,0\n".as_bytes()).is_err());
    }
}
