use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use spinpair::measurement::{
    detection_variance_monte_carlo, pair_fraction_band, read_outcomes_csv, squeezing_from_variance, ChiSquaredTest,
};
use spinpair::{chi_squared_uniformity, detection_variance, squeezing_from_outcomes, EjectionOutcome, SqueezingResult};

use super::Context;
use crate::error::CliError;

/// Measured detection-limited variance and the accepted tolerance.
const DETECTION_TARGET: f64 = 0.034;
const DETECTION_TOLERANCE: f64 = 0.004;

#[derive(Serialize)]
struct Detection {
    eta_f2: f64,
    eta_f3: f64,
    pair_fraction: f64,
    variance: f64,
    variance_monte_carlo: f64,
    trials: u64,
    target: f64,
    tolerance: f64,
    within_target: bool,
    /// Pair fractions whose prediction falls within the target band.
    reproducing_pair_fractions: Option<(f64, f64)>,
}

#[derive(Serialize)]
struct OutcomeSqueezing {
    time_s: f64,
    result: SqueezingResult,
}

#[derive(Serialize)]
struct Report {
    measured: SqueezingResult,
    detection: Detection,
    outcomes: Vec<OutcomeSqueezing>,
    chi_squared: Option<ChiSquaredTest>,
}

pub struct ChiSquaredInput {
    pub counts: Vec<f64>,
    pub expected: Vec<f64>,
    pub df: Option<u32>,
}

pub fn run(ctx: &mut Context, outcomes: Option<&Path>, chi: Option<ChiSquaredInput>) -> Result<(), CliError> {
    let cfg = ctx.config.clone();
    let measured = squeezing_from_variance(cfg.measured_variance, cfg.atoms)?;
    let model = cfg.detection_model()?;
    let truth = EjectionOutcome::perfect_pairs(cfg.detection.pair_fraction)?;
    let variance = detection_variance(&model, &truth)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mc = detection_variance_monte_carlo(&model, &truth, cfg.detection.trials, &mut rng)?;
    let within = (variance - DETECTION_TARGET).abs() <= DETECTION_TOLERANCE;
    let detection = Detection {
        eta_f2: model.eta_f2,
        eta_f3: model.eta_f3,
        pair_fraction: cfg.detection.pair_fraction,
        variance,
        variance_monte_carlo: mc,
        trials: cfg.detection.trials,
        target: DETECTION_TARGET,
        tolerance: DETECTION_TOLERANCE,
        within_target: within,
        reproducing_pair_fractions: pair_fraction_band(&model, DETECTION_TARGET, DETECTION_TOLERANCE, 1000),
    };
    if !within {
        ctx.warnings.push(format!(
            "detection model predicts variance {variance:.4}, outside {DETECTION_TARGET} +- {DETECTION_TOLERANCE}"
        ));
    }
    let mut rows = Vec::new();
    if let Some(path) = outcomes {
        let bytes = ctx.read_input(path)?;
        let table = read_outcomes_csv(bytes.as_slice()).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        for row in table {
            rows.push(OutcomeSqueezing {
                time_s: row.time_s,
                result: squeezing_from_outcomes(&row.outcome, cfg.atoms)?,
            });
        }
    }
    let chi_squared = chi
        .map(|c| chi_squared_uniformity(&c.counts, &c.expected, c.df))
        .transpose()?;
    println!(
        "zeta^2 = {:.4} ({:.2} dB); detection-limited variance {:.4}",
        measured.zeta2, measured.db, variance
    );
    let report = Report {
        measured,
        detection,
        outcomes: rows,
        chi_squared,
    };
    ctx.out.write_json("squeezing.json", &report)
}
