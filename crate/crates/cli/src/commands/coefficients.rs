use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use spinpair::rate_model::{rate_ratio_uncertainty, RateRatios, RatioUncertainty};
use spinpair::spin_channels::RB85_UNCERTAINTIES;
use spinpair::{coupling_table, gaussian_width, rate_ratios, spin_block_matrix, CouplingTable, ScatteringLengths, UnitSystem};

use super::Context;
use crate::error::CliError;

const RATIO_SAMPLES: usize = 20_000;

#[derive(Serialize)]
struct Report {
    scattering_lengths_bohr: [f64; 3],
    /// With `g_F = a_F`.
    couplings_bohr: CouplingTable,
    /// In units of `hbar * omega_bar`, lengths in oscillator units.
    couplings_internal: CouplingTable,
    spin_block_internal: [[f64; 3]; 3],
    gaussian_width_bohr: f64,
    oscillator_length_bohr: f64,
    rate_ratios: RateRatios,
    /// Only for the rubidium-85 central values, whose error bars are known.
    rate_ratio_uncertainty: Option<RatioUncertainty>,
}

pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    let scenario = ctx.config.scenario()?;
    let lengths = scenario.lengths;
    let units = scenario.units();
    let bohr = coupling_table(&lengths, &UnitSystem::ScatteringLength)?;
    let internal = coupling_table(&lengths, &UnitSystem::Oscillator(units))?;
    let uncertainty = if lengths == ScatteringLengths::rb85() {
        let mut rng = ChaCha8Rng::seed_from_u64(ctx.config.seed);
        Some(rate_ratio_uncertainty(&lengths, RB85_UNCERTAINTIES, RATIO_SAMPLES, &mut rng)?)
    } else {
        None
    };
    let report = Report {
        scattering_lengths_bohr: lengths.as_array(),
        couplings_bohr: bohr,
        couplings_internal: internal,
        spin_block_internal: spin_block_matrix(&internal).0,
        gaussian_width_bohr: gaussian_width(&lengths)?,
        oscillator_length_bohr: units.length_to_bohr(1.0),
        rate_ratios: rate_ratios(&bohr),
        rate_ratio_uncertainty: uncertainty,
    };
    if let Some(r) = report.rate_ratios.r01_12 {
        println!("gamma01 / gamma12 = {r:.4}");
    }
    println!("Gaussian width = {:.2} a0", report.gaussian_width_bohr);
    ctx.out.write_json("coefficients.json", &report)
}
