use std::path::Path;

use serde::Serialize;
use spinpair::rate_model::{read_trajectory_csv, write_trajectory_csv, FitOptions, Normalization};
use spinpair::fit_rate;

use super::Context;
use crate::error::CliError;

#[derive(Serialize)]
struct Report {
    ratio: f64,
    gamma12: f64,
    gamma01: f64,
    residual: f64,
    degenerate: bool,
    points: usize,
}

pub fn run(ctx: &mut Context, data: &Path, normalize: bool, weighted: bool) -> Result<(), CliError> {
    let bytes = ctx.read_input(data)?;
    let norm = if normalize {
        Normalization::InitialTotal
    } else {
        Normalization::None
    };
    let traj = read_trajectory_csv(bytes.as_slice(), norm)
        .map_err(|e| CliError::Usage(format!("{}: {e}", data.display())))?;
    let options = FitOptions {
        weighted,
        ..FitOptions::default()
    };
    let ratio = ctx.config.rate_ratio;
    let fit = fit_rate(&traj, ratio, &options)?;
    let report = Report {
        ratio,
        gamma12: fit.gamma12,
        gamma01: fit.gamma01,
        residual: fit.residual,
        degenerate: fit.degenerate,
        points: traj.len(),
    };
    println!("gamma12 = {} 1/s (gamma01 = {} 1/s)", fit.gamma12, fit.gamma01);
    let mut curves = Vec::new();
    write_trajectory_csv(&mut curves, &fit.model)?;
    ctx.out.write_json("rate_fit.json", &report)?;
    ctx.out.write("rate_fit_curves.csv", &curves)
}
