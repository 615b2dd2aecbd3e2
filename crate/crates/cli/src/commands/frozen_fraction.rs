use serde::Serialize;
use spinpair::partition_functions;

use super::Context;
use crate::error::CliError;

#[derive(Serialize)]
struct Report {
    temperature_uk: f64,
    /// `hbar omega_i / (k_B T)` per axis.
    axis_beta: [f64; 3],
    frozen_fraction: f64,
    /// Exchange-even partition function relative to the ground state.
    partition_function: f64,
}

pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    let trap = ctx.config.trap()?;
    let pf = partition_functions(&trap, ctx.config.kelvin())?;
    let report = Report {
        temperature_uk: ctx.config.temperature_uk,
        axis_beta: pf.x,
        frozen_fraction: pf.frozen_fraction(),
        partition_function: pf.z_shifted,
    };
    println!("frozen fraction = {:.6}", report.frozen_fraction);
    ctx.out.write_json("frozen_fraction.json", &report)
}
