use spinpair::dynamics::{groundstate_initial, thermal_populations, Spectrum};
use spinpair::rate_model::write_trajectory_csv;
use spinpair::PopulationTrajectory;

use super::Context;
use crate::error::CliError;

pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    let prepared = ctx.prepare()?;
    let h = prepared.hamiltonian(ctx.config.b_field_g)?;
    let spectrum = Spectrum::new(&h)?;
    let times = ctx.config.time.seconds();
    let traj = if ctx.config.zero_temperature {
        let initial = groundstate_initial(&h)?;
        let r = spectrum.evolve(&initial, &times, false)?;
        PopulationTrajectory::from_rows(r.times, &r.populations)
    } else {
        thermal_populations(&spectrum, &prepared.thermal, &times)?
    };
    let err = traj.max_sum_error(1.0);
    if err > 1e-9 {
        return Err(CliError::Numeric(format!("population sum drifted by {err}")));
    }
    let mut buf = Vec::new();
    write_trajectory_csv(&mut buf, &traj)?;
    let last = traj.row(traj.len() - 1);
    println!("P00({} ms) = {:.6}", ctx.config.time.t_max_ms, last[0]);
    ctx.out.write("time_series.csv", &buf)
}
