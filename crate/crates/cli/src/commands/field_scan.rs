use spinpair::dynamics::{thermal_populations, Spectrum};

use super::Context;
use crate::error::CliError;
use crate::output::csv_table;

pub fn run(ctx: &mut Context, fields: &[f64]) -> Result<(), CliError> {
    if fields.is_empty() {
        return Err(CliError::Usage("field scan list is empty".into()));
    }
    if let Some(b) = fields.iter().find(|b| !(b.is_finite() && **b >= 0.0)) {
        return Err(CliError::Usage(format!("fields must be nonnegative, got {b} G")));
    }
    let prepared = ctx.prepare()?;
    let t = ctx.config.scan_time_ms * 1e-3;
    let mut rows = Vec::with_capacity(fields.len());
    for &b in fields {
        let h = prepared.hamiltonian(b)?;
        let spectrum = Spectrum::new(&h)?;
        let traj = thermal_populations(&spectrum, &prepared.thermal, &[t])?;
        let p = traj.row(0);
        println!("B = {b} G: P00 = {:.6}", p[0]);
        rows.push(vec![b, p[0], p[1], p[2]]);
    }
    let text = csv_table(&["b_gauss", "p00", "p1m1", "p2m2"], &rows);
    ctx.out.write("field_scan.csv", text.as_bytes())
}
