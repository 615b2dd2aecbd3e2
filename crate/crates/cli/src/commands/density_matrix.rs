use serde::Serialize;
use spinpair::dynamics::{reduced_density_matrix, Postselection, Spectrum, SPIN_LABELS};
use spinpair::{postselect_entangled, Sector, ThermalEnsemble};

use super::Context;
use crate::error::CliError;
use crate::output::complex_matrix;

#[derive(Serialize)]
struct Snapshot {
    time_ms: f64,
    /// Rows of `[re, im]` over `basis`.
    matrix: Vec<Vec<[f64; 2]>>,
    trace: f64,
    hermiticity_error: f64,
    min_eigenvalue: f64,
    sector_spread: f64,
    plus_minus_one: Postselection,
    plus_minus_two: Postselection,
}

#[derive(Serialize)]
struct Report {
    basis: [&'static str; 5],
    b_field_g: f64,
    snapshots: Vec<Snapshot>,
}

pub fn run(ctx: &mut Context) -> Result<(), CliError> {
    let times_ms = ctx.config.density_times_ms.clone();
    if times_ms.is_empty() {
        return Err(CliError::Usage("density_times_ms is empty".into()));
    }
    let prepared = ctx.prepare()?;
    let h = prepared.hamiltonian(ctx.config.b_field_g)?;
    let spectrum = Spectrum::new(&h)?;
    let ensemble = ThermalEnsemble::new(&spectrum, &prepared.thermal.probabilities)?;
    let seconds: Vec<f64> = times_ms.iter().map(|t| t * 1e-3).collect();
    let rhos = reduced_density_matrix(&ensemble, &seconds)?;
    let mut snapshots = Vec::with_capacity(rhos.len());
    for (t, rho) in times_ms.iter().zip(&rhos) {
        let snap = Snapshot {
            time_ms: *t,
            matrix: complex_matrix(&rho.entries),
            trace: rho.trace(),
            hermiticity_error: rho.hermiticity_error(),
            min_eigenvalue: rho.min_eigenvalue()?,
            sector_spread: rho.sector_spread(),
            plus_minus_one: postselect_entangled(rho, Sector::PlusMinusOne),
            plus_minus_two: postselect_entangled(rho, Sector::PlusMinusTwo),
        };
        if snap.min_eigenvalue < -1e-9 {
            return Err(CliError::Numeric(format!(
                "density matrix at {t} ms has eigenvalue {}",
                snap.min_eigenvalue
            )));
        }
        println!(
            "t = {t} ms: P(+-1) = {:.6}, P(+-2) = {:.6}",
            snap.plus_minus_one.probability, snap.plus_minus_two.probability
        );
        snapshots.push(snap);
    }
    let report = Report {
        basis: SPIN_LABELS,
        b_field_g: ctx.config.b_field_g,
        snapshots,
    };
    ctx.out.write_json("density_matrix.json", &report)
}
