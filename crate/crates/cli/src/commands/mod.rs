//! Subcommand implementations. Each writes its result files into the
//! context's output directory; `main` adds the manifest.

mod coefficients;
mod density_matrix;
mod field_scan;
mod frozen_fraction;
mod rate_fit;
mod squeezing;
mod time_series;

pub use coefficients::run as coefficients;
pub use density_matrix::run as density_matrix;
pub use field_scan::run as field_scan;
pub use frozen_fraction::run as frozen_fraction;
pub use rate_fit::run as rate_fit;
pub use squeezing::run as squeezing;
pub use time_series::run as time_series;
pub use squeezing::ChiSquaredInput;

use std::path::Path;

use spinpair::{CutoffPolicy, Prepared};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::{BasisSummary, InputDigest};
use crate::output::{sha256_hex, OutputDir};

/// Capture threshold below which a warning is recorded when the cutoff is
/// not itself a capture target.
const DEFAULT_CAPTURE: f64 = 0.999;

/// Working memory of a dense run: Hamiltonian, eigenvectors and the
/// thermal work matrices, all `(3N)^2` doubles.
pub fn dense_bytes(modes: usize) -> f64 {
    let d = 3.0 * modes as f64;
    6.0 * 8.0 * d * d
}

pub struct Context {
    pub config: RunConfig,
    pub out: OutputDir,
    pub allow_large: bool,
    pub inputs: Vec<InputDigest>,
    pub basis: Option<BasisSummary>,
    pub warnings: Vec<String>,
}

impl Context {
    /// Reads an input file and records its digest.
    pub fn read_input(&mut self, path: &Path) -> Result<Vec<u8>, CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        self.inputs.push(InputDigest {
            path: path.display().to_string(),
            sha256: sha256_hex(&bytes),
        });
        Ok(bytes)
    }

    /// Basis, thermal weights and couplings, subject to the memory budget.
    pub fn prepare(&mut self) -> Result<Prepared, CliError> {
        let scenario = self.config.scenario()?;
        let basis = scenario.basis()?;
        let needed_mb = dense_bytes(basis.len()) / 1e6;
        if needed_mb > self.config.memory_budget_mb && !self.allow_large {
            return Err(CliError::Usage(format!(
                "basis of {} modes needs about {needed_mb:.0} MB, above the {} MB budget; \
                 lower the capture fraction or temperature, raise memory_budget_mb, or pass --allow-large",
                basis.len(),
                self.config.memory_budget_mb
            )));
        }
        let prepared = scenario.prepare_with_basis(basis)?;
        let captured = prepared.thermal.captured_weight;
        self.basis = Some(BasisSummary {
            modes: prepared.basis.len(),
            cutoff_energy: prepared.basis.cutoff(),
            captured_weight: captured,
        });
        let target = match self.config.cutoff {
            CutoffPolicy::Capture(f) => f,
            _ => DEFAULT_CAPTURE,
        };
        if captured < target && !self.config.zero_temperature {
            self.warnings.push(format!(
                "basis captures {captured:.6} of the thermal weight, below {target}"
            ));
        }
        Ok(prepared)
    }
}
