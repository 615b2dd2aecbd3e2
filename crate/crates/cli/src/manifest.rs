use serde::Serialize;

use crate::config::RunConfig;
use crate::output::FileDigest;

#[derive(Debug, Clone, Serialize)]
pub struct BasisSummary {
    pub modes: usize,
    /// Cutoff energy, units of `hbar * omega_bar` including zero point.
    pub cutoff_energy: f64,
    /// Thermal weight of the basis at the configured temperature.
    pub captured_weight: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Runtime {
    pub wall_seconds: f64,
    pub threads: usize,
}

/// Everything needed to repeat a run; only `runtime` varies between
/// repetitions.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: String,
    pub config: RunConfig,
    pub basis: Option<BasisSummary>,
    pub warnings: Vec<String>,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<FileDigest>,
    pub runtime: Runtime,
}
