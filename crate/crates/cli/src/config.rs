//! Run configuration: defaults, TOML file, then command-line overrides.

use std::path::Path;

use serde::{Deserialize, Serialize};
use spinpair::measurement::DetectionModel;
use spinpair::{BackendKind, CutoffPolicy, Scenario, ScatteringLengths, TrapFrequencies, ZeemanShifts};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TimeGrid {
    pub t_max_ms: f64,
    /// Intervals; the grid has `steps + 1` points including zero.
    pub steps: usize,
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_max_ms: 40.0,
            steps: 200,
        }
    }
}

impl TimeGrid {
    /// Times in seconds.
    pub fn seconds(&self) -> Vec<f64> {
        (0..=self.steps)
            .map(|i| self.t_max_ms * 1e-3 * i as f64 / self.steps as f64)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DetectionConfig {
    pub eta_f2: f64,
    pub eta_f3: f64,
    /// Pair fraction of the perfectly correlated true outcome.
    pub pair_fraction: f64,
    pub trials: u64,
}

impl Default for DetectionConfig {
    fn default() -> Self {
        let m = DetectionModel::rb85();
        Self {
            eta_f2: m.eta_f2,
            eta_f3: m.eta_f3,
            pair_fraction: 1.0 / 3.0,
            trials: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Trap frequencies `(x, y, z)`, kHz.
    pub trap_khz: [f64; 3],
    pub temperature_uk: f64,
    /// Start from the interacting ground state instead of a thermal ensemble.
    pub zero_temperature: bool,
    pub b_field_g: f64,
    pub field_scan_g: Vec<f64>,
    pub scan_time_ms: f64,
    /// `(a0, a2, a4)`, Bohr radii.
    pub scattering_lengths: [f64; 3],
    /// Quadratic Zeeman coefficients `(q1, q2)`, Hz/G^2.
    pub zeeman_hz_per_g2: [f64; 2],
    pub backend: BackendKind,
    pub cutoff: CutoffPolicy,
    pub time: TimeGrid,
    pub density_times_ms: Vec<f64>,
    pub rate_ratio: f64,
    /// Measured imbalance variance for the squeezing report.
    pub measured_variance: f64,
    pub atoms: u32,
    pub detection: DetectionConfig,
    pub seed: u64,
    pub memory_budget_mb: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let lengths = ScatteringLengths::rb85();
        let zeeman = ZeemanShifts::default();
        Self {
            trap_khz: [8.9, 55.5, 56.055],
            temperature_uk: 2.0,
            zero_temperature: false,
            b_field_g: 8.5,
            field_scan_g: vec![0.0, 0.5, 1.0, 2.0, 3.0, 4.0, 6.0, 8.5, 12.0],
            scan_time_ms: 40.0,
            scattering_lengths: lengths.as_array(),
            zeeman_hz_per_g2: [zeeman.q1, zeeman.q2],
            backend: BackendKind::Gaussian,
            cutoff: CutoffPolicy::default(),
            time: TimeGrid::default(),
            density_times_ms: vec![0.0, 10.0, 20.0, 40.0],
            rate_ratio: spinpair::rate_model::DEFAULT_RATIO,
            measured_variance: 0.032,
            atoms: 2,
            detection: DetectionConfig::default(),
            seed: 0,
            memory_budget_mb: 4096.0,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<(Self, Vec<u8>), CliError> {
        let bytes = std::fs::read(path).map_err(|e| CliError::Usage(format!("cannot read {}: {e}", path.display())))?;
        let text = std::str::from_utf8(&bytes)
            .map_err(|_| CliError::Usage(format!("{} is not valid UTF-8", path.display())))?;
        let config = toml::from_str(text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Ok((config, bytes))
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Numeric(format!("cannot serialise configuration: {e}")))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Usage(m));
        if !(self.temperature_uk.is_finite() && self.temperature_uk > 0.0) {
            return bad(format!("temperature must be positive, got {} uK", self.temperature_uk));
        }
        if !(self.b_field_g.is_finite() && self.b_field_g >= 0.0) {
            return bad(format!("bias field must be nonnegative, got {} G", self.b_field_g));
        }
        if self.time.steps == 0 || !(self.time.t_max_ms.is_finite() && self.time.t_max_ms > 0.0) {
            return bad("time grid needs a positive duration and at least one step".into());
        }
        if !(self.scan_time_ms.is_finite() && self.scan_time_ms >= 0.0) {
            return bad(format!("scan time must be nonnegative, got {} ms", self.scan_time_ms));
        }
        if !(self.memory_budget_mb.is_finite() && self.memory_budget_mb > 0.0) {
            return bad("memory budget must be positive".into());
        }
        if self.atoms == 0 {
            return bad("atom number must be at least one".into());
        }
        self.scenario()?;
        Ok(())
    }

    pub fn trap(&self) -> Result<TrapFrequencies, CliError> {
        let [x, y, z] = self.trap_khz;
        Ok(TrapFrequencies::from_khz(x, y, z)?)
    }

    pub fn lengths(&self) -> Result<ScatteringLengths, CliError> {
        let [a0, a2, a4] = self.scattering_lengths;
        Ok(ScatteringLengths::new(a0, a2, a4)?)
    }

    pub fn kelvin(&self) -> f64 {
        self.temperature_uk * 1e-6
    }

    pub fn scenario(&self) -> Result<Scenario, CliError> {
        Ok(Scenario {
            trap: self.trap()?,
            lengths: self.lengths()?,
            backend: self.backend,
            zeeman: ZeemanShifts {
                q1: self.zeeman_hz_per_g2[0],
                q2: self.zeeman_hz_per_g2[1],
            },
            cutoff: self.cutoff,
            temperature: self.kelvin(),
        })
    }

    pub fn detection_model(&self) -> Result<DetectionModel, CliError> {
        Ok(DetectionModel::new(self.detection.eta_f2, self.detection.eta_f3)?)
    }
}
