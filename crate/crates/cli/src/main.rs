//! `spinpair` command-line interface.

mod commands;
mod config;
mod error;
mod manifest;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use spinpair::{BackendKind, CutoffPolicy};

use crate::commands::Context;
use crate::config::RunConfig;
use crate::error::CliError;
use crate::manifest::{InputDigest, RunManifest, Runtime};
use crate::output::{sha256_hex, OutputDir};

#[derive(Debug, Parser)]
#[command(name = "spinpair", version, about = "Spin-changing collisions of atom pairs in a harmonic trap")]
struct Cli {
    /// TOML run configuration; command-line flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory receiving result files and the run manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    #[arg(long, global = true, value_enum)]
    backend: Option<Backend>,
    /// Bias field, gauss.
    #[arg(long = "b-field", global = true)]
    b_field: Option<f64>,
    /// Temperature, microkelvin.
    #[arg(long = "temp", global = true)]
    temperature: Option<f64>,
    /// Basis captures this fraction of the thermal weight.
    #[arg(long, global = true, conflicts_with_all = ["cutoff_energy", "max_modes"])]
    capture: Option<f64>,
    /// Explicit basis cutoff, units of hbar * omega_bar.
    #[arg(long = "cutoff-energy", global = true, conflicts_with = "max_modes")]
    cutoff_energy: Option<f64>,
    /// Basis of at least this many modes.
    #[arg(long = "max-modes", global = true)]
    max_modes: Option<usize>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Run even when the basis exceeds the memory budget.
    #[arg(long = "allow-large", global = true)]
    allow_large: bool,
    #[arg(long = "memory-budget-mb", global = true)]
    memory_budget_mb: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Backend {
    Gaussian,
    Delta,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Spin-channel couplings, Gaussian width and rate ratios.
    Coefficients,
    /// Thermally averaged populations after a fixed time at several fields.
    FieldScan {
        /// Comma-separated fields, gauss.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        fields: Option<Vec<f64>>,
        /// Evolution time, milliseconds.
        #[arg(long = "time-ms")]
        time_ms: Option<f64>,
    },
    /// Spin populations on a uniform time grid.
    TimeSeries {
        #[arg(long = "t-max-ms")]
        t_max_ms: Option<f64>,
        #[arg(long)]
        steps: Option<usize>,
        /// Start from the interacting ground state instead of a thermal ensemble.
        #[arg(long = "zero-temperature")]
        zero_temperature: bool,
    },
    /// Fit the incoherent rate model to measured populations.
    RateFit {
        /// CSV with columns time_s, p00, p1m1, p2m2.
        #[arg(long)]
        data: PathBuf,
        /// Fixed gamma01 / gamma12.
        #[arg(long)]
        ratio: Option<f64>,
        /// Divide each row by the first row's total.
        #[arg(long)]
        normalize: bool,
        /// Weight residuals by binomial variance.
        #[arg(long)]
        weighted: bool,
    },
    /// Number squeezing and the detection-limited variance.
    Squeezing {
        /// Measured variance of the number difference.
        #[arg(long)]
        variance: Option<f64>,
        #[arg(long)]
        atoms: Option<u32>,
        /// CSV with columns time_s, p0, p1, p2 of ejection outcomes.
        #[arg(long)]
        outcomes: Option<PathBuf>,
        /// Comma-separated observed counts for a chi-squared test.
        #[arg(long, value_delimiter = ',', requires = "expected")]
        counts: Option<Vec<f64>>,
        /// Comma-separated expected proportions or counts.
        #[arg(long, value_delimiter = ',', requires = "counts")]
        expected: Option<Vec<f64>>,
        /// Degrees of freedom; defaults to classes minus one.
        #[arg(long)]
        df: Option<u32>,
        #[arg(long)]
        trials: Option<u64>,
        /// True fraction of pair-ejection events.
        #[arg(long = "pair-fraction")]
        pair_fraction: Option<f64>,
    },
    /// Fraction of thermal weight in mixed-parity modes.
    FrozenFraction,
    /// Reduced spin density matrix of the thermal ensemble.
    DensityMatrix {
        /// Comma-separated times, milliseconds.
        #[arg(long = "time-ms", value_delimiter = ',')]
        time_ms: Option<Vec<f64>>,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Coefficients => "coefficients",
            Command::FieldScan { .. } => "field-scan",
            Command::TimeSeries { .. } => "time-series",
            Command::RateFit { .. } => "rate-fit",
            Command::Squeezing { .. } => "squeezing",
            Command::FrozenFraction => "frozen-fraction",
            Command::DensityMatrix { .. } => "density-matrix",
        }
    }
}

/// Folds command-line overrides into the configuration.
fn resolve_config(cli: &Cli) -> Result<(RunConfig, Option<InputDigest>), CliError> {
    let (mut c, digest) = match &cli.config {
        Some(path) => {
            let (c, bytes) = RunConfig::load(path)?;
            let d = InputDigest {
                path: path.display().to_string(),
                sha256: sha256_hex(&bytes),
            };
            (c, Some(d))
        }
        None => (RunConfig::default(), None),
    };
    if let Some(b) = cli.backend {
        c.backend = match b {
            Backend::Gaussian => BackendKind::Gaussian,
            Backend::Delta => BackendKind::Delta,
        };
    }
    if let Some(b) = cli.b_field {
        c.b_field_g = b;
    }
    if let Some(t) = cli.temperature {
        c.temperature_uk = t;
    }
    if let Some(f) = cli.capture {
        c.cutoff = CutoffPolicy::Capture(f);
    }
    if let Some(e) = cli.cutoff_energy {
        c.cutoff = CutoffPolicy::Energy(e);
    }
    if let Some(n) = cli.max_modes {
        c.cutoff = CutoffPolicy::Modes(n);
    }
    if let Some(s) = cli.seed {
        c.seed = s;
    }
    if let Some(m) = cli.memory_budget_mb {
        c.memory_budget_mb = m;
    }
    match &cli.command {
        Command::FieldScan { fields, time_ms } => {
            if let Some(f) = fields {
                c.field_scan_g = f.clone();
            }
            if let Some(t) = time_ms {
                c.scan_time_ms = *t;
            }
        }
        Command::TimeSeries {
            t_max_ms,
            steps,
            zero_temperature,
        } => {
            if let Some(t) = t_max_ms {
                c.time.t_max_ms = *t;
            }
            if let Some(s) = steps {
                c.time.steps = *s;
            }
            c.zero_temperature |= *zero_temperature;
        }
        Command::RateFit { ratio: Some(r), .. } => c.rate_ratio = *r,
        Command::Squeezing {
            variance,
            atoms,
            trials,
            pair_fraction,
            ..
        } => {
            if let Some(v) = variance {
                c.measured_variance = *v;
            }
            if let Some(a) = atoms {
                c.atoms = *a;
            }
            if let Some(t) = trials {
                c.detection.trials = *t;
            }
            if let Some(p) = pair_fraction {
                c.detection.pair_fraction = *p;
            }
        }
        Command::DensityMatrix { time_ms: Some(t) } => c.density_times_ms = t.clone(),
        _ => {}
    }
    c.validate()?;
    Ok((c, digest))
}

fn run(cli: Cli, started: Instant) -> Result<(), CliError> {
    let threads = match cli.threads {
        Some(0) => return Err(CliError::Usage("--threads must be at least one".into())),
        Some(n) => n,
        None => std::thread::available_parallelism().map_or(1, |n| n.get()),
    };
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build_global()
        .map_err(|e| CliError::Numeric(format!("cannot start thread pool: {e}")))?;

    let (config, digest) = resolve_config(&cli)?;
    let out = OutputDir::create(&cli.out)?;
    let mut ctx = Context {
        config,
        out,
        allow_large: cli.allow_large,
        inputs: digest.into_iter().collect(),
        basis: None,
        warnings: Vec::new(),
    };
    match &cli.command {
        Command::Coefficients => commands::coefficients(&mut ctx)?,
        Command::FieldScan { .. } => {
            let fields = ctx.config.field_scan_g.clone();
            commands::field_scan(&mut ctx, &fields)?
        }
        Command::TimeSeries { .. } => commands::time_series(&mut ctx)?,
        Command::RateFit {
            data,
            normalize,
            weighted,
            ..
        } => commands::rate_fit(&mut ctx, data, *normalize, *weighted)?,
        Command::Squeezing {
            outcomes,
            counts,
            expected,
            df,
            ..
        } => {
            let chi = match (counts, expected) {
                (Some(c), Some(e)) => Some(commands::ChiSquaredInput {
                    counts: c.clone(),
                    expected: e.clone(),
                    df: *df,
                }),
                _ => None,
            };
            commands::squeezing(&mut ctx, outcomes.as_deref(), chi)?
        }
        Command::FrozenFraction => commands::frozen_fraction(&mut ctx)?,
        Command::DensityMatrix { .. } => commands::density_matrix(&mut ctx)?,
    }

    for w in &ctx.warnings {
        eprintln!("warning: {w}");
    }
    let resolved = ctx.config.to_toml()?;
    ctx.out.write("resolved_config.toml", resolved.as_bytes())?;
    let manifest = RunManifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        command: cli.command.name().to_string(),
        config: ctx.config.clone(),
        basis: ctx.basis.clone(),
        warnings: ctx.warnings.clone(),
        inputs: ctx.inputs.clone(),
        outputs: ctx.out.written().to_vec(),
        runtime: Runtime {
            wall_seconds: started.elapsed().as_secs_f64(),
            threads,
        },
    };
    ctx.out.write_json("manifest.json", &manifest)?;
    println!("wrote {}", ctx.out.root().display());
    Ok(())
}

fn main() -> ExitCode {
    let started = Instant::now();
    let cli = Cli::parse();
    match run(cli, started) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
