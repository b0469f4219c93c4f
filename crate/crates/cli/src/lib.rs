//! Front end of the `fwm` binary: config files, run modes and CSV output.
//!
//! ```text
//! fwm sweep --preset fig1 --out fig1.csv
//! fwm optimize --config fig4.toml --set sweep.n_points=301
//! fwm simulate --preset fig3 --set params.omega_eg=1.5286
//! fwm validate --only 1,5,9
//! ```
//!
//! Exit codes: 0 success, 1 failed validation check, 2 config error,
//! 3 runtime error or unconverged steady state.

pub mod config;
pub mod output;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use fwm_core::validation::{Suite, SuiteConfig, CHECK_IDS};
use fwm_core::{SweepRunner, SweepTarget, SystemParams};
use thiserror::Error;

pub use config::{
    apply_override, from_table, parse_config, parse_table, ConfigError, Mode, RunConfig,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{0}")]
    Runtime(String),
    #[error("{0}")]
    NotConverged(String),
    #[error("{failed} of {total} validation checks failed")]
    ValidationFailed { failed: usize, total: usize },
    #[error("cannot write {path}: {message}")]
    Output { path: String, message: String },
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::ValidationFailed { .. } => 1,
            CliError::Config(_) => 2,
            CliError::Runtime(_) | CliError::NotConverged(_) | CliError::Output { .. } => 3,
        }
    }
}

impl From<fwm_core::SweepError> for CliError {
    fn from(e: fwm_core::SweepError) -> Self {
        CliError::Runtime(e.to_string())
    }
}

/// Everything a run needs besides the config itself.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub workers: usize,
    /// Check ids for `validate`; all when empty.
    pub only: Vec<u8>,
    pub integrator_tolerance: Option<f64>,
}

/// Reads the optional config file, layers preset/output/overrides on top
/// and validates the result for `mode`.
pub fn load_config(
    mode: Mode,
    path: Option<&Path>,
    preset: Option<&str>,
    out: Option<&Path>,
    overrides: &[String],
) -> Result<RunConfig, ConfigError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| ConfigError::Io {
                path: p.to_path_buf(),
                source,
            })?;
            parse_table(&text)?
        }
        None => toml::Table::new(),
    };
    if let Some(p) = preset {
        table.insert("preset".into(), toml::Value::String(p.into()));
    }
    if let Some(o) = out {
        table.insert(
            "output".into(),
            toml::Value::String(o.to_string_lossy().into_owned()),
        );
    }
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    from_table(table, Some(mode))
}

enum Sink {
    Stdout,
    File(PathBuf),
}

impl Sink {
    fn new(path: &Option<PathBuf>) -> Self {
        path.clone().map_or(Sink::Stdout, Sink::File)
    }

    fn write(&self, f: impl FnOnce(&mut dyn Write) -> Result<(), String>) -> Result<(), CliError> {
        let fail = |path: &str, message: String| CliError::Output {
            path: path.into(),
            message,
        };
        match self {
            Sink::Stdout => {
                let stdout = io::stdout();
                let mut lock = stdout.lock();
                f(&mut lock).map_err(|m| fail("stdout", m))
            }
            Sink::File(p) => {
                let name = p.display().to_string();
                let file = File::create(p).map_err(|e| fail(&name, e.to_string()))?;
                let mut w = BufWriter::new(file);
                f(&mut w).map_err(|m| fail(&name, m))?;
                w.flush().map_err(|e| fail(&name, e.to_string()))
            }
        }
    }
}

fn preset_name(config: &RunConfig) -> Option<String> {
    config.preset.map(|p| p.name().to_string())
}

/// Runs `config`, writing data to its output path (stdout if unset) and a
/// one-line summary to `log`.
pub fn run(config: &RunConfig, options: &RunOptions, log: &mut dyn Write) -> Result<(), CliError> {
    let runner = SweepRunner::new(config.settings).with_workers(options.workers);
    let sink = Sink::new(&config.output_path);
    match config.mode {
        Mode::Simulate => {
            let r = runner.steady_state(&config.params)?;
            sink.write(|w| output::write_state_csv(&r, w).map_err(|e| e.to_string()))?;
            let _ = writeln!(
                log,
                "|α₃|² = {:e}, residual {:e}, converged {}",
                r.fwm_intensity, r.final_residual, r.converged
            );
            if !r.converged {
                return Err(CliError::NotConverged(format!(
                    "no steady state within t = {} (drift {:e})",
                    r.elapsed_sim_time, r.relative_drift
                )));
            }
        }
        Mode::Sweep => {
            let block = config.sweep.as_ref().expect("validated");
            let curve = runner.run_sweep(&block.spec, block.baseline)?;
            sink.write(|w| output::write_sweep_csv(&curve, w).map_err(|e| e.to_string()))?;
            let meta = output::SweepMeta::new(&curve, preset_name(config));
            if let Sink::File(p) = &sink {
                let path = output::meta_path(p);
                let text = toml::to_string(&meta).map_err(|e| CliError::Runtime(e.to_string()))?;
                std::fs::write(&path, text).map_err(|e| CliError::Output {
                    path: path.display().to_string(),
                    message: e.to_string(),
                })?;
            }
            let _ = writeln!(
                log,
                "{} points, baseline {} = {:e}",
                curve.points.len(),
                meta.baseline_kind,
                curve.baseline_intensity
            );
            if meta.unconverged > 0 {
                return Err(CliError::NotConverged(format!(
                    "{} of {} points did not reach a steady state",
                    meta.unconverged,
                    curve.points.len()
                )));
            }
        }
        Mode::Optimize => {
            let block = config.sweep.as_ref().expect("validated");
            let spec = &block.spec;
            let optimum = runner.find_optimum(spec, block.baseline)?;
            let mut report =
                output::OptimumReport::new(&optimum, spec.target.name(), preset_name(config));
            if let (SystemParams::Coupled(p), SweepTarget::OmegaEg1) =
                (&spec.base_params, spec.target)
            {
                let mut single = spec.clone();
                single.base_params = SystemParams::Single(p.emitter1_only());
                single.target = SweepTarget::OmegaEg;
                let s = runner.find_optimum(&single, block.baseline)?;
                report.single_emitter = Some(output::SingleComparison {
                    param_value: s.param_value,
                    factor: s.factor,
                    coupled_over_single: optimum.factor / s.factor,
                });
            }
            let text = toml::to_string(&report).map_err(|e| CliError::Runtime(e.to_string()))?;
            sink.write(|w| w.write_all(text.as_bytes()).map_err(|e| e.to_string()))?;
            let _ = writeln!(
                log,
                "optimum factor {:.4} at {} = {:.6}",
                optimum.factor,
                spec.target.name(),
                optimum.param_value
            );
        }
        Mode::Validate => {
            let suite = Suite::new(SuiteConfig {
                integrator_tolerance: options.integrator_tolerance,
                workers: options.workers,
                ..SuiteConfig::default()
            });
            let ids: Vec<u8> = if options.only.is_empty() {
                CHECK_IDS.to_vec()
            } else {
                options.only.clone()
            };
            let mut failed = 0;
            let mut lines = Vec::new();
            for id in &ids {
                let record = suite.check(*id);
                failed += usize::from(!record.passed);
                let line = format!("{record}\n       claim: {}\n", record.claim);
                let _ = log.write_all(line.as_bytes());
                lines.push(line);
            }
            let summary = format!("{}/{} checks passed\n", ids.len() - failed, ids.len());
            let _ = log.write_all(summary.as_bytes());
            if let Sink::File(_) = sink {
                sink.write(|w| {
                    lines
                        .iter()
                        .chain([&summary])
                        .try_for_each(|l| w.write_all(l.as_bytes()))
                        .map_err(|e| e.to_string())
                })?;
            }
            if failed > 0 {
                return Err(CliError::ValidationFailed {
                    failed,
                    total: ids.len(),
                });
            }
        }
    }
    Ok(())
}

/// Parses `1,5,9` into check ids.
pub fn parse_check_ids(text: &str) -> Result<Vec<u8>, String> {
    text.split(',')
        .map(|s| {
            let id: u8 = s
                .trim()
                .parse()
                .map_err(|_| format!("`{s}` is not a check id"))?;
            if CHECK_IDS.contains(&id) {
                Ok(id)
            } else {
                Err(format!("no check {id} (expected 1 to {})", CHECK_IDS.len()))
            }
        })
        .collect()
}
