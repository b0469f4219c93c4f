use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use fwm_cli::{load_config, run, Mode, RunOptions};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Verb {
    /// Steady state of one parameter set, as a one-row CSV.
    Simulate,
    /// FWM intensity and factor over a parameter grid, as CSV.
    Sweep,
    /// Best factor over the sweep range, refined between grid points.
    Optimize,
    /// Run the numbered acceptance checks.
    Validate,
}

#[derive(Debug, Clone)]
struct CheckIds(Vec<u8>);

fn parse_check_ids(text: &str) -> Result<CheckIds, String> {
    fwm_cli::parse_check_ids(text).map(CheckIds)
}

/// Four-wave mixing of plasmon modes coupled to quantum emitters.
#[derive(Debug, Parser)]
#[command(name = "fwm", version)]
struct Args {
    verb: Verb,
    /// TOML run configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// fig1, fig2, fig3 or fig4; supplies defaults for every field.
    #[arg(long)]
    preset: Option<String>,
    /// Output file (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for sweeps; 0 uses every core.
    #[arg(long, env = "FWM_WORKERS", default_value_t = 0)]
    workers: usize,
    /// Override a config value, e.g. `params.f=0.05` or `sweep.n_points=301`.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    /// Comma-separated check ids for `validate`.
    #[arg(long, value_parser = parse_check_ids)]
    only: Option<CheckIds>,
    /// Replace both integrator tolerances during `validate`.
    #[arg(long)]
    integrator_tolerance: Option<f64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let mode = match args.verb {
        Verb::Simulate => Mode::Simulate,
        Verb::Sweep => Mode::Sweep,
        Verb::Optimize => Mode::Optimize,
        Verb::Validate => Mode::Validate,
    };
    let options = RunOptions {
        workers: args.workers,
        only: args.only.map(|c| c.0).unwrap_or_default(),
        integrator_tolerance: args.integrator_tolerance,
    };
    let result = load_config(
        mode,
        args.config.as_deref(),
        args.preset.as_deref(),
        args.out.as_deref(),
        &args.overrides,
    )
    .map_err(Into::into)
    .and_then(|config| run(&config, &options, &mut std::io::stderr()));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("fwm: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
