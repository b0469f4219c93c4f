//! Run configuration files.
//!
//! ```toml
//! # Frequencies and rates in units of the first drive frequency ω.
//! mode = "sweep"            # simulate | sweep | optimize | validate
//! preset = "fig3"           # fig1 | fig2 | fig3 | fig4
//! output = "fig3.csv"
//!
//! [params]                  # field-by-field overrides of the preset
//! f = 0.12
//! eps_p = [1e-3, 0.0]       # complex values as [re, im]
//!
//! [sweep]
//! target = "omega_eg"
//! start = 1.40
//! stop = 1.70
//! n_points = 1201
//! baseline = "off-resonant-no-emitter"
//!
//! [settings]
//! rel_tol = 1e-9
//! ```
//!
//! Without a preset, `[params]` must list every field of one system kind
//! (`kind = "single"` or `"coupled"`, inferred from the field names when
//! omitted). Unknown keys are errors.

use std::path::PathBuf;
use std::str::FromStr;

use fwm_core::{
    BaselineKind, Complex64, CoupledEmitterParams, IntegrationSettings, ParamValue, Preset,
    SingleEmitterParams, SweepSpec, SweepTarget, SystemParams,
};
use thiserror::Error;
use toml::{Table, Value};

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("invalid `{key}`: {message}")]
    Validation { key: String, message: String },
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}

fn invalid(key: impl Into<String>, message: impl ToString) -> ConfigError {
    ConfigError::Validation {
        key: key.into(),
        message: message.to_string(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mode {
    Simulate,
    Sweep,
    Optimize,
    Validate,
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "simulate" => Ok(Mode::Simulate),
            "sweep" => Ok(Mode::Sweep),
            "optimize" => Ok(Mode::Optimize),
            "validate" => Ok(Mode::Validate),
            other => Err(format!(
                "`{other}` is not one of simulate, sweep, optimize, validate"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepBlock {
    pub spec: SweepSpec,
    pub baseline: BaselineKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: Mode,
    pub preset: Option<Preset>,
    pub params: SystemParams,
    pub sweep: Option<SweepBlock>,
    pub output_path: Option<PathBuf>,
    pub settings: IntegrationSettings,
}

const TOP_KEYS: &[&str] = &["mode", "preset", "output", "params", "sweep", "settings"];
const SWEEP_KEYS: &[&str] = &["target", "start", "stop", "n_points", "baseline"];
const SETTINGS_KEYS: &[&str] = &[
    "rel_tol",
    "abs_tol",
    "steady_residual_tol",
    "max_time",
    "residual_window",
];

/// Parses TOML text into a table, reporting syntax errors as `Parse`.
pub fn parse_table(text: &str) -> Result<Table, ConfigError> {
    text.parse::<Table>()
        .map_err(|e| ConfigError::Parse(e.to_string()))
}

/// Applies a `dotted.key=value` override, where `value` is TOML
/// (bare words are taken as strings).
pub fn apply_override(table: &mut Table, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::Parse(format!("override `{assignment}` is not key=value")))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").expect("just inserted"),
        Err(_) => Value::String(raw.to_string()),
    };
    let mut parts: Vec<&str> = key.split('.').collect();
    let last = parts
        .pop()
        .filter(|s| !s.is_empty())
        .ok_or_else(|| ConfigError::Parse(format!("empty key in `{assignment}`")))?;
    let mut node = table;
    for part in parts {
        node = node
            .entry(part)
            .or_insert_with(|| Value::Table(Table::new()))
            .as_table_mut()
            .ok_or_else(|| invalid(key, format!("`{part}` is not a section")))?;
    }
    node.insert(last.to_string(), value);
    Ok(())
}

pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    from_table(parse_table(text)?, None)
}

fn check_keys(table: &Table, allowed: &[&str], prefix: &str) -> Result<(), ConfigError> {
    for key in table.keys() {
        if !allowed.contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(format!("{prefix}{key}")));
        }
    }
    Ok(())
}

fn section<'a>(table: &'a Table, name: &str) -> Result<Option<&'a Table>, ConfigError> {
    match table.get(name) {
        None => Ok(None),
        Some(Value::Table(t)) => Ok(Some(t)),
        Some(_) => Err(invalid(name, "expected a section")),
    }
}

fn as_str<'a>(value: &'a Value, key: &str) -> Result<&'a str, ConfigError> {
    value
        .as_str()
        .ok_or_else(|| invalid(key, "expected a string"))
}

fn as_f64(value: &Value, key: &str) -> Result<f64, ConfigError> {
    match value {
        Value::Float(v) => Ok(*v),
        Value::Integer(v) => Ok(*v as f64),
        _ => Err(invalid(key, "expected a number")),
    }
}

fn as_param(value: &Value, key: &str) -> Result<ParamValue, ConfigError> {
    match value {
        Value::Array(items) if items.len() == 2 => Ok(ParamValue::Complex(Complex64::new(
            as_f64(&items[0], key)?,
            as_f64(&items[1], key)?,
        ))),
        Value::Array(_) => Err(invalid(key, "complex values are written [re, im]")),
        other => Ok(ParamValue::Real(as_f64(other, key)?)),
    }
}

fn parse_enum<T: FromStr>(value: &Value, key: &str) -> Result<T, ConfigError>
where
    T::Err: ToString,
{
    as_str(value, key)?
        .parse()
        .map_err(|e: T::Err| invalid(key, e))
}

fn blank_params(kind: &str) -> Option<SystemParams> {
    let zero = Complex64::new(0.0, 0.0);
    match kind {
        "single" => Some(SystemParams::Single(SingleEmitterParams {
            omega1: 0.0,
            omega2: 0.0,
            omega3: 0.0,
            omega_eg: 0.0,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma_ee: 0.0,
            gamma_eg: 0.0,
            chi: 0.0,
            f: zero,
            eps_p: zero,
            eps_p_prime: zero,
            omega_drive: 0.0,
            omega_drive_prime: 0.0,
        })),
        "coupled" => Some(SystemParams::Coupled(CoupledEmitterParams {
            omega1: 0.0,
            omega2: 0.0,
            omega3: 0.0,
            omega_eg_1: 0.0,
            omega_eg_2: 0.0,
            gamma1: 0.0,
            gamma2: 0.0,
            gamma3: 0.0,
            gamma_ee_1: 0.0,
            gamma_ee_2: 0.0,
            gamma_eg_1: 0.0,
            gamma_eg_2: 0.0,
            chi: 0.0,
            f1: zero,
            f2: zero,
            g: zero,
            eps_p: zero,
            eps_p_prime: zero,
            omega_drive: 0.0,
            omega_drive_prime: 0.0,
        })),
        _ => None,
    }
}

fn build_params(
    preset: Option<Preset>,
    block: Option<&Table>,
) -> Result<SystemParams, ConfigError> {
    let empty = Table::new();
    let block = block.unwrap_or(&empty);
    let mut params = match preset {
        Some(p) => p.params(),
        None => {
            let kind = match block.get("kind") {
                Some(v) => as_str(v, "params.kind")?.to_string(),
                None if block
                    .keys()
                    .any(|k| k.ends_with("_1") || k == "f1" || k == "g") =>
                {
                    "coupled".into()
                }
                None => "single".into(),
            };
            let blank = blank_params(&kind)
                .ok_or_else(|| invalid("params.kind", "expected `single` or `coupled`"))?;
            if block.is_empty() {
                return Err(invalid(
                    "params",
                    "a preset or a full parameter block is required",
                ));
            }
            for field in blank.field_names() {
                if !block.contains_key(*field) {
                    return Err(invalid(
                        format!("params.{field}"),
                        "missing (no preset given)",
                    ));
                }
            }
            blank
        }
    };
    if let Some(v) = block.get("kind") {
        let kind = as_str(v, "params.kind")?;
        let actual = if params.emitter_count() == 2 {
            "coupled"
        } else {
            "single"
        };
        if kind != actual {
            return Err(invalid(
                "params.kind",
                format!("preset is {actual}-emitter"),
            ));
        }
    }
    for (key, value) in block {
        if key == "kind" {
            continue;
        }
        if !params.field_names().contains(&key.as_str()) {
            return Err(ConfigError::UnknownKey(format!("params.{key}")));
        }
        let full = format!("params.{key}");
        params
            .set_field(key, as_param(value, &full)?)
            .map_err(|e| invalid(full, e))?;
    }
    params.validate().map_err(|e| {
        let key = match &e {
            fwm_core::ParamError::NotPositive { field, .. }
            | fwm_core::ParamError::NotFinite { field }
            | fwm_core::ParamError::ExpectedReal { field } => format!("params.{field}"),
            fwm_core::ParamError::NegativeChi(_) => "params.chi".into(),
            fwm_core::ParamError::UnknownField { name, .. } => format!("params.{name}"),
        };
        invalid(key, e)
    })?;
    Ok(params)
}

fn build_sweep(
    preset: Option<Preset>,
    params: &SystemParams,
    block: Option<&Table>,
) -> Result<Option<SweepBlock>, ConfigError> {
    let defaults = preset.map(|p| (p.sweep(), p.baseline()));
    let Some(block) = block else {
        return Ok(defaults.map(|(mut spec, baseline)| {
            spec.base_params = *params;
            SweepBlock { spec, baseline }
        }));
    };
    check_keys(block, SWEEP_KEYS, "sweep.")?;
    let field = |name: &str| -> Result<Option<&Value>, ConfigError> {
        match (block.get(name), &defaults) {
            (Some(v), _) => Ok(Some(v)),
            (None, Some(_)) => Ok(None),
            (None, None) => Err(invalid(
                format!("sweep.{name}"),
                "missing (no preset given)",
            )),
        }
    };
    let (mut spec, mut baseline) = match &defaults {
        Some((spec, baseline)) => (spec.clone(), *baseline),
        None => (
            SweepSpec {
                target: SweepTarget::OmegaEg,
                start: 0.0,
                stop: 0.0,
                n_points: 0,
                base_params: *params,
            },
            BaselineKind::OffResonantNoEmitter,
        ),
    };
    spec.base_params = *params;
    if let Some(v) = field("target")? {
        spec.target = parse_enum(v, "sweep.target")?;
    }
    if let Some(v) = field("start")? {
        spec.start = as_f64(v, "sweep.start")?;
    }
    if let Some(v) = field("stop")? {
        spec.stop = as_f64(v, "sweep.stop")?;
    }
    if let Some(v) = field("n_points")? {
        let n = v
            .as_integer()
            .filter(|n| *n >= 0)
            .ok_or_else(|| invalid("sweep.n_points", "expected a non-negative integer"))?;
        spec.n_points = n as usize;
    }
    if let Some(v) = field("baseline")? {
        baseline = parse_enum(v, "sweep.baseline")?;
    }
    spec.validate().map_err(|e| invalid("sweep", e))?;
    Ok(Some(SweepBlock { spec, baseline }))
}

fn build_settings(
    params: &SystemParams,
    block: Option<&Table>,
) -> Result<IntegrationSettings, ConfigError> {
    let mut s = IntegrationSettings::for_params(params);
    if let Some(block) = block {
        check_keys(block, SETTINGS_KEYS, "settings.")?;
        for (key, value) in block {
            let full = format!("settings.{key}");
            let v = as_f64(value, &full)?;
            match key.as_str() {
                "rel_tol" => s.rel_tol = v,
                "abs_tol" => s.abs_tol = v,
                "steady_residual_tol" => s.steady_residual_tol = v,
                "max_time" => s.max_time = v,
                _ => s.residual_window = v,
            }
        }
    }
    s.validate().map_err(|e| {
        let key = match &e {
            fwm_core::SettingsError::NotPositive { field, .. } => format!("settings.{field}"),
            fwm_core::SettingsError::WindowExceedsHorizon { .. } => "settings.max_time".into(),
        };
        invalid(key, e)
    })?;
    Ok(s)
}

/// Validates a parsed table. `mode` overrides the table's `mode` key.
pub fn from_table(table: Table, mode: Option<Mode>) -> Result<RunConfig, ConfigError> {
    check_keys(&table, TOP_KEYS, "")?;
    let mode = match (mode, table.get("mode")) {
        (Some(m), _) => m,
        (None, Some(v)) => parse_enum(v, "mode")?,
        (None, None) => return Err(invalid("mode", "missing")),
    };
    let preset = table
        .get("preset")
        .map(|v| parse_enum::<Preset>(v, "preset"))
        .transpose()?;
    let output_path = table
        .get("output")
        .map(|v| as_str(v, "output").map(PathBuf::from))
        .transpose()?;

    if mode == Mode::Validate && preset.is_none() && !table.contains_key("params") {
        return Ok(RunConfig {
            mode,
            preset: None,
            params: Preset::Fig1.params(),
            sweep: None,
            output_path,
            settings: IntegrationSettings::for_params(&Preset::Fig1.params()),
        });
    }

    let params = build_params(preset, section(&table, "params")?)?;
    let sweep = build_sweep(preset, &params, section(&table, "sweep")?)?;
    if matches!(mode, Mode::Sweep | Mode::Optimize) && sweep.is_none() {
        return Err(invalid(
            "sweep",
            "a [sweep] section is required for this mode",
        ));
    }
    let settings = build_settings(&params, section(&table, "settings")?)?;
    Ok(RunConfig {
        mode,
        preset,
        params,
        sweep,
        output_path,
        settings,
    })
}
