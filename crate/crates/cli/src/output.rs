//! CSV emission and run metadata.

use std::io::Write;
use std::path::{Path, PathBuf};

use fwm_core::{Optimum, SteadyStateResult, SweepCurve};
use serde::Serialize;

pub const SWEEP_HEADER: [&str; 6] = [
    "param_value",
    "fwm_intensity",
    "factor",
    "rho_ee_1",
    "rho_ee_2",
    "converged",
];

/// 17 significant digits, enough to round-trip any f64.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_sweep_csv<W: Write>(curve: &SweepCurve, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(SWEEP_HEADER)?;
    for p in &curve.points {
        let rho = |k: usize| p.rho_ee.get(k).map(|&v| fmt_f64(v)).unwrap_or_default();
        w.write_record([
            fmt_f64(p.param_value),
            fmt_f64(p.fwm_intensity),
            fmt_f64(p.factor),
            rho(0),
            rho(1),
            p.converged.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn state_header(n_emitters: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=3)
        .flat_map(|k| [format!("alpha{k}_re"), format!("alpha{k}_im")])
        .collect();
    for k in 1..=n_emitters {
        h.push(format!("rho_ge_{k}_re"));
        h.push(format!("rho_ge_{k}_im"));
        h.push(format!("rho_ee_{k}"));
    }
    h.extend(
        [
            "fwm_intensity",
            "final_residual",
            "relative_drift",
            "converged",
        ]
        .map(String::from),
    );
    h
}

pub fn write_state_csv<W: Write>(result: &SteadyStateResult, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let s = &result.state;
    w.write_record(state_header(s.emitters.len()))?;
    let mut row: Vec<String> = s
        .alpha
        .iter()
        .flat_map(|a| [fmt_f64(a.re), fmt_f64(a.im)])
        .collect();
    for e in &s.emitters {
        row.push(fmt_f64(e.rho_ge.re));
        row.push(fmt_f64(e.rho_ge.im));
        row.push(fmt_f64(e.rho_ee));
    }
    row.push(fmt_f64(result.fwm_intensity));
    row.push(fmt_f64(result.final_residual));
    row.push(fmt_f64(result.relative_drift));
    row.push(result.converged.to_string());
    w.write_record(&row)?;
    w.flush()?;
    Ok(())
}

/// Written next to a sweep CSV as `<name>.meta.toml`.
#[derive(Debug, Clone, Serialize)]
pub struct SweepMeta {
    pub preset: Option<String>,
    pub target: String,
    pub baseline_kind: String,
    pub baseline_intensity: f64,
    pub n_points: usize,
    pub unconverged: usize,
}

impl SweepMeta {
    pub fn new(curve: &SweepCurve, preset: Option<String>) -> Self {
        Self {
            preset,
            target: curve.target.name().into(),
            baseline_kind: curve.baseline_kind.name().into(),
            baseline_intensity: curve.baseline_intensity,
            n_points: curve.points.len(),
            unconverged: curve.unconverged(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct OptimumReport {
    pub preset: Option<String>,
    pub target: String,
    pub param_value: f64,
    pub factor: f64,
    pub fwm_intensity: f64,
    pub baseline_kind: String,
    pub baseline_intensity: f64,
    pub grid_best_value: f64,
    pub grid_best_factor: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub single_emitter: Option<SingleComparison>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SingleComparison {
    pub param_value: f64,
    pub factor: f64,
    pub coupled_over_single: f64,
}

impl OptimumReport {
    pub fn new(o: &Optimum, target: &str, preset: Option<String>) -> Self {
        Self {
            preset,
            target: target.into(),
            param_value: o.param_value,
            factor: o.factor,
            fwm_intensity: o.fwm_intensity,
            baseline_kind: o.baseline_kind.name().into(),
            baseline_intensity: o.baseline_intensity,
            grid_best_value: o.grid_best.0,
            grid_best_factor: o.grid_best.1,
            single_emitter: None,
        }
    }
}

pub fn meta_path(csv_path: &Path) -> PathBuf {
    let mut name = csv_path
        .file_stem()
        .map(|s| s.to_os_string())
        .unwrap_or_default();
    name.push(".meta.toml");
    csv_path.with_file_name(name)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_precision_round_trip() {
        for v in [
            0.1,
            1.0 / 3.0,
            9.999_800_002e-11,
            f64::MIN_POSITIVE,
            -2.5e300,
        ] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn sidecar_name() {
        assert_eq!(
            meta_path(Path::new("out/fig1.csv")),
            Path::new("out/fig1.meta.toml")
        );
        assert_eq!(meta_path(Path::new("run")), Path::new("run.meta.toml"));
    }

    #[test]
    fn state_columns() {
        assert_eq!(state_header(1).len(), 6 + 3 + 4);
        assert_eq!(state_header(2)[9], "rho_ge_2_re");
    }
}
