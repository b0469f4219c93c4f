use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fwm_cli::{load_config, parse_table, ConfigError, Mode};
use fwm_core::{BaselineKind, IntegrationSettings, Preset, SweepRunner};

fn fwm(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fwm"))
        .args(args)
        .env_remove("FWM_WORKERS")
        .output()
        .expect("binary runs")
}

fn configs() -> Vec<PathBuf> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs");
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "toml"))
        .collect();
    files.sort();
    files
}

fn read_rows(path: &Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(String::from).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect();
    (header, rows)
}

#[test]
fn shipped_configs_parse() {
    let files = configs();
    assert!(files.len() >= 4);
    for path in files {
        let text = std::fs::read_to_string(&path).unwrap();
        let mode = parse_table(&text).unwrap()["mode"]
            .as_str()
            .unwrap()
            .parse::<Mode>()
            .unwrap();
        load_config(mode, Some(&path), None, None, &[])
            .unwrap_or_else(|e| panic!("{}: {e}", path.display()));
    }
}

#[test]
fn missing_config_file_is_a_config_error() {
    let e = load_config(
        Mode::Sweep,
        Some(Path::new("/nonexistent.toml")),
        None,
        None,
        &[],
    )
    .unwrap_err();
    assert!(matches!(e, ConfigError::Io { .. }));
    let out = fwm(&["sweep", "--config", "/nonexistent.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn three_point_sweep_writes_header_and_three_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("s.csv");
    let out = fwm(&[
        "sweep",
        "--preset",
        "fig1",
        "--set",
        "sweep.n_points=3",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = std::fs::read_to_string(&csv_path).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert_eq!(
        text.lines().next().unwrap(),
        "param_value,fwm_intensity,factor,rho_ee_1,rho_ee_2,converged"
    );
    let (_, rows) = read_rows(&csv_path);
    assert!(rows.iter().all(|r| r[4].is_empty() && r[5] == "true"));
    assert!(dir.path().join("s.meta.toml").exists());
}

#[test]
fn csv_round_trips_at_full_precision() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("fig1.csv");
    let out = fwm(&[
        "sweep",
        "--preset",
        "fig1",
        "--set",
        "sweep.start=1.45",
        "--set",
        "sweep.stop=1.55",
        "--set",
        "sweep.n_points=41",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());

    let mut spec = Preset::Fig1.sweep();
    (spec.start, spec.stop, spec.n_points) = (1.45, 1.55, 41);
    let curve = SweepRunner::new(IntegrationSettings::for_params(&spec.base_params))
        .run_sweep(&spec, BaselineKind::ResonantNoEmitter)
        .unwrap();

    let meta: toml::Table = std::fs::read_to_string(fwm_cli::output::meta_path(&csv_path))
        .unwrap()
        .parse()
        .unwrap();
    let baseline = meta["baseline_intensity"].as_float().unwrap();
    assert_eq!(baseline.to_bits(), curve.baseline_intensity.to_bits());
    assert_eq!(meta["baseline_kind"].as_str(), Some("resonant-no-emitter"));

    let (_, rows) = read_rows(&csv_path);
    assert_eq!(rows.len(), curve.points.len());
    for (row, p) in rows.iter().zip(&curve.points) {
        let v = |i: usize| row[i].parse::<f64>().unwrap();
        assert_eq!(v(0).to_bits(), p.param_value.to_bits());
        assert_eq!(v(1).to_bits(), p.fwm_intensity.to_bits());
        assert_eq!(v(2).to_bits(), p.factor.to_bits());
        assert_eq!(v(3).to_bits(), p.rho_ee[0].to_bits());
        let product = v(2) * baseline;
        assert!(
            (product - v(1)).abs() <= f64::EPSILON * v(1),
            "{product} vs {}",
            v(1)
        );
        assert_eq!(
            product.to_bits(),
            (p.factor * curve.baseline_intensity).to_bits()
        );
    }
}

#[test]
fn fig1_sweep_reaches_ten_orders_of_suppression() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("fig1.csv");
    let out = fwm(&[
        "sweep",
        "--preset",
        "fig1",
        "--out",
        csv_path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let (_, rows) = read_rows(&csv_path);
    assert_eq!(rows.len(), 801);
    let (x, min) = rows
        .iter()
        .map(|r| (r[0].parse::<f64>().unwrap(), r[2].parse::<f64>().unwrap()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap();
    assert!(min <= 1e-9, "{min}");
    assert_eq!(x, 1.5);
}

#[test]
fn worker_count_does_not_change_output() {
    let run = |workers: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_fwm"))
            .args(["sweep", "--preset", "fig3", "--set", "sweep.n_points=61"])
            .env("FWM_WORKERS", workers)
            .output()
            .unwrap();
        assert!(out.status.success());
        out.stdout
    };
    let one = run("1");
    assert_eq!(one, run("3"));
    assert_eq!(one, run("0"));
    assert_eq!(String::from_utf8(one).unwrap().lines().count(), 62);
}

#[test]
fn simulate_emits_one_row_of_components() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/single_emitter_full.toml");
    let out = fwm(&["simulate", "--config", path.to_str().unwrap()]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("alpha1_re,alpha1_im"));
    assert_eq!(lines[1].split(',').count(), 13);
    assert!(lines[1].ends_with("true"));
}

#[test]
fn optimize_reports_coupled_and_single_factors() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("opt.toml");
    let out = fwm(&[
        "optimize",
        "--preset",
        "fig4",
        "--set",
        "sweep.start=1.50",
        "--set",
        "sweep.stop=1.62",
        "--set",
        "sweep.n_points=121",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let t: toml::Table = std::fs::read_to_string(&report).unwrap().parse().unwrap();
    let x = t["param_value"].as_float().unwrap();
    assert!((x - 1.5732).abs() < 0.01, "{x}");
    let single = t["single_emitter"].as_table().unwrap();
    let xs = single["param_value"].as_float().unwrap();
    assert!((1.50..1.62).contains(&xs) && xs != x, "{xs}");
    let ratio = single["coupled_over_single"].as_float().unwrap();
    let factor = t["factor"].as_float().unwrap();
    assert_eq!(ratio, factor / single["factor"].as_float().unwrap());
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| fwm(args).status.code();

    let out = fwm(&[
        "simulate",
        "--preset",
        "fig1",
        "--set",
        "params.gamma1=-0.01",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("params.gamma1"));
    assert_eq!(
        code(&["simulate", "--preset", "fig1", "--set", "params.gama1=0.01"]),
        Some(2)
    );
    assert_eq!(code(&["simulate", "--preset", "fig9"]), Some(2));
    assert_eq!(code(&["simulate"]), Some(2));
    assert_eq!(code(&["simulate", "--preset", "fig1"]), Some(0));

    let horizon = [
        "simulate",
        "--preset",
        "fig3",
        "--set",
        "settings.residual_window=1.0",
        "--set",
        "settings.max_time=2.0",
    ];
    assert_eq!(code(&horizon), Some(3));

    assert_eq!(code(&["validate", "--only", "6,9"]), Some(0));
    assert_eq!(
        code(&["validate", "--only", "5", "--integrator-tolerance", "1e-3"]),
        Some(1)
    );
    assert_eq!(code(&["validate", "--only", "11"]), Some(2));
}
