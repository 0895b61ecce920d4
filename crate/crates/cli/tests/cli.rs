use std::path::Path;
use std::process::{Command, Output};

fn geomdd(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_geomdd"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("spawn geomdd")
}

fn manifest_files(dir: &Path) -> Vec<String> {
    let text = std::fs::read_to_string(dir.join("manifest.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    v["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| {
            assert!(f["figure"].is_string());
            f["file"].as_str().unwrap().to_string()
        })
        .collect()
}

#[test]
fn waveguide_g_is_in_the_megahertz_range() {
    let dir = tempfile::tempdir().unwrap();
    let out = geomdd(dir.path(), &["waveguide-g"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("waveguide_g.json")).unwrap()).unwrap();
    let g = v["g_mhz"].as_f64().unwrap();
    assert!((1.0..=10.0).contains(&g), "g = {g}");
    assert_eq!(manifest_files(dir.path()), vec!["waveguide_g.json"]);
}

#[test]
fn dd_scaling_writes_csv_and_exits_3_without_coupling() {
    let dir = tempfile::tempdir().unwrap();
    let out = geomdd(dir.path(), &["dd-scaling", "--set", "scaling.points=5"]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("dd_scaling.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(manifest_files(dir.path()).contains(&"dd_scaling_summary.json".to_string()));

    let dir = tempfile::tempdir().unwrap();
    let out = geomdd(dir.path(), &["dd-scaling", "--set", "scaling.coupling_scale=0"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn gate_fidelity_is_deterministic() {
    let args = ["gate-fidelity", "--set", "sim.samples=11"];
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    assert!(geomdd(a.path(), &args).status.success());
    assert!(geomdd(b.path(), &args).status.success());
    for f in manifest_files(a.path()) {
        let x = std::fs::read(a.path().join(&f)).unwrap();
        let y = std::fs::read(b.path().join(&f)).unwrap();
        assert_eq!(x, y, "{f} differs between runs");
    }
    let traces = std::fs::read_to_string(a.path().join("gate_fidelity_not_traces.csv")).unwrap();
    assert_eq!(traces.lines().next().unwrap(), "t_us,F_none,F_XY4,F_XY8,F_XY12");
    assert_eq!(traces.lines().count(), 12);
}

#[test]
fn robustness_sweep_respects_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let out = geomdd(
        dir.path(),
        &["robustness-sweep", "--set", "sweep.points=2", "--set", r#"dd_levels=["none","XY4"]"#, "--set", "sim.samples=3"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("robustness_not.csv")).unwrap();
    assert!(csv.lines().skip(1).all(|l| l.starts_with("none,") || l.starts_with("XY4,")));
    for line in csv.lines().skip(1) {
        let f: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((0.0..=1.0 + 1e-9).contains(&f));
    }
}

#[test]
fn compare_models_writes_running_deviation() {
    let dir = tempfile::tempdir().unwrap();
    let out = geomdd(
        dir.path(),
        &["compare-models", "--set", "compare.duration_us=0.2", "--set", "sim.samples=5"],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("compare_models.csv")).unwrap();
    let dev: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.rsplit(',').next().unwrap().parse().unwrap())
        .collect();
    assert!(dev.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn config_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = geomdd(dir.path(), &["gate-fidelity", "--set", "nope=1"]);
    assert_eq!(out.status.code(), Some(2));

    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"system": {"omega_mhz": 10, "extra": 1}}"#).unwrap();
    let out = geomdd(dir.path(), &["--config", cfg.to_str().unwrap(), "waveguide-g"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("extra"));

    let out = geomdd(dir.path(), &["gate-fidelity", "--set", "sim.dt_us=1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiment_key_selects_the_command() {
    let dir = tempfile::tempdir().unwrap();
    let out = geomdd(dir.path(), &["--set", "experiment=waveguide-g"]);
    assert!(out.status.success());
    assert!(dir.path().join("waveguide_g.json").exists());
}
