use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use pwenv::formats::density_to_json;
use pwenv::pwenv_core::spectrum::{make_bump, SpectralDensity};
use pwenv::report::{Status, VerificationReport};

fn pwenv(args: &[&str], config: Option<&Path>, out: &Path) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_pwenv"));
    cmd.args(args).arg("--out").arg(out);
    if let Some(c) = config {
        cmd.arg("--config").arg(c);
    }
    cmd.output().expect("binary runs")
}

fn read_report(path: &Path) -> VerificationReport {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn single_eps_sweep_has_one_row_and_no_monotonicity_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(&config, "eps_grid = [1.0]\nsmoothness_grid = [3]\n").unwrap();
    let out = pwenv(&["sweep"], Some(&config), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rep = read_report(&dir.path().join("sweep.json"));
    assert_eq!(rep.check("counterexample-ratio").count(), 1);
    assert_eq!(rep.check("counterexample-monotone").count(), 0);
    assert_eq!(rep.check("counterexample-growth").count(), 0);
    let row = rep.check("counterexample-ratio").next().unwrap();
    assert_eq!(row.status, Status::ReportOnly);
    assert!(row.lhs > row.rhs, "envelope norm should exceed the E^1 norm here");
    let csv = fs::read_to_string(dir.path().join("sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
}

#[test]
fn zero_density_file_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let density = dir.path().join("zero.json");
    fs::write(&density, density_to_json(&SpectralDensity::zero())).unwrap();
    let config = dir.path().join("c.json");
    fs::write(
        &config,
        format!("{{\"densities\": [{:?}]}}", density.display().to_string()),
    )
    .unwrap();
    let out = pwenv(&["sweep"], Some(&config), dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("zero function"));
}

#[test]
fn invalid_config_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("c.toml");
    fs::write(&config, "p_grid = [0.25]\n").unwrap();
    let out = pwenv(&["norms"], Some(&config), dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p_grid"));
    assert!(!dir.path().join("norms.json").exists());
}

#[test]
fn norms_table_includes_density_files() {
    let dir = tempfile::tempdir().unwrap();
    let density = dir.path().join("bump.json");
    fs::write(&density, density_to_json(&make_bump(-1.0, 2.0, 4).unwrap())).unwrap();
    let config = dir.path().join("c.toml");
    fs::write(
        &config,
        format!(
            "p_grid = [1.0, 2.0]\nq_grid = [1.0]\neps_grid = [1.0]\nsmoothness_grid = [3]\ndensities = [{:?}]\n",
            density.display().to_string()
        ),
    )
    .unwrap();
    let out = pwenv(&["norms"], Some(&config), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let table: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("norms.json")).unwrap()).unwrap();
    let rows = table["rows"].as_array().unwrap();
    let mine: Vec<_> = rows
        .iter()
        .filter(|r| r["function"].as_str().unwrap().starts_with("file:"))
        .collect();
    // Two E^p norms; p ≥ q leaves no admissible envelope pair but the q-envelope one.
    assert_eq!(mine.len(), 3, "{mine:?}");
    assert!(mine.iter().all(|r| r["report"]["value"].as_f64().unwrap() > 0.0));
}

#[test]
fn help_lists_every_subcommand() {
    let out = Command::new(env!("CARGO_BIN_EXE_pwenv"))
        .arg("--help")
        .output()
        .unwrap();
    let text = String::from_utf8_lossy(&out.stdout);
    for sub in ["norms", "verify", "sweep", "equivalence", "report"] {
        assert!(text.contains(sub), "{text}");
    }
}
