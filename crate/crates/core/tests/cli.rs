//! The `mmd-ext` binary: exit codes, output-directory override, determinism
//! and the report summary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mmd_extension::cli::{RunReport, OUTPUT_DIR_ENV};
use mmd_extension::io::read_json;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_mmd-ext"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run_into(cfg: &Path, out: &Path) -> Output {
    bin().arg("run").arg(cfg).env(OUTPUT_DIR_ENV, out).output().unwrap()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let p = dir.join("config.json");
    fs::write(&p, body).unwrap();
    p
}

const SMALL_PIPELINE: &str = r#"{
  "schemaVersion": 1,
  "space": { "kind": "grid", "nx": 33, "ny": 33 },
  "domain": { "type": "half_grid" },
  "epsilon": 0.03333333333333333,
  "A_P": 1.0,
  "experiments": ["geometry", "whitney", "reflection", "poincare", "extension", "boundary_energy"],
  "seed": 3,
  "samples": { "boundaryPoints": 4, "radii": [4, 8], "extensionRadii": [2, 3], "familySize": 10 }
}"#;

#[test]
fn passing_run_exits_zero_and_writes_report() {
    let tmp = tempfile::tempdir().unwrap();
    let out = run_into(&config("geometry_path.json"), tmp.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: RunReport = read_json(&tmp.path().join("report.json")).unwrap();
    assert!(report.all_pass() && report.summary.total > 0);
    assert!(tmp.path().join("geometry_delta.dat").exists());
}

#[test]
fn identical_runs_write_identical_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), SMALL_PIPELINE);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = run_into(&cfg, dir);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    }
    for file in ["report.json", "extension_ratios.dat", "reflection.json", "poincare.dat"] {
        assert_eq!(fs::read(a.join(file)).unwrap(), fs::read(b.join(file)).unwrap(), "{file} differs");
    }
}

#[test]
fn failed_check_exits_one() {
    // Bottom cells of the gasket touch only through the removed line, so
    // boundary balls split and the Poincaré ratio is unbounded.
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(
        tmp.path(),
        r#"{
          "schemaVersion": 1,
          "space": { "kind": "sierpinski_gasket", "level": 3 },
          "domain": { "type": "remove_bottom_line" },
          "epsilon": 0.03,
          "experiments": ["poincare"],
          "samples": { "boundaryPoints": 3, "radii": [2, 4] }
        }"#,
    );
    let out = run_into(&cfg, &tmp.path().join("out"));
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    let summary = bin().arg("report").arg("--summary").arg(tmp.path().join("out/report.json")).output().unwrap();
    assert_eq!(summary.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&summary.stdout).contains("FAIL poincare"));
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = config("bad_main_assumption.json");
    for sub in ["run", "validate"] {
        let out = bin().arg(sub).arg(&bad).env(OUTPUT_DIR_ENV, tmp.path()).output().unwrap();
        assert_eq!(out.status.code(), Some(2), "{sub}");
        assert!(String::from_utf8_lossy(&out.stderr).contains("27 A_P epsilon < 1"));
    }
    let unknown = write_config(tmp.path(), r#"{"schemaVersion": 1, "space": {"kind": "path", "n": 4}, "experiments": ["geometry"], "bogus": 1}"#);
    assert_eq!(bin().arg("validate").arg(&unknown).output().unwrap().status.code(), Some(2));
    let missing = bin().arg("run").arg(tmp.path().join("nope.json")).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    let no_report = bin().arg("report").arg("--summary").arg(tmp.path().join("nope.json")).output().unwrap();
    assert_eq!(no_report.status.code(), Some(2));
}

#[test]
fn shipped_configs_validate() {
    for name in ["geometry_path.json", "half_grid_full.json", "gasket_hke.json"] {
        let out = bin().arg("validate").arg(config(name)).output().unwrap();
        assert_eq!(out.status.code(), Some(0), "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn env_var_overrides_output_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let configured = tmp.path().join("configured");
    let body = format!(
        r#"{{"schemaVersion": 1, "space": {{"kind": "path", "n": 6}}, "domain": {{"type": "explicit", "vertices": [2, 3]}},
            "experiments": ["geometry"], "outputDir": {:?}}}"#,
        configured.display().to_string()
    );
    let cfg = write_config(tmp.path(), &body);
    let plain = bin().arg("run").arg(&cfg).env_remove(OUTPUT_DIR_ENV).output().unwrap();
    assert_eq!(plain.status.code(), Some(0));
    assert!(configured.join("report.json").exists());

    let over = tmp.path().join("override");
    assert_eq!(run_into(&cfg, &over).status.code(), Some(0));
    assert!(over.join("report.json").exists());
    let summary = bin().arg("report").arg("--summary").arg(over.join("report.json")).output().unwrap();
    assert_eq!(summary.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&summary.stdout).contains("0 failed"));
}
