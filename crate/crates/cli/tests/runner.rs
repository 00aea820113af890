//! End-to-end checks of the experiment runner: catalog, exit codes, report
//! invariants, and rerun determinism.

use std::path::Path;
use std::process::Command;

use hardy_lab_cli::config::{ExperimentConfig, KNOWN_STUDIES};
use hardy_lab_cli::report::Status;
use hardy_lab_cli::studies::catalog;
use hardy_lab_cli::execute;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_hardy-lab")
}

fn tmp_dir(tag: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("hardy-lab-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn catalog_covers_every_known_study() {
    let cat = catalog();
    assert!(cat.len() >= 7);
    for s in &cat {
        assert!(KNOWN_STUDIES.contains(&s.id));
        assert!(!s.description.is_empty());
    }
    // the binary prints the same catalog
    let out = Command::new(bin()).arg("list").output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    for s in &cat {
        assert!(text.contains(s.id), "missing {} in list output", s.id);
    }
}

#[test]
fn empty_study_list_is_a_successful_noop() {
    let dir = tmp_dir("noop");
    let cfg_path = dir.join("cfg.toml");
    std::fs::write(&cfg_path, "id = \"noop\"\nstudies = []\n").unwrap();
    let out = Command::new(bin())
        .args(["run", cfg_path.to_str().unwrap(), "--out", dir.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["summary"]["pass"], 0);
    assert_eq!(report["summary"]["fail"], 0);
}

#[test]
fn invalid_config_is_rejected_with_field_message() {
    let dir = tmp_dir("bad");
    let cfg_path = dir.join("cfg.toml");
    std::fs::write(&cfg_path, "id = \"bad\"\nstudies = [\"no-such-study\"]\n").unwrap();
    let out = Command::new(bin())
        .args(["run", cfg_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("studies"), "stderr: {err}");
}

#[test]
fn quick_run_report_invariants_and_determinism() {
    let dir = tmp_dir("det");
    let toml = r#"
id = "det"
studies = ["halfspace-identities", "hardy-remainder"]
mu = [0.0, 1.0]
workers = 2
[mesh]
levels = [0.05]
"#;
    let cfg1: ExperimentConfig = toml::from_str(toml).unwrap();
    let mut cfg1 = cfg1;
    cfg1.out_dir = dir.join("a").to_str().unwrap().to_string();
    cfg1.validate().unwrap();
    let rep1 = execute(&cfg1).unwrap();

    // every check carries exactly one status and appears once
    let mut names = std::collections::HashSet::new();
    for s in &rep1.studies {
        for c in &s.checks {
            assert!(names.insert(format!("{}/{}", s.study, c.name)), "duplicate {}", c.name);
            assert!(matches!(c.status, Status::Pass | Status::Fail | Status::Skipped));
        }
    }
    assert!(rep1.summary.fail == 0, "quick run should pass");

    // rerun: byte-identical modulo the environment stamp
    let mut cfg2 = cfg1.clone();
    cfg2.out_dir = dir.join("b").to_str().unwrap().to_string();
    let _ = execute(&cfg2).unwrap();
    let strip = |p: &Path| {
        let mut v: serde_json::Value =
            serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v.as_object_mut().unwrap().remove("environment");
        v.as_object_mut()
            .unwrap()
            .get_mut("config")
            .unwrap()
            .as_object_mut()
            .unwrap()
            .remove("out_dir");
        serde_json::to_string(&v).unwrap()
    };
    let a = strip(&Path::new(&cfg1.out_dir).join("report.json"));
    let b = strip(&Path::new(&cfg2.out_dir).join("report.json"));
    assert_eq!(a, b, "reports differ on identical config");
}
