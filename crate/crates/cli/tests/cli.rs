use std::fs;
use std::path::Path;
use std::process::Command;

use gaplab::report::read_tail_curve;
use gaplab::{parse_config, report, run, CliError, RunConfig};
use gaplab_core::gap_experiments::fit_exponent;

fn config(json: &str, out: &Path) -> RunConfig {
    let mut c = parse_config(json, None).unwrap();
    c.output = out.to_string_lossy().into_owned();
    c
}

const TAILS: &str = r#"{"schema_version": 1, "experiment": "tails", "seed": 7,
    "ensemble": {"kind": "wigner", "n": 10, "off_diag": "gaussian"}, "trials": 4}"#;

#[test]
fn outputs_do_not_depend_on_worker_count() {
    let experiments = [
        TAILS,
        r#"{"schema_version": 1, "experiment": "mingap", "seed": 7,
            "ensemble": {"kind": "wigner", "n": 10, "off_diag": "rademacher"}, "trials": 4}"#,
        r#"{"schema_version": 1, "experiment": "sample", "seed": 7,
            "ensemble": {"kind": "adjacency", "n": 10, "p": 0.5}, "trials": 4}"#,
        r#"{"schema_version": 1, "experiment": "lcd", "seed": 7, "dim": 5, "vector_count": 6}"#,
        r#"{"schema_version": 1, "experiment": "smallball", "seed": 7, "dim": 6,
            "vector_count": 4, "law": "gaussian", "mc_trials": 2000}"#,
    ];
    let tmp = tempfile::tempdir().unwrap();
    for (k, json) in experiments.iter().enumerate() {
        let mut texts = Vec::new();
        for w in [1, 4] {
            let dir = tmp.path().join(format!("{k}-{w}"));
            let mut c = config(json, &dir);
            c.workers = Some(w);
            let outcome = run(&c).unwrap();
            assert!(!outcome.outputs.is_empty());
            let files: Vec<String> = outcome
                .outputs
                .iter()
                .map(|o| fs::read_to_string(dir.join(&o.file)).unwrap())
                .collect();
            texts.push(files);
        }
        assert_eq!(texts[0], texts[1], "experiment {k}");
    }
}

#[test]
fn unwritable_output_fails_without_partial_files() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("blocker");
    fs::write(&blocker, "not a directory").unwrap();
    let out = blocker.join("run");
    let err = run(&config(TAILS, &out)).unwrap_err();
    assert!(matches!(err, CliError::Io { .. }), "{err:?}");
    let leftovers: Vec<_> = fs::read_dir(tmp.path()).unwrap().collect();
    assert_eq!(leftovers.len(), 1);
}

#[test]
fn report_summarizes_tails_run() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("tails");
    let c = config(
        r#"{"schema_version": 1, "experiment": "tails", "seed": 3,
            "ensemble": {"kind": "wigner", "n": 30, "off_diag": "gaussian"}, "trials": 200}"#,
        &dir,
    );
    run(&c).unwrap();
    assert!(dir.join("manifest.json").exists());
    let rep = report(&dir).unwrap();
    let fit = rep.fit.clone().expect("tails report carries a fit");
    let curve = read_tail_curve(&dir.join("tails.csv"), &c).unwrap();
    let direct = fit_exponent(&curve, 0.0, f64::INFINITY).unwrap();
    assert!((fit.slope - direct.slope).abs() <= 1e-12);
    assert!(rep.text.contains("slope"));
    assert!(rep.plots.iter().all(|p| p.exists()));
}

#[test]
fn report_on_empty_directory() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(matches!(report(tmp.path()), Err(CliError::MissingManifest(_))));
}

#[test]
fn manifest_records_canonical_config() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("m");
    let mut c = config(TAILS, &dir);
    c.workers = Some(2);
    run(&c).unwrap();
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["experiment"], "tails");
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["outputs"][0]["file"], "tails.csv");
    let back: RunConfig = serde_json::from_value(manifest["config"].clone()).unwrap();
    assert_eq!(back, c);
}

#[test]
fn binary_runs_and_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    fs::write(&cfg, TAILS).unwrap();
    let out = tmp.path().join("out");
    let bin = env!("CARGO_BIN_EXE_gaplab");
    let status = Command::new(bin)
        .args(["tails", "--config"])
        .arg(&cfg)
        .args(["--seed", "11", "--output"])
        .arg(&out)
        .env_remove("GAPLAB_WORKERS")
        .status()
        .unwrap();
    assert!(status.success());
    let rep = Command::new(bin).arg("report").arg(&out).output().unwrap();
    assert!(rep.status.success());
    assert!(String::from_utf8_lossy(&rep.stdout).contains("slope"));

    // experiment mismatch between subcommand and config
    let bad = Command::new(bin)
        .args(["mingap", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!bad.status.success());
    assert!(String::from_utf8_lossy(&bad.stderr).starts_with("error:"));
}

#[test]
fn invalid_worker_override_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("c.json");
    fs::write(&cfg, TAILS).unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_gaplab"))
        .args(["tails", "--config"])
        .arg(&cfg)
        .arg("--output")
        .arg(tmp.path().join("o"))
        .env("GAPLAB_WORKERS", "zero")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(!tmp.path().join("o/tails.csv").exists());
}
