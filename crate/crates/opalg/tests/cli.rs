//! End-to-end tests of the `opalg` binary: exit codes, deterministic
//! reports, config-file precedence, and failure-dump replay.

use std::path::Path;
use std::process::Command;

fn opalg() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opalg"))
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn reports_are_byte_identical_modulo_header() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let status = opalg()
            .args([
                "defect-suite",
                "--dims",
                "2",
                "--eps",
                "1e-3",
                "--instances",
                "2",
                "--restarts",
                "2",
                "--seed",
                "11",
                "--out",
            ])
            .arg(dir.path())
            .status()
            .unwrap();
        assert!(status.success());
    }
    let mut a = read_json(&dir_a.path().join("defect-suite_report.json"));
    let mut b = read_json(&dir_b.path().join("defect-suite_report.json"));
    // the timestamp lives in an isolated header; everything else matches
    assert!(a["header"]["timestamp_unix"].is_number());
    a.as_object_mut().unwrap().remove("header");
    b.as_object_mut().unwrap().remove("header");
    // `out` differs between runs by construction of the test
    a["config"].as_object_mut().unwrap().remove("out");
    b["config"].as_object_mut().unwrap().remove("out");
    assert_eq!(
        serde_json::to_string(&a).unwrap(),
        serde_json::to_string(&b).unwrap()
    );
}

#[test]
fn certify_exit_codes_respect_allow_flagged() {
    let dir = tempfile::tempdir().unwrap();
    let status = opalg()
        .args(["certify", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1), "unallowed flags must fail the run");

    let status = opalg()
        .args(["certify", "--allow-flagged", "mu-s,vn-epsilon0", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0), "allowed flags must pass the run");

    let report = read_json(&dir.path().join("certify_report.json"));
    assert_eq!(report["results"]["vn"]["steps"][0]["status"], "violated");
}

#[test]
fn config_file_is_used_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.cfg");
    std::fs::write(
        &cfg,
        format!(
            "mode = verify-lemma\nlemma = unitmult\ndims = 2\nsamples = 5\nseed = 3\nout = {}\n",
            dir.path().display()
        ),
    )
    .unwrap();
    let status = opalg().args(["run", "--config"]).arg(&cfg).status().unwrap();
    assert!(status.success());
    let report = read_json(&dir.path().join("verify-lemma_report.json"));
    assert_eq!(report["config"]["samples"], 5);
    assert_eq!(report["results"]["total"], 5);

    // a flag overrides the config value
    let status = opalg()
        .args(["run", "--config"])
        .arg(&cfg)
        .args(["--samples", "3"])
        .status()
        .unwrap();
    assert!(status.success());
    let report = read_json(&dir.path().join("verify-lemma_report.json"));
    assert_eq!(report["config"]["samples"], 3);
    assert_eq!(report["results"]["total"], 3);
}

#[test]
fn env_var_supplies_default_seed() {
    let dir = tempfile::tempdir().unwrap();
    let status = opalg()
        .env("OPALG_SEED", "99")
        .args(["verify-lemma", "--lemma", "unitmult", "--dims", "2", "--samples", "3", "--out"])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let report = read_json(&dir.path().join("verify-lemma_report.json"));
    assert_eq!(report["config"]["seed"], 99);
}

#[test]
fn bad_usage_exits_two() {
    let status = opalg()
        .args(["verify-lemma", "--lemma", "nonsense"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));

    let status = opalg().args(["run"]).status().unwrap();
    assert_eq!(status.code(), Some(2), "run without config must fail usage");
}

#[test]
fn replay_round_trips_and_detects_edits() {
    let dir = tempfile::tempdir().unwrap();
    // a passing case: a well-conditioned recovery with a generous bound
    let alg = opalg::matcore::BlockAlgebra::new(vec![2]).unwrap();
    let mut rng = opalg::matcore::random::rng_from_seed(5);
    let l = opalg::harness::perturbed_isomorphism(&alg, 1e-4, &mut rng);
    let case = opalg::harness::ReplayCase::Recover {
        map: l,
        opts: opalg::perturb::RecoverOptions {
            restarts: 3,
            seed: 2,
            ..Default::default()
        },
        residual_bound: 1e-9,
    };
    let path = dir.path().join("case.json");
    std::fs::write(&path, serde_json::to_string_pretty(&case).unwrap()).unwrap();

    let out1 = opalg().arg("replay").arg(&path).output().unwrap();
    let out2 = opalg().arg("replay").arg(&path).output().unwrap();
    assert_eq!(out1.status.code(), Some(0), "{}", String::from_utf8_lossy(&out1.stdout));
    // identical verdicts and residual text, bit for bit
    assert_eq!(out1.stdout, out2.stdout);

    // an impossible residual bound flips the verdict
    let strict = opalg::harness::ReplayCase::Recover {
        map: match &case {
            opalg::harness::ReplayCase::Recover { map, .. } => map.clone(),
            _ => unreachable!(),
        },
        opts: opalg::perturb::RecoverOptions {
            restarts: 3,
            seed: 2,
            ..Default::default()
        },
        residual_bound: 1e-18,
    };
    let strict_path = dir.path().join("strict.json");
    std::fs::write(&strict_path, serde_json::to_string(&strict).unwrap()).unwrap();
    let out = opalg().arg("replay").arg(&strict_path).output().unwrap();
    assert_eq!(out.status.code(), Some(1));

    // editing a matrix entry re-evaluates; the exit code reflects the rerun
    let mut doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    let entry = &mut doc["map"]["matrix"][0][0];
    *entry = serde_json::json!(entry.as_f64().unwrap() + 0.1);
    let edited = dir.path().join("edited.json");
    std::fs::write(&edited, serde_json::to_string(&doc).unwrap()).unwrap();
    let out = opalg().arg("replay").arg(&edited).output().unwrap();
    assert!(matches!(out.status.code(), Some(0) | Some(1)));

    // malformed dumps exit 2
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"kind\": \"unknown\"}").unwrap();
    let out = opalg().arg("replay").arg(&bad).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn recover_mode_emits_plot_series() {
    let dir = tempfile::tempdir().unwrap();
    let status = opalg()
        .args([
            "recover", "--dims", "2", "--eps", "1e-3", "--instances", "1", "--restarts", "2",
            "--seed", "4", "--out",
        ])
        .arg(dir.path())
        .status()
        .unwrap();
    assert!(status.success());
    let series = std::fs::read_to_string(dir.path().join("recover_series.csv")).unwrap();
    assert!(series.starts_with("instance,step,eps\n"));
    assert!(series.lines().count() >= 2);
    let table = std::fs::read_to_string(dir.path().join("recover_table.csv")).unwrap();
    assert!(table.contains("distance_budget"));
}
