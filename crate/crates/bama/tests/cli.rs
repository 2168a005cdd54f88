use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use proptest::prelude::*;

fn bama(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bama"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn config_path(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .display()
        .to_string()
}

fn read_all(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

#[test]
fn assess_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    let cfg = config_path("assess_fluent.json");
    for dir in [&a, &b] {
        let o = bama(&["assess", &cfg, "--out", dir.to_str().unwrap()]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).contains("decision:"));
    }
    let files = read_all(&a);
    let names: Vec<&str> = files.iter().map(|(n, _)| n.as_str()).collect();
    assert_eq!(names, ["manifest.json", "summary.txt", "transcript.json"]);
    assert_eq!(files, read_all(&b));
}

#[test]
fn assess_seed_flag_changes_transcript() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = config_path("assess_fluent.json");
    let runs: Vec<Vec<u8>> = ["1", "2"]
        .iter()
        .map(|seed| {
            let dir = tmp.path().join(seed);
            let o = bama(&[
                "assess",
                &cfg,
                "--seed",
                seed,
                "--out",
                dir.to_str().unwrap(),
            ]);
            assert!(o.status.success());
            fs::read(dir.join("transcript.json")).unwrap()
        })
        .collect();
    assert_ne!(runs[0], runs[1]);
}

#[test]
fn invalid_eta_names_the_field() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("bad.json");
    fs::write(
        &cfg,
        r#"{"profile":{"theta":0.5,"lambda":1.0},"policy":{"eta":1.2}}"#,
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = bama(&[
        "assess",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("policy.eta"), "{}", stderr(&o));
    assert!(!out.join("transcript.json").exists());
}

#[test]
fn missing_config_is_a_user_error() {
    let o = bama(&["assess", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn solve_reports_stop_for_high_state() {
    let o = bama(&["solve", "8", "2", "10", "12", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["action"], "StopMastered");
    assert!((v["ez_mean"].as_f64().unwrap() - 0.75).abs() < 0.01);
}

#[test]
fn solve_with_zero_target_is_zero() {
    let o = bama(&["solve", "1", "1", "1", "10", "--xi", "0", "--json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["value"].as_f64(), Some(0.0));
    assert_eq!(v["action"], "StopMastered");
}

#[test]
fn solve_rejects_invalid_state() {
    let o = bama(&["solve", "-1", "1", "1", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("alpha"));
    let o = bama(&["solve", "1", "1", "1", "10", "--eta", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reproduce_table_is_deterministic() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let o = bama(&[
            "reproduce",
            "table1",
            "--seed",
            "3",
            "--out",
            dir.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", stderr(&o));
    }
    assert_eq!(read_all(&a), read_all(&b));
    let table = fs::read_to_string(a.join("table1.csv")).unwrap();
    assert_eq!(table.lines().count(), 7);
}

#[test]
fn reproduce_unknown_id_is_a_user_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bama(&["reproduce", "fig99", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("fig99"));
}

#[test]
fn unknown_subcommand_is_a_user_error() {
    assert_eq!(bama(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(bama(&["--help"]).status.code(), Some(0));
}

#[test]
fn sweep_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bama(&[
        "sweep",
        &config_path("sweep.json"),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_slice(&fs::read(tmp.path().join("manifest.json")).unwrap()).unwrap();
    let names: Vec<&str> = manifest["files"]
        .as_array()
        .unwrap()
        .iter()
        .map(|f| f["name"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["sweep.csv", "sweep.json"]);
}

fn bad_policy() -> impl Strategy<Value = (&'static str, f64)> {
    prop_oneof![
        (1.0..10.0f64).prop_map(|v| ("eta", v)),
        (-10.0..-1e-6f64).prop_map(|v| ("eta", v)),
        (1.0 + 1e-6..10.0f64).prop_map(|v| ("xi", v)),
        (-10.0..-1e-6f64).prop_map(|v| ("xi", v)),
        (-100.0..0.0f64).prop_map(|v| ("d", v)),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn invalid_policy_rejected_before_solving((field, value) in bad_policy()) {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tmp.path().join("c.json");
        fs::write(&cfg, format!(r#"{{"profile":{{"theta":0.5,"lambda":1.0}},"policy":{{"{field}":{value}}}}}"#)).unwrap();
        let out = tmp.path().join("out");
        let o = bama(&["assess", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
        prop_assert_eq!(o.status.code(), Some(2));
        let expected = format!("invalid {}", field);
        prop_assert!(stderr(&o).contains(&expected), "{}", stderr(&o));
        prop_assert!(!out.exists());
    }

    #[test]
    fn invalid_profile_rejected(theta in prop_oneof![-5.0..-1e-6f64, 1.0 + 1e-6..5.0f64]) {
        let tmp = tempfile::tempdir().unwrap();
        let cfg = tmp.path().join("c.json");
        fs::write(&cfg, format!(r#"{{"profile":{{"theta":{theta},"lambda":1.0}}}}"#)).unwrap();
        let o = bama(&["assess", cfg.to_str().unwrap(), "--out", tmp.path().join("out").to_str().unwrap()]);
        prop_assert_eq!(o.status.code(), Some(2));
        prop_assert!(stderr(&o).contains("profile.theta"), "{}", stderr(&o));
    }
}
