use std::path::PathBuf;
use std::process::{Command, Output};

fn root() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

fn fixture(name: &str) -> String {
    root().join("tests/fixtures").join(name).display().to_string()
}

fn sets() -> String {
    root().join("data/sets.thy").display().to_string()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_proofgen")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn extract_rules_lists_35_rules() {
    let o = run(&["extract-rules", &sets()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("35 rules\n"));
    let o = run(&["extract-rules", &sets(), "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["rules"].as_array().unwrap().len(), 35);
}

#[test]
fn cyclic_precedence_is_an_input_error() {
    let o = run(&["extract-rules", &fixture("broken.thy")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("precedence cycle"));
}

#[test]
fn prove_reports_sizes_and_exit_codes() {
    let o = run(&["prove", &sets(), &fixture("inter_step.exc")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).ends_with("deductive size: 4\n"));
    let o = run(&["prove", &sets(), &fixture("cut.exc")]);
    assert!(stdout(&o).contains("via cut"));
    assert!(stdout(&o).ends_with("deductive size: 13\n"));
    let o = run(&["prove", &sets(), &fixture("sat.exc"), "--max-apps", "5"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["prove", &sets(), &fixture("connective.exc")]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("outside the supported scope"));
    let o = run(&["prove", &sets(), &fixture("model.exc"), "--all-minimal", "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc.as_array().unwrap().len(), 3);
}

#[test]
fn generate_lists_six_exercises_input_first() {
    let o = run(&["generate", &sets(), &fixture("model.exc")]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().filter(|l| l.contains("Prove that")).collect();
    assert_eq!(lines.len(), 6);
    assert_eq!(lines[0], "1. Prove that x ∈ y ∩ (w ∪ z) implies x ∈ (y ∩ w) ∪ z");
    let o = run(&["generate", &sets(), &fixture("model.exc"), "--format", "json"]);
    let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(doc["candidates_considered"], 144);
    assert_eq!(doc["outputs"].as_array().unwrap().len(), 6);
    let o = run(&["generate", &sets(), &fixture("inter_step.exc")]);
    assert!(stdout(&o).contains("Prove that x ∈ y \\ z implies x ∈ y"));
    let o = run(&["generate", &sets(), &fixture("model.exc"), "--show-proofs"]);
    assert_eq!(stdout(&o).matches("deductive size: 9").count(), 6);
}

#[test]
fn replay_checks_proof_files() {
    for (name, size) in [("cut", 13), ("inter_step", 4), ("diff_step", 4), ("model", 9), ("variant", 9)] {
        let o = run(&[
            "replay",
            &sets(),
            &fixture(&format!("{}.proof.json", name)),
            "--exercise",
            &fixture(&format!("{}.exc", name)),
            "--format",
            "json",
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", name);
        let doc: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(doc["size"], size, "{}", name);
    }
    let o = run(&["replay", &sets(), &fixture("model.proof.json"), "--exercise", &fixture("variant.exc")]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn json_outputs_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("rules.json");
    std::fs::write(&rules, run(&["extract-rules", &sets(), "--format", "json"]).stdout).unwrap();
    let proof = dir.path().join("proof.json");
    let o = run(&["prove", &sets(), &fixture("cut.exc"), "--rules", rules.to_str().unwrap(), "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    std::fs::write(&proof, &o.stdout).unwrap();
    let o = run(&["replay", &sets(), proof.to_str().unwrap(), "--rules", rules.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("deductive size: 13"));
}

#[test]
fn output_is_identical_across_runs_and_thread_counts() {
    let args = ["generate", &sets(), &fixture("model.exc"), "--format", "json"];
    let a = run(&args).stdout;
    let b = run(&[&args[..], &["--threads", "1"]].concat()).stdout;
    let c = run(&[&args[..], &["--threads", "4"]].concat()).stdout;
    assert_eq!(a, b);
    assert_eq!(a, c);
    let p = ["prove", &sets(), &fixture("cut.exc"), "--all-minimal"];
    assert_eq!(run(&p).stdout, run(&[&p[..], &["--threads", "1"]].concat()).stdout);
}
