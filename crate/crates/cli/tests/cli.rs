use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn multispace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_multispace"))
        .args(args)
        .output()
        .expect("spawn multispace")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn poc_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("f.json");
    let proof = dir.path().join("p.json");
    assert!(multispace(&["poc", "init", "--size", "16", "--out", path(&fixture)]).status.success());
    assert!(multispace(&["poc", "open", "--fixture", path(&fixture), "--out", path(&proof)]).status.success());
    let out = multispace(&["poc", "verify", "--fixture", path(&fixture), "--proof", path(&proof)]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["accepted"], true);
}

#[test]
fn poc_explicit_indices() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("f.json");
    let proof = dir.path().join("p.json");
    multispace(&["poc", "init", "--size", "32", "--out", path(&fixture)]);
    multispace(&["poc", "open", "--fixture", path(&fixture), "--indices", "0,5,31", "--out", path(&proof)]);
    let out = multispace(&[
        "poc", "verify", "--fixture", path(&fixture), "--proof", path(&proof), "--indices", "0,5,31",
    ]);
    assert_eq!(out.status.code(), Some(0));
    // Same proof against different challenges.
    let out = multispace(&[
        "poc", "verify", "--fixture", path(&fixture), "--proof", path(&proof), "--indices", "1,5,31",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corrupted_proof_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let fixture = dir.path().join("f.json");
    let proof = dir.path().join("p.json");
    multispace(&["poc", "init", "--size", "16", "--out", path(&fixture)]);
    multispace(&["poc", "open", "--fixture", path(&fixture), "--out", path(&proof)]);
    let text = fs::read_to_string(&proof).unwrap();
    // Flip one hex digit of the first opened label.
    let at = text.find("\"label\":\"").unwrap() + 9;
    let mut bytes = text.into_bytes();
    bytes[at] = if bytes[at] == b'a' { b'b' } else { b'a' };
    fs::write(&proof, bytes).unwrap();
    let out = multispace(&["poc", "verify", "--fixture", path(&fixture), "--proof", path(&proof)]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_size_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = multispace(&["poc", "init", "--size", "17", "--out", path(&dir.path().join("f.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sim_writes_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = multispace(&["sim", "--scenario", "three-miners", "--rounds", "300", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("three-miners.csv")).unwrap();
    assert_eq!(csv.lines().count(), 301);
    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config_digest"].as_str().unwrap().len(), 64);
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["invariants_ok"], true);
}

#[test]
fn sim_json_lines() {
    let dir = tempfile::tempdir().unwrap();
    let out = multispace(&[
        "sim", "--scenario", "three-miners", "--rounds", "50", "--format", "json", "--out", path(dir.path()),
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(dir.path().join("three-miners.jsonl")).unwrap();
    assert_eq!(text.lines().count(), 50);
    for line in text.lines() {
        serde_json::from_str::<serde_json::Value>(line).unwrap();
    }
}

#[test]
fn newborn_summary_tracks_attacker() {
    let dir = tempfile::tempdir().unwrap();
    let out = multispace(&["sim", "--scenario", "newborn-attack", "--rounds", "300", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(0));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let shares = summary["attacker_share"].as_array().unwrap();
    assert!(!shares.is_empty());
    for s in shares {
        for v in s["share"].as_array().unwrap() {
            assert!(v.as_f64().unwrap() < 1.0 / 3.0);
        }
    }
}

#[test]
fn sim_config_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("missing.toml");
    let out = multispace(&["sim", "--config", path(&missing), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, "name = \"x\"\nbogus = 1\n").unwrap();
    let out = multispace(&["sim", "--config", path(&bad), "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
    let out = multispace(&["sim", "--scenario", "nope", "--out", path(dir.path())]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn econ_bound() {
    let out = multispace(&["econ", "bound", "--alpha", "0.3333333333333333", "--delta", "0.1"]);
    assert!(out.status.success());
    let v = json(&out);
    assert!((v["closed_form"].as_f64().unwrap() - 5.0 / 33.0).abs() < 1e-9);
}

#[test]
fn econ_opt() {
    let out = multispace(&["econ", "opt", "--c", "4", "--B", "100,100"]);
    assert!(out.status.success());
    let v = json(&out);
    let slots: Vec<f64> = v["closed_form"].as_array().unwrap().iter().map(|x| x.as_f64().unwrap()).collect();
    assert_eq!(slots, vec![2.0, 1.0, 1.0]);
}

#[test]
fn econ_verify_theorem1() {
    let out = multispace(&["econ", "verify-theorem1", "--seed", "7", "--trials", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json(&out)["failed"], 0);
}

#[test]
fn econ_bad_alpha_exits_two() {
    let out = multispace(&["econ", "bound", "--alpha", "1.5"]);
    assert_eq!(out.status.code(), Some(2));
}
