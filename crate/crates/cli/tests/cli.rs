use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const FRAC: f64 = std::f64::consts::FRAC_1_SQRT_2;

fn unitest(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unitest"))
        .args(args)
        .current_dir(dir)
        .env_remove("UNITEST_SEED")
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}\nstderr: {}",
            String::from_utf8_lossy(&out.stdout),
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, n: usize, entries: &[[f64; 2]]) {
    let text = serde_json::json!({ "n_qubits": n, "entries": entries }).to_string();
    std::fs::write(dir.join(name), text).unwrap();
}

fn fixtures(dir: &Path) {
    let (h, c) = (FRAC, FRAC);
    write(dir, "hadamard.json", 1, &[[h, 0.0], [h, 0.0], [h, 0.0], [-h, 0.0]]);
    write(dir, "s.json", 1, &[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0]]);
    // H·S
    write(dir, "hs.json", 1, &[[h, 0.0], [0.0, h], [h, 0.0], [0.0, -h]]);
    write(dir, "t.json", 1, &[[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [c, c]]);
    let mut cnot = vec![[0.0, 0.0]; 16];
    for (r, col) in [(0, 0), (1, 1), (2, 3), (3, 2)] {
        cnot[r * 4 + col] = [1.0, 0.0];
    }
    write(dir, "cnot.json", 2, &cnot);
    write(dir, "bad.json", 1, &[[2.0, 0.0], [0.0, 0.0], [0.0, 0.0], [1.0, 0.0]]);
}

fn three_sigma(p: f64, trials: f64) -> f64 {
    3.0 * (p * (1.0 - p) / trials).sqrt()
}

#[test]
fn generated_orthogonal_is_always_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let gen = unitest(
        &["generate", "orthogonal", "--n", "2", "--seed", "3", "--out", "o.json"],
        dir.path(),
    );
    assert!(gen.status.success());
    assert!(json(&gen)["oracle_distance"].as_f64().unwrap() < 1e-8);
    let out = unitest(
        &["test", "orthogonal", "o.json", "--epsilon", "0.3", "--trials", "50"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report = json(&out);
    assert_eq!(report["schema"], 1);
    assert_eq!(report["accept_rate"], 1.0);
    assert_eq!(report["accept_count"], 50);
    assert_eq!(report["queries_per_trial"], 24);
}

#[test]
fn t_gate_is_rejected_by_clifford_tester() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = unitest(
        &["test", "clifford", "t.json", "--epsilon", "0.2", "--trials", "300"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    let rate = report["accept_rate"].as_f64().unwrap();
    assert!(rate < 1.0 / 3.0 + three_sigma(1.0 / 3.0, 300.0), "{rate}");
    let d = report["oracle_distance"].as_f64().unwrap();
    assert!((d - (1.0 - (std::f64::consts::PI / 8.0).cos()).sqrt()).abs() < 1e-12);
}

#[test]
fn cnot_is_rejected_by_one_junta_tester() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = unitest(
        &["test", "junta", "cnot.json", "--k", "1", "--epsilon", "0.5", "--trials", "300"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(1));
    let report = json(&out);
    assert!(report["accept_rate"].as_f64().unwrap() <= 1.0 / 3.0 + three_sigma(1.0 / 3.0, 300.0));
    assert!((report["oracle_distance"].as_f64().unwrap() - FRAC).abs() < 1e-12);
}

#[test]
fn oracle_examples() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let expected = (1.0 - FRAC).sqrt();
    let pauli = json(&unitest(&["oracle", "pauli", "hadamard.json"], dir.path()));
    assert!((pauli["value"].as_f64().unwrap() - expected).abs() < 1e-12);
    assert_eq!(pauli["witness_label"], "X");
    let cliff = json(&unitest(&["oracle", "clifford", "hs.json"], dir.path()));
    assert!(cliff["value"].as_f64().unwrap() < 1e-12);
    let orth = json(&unitest(&["oracle", "orthogonal", "s.json"], dir.path()));
    assert!((orth["value"].as_f64().unwrap() - expected).abs() < 1e-9);
}

#[test]
fn generated_members_pass_their_oracles() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [&[&str]; 3] = [
        &["generate", "clifford", "--n", "2", "--depth", "60", "--seed", "7", "--out", "c.json"],
        &["generate", "permutation", "--n", "3", "--seed", "1", "--out", "p.json"],
        &["generate", "junta", "--n", "3", "--k", "1", "--out", "j.json"],
    ];
    for args in cases {
        let out = unitest(args, dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert!(json(&out)["oracle_distance"].as_f64().unwrap() < 1e-8);
    }
    let cliff = json(&unitest(&["oracle", "clifford", "c.json"], dir.path()));
    assert!(cliff["value"].as_f64().unwrap() < 1e-8);
    let junta = json(&unitest(&["oracle", "junta", "j.json", "--k", "1"], dir.path()));
    assert!(junta["value"].as_f64().unwrap() < 1e-8);

    let perm: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("p.json")).unwrap()).unwrap();
    let entries = perm["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 64);
    let ones = entries.iter().filter(|e| e[0] == 1.0).count();
    assert_eq!(ones, 8);
    assert!(entries
        .iter()
        .all(|e| (e[0] == 0.0 || e[0] == 1.0) && e[1] == 0.0));
}

#[test]
fn subset_tester_reads_members_from_directory_and_array() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let members = dir.path().join("members");
    std::fs::create_dir(&members).unwrap();
    std::fs::copy(dir.path().join("hadamard.json"), members.join("a.json")).unwrap();
    std::fs::copy(dir.path().join("s.json"), members.join("b.json")).unwrap();
    let out = unitest(
        &["test", "subset", "s.json", "--members", "members", "--epsilon", "0.3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["accept_rate"], 1.0);

    let h = FRAC;
    let array = serde_json::json!([
        { "n_qubits": 1, "entries": [[h, 0.0], [h, 0.0], [h, 0.0], [-h, 0.0]] },
        { "n_qubits": 1, "entries": [[1.0, 0.0], [0.0, 0.0], [0.0, 0.0], [0.0, 1.0]] }
    ]);
    std::fs::write(dir.path().join("set.json"), array.to_string()).unwrap();
    let out = unitest(
        &["test", "subset", "hadamard.json", "--members", "set.json", "--epsilon", "0.3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));

    // Duplicate up to phase.
    std::fs::copy(dir.path().join("s.json"), members.join("c.json")).unwrap();
    let out = unitest(
        &["test", "subset", "s.json", "--members", "members", "--epsilon", "0.3"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("deduplicate"));
}

#[test]
fn verify_suites_pass() {
    let dir = tempfile::tempdir().unwrap();
    let out = unitest(&["verify", "lemmas", "--seed", "0"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["passed"], true);
    assert_eq!(report["checks"].as_array().unwrap().len(), 5);
    for suite in ["metrics", "appendix"] {
        let out = unitest(&["verify", suite, "--instances", "30"], dir.path());
        assert_eq!(out.status.code(), Some(0));
    }
}

#[test]
fn identical_invocations_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let strip = |out: &Output| {
        let mut v = json(out);
        v.as_object_mut().unwrap().remove("wall_time_ms");
        serde_json::to_string(&v).unwrap()
    };
    let args = ["test", "pauli", "hadamard.json", "--epsilon", "0.9", "--trials", "200", "--seed", "11"];
    let a = unitest(&args, dir.path());
    let b = unitest(&args, dir.path());
    assert_eq!(strip(&a), strip(&b));
    let rate = json(&a)["accept_rate"].as_f64().unwrap();
    assert!(rate > 0.0 && rate < 1.0);

    let other = unitest(
        &["test", "pauli", "hadamard.json", "--epsilon", "0.9", "--trials", "200", "--seed", "12"],
        dir.path(),
    );
    assert_ne!(strip(&a), strip(&other));

    let v1 = unitest(&["verify", "metrics", "--instances", "20", "--seed", "5"], dir.path());
    let v2 = unitest(&["verify", "metrics", "--instances", "20", "--seed", "5"], dir.path());
    assert_eq!(v1.stdout, v2.stdout);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let out = Command::new(env!("CARGO_BIN_EXE_unitest"))
        .args(["test", "pauli", "hadamard.json", "--epsilon", "0.9", "--trials", "5"])
        .current_dir(dir.path())
        .env("UNITEST_SEED", "0x2A")
        .output()
        .unwrap();
    assert_eq!(json(&out)["seed"], 42);
    let default = unitest(
        &["test", "pauli", "hadamard.json", "--epsilon", "0.9", "--trials", "5"],
        dir.path(),
    );
    assert_eq!(json(&default)["seed"], 0xC0FFEE);
}

#[test]
fn error_paths_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    fixtures(dir.path());
    let cases: [(&[&str], &str); 7] = [
        (&["oracle", "pauli", "missing.json"], "cannot load"),
        (&["oracle", "pauli", "bad.json"], "not unitary"),
        (&["test", "pauli", "hadamard.json", "--epsilon", "1.5"], "epsilon"),
        (&["test", "junta", "cnot.json", "--epsilon", "0.3"], "--k"),
        (&["test", "junta", "cnot.json", "--k", "3", "--epsilon", "0.3"], "k"),
        (&["generate", "clifford", "--n", "5"], ""),
        (&["test", "pauli"], ""),
    ];
    for (args, needle) in cases {
        let out = unitest(args, dir.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains(needle),
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
    let gen = unitest(&["generate", "haar", "--n", "5", "--out", "h5.json"], dir.path());
    assert!(gen.status.success());
    let out = unitest(&["oracle", "junta", "h5.json", "--k", "1"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}
