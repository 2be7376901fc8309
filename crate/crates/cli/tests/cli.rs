//! End-to-end checks of the binary: flag grammar, file I/O, output shapes,
//! and the exit-code contract (0 success, 1 precondition, 2 cap/budget,
//! 64 usage).

use std::path::PathBuf;
use std::process::{Command, Output};

fn cosetforge(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cosetforge")).args(args).output().expect("binary runs")
}

fn stdout_of(args: &[&str]) -> String {
    let out = cosetforge(args);
    assert!(
        out.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn scratch_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("cosetforge-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn scalar_commands() {
    assert_eq!(stdout_of(&["count", "--p", "2", "--type", "1,1,1", "--r", "1"]), "7\n");
    assert_eq!(stdout_of(&["count", "--p", "2", "--type", "2,1", "--r", "2"]), "3\n");
    assert_eq!(stdout_of(&["cosets", "--p", "2", "--type", "1,1", "--r", "1"]), "6\n");
    assert_eq!(stdout_of(&["lambda", "--L", "8", "--p", "2"]), "11\n");
    assert_eq!(stdout_of(&["represent", "--source", "2^2", "--target", "2^3"]), "true\n");
    assert_eq!(
        stdout_of(&["represent", "--source", "2^2", "--target", "2^1,3^5"]),
        "false\n"
    );
    let norm = stdout_of(&["norm", "--group", r#"{"p":2,"type":[2]}"#, "--subset", "0,1"]);
    let value: f64 = norm.trim().parse().unwrap();
    assert!((value - (2.0 + 2.0 * 2f64.sqrt()) / 4.0).abs() < 1e-9);
}

#[test]
fn bounds_json_shape() {
    let out = stdout_of(&["bounds", "--p", "2", "--N", "4", "--a", "2", "--r", "2", "--slack", "2"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(json["exact"].is_string());
    assert_eq!(json["exact_within_bounds"], serde_json::Value::Bool(true));
    assert!(json["upper"]["value"]["exact"].is_string());
    assert!(json["lower"]["power_form"]["num"].is_number());
    // Degenerate r = 0 stays within bounds (upper clamps at 1 × index).
    let out = stdout_of(&["bounds", "--p", "2", "--N", "2", "--a", "2", "--r", "0"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["exact_within_bounds"], serde_json::Value::Bool(true));
}

#[test]
fn bound_evaluators() {
    let out = stdout_of(&["gs-bound", "--c-norm", "1", "--D", "0"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    let value = json["value"]["real"].as_f64().unwrap();
    assert!((value - std::f64::consts::E).abs() < 1e-12);

    let out = stdout_of(&["evertse-bound", "--n", "3", "--C1", "1", "--C2", "1"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    let value = json["value"]["real"].as_f64().unwrap();
    assert!((value - 3f64.powi(27)).abs() / 3f64.powi(27) < 1e-12);

    assert_eq!(
        stdout_of(&["phi", "--n", "16", "--mode", "p-group"]).trim().parse::<f64>().unwrap()
            .round(),
        1.0
    );
}

#[test]
fn extract_and_minrep_files() {
    let comb = scratch_file(
        "comb.json",
        r#"{"group":{"p":2,"type":[1,1]},
            "positives":[{"subgroup":{"group":{"p":2,"type":[1,1]},"generators":[[1,0],[0,1]]},"representative":[0,0]}],
            "negatives":[{"subgroup":{"group":{"p":2,"type":[1,1]},"generators":[[0,1]]},"representative":[0,0]}]}"#,
    );
    let out = stdout_of(&["extract", "--input", comb.to_str().unwrap()]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["ledger"]["k"], 1);
    assert_eq!(json["ledger"]["size_exp"], 1);
    assert_eq!(json["coset"]["representative"], serde_json::json!([1, 0]));
    std::fs::remove_file(comb).ok();

    let set = scratch_file(
        "set.json",
        r#"{"group":{"p":2,"type":[1,1,1]},"elements":[[0,0,1],[0,1,0],[1,1,1]]}"#,
    );
    assert_eq!(stdout_of(&["minrep", "--input", set.to_str().unwrap(), "--max-l", "4"]), "2\n");
    assert_eq!(stdout_of(&["minrep", "--input", set.to_str().unwrap(), "--max-l", "1"]), "null\n");
    std::fs::remove_file(set).ok();
}

#[test]
fn witness_with_default_family() {
    let sigma = scratch_file(
        "sigma.json",
        r#"{"source":{"p":2,"type":[1]},
            "target":{"p":2,"type":[1]},
            "map":[[[0],[1]],[[1],[0]]]}"#,
    );
    let out = stdout_of(&["witness", "--sigma", sigma.to_str().unwrap()]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    // Translation by 1 on the dual of Z_2 is an isometry on every witness.
    let bound = json["distortion_lower_bound"].as_f64().unwrap();
    assert!((bound - 1.0).abs() < 1e-12);
    assert_eq!(json["witnesses"].as_array().unwrap().len(), 3);
    std::fs::remove_file(sigma).ok();
}

#[test]
fn sunit_outputs() {
    let out = stdout_of(&["sunit", "zero", "--primes", "2,3", "--l", "3", "--exp-bound", "3"]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["count"], 4);
    let solutions = json["solutions"].as_array().unwrap();
    assert!(solutions.contains(&serde_json::json!([8, 1, -9])));

    let out = stdout_of(&[
        "sunit", "power", "--primes", "3", "--p", "2", "--R", "2", "--l", "2", "--exp-bound", "1",
    ]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(json["solutions"].as_array().unwrap().contains(&serde_json::json!([3, 1])));

    let out = stdout_of(&[
        "sunit", "compare", "--primes", "2,3", "--l", "3", "--exp-bound", "3",
    ]);
    let json: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(json["observed"], 4);
}

#[test]
fn survey_csv_output() {
    let csv = stdout_of(&[
        "survey",
        "--group",
        r#"{"p":2,"type":[2]}"#,
        "--output",
        "csv",
    ]);
    let lines: Vec<&str> = csv.trim().lines().collect();
    assert_eq!(lines[0], "group,subset_bitmask,norm,is_coset,min_coset_length,distinct_subgroups");
    assert_eq!(lines.len(), 16); // header + 15 nonempty subsets
    assert!(lines.iter().any(|l| l.contains("1.207106781187")));
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir()
        .join(format!("cosetforge-test-{}-out.json", std::process::id()));
    let out = cosetforge(&[
        "count", "--p", "2", "--type", "1,1", "--r", "1", "--out", path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read_to_string(&path).unwrap(), "3\n");
    std::fs::remove_file(path).ok();
}

#[test]
fn exit_codes() {
    // Precondition violation: below the iterated-log guard.
    let out = cosetforge(&["phi", "--n", "10", "--mode", "p-group"]);
    assert_eq!(out.status.code(), Some(1));

    // Cap exceeded: norm on a group larger than the cap.
    let out = cosetforge(&[
        "norm", "--group", r#"{"p":2,"type":[1,1,1]}"#, "--subset", "0", "--cap", "4",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Budget exceeded.
    let out = cosetforge(&[
        "sunit", "zero", "--primes", "2,3,5", "--l", "3", "--exp-bound", "4", "--budget", "10",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Usage errors.
    let out = cosetforge(&["count", "--p", "2", "--type", "1,1", "--r", "1", "--bogus"]);
    assert_eq!(out.status.code(), Some(64));
    let out = cosetforge(&["nonsense"]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn env_cap_override() {
    let out = Command::new(env!("CARGO_BIN_EXE_cosetforge"))
        .args(["norm", "--group", r#"{"p":2,"type":[1,1,1]}"#, "--subset", "0"])
        .env("COSETFORGE_CAP", "4")
        .output()
        .expect("binary runs");
    assert_eq!(out.status.code(), Some(2));
    // An explicit --cap wins over the environment.
    let out = Command::new(env!("CARGO_BIN_EXE_cosetforge"))
        .args(["norm", "--group", r#"{"p":2,"type":[1,1,1]}"#, "--subset", "0", "--cap", "64"])
        .env("COSETFORGE_CAP", "4")
        .output()
        .expect("binary runs");
    assert!(out.status.success());
}

#[test]
fn verify_threads_agree_with_single_thread() {
    let single = stdout_of(&[
        "verify", "--grid-cap", "64", "--samples", "20", "--output", "text",
    ]);
    let multi = stdout_of(&[
        "verify", "--grid-cap", "64", "--samples", "20", "--threads", "2", "--output", "text",
    ]);
    assert_eq!(single, multi);
    assert!(single.contains("10/10 checks passed"));
}
