use std::path::PathBuf;
use std::process::{Command, Output};

use bellhide_core::states::{hiding_state, BellDiagonalState, StateRecord};
use serde_json::Value;

fn bellhide(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bellhide"))
        .args(args)
        .env_remove("BELLHIDE_OUTPUT_DIR")
        .output()
        .expect("binary runs")
}

fn ok_json(args: &[&str]) -> Value {
    let out = bellhide(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json output")
}

fn ok_text(args: &[&str]) -> String {
    let out = bellhide(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn temp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("bellhide-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn states_single_singlet() {
    let v = ok_json(&["states", "--n", "1", "--bit", "1"]);
    let w = &v["result"]["state"]["weights"];
    assert_eq!(w.as_array().unwrap().len(), 1);
    assert_eq!(w[0]["string"], "11");
    assert_eq!(w[0]["num"], 1);
    assert_eq!(w[0]["den"], 1);
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(v["config"]["n"], 1);
    assert_eq!(v["assumptions"]["log_base"], 2);
}

#[test]
fn states_even_pair_class() {
    let rows = csv_rows(&ok_text(&["states", "--n", "2", "--bit", "0", "--format", "csv"]));
    assert_eq!(rows.len(), 10);
    assert!(rows.iter().all(|r| r[1] == "1" && r[2] == "10"));
}

#[test]
fn states_round_trip() {
    for method in ["direct", "recurrence"] {
        let v = ok_json(&["states", "--n", "3", "--bit", "1", "--method", method]);
        let rec: StateRecord = serde_json::from_value(v["result"]["state"].clone()).unwrap();
        assert_eq!(BellDiagonalState::from_record(&rec).unwrap(), hiding_state(3, 1).unwrap());
    }
}

#[test]
fn certify_reduced_rows() {
    let rows = csv_rows(&ok_text(&["certify", "--n-max", "6", "--format", "csv"]));
    assert_eq!(rows.len(), 6);
    let deltas: Vec<&str> = rows.iter().map(|r| r[2].as_str()).collect();
    assert_eq!(deltas, ["1", "1/2", "1/4", "1/8", "1/16", "1/32"]);
    for r in &rows {
        assert!(r[5].parse::<f64>().unwrap() >= -1e-9);
    }
}

#[test]
fn certify_both_agree() {
    let v = ok_json(&["certify", "--n-max", "2", "--mode", "both"]);
    let certs = v["result"]["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 4);
    let as_f64 = |x: &Value| match x {
        Value::Object(m) => m["num"].as_f64().unwrap() / m["den"].as_f64().unwrap(),
        other => other.as_f64().unwrap(),
    };
    for pair in certs.chunks(2) {
        let a = as_f64(&pair[0]["lp_optimum_minus_1"]);
        let b = as_f64(&pair[1]["lp_optimum_minus_1"]);
        assert!((a - b).abs() < 1e-9);
    }
    assert_eq!(certs[0]["solver_stats"]["method"], "reduced");
    assert_eq!(certs[1]["solver_stats"]["method"], "full");
}

#[test]
fn attack_all_z_satisfied() {
    let v = ok_json(&["attack", "--strategy", "all-z", "--n", "2"]);
    let r = &v["result"]["reports"][0];
    assert_eq!(r["satisfied"], true);
    assert_eq!(r["strategy"], "all-z");
    assert!(r["mutual_info_bits"].as_f64().unwrap() <= 0.5);
}

#[test]
fn attack_all_strategies() {
    let v = ok_json(&["attack", "--n", "3", "--prior", "0.3"]);
    let reports = v["result"]["reports"].as_array().unwrap();
    assert_eq!(reports.len(), 7);
    assert!(reports.iter().all(|r| r["satisfied"] == true));
    assert_eq!(v["config"]["prior"]["num"], 3);
    assert_eq!(v["config"]["prior"]["den"], 10);
}

#[test]
fn prep_stream() {
    let text = ok_text(&["prep", "--n", "3", "--bit", "1", "--samples", "1000", "--seed", "7"]);
    let lines: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 1002);
    assert_eq!(lines[0]["command"], "prep");
    for (i, rec) in lines[1..1001].iter().enumerate() {
        assert_eq!(rec["ebits"], 1);
        assert_eq!(rec["bit"], 1);
        assert_eq!(rec["seed"], 7);
        assert_eq!(rec["index"], i);
        assert!(rec["string"].is_string());
    }
    let summary = &lines[1001]["summary"];
    assert_eq!(summary["ebits_total"], 1000);
    assert_eq!(summary["exact_distribution_matches"], true);
}

#[test]
fn prep_requires_seed() {
    let out = bellhide(&["prep", "--n", "2", "--bit", "1", "--samples", "3"]);
    assert!(!out.status.success());
    let err = String::from_utf8(out.stderr).unwrap();
    assert_eq!(err.lines().count(), 1);
    assert!(err.contains("--seed"));
}

#[test]
fn prep_then_unlock() {
    let dir = temp_dir("unlock");
    let file = dir.join("samples.jsonl");
    let f = file.to_str().unwrap();
    for (bit, path) in [("1", "auto"), ("0", "parity-draw"), ("0", "clifford")] {
        ok_text(&["prep", "--n", "3", "--bit", bit, "--samples", "40", "--seed", "1", "--path", path, "--output", f]);
        let v = ok_json(&["unlock", "--input", f]);
        assert_eq!(v["summary"]["checked"], 40);
        assert_eq!(v["summary"]["correct"], 40);
        let bits = v["result"]["bits"].as_array().unwrap();
        assert!(bits.iter().all(|b| b.as_u64() == bit.parse::<u64>().ok()));
    }
    ok_text(&["prep", "--n", "2", "--bit", "1", "--samples", "5", "--seed", "1", "--format", "csv", "--output", f]);
    let v = ok_json(&["unlock", "--input", f]);
    assert_eq!(v["summary"]["correct"], 5);
}

#[test]
fn verify_clifford_defaults_to_exact() {
    let v = ok_json(&["verify-clifford", "--n", "1"]);
    assert_eq!(v["result"]["mode"], "exact");
    assert!(v["result"]["trace_distance"].as_f64().unwrap() <= 1e-10);
    let out = bellhide(&["verify-clifford", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn multibit_size() {
    let v = ok_json(&["multibit", "--k", "4", "--epsilon", "0.01"]);
    assert_eq!(v["result"]["n_required"], 18);
    let v = ok_json(&["multibit", "--k", "2", "--epsilon", "0.1", "--bits", "10", "--n", "2"]);
    assert_eq!(v["result"]["encoding"]["blocks"].as_array().unwrap().len(), 2);
    let v = ok_json(&["multibit", "--k", "3", "--epsilon", "0.1", "--bits", "011", "--seed", "4"]);
    assert_eq!(v["result"]["round_trip"], true);
    assert_eq!(v["result"]["unlocked"], serde_json::json!([0, 1, 1]));
}

#[test]
fn oracle_checks_pass() {
    let dir = temp_dir("oracle");
    let dump = dir.join("dump.json");
    let v = ok_json(&["oracle", "--n", "2", "--dump", dump.to_str().unwrap()]);
    let checks = v["result"]["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["pass"] == true));
    let d: Value = serde_json::from_str(&std::fs::read_to_string(dump).unwrap()).unwrap();
    assert_eq!(d["rho0"]["dim"], 16);
}

#[test]
fn errors_are_single_line() {
    for args in [
        &["states", "--n", "11", "--bit", "0"][..],
        &["states", "--n", "1", "--bit", "2"],
        &["attack", "--strategy", "nope", "--n", "2"],
        &["certify", "--n-max", "4", "--mode", "full"],
        &["multibit", "--k", "1", "--epsilon", "1.5"],
        &["bogus"],
        &["states", "--n"],
    ] {
        let out = bellhide(args);
        assert!(!out.status.success(), "{args:?}");
        let err = String::from_utf8(out.stderr).unwrap();
        assert_eq!(err.lines().count(), 1, "{args:?}: {err}");
        assert!(err.starts_with("error: "), "{err}");
        assert!(out.stdout.is_empty());
    }
    assert_eq!(bellhide(&["states", "--n", "11", "--bit", "0"]).status.code(), Some(3));
}

#[test]
fn output_directory_variable() {
    let dir = temp_dir("outdir");
    let out = Command::new(env!("CARGO_BIN_EXE_bellhide"))
        .args(["multibit", "--k", "1", "--epsilon", "0.5"])
        .env("BELLHIDE_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("multibit.json")).unwrap()).unwrap();
    assert_eq!(v["result"]["n_required"], 4);
    let out = Command::new(env!("CARGO_BIN_EXE_bellhide"))
        .args(["multibit", "--k", "1", "--epsilon", "0.5", "--format", "csv", "--output", "sub/size.csv"])
        .env("BELLHIDE_OUTPUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.join("sub/size.csv").exists());
}

#[test]
fn csv_and_json_agree() {
    let v = ok_json(&["attack", "--n", "2"]);
    let rows = csv_rows(&ok_text(&["attack", "--n", "2", "--format", "csv"]));
    let reports = v["result"]["reports"].as_array().unwrap();
    assert_eq!(rows.len(), reports.len());
    for (r, row) in reports.iter().zip(&rows) {
        assert_eq!(r["strategy"], row[0].as_str());
        assert_eq!(r["mutual_info_bits"].to_string(), row[3]);
        assert_eq!(r["bound_bits"].to_string(), row[4]);
    }
    let v = ok_json(&["certify", "--n-max", "3"]);
    let rows = csv_rows(&ok_text(&["certify", "--n-max", "3", "--format", "csv"]));
    for (c, row) in v["result"]["certificates"].as_array().unwrap().iter().zip(&rows) {
        let opt = &c["lp_optimum_minus_1"];
        assert_eq!(format!("{}/{}", opt["num"], opt["den"]), row[3]);
    }
}

#[test]
fn identical_seeds_identical_bytes() {
    let args = ["prep", "--n", "5", "--bit", "1", "--samples", "100", "--seed", "42", "--trace"];
    assert_eq!(bellhide(&args).stdout, bellhide(&args).stdout);
    let other = ["prep", "--n", "5", "--bit", "1", "--samples", "100", "--seed", "43", "--trace"];
    assert_ne!(bellhide(&args).stdout, bellhide(&other).stdout);
}
