use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn qbp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qbp"))
        .args(args)
        .env_remove("QBP_CONFIG")
        .output()
        .expect("qbp runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR"));
    dir.join(name)
}

#[test]
fn eval_at_origin_is_zero() {
    let out = qbp(&["eval", "--family", "2", "--q", "0.5", "--nu", "1", "--z-re", "0", "--z-im", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["value_re"], 0.0);
    assert_eq!(v["value_im"], 0.0);
    assert_eq!(v["tail_bound"], 0.0);
}

#[test]
fn eval_matches_reference() {
    let out = qbp(&["eval", "--family", "2", "--q", "0.5", "--nu", "1", "--z-re", "0.5", "--z-im", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let re = v["value_re"].as_f64().unwrap();
    assert!((re - 0.458_828_184_686_278_33).abs() <= v["tail_bound"].as_f64().unwrap());
    assert!(v["terms_used"].as_u64().unwrap() >= 2);
}

#[test]
fn eval_derivative_and_partial() {
    let out = qbp(&["eval", "--family", "3", "--q", "0.25", "--nu", "1", "--z-re", "0", "--z-im", "0.9", "--deriv"]);
    let v = json(&out);
    assert!((v["value_re"].as_f64().unwrap() - 0.941_490_655_559_714_55).abs() < 1e-14);
    assert!((v["value_im"].as_f64().unwrap() + 0.638_881_076_579_747_58).abs() < 1e-14);

    let out = qbp(&["eval", "--family", "3", "--q", "0.25", "--nu", "1", "--z-re", "1", "--z-im", "0", "--partial", "2"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["value_re"].as_f64().unwrap() - 0.668_524_397_413_286_30).abs() < 1e-15);
}

#[test]
fn eval_validation_and_truncation_exit_codes() {
    let out = qbp(&["eval", "--family", "2", "--q", "1.5", "--nu", "1", "--z-re", "0.5", "--z-im", "0"]);
    assert_eq!(code(&out), 2);
    assert!(out.stdout.is_empty());
    assert!(!out.stderr.is_empty());
    assert_eq!(code(&qbp(&["eval", "--family", "4", "--q", "0.5", "--nu", "1", "--z-re", "0", "--z-im", "0"])), 2);
    assert_eq!(code(&qbp(&["eval", "--family", "2", "--q", "0.5", "--nu", "1", "--z-re", "1", "--z-im", "1"])), 2);
    let out = qbp(&["eval", "--family", "3", "--q", "0.25", "--nu", "1", "--z-re", "0.5", "--z-im", "0", "--max-terms", "3"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn check_first_theorem_satisfied() {
    let out = qbp(&["check", "--theorem", "t1", "--part", "ratio", "--variant", "literal", "--q", "0.1", "--nu", "1"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 5);
    for r in records {
        assert_eq!(r["verdict"], "satisfied");
        assert!((r["bound_value"].as_f64().unwrap() - 0.968_152_866).abs() < 1e-8);
    }
}

#[test]
fn check_second_theorem_literal_violated() {
    let out = qbp(&["check", "--theorem", "t2", "--part", "ratio", "--variant", "literal", "--q", "0.1", "--nu", "1"]);
    assert_eq!(code(&out), 4);
    assert_eq!(json(&out)["verdict"], "violated");
}

#[test]
fn check_fourth_theorem_hypothesis_failed() {
    let out = qbp(&["check", "--theorem", "t4", "--part", "ratio", "--variant", "both", "--q", "0.5", "--nu", "1"]);
    assert_eq!(code(&out), 5);
    let v = json(&out);
    let records = v["records"].as_array().unwrap();
    assert_eq!(records.len(), 10);
    assert!(records.iter().all(|r| r["verdict"] == "hypothesis-failed"));
}

#[test]
fn check_honours_m_flag() {
    let out = qbp(&["check", "--theorem", "t3", "--variant", "pattern", "--q", "0.01", "--nu", "1", "--m", "2,4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let ms: Vec<u64> = v["records"].as_array().unwrap().iter().map(|r| r["m"].as_u64().unwrap()).collect();
    assert_eq!(ms, [2, 4]);
}

fn csv_rows(out: &Output) -> Vec<csv::StringRecord> {
    let mut reader = csv::Reader::from_reader(out.stdout.as_slice());
    let header = reader.headers().unwrap().clone();
    assert_eq!(header.iter().collect::<Vec<_>>(), ["q", "nu", "hypothesis", "bound", "empirical_min", "margin", "verdict"]);
    reader.records().map(|r| r.unwrap()).collect()
}

#[test]
fn atlas_single_cell() {
    let out = qbp(&[
        "atlas", "--theorem", "t1", "--variant", "literal", "--q-min", "0.1", "--q-max", "0.1", "--nu-min", "1",
        "--nu-max", "1", "--steps", "1x1",
    ]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][2], "true");
    assert_eq!(&rows[0][6], "satisfied");
}

#[test]
fn atlas_fourth_theorem_large_q_fails_hypothesis() {
    let out = qbp(&[
        "atlas", "--theorem", "t4", "--q-min", "0.3", "--q-max", "0.9", "--nu-min", "0", "--nu-max", "3", "--steps",
        "3x4",
    ]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 12);
    assert!(rows.iter().all(|r| &r[6] == "hypothesis-failed" && &r[2] == "false"));
}

#[test]
fn atlas_rejects_bad_ranges() {
    let base = ["atlas", "--theorem", "t1", "--nu-min", "0", "--nu-max", "1"];
    let mut args = base.to_vec();
    args.extend(["--q-min", "0.5", "--q-max", "1.2"]);
    assert_eq!(code(&qbp(&args)), 2);
    let mut args = base.to_vec();
    args.extend(["--q-min", "0.1", "--q-max", "0.2", "--steps", "0x3"]);
    assert_eq!(code(&qbp(&args)), 2);
}

#[test]
fn selftest_default_and_empty() {
    let out = qbp(&["selftest"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["failed"], 0);
    assert!(v["checks_run"].as_u64().unwrap() > 0);

    let out = qbp(&["selftest", "--cases", "0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["checks_run"], 0);
    assert_eq!(v["cases"], 0);
}

#[test]
fn corrupted_config_is_a_validation_error() {
    let path = scratch("corrupt.cfg");
    std::fs::write(&path, "tolerance = banana\n").unwrap();
    let out = qbp(&["selftest", "--config", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);

    let out = Command::new(env!("CARGO_BIN_EXE_qbp"))
        .args(["selftest", "--cases", "1"])
        .env("QBP_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn flags_override_config_file() {
    let path = scratch("override.cfg");
    std::fs::write(&path, "# sweep\nm_sweep = 1, 2\nseed = 5\n").unwrap();
    let out = qbp(&["config", "--config", path.to_str().unwrap(), "--seed", "11"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("seed = 11"));
    assert!(text.contains("m_sweep = 1, 2"));
}

#[test]
fn out_flag_writes_file_and_keeps_stdout_empty() {
    let path = scratch("eval.json");
    let _ = std::fs::remove_file(&path);
    let out = qbp(&[
        "eval", "--family", "2", "--q", "0.5", "--nu", "1", "--z-re", "0.5", "--z-im", "0", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(v["value_re"].is_f64());
}

#[test]
fn atlas_is_deterministic() {
    let args = [
        "atlas", "--theorem", "t2", "--variant", "pattern", "--q-min", "0.05", "--q-max", "0.4", "--nu-min", "0.5",
        "--nu-max", "2", "--steps", "3x3", "--seed", "123",
    ];
    assert_eq!(qbp(&args).stdout, qbp(&args).stdout);
}
