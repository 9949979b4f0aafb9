//! The `twostage` binary end to end: exit codes, report shape and
//! byte-determinism.

use std::path::{Path, PathBuf};
use std::process::Command;

use serde_json::Value;

struct Run {
    code: i32,
    stdout: String,
}

fn twostage(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_twostage"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("exit code"),
        stdout: String::from_utf8(out.stdout).expect("utf-8 output"),
    }
}

fn json(run: &Run) -> Value {
    serde_json::from_str(&run.stdout).expect("stdout is JSON")
}

/// A fresh scratch directory under the target dir.
fn scratch(name: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(name);
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn generated(dir: &Path, family: &str, params: &[&str]) -> String {
    let path = dir.join(format!("{family}.json"));
    let path_text = path.to_str().unwrap().to_string();
    let mut args = vec!["generate", "--family", family, "--out", &path_text];
    for p in params {
        args.push("--param");
        args.push(p);
    }
    let run = twostage(&args);
    assert_eq!(run.code, 0, "{}", run.stdout);
    path_text
}

fn without_clock(mut doc: Value) -> Value {
    doc.as_object_mut().unwrap().remove("wall_clock_seconds");
    doc
}

#[test]
fn compare_second_example() {
    let dir = scratch("compare");
    let file = generated(&dir, "example2", &[]);
    let run = twostage(&["compare", &file]);
    assert_eq!(run.code, 0);
    let doc = json(&run);
    let results = &doc["comparison"]["results"];
    assert_eq!(results["standard"]["profit"]["exact"], "6/5");
    assert_eq!(results["standard"]["profit"]["decimal"], "1.2");
    assert_eq!(results["terminate"]["profit"]["exact"], "19/10");
    assert!(results["pay"]["profit"]["exact"].is_string());
    assert!(results["linear"]["profit"]["exact"].is_string());
    assert_eq!(doc["comparison"]["welfare"]["exact"], "2");
    assert_eq!(
        doc["comparison"]["ratios"]["terminate_over_standard"]["exact"],
        "19/12"
    );
    assert_eq!(doc["command"]["subcommand"], "compare");
    assert_eq!(doc["instance_digest"].as_str().unwrap().len(), 64);
    assert!(doc["wall_clock_seconds"].is_number());
}

#[test]
fn solve_pay_on_deterministic_separation() {
    let dir = scratch("thm3");
    let file = generated(&dir, "thm3", &["N1=2", "N2=2", "lambda=10"]);
    let pay = json(&twostage(&["solve", &file, "--contract", "pay"]));
    assert_eq!(pay["result"]["profit"]["exact"], "7");
    assert_eq!(pay["result"]["profit_over_welfare"]["exact"], "1");
    let std = json(&twostage(&["solve", &file, "--contract", "standard"]));
    assert_eq!(std["result"]["profit"]["exact"], "3");
    let compare = json(&twostage(&["compare", &file]));
    assert_eq!(
        compare["comparison"]["ratios"]["pay_over_standard"]["exact"],
        "7/3"
    );
}

#[test]
fn reports_are_byte_deterministic() {
    let dir = scratch("determinism");
    let file = generated(&dir, "example1", &[]);
    for args in [
        vec!["compare", file.as_str()],
        vec!["breakpoints", file.as_str()],
        vec!["welfare", file.as_str()],
        vec!["solve", file.as_str(), "--contract", "linear"],
    ] {
        let a = json(&twostage(&args));
        let b = json(&twostage(&args));
        assert_eq!(
            serde_json::to_string(&without_clock(a)).unwrap(),
            serde_json::to_string(&without_clock(b)).unwrap()
        );
    }
    let a = twostage(&[
        "generate",
        "--family",
        "random_general",
        "--param",
        "seed=4",
    ]);
    let b = twostage(&[
        "generate",
        "--family",
        "random_general",
        "--param",
        "seed=4",
    ]);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn validate_reports_violations() {
    let dir = scratch("validate");
    let good = generated(&dir, "example1", &[]);
    let ok = twostage(&["validate", &good]);
    assert_eq!(ok.code, 0);
    assert_eq!(json(&ok)["ok"], true);

    // a transition that does not sum to one
    let text = std::fs::read_to_string(&good)
        .unwrap()
        .replacen("\"9/10\"", "\"8/10\"", 1);
    let bad = dir.join("bad.json");
    std::fs::write(&bad, text).unwrap();
    let run = twostage(&["validate", bad.to_str().unwrap()]);
    assert_eq!(run.code, 1);
    let doc = json(&run);
    assert!(!doc["detail"]["violations"].as_array().unwrap().is_empty());
    assert_eq!(doc["error"]["exit_code"], 1);
}

#[test]
fn exit_codes() {
    let dir = scratch("codes");
    let garbage = dir.join("garbage.json");
    std::fs::write(&garbage, "{ not json").unwrap();
    assert_eq!(twostage(&["classify", garbage.to_str().unwrap()]).code, 3);
    assert_eq!(twostage(&["classify", "/nonexistent.json"]).code, 3);
    assert_eq!(twostage(&["solve"]).code, 3);

    let file = generated(&dir, "thm3", &[]);
    let capped = twostage(&[
        "solve",
        &file,
        "--contract",
        "standard",
        "--profiles-cap",
        "2",
    ]);
    assert_eq!(capped.code, 2);
    let capped = twostage(&[
        "solve",
        &file,
        "--contract",
        "terminate",
        "--subsets-cap",
        "1",
    ]);
    assert_eq!(capped.code, 2);
    assert_eq!(twostage(&["classify", &file]).code, 0);
}

#[test]
fn best_response_and_simulation() {
    let dir = scratch("contracts");
    let file = generated(&dir, "example1", &[]);
    let contract = dir.join("pay.json");
    std::fs::write(
        &contract,
        r#"{"kind": "pay_halfway", "s": ["0", "2"], "t": ["0", "0.1"]}"#,
    )
    .unwrap();
    let contract = contract.to_str().unwrap();
    let br = json(&twostage(&[
        "best-response",
        &file,
        "--contract-file",
        contract,
    ]));
    assert_eq!(
        br["best_response"]["principal_profit"]["exact"],
        "2659/1000"
    );

    let args = [
        "simulate",
        &file,
        "--contract-file",
        contract,
        "--episodes",
        "100000",
        "--seed",
        "7",
    ];
    let a = json(&twostage(&args));
    let sim = &a["simulation"];
    assert_eq!(sim["analytic_profit"]["exact"], "2659/1000");
    assert!(sim["z_score"].as_f64().unwrap().abs() < 5.0);
    let b = json(&twostage(&args));
    assert_eq!(without_clock(a), without_clock(b));
}

#[test]
fn breakpoint_csv() {
    let dir = scratch("csv");
    let file = generated(&dir, "example1", &[]);
    let csv = dir.join("plot.csv");
    let run = twostage(&["breakpoints", &file, "--csv", csv.to_str().unwrap()]);
    assert_eq!(run.code, 0);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("alpha_exact,alpha_decimal,profit_exact,profit_decimal,profile")
    );
    assert_eq!(lines.count(), 3);
    let doc = json(&run);
    assert_eq!(doc["analysis"]["optimal"]["profit"]["exact"], "91/36");
}
