use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

use necklace_core::necklaces::necklace_table;
use necklace_core::spectral::{make_config, solve_spectrum_scan};

fn necklace(out_dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_necklace"))
        .args(args)
        .env("NECKLACE_OUT_DIR", out_dir)
        .output()
        .expect("binary runs")
}

fn run(args: &[&str]) -> Output {
    let dir = tempfile::tempdir().unwrap();
    necklace(dir.path(), args)
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn counts() {
    let out = run(&["necklaces", "4", "--count-only"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out), "6\n");
    assert_eq!(stdout(&run(&["necklaces", "6", "--prime-only", "--count-only"])), "9\n");
    assert_eq!(
        stdout(&run(&["necklaces", "64", "--count-only"])),
        "288230376218822676\n"
    );
}

#[test]
fn stats_table_matches_library() {
    let out = run(&["necklaces", "2", "--stats"]);
    assert_eq!(out.status.code(), Some(0));
    let rows: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(rows, serde_json::to_value(necklace_table(2).unwrap()).unwrap());
    assert_eq!(rows[2]["necklace"], "RR");
    assert_eq!(rows[2]["chi"], 2);

    let csv = stdout(&run(&["necklaces", "4", "--stats", "--format", "csv"]));
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "necklace,primitive,nu,n_L,n_R,n,alpha,beta,gamma,chi");
    assert_eq!(lines[3], "LLRR,LLRR,1,2,2,4,2,2,6,5");
    assert_eq!(lines.len(), 7);
    assert!(!csv.contains('\r'));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["necklaces", "4", "--count-only", "--stats"]).status.code(), Some(2));
    assert_eq!(run(&["necklaces", "0"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "binomial"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "binomial", "2", "5"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "nonsense", "2"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "1.5", "0.5", "10"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "0.5", "1", "10"]).status.code(), Some(2));
    assert_eq!(run(&["spectrum", "0.4", "8/9", "10", "--method", "chebyshev"]).status.code(), Some(2));
    assert_eq!(
        run(&["spectrum", "0.4", "8/9", "10", "--method", "chebyshev", "--p", "5", "--q", "3"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["density", "0.4", "8/9", "1", "50", "0.5"]).status.code(), Some(2));
}

#[test]
fn verify_reports() {
    let out = run(&["verify", "binomial", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let reports: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(reports.as_array().unwrap().len(), 3);
    assert_eq!(reports[1]["lhs"], "2/1");
    assert_eq!(reports[1]["contributors"], serde_json::json!(["LLLR", "LLRR", "LRRR"]));

    let out = run(&["verify", "weighted", "1", "0"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["lhs"], "0/1");
    assert_eq!(report["term_count"], 0);

    let out = run(&["verify", "parity", "13"]);
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["lhs"], serde_json::json!([]));
    assert_eq!(report["verified"], true);

    for args in [&["verify", "weighted-sum", "4"][..], &["verify", "poisson"]] {
        assert_eq!(run(args).status.code(), Some(0), "{args:?}");
    }
}

#[test]
fn spectrum_files() {
    let dir = tempfile::tempdir().unwrap();
    let out = necklace(dir.path(), &["spectrum", "1", "0.5", "10", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("spectrum.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("index,k,residual"));
    let roots: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(roots.len(), 3);
    for (n, k) in roots.iter().enumerate() {
        assert!((k - std::f64::consts::PI * (n + 1) as f64).abs() < 1e-10);
    }

    let out = necklace(dir.path(), &["spectrum", "0.5", "0", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let file: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("spectrum.json")).unwrap()).unwrap();
    let direct = solve_spectrum_scan(&make_config(0.5, 0.0).unwrap(), 20.0).unwrap();
    assert_eq!(file["roots"], serde_json::to_value(&direct.roots).unwrap());

    let out = necklace(
        dir.path(),
        &["spectrum", "0.4", "0.888889", "20", "--method", "chebyshev", "--p", "3", "--q", "1"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let file: Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("spectrum.json")).unwrap()).unwrap();
    let first = file["roots"][0].as_f64().unwrap();
    let theta = (1.5f64.sqrt() / 2.0).acos();
    assert!((first - 2.0 * theta / 0.4).abs() < 1e-5);

    let manifest = fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap();
    let entries: Vec<Value> = manifest.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(entries.len(), 3);
    assert_eq!(entries[2]["command"], "spectrum");
    assert_eq!(entries[2]["parameters"]["p"], 3);
    assert!(entries[2]["timestamp"].as_str().unwrap().ends_with('Z'));
    assert!(entries[0]["outputs"][0].as_str().unwrap().ends_with("spectrum.csv"));
}

#[test]
fn density_outputs_are_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["density", "0.4", "8/9", "5", "50", "0.5236"];
    assert_eq!(necklace(dir.path(), &args).status.code(), Some(0));
    let first = fs::read(dir.path().join("density.csv")).unwrap();
    let summary = fs::read(dir.path().join("density_summary.json")).unwrap();
    assert_eq!(necklace(dir.path(), &args).status.code(), Some(0));
    assert_eq!(fs::read(dir.path().join("density.csv")).unwrap(), first);
    assert_eq!(fs::read(dir.path().join("density_summary.json")).unwrap(), summary);

    let text = String::from_utf8(first).unwrap();
    assert!(text.starts_with("k,exact,trace,diff\n"));
    let s: Value = serde_json::from_slice(&summary).unwrap();
    assert!(s["relative_l2_error"].as_f64().unwrap() < 0.02);
    assert!(s["truncation_bound"].as_f64().unwrap() < 1e-3);

    let manifest = fs::read_to_string(dir.path().join("manifest.jsonl")).unwrap();
    assert_eq!(manifest.lines().count(), 2);
}

#[test]
fn density_examples() {
    let dir = tempfile::tempdir().unwrap();
    let out = necklace(dir.path(), &["density", "1", "0.5", "5", "50", "0.31416"]);
    assert_eq!(out.status.code(), Some(0));
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(s["poisson_form"], true);
    assert!(s["relative_l2_error"].as_f64().unwrap() < 1e-3);

    let out = necklace(dir.path(), &["density", "0.5", "0", "5", "30", "0.31416"]);
    let s: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(s["relative_l2_error"].as_f64().unwrap() < 1e-3);
}
