//! Exit codes, output formats, and file handling of the command-line tool.

use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qmover"))
}

#[test]
fn threshold_csv_has_header_and_row() {
    let out = bin().args(["threshold", "--d", "2"]).output().unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("d,empirical_threshold,analytic_upper,analytic_lower,bisection_iterations"));
    let row = text.lines().last().unwrap();
    assert!(row.starts_with("2,3.3333333"));
}

#[test]
fn threshold_rejects_dimension_one() {
    let out = bin().args(["threshold", "--d", "1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(!String::from_utf8_lossy(&out.stderr).is_empty());
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let out = bin().arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn witness_csv_columns() {
    let out = bin()
        .args(["witness", "--q-steps", "2", "--p-steps", "2"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("q,p,lambda_formula,lambda_numeric,min_other,detected"));
    // 4 metadata+comment lines precede the header; 4 grid rows follow
    let rows: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(rows.len(), 5);
    for row in &rows[1..] {
        assert_eq!(row.split(',').count(), 6);
    }
}

#[test]
fn witness_rejects_p_reaching_one() {
    let out = bin()
        .args(["witness", "--p-max", "1.0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_inverter_above_boundary_is_clean() {
    let out = bin()
        .args(["verify", "--map", "inverter", "--d", "3", "--p", "0.3", "--samples", "10"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"is_cp\": true"));
    assert!(text.contains("\"is_gqm\": true"));
}

#[test]
fn verify_witness_reports_non_cp_without_purity() {
    let out = bin()
        .args(["verify", "--map", "witness", "--d", "2", "--p", "0.25", "--samples", "10"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"is_cp\": false"));
    assert!(text.contains("\"purity_formula\": null"));
}

#[test]
fn verify_witness_requires_qubit_dimension() {
    let out = bin()
        .args(["verify", "--map", "witness", "--d", "3", "--p", "0.25"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn nogo_reports_full_falsification() {
    let out = bin()
        .args(["nogo", "--p", "0.3", "--trials", "4", "--seed", "9"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"trials\": 4"));
    assert!(text.contains("\"falsified_count\": 4"));
}

#[test]
fn out_file_matches_stdout_and_honors_out_dir() {
    let dir = std::env::temp_dir().join(format!("qmover-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let out = bin()
        .args(["threshold", "--d", "2", "--out", "report.csv"])
        .env("QMOVER_OUT_DIR", &dir)
        .output()
        .unwrap();
    assert!(out.status.success());
    let written = std::fs::read(dir.join("report.csv")).unwrap();
    assert_eq!(written, out.stdout);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn constraints_exit_zero_and_list_residuals() {
    let out = bin()
        .args(["constraints", "--d", "4", "--p", "0.5", "--samples", "5"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["max_line1", "max_line2", "max_line3", "trace_residual", "sum_rule_residual"] {
        assert!(text.contains(key), "missing {key}");
    }
}
