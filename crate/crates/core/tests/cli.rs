use std::process::{Command, Output};

fn qdetect(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdetect")).args(args).output().unwrap()
}

#[test]
fn roc_writes_csv_to_stdout() {
    let out = qdetect(&["roc", "--levels", "2", "--method", "mae", "--thresholds", "0.0891", "--trials", "2000", "--pfa-grid", "0.1,0.2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "pfa,pd,pd_stderr,method,levels,channel,fusion,trials,seed");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.1,") && lines[1].ends_with(",mae,2,ddt,lrt,2000,1"));
}

#[test]
fn nonquantized_rows_report_zero_levels() {
    let out = qdetect(&["roc", "--method", "none", "--trials", "1000", "--pfa-grid", "0.3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",none,0,ddt,lrt,1000,1"));
}

#[test]
fn too_few_trials_is_a_config_error() {
    let out = qdetect(&["roc", "--levels", "2", "--method", "mae", "--thresholds", "0.1", "--trials", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("1000"));
}

#[test]
fn unordered_thresholds_are_rejected() {
    let out = qdetect(&["roc", "--levels", "3", "--method", "mae", "--thresholds", "0.5,0.1", "--trials", "2000"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn optimize_prints_design() {
    let out = qdetect(&["optimize", "--levels", "2", "--method", "mae"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("levels=2") && text.contains("cuts=[0.0891]"), "{text}");
}
