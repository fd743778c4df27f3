mod common;

use serde_json::Value;

#[test]
fn every_case_has_its_exit_code() {
    for c in common::CORPUS {
        let (code, bytes) = common::run_case(c, &[]);
        assert_eq!(code, c.exit, "{} {} {:?}", c.command, c.file, c.args);
        let report: Value = serde_json::from_slice(&bytes).expect("JSON report");
        assert_eq!(report["command"], c.command);
    }
}

#[test]
fn workspace_can_come_from_stdin() {
    use std::io::Write;
    use std::process::{Command, Stdio};
    let mut child = Command::new(env!("CARGO_BIN_EXE_triadica"))
        .arg("validate")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(common::read_corpus("kaehler_cubic.json").as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["status"], "pass");
}

#[test]
fn parse_errors_carry_positions() {
    let c = common::CORPUS.iter().find(|c| c.file == "parse_error.json").unwrap();
    let (_, bytes) = common::run_case(c, &[]);
    let report: Value = serde_json::from_slice(&bytes).unwrap();
    let w = &report["findings"][0]["witness"];
    assert_eq!(w["line"], 3);
    assert!(w["column"].as_u64().unwrap() > 0);
}

#[test]
fn missing_workspace_file_is_a_usage_error() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_triadica"))
        .args(["validate", "--workspace", "/nonexistent/ws.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn unknown_command_is_a_usage_error() {
    let out = std::process::Command::new(env!("CARGO_BIN_EXE_triadica")).arg("frobnicate").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
