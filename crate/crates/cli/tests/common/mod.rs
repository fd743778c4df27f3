#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

/// One invocation of the binary on a corpus file with its expected exit code.
pub struct Case {
    pub file: &'static str,
    pub command: &'static str,
    pub args: &'static [&'static str],
    pub exit: i32,
}

const fn case(file: &'static str, command: &'static str, args: &'static [&'static str], exit: i32) -> Case {
    Case { file, command, args, exit }
}

pub const CORPUS: &[Case] = &[
    case("kaehler_cubic.json", "validate", &[], 0),
    case("kaehler_cubic.json", "kaehler", &["--target", "A"], 0),
    case("kaehler_cubic.json", "validate", &["--target", "nowhere"], 2),
    case("fullness_2_3.json", "fullness", &["--target", "X", "--target", "Y"], 0),
    case("fullness_2_3.json", "fullness", &["--target", "Y", "--target", "Y", "--bound", "10"], 2),
    case("differential_square_broken.json", "check-morphism", &[], 1),
    case("parse_error.json", "validate", &[], 2),
    case("unresolved_reference.json", "validate", &[], 2),
    case("rational_zero_denominator.json", "spectrum", &[], 2),
    case("duplicate_name.json", "validate", &[], 2),
    case("unsupported_schema.json", "validate", &[], 2),
    case("constant_morphisms.json", "constant-morphism", &["--target", "K", "--target", "FS"], 0),
    case("constant_morphisms.json", "constant-morphism", &["--target", "FD", "--target", "K"], 1),
    case("compose_chain.json", "check-morphism", &[], 0),
    case("compose_chain.json", "compose", &["--target", "c1", "--target", "idFS"], 0),
    case("compose_chain.json", "compose", &["--target", "idFS", "--target", "c1"], 2),
    case("not_a_sheaf.json", "validate", &["--target", "C"], 1),
    case("not_a_sheaf.json", "sheafify", &[], 0),
    case("pushforward.json", "pushforward", &["--target", "F", "--target", "collapse"], 0),
    case("spectrum.json", "spectrum", &[], 0),
    case("spectrum_not_split.json", "spectrum", &[], 1),
    case("recover_map.json", "recover-map", &["--target", "f"], 0),
    case("recover_map.json", "recover-map", &["--target", "swap"], 2),
    case("recover_map.json", "recover-map", &["--target", "swap", "--exploratory"], 0),
    case("uniqueness.json", "uniqueness", &["--target", "m1", "--target", "m2"], 0),
];

/// Files that must be rejected before any command runs.
pub const INVALID: &[&str] = &[
    "parse_error.json",
    "unresolved_reference.json",
    "rational_zero_denominator.json",
    "duplicate_name.json",
    "unsupported_schema.json",
];

pub fn corpus_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("workspaces")
}

pub fn corpus_file(name: &str) -> PathBuf {
    corpus_dir().join(name)
}

pub fn read_corpus(name: &str) -> String {
    std::fs::read_to_string(corpus_file(name)).expect("corpus file")
}

/// Runs the binary on a case, returning exit code and stdout bytes.
pub fn run_case(c: &Case, extra: &[&str]) -> (i32, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_triadica"))
        .arg(c.command)
        .arg("--workspace")
        .arg(corpus_file(c.file))
        .args(c.args)
        .args(extra)
        .output()
        .expect("binary runs");
    (out.status.code().unwrap_or(-1), out.stdout)
}
