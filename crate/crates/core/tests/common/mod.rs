//! Golden-file generators shared by the CLI tests and the acceptance suite.
#![allow(dead_code)]

use std::path::PathBuf;
use std::process::{Command, Output};

use infospace::curves::build_lower_envelope;
use infospace::families::bell_formation_points;
use infospace::render::curves_csv;

pub const BIN: &str = env!("CARGO_BIN_EXE_infospace");

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn infospace")
}

pub fn stdout_of(args: &[&str]) -> String {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

pub fn golden_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name)
}

pub const CHEAP_GRID: [f64; 9] = [0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45];

/// `(file name, freshly generated contents)` for every golden file.
pub fn golden_outputs() -> Vec<(&'static str, String)> {
    let curves: Vec<_> = CHEAP_GRID
        .iter()
        .map(|&p| build_lower_envelope(&bell_formation_points(p).unwrap()).unwrap())
        .collect();
    vec![
        (
            "bell_curve_p025.csv",
            stdout_of(&["curve", "--family", "bell-mixture", "--p", "0.25"]),
        ),
        ("bell_curves_grid.csv", curves_csv(&curves.iter().collect::<Vec<_>>())),
        (
            "bell_phase_scan.csv",
            stdout_of(&["phase-scan", "--p-min", "0.05", "--p-max", "0.49", "--steps", "45"]),
        ),
    ]
}
