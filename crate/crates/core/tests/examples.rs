//! Runs every example program and checks a line of its output. `cargo test`
//! builds the examples next to the test binaries.

use std::path::PathBuf;
use std::process::Command;

fn run_example(name: &str) -> String {
    let exe = std::env::current_exe().unwrap();
    let dir = exe.parent().unwrap().parent().unwrap().join("examples");
    let path: PathBuf = dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
    assert!(
        path.exists(),
        "{} not built; run the whole suite with `cargo test`",
        path.display()
    );
    let out = Command::new(&path).output().unwrap();
    assert!(
        out.status.success(),
        "{name} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

#[test]
fn table_one() {
    let out = run_example("table_one");
    assert!(out.contains(
        "| 22 | 5 | 4.40 | 0.15 | 26334 | 74613 | − | − | − | 0.19 | 1600 | 1600 | 3:4 | < |"
    ));
}

#[test]
fn worked_examples() {
    let out = run_example("worked_examples");
    assert!(out.contains("26 of 40 bits, load 13/20"));
    assert!(out.contains("3 broadcasts, 6 bits, load 3/20, decoded true"));
}

#[test]
fn flcd_k18() {
    let out = run_example("flcd_k18");
    assert!(out.contains("T'1 = 3 bits, T'2 = 4 bits"));
    assert!(out.contains("400 files, 1600 broadcasts, load 8/31 = 0.2581"));
}

#[test]
fn lmya_vs_flcd() {
    let out = run_example("lmya_vs_flcd");
    assert_eq!(out.matches("(exact: true)").count(), 4);
}

#[test]
fn asymptotic_homogeneity() {
    let out = run_example("asymptotic_homogeneity");
    assert!(out.lines().last().unwrap().contains("19/20"));
}

#[test]
fn bit_codec() {
    assert!(run_example("bit_codec").contains("recovered BitString(\"101101101\")"));
}

#[test]
fn plan_validation() {
    let out = run_example("plan_validation");
    assert!(out.contains("plan ok") && out.contains("damaged plan rejected"));
}

#[test]
fn config_file() {
    assert!(run_example("config_file").contains("| measured load | 2/9 (0.2222) |"));
}

#[test]
fn terasort() {
    let out = run_example("terasort");
    assert_eq!(out.matches("sorted ok").count(), 3);
}
