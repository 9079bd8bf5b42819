use std::path::Path;
use std::process::{Command, Output};

fn cdc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cdc"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout_ok(args: &[&str]) -> String {
    let out = cdc(args);
    assert!(
        out.status.success(),
        "cdc {args:?}: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(
        Path::new(env!("CARGO_MANIFEST_DIR"))
            .join("tests/golden")
            .join(name),
    )
    .unwrap()
}

#[test]
fn reference_table_matches_snapshot() {
    assert_eq!(stdout_ok(&["table"]), golden("table.md"));
    assert_eq!(
        stdout_ok(&["table", "--format", "csv"]),
        golden("table.csv")
    );
}

#[test]
fn single_config_gives_one_row() {
    let out = stdout_ok(&["table", "--nodes", "18", "--load", "4", "--format", "csv"]);
    let rows: Vec<&str> = out.lines().collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[1], "18,4,4.50,0.19,3060,8568,-,-,-,0.26,400,400,3:4,<");
}

#[test]
fn sweep_ranges() {
    let out = stdout_ok(&[
        "table", "--nodes", "8-12", "--load", "2,3", "--format", "csv",
    ]);
    assert_eq!(out.lines().count(), 1 + 10);
}

#[test]
fn simulate_is_deterministic_and_exact() {
    let args = [
        "simulate", "--scheme", "flcd", "--nodes", "18", "--load", "4", "--seed", "5",
    ];
    let a = stdout_ok(&args);
    assert_eq!(a, stdout_ok(&args));
    assert!(a.contains("| measured load | 8/31 (0.2581) |"));
    assert!(a.contains("| exact | true |"));
}

#[test]
fn terasort_is_deterministic() {
    let args = [
        "terasort",
        "--scheme",
        "flcd",
        "--nodes",
        "8",
        "--load",
        "3",
        "--records",
        "3000",
        "--seed",
        "11",
    ];
    let a = stdout_ok(&args);
    assert_eq!(a, stdout_ok(&args));
    assert!(a.contains("sorted ok"));
    assert!(a.contains("records=3000 files=18"));
}

#[test]
fn infeasible_parameters_exit_with_two() {
    for args in [
        &["simulate", "--scheme", "kr", "--nodes", "16", "--load", "4"][..],
        &[
            "simulate", "--scheme", "flcd", "--nodes", "9", "--load", "5",
        ],
        &[
            "simulate",
            "--scheme",
            "lmya",
            "--nodes",
            "25",
            "--load",
            "5",
            "--max-files",
            "1000",
        ],
        &["simulate", "--scheme", "flcd3", "--iv-sizes", "1,2"],
        &["table", "--nodes", "16"],
        &["simulate", "--bogus"],
    ] {
        let out = cdc(args);
        assert_eq!(out.status.code(), Some(2), "cdc {args:?}");
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn kr_rejection_names_the_reason() {
    let err = String::from_utf8(cdc(&["simulate", "--scheme", "kr"]).stderr).unwrap();
    assert!(err.contains("KR"), "{err}");
    let err = String::from_utf8(
        cdc(&[
            "simulate", "--scheme", "flcd", "--nodes", "9", "--load", "5",
        ])
        .stderr,
    )
    .unwrap();
    assert!(err.contains("r <= K/2"), "{err}");
}

#[test]
fn generated_dataset_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("records.bin");
    let parts = dir.path().join("parts");
    let data_s = data.to_str().unwrap();
    stdout_ok(&[
        "gen-data",
        "--records",
        "1234",
        "--seed",
        "3",
        "--out",
        data_s,
    ]);
    assert_eq!(std::fs::metadata(&data).unwrap().len(), 1234 * 20);

    let out = stdout_ok(&[
        "terasort",
        "--scheme",
        "flcd3",
        "--iv-sizes",
        "1,2,2",
        "--input",
        data_s,
        "--out",
        parts.to_str().unwrap(),
    ]);
    assert!(out.contains("records=1234"));
    let total: u64 = (0..3)
        .map(|k| {
            std::fs::metadata(parts.join(format!("part-{k}.bin")))
                .unwrap()
                .len()
        })
        .sum();
    assert_eq!(total, 1234 * 20);
}

#[test]
fn truncated_dataset_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("bad.bin");
    std::fs::write(&data, [0u8; 30]).unwrap();
    let out = cdc(&[
        "terasort",
        "--scheme",
        "flcd3",
        "--input",
        data.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("exp.toml");
    std::fs::write(
        &cfg,
        "scheme = \"lmya\"\nnodes = 6\nload = 2\nformat = \"csv\"\n",
    )
    .unwrap();
    let out = stdout_ok(&["simulate", "--config", cfg.to_str().unwrap(), "--load", "3"]);
    assert!(out.starts_with("scheme,K,r,"));
    assert!(out.contains("lmya,6,3,20,15,"), "{out}");
}
