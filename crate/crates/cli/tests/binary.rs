use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn spatreg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spatreg")).args(args).output().unwrap()
}

fn with_cities<'a>(cmd: &'a str, extra: &[&'a str], attrs: &'a str, dist: &'a str) -> Vec<&'a str> {
    let mut v = vec![cmd, "--attrs", attrs, "--dist", dist, "--log"];
    v.extend_from_slice(extra);
    v
}

#[test]
fn every_subcommand_succeeds_in_both_formats() {
    let (a, d) = (fixture("cities_attrs.csv"), fixture("cities_dist.csv"));
    for cmd in ["corr", "decompose", "check", "advise", "report"] {
        for format in ["json", "text"] {
            let out = spatreg(&with_cities(cmd, &["--format", format], &a, &d));
            assert!(
                out.status.success(),
                "{cmd} {format}: {}",
                String::from_utf8_lossy(&out.stderr)
            );
            assert!(!out.stdout.is_empty());
            if format == "json" {
                serde_json::from_slice::<serde_json::Value>(&out.stdout).unwrap();
            }
        }
    }
    let out = spatreg(&with_cities("fit", &["--model", "slx"], &a, &d));
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["fits"].as_array().unwrap().len(), 2);
}

#[test]
fn weights_csv_is_square_and_sums_to_one() {
    let out = spatreg(&[
        "weights",
        "--attrs",
        &fixture("four_attrs.csv"),
        "--dist",
        &fixture("four_dist.csv"),
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "id,A,B,C,D");
    let mut total = 0.0;
    for line in lines {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 5);
        total += cells[1..].iter().map(|c| c.parse::<f64>().unwrap()).sum::<f64>();
    }
    assert!((total - 1.0).abs() < 1e-12);
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let (a, d) = (fixture("cities_attrs.csv"), fixture("cities_dist.csv"));
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let p = path.display().to_string();
    let stdout = spatreg(&with_cities("report", &[], &a, &d)).stdout;
    assert!(spatreg(&with_cities("report", &["--out", &p], &a, &d)).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), stdout);
}

#[test]
fn input_errors_exit_with_one() {
    let out = spatreg(&[
        "report",
        "--attrs",
        "/nonexistent.csv",
        "--dist",
        &fixture("four_dist.csv"),
    ]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    let out = spatreg(&["report", "--attrs", &fixture("four_attrs.csv")]);
    assert_eq!(out.status.code(), Some(1));
    let out = spatreg(&[
        "fit",
        "--model",
        "nonsense",
        "--attrs",
        &fixture("four_attrs.csv"),
        "--dist",
        &fixture("four_dist.csv"),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn numerical_failures_exit_with_two() {
    let (a, d) = (fixture("four_attrs.csv"), fixture("four_dist.csv"));
    // four units cannot support four coefficients
    let out = spatreg(&["fit", "--model", "general", "--attrs", &a, "--dist", &d]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let attrs = dir.path().join("attrs.csv");
    std::fs::write(&attrs, "id,x,y\nA,1,5\nB,1,1\nC,1,4\nD,1,3\n").unwrap();
    let out = spatreg(&["report", "--attrs", &attrs.display().to_string(), "--dist", &d]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn singular_decomposition_exits_with_two() {
    // x = y makes I_xy = I_x = I_y, so Q = 0
    let dir = tempfile::tempdir().unwrap();
    let attrs = dir.path().join("attrs.csv");
    std::fs::write(&attrs, "id,x,y\nA,1,1\nB,2,2\nC,3,3\nD,5,5\n").unwrap();
    let out = spatreg(&[
        "decompose",
        "--attrs",
        &attrs.display().to_string(),
        "--dist",
        &fixture("four_dist.csv"),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["decomposition"]["error"].is_string());
}
