mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sphint::cli::output::{JsonMirror, RESULTS_HEADER};
use sphint::cli::{build_config, Command as Cmd, Flags, RunConfig};

fn sphint(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sphint"))
        .args(args)
        .current_dir(cwd)
        .output()
        .expect("binary runs")
}

fn design(t: usize) -> String {
    format!(
        "file:{}",
        common::pointset_dir().join(sphint::pointsets::design_file_name(t)).display()
    )
}

#[test]
fn solve_writes_csv_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let points = design(10);
    let out = sphint(
        &[
            "solve", "--kernel", "log", "--K", "const:1", "--f", "const:auto", "--n", "5", "--points", &points,
            "--grid", "500", "--seed", "2024", "--out", "results/exp3.csv",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = fs::read_to_string(dir.path().join("results/exp3.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some(RESULTS_HEADER));
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(&row[..3], ["solve", "5", "121"]);
    assert!(row[4].parse::<f64>().unwrap() < 1e-10);
    let json = fs::read_to_string(dir.path().join("results/exp3.json")).unwrap();
    let mirror: JsonMirror<serde_json::Value> = serde_json::from_str(&json).unwrap();
    assert_eq!(mirror.config.n, 5);
    assert_eq!(mirror.records.len(), 1);
}

#[test]
fn identical_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let rows = |name: &str| {
        let out = sphint(
            &["experiment", "--id", "2", "--n", "4", "--points", "equal_area:100", "--grid", "300", "--out", name],
            dir.path(),
        );
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        // everything except the wall-clock column
        fs::read_to_string(dir.path().join(name))
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect::<Vec<_>>()
    };
    assert_eq!(rows("a.csv"), rows("b.csv"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let code = |args: &[&str]| sphint(args, dir.path()).status.code().unwrap();
    assert_eq!(code(&["solve", "--kernel", "algebraic:-2", "--points", "equal_area:10"]), 2);
    assert_eq!(code(&["solve", "--K", "sin:10", "--points", "equal_area:10"]), 2);
    assert_eq!(code(&["solve", "--points", "missing.txt"]), 2);
    assert_eq!(code(&["experiment", "--id", "7", "--points", "equal_area:10"]), 2);
    assert_eq!(code(&["experiment", "--points", "equal_area:10"]), 2);
    assert_eq!(code(&["bogus"]), 2);
    // h ≡ 1, K ≡ 1/(4π): I - A_γ is singular on an equal-weight rule
    assert_eq!(
        code(&["solve", "--K", "const:0.07957747154594767", "--f", "const:1", "--points", "equal_area:30", "--n", "2"]),
        3
    );
    assert_eq!(code(&["moments", "--kernel", "log", "--n", "3"]), 0);
}

#[test]
fn moments_and_analyze_print_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = sphint(&["moments", "--kernel", "algebraic:-0.5", "--n", "2"], dir.path());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "l,mu,method");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("0,1.18476878350") && lines[1].ends_with(",closed_form"));

    let points = design(12);
    let out = sphint(&["analyze", "--points", &points, "--n", "6", "--out", "mz.csv"], dir.path());
    assert!(out.status.success());
    let csv = fs::read_to_string(dir.path().join("mz.csv")).unwrap();
    assert!(csv.starts_with("n,eta,lambda_min,lambda_max,exact_to,mesh_norm,degree_bound\n6,"));
    let eta: f64 = csv.lines().nth(1).unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(eta < 1e-10);
    assert!(String::from_utf8_lossy(&out.stderr).contains("MZ property holds"));
}

#[test]
fn sweep_skips_missing_designs() {
    let dir = tempfile::tempdir().unwrap();
    let designs = format!("designs:{}", common::pointset_dir().display());
    let out = sphint(
        &["experiment", "--id", "3", "--sweep", "n=2:4:10", "--points", &designs, "--grid", "200"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8(out.stdout).unwrap();
    // n = 2, 6, 10 need t = 2, 7, 12; only t = 12 ships
    let rows: Vec<&str> = stdout.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    assert!(rows[0].starts_with("exp3,10,169,"));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("n = 2: skipped") && stderr.contains("n = 6: skipped"));
}

#[test]
fn flags_override_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    fs::write(&path, "# sweep setup\nkernel = log\nn = 7\nK = cos:3 # oscillatory\nf = const:0.5\npoints = equal_area:50\n").unwrap();
    let flags = Flags {
        config: Some(path.clone()),
        n: Some("4".into()),
        ..Default::default()
    };
    let cfg = build_config(Cmd::Solve, &flags).unwrap();
    assert_eq!(cfg.n, 4);
    assert_eq!(cfg.kernel, sphint::SingularKernel::Log);
    assert_eq!(cfg.k.to_string(), "cos:3");

    fs::write(&path, "n = 3\nbogus line\n").unwrap();
    let err = build_config(Cmd::Solve, &flags).unwrap_err();
    assert!(err.to_string().contains("run.cfg:2"), "{err}");
}

#[test]
fn config_json_round_trip() {
    let mut cfg = RunConfig::new(Cmd::Experiment);
    for (k, v) in [
        ("experiment", "4"),
        ("points", "random:auto:9"),
        ("weights", "file"),
        ("kernel", "mixed:-0.5:-0.25"),
        ("K", "sin:10"),
        ("f", "const:0.930837886125808"),
        ("exact", "none"),
        ("grid", "1234"),
        ("seed", "77"),
        ("out", "x/y.csv"),
        ("sweep", "n=10:5:35"),
    ] {
        cfg.set(k, v).unwrap();
    }
    let json = serde_json::to_string(&cfg).unwrap();
    let back: RunConfig = serde_json::from_str(&json).unwrap();
    assert_eq!(back, cfg);
}
