//! End-to-end checks of the four subcommands through the real binary.

use std::path::Path;
use std::process::{Command, Output};

fn qdescent(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qdescent"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read_csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn solve_identity_with_zero_rhs_reaches_exact_zero() {
    let dir = tempfile::tempdir().unwrap();
    let matrix = dir.path().join("identity.txt");
    std::fs::write(&matrix, "4\n1 0 0 0\n0 1 0 0\n0 0 1 0\n0 0 0 1\n").unwrap();
    let out_dir = dir.path().join("out");
    let out = qdescent(&[
        "solve",
        "--matrix",
        matrix.to_str().unwrap(),
        "--rhs",
        "zero",
        "--method",
        "spectral",
        "--iterations",
        "200",
        "--seed",
        "1",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("seed: 1"), "seed must be echoed");
    let rows = read_csv_rows(&out_dir.join("solve_ssd_k0_tau1.csv"));
    assert_eq!(rows.len(), 201, "iterations + 1 rows");
    assert_eq!(rows.last().unwrap()[1], "0", "exact zero final error");
}

#[test]
fn solve_trace_has_iterations_plus_one_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdescent(&[
        "solve",
        "--matrix",
        "clustered:5,6,15;100,101,15",
        "--method",
        "sscd",
        "--k",
        "18",
        "--iterations",
        "120",
        "--seed",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let rows = read_csv_rows(&dir.path().join("solve_sscd_k18_tau1.csv"));
    assert_eq!(rows.len(), 121);
    // trace is normalized: first row is exactly 1
    assert_eq!(rows[0][1], "1");
}

#[test]
fn solve_rejects_malformed_matrix_file() {
    let dir = tempfile::tempdir().unwrap();

    let asymmetric = dir.path().join("bad.txt");
    std::fs::write(&asymmetric, "2\n1 0.9\n0.1 1\n").unwrap();
    let out = qdescent(&[
        "solve",
        "--matrix",
        asymmetric.to_str().unwrap(),
        "--method",
        "spectral",
    ]);
    assert!(!out.status.success());
    assert!(
        stderr_of(&out).contains("symmetry"),
        "stderr: {}",
        stderr_of(&out)
    );

    let garbage = dir.path().join("garbage.txt");
    std::fs::write(&garbage, "2\n1 x\n0 1\n").unwrap();
    let out = qdescent(&[
        "solve",
        "--matrix",
        garbage.to_str().unwrap(),
        "--method",
        "spectral",
    ]);
    assert!(!out.status.success());
    assert!(
        stderr_of(&out).contains("parse"),
        "stderr: {}",
        stderr_of(&out)
    );
}

#[test]
fn rates_table_matches_closed_forms() {
    let dir = tempfile::tempdir().unwrap();
    let out = qdescent(&[
        "rates",
        "--matrix",
        "uniform:1,60,12",
        "--methods",
        "diagonal-coordinate,spectral,sscd",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    let rows = read_csv_rows(&dir.path().join("rates.csv"));

    // spectral row: lambda_min = lambda_max = 1/12
    let ssd = rows.iter().find(|r| r[0] == "ssd").unwrap();
    let lmin: f64 = ssd[3].parse().unwrap();
    let lmax: f64 = ssd[4].parse().unwrap();
    assert!((lmin - 1.0 / 12.0).abs() <= 1e-8);
    assert!((lmax - 1.0 / 12.0).abs() <= 1e-8);

    // diagonal coordinate row: lambda_min = lambda_1/Tr = 1/366 on this grid
    let rcd = rows.iter().find(|r| r[0] == "rcd-diagonal").unwrap();
    let lmin: f64 = rcd[3].parse().unwrap();
    assert!((lmin - 1.0 / 366.0).abs() <= 1e-8);

    // sscd rows: lambda_min monotone nondecreasing in k, k = n-1 row at 1/n
    let sscd: Vec<f64> = rows
        .iter()
        .filter(|r| r[0] == "sscd")
        .map(|r| r[3].parse().unwrap())
        .collect();
    assert_eq!(sscd.len(), 12);
    for w in sscd.windows(2) {
        assert!(w[1] >= w[0] - 1e-10);
    }
    assert!((sscd[11] - 1.0 / 12.0).abs() <= 1e-8);
}

#[test]
fn experiment_unknown_preset_lists_options() {
    let out = qdescent(&["experiment", "no-such-thing"]);
    assert!(!out.status.success());
    let err = stderr_of(&out);
    assert!(err.contains("phase-transition"), "stderr: {err}");
    assert!(err.contains("expdecay"));
}

#[test]
fn experiment_outputs_are_deterministic() {
    let dir_a = tempfile::tempdir().unwrap();
    let dir_b = tempfile::tempdir().unwrap();
    for dir in [&dir_a, &dir_b] {
        let out = qdescent(&[
            "experiment",
            "minibatch",
            "--trials",
            "15",
            "--iterations",
            "25",
            "--seed",
            "5",
            "--out",
            dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr_of(&out));
    }
    let mut names: Vec<String> = std::fs::read_dir(dir_a.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert!(names.iter().any(|n| n.ends_with(".csv")));
    assert!(
        names.iter().filter(|n| n.ends_with(".svg")).count() == 4,
        "one chart per tau"
    );
    for name in &names {
        let a = std::fs::read(dir_a.path().join(name)).unwrap();
        let b = std::fs::read(dir_b.path().join(name)).unwrap();
        assert_eq!(a, b, "file {name} differs between identical runs");
    }
}

#[test]
fn experiment_accepts_json_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("exp.json");
    std::fs::write(
        &config,
        r#"{
            "name": "custom",
            "matrix": "uniform:1,10,6",
            "methods": [
                {"method": "sd", "distribution": {"kind": "spectral"}},
                {"method": "sd", "distribution": {"kind": "sscd", "k": 3}, "tau": 2}
            ],
            "trials": 10,
            "iterations": 20,
            "seed": 3,
            "output_prefix": ""
        }"#,
    )
    .unwrap();
    let out = qdescent(&[
        "experiment",
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(dir.path().join("custom_ssd_k0_tau1.csv").exists());
    assert!(dir.path().join("custom_sscd_k3_tau2.csv").exists());
    let rows = read_csv_rows(&dir.path().join("custom_ssd_k0_tau1.csv"));
    assert_eq!(rows.len(), 21);
}

#[test]
fn verify_dispatch_and_exit_codes() {
    let out = qdescent(&["verify", "T2"]);
    assert!(out.status.success(), "{}", stderr_of(&out));
    assert!(stderr_of(&out).contains("PASS"));

    let out = qdescent(&["verify", "L-ineq"]);
    assert!(out.status.success(), "{}", stderr_of(&out));

    let out = qdescent(&["verify", "T99"]);
    assert!(!out.status.success());
    assert!(
        stderr_of(&out).contains("iSconD"),
        "unknown id lists the options"
    );
}
