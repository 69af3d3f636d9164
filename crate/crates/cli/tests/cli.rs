use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dfsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dfsim"))
        .args(args)
        .env_remove("DFSIM_OUT_DIR")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn read_csv(path: &Path) -> (Vec<String>, Vec<Vec<f64>>) {
    let mut r = csv::Reader::from_path(path).unwrap();
    let header = r.headers().unwrap().iter().map(str::to_string).collect();
    let rows = r
        .records()
        .map(|rec| rec.unwrap().iter().filter_map(|s| s.parse().ok()).collect())
        .collect();
    (header, rows)
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn stdout_json(out: &Output) -> Value {
    assert_eq!(code(out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn column(header: &[String], rows: &[Vec<f64>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap();
    rows.iter().map(|r| r[i]).collect()
}

#[test]
fn plus_plus_relaxes_onto_phi1() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = dfsim(&[
        "evolve",
        "--n-bath",
        "1",
        "--psi",
        "0",
        "--initial",
        "++",
        "--t-end",
        "20",
        "--out-dir",
        d,
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = read_csv(&dir.path().join("evolve.csv"));
    assert_eq!(
        header.join(","),
        "t,fidelity_phi1,fidelity_phi2,purity,concurrence,pop_phi1,pop_phi2,pop_phi3,pop_phi4"
    );
    let fid = column(&header, &rows, "fidelity_phi1");
    assert!((fid[0] - 1.0 / 3.0).abs() < 1e-11);
    assert!(*fid.last().unwrap() >= 0.999);
    assert!(fid.windows(2).all(|w| w[1] >= w[0] - 1e-6));

    let summary = read_json(&dir.path().join("evolve.json"));
    assert_eq!(summary["classification"], "SymmetricPure");
    assert!(summary["max_tail_deviation"].as_f64().unwrap() < 2e-3);
    assert_eq!(
        summary["steady_prediction"]["phi_weights"][0]
            .as_f64()
            .unwrap(),
        1.0
    );
}

#[test]
fn csv_numbers_carry_twelve_significant_digits() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(
        code(&dfsim(&[
            "evolve",
            "--t-end",
            "1",
            "--samples",
            "3",
            "--out-dir",
            d
        ])),
        0
    );
    let text = fs::read_to_string(dir.path().join("evolve.csv")).unwrap();
    let line = text.lines().nth(1).unwrap();
    for field in line.split(',') {
        let mantissa = field.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 12, "{field}");
    }
}

#[test]
fn vacuum_mixture_weights_in_summary() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = dfsim(&[
        "evolve",
        "--n-bath",
        "0",
        "--initial=-+",
        "--t-end",
        "40",
        "--out-dir",
        d,
    ]);
    assert_eq!(code(&out), 0);
    let s = read_json(&dir.path().join("evolve.json"));
    let pops = &s["final_observables"]["populations"];
    assert!((pops[0].as_f64().unwrap() - 0.5).abs() < 1e-6);
    assert!((pops[1].as_f64().unwrap() - 0.5).abs() < 1e-6);
    let w = &s["steady_prediction"]["phi_weights"];
    assert!((w[0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert_eq!(s["classification"], "Mixed");
}

#[test]
fn dipole_coupling_leaves_phi1_alone() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = dfsim(&[
        "evolve",
        "--initial",
        "phi1",
        "--hamiltonian",
        "dipole:2",
        "--t-end",
        "5",
        "--out-dir",
        d,
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = read_csv(&dir.path().join("evolve.csv"));
    assert!(column(&header, &rows, "fidelity_phi1")
        .iter()
        .all(|f| (f - 1.0).abs() < 1e-9));
    let s = read_json(&dir.path().join("evolve.json"));
    assert!(s["steady_prediction"].is_null());
    assert!(s["final_dfs_fidelity"].as_f64().unwrap() > 1.0 - 1e-8);
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scenario.json");
    fs::write(
        &cfg,
        r#"{"n_bath": 3.0, "initial_state": "--", "t_end": 2.0, "samples": 5}"#,
    )
    .unwrap();
    let d = dir.path().to_str().unwrap();
    let out = dfsim(&[
        "evolve",
        "-c",
        cfg.to_str().unwrap(),
        "--n-bath",
        "0.5",
        "--out-dir",
        d,
    ]);
    assert_eq!(code(&out), 0);
    let s = read_json(&dir.path().join("evolve.json"));
    assert_eq!(s["config"]["n_bath"].as_f64().unwrap(), 0.5);
    assert_eq!(s["config"]["initial_state"], "--");
    assert_eq!(s["config"]["samples"].as_u64().unwrap(), 5);
}

#[test]
fn invalid_input_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{ not json").unwrap();
    let unknown = dir.path().join("unknown.json");
    fs::write(&unknown, r#"{"n_bath": 1, "colour": "red"}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["evolve", "--samples", "1", "--out-dir", d],
        vec!["evolve", "--t-end", "0", "--out-dir", d],
        vec!["evolve", "--n-bath", "-1", "--out-dir", d],
        vec!["evolve", "--initial", "up", "--out-dir", d],
        vec!["evolve", "-c", bad.to_str().unwrap(), "--out-dir", d],
        vec!["evolve", "-c", unknown.to_str().unwrap(), "--out-dir", d],
        vec!["evolve", "-c", "/nonexistent.json", "--out-dir", d],
        vec!["steady", "--n-qubits", "4", "--initial", "++--"],
        vec!["sweep", "--axis", "psi", "--out-dir", d],
        vec!["sweep", "--axis", "psi", "--values", "0.5", "--out-dir", d],
        vec!["sweep", "--axis", "psi", "--range", "0:1:0", "--out-dir", d],
        vec!["check-couplings", "--coupling", "dipole", "--n-qubits", "4"],
    ];
    for args in cases {
        let out = dfsim(&args);
        assert_eq!(
            code(&out),
            2,
            "{args:?}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn integration_failure_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("tight.json");
    fs::write(&cfg, r#"{"tolerances": {"rtol": 1e-300, "atol": 1e-300}}"#).unwrap();
    let out = dfsim(&[
        "evolve",
        "-c",
        cfg.to_str().unwrap(),
        "--out-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 3);
    assert!(String::from_utf8_lossy(&out.stderr).contains("integration failed"));
}

#[test]
fn identical_runs_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let d = dir.path().to_str().unwrap();
        let out = dfsim(&[
            "evolve",
            "--initial",
            "random",
            "--seed",
            "7",
            "--t-end",
            "3",
            "--out-dir",
            d,
        ]);
        assert_eq!(code(&out), 0);
    }
    for f in ["evolve.csv", "evolve.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap(),
            "{f}"
        );
    }
    let c = tempfile::tempdir().unwrap();
    let d = c.path().to_str().unwrap();
    dfsim(&[
        "evolve",
        "--initial",
        "random",
        "--seed",
        "8",
        "--t-end",
        "3",
        "--out-dir",
        d,
    ]);
    assert_ne!(
        fs::read(a.path().join("evolve.csv")).unwrap(),
        fs::read(c.path().join("evolve.csv")).unwrap()
    );
}

#[test]
fn sweep_output_does_not_depend_on_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, threads) in [(&a, "1"), (&b, "4")] {
        let d = dir.path().to_str().unwrap();
        let out = dfsim(&[
            "sweep",
            "--axis",
            "psi",
            "--range",
            "0:3:7",
            "--mode",
            "evolve",
            "--t-end",
            "5",
            "--initial",
            "random",
            "--seed",
            "3",
            "--threads",
            threads,
            "--out-dir",
            d,
        ]);
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    for f in ["sweep.csv", "sweep.json"] {
        assert_eq!(
            fs::read(a.path().join(f)).unwrap(),
            fs::read(b.path().join(f)).unwrap()
        );
    }
}

#[test]
fn photon_number_sweep_matches_phi1_concurrence() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = dfsim(&[
        "sweep",
        "--axis",
        "n_bath",
        "--values",
        "0.1,0.3,1,2,5,10",
        "--initial",
        "++",
        "--out-dir",
        d,
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    let n = column(&header, &rows, "axis_value");
    let c = column(&header, &rows, "concurrence");
    for (n, c) in n.iter().zip(c) {
        let m = (n * (n + 1.0)).sqrt();
        assert!((c - 2.0 * n * m / (n * n + m * m)).abs() < 1e-6, "N={n}");
    }
}

#[test]
fn population_sweep_purity_follows_weights() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = dfsim(&[
        "sweep",
        "--axis",
        "rho22_0",
        "--range",
        "0:1:11",
        "--initial",
        "++",
        "--out-dir",
        d,
    ]);
    assert_eq!(code(&out), 0);
    let (header, rows) = read_csv(&dir.path().join("sweep.csv"));
    let purity = column(&header, &rows, "purity");
    let p1 = column(&header, &rows, "p1");
    let p2 = column(&header, &rows, "p2");
    for k in 0..rows.len() {
        assert!((purity[k] - (p1[k] * p1[k] + p2[k] * p2[k])).abs() < 1e-10);
    }
}

#[test]
fn sweep_reports_failed_points() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let out = dfsim(&[
        "sweep",
        "--axis",
        "n_bath",
        "--values",
        "0.5,-1,1",
        "--out-dir",
        d,
    ]);
    assert_eq!(code(&out), 2);
    let s = read_json(&dir.path().join("sweep.json"));
    assert_eq!(s["completed"].as_u64().unwrap(), 2);
    assert_eq!(s["failures"][0]["axis_value"].as_f64().unwrap(), -1.0);
    let (_, rows) = read_csv(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 2);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_dfsim"))
        .args(["evolve", "--t-end", "1", "--samples", "3", "--name", "env"])
        .env("DFSIM_OUT_DIR", dir.path().join("nested"))
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(dir.path().join("nested/env.csv").exists());
    assert!(dir.path().join("nested/env.json").exists());
}

#[test]
fn steady_state_classes() {
    let pp = stdout_json(&dfsim(&["steady", "--initial", "++"]));
    assert_eq!(pp["classification"], "SymmetricPure");
    assert!((pp["concurrence"].as_f64().unwrap() - 0.942809).abs() < 1e-6);
    let phi2 = stdout_json(&dfsim(&["steady", "--initial", "phi2"]));
    assert_eq!(phi2["classification"], "Phi2Invariant");
    let mp = stdout_json(&dfsim(&["steady", "--initial=-+", "--cross-check"]));
    assert_eq!(mp["classification"], "Mixed");
    assert!((mp["eigenvalues"][0].as_f64().unwrap() - 0.5).abs() < 1e-12);
    assert!(mp["cross_check"]["residual"].as_f64().unwrap() < 1e-10);
    assert_eq!(
        mp["cross_check"]["null_space_dimension"].as_u64().unwrap(),
        4
    );
}

#[test]
fn dfs_dimensions() {
    let two = stdout_json(&dfsim(&[
        "dfs",
        "--n-bath",
        "1",
        "--psi",
        "0",
        "--n-qubits",
        "2",
    ]));
    assert_eq!(two["numeric_dimension"].as_u64().unwrap(), 2);
    assert!(two["phi_projector_distance"].as_f64().unwrap() < 1e-10);
    let four = stdout_json(&dfsim(&["dfs", "--n-qubits", "4"]));
    assert_eq!(four["numeric_dimension"].as_u64().unwrap(), 6);
    assert_eq!(four["formula_dimension"].as_u64().unwrap(), 6);
    let three = stdout_json(&dfsim(&["dfs", "--n-qubits", "3"]));
    assert_eq!(three["formula_applies"], false);
    assert!(three["formula_dimension"].is_null());
}

#[test]
fn rates_spectrum() {
    let r = stdout_json(&dfsim(&["rates", "--n-bath", "1"]));
    assert_eq!(r["rates"].as_array().unwrap().len(), 16);
    assert_eq!(r["stationary_dimension"].as_u64().unwrap(), 4);
    assert!((r["spectral_gap"].as_f64().unwrap() - 0.343146).abs() < 1e-5);
}

#[test]
fn coupling_checks() {
    let dip = stdout_json(&dfsim(&[
        "check-couplings",
        "--coupling",
        "dipole",
        "--strength",
        "2",
    ]));
    assert_eq!(dip["invariant"], true);
    assert_eq!(dip["samples"].as_array().unwrap().len(), 10);
    let ising2 = stdout_json(&dfsim(&["check-couplings", "--coupling", "ising"]));
    assert_eq!(ising2["invariant"], true);
    let ising4 = stdout_json(&dfsim(&[
        "check-couplings",
        "--coupling",
        "ising",
        "--n-qubits",
        "4",
    ]));
    assert_eq!(ising4["invariant"], false);
    assert_eq!(ising4["dfs_dimension"].as_u64().unwrap(), 6);
}
