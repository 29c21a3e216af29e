#![allow(clippy::excessive_precision)]
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_contraction-lab"))
        .args(args)
        .env_remove("CONTRACTION_LAB_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn entry(v: &Value, j: usize, k: usize) -> (f64, f64) {
    let e = &v["result"]["gram"][j][k];
    (e[0].as_f64().unwrap(), e[1].as_f64().unwrap())
}

#[test]
fn bergman_moments_are_reciprocals() {
    let out = run(&["moments", "--alpha", "0", "--N", "5"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    for j in 0..5 {
        for k in 0..5 {
            let want = if j == k { 1.0 / (j as f64 + 1.0) } else { 0.0 };
            let (re, im) = entry(&v, j, k);
            assert!((re - want).abs() < 1e-15 && im.abs() < 1e-15);
        }
    }
    assert_eq!(v["seed"], 0);
}

#[test]
fn half_circle_moments_are_toeplitz() {
    let out = run(&["moments", "--arcs", "[[0,3.0]]", "--N", "3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let len = 3.0;
    // ∫ ζ̄^{j−k} dm|_E = (1/2π) ∫_0^L e^{−i(j−k)θ} dθ
    let f = |d: f64| {
        if d == 0.0 {
            (len / (2.0 * std::f64::consts::PI), 0.0)
        } else {
            let re = (d * len).sin() / (2.0 * std::f64::consts::PI * d);
            let im = ((d * len).cos() - 1.0) / (2.0 * std::f64::consts::PI * d);
            (re, im)
        }
    };
    for j in 0..3 {
        for k in 0..3 {
            let (re, im) = entry(&v, j, k);
            let (wre, wim) = f(j as f64 - k as f64);
            assert!((re - wre).abs() < 1e-14 && (im - wim).abs() < 1e-14, "({j},{k})");
        }
    }
    assert_eq!(entry(&v, 0, 1), entry(&v, 1, 2));
}

#[test]
fn power_weight_moment_is_four_over_pi() {
    let out = run(&["moments", "--power-s", "1", "--N", "1"]);
    assert!(out.status.success());
    let (re, im) = entry(&stdout_json(&out), 0, 0);
    assert!((re - 4.0 / std::f64::consts::PI).abs() < 1e-10 && im == 0.0);
}

#[test]
fn conditioning_errors_exit_with_three() {
    let out = run(&["moments", "--arcs", "[[0,0.5]]", "--N", "60"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    let message = err["error"].as_str().unwrap();
    assert!(message.contains("largest admissible order"), "{message}");
}

#[test]
fn parameter_errors_exit_with_three() {
    assert_eq!(run(&["moments", "--alpha", "-1.5", "--N", "3"]).status.code(), Some(3));
    assert_eq!(run(&["experiment", "--variant", "T4", "--delta", "0.5", "--N", "10"]).status.code(), Some(3));
    assert_eq!(run(&["moments", "--N", "3"]).status.code(), Some(3));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(3));
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("t3.json");
    std::fs::write(&config, r#"{"delta": 0.5, "variant": "T3", "N": 10, "s_exponent": 0.8}"#).unwrap();
    let out = run(&["experiment", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn experiments_pass_and_write_artifacts() {
    for (variant, delta, n, expected) in [
        ("T1", "0.5", "30", "growth"),
        ("comparison-similar", "0.5", "60", "saturation"),
        ("T3", "0.9", "30", "growth"),
    ] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&[
            "experiment", "--variant", variant, "--delta", delta, "--N", n, "--seed", "11", "--format", "both",
            "--output-dir", dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{variant}: {}", String::from_utf8_lossy(&out.stderr));
        let report = read_json(&dir.path().join("experiment.json"));
        assert_eq!(report["seed"], 11);
        assert_eq!(report["result"]["verdicts"]["all"], true);
        assert_eq!(report["result"]["trace_analysis"]["expected"], expected);
        for table in ["margins", "codim", "trace_sweep", "asymptote"] {
            let text = std::fs::read_to_string(dir.path().join(format!("{table}.csv"))).unwrap();
            assert!(text.starts_with("seed,"), "{table}");
            assert!(text.lines().skip(1).all(|l| l.starts_with("11,")), "{table}");
        }
    }
}

#[test]
fn verdict_failures_exit_with_two() {
    let out = run(&["experiment", "--variant", "comparison-similar", "--delta", "0.5", "--N", "20", "--saturation-ratio", "1.0"]);
    assert_eq!(out.status.code(), Some(2));
    let block: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(block["verdicts"]["trace"], false);
    assert!(!block["verdicts"]["failures"].as_array().unwrap().is_empty());
}

#[test]
fn experiment_config_files_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("config.json");
    std::fs::write(
        &config,
        r#"{"delta": 0.6, "variant": "T2-carleson", "N": 12, "seed": 5,
            "lambda_grid": [[0, 0], [0.5, 0.1]], "carleson": {"a": 0.5, "eps": 0.4, "levels": 5}}"#,
    )
    .unwrap();
    let out = run(&["experiment", "--config", config.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let v = stdout_json(&out);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["result"]["margins"].as_array().unwrap().len(), 2);
    assert_eq!(v["result"]["config"]["carleson"]["levels"], 5);
}

#[test]
fn artifacts_do_not_depend_on_threads() {
    let mut reference: Option<Vec<Vec<u8>>> = None;
    for threads in ["1", "4", "8"] {
        let dir = tempfile::tempdir().unwrap();
        let out = run(&[
            "experiment", "--variant", "T2", "--delta", "0.9", "--N", "30", "--seed", "3", "--format", "both", "--threads",
            threads, "--output-dir", dir.path().to_str().unwrap(),
        ]);
        assert!(out.status.success());
        let files: Vec<Vec<u8>> = ["experiment.json", "margins.csv", "codim.csv", "trace_sweep.csv", "asymptote.csv"]
            .iter()
            .map(|f| std::fs::read(dir.path().join(f)).unwrap())
            .collect();
        match &reference {
            None => reference = Some(files),
            Some(r) => assert!(r == &files, "threads={threads}"),
        }
    }
}

#[test]
fn thread_count_comes_from_the_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_contraction-lab"))
        .args(["carleson"])
        .env("CONTRACTION_LAB_THREADS", "two")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn identity_battery_is_clean() {
    let out = run(&["identities", "--dims", "2-8", "--cases", "200", "--seed", "42"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["seed"], 42);
    assert_eq!(v["result"]["violations"], 0);
    assert_eq!(v["result"]["cases"], 200);
}

#[test]
fn scalar_characteristic_function_is_the_blaschke_factor() {
    let out = run(&["charfn", "--matrix", "[[0.5]]", "--z", "0.3,0.2", "--lambda", "0.1", "--mu", "-0.2,0.3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let theta = &v["result"]["theta"][0][0];
    let (z_re, z_im) = (0.3, 0.2);
    // (z − t)/(1 − t z)
    let (num_re, num_im) = (z_re - 0.5, z_im);
    let (den_re, den_im) = (1.0 - 0.5 * z_re, -0.5 * z_im);
    let d = den_re * den_re + den_im * den_im;
    let want = ((num_re * den_re + num_im * den_im) / d, (num_im * den_re - num_re * den_im) / d);
    assert!((theta[0].as_f64().unwrap() - want.0).abs() < 1e-15);
    assert!((theta[1].as_f64().unwrap() - want.1).abs() < 1e-15);
}

#[test]
fn unitary_charfn_passes_with_a_note() {
    let out = run(&["charfn", "--matrix", "[[0,1],[1,0]]", "--z", "0.4", "--lambda", "0.2", "--mu", "0.3"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["result"]["defect_rank"], 0);
    assert!(!v["result"]["identities"]["notes"].as_array().unwrap().is_empty());
}

#[test]
fn grid_commands_emit_tables() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    for args in [
        vec!["minmod", "--alpha", "0", "--N", "20", "--lambda", "0.6"],
        vec!["codim", "--alpha", "0", "--power-s", "1.5", "--N", "10"],
        vec!["tracenorm-sweep", "--alpha", "0", "--power-s", "1.5", "--N", "15,30", "--lambda", "0.95"],
        vec!["gram", "--alpha", "-0.5", "--N", "4"],
        vec!["asymptote", "--alpha", "0", "--arcs", "[[0,1.5]]", "--f", "1;0,1"],
        vec!["asymptote", "--mode", "membership", "--alpha", "0", "--beta", "0.9"],
        vec!["asymptote", "--mode", "witness", "--alpha", "0", "--beta", "-1.5", "--gamma", "0.3"],
        vec!["carleson", "--levels", "4"],
    ] {
        let mut full = args.clone();
        full.extend(["--format", "both", "--output-dir", d]);
        let out = run(&full);
        assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    }
    let sweep = std::fs::read_to_string(dir.path().join("tracenorm_sweep.csv")).unwrap();
    let rows: Vec<&str> = sweep.lines().collect();
    assert_eq!(rows[0], "seed,lambda_re,lambda_im,N,value");
    let v15: f64 = rows[1].split(',').nth(4).unwrap().parse().unwrap();
    assert!((v15 - 0.3712562029148445).abs() < 1e-10);
    let minmod = read_json(&dir.path().join("minmod.json"));
    let value = minmod["result"]["rows"][0]["min_modulus"].as_f64().unwrap();
    assert!((value - 0.70710678652663411).abs() < 1e-12);
    let arcs = std::fs::read_to_string(dir.path().join("carleson_arcs.csv")).unwrap();
    assert_eq!(arcs.lines().count(), 1 + 16);
}
