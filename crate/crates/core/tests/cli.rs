//! End-to-end tests of the command-line runner.

use std::fs;
use std::path::Path;
use std::process::Command;

use num_complex::Complex64;

use fundeconv::io::{self, Provenance};
use fundeconv::model::ContinuousObservation;
use fundeconv::rng::RngSpec;
use fundeconv::FourierSeries;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fundeconv"))
}

fn write_config(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn predict_rate_writes_the_dense_exponent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{
                "kernel": {{ "name": "wave", "params": {{ "a": 0.25, "b": 0.75 }} }},
                "truth": {{ "kind": "besov_dense", "s": 2.0, "p": 2.0, "q": 2.0 }},
                "seed": 1,
                "out_dir": "{}"
            }}"#,
            dir.path().display()
        ),
    );
    let out = bin().args(["predict-rate", "--config", &cfg]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("rate_prediction.json")).unwrap())
            .unwrap();
    assert_eq!(doc["result"]["case"], "dense");
    let expo = doc["result"]["exponent"].as_f64().unwrap();
    assert!((expo - 4.0 / 7.0).abs() < 1e-12);
    assert!(doc["config_sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn estimate_recovers_a_noiseless_trig_polynomial() {
    // hand-written noiseless observation of a trig polynomial through the
    // identity blur: the pipeline must reproduce the input function
    let dir = tempfile::tempdir().unwrap();
    let mmax = 682i64; // band requirement of the regular delta plan at n = 1e9
    let mut truth = FourierSeries::zeros(mmax);
    truth.set(0, Complex64::new(0.4, 0.0));
    for m in 1..=8i64 {
        let z = Complex64::new(0.1 * m as f64, 0.02 * m as f64);
        truth.set(m, z);
        truth.set(-m, z.conj());
    }
    let obs = ContinuousObservation {
        fhat: truth.clone(),
        n: 1e9,
        kernel_name: "delta".into(),
        seed: RngSpec::new(0, 0),
    };
    let obs_path = dir.path().join("obs.csv");
    fs::write(
        &obs_path,
        io::write_continuous_observation(
            &obs,
            &Provenance {
                config_sha256: "manual".into(),
                seed: 0,
            },
        ),
    )
    .unwrap();

    let cfg = write_config(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{
                "kernel": {{ "name": "delta" }},
                "truth": {{ "kind": "trigpoly", "degree": 8, "s": 2.0, "p": 2.0, "q": 2.0 }},
                "estimator": {{ "regime": "regular" }},
                "seed": 4,
                "out_dir": "{}"
            }}"#,
            dir.path().display()
        ),
    );
    let out = bin()
        .args(["estimate", "--config", &cfg, "--obs", obs_path.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));

    let est_text = fs::read_to_string(dir.path().join("estimate.csv")).unwrap();
    let mut err2 = 0.0;
    for line in est_text.lines().skip(2) {
        let cols: Vec<&str> = line.split(',').collect();
        let m: i64 = cols[0].parse().unwrap();
        let re: f64 = cols[1].parse().unwrap();
        let im: f64 = cols[2].parse().unwrap();
        let d = Complex64::new(re, im) - truth.get(m);
        err2 += d.norm_sqr();
    }
    assert!(
        err2.sqrt() / truth.norm_sq().sqrt() < 1e-9,
        "relative error {}",
        err2.sqrt()
    );
    assert!(dir.path().join("estimate_grid.csv").exists());
    let plan: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["result"]["regime"], "regular");
}

#[test]
fn super_smooth_plan_is_reported_in_the_plan_json() {
    let dir = tempfile::tempdir().unwrap();
    // simulate writes a heat-kernel observation at n = 1e6, estimate reads it
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{
                "kernel": {{ "name": "heat", "params": {{ "a": 0.1, "b": 0.2 }} }},
                "truth": {{ "kind": "besov_dense", "max_level": 6,
                            "s": 2.0, "p": 2.0, "q": 2.0 }},
                "n": 1e6,
                "seed": 11,
                "out_dir": "{}"
            }}"#,
            dir.path().display()
        ),
    );
    let out = bin().args(["simulate", "--config", &cfg]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let obs = dir.path().join("observation.csv");
    let out = bin()
        .args(["estimate", "--config", &cfg, "--obs", obs.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plan: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["result"]["regime"], "super");
    assert_eq!(plan["result"]["j0"], plan["result"]["j_upper"]);
    assert!(plan["result"]["lambdas"].is_null());
}

#[test]
fn discrete_simulate_estimate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{
                "kernel": {{ "name": "wave", "params": {{ "a": 0.25, "b": 0.75 }},
                            "design": {{ "mode": "discrete", "points": [0.29, 0.61, 0.73] }} }},
                "truth": {{ "kind": "besov_dense", "max_level": 6,
                            "s": 2.0, "p": 2.0, "q": 2.0 }},
                "estimator": {{ "regime": "adaptive", "basis_j_max": 6 }},
                "n": 3072,
                "seed": 21,
                "out_dir": "{}"
            }}"#,
            dir.path().display()
        ),
    );
    let out = bin().args(["simulate", "--config", &cfg]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let obs_text = fs::read_to_string(dir.path().join("observation.csv")).unwrap();
    assert!(obs_text.lines().next().unwrap().contains("kind=discrete"));
    assert!(obs_text.lines().next().unwrap().contains("M=3"));
    let obs = dir.path().join("observation.csv");
    let out = bin()
        .args(["estimate", "--config", &cfg, "--obs", obs.to_str().unwrap()])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let plan: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("plan.json")).unwrap()).unwrap();
    assert_eq!(plan["result"]["regime"], "adaptive");
    // the report embeds the resolved config verbatim
    assert_eq!(plan["config"]["kernel"]["name"], "wave");
    assert_eq!(plan["config"]["n"], 3072.0);
    assert!(dir.path().join("estimate.csv").exists());
}

#[test]
fn missing_files_and_bad_configs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["simulate", "--config", "/nonexistent/config.json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let cfg = write_config(
        dir.path(),
        "cfg.json",
        r#"{ "kernel": { "name": "wave" }, "truth": { "kind": "besov_dense" } }"#,
    );
    let out = bin().args(["simulate", "--config", &cfg]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));

    // estimate with a missing observation file
    let good = write_config(
        dir.path(),
        "good.json",
        &format!(
            r#"{{
                "kernel": {{ "name": "delta" }},
                "truth": {{ "kind": "trigpoly", "s": 1.0, "p": 2.0, "q": 2.0 }},
                "seed": 1,
                "out_dir": "{}"
            }}"#,
            dir.path().display()
        ),
    );
    let out = bin()
        .args(["estimate", "--config", &good, "--obs", "/nonexistent/obs.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn risk_curve_rejects_a_single_sample_size() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{
                "kernel": {{ "name": "delta" }},
                "truth": {{ "kind": "besov_dense", "max_level": 6,
                            "s": 2.0, "p": 2.0, "q": 2.0 }},
                "n_grid": [4096],
                "replicates": 8,
                "seed": 2,
                "out_dir": "{}"
            }}"#,
            dir.path().display()
        ),
    );
    let out = bin().args(["risk-curve", "--config", &cfg]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_kernel_reports_pass_for_the_catalogue() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{
                "kernel": {{ "name": "rectangle", "params": {{ "a": 0.1, "b": 0.3 }} }},
                "truth": {{ "kind": "trigpoly", "s": 1.0, "p": 2.0, "q": 2.0 }},
                "seed": 6,
                "out_dir": "{}"
            }}"#,
            dir.path().display()
        ),
    );
    let out = bin().args(["verify-kernel", "--config", &cfg]).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("kernel_report.json")).unwrap())
            .unwrap();
    assert_eq!(doc["result"]["decay"]["pass"], true);
    assert!(doc["result"]["delta_growth"].as_array().unwrap().len() == 4);
}

#[test]
fn flags_override_config_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "cfg.json",
        &format!(
            r#"{{
                "kernel": {{ "name": "wave", "params": {{ "a": 0.25, "b": 0.75 }} }},
                "truth": {{ "kind": "besov_dense", "max_level": 6,
                            "s": 2.0, "p": 2.0, "q": 2.0 }},
                "n": 4096,
                "seed": 3,
                "out_dir": "{}"
            }}"#,
            dir.path().display()
        ),
    );
    let other = dir.path().join("elsewhere");
    let out = bin()
        .args([
            "simulate",
            "--config",
            &cfg,
            "--seed",
            "99",
            "--out",
            other.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = fs::read_to_string(other.join("observation.csv")).unwrap();
    assert!(text.starts_with('#'));
    assert!(text.lines().next().unwrap().contains("seed=99"));
}
