use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn winding(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_winding"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let o = winding(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let p = dir.join("cfg.json");
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn simulate_is_seeded() {
    let a = json_out(&["simulate", "--n", "10", "--seed", "3"]);
    let b = json_out(&["simulate", "--n", "10", "--seed", "3"]);
    assert_eq!(a, b);
    assert_eq!(a["vertices"].as_array().unwrap().len(), 11);
    assert_eq!(a["vertices"][0], serde_json::json!([0, 0]));
    let c = json_out(&["simulate", "--n", "10", "--seed", "4"]);
    assert_ne!(a["vertices"], c["vertices"]);
}

#[test]
fn index_field_and_total_winding_agree() {
    for lattice in ["square", "triangular"] {
        let f = json_out(&[
            "index-field",
            "--n",
            "40",
            "--seed",
            "9",
            "--lattice",
            lattice,
        ]);
        for key in ["lattice", "cells", "split_cells", "signed_area"] {
            assert!(f.get(key).is_some(), "missing {key}");
        }
        let t = json_out(&[
            "total-winding",
            "--n",
            "40",
            "--seed",
            "9",
            "--lattice",
            lattice,
        ]);
        assert!(t["total_winding"].is_object());
    }
}

#[test]
fn excursions_json_shape() {
    let e = json_out(&["excursions", "--n", "500", "--seed", "1", "--z", "0.5,0.5"]);
    for key in ["z", "z_hat", "excursions", "residual", "crossings"] {
        assert!(e.get(key).is_some(), "missing {key}");
    }
    assert!(e["residual"].as_f64().unwrap() <= 2.0);
    for ex in e["excursions"].as_array().unwrap() {
        let w = ex[2].as_f64().unwrap();
        assert!(w == 0.5 || w == -0.5);
    }
}

#[test]
fn out_flag_writes_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("walk.json");
    let o = winding(&["simulate", "--n", "5", "--out", p.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(v["n"], 5);
}

#[test]
fn experiment_writes_outputs_and_is_worker_independent() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "experiment": "total_winding_scaling",
            "n_values": [16, 64, 256], "samples": 30, "seed": 5}"#,
    );
    let mut csvs = Vec::new();
    for workers in ["1", "3"] {
        let out = dir.path().join(format!("w{workers}"));
        let o = winding(&[
            "experiment",
            &cfg,
            "--workers",
            workers,
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        for f in [
            "total_winding_scaling.csv",
            "total_winding_scaling.manifest.json",
            "total_winding_scaling.svg",
        ] {
            assert!(out.join(f).exists(), "{f}");
        }
        csvs.push(fs::read_to_string(out.join("total_winding_scaling.csv")).unwrap());
    }
    assert_eq!(csvs[0], csvs[1]);
    let header = csvs[0].lines().nth(2).unwrap();
    assert_eq!(header, "n,samples,mean_total_winding,var,ci_lo,ci_hi");
}

#[test]
fn shortcut_subcommands_print_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = winding(&["dehn", "--n", "16,64", "--samples", "5", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("n,d,samples,mean_bound,ci_low,ci_high,seed"));
    assert!(dir.path().join("dehn_rnd.csv").exists());
    let o = winding(&["belisle", "--n", "1000", "--samples", "5", "--out", out]);
    assert!(o.status.success());
    let o = winding(&["spitzer", "--paths", "20", "--m", "50", "--out", out]);
    assert!(o.status.success());
    let o = winding(&[
        "werner", "--paths", "2", "--m", "100", "--levels", "1,2", "--out", out,
    ]);
    assert!(o.status.success());
}

#[test]
fn config_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"schema_version": 1, "experiment": "belisle", "samples": 1, "seed": 0, "extra": 1}"#,
        r#"{"schema_version": 9, "experiment": "dehn_avg", "n_values": [4], "samples": 1, "seed": 0}"#,
        r#"{"schema_version": 1, "experiment": "dehn_avg", "n_values": [5], "samples": 1, "seed": 0}"#,
        "not json",
    ];
    for text in cases {
        let cfg = write_config(dir.path(), text);
        let o = winding(&["experiment", &cfg, "--out", dir.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(2), "{text}");
    }
    let o = winding(&[
        "dehn",
        "--averaged",
        "--n",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let o = winding(&["excursions", "--n", "10", "--z", "1.0,0.5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn io_errors_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let missing = dir.path().join("nope.json");
    let o = winding(&["experiment", missing.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    // output directory below a regular file
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = write_config(
        dir.path(),
        r#"{"schema_version": 1, "experiment": "dehn_avg", "n_values": [4], "samples": 2, "seed": 0}"#,
    );
    let out = blocker.join("sub");
    let o = winding(&["experiment", &cfg, "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
    let o = winding(&[
        "simulate",
        "--n",
        "3",
        "--out",
        out.join("a.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
}
