use std::fs;
use std::path::Path;

use serde_json::json;

use winding::harness::{read_manifest, run, Cell, ExperimentConfig};
use winding::rng::sample_seed;
use winding::stats::Welford;
use winding::winding::total_winding_of;
use winding::{close_loop, gen_walk, LatticeKind};

fn config(v: serde_json::Value) -> ExperimentConfig {
    let mut v = v;
    v["schema_version"] = json!(1);
    ExperimentConfig::from_json(&v.to_string()).unwrap()
}

/// One small config per experiment kind.
fn small_configs() -> Vec<ExperimentConfig> {
    vec![
        config(
            json!({"experiment": "total_winding_scaling", "n_values": [16, 64, 256], "samples": 40, "seed": 1}),
        ),
        config(
            json!({"experiment": "total_winding_scaling", "lattice": "triangular", "n_values": [32, 128], "samples": 35, "seed": 2}),
        ),
        config(
            json!({"experiment": "pointwise_index", "n_values": [256, 1024], "samples": 40, "z_points": [[0.6, 0.8]], "seed": 3}),
        ),
        config(
            json!({"experiment": "belisle", "n_values": [2000], "samples": 50, "z_points": [[0.5, 0.5]], "seed": 4}),
        ),
        config(
            json!({"experiment": "werner", "samples": 4, "bm_resolution": 200, "levels": [1, 2], "werner_grid": [16, 2], "seed": 5}),
        ),
        config(
            json!({"experiment": "spitzer", "samples": 100, "bm_resolution": 100, "epsilon": [0.01], "z_points": [[1.0, 0.0]], "seed": 6}),
        ),
        config(
            json!({"experiment": "excursion_census", "n_values": [256, 1024, 4096], "samples": 40, "z_points": [[0.5, 0.5]], "seed": 7}),
        ),
        config(
            json!({"experiment": "dehn_rnd", "n_values": [64, 256, 1024], "samples": 40, "d": 3, "seed": 8}),
        ),
        config(
            json!({"experiment": "dehn_avg", "n_values": [64, 256, 1024], "samples": 40, "seed": 9}),
        ),
    ]
}

fn csv_files(dir: &Path) -> Vec<(String, String)> {
    let mut v: Vec<(String, String)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read_to_string(&p).unwrap(),
            )
        })
        .collect();
    v.sort();
    v
}

#[test]
fn csv_is_independent_of_worker_count() {
    for cfg in small_configs() {
        let mut outputs = Vec::new();
        for workers in [1, 3] {
            let dir = tempfile::tempdir().unwrap();
            let mut c = cfg.clone();
            c.workers = workers;
            c.output_dir = dir.path().to_path_buf();
            run(&c).unwrap().write(&c.output_dir).unwrap();
            outputs.push(csv_files(dir.path()));
        }
        assert!(!outputs[0].is_empty());
        assert_eq!(outputs[0], outputs[1], "{:?}", cfg.experiment);
    }
}

#[test]
fn scaling_matches_serial_oracle() {
    let cfg = config(
        json!({"experiment": "total_winding_scaling", "n_values": [50, 200], "samples": 30, "seed": 11, "workers": 2}),
    );
    let r = run(&cfg).unwrap();
    let t = r.primary();
    for (row, &n) in t.rows.iter().zip(&cfg.n_values) {
        let w: Welford = (0..30)
            .map(|i| {
                let lp = close_loop(gen_walk(LatticeKind::Square, n, sample_seed(11, i)).unwrap());
                total_winding_of(&lp).unwrap().to_f64()
            })
            .collect();
        assert_eq!(row[0], Cell::Int(n as i64));
        assert_eq!(row[1], Cell::Int(30));
        assert_eq!(row[2], Cell::Float(w.mean()));
        assert_eq!(row[3], Cell::Float(w.variance()));
    }
}

#[test]
fn manifest_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    for cfg in small_configs().into_iter().take(3) {
        let r = run(&cfg).unwrap();
        let files = r.write(dir.path()).unwrap();
        let manifest = files
            .iter()
            .find(|p| p.to_string_lossy().ends_with(".manifest.json"))
            .unwrap();
        let back = read_manifest(manifest).unwrap();
        assert_eq!(back, r);
        let csv = fs::read_to_string(&files[0]).unwrap();
        assert!(csv.starts_with(&format!("# config_hash={}\n# version=", r.config_hash)));
    }
    assert!(fs::read_dir(dir.path()).unwrap().all(|e| !e
        .unwrap()
        .path()
        .to_string_lossy()
        .ends_with(".partial")));
}

#[test]
fn single_sample_gives_one_row_without_interval() {
    let cfg = config(
        json!({"experiment": "total_winding_scaling", "n_values": [100], "samples": 1, "seed": 0}),
    );
    let t = run(&cfg).unwrap().primary().clone();
    assert_eq!(t.rows.len(), 1);
    assert_eq!(t.rows[0][4], Cell::Empty);
    assert_eq!(t.rows[0][5], Cell::Empty);
}

#[test]
fn confidence_interval_needs_thirty_samples() {
    for (samples, has_ci) in [(29, false), (30, true)] {
        let cfg = config(
            json!({"experiment": "total_winding_scaling", "n_values": [10], "samples": samples, "seed": 0}),
        );
        let t = run(&cfg).unwrap().primary().clone();
        assert_eq!(matches!(t.rows[0][4], Cell::Float(_)), has_ci);
    }
}

#[test]
fn config_hash_changes_with_seed_only_when_results_can() {
    let a = config(json!({"experiment": "dehn_avg", "n_values": [8], "samples": 5, "seed": 1}));
    let mut b = a.clone();
    b.workers = 4;
    b.output_dir = "elsewhere".into();
    assert_eq!(a.hash(), b.hash());
    b.seed = 2;
    assert_ne!(a.hash(), b.hash());
}

#[test]
fn config_errors_name_the_field() {
    let cases = [
        (
            json!({"schema_version": 2, "experiment": "belisle", "samples": 1, "seed": 0}),
            "schema_version",
        ),
        (
            json!({"schema_version": 1, "experiment": "belisle", "n_values": [100], "samples": 1, "z_points": [[1.0, 0.5]], "seed": 0}),
            "z_points",
        ),
        (
            json!({"schema_version": 1, "experiment": "dehn_avg", "n_values": [7], "samples": 1, "seed": 0}),
            "n_values",
        ),
        (
            json!({"schema_version": 1, "experiment": "spitzer", "samples": 1, "bm_resolution": 10, "epsilon": [1.5], "z_points": [[1.0, 0.0]], "seed": 0}),
            "epsilon",
        ),
        (
            json!({"schema_version": 1, "experiment": "werner", "samples": 1, "seed": 0}),
            "bm_resolution",
        ),
        (
            json!({"schema_version": 1, "experiment": "werner", "samples": 1, "seed": 0, "colour": 3}),
            "colour",
        ),
    ];
    for (v, field) in cases {
        let e = ExperimentConfig::from_json(&v.to_string()).unwrap_err();
        assert!(e.is_config(), "{e}");
        assert!(e.to_string().contains(field), "{e} lacks {field}");
    }
}
