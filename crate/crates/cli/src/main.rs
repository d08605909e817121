//! Command line front end.
//!
//! Exit codes: 0 success, 2 configuration or usage error, 3 I/O error,
//! 1 anything else.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use winding::excursion::{build_frame, classify, decompose};
use winding::harness::{self, ExperimentConfig, ExperimentKind, SCHEMA_VERSION};
use winding::winding::{index_field, total_winding_of};
use winding::{close_loop, gen_walk, Error, LatticeKind, Point, ScaleParams};

#[derive(Parser)]
#[command(name = "winding", version, about = "Winding of planar random walks")]
struct Cli {
    /// Master seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    workers: Option<usize>,
    /// Output file (single objects) or directory (experiments).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate one walk and print its vertices.
    Simulate {
        #[arg(long, default_value = "square")]
        lattice: LatticeKind,
        #[arg(long)]
        n: usize,
    },
    /// Exact index field of one walk closed by its chord.
    IndexField {
        #[arg(long, default_value = "square")]
        lattice: LatticeKind,
        #[arg(long)]
        n: usize,
    },
    /// Exact total winding of one walk closed by its chord.
    TotalWinding {
        #[arg(long, default_value = "square")]
        lattice: LatticeKind,
        #[arg(long)]
        n: usize,
    },
    /// Excursion decomposition of one walk around a point (lattice units).
    Excursions {
        #[arg(long, default_value = "square")]
        lattice: LatticeKind,
        #[arg(long)]
        n: usize,
        /// Point as `x,y`.
        #[arg(long, value_parser = parse_point)]
        z: Point<f64>,
        #[arg(long, default_value_t = 1.0)]
        c0: f64,
    },
    /// Run an experiment described by a JSON config.
    Experiment { config: PathBuf },
    /// Winding angle law at a point (lattice units) against the sech law.
    Belisle {
        #[arg(long, default_value = "square")]
        lattice: LatticeKind,
        #[arg(long, default_value_t = 1_000_000)]
        n: usize,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, value_parser = parse_point, default_value = "0.5,0.5")]
        z: Point<f64>,
    },
    /// Scaled areas of Brownian winding levels.
    Werner {
        #[arg(long, default_value_t = 100)]
        paths: usize,
        #[arg(long, default_value_t = 100_000)]
        m: usize,
        /// Comma-separated levels.
        #[arg(long, value_delimiter = ',', default_value = "5,6,7,8,9,10")]
        levels: Vec<i64>,
    },
    /// Wiener sausage hitting probability.
    Spitzer {
        #[arg(long, default_value_t = 10_000)]
        paths: usize,
        #[arg(long, default_value_t = 1000)]
        m: usize,
        #[arg(long, value_delimiter = ',', default_value = "0.001")]
        epsilon: Vec<f64>,
        #[arg(long, value_parser = parse_point, default_value = "1,0")]
        z: Point<f64>,
    },
    /// Random or averaged Dehn function lower bounds.
    Dehn {
        /// Comma-separated word lengths.
        #[arg(long, value_delimiter = ',', default_value = "256,1024,4096")]
        n: Vec<usize>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 2)]
        d: usize,
        /// Condition on closed words instead of closing with a shortest word.
        #[arg(long)]
        averaged: bool,
    },
}

fn parse_point(s: &str) -> Result<Point<f64>, String> {
    let (a, b) = s.split_once(',').ok_or("expected x,y")?;
    let p = |t: &str| t.trim().parse::<f64>().map_err(|e| e.to_string());
    Ok(Point::new(p(a)?, p(b)?))
}

fn emit(value: &Value, out: Option<&Path>) -> winding::Result<()> {
    let text = serde_json::to_string_pretty(value)? + "\n";
    match out {
        Some(p) => harness::write_atomic(p, &text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn base_config(kind: ExperimentKind, cli: &Cli) -> ExperimentConfig {
    ExperimentConfig {
        schema_version: SCHEMA_VERSION,
        experiment: kind,
        lattice: LatticeKind::Square,
        n_values: vec![],
        samples: 1,
        z_points: vec![],
        c0: 1.0,
        bm_resolution: None,
        epsilon: vec![],
        levels: vec![],
        d: 2,
        werner_grid: None,
        seed: cli.seed.unwrap_or(0),
        workers: cli.workers.unwrap_or(1),
        output_dir: cli.out.clone().unwrap_or_else(|| PathBuf::from("out")),
    }
}

fn run_experiment(cfg: ExperimentConfig, print: bool) -> winding::Result<()> {
    let result = harness::run(&cfg)?;
    let files = result.write(&cfg.output_dir)?;
    if print {
        print!("{}", result.primary().to_csv(&result.config_hash));
    }
    for f in files {
        eprintln!("wrote {}", f.display());
    }
    Ok(())
}

fn main_inner(cli: Cli) -> winding::Result<()> {
    let seed = cli.seed.unwrap_or(0);
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Simulate { lattice, n } => {
            let w = gen_walk(*lattice, *n, seed)?;
            emit(
                &json!({
                    "lattice": lattice.name(),
                    "n": n,
                    "seed": seed,
                    "vertices": w.vertices(),
                }),
                out,
            )
        }
        Command::IndexField { lattice, n } => {
            let lp = close_loop(gen_walk(*lattice, *n, seed)?);
            emit(&index_field(&lp)?.to_json(), out)
        }
        Command::TotalWinding { lattice, n } => {
            let lp = close_loop(gen_walk(*lattice, *n, seed)?);
            let area = total_winding_of(&lp)?;
            emit(
                &json!({ "lattice": lattice.name(), "n": n, "seed": seed, "total_winding": area.to_json() }),
                out,
            )
        }
        Command::Excursions { lattice, n, z, c0 } => {
            let path = gen_walk(*lattice, *n, seed)?;
            let frame = build_frame(*z, *lattice)?;
            let params = ScaleParams::new(*lattice, *n, *c0)?;
            let set = classify(decompose(&path, &frame)?, &params, &path);
            emit(&set.to_json(), out)
        }
        Command::Experiment { config } => {
            let mut cfg = ExperimentConfig::load(config)?;
            if let Some(s) = cli.seed {
                cfg.seed = s;
            }
            if let Some(w) = cli.workers {
                cfg.workers = w;
            }
            if let Some(o) = &cli.out {
                cfg.output_dir = o.clone();
            }
            run_experiment(cfg, false)
        }
        Command::Belisle {
            lattice,
            n,
            samples,
            z,
        } => {
            let mut cfg = base_config(ExperimentKind::Belisle, &cli);
            cfg.lattice = *lattice;
            cfg.n_values = vec![*n];
            cfg.samples = *samples;
            cfg.z_points = vec![[z.x, z.y]];
            run_experiment(cfg, true)
        }
        Command::Werner { paths, m, levels } => {
            let mut cfg = base_config(ExperimentKind::Werner, &cli);
            cfg.samples = *paths;
            cfg.bm_resolution = Some(*m);
            cfg.levels = levels.clone();
            run_experiment(cfg, true)
        }
        Command::Spitzer {
            paths,
            m,
            epsilon,
            z,
        } => {
            let mut cfg = base_config(ExperimentKind::Spitzer, &cli);
            cfg.samples = *paths;
            cfg.bm_resolution = Some(*m);
            cfg.epsilon = epsilon.clone();
            cfg.z_points = vec![[z.x, z.y]];
            run_experiment(cfg, true)
        }
        Command::Dehn {
            n,
            samples,
            d,
            averaged,
        } => {
            let kind = if *averaged {
                ExperimentKind::DehnAvg
            } else {
                ExperimentKind::DehnRnd
            };
            let mut cfg = base_config(kind, &cli);
            cfg.n_values = n.clone();
            cfg.samples = *samples;
            cfg.d = *d;
            run_experiment(cfg, true)
        }
    }
}

fn exit_code(e: &Error) -> u8 {
    if e.is_config() {
        2
    } else if e.is_io() {
        3
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match main_inner(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
