//! Seed-reproducible Monte Carlo experiments and their output files.
//!
//! Sample `i` of every experiment uses seed `sample_seed(seed, i)`, the
//! same for every `n`, so runs over several `n` share random numbers.
//! Samples may be computed on several threads but are always aggregated in
//! index order, which makes every CSV independent of the worker count.

mod config;
mod emit;
mod run;
mod svg;

pub use config::{on_lattice_line, ExperimentConfig, ExperimentKind, SCHEMA_VERSION};
pub use emit::{read_manifest, write_all_atomic, write_atomic, Cell, RunResult, Table, VERSION};
pub use run::{
    belisle_statistic, belisle_test, ordered_map, run, scaling_fit, sech_cdf, BelisleResult,
    ScalingFit, QUANTILE_LEVELS, WERNER_DEPTH, WERNER_GRID,
};
pub use svg::{Plot, Series, SeriesKind};
