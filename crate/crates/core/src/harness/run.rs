//! Experiment execution: ordered parallel sampling and aggregation.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::brownian::{
    gen_bm, p_integral_target, sausage_contains_refined, spitzer_target, werner_path_areas,
    WernerOptions,
};
use crate::dehn::{bridge_word, rnd_dehn_lower, Word};
use crate::error::{Error, Result};
use crate::excursion::{build_frame, classify, decompose, ExcursionClass, WeightStats};
use crate::geom::Point;
use crate::rng::sample_seed;
use crate::stats::{fit_line, ks_distance, LineFit, Summary, Welford};
use crate::walk::{close_loop, gen_walk, LatticeKind, ScaleParams};
use crate::winding::{stream_winding, total_winding_of};

use super::config::{ExperimentConfig, ExperimentKind};
use super::emit::{Cell, RunResult, Table, VERSION};
use super::svg::{Plot, Series};

/// Default stratification for the Werner estimate: rows and points per row.
pub const WERNER_GRID: [usize; 2] = [128, 4];
/// Refinement depth cap for the Werner estimate.
pub const WERNER_DEPTH: u32 = 160;

/// Evaluates `f(i)` for `i < count` on `workers` threads and returns the
/// results in index order.
pub fn ordered_map<R: Send>(
    workers: usize,
    count: usize,
    f: impl Fn(u64) -> Result<R> + Sync,
) -> Result<Vec<R>> {
    if workers <= 1 {
        return (0..count as u64).map(f).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Internal(e.to_string()))?;
    pool.install(|| (0..count as u64).into_par_iter().map(&f).collect())
}

fn ci_cells(s: &Summary) -> [Cell; 2] {
    [s.ci95.map(|c| c.0).into(), s.ci95.map(|c| c.1).into()]
}

/// Least-squares fit of `mean / n` against `ln ln n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingFit {
    pub a: f64,
    pub b: f64,
    pub b_se: f64,
    pub residuals: Vec<f64>,
}

/// Fits `y = a + b ln ln n` for `y = mean / n`; needs three points.
pub fn scaling_fit(ns: &[usize], means: &[f64]) -> Result<ScalingFit> {
    if ns.len() < 3 || ns.len() != means.len() {
        return Err(Error::arg(
            "n_values",
            "a scaling fit needs at least three points",
        ));
    }
    if ns.iter().any(|&n| n < 3) {
        return Err(Error::arg("n_values", "ln ln n needs n >= 3"));
    }
    let xs: Vec<f64> = ns.iter().map(|&n| (n as f64).ln().ln()).collect();
    let ys: Vec<f64> = ns.iter().zip(means).map(|(&n, m)| m / n as f64).collect();
    let LineFit {
        intercept,
        slope,
        slope_se,
    } = fit_line(&xs, &ys).ok_or_else(|| Error::arg("n_values", "degenerate abscissae"))?;
    let residuals = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| y - intercept - slope * x)
        .collect();
    Ok(ScalingFit {
        a: intercept,
        b: slope,
        b_se: slope_se,
        residuals,
    })
}

/// CDF of the hyperbolic secant law with density `sech(pi x / 2) / 2`.
pub fn sech_cdf(x: f64) -> f64 {
    2.0 / PI * (PI * x / 2.0).exp().atan()
}

/// KS distance to the hyperbolic secant law and sample quantiles.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BelisleResult {
    pub ks: f64,
    /// `(p, quantile)` for p in 0.05, 0.25, 0.5, 0.75, 0.95.
    pub quantiles: Vec<(f64, f64)>,
}

pub const QUANTILE_LEVELS: [f64; 5] = [0.05, 0.25, 0.5, 0.75, 0.95];

/// Lower empirical quantile.
fn quantile(sorted: &[f64], p: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let i = ((p * sorted.len() as f64).ceil() as usize).clamp(1, sorted.len()) - 1;
    sorted[i]
}

/// Compares already normalized values with the hyperbolic secant law.
pub fn belisle_statistic(values: &[f64]) -> BelisleResult {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    BelisleResult {
        ks: ks_distance(&v, sech_cdf),
        quantiles: QUANTILE_LEVELS
            .iter()
            .map(|&p| (p, quantile(&v, p)))
            .collect(),
    }
}

/// Per-sample walk quantities at a point.
#[derive(Clone, Copy, Debug)]
struct PointSample {
    index: i64,
    theta: f64,
}

fn point_samples(
    cfg: &ExperimentConfig,
    n: usize,
    z_lattice: Point<f64>,
) -> Result<Vec<PointSample>> {
    ordered_map(cfg.workers, cfg.samples, |i| {
        let s = stream_winding(cfg.lattice, n, sample_seed(cfg.seed, i), z_lattice)?;
        Ok(PointSample {
            index: s.sample.index.value(),
            theta: s.sample.theta,
        })
    })
}

/// `2 theta / ln n` and `j / ln n` for the walk at `z` (lattice units).
pub fn belisle_test(
    lattice: LatticeKind,
    n: usize,
    z: Point<f64>,
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<(BelisleResult, BelisleResult)> {
    let cfg = ExperimentConfig {
        schema_version: super::config::SCHEMA_VERSION,
        experiment: ExperimentKind::Belisle,
        lattice,
        n_values: vec![n],
        samples,
        z_points: vec![[z.x, z.y]],
        c0: 1.0,
        bm_resolution: None,
        epsilon: vec![],
        levels: vec![],
        d: 2,
        werner_grid: None,
        seed,
        workers,
        output_dir: Default::default(),
    };
    let s = point_samples(&cfg, n, z)?;
    Ok(belisle_pair(&s, n))
}

fn belisle_pair(s: &[PointSample], n: usize) -> (BelisleResult, BelisleResult) {
    let ln = (n as f64).ln();
    let angle: Vec<f64> = s.iter().map(|p| 2.0 * p.theta / ln).collect();
    let index: Vec<f64> = s.iter().map(|p| p.index as f64 / ln).collect();
    (belisle_statistic(&angle), belisle_statistic(&index))
}

/// Runs an experiment. Nothing is written; see [`RunResult::write`].
pub fn run(cfg: &ExperimentConfig) -> Result<RunResult> {
    cfg.validate()?;
    let start = Instant::now();
    let (tables, derived, plot) = match cfg.experiment {
        ExperimentKind::TotalWindingScaling => scaling(cfg)?,
        ExperimentKind::PointwiseIndex => pointwise(cfg)?,
        ExperimentKind::Belisle => belisle(cfg)?,
        ExperimentKind::Werner => werner(cfg)?,
        ExperimentKind::Spitzer => spitzer(cfg)?,
        ExperimentKind::ExcursionCensus => census(cfg)?,
        ExperimentKind::DehnRnd | ExperimentKind::DehnAvg => dehn(cfg)?,
    };
    Ok(RunResult {
        config: cfg.clone(),
        config_hash: cfg.hash(),
        version: VERSION.to_string(),
        wall_clock_seconds: start.elapsed().as_secs_f64(),
        tables,
        derived,
        plot,
    })
}

type Output = (Vec<Table>, serde_json::Value, Plot);

fn lnln(n: usize) -> f64 {
    (n as f64).ln().ln()
}

fn scaling(cfg: &ExperimentConfig) -> Result<Output> {
    let mut t = Table::new(
        "",
        &[
            "n",
            "samples",
            "mean_total_winding",
            "var",
            "ci_lo",
            "ci_hi",
        ],
    );
    let mut means = Vec::new();
    for &n in &cfg.n_values {
        let v = ordered_map(cfg.workers, cfg.samples, |i| {
            let lp = close_loop(gen_walk(cfg.lattice, n, sample_seed(cfg.seed, i))?);
            Ok(total_winding_of(&lp)?.to_f64())
        })?;
        let s = v.into_iter().collect::<Welford>().summary();
        let [lo, hi] = ci_cells(&s);
        t.push(vec![
            n.into(),
            s.count.into(),
            s.mean.into(),
            s.variance.into(),
            lo,
            hi,
        ]);
        means.push(s.mean);
    }
    let ns = &cfg.n_values;
    let per_n: Vec<f64> = ns.iter().zip(&means).map(|(&n, m)| m / n as f64).collect();
    let fit = (ns.len() >= 3 && ns[0] >= 3)
        .then(|| scaling_fit(ns, &means))
        .transpose()?;
    let increasing = per_n.windows(2).all(|w| w[1] > w[0]);
    let last = *ns.last().expect("validated");
    let derived = json!({
        "mean_over_n": per_n,
        "strictly_increasing": increasing,
        "fit": fit,
        "reference_slope": 1.0 / TAU,
        "last_ratio_to_reference": per_n.last().map(|y| y / (lnln(last) / TAU)),
    });
    let pts: Vec<(f64, f64)> = ns.iter().zip(&per_n).map(|(&n, y)| (lnln(n), *y)).collect();
    let plot = Plot {
        title: "Mean total winding per step".into(),
        x_label: "ln ln n".into(),
        y_label: "E[total winding] / n".into(),
        series: vec![
            Series::markers("empirical", pts.clone()),
            Series::line(
                "(1/2pi) ln ln n",
                pts.iter().map(|p| (p.0, p.0 / TAU)).collect(),
            ),
        ],
    };
    Ok((vec![t], derived, plot))
}

fn pointwise(cfg: &ExperimentConfig) -> Result<Output> {
    let mut t = Table::new(
        "",
        &[
            "n",
            "z_re",
            "z_im",
            "mean_abs_index",
            "target_p_integral",
            "ratio_to_lnlnn",
        ],
    );
    let mut detail = Table::new(
        "detail",
        &[
            "n",
            "z_re",
            "z_im",
            "samples",
            "mean_abs_index",
            "var",
            "ci_lo",
            "ci_hi",
        ],
    );
    let mut series = Vec::new();
    for z in cfg.z() {
        let target = p_integral_target(z)?;
        let mut pts = Vec::new();
        for &n in &cfg.n_values {
            let zl = ScaleParams::new(cfg.lattice, n, cfg.c0)?.to_lattice(z);
            let s = point_samples(cfg, n, zl)?
                .iter()
                .map(|p| p.index.abs() as f64)
                .collect::<Welford>()
                .summary();
            let ratio = s.mean / lnln(n);
            t.push(vec![
                n.into(),
                z.x.into(),
                z.y.into(),
                s.mean.into(),
                target.into(),
                ratio.into(),
            ]);
            let [lo, hi] = ci_cells(&s);
            detail.push(vec![
                n.into(),
                z.x.into(),
                z.y.into(),
                s.count.into(),
                s.mean.into(),
                s.variance.into(),
                lo,
                hi,
            ]);
            pts.push(((n as f64).log2(), ratio));
        }
        let (x0, x1) = (pts[0].0, pts[pts.len() - 1].0);
        series.push(Series::markers(format!("z = ({}, {})", z.x, z.y), pts));
        series.push(Series::line("target", vec![(x0, target), (x1, target)]));
    }
    let ratio = t.column("ratio_to_lnlnn").unwrap_or_default();
    let target = t.column("target_p_integral").unwrap_or_default();
    let derived = json!({
        "ratio_over_target": ratio.iter().zip(&target).map(|(r, q)| r / q).collect::<Vec<_>>(),
    });
    let plot = Plot {
        title: "Pointwise index".into(),
        x_label: "log2 n".into(),
        y_label: "E|j_n(z)| / ln ln n".into(),
        series,
    };
    Ok((vec![t, detail], derived, plot))
}

fn belisle(cfg: &ExperimentConfig) -> Result<Output> {
    let mut cols = vec!["n", "z_re", "z_im", "samples", "statistic", "ks"];
    let qnames = ["q05", "q25", "q50", "q75", "q95"];
    cols.extend(qnames);
    let mut t = Table::new("", &cols);
    let mut plot = Plot {
        title: "Winding angle against the hyperbolic secant law".into(),
        x_label: "2 theta / ln n".into(),
        y_label: "CDF".into(),
        series: vec![],
    };
    for z in cfg.z() {
        for &n in &cfg.n_values {
            let s = point_samples(cfg, n, z)?;
            let (angle, index) = belisle_pair(&s, n);
            for (name, r) in [("two_theta_over_ln_n", &angle), ("j_over_ln_n", &index)] {
                let mut row: Vec<Cell> = vec![
                    n.into(),
                    z.x.into(),
                    z.y.into(),
                    s.len().into(),
                    name.into(),
                    r.ks.into(),
                ];
                row.extend(r.quantiles.iter().map(|q| Cell::from(q.1)));
                t.push(row);
            }
            if plot.series.is_empty() {
                let ln = (n as f64).ln();
                let mut v: Vec<f64> = s.iter().map(|p| 2.0 * p.theta / ln).collect();
                v.sort_by(f64::total_cmp);
                let step = (v.len() / 200).max(1);
                let emp = (0..v.len())
                    .step_by(step)
                    .map(|i| (v[i], (i + 1) as f64 / v.len() as f64))
                    .collect();
                let grid = (-40..=40)
                    .map(|k| (k as f64 * 0.1, sech_cdf(k as f64 * 0.1)))
                    .collect();
                plot.series.push(Series::markers(format!("n = {n}"), emp));
                plot.series.push(Series::line("sech law", grid));
            }
        }
    }
    Ok((vec![t], json!({}), plot))
}

fn werner_options(cfg: &ExperimentConfig) -> WernerOptions {
    let [rows, per_row] = cfg.werner_grid.unwrap_or(WERNER_GRID);
    WernerOptions {
        rows,
        points_per_row: per_row,
        max_refine_depth: WERNER_DEPTH,
    }
}

fn werner(cfg: &ExperimentConfig) -> Result<Output> {
    let m = cfg.bm_resolution.expect("validated");
    let opts = werner_options(cfg);
    let areas = ordered_map(cfg.workers, cfg.samples, |i| {
        let p = gen_bm::<f64>(m, sample_seed(cfg.seed, i))?;
        werner_path_areas(&p, &cfg.levels, opts)
    })?;
    let mut t = Table::new(
        "",
        &[
            "k",
            "paths",
            "m",
            "mean_scaled_area",
            "var",
            "ci_lo",
            "ci_hi",
            "target",
        ],
    );
    let mut pts = Vec::new();
    for (j, &k) in cfg.levels.iter().enumerate() {
        let s = areas
            .iter()
            .map(|a| (k * k) as f64 * a[j])
            .collect::<Welford>()
            .summary();
        let [lo, hi] = ci_cells(&s);
        t.push(vec![
            k.into(),
            s.count.into(),
            m.into(),
            s.mean.into(),
            s.variance.into(),
            lo,
            hi,
            (1.0 / TAU).into(),
        ]);
        pts.push((k as f64, s.mean));
    }
    let (k0, k1) = (pts[0].0, pts[pts.len() - 1].0);
    let plot = Plot {
        title: "Scaled winding level areas".into(),
        x_label: "k".into(),
        y_label: "k^2 area".into(),
        series: vec![
            Series::markers("estimate", pts),
            Series::line("1/2pi", vec![(k0, 1.0 / TAU), (k1, 1.0 / TAU)]),
        ],
    };
    Ok((vec![t], json!({ "options": opts }), plot))
}

fn spitzer(cfg: &ExperimentConfig) -> Result<Output> {
    let m = cfg.bm_resolution.expect("validated");
    let zs = cfg.z();
    let eps = &cfg.epsilon;
    // one path per sample, tested against every (epsilon, z)
    let hits = ordered_map(cfg.workers, cfg.samples, |i| {
        let p = gen_bm::<f64>(m, sample_seed(cfg.seed, i))?;
        let mut h = Vec::with_capacity(eps.len() * zs.len());
        for &e in eps {
            for &z in &zs {
                h.push(sausage_contains_refined(&p, e, z)?);
            }
        }
        Ok(h)
    })?;
    let mut t = Table::new(
        "",
        &[
            "epsilon",
            "z_re",
            "z_im",
            "paths",
            "m",
            "p_hat",
            "scaled_estimate",
            "ci_lo",
            "ci_hi",
            "target",
        ],
    );
    let mut series = Vec::new();
    for (a, &e) in eps.iter().enumerate() {
        for (b, &z) in zs.iter().enumerate() {
            let j = a * zs.len() + b;
            let scale = e.ln().abs();
            let s = hits
                .iter()
                .map(|h| if h[j] { scale } else { 0.0 })
                .collect::<Welford>()
                .summary();
            let [lo, hi] = ci_cells(&s);
            let target = spitzer_target(z)?;
            t.push(vec![
                e.into(),
                z.x.into(),
                z.y.into(),
                s.count.into(),
                m.into(),
                (s.mean / scale).into(),
                s.mean.into(),
                lo,
                hi,
                target.into(),
            ]);
            series.push(Series::markers(
                format!("eps = {e}, |z| = {}", z.norm()),
                vec![(scale, s.mean)],
            ));
            series.push(Series::line(
                "target",
                vec![(scale - 0.5, target), (scale + 0.5, target)],
            ));
        }
    }
    let plot = Plot {
        title: "Sausage hitting probability".into(),
        x_label: "|ln eps|".into(),
        y_label: "|ln eps| P[z in W_eps]".into(),
        series,
    };
    Ok((vec![t], json!({}), plot))
}

#[derive(Clone, Debug, Default)]
struct CensusSample {
    small: usize,
    medium: usize,
    large: usize,
    crossings: usize,
    escape_trials: usize,
    escape_successes: usize,
    violation: bool,
    weights: WeightStats,
}

fn census(cfg: &ExperimentConfig) -> Result<Output> {
    let mut t = Table::new(
        "",
        &[
            "n",
            "z_re",
            "z_im",
            "samples",
            "mean_small",
            "var_small",
            "ci_lo",
            "ci_hi",
            "mean_medium",
            "mean_large",
            "mean_crossings",
            "escape_fraction",
            "residual_violations",
        ],
    );
    let mut pooled = WeightStats::default();
    let mut fit_points: Vec<Vec<(f64, f64)>> = Vec::new();
    for z in cfg.z() {
        let frame = build_frame(z, cfg.lattice)?;
        let mut pts = Vec::new();
        for &n in &cfg.n_values {
            let params = ScaleParams::new(cfg.lattice, n, cfg.c0)?;
            let samples = ordered_map(cfg.workers, cfg.samples, |i| {
                let path = gen_walk(cfg.lattice, n, sample_seed(cfg.seed, i))?;
                let set = classify(decompose(&path, &frame)?, &params, &path);
                let mut c = CensusSample {
                    violation: set.residual > set.residual_bound,
                    ..Default::default()
                };
                for e in &set.excursions {
                    match e.class {
                        ExcursionClass::Small => c.small += 1,
                        ExcursionClass::Medium => c.medium += 1,
                        ExcursionClass::Large => c.large += 1,
                        ExcursionClass::Unclassified => {}
                    }
                }
                if let Some(s) = set.summary {
                    c.crossings = s.crossings;
                    c.escape_trials = s.escape_trials;
                    c.escape_successes = s.escape_successes;
                }
                c.weights.add(&set);
                Ok(c)
            })?;
            let small = samples
                .iter()
                .map(|c| c.small as f64)
                .collect::<Welford>()
                .summary();
            let mean = |f: fn(&CensusSample) -> usize| {
                samples.iter().map(|c| f(c) as f64).sum::<f64>() / samples.len() as f64
            };
            let trials: usize = samples.iter().map(|c| c.escape_trials).sum();
            let successes: usize = samples.iter().map(|c| c.escape_successes).sum();
            let violations = samples.iter().filter(|c| c.violation).count();
            for c in &samples {
                pooled.merge(&c.weights);
            }
            let [lo, hi] = ci_cells(&small);
            t.push(vec![
                n.into(),
                z.x.into(),
                z.y.into(),
                small.count.into(),
                small.mean.into(),
                small.variance.into(),
                lo,
                hi,
                mean(|c| c.medium).into(),
                mean(|c| c.large).into(),
                mean(|c| c.crossings).into(),
                if trials > 0 {
                    Cell::Float(successes as f64 / trials as f64)
                } else {
                    Cell::Empty
                },
                violations.into(),
            ]);
            if small.mean > 0.0 {
                pts.push(((n as f64).ln().ln(), small.mean.ln()));
            }
        }
        fit_points.push(pts);
    }
    let fits: Vec<Option<LineFit>> = fit_points
        .iter()
        .map(|p| {
            let (x, y): (Vec<f64>, Vec<f64>) = p.iter().copied().unzip();
            fit_line(&x, &y)
        })
        .collect();
    let mut w = Table::new(
        "weights",
        &[
            "class",
            "plus",
            "minus",
            "zero",
            "mean_weight",
            "std_error",
            "clustered_std_error",
            "p_value",
        ],
    );
    let classes = std::iter::once(("all", &pooled.overall))
        .chain(pooled.by_class.iter().map(|(c, s)| (c.name(), s)));
    for (name, s) in classes {
        let (m, se) = s.mean_weight();
        let (_, cse) = s.mean_weight_clustered();
        w.push(vec![
            name.into(),
            s.plus.into(),
            s.minus.into(),
            s.zero.into(),
            m.into(),
            se.into(),
            cse.into(),
            s.p_value().into(),
        ]);
    }
    let derived = json!({
        "small_count_exponent": fits.iter().map(|f| f.map(|f| f.slope)).collect::<Vec<_>>(),
        "small_count_fits": fits,
        "pooled_excursions": pooled.overall.plus + pooled.overall.minus + pooled.overall.zero,
    });
    let plot = Plot {
        title: "Small excursions".into(),
        x_label: "ln ln n".into(),
        y_label: "ln E[#small]".into(),
        series: fit_points
            .into_iter()
            .enumerate()
            .map(|(i, p)| Series::markers(format!("z{i}"), p))
            .collect(),
    };
    Ok((vec![t, w], derived, plot))
}

fn dehn(cfg: &ExperimentConfig) -> Result<Output> {
    let averaged = cfg.experiment == ExperimentKind::DehnAvg;
    let d = if averaged { 2 } else { cfg.d };
    let mut t = Table::new(
        "",
        &[
            "n",
            "d",
            "samples",
            "mean_bound",
            "ci_low",
            "ci_high",
            "seed",
        ],
    );
    let mut xs = Vec::new();
    let mut means = Vec::new();
    for &n in &cfg.n_values {
        let v = ordered_map(cfg.workers, cfg.samples, |i| {
            let seed = sample_seed(cfg.seed, i);
            if averaged {
                rnd_dehn_lower(&bridge_word(n, seed)?)
            } else {
                rnd_dehn_lower(&Word::random(n, d, seed)?)
            }
        })?;
        let s = v.into_iter().collect::<Welford>().summary();
        let [lo, hi] = ci_cells(&s);
        t.push(vec![
            n.into(),
            d.into(),
            s.count.into(),
            s.mean.into(),
            lo,
            hi,
            cfg.seed.into(),
        ]);
        means.push(s.mean);
        xs.push(n);
    }
    // c in mean ~ c n ln ln n, least squares through the origin
    let usable: Vec<(f64, f64)> = xs
        .iter()
        .zip(&means)
        .filter(|(&n, _)| n >= 3)
        .map(|(&n, &m)| (n as f64 * lnln(n), m))
        .collect();
    let sxx: f64 = usable.iter().map(|p| p.0 * p.0).sum();
    let c = (sxx > 0.0).then(|| usable.iter().map(|p| p.0 * p.1).sum::<f64>() / sxx);
    let per_n: Vec<f64> = xs
        .iter()
        .zip(&means)
        .map(|(&n, m)| m / n.max(1) as f64)
        .collect();
    let derived = json!({
        "c_fit": c,
        "mean_over_n": per_n,
        "mean_over_n_increasing": per_n.windows(2).all(|w| w[1] > w[0]),
    });
    let plot = Plot {
        title: if averaged {
            "Averaged Dehn lower bound"
        } else {
            "Random Dehn lower bound"
        }
        .into(),
        x_label: "log2 n".into(),
        y_label: "mean bound / n".into(),
        series: vec![Series::markers(
            format!("d = {d}"),
            xs.iter()
                .zip(&per_n)
                .map(|(&n, y)| ((n.max(1) as f64).log2(), *y))
                .collect(),
        )],
    };
    Ok((vec![t], derived, plot))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_scaling_fit() {
        let ns = [1usize << 10, 1 << 12, 1 << 14, 1 << 16];
        let means: Vec<f64> = ns
            .iter()
            .map(|&n| n as f64 * (0.1 + lnln(n) / TAU))
            .collect();
        let f = scaling_fit(&ns, &means).unwrap();
        assert!((f.b - 1.0 / TAU).abs() < 1e-9);
        assert!((f.a - 0.1).abs() < 1e-9);
        let flat: Vec<f64> = ns.iter().map(|&n| 0.3 * n as f64).collect();
        assert!(scaling_fit(&ns, &flat).unwrap().b.abs() < 1e-12);
        assert!(scaling_fit(&ns[..2], &flat[..2]).is_err());
    }

    #[test]
    fn sech_law() {
        assert_relative_eq!(sech_cdf(0.0), 0.5);
        assert_relative_eq!(sech_cdf(1.3) + sech_cdf(-1.3), 1.0, epsilon = 1e-15);
        let r = belisle_statistic(&[0.0; 50]);
        assert_relative_eq!(r.ks, 0.5);
        let sym: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.1).collect();
        assert_eq!(belisle_statistic(&sym).quantiles[2].1, 0.0);
    }

    #[test]
    fn ordered_map_is_worker_independent() {
        let f = |i: u64| Ok(sample_seed(5, i) as f64);
        let a = ordered_map(1, 100, f).unwrap();
        let b = ordered_map(4, 100, f).unwrap();
        assert_eq!(a, b);
    }
}
