//! Areas of the level sets of the winding angle of an open path.
//!
//! For `z` off a polyline, `theta(z) = 2 pi i(z) - c(z)`, where `i` is the
//! index of the path closed by its chord and `c` in `(-pi, pi)` is the angle
//! the chord subtends. Hence `floor(theta / 2 pi) = i - [c > 0]`, and `c > 0`
//! exactly on the left of the chord's line. Along a horizontal line both
//! terms are piecewise constant.
//!
//! [`polygon_level_areas`] measures the level sets of the sampled polyline
//! exactly along stratified rows. [`werner_path_areas`] estimates them for
//! the continuous path: it adds, at stratified points, the correction from
//! bridge-refining the segments near each point, which is what resolves the
//! high levels (they live extremely close to the path).

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{subtended_angle, Point};
use crate::rng::{mix64, sample_seed};
use crate::stats::{Summary, Welford};

use super::angle::{near_origin, segment_angle, REACH};
use super::path::{gen_bm, BmPath, Refiner};

/// Options for [`polygon_level_areas`].
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelAreaOptions {
    /// Number of stratified rows across the path's bounding box.
    pub rows: usize,
    /// Each sample segment is split into `2^refine_levels` bridge pieces.
    pub refine_levels: u32,
}

impl Default for LevelAreaOptions {
    fn default() -> Self {
        LevelAreaOptions {
            rows: 4096,
            refine_levels: 0,
        }
    }
}

/// Area of `{z : floor(theta(z) / 2pi) = k}` for each `k >= 1` in `ks`,
/// `theta` being the angle swept by the sample polyline.
pub fn polygon_level_areas(
    path: &BmPath<f64>,
    ks: &[i64],
    opts: LevelAreaOptions,
) -> Result<Vec<f64>> {
    if opts.rows == 0 {
        return Err(Error::arg("rows", "must be positive"));
    }
    check_levels(ks)?;
    let pts = refined_points(path, opts.refine_levels);
    let start = pts[0];
    let end = *pts.last().expect("nonempty");
    let (mut y0, mut y1) = (f64::INFINITY, f64::NEG_INFINITY);
    for p in &pts {
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    let mut out = vec![0.0; ks.len()];
    if y1 <= y0 {
        return Ok(out);
    }
    let rows = opts.rows;
    let h = (y1 - y0) / rows as f64;
    let key = mix64(path.seed.unwrap_or(0) ^ 0x5745_524e_4552);
    let row_y: Vec<f64> = (0..rows)
        .map(|j| {
            let u = (mix64(key ^ j as u64) >> 11) as f64 / (1u64 << 53) as f64;
            y0 + (j as f64 + u) * h
        })
        .collect();

    // segments (path plus closing chord) bucketed by the rows they may cross
    let mut segs: Vec<(Point<f64>, Point<f64>)> = pts.windows(2).map(|w| (w[0], w[1])).collect();
    if end != start {
        segs.push((end, start));
    }
    let row_range = |a: f64, b: f64| {
        let lo = (((a.min(b) - y0) / h).floor().max(0.0) as usize).min(rows - 1);
        let hi = (((a.max(b) - y0) / h).floor().max(0.0) as usize).min(rows - 1);
        (lo, hi)
    };
    let mut offsets = vec![0usize; rows + 1];
    for (a, b) in &segs {
        let (lo, hi) = row_range(a.y, b.y);
        for j in lo..=hi {
            offsets[j + 1] += 1;
        }
    }
    for j in 0..rows {
        offsets[j + 1] += offsets[j];
    }
    let mut fill = offsets.clone();
    let mut members = vec![0u32; offsets[rows]];
    for (s, (a, b)) in segs.iter().enumerate() {
        let (lo, hi) = row_range(a.y, b.y);
        for j in lo..=hi {
            members[fill[j]] = s as u32;
            fill[j] += 1;
        }
    }

    let d = start - end;
    let kmin = *ks.iter().min().unwrap_or(&0);
    let kmax = *ks.iter().max().unwrap_or(&0);
    let mut len_by_k = vec![0.0; (kmax - kmin + 1).max(0) as usize];
    let mut xs: Vec<(f64, i64)> = Vec::new();
    for (j, &y) in row_y.iter().enumerate() {
        xs.clear();
        for &s in &members[offsets[j]..offsets[j + 1]] {
            let (a, b) = segs[s as usize];
            if (a.y <= y && y < b.y) || (b.y <= y && y < a.y) {
                let x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
                xs.push((x, if b.y > a.y { 1 } else { -1 }));
            }
        }
        if xs.is_empty() {
            continue;
        }
        xs.sort_by(|p, q| p.0.total_cmp(&q.0));
        // left of the chord's line: cross(d, z - end) > 0
        let left = |x: f64| d.x * (y - end.y) - d.y * (x - end.x) > 0.0;
        let split = (d.y != 0.0).then(|| end.x + (y - end.y) * d.x / d.y);
        let mut idx = 0i64;
        for w in xs.windows(2) {
            idx -= w[0].1;
            let (xa, xb) = (w[0].0, w[1].0);
            if xb <= xa {
                continue;
            }
            let mut add = |lo: f64, hi: f64| {
                let q = idx - left(0.5 * (lo + hi)) as i64;
                if q >= kmin && q <= kmax {
                    len_by_k[(q - kmin) as usize] += hi - lo;
                }
            };
            match split {
                Some(xs_) if xs_ > xa && xs_ < xb => {
                    add(xa, xs_);
                    add(xs_, xb);
                }
                _ => add(xa, xb),
            }
        }
    }
    for (o, &k) in out.iter_mut().zip(ks) {
        *o = len_by_k[(k - kmin) as usize] * h;
    }
    Ok(out)
}

fn check_levels(ks: &[i64]) -> Result<()> {
    if ks.iter().any(|&k| k < 1) {
        return Err(Error::arg("k", "levels must be at least 1"));
    }
    Ok(())
}

/// Options for [`werner_path_areas`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerOptions {
    /// Stratified rows across the bounding box of the path.
    pub rows: usize,
    /// Stratified points per row.
    pub points_per_row: usize,
    /// Bridge refinement depth cap near each point.
    pub max_refine_depth: u32,
}

impl Default for WernerOptions {
    fn default() -> Self {
        WernerOptions {
            rows: 256,
            points_per_row: 4,
            max_refine_depth: 160,
        }
    }
}

/// Stratified estimate of `area{z : floor(theta(z) / 2pi) = k}` for one
/// path, `theta` being the angle swept by the continuous path around `z`.
///
/// Each point's angle equals [`bm_winding_angle`](super::bm_winding_angle)
/// with depth `max_refine_depth`, up to rounding. Points that land on a
/// refined leaf are dropped.
pub fn werner_path_areas(path: &BmPath<f64>, ks: &[i64], opts: WernerOptions) -> Result<Vec<f64>> {
    check_levels(ks)?;
    if opts.rows == 0 || opts.points_per_row == 0 {
        return Err(Error::arg("rows", "need at least one point"));
    }
    let pts = path.samples();
    let m = path.m();
    let dt = 1.0 / m as f64;
    let start = pts[0];
    let end = pts[m];
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for p in pts {
        x0 = x0.min(p.x);
        x1 = x1.max(p.x);
        y0 = y0.min(p.y);
        y1 = y1.max(p.y);
    }
    // the continuous path strays a little past its samples
    let margin = if path.seed.is_some() {
        4.0 * dt.sqrt()
    } else {
        0.0
    };
    let (x0, x1, y0, y1) = (x0 - margin, x1 + margin, y0 - margin, y1 + margin);
    let (rows, cols) = (opts.rows, opts.points_per_row);
    let (h, w) = ((y1 - y0) / rows as f64, (x1 - x0) / cols as f64);
    if !(h > 0.0 && w > 0.0) {
        return Ok(vec![0.0; ks.len()]);
    }
    let key = mix64(path.seed.unwrap_or(0) ^ 0x5745_524e_4552);
    let unit =
        |a: u64, b: u64| (mix64(key ^ mix64(a ^ mix64(b))) >> 11) as f64 / (1u64 << 53) as f64;
    let zs: Vec<Point<f64>> = (0..rows)
        .flat_map(|j| {
            let y = y0 + (j as f64 + unit(j as u64, u64::MAX)) * h;
            (0..cols).map(move |i| (i, y))
        })
        .enumerate()
        .map(|(q, (i, y))| Point::new(x0 + (i as f64 + unit(q as u64, 0)) * w, y))
        .collect();

    // polygon angle: index of the chord-closed polyline minus the chord's angle
    let mut theta = vec![0.0f64; zs.len()];
    let mut segs: Vec<(Point<f64>, Point<f64>)> = pts.windows(2).map(|p| (p[0], p[1])).collect();
    if end != start {
        segs.push((end, start));
    }
    let band = |y: f64| (((y - y0) / h).floor().max(0.0) as usize).min(rows - 1);
    let mut by_row: Vec<Vec<u32>> = vec![Vec::new(); rows];
    for (s, (a, b)) in segs.iter().enumerate() {
        for r in by_row[band(a.y.min(b.y))..=band(a.y.max(b.y))].iter_mut() {
            r.push(s as u32);
        }
    }
    let mut xs: Vec<(f64, i64)> = Vec::new();
    for j in 0..rows {
        let row = &zs[j * cols..(j + 1) * cols];
        let y = row[0].y;
        xs.clear();
        for &s in &by_row[j] {
            let (a, b) = segs[s as usize];
            if (a.y <= y && y < b.y) || (b.y <= y && y < a.y) {
                let x = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
                xs.push((x, if b.y > a.y { 1 } else { -1 }));
            }
        }
        xs.sort_by(|p, q| p.0.total_cmp(&q.0));
        // suffix sums: index at x is the signed count of crossings to its right
        let mut right = vec![0i64; xs.len() + 1];
        for c in (0..xs.len()).rev() {
            right[c] = right[c + 1] + xs[c].1;
        }
        for (q, z) in row.iter().enumerate() {
            let c = xs.partition_point(|p| p.0 <= z.x);
            let chord = if end != start {
                subtended_angle(end, start, *z).unwrap_or(0.0)
            } else {
                0.0
            };
            theta[j * cols + q] = TAU * right[c] as f64 - chord;
        }
    }

    // replace the straight angle of every segment near a point by its refined angle
    let mut valid = vec![true; zs.len()];
    if path.seed.is_some() && opts.max_refine_depth > 0 {
        let refiner = Refiner::new(path);
        let g = 2.0 * REACH * dt.sqrt();
        let (nx, ny) = (
            ((x1 - x0) / g).ceil() as usize + 1,
            ((y1 - y0) / g).ceil() as usize + 1,
        );
        let cell = |p: Point<f64>| {
            let cx = (((p.x - x0) / g).floor().max(0.0) as usize).min(nx - 1);
            let cy = (((p.y - y0) / g).floor().max(0.0) as usize).min(ny - 1);
            (cx, cy)
        };
        let mut head = vec![u32::MAX; nx * ny];
        let mut next = vec![u32::MAX; zs.len()];
        for (q, z) in zs.iter().enumerate() {
            let (cx, cy) = cell(*z);
            next[q] = head[cy * nx + cx];
            head[cy * nx + cx] = q as u32;
        }
        for (k, p) in pts.windows(2).enumerate() {
            let (a, b) = (p[0], p[1]);
            let reach = a.dist(&b).max(REACH * dt.sqrt());
            let lo = cell(Point::new(a.x.min(b.x) - reach, a.y.min(b.y) - reach));
            let hi = cell(Point::new(a.x.max(b.x) + reach, a.y.max(b.y) + reach));
            for cy in lo.1..=hi.1 {
                for cx in lo.0..=hi.0 {
                    let mut q = head[cy * nx + cx];
                    while q != u32::MAX {
                        let z = zs[q as usize];
                        if valid[q as usize] && near_origin(a - z, b - z, dt) {
                            let straight = subtended_angle(a, b, z);
                            let refined =
                                segment_angle(&refiner, k, a, b, z, dt, opts.max_refine_depth);
                            match (straight, refined) {
                                (Some(s), Some((r, _))) => theta[q as usize] += r - s,
                                _ => valid[q as usize] = false,
                            }
                        }
                        q = next[q as usize];
                    }
                }
            }
        }
    }

    let da = h * w;
    let mut out = vec![0.0; ks.len()];
    for (t, ok) in theta.iter().zip(&valid) {
        if !ok {
            continue;
        }
        let level = (t / TAU).floor() as i64;
        for (o, &k) in out.iter_mut().zip(ks) {
            if k == level {
                *o += da;
            }
        }
    }
    Ok(out)
}

/// `k^2 * area` statistics for one level over independent paths.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerEstimate {
    pub k: i64,
    pub scaled_area: Summary,
}

/// Estimates `k^2 * area{theta in [2 pi k, 2 pi (k + 1))}` for each `k` from
/// `paths` Brownian motions with `m` steps; path `i` has seed
/// `sample_seed(seed, i)`.
pub fn werner_area_estimate(
    ks: &[i64],
    paths: usize,
    m: usize,
    seed: u64,
    opts: WernerOptions,
) -> Result<Vec<WernerEstimate>> {
    check_levels(ks)?;
    let mut acc = vec![Welford::new(); ks.len()];
    for i in 0..paths {
        let p = gen_bm::<f64>(m, sample_seed(seed, i as u64))?;
        let a = werner_path_areas(&p, ks, opts)?;
        for ((w, &k), x) in acc.iter_mut().zip(ks).zip(a) {
            w.push((k * k) as f64 * x);
        }
    }
    Ok(ks
        .iter()
        .zip(acc)
        .map(|(&k, w)| WernerEstimate {
            k,
            scaled_area: w.summary(),
        })
        .collect())
}

fn refined_points(path: &BmPath<f64>, levels: u32) -> Vec<Point<f64>> {
    if levels == 0 || path.seed.is_none() {
        return path.samples().to_vec();
    }
    let refiner = Refiner::new(path);
    let dt = 1.0 / path.m() as f64;
    let mut out = Vec::with_capacity((path.m() << levels) + 1);
    out.push(path.samples()[0]);
    for (k, w) in path.samples().windows(2).enumerate() {
        refiner.refine(
            k as u64,
            1,
            w[0],
            w[1],
            dt,
            0,
            &mut |_, _, _, depth| depth < levels,
            &mut |_, b| out.push(b),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::bm_winding_angle;
    use crate::brownian::path::BmKind;
    use std::f64::consts::PI;

    fn circle(turns: usize, n: usize) -> BmPath<f64> {
        let mut pts: Vec<_> = (0..=n * turns)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        // exactly closed, so theta is a whole number of turns inside
        pts[n * turns] = pts[0];
        BmPath::from_samples(BmKind::Motion, pts).unwrap()
    }

    #[test]
    fn circle_once() {
        let n = 4096;
        let a = polygon_level_areas(&circle(1, n), &[1, 2], LevelAreaOptions::default()).unwrap();
        // inscribed polygon area
        let poly = 0.5 * n as f64 * (TAU / n as f64).sin();
        assert!((a[0] - poly).abs() < 1e-3, "{a:?}");
        assert_eq!(a[1], 0.0);
    }

    #[test]
    fn circle_twice() {
        let a =
            polygon_level_areas(&circle(2, 2048), &[1, 2], LevelAreaOptions::default()).unwrap();
        assert!(a[0] < 1e-9, "{a:?}");
        assert!((a[1] - PI).abs() < 1e-2);
    }

    #[test]
    fn open_arc_levels() {
        // three quarters of a circle: theta is in (0, 2pi) inside the disc
        let n = 3000;
        let pts: Vec<_> = (0..=n)
            .map(|k| {
                let t = 1.5 * PI * k as f64 / n as f64;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        let p = BmPath::from_samples(BmKind::Motion, pts).unwrap();
        let a = polygon_level_areas(&p, &[1], LevelAreaOptions::default()).unwrap();
        assert!(a[0] < 1e-9);
        assert!(polygon_level_areas(&p, &[0, 1], LevelAreaOptions::default()).is_err());
    }

    #[test]
    fn refinement_keeps_samples() {
        let p = gen_bm::<f64>(100, 5).unwrap();
        let r = refined_points(&p, 3);
        assert_eq!(r.len(), 801);
        for (k, s) in p.samples().iter().enumerate() {
            assert_eq!(r[8 * k], *s);
        }
    }

    #[test]
    fn pointwise_angles_match_direct_winding() {
        // reconstruct the sample points and compare levels point by point
        let p = gen_bm::<f64>(3000, 11).unwrap();
        let opts = WernerOptions {
            rows: 64,
            points_per_row: 8,
            max_refine_depth: 40,
        };
        let ks: Vec<i64> = (1..6).collect();
        let a = werner_path_areas(&p, &ks, opts).unwrap();
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for s in p.samples() {
            x0 = x0.min(s.x);
            x1 = x1.max(s.x);
            y0 = y0.min(s.y);
            y1 = y1.max(s.y);
        }
        let mg = 4.0 * (1.0f64 / 3000.0).sqrt();
        let (x0, x1, y0, y1) = (x0 - mg, x1 + mg, y0 - mg, y1 + mg);
        let (h, w) = ((y1 - y0) / 64.0, (x1 - x0) / 8.0);
        let key = mix64(11 ^ 0x5745_524e_4552);
        let unit =
            |a: u64, b: u64| (mix64(key ^ mix64(a ^ mix64(b))) >> 11) as f64 / (1u64 << 53) as f64;
        let mut direct = vec![0.0; 5];
        for j in 0..64u64 {
            let y = y0 + (j as f64 + unit(j, u64::MAX)) * h;
            for i in 0..8u64 {
                let q = j * 8 + i;
                let z = Point::new(x0 + (i as f64 + unit(q, 0)) * w, y);
                let t = bm_winding_angle(&p, z, 40).unwrap().angle;
                let level = (t / TAU).floor() as i64;
                if (1..6).contains(&level) {
                    direct[(level - 1) as usize] += h * w;
                }
            }
        }
        for (x, y) in a.iter().zip(&direct) {
            assert!((x - y).abs() < 1e-12, "{a:?} {direct:?}");
        }
    }

    #[test]
    fn unrefined_estimate_tracks_polygon_sweep() {
        let p = gen_bm::<f64>(2000, 3).unwrap();
        let ks = [1, 2];
        let exact = polygon_level_areas(
            &p,
            &ks,
            LevelAreaOptions {
                rows: 1 << 14,
                refine_levels: 0,
            },
        )
        .unwrap();
        let est = werner_path_areas(
            &p,
            &ks,
            WernerOptions {
                rows: 512,
                points_per_row: 512,
                max_refine_depth: 0,
            },
        )
        .unwrap();
        assert!((exact[0] - est[0]).abs() < 0.01, "{exact:?} {est:?}");
        assert!((exact[1] - est[1]).abs() < 0.005, "{exact:?} {est:?}");
    }

    #[test]
    fn synthetic_circle_levels() {
        let a = werner_path_areas(
            &circle(1, 4096),
            &[1, 2],
            WernerOptions {
                rows: 400,
                points_per_row: 400,
                max_refine_depth: 50,
            },
        )
        .unwrap();
        assert!((a[0] - PI).abs() < 0.01, "{a:?}");
        assert_eq!(a[1], 0.0);
        assert!(werner_area_estimate(&[0], 1, 10, 0, WernerOptions::default()).is_err());
    }
}
