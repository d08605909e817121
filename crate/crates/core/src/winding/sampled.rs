//! Deterministic grid-sampling estimate of the integral of `|index|`.
//!
//! Independent of the exact sweep: float ray crossings over Euclidean
//! segments. Sample points sit at `((i + 1/2) h, (j + 1/2) h)`; a sample is
//! dropped when its open `h x h` square meets the loop, so every kept square
//! lies inside one complementary component and contributes exactly.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::walk::ClosedLoop;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampledTotal {
    /// `sum |index| h^2` over kept samples.
    pub value: f64,
    /// Area of the dropped squares.
    pub excluded_area: f64,
    /// Largest `|index|` among kept samples.
    pub max_abs_index: i64,
    /// Bound on the error from dropped squares: `excluded_area * (max_abs_index + 1)`.
    pub slack: f64,
}

/// Visits every kept sample point with its index.
pub fn for_each_sample(
    lp: &ClosedLoop,
    pitch: f64,
    mut f: impl FnMut(Point<f64>, i64),
) -> Result<f64> {
    if !(pitch > 0.0 && pitch.is_finite()) {
        return Err(Error::arg("resolution", "pitch must be positive"));
    }
    let lattice = lp.lattice();
    let segs: Vec<(Point<f64>, Point<f64>)> = lp
        .segments()
        .map(|(a, b)| (lattice.embed(a), lattice.embed(b)))
        .collect();
    let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
    for (a, b) in &segs {
        x0 = x0.min(a.x).min(b.x);
        x1 = x1.max(a.x).max(b.x);
        y0 = y0.min(a.y).min(b.y);
        y1 = y1.max(a.y).max(b.y);
    }
    let h = pitch;
    let half = 0.5 * h;
    let (i0, i1) = ((x0 / h).floor() as i64 - 1, (x1 / h).ceil() as i64 + 1);
    let (j0, j1) = ((y0 / h).floor() as i64 - 1, (y1 / h).ceil() as i64 + 1);

    // rows touched by each segment's band
    let nrows = (j1 - j0 + 1) as usize;
    let mut by_row: Vec<Vec<usize>> = vec![Vec::new(); nrows];
    for (s, (a, b)) in segs.iter().enumerate() {
        let lo = (((a.y.min(b.y) - half) / h - 0.5).floor() as i64).max(j0);
        let hi = (((a.y.max(b.y) + half) / h - 0.5).ceil() as i64).min(j1);
        for j in lo..=hi {
            by_row[(j - j0) as usize].push(s);
        }
    }

    let mut excluded = 0usize;
    let mut crossings: Vec<(f64, i64)> = Vec::new();
    let mut blocked: Vec<(f64, f64)> = Vec::new();
    for j in j0..=j1 {
        let y = (j as f64 + 0.5) * h;
        crossings.clear();
        blocked.clear();
        for &s in &by_row[(j - j0) as usize] {
            let (a, b) = segs[s];
            if (a.y <= y && y < b.y) || (b.y <= y && y < a.y) {
                let xc = a.x + (y - a.y) * (b.x - a.x) / (b.y - a.y);
                crossings.push((xc, if b.y > a.y { 1 } else { -1 }));
            }
            // x-extent of the segment inside the band |y' - y| <= h/2
            let (lo_y, hi_y) = (y - half, y + half);
            let (mut ta, mut tb) = (0.0f64, 1.0f64);
            let dy = b.y - a.y;
            if dy == 0.0 {
                if a.y < lo_y || a.y > hi_y {
                    continue;
                }
            } else {
                let t_lo = (lo_y - a.y) / dy;
                let t_hi = (hi_y - a.y) / dy;
                ta = ta.max(t_lo.min(t_hi));
                tb = tb.min(t_lo.max(t_hi));
                if ta > tb {
                    continue;
                }
            }
            let xa = a.x + ta * (b.x - a.x);
            let xb = a.x + tb * (b.x - a.x);
            blocked.push((xa.min(xb) - half, xa.max(xb) + half));
        }
        crossings.sort_by(|p, q| p.0.total_cmp(&q.0));
        blocked.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut idx: i64 = crossings.iter().map(|c| c.1).sum();
        let (mut ci, mut bi) = (0usize, 0usize);
        for i in i0..=i1 {
            let x = (i as f64 + 0.5) * h;
            while ci < crossings.len() && crossings[ci].0 <= x {
                idx -= crossings[ci].1;
                ci += 1;
            }
            while bi < blocked.len() && blocked[bi].1 < x {
                bi += 1;
            }
            let is_blocked = blocked[bi..]
                .iter()
                .take_while(|b| b.0 <= x)
                .any(|b| b.1 >= x);
            if is_blocked {
                excluded += 1;
            } else {
                f(Point::new(x, y), idx);
            }
        }
    }
    Ok(excluded as f64 * h * h)
}

/// Riemann sum of `|index|` over a grid of pitch `resolution`.
pub fn total_winding_sampled(lp: &ClosedLoop, resolution: f64) -> Result<SampledTotal> {
    let mut sum = 0i64;
    let mut max_abs = 0i64;
    let excluded_area = for_each_sample(lp, resolution, |_, k| {
        sum += k.abs();
        max_abs = max_abs.max(k.abs());
    })?;
    Ok(SampledTotal {
        value: sum as f64 * resolution * resolution,
        excluded_area,
        max_abs_index: max_abs,
        slack: excluded_area * (max_abs + 1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{close_loop, LatticeKind, WalkPath};

    fn lp(v: Vec<[i64; 2]>) -> ClosedLoop {
        close_loop(WalkPath::from_vertices(LatticeKind::Square, v).unwrap())
    }

    #[test]
    fn unit_square_within_band() {
        let t = total_winding_sampled(
            &lp(vec![[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]]),
            1.0 / 16.0,
        )
        .unwrap();
        assert!((t.value - 1.0).abs() <= 4.0 / 16.0, "{t:?}");
        assert!((t.value - 1.0).abs() <= t.slack);
        assert_eq!(t.max_abs_index, 1);
    }

    #[test]
    fn zero_area_loop() {
        let t = total_winding_sampled(
            &lp(vec![[0, 0], [1, 0], [2, 0], [1, 0], [0, 0]]),
            1.0 / 16.0,
        )
        .unwrap();
        assert_eq!(t.value, 0.0);
        assert!(t.excluded_area > 0.0);
    }

    #[test]
    fn bad_pitch() {
        let l = lp(vec![[0, 0], [1, 0]]);
        assert!(total_winding_sampled(&l, 0.0).is_err());
        assert!(total_winding_sampled(&l, f64::NAN).is_err());
    }
}
