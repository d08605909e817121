use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, subtended_angle, Point};

use super::path::{cast, BmPath, Refiner};

/// Winding angle of a sampled path with the number of inserted midpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmWinding<T> {
    pub angle: T,
    pub refinements: usize,
}

/// Default refinement depth cap.
pub const DEFAULT_REFINE_DEPTH: u32 = 12;

/// Angle swept around `z` by the path (open for motions, closed for bridges).
///
/// A segment passing within its own length, or within `2 sqrt(dt)`, of `z`
/// is split at a conditional bridge midpoint, up to `max_refine_depth`
/// times. Refinement runs in coordinates centred on `z`, so points far
/// closer to the path than the float spacing of its coordinates are still
/// resolved. Synthetic paths are never refined.
pub fn bm_winding_angle<T: Float>(
    path: &BmPath<T>,
    z: Point<T>,
    max_refine_depth: u32,
) -> Result<BmWinding<T>> {
    let refiner = Refiner::new(path);
    let dt = 1.0 / path.m() as f64;
    let max_depth = if path.seed.is_some() {
        max_refine_depth
    } else {
        0
    };
    let mut angle = T::zero();
    let mut refinements = 0usize;
    for (k, w) in path.samples().windows(2).enumerate() {
        match segment_angle(&refiner, k, w[0], w[1], z, dt, max_depth) {
            Some((da, r)) => {
                angle = angle + da;
                refinements += r;
            }
            None if path.seed.is_some() => return Err(Error::Resample),
            None => return Err(Error::PointOnCurve),
        }
    }
    Ok(BmWinding { angle, refinements })
}

/// Angle swept around `z` by sample segment `k` (`a -> b`, duration `dt`)
/// after refinement, with the number of splits; `None` if a leaf passes
/// through `z`.
pub(crate) fn segment_angle<T: Float>(
    refiner: &Refiner,
    k: usize,
    a: Point<T>,
    b: Point<T>,
    z: Point<T>,
    dt: f64,
    max_depth: u32,
) -> Option<(T, usize)> {
    let o = Point::new(T::zero(), T::zero());
    let mut angle = T::zero();
    let mut refinements = 0usize;
    let hit = std::cell::Cell::new(false);
    refiner.refine(
        k as u64,
        1,
        a - z,
        b - z,
        dt,
        0,
        &mut |a, b, dt, depth| {
            let split = !hit.get() && depth < max_depth && near_origin(a, b, dt);
            refinements += split as usize;
            split
        },
        &mut |a, b| match subtended_angle(a, b, o) {
            Some(da) => angle = angle + da,
            None => hit.set(true),
        },
    );
    (!hit.get()).then_some((angle, refinements))
}

/// Bridge spread, in units of `sqrt(dt)`, inside which a segment is split.
/// A bridge strays this far from its chord with probability about
/// `exp(-2 REACH^2)`; with one unit a fixed share of close approaches goes
/// unrefined at every scale and high winding levels come out about 25% low.
pub(crate) const REACH: f64 = 2.0;

/// Split rule: the segment passes within its own length, or within
/// `REACH sqrt(dt)`, of the origin.
pub(crate) fn near_origin<T: Float>(a: Point<T>, b: Point<T>, dt: f64) -> bool {
    let o = Point::new(T::zero(), T::zero());
    point_segment_distance(a, b, o) < a.dist(&b).max(cast(REACH * dt.sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::path::{gen_bm, gen_bridge, BmKind};
    use std::f64::consts::TAU;

    fn circle(n: usize) -> BmPath<f64> {
        let pts = (0..=n)
            .map(|k| {
                let t = TAU * k as f64 / n as f64;
                Point::new(t.cos(), t.sin())
            })
            .collect();
        BmPath::from_samples(BmKind::Bridge, pts).unwrap()
    }

    #[test]
    fn synthetic_circle() {
        let w = bm_winding_angle(&circle(64), Point::new(0.1, -0.2), 12).unwrap();
        assert!((w.angle - TAU).abs() < 1e-9);
        assert_eq!(w.refinements, 0);
        let w = bm_winding_angle(&circle(64), Point::new(3.0, 0.0), 12).unwrap();
        assert!(w.angle.abs() < 1e-9);
    }

    #[test]
    fn far_point_of_small_bridge() {
        let b = gen_bridge::<f64>(1000, 4).unwrap();
        let small = BmPath::from_samples(
            BmKind::Bridge,
            b.samples().iter().map(|p| *p * 0.2).collect(),
        )
        .unwrap();
        let w = bm_winding_angle(&small, Point::new(10.0, 0.0), 12).unwrap();
        assert!(w.angle.abs() < 1e-9);
    }

    #[test]
    fn closed_bridge_is_whole_turns() {
        for seed in 0..20 {
            let b = gen_bridge::<f64>(2000, seed).unwrap();
            let w = bm_winding_angle(&b, Point::new(0.31, -0.17), 10).unwrap();
            let turns = w.angle / TAU;
            assert!((turns - turns.round()).abs() < 1e-9, "{turns}");
        }
    }

    #[test]
    fn depth_self_convergence() {
        let p = gen_bm::<f64>(10_000, 17).unwrap();
        let z = Point::new(0.3, 0.1);
        let a = bm_winding_angle(&p, z, 8).unwrap().angle;
        let b = bm_winding_angle(&p, z, 12).unwrap().angle;
        assert!((a - b).abs() < 0.05, "{a} {b}");
    }

    #[test]
    fn rotation_invariance() {
        let p = gen_bm::<f64>(5000, 23).unwrap();
        let z = Point::new(0.2, -0.4);
        let r = 0.7;
        let a = bm_winding_angle(&p, z, 10).unwrap();
        let b = bm_winding_angle(&p.rotated(r), z.rotate(r), 10).unwrap();
        assert!((a.angle - b.angle).abs() < 1e-8);
    }
}
