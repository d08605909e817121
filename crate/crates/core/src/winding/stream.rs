//! Index and winding angle at one point without storing the walk.
//!
//! Consumes the generator exactly as [`gen_walk`] does, so results agree
//! with the stored-path route for the same seed.

use crate::error::Result;
use crate::geom::Point;
use crate::walk::{close_loop, gen_walk, LatticeKind, StepStream, Vertex};

use super::index::{finish_index, point_winding, walk_angle, DyadicPoint, WindingSample};

/// Result of a streamed walk: the index sample and the walk's end point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StreamedWinding {
    pub sample: WindingSample,
    pub end: Vertex,
}

/// Index and walk angle at the Euclidean point `z` (lattice units) of the
/// `n`-step walk with seed `seed`, closed by its chord.
pub fn stream_winding(
    lattice: LatticeKind,
    n: usize,
    seed: u64,
    z: Point<f64>,
) -> Result<StreamedWinding> {
    let zb = lattice.to_basis(z);
    let generic = zb.x.fract() != 0.0
        && zb.y.fract() != 0.0
        && (lattice == LatticeKind::Square || (zb.x + zb.y).fract() != 0.0);
    if !generic || n == 0 {
        // a lattice line through z: fall back to the exact stored-path route
        let lp = close_loop(gen_walk(lattice, n, seed)?);
        let end = lp.path.end();
        return Ok(StreamedWinding {
            sample: point_winding(&lp, z)?,
            end,
        });
    }
    let fx = zb.x.floor() as i64;
    let fy = zb.y.floor() as i64;
    let fs = (zb.x + zb.y).floor() as i64;
    let mut steps = StepStream::new(lattice, seed);
    let mut cur: Vertex = [0, 0];
    let mut count = 0i64;
    for _ in 0..n {
        let s = steps.next_step();
        let next = [cur[0] + s[0], cur[1] + s[1]];
        // lower endpoint of a row-crossing edge decides the crossing
        let lower = match s[1] {
            1 if cur[1] == fy => Some((cur, 1)),
            -1 if next[1] == fy => Some((next, -1)),
            _ => None,
        };
        if let Some((lo, sign)) = lower {
            let right = if s[0] == 0 {
                lo[0] > fx
            } else {
                lo[0] + lo[1] > fs
            };
            if right {
                count += sign;
            }
        }
        cur = next;
    }
    let zq = DyadicPoint::from_basis(zb)?;
    let theta = walk_angle(count, lattice.embed([0, 0]), lattice.embed(cur), z);
    let index = finish_index(lattice, count, (cur, [0, 0]), &zq, z)?;
    Ok(StreamedWinding {
        sample: WindingSample { index, theta },
        end: cur,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matches_stored_path() {
        for lattice in [LatticeKind::Square, LatticeKind::Triangular] {
            for seed in 0..200 {
                let z = Point::new(0.37 + (seed % 7) as f64, -0.61 + (seed % 5) as f64);
                let s = stream_winding(lattice, 300, seed, z).unwrap();
                let lp = close_loop(gen_walk(lattice, 300, seed).unwrap());
                let w = point_winding(&lp, z).unwrap();
                assert_eq!(s.sample.index, w.index);
                assert!((s.sample.theta - w.theta).abs() < 1e-12);
                assert_eq!(s.end, lp.path.end());
            }
        }
    }

    #[test]
    fn lattice_line_falls_back() {
        let z = Point::new(0.5, 3.0);
        let s = stream_winding(LatticeKind::Square, 100, 9, z);
        let lp = close_loop(gen_walk(LatticeKind::Square, 100, 9).unwrap());
        match (s, point_winding(&lp, z)) {
            (Ok(a), Ok(b)) => assert_eq!(a.sample, b),
            (Err(_), Err(_)) => {}
            other => panic!("{other:?}"),
        }
    }
}
