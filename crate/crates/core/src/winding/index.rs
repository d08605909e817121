//! Exact point indices by signed crossing counts.
//!
//! A query point is converted to a dyadic rational in lattice coordinates,
//! so on-curve detection and ray crossings are decided in integer arithmetic.
//! The ray is horizontal to the right with the half-open rule
//! `y_lo <= z_y < y_hi`; upward crossings count `+1`, giving positive indices
//! to counterclockwise loops.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::walk::{ClosedLoop, LatticeKind, Vertex, WalkPath};

/// Index of a point with respect to a closed loop.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum PointIndex {
    /// The point is off the loop.
    Regular(i64),
    /// The point lies on the open chord; holds `theta / 2pi - 1/2`, where
    /// `theta` is the walk's winding angle, which is then a half-integer
    /// multiple of `2pi`.
    OnChord(i64),
}

impl PointIndex {
    pub fn value(self) -> i64 {
        match self {
            PointIndex::Regular(k) | PointIndex::OnChord(k) => k,
        }
    }
}

// Fractional bits kept when converting a query coordinate; |coordinate| is
// limited so the crossing tests stay inside i128.
const FRAC_BITS: i32 = 64;
const MAX_ABS_COORD: f64 = (1u64 << 32) as f64;

/// A point `(px / q, py / q)` with `q = 2^FRAC_BITS`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct DyadicPoint {
    px: i128,
    py: i128,
}

const Q: i128 = 1i128 << FRAC_BITS;

fn to_dyadic(v: f64) -> Result<i128> {
    if !v.is_finite() || v.abs() > MAX_ABS_COORD {
        return Err(Error::arg("z", format!("coordinate {v} out of range")));
    }
    // exact when v has at most 64 fractional bits, otherwise rounded to 2^-64
    let (m, e, s) = integer_decode(v);
    if e >= -FRAC_BITS {
        Ok(s as i128 * ((m as i128) << (e + FRAC_BITS)))
    } else {
        Ok((v * Q as f64).round() as i128)
    }
}

fn integer_decode(v: f64) -> (u64, i32, i8) {
    let bits = v.to_bits();
    let sign: i8 = if bits >> 63 == 0 { 1 } else { -1 };
    let exponent = ((bits >> 52) & 0x7ff) as i32;
    let mantissa = if exponent == 0 {
        (bits & 0xf_ffff_ffff_ffff) << 1
    } else {
        (bits & 0xf_ffff_ffff_ffff) | 0x10_0000_0000_0000
    };
    (mantissa, exponent - 1075, sign)
}

impl DyadicPoint {
    /// Converts a point given in lattice (basis) coordinates.
    pub(crate) fn from_basis(p: Point<f64>) -> Result<Self> {
        Ok(DyadicPoint {
            px: to_dyadic(p.x)?,
            py: to_dyadic(p.y)?,
        })
    }

    fn on_segment(&self, u: Vertex, v: Vertex) -> bool {
        let (ux, uy) = (u[0] as i128 * Q, u[1] as i128 * Q);
        let (vx, vy) = (v[0] as i128 * Q, v[1] as i128 * Q);
        let dx = (v[0] - u[0]) as i128;
        let dy = (v[1] - u[1]) as i128;
        let cr = dx * (self.py - uy) - dy * (self.px - ux);
        cr == 0
            && self.px >= ux.min(vx)
            && self.px <= ux.max(vx)
            && self.py >= uy.min(vy)
            && self.py <= uy.max(vy)
    }

    /// Signed crossing of the rightward ray by the segment `u -> v`.
    /// The caller guarantees the point is not on the segment.
    fn crossing(&self, u: Vertex, v: Vertex) -> i64 {
        let uy = u[1] as i128 * Q;
        let vy = v[1] as i128 * Q;
        let dx = (v[0] - u[0]) as i128;
        let dy = (v[1] - u[1]) as i128;
        // (x_int - z_x) * dy * Q
        let s = (u[0] as i128 * Q - self.px) * dy + (self.py - uy) * dx;
        if uy <= self.py && self.py < vy {
            (s > 0) as i64
        } else if vy <= self.py && self.py < uy {
            -((s < 0) as i64)
        } else {
            0
        }
    }
}

/// Angle of `p - z` in `(0, 2pi]`, the branch matched to the half-open rule.
fn ray_angle(p: Point<f64>, z: Point<f64>) -> f64 {
    let a = (p.y - z.y).atan2(p.x - z.x);
    if a <= 0.0 {
        a + TAU
    } else {
        a
    }
}

/// Winding angle of the open walk from its crossing count and end points.
pub(crate) fn walk_angle(crossings: i64, start: Point<f64>, end: Point<f64>, z: Point<f64>) -> f64 {
    ray_angle(end, z) - ray_angle(start, z) + TAU * crossings as f64
}

/// Resolves the index once the walk's crossings are known.
pub(crate) fn finish_index(
    lattice: LatticeKind,
    walk_crossings: i64,
    chord: (Vertex, Vertex),
    zq: &DyadicPoint,
    z: Point<f64>,
) -> Result<PointIndex> {
    let (end, start) = chord;
    if end == start {
        return Ok(PointIndex::Regular(walk_crossings));
    }
    if zq.on_segment(end, start) {
        let theta = walk_angle(walk_crossings, lattice.embed(start), lattice.embed(end), z);
        let half = theta / TAU - 0.5;
        let k = half.round();
        if (half - k).abs() > 1e-6 {
            return Err(Error::Internal(format!(
                "walk angle {theta} is not a half turn multiple on the chord"
            )));
        }
        return Ok(PointIndex::OnChord(k as i64));
    }
    Ok(PointIndex::Regular(
        walk_crossings + zq.crossing(end, start),
    ))
}

/// Index of the Euclidean point `z` with respect to the closed loop.
pub fn point_index(lp: &ClosedLoop, z: Point<f64>) -> Result<PointIndex> {
    let lattice = lp.lattice();
    let zq = DyadicPoint::from_basis(lattice.to_basis(z))?;
    let mut count = 0i64;
    for w in lp.path.vertices().windows(2) {
        if zq.on_segment(w[0], w[1]) {
            return Err(Error::PointOnCurve);
        }
        count += zq.crossing(w[0], w[1]);
    }
    finish_index(lattice, count, lp.chord, &zq, z)
}

/// Index and continuous winding angle at `z` of a closed loop: `theta` is
/// the angle swept by the walk alone.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingSample {
    pub index: PointIndex,
    pub theta: f64,
}

/// As [`point_index`], also returning the walk's winding angle.
pub fn point_winding(lp: &ClosedLoop, z: Point<f64>) -> Result<WindingSample> {
    path_winding(&lp.path, z)
}

/// Index of the path closed by its chord, and the path's winding angle.
pub fn path_winding(path: &WalkPath, z: Point<f64>) -> Result<WindingSample> {
    let lattice = path.lattice;
    let zq = DyadicPoint::from_basis(lattice.to_basis(z))?;
    let mut count = 0i64;
    for w in path.vertices().windows(2) {
        if zq.on_segment(w[0], w[1]) {
            return Err(Error::PointOnCurve);
        }
        count += zq.crossing(w[0], w[1]);
    }
    let theta = walk_angle(
        count,
        lattice.embed(path.start()),
        lattice.embed(path.end()),
        z,
    );
    Ok(WindingSample {
        index: finish_index(lattice, count, (path.end(), path.start()), &zq, z)?,
        theta,
    })
}

/// The chord's contribution to the closed-loop angle: the closed loop
/// satisfies `2pi * index = theta + chord_angle`.
pub fn chord_angle(lattice: LatticeKind, chord: (Vertex, Vertex), z: Point<f64>) -> f64 {
    if chord.0 == chord.1 {
        return 0.0;
    }
    crate::geom::subtended_angle(lattice.embed(chord.0), lattice.embed(chord.1), z).unwrap_or(PI)
}
