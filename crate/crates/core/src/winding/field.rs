//! Exact index fields by row sweeps.
//!
//! Each lattice row (the strip between basis lines `b = r` and `b = r + 1`)
//! is swept along horizontal test lines through the cell test points. Walk
//! edges meet a test line at integer multiples of 1/6, cell test points sit
//! at other residues mod 6, and the chord meets it at an exact rational, so
//! every comparison is integer arithmetic. Only cells whose interior meets
//! the chord are clipped, in exact rationals.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geom::{centroid, clip_left, clip_right, twice_signed_area, Point};
use crate::walk::{ClosedLoop, LatticeKind, Vertex};

/// Shape of a cell: unit squares, or up/down triangles of the triangular lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CellShape {
    Square,
    Up,
    Down,
}

/// A cell named by the lattice coordinates of its lower-left corner.
///
/// Field order gives row-major sorting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CellId {
    pub y: i64,
    pub x: i64,
    pub shape: CellShape,
}

impl CellId {
    pub fn square(x: i64, y: i64) -> Self {
        CellId {
            y,
            x,
            shape: CellShape::Square,
        }
    }

    pub fn triangle(a: i64, b: i64, up: bool) -> Self {
        CellId {
            y: b,
            x: a,
            shape: if up { CellShape::Up } else { CellShape::Down },
        }
    }

    /// Corners in lattice coordinates, counterclockwise.
    pub fn corners(&self) -> Vec<Vertex> {
        let (a, b) = (self.x, self.y);
        match self.shape {
            CellShape::Square => vec![[a, b], [a + 1, b], [a + 1, b + 1], [a, b + 1]],
            CellShape::Up => vec![[a, b], [a + 1, b], [a, b + 1]],
            CellShape::Down => vec![[a + 1, b], [a + 1, b + 1], [a, b + 1]],
        }
    }

    /// The cell containing a point given in lattice coordinates.
    pub fn containing(lattice: LatticeKind, p: Point<f64>) -> Self {
        let (a, b) = (p.x.floor(), p.y.floor());
        match lattice {
            LatticeKind::Square => CellId::square(a as i64, b as i64),
            LatticeKind::Triangular => {
                let up = (p.x - a) + (p.y - b) < 1.0;
                CellId::triangle(a as i64, b as i64, up)
            }
        }
    }

    fn json(&self, index: i64) -> Value {
        match self.shape {
            CellShape::Square => json!([self.x, self.y, index]),
            CellShape::Up => json!([self.x, self.y, "up", index]),
            CellShape::Down => json!([self.x, self.y, "down", index]),
        }
    }
}

fn big(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

fn half() -> BigRational {
    BigRational::new(BigInt::one(), BigInt::from(2))
}

fn rational_str(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

fn rational_f64(q: &BigRational) -> f64 {
    q.to_f64().unwrap_or(f64::NAN)
}

/// An exact area: a rational in lattice (basis) units times the lattice's
/// Euclidean scale (1, or sqrt(3)/2 on the triangular lattice).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactArea {
    pub lattice: LatticeKind,
    pub basis: BigRational,
}

impl ExactArea {
    pub fn zero(lattice: LatticeKind) -> Self {
        ExactArea {
            lattice,
            basis: BigRational::zero(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        rational_f64(&self.basis) * self.lattice.area_scale()
    }

    pub fn to_json(&self) -> Value {
        json!({
            "basis": rational_str(&self.basis),
            "scale": match self.lattice {
                LatticeKind::Square => "1",
                LatticeKind::Triangular => "sqrt(3)/2",
            },
            "value": self.to_f64(),
        })
    }
}

impl fmt::Display for ExactArea {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.lattice {
            LatticeKind::Square => write!(f, "{}", rational_str(&self.basis)),
            LatticeKind::Triangular => write!(f, "{}*sqrt(3)/2", rational_str(&self.basis)),
        }
    }
}

/// Part of a cell cut by the chord.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitCell {
    pub cell: CellId,
    /// Vertices in lattice coordinates, counterclockwise.
    pub polygon: Vec<Point<BigRational>>,
    /// Area in lattice units.
    pub area: BigRational,
    pub index: i64,
}

/// Index of every cell of the complement of a closed loop.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexField {
    pub lattice: LatticeKind,
    cells: Vec<(CellId, i64)>,
    pub split_cells: Vec<SplitCell>,
    twice_signed_area: i128,
}

impl IndexField {
    /// Whole cells with nonzero index, row-major.
    pub fn cells(&self) -> &[(CellId, i64)] {
        &self.cells
    }

    /// Index of a whole cell; `None` for cells cut by the chord.
    pub fn whole_index(&self, cell: CellId) -> Option<i64> {
        if self.split_cells.iter().any(|s| s.cell == cell) {
            return None;
        }
        Some(
            self.cells
                .binary_search_by(|(c, _)| c.cmp(&cell))
                .map_or(0, |i| self.cells[i].1),
        )
    }

    /// Index read off the (sub-)cell containing the Euclidean point `z`.
    pub fn index_at(&self, z: Point<f64>) -> i64 {
        let p = self.lattice.to_basis(z);
        let cell = CellId::containing(self.lattice, p);
        if let Some(k) = self.whole_index(cell) {
            return k;
        }
        let inside = |poly: &[Point<BigRational>]| {
            let n = poly.len();
            (0..n).all(|i| {
                let a = &poly[i];
                let b = &poly[(i + 1) % n];
                let (ax, ay) = (rational_f64(&a.x), rational_f64(&a.y));
                let (bx, by) = (rational_f64(&b.x), rational_f64(&b.y));
                (bx - ax) * (p.y - ay) - (by - ay) * (p.x - ax) >= 0.0
            })
        };
        self.split_cells
            .iter()
            .filter(|s| s.cell == cell)
            .find(|s| inside(&s.polygon))
            .map_or(0, |s| s.index)
    }

    /// Exact area of one whole cell.
    pub fn cell_area(&self) -> ExactArea {
        ExactArea {
            lattice: self.lattice,
            basis: cell_basis_area(self.lattice),
        }
    }

    /// Shoelace area of the loop polygon.
    pub fn signed_area(&self) -> ExactArea {
        ExactArea {
            lattice: self.lattice,
            basis: BigRational::new(BigInt::from(self.twice_signed_area), BigInt::from(2)),
        }
    }

    /// The documented JSON form.
    pub fn to_json(&self) -> Value {
        let cells: Vec<Value> = self.cells.iter().map(|(c, k)| c.json(*k)).collect();
        let split: Vec<Value> = self
            .split_cells
            .iter()
            .map(|s| {
                let poly: Vec<Value> = s
                    .polygon
                    .iter()
                    .map(|p| json!([rational_str(&p.x), rational_str(&p.y)]))
                    .collect();
                json!({
                    "cell": s.cell.json(s.index),
                    "polygon": poly,
                    "area": rational_str(&s.area),
                    "index": s.index,
                })
            })
            .collect();
        let mut v = json!({
            "lattice": self.lattice,
            "cells": cells,
            "split_cells": split,
            "signed_area": self.signed_area().to_json(),
            "cell_area": self.cell_area().to_json(),
        });
        if self.lattice == LatticeKind::Triangular {
            v["extension"] = Value::Bool(true);
        }
        v
    }
}

fn cell_basis_area(lattice: LatticeKind) -> BigRational {
    match lattice {
        LatticeKind::Square => BigRational::one(),
        LatticeKind::Triangular => half(),
    }
}

/// Exact area of each nonzero index value.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexHistogram {
    pub lattice: LatticeKind,
    /// Areas in lattice units; index 0 is never present.
    pub areas: BTreeMap<i64, BigRational>,
}

impl IndexHistogram {
    /// Exact area of `{z : index(z) = k}`; zero for `k = 0` by convention.
    pub fn area(&self, k: i64) -> ExactArea {
        ExactArea {
            lattice: self.lattice,
            basis: self
                .areas
                .get(&k)
                .cloned()
                .unwrap_or_else(BigRational::zero),
        }
    }

    /// `sum_k |k| area(k)`, the integral of the absolute index.
    pub fn total_abs(&self) -> ExactArea {
        let mut acc = BigRational::zero();
        for (k, a) in &self.areas {
            acc += a * big(k.abs());
        }
        ExactArea {
            lattice: self.lattice,
            basis: acc,
        }
    }

    /// `sum_k k area(k)`, which equals the shoelace area.
    pub fn signed_total(&self) -> ExactArea {
        let mut acc = BigRational::zero();
        for (k, a) in &self.areas {
            acc += a * big(*k);
        }
        ExactArea {
            lattice: self.lattice,
            basis: acc,
        }
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .areas
            .iter()
            .map(|(k, a)| {
                let e = ExactArea {
                    lattice: self.lattice,
                    basis: a.clone(),
                };
                json!([k, rational_str(a), e.to_f64()])
            })
            .collect();
        json!({ "lattice": self.lattice, "areas": rows })
    }
}

// ---------------------------------------------------------------------------
// sweep machinery

#[derive(Clone, Copy, Debug)]
struct RowCrossing {
    row: i64,
    /// Lower endpoint's first coordinate.
    a: i64,
    /// Edge from `(a, row)` to `(a - 1, row + 1)`.
    diag: bool,
    sign: i64,
}

#[derive(Clone, Copy)]
struct TestLine {
    /// Height above the row bottom, in sixths.
    t6: i64,
    /// Test point of cell `k` sits at `6k + off` sixths.
    off: i64,
    shape: CellShape,
}

const SQUARE_LINES: [TestLine; 1] = [TestLine {
    t6: 3,
    off: 3,
    shape: CellShape::Square,
}];
const TRIANGULAR_LINES: [TestLine; 2] = [
    TestLine {
        t6: 2,
        off: 2,
        shape: CellShape::Up,
    },
    TestLine {
        t6: 4,
        off: 4,
        shape: CellShape::Down,
    },
];

fn test_lines(lattice: LatticeKind) -> &'static [TestLine] {
    match lattice {
        LatticeKind::Square => &SQUARE_LINES,
        LatticeKind::Triangular => &TRIANGULAR_LINES,
    }
}

#[derive(Clone, Copy, Debug)]
struct Chord {
    c0: Vertex,
    dx: i128,
    dy: i128,
}

impl Chord {
    fn from_loop(lp: &ClosedLoop) -> Option<Chord> {
        let (c0, c1) = lp.chord;
        let dy = (c1[1] - c0[1]) as i128;
        (dy != 0).then_some(Chord {
            c0,
            dx: (c1[0] - c0[0]) as i128,
            dy,
        })
    }

    fn rows(&self) -> std::ops::Range<i64> {
        let y1 = self.c0[1] + self.dy as i64;
        self.c0[1].min(y1)..self.c0[1].max(y1)
    }

    fn sign(&self) -> i64 {
        self.dy.signum() as i64
    }

    /// Crossing with the test line of row `r` in sixths, as `(num, den)`, `den > 0`.
    fn crossing6(&self, r: i64, t6: i64) -> (i128, i128) {
        let num = 6 * self.c0[0] as i128 * self.dy
            + (6 * (r - self.c0[1]) as i128 + t6 as i128) * self.dx;
        if self.dy > 0 {
            (num, self.dy)
        } else {
            (-num, -self.dy)
        }
    }

    /// Twice the signed distance-like side value; positive on the left.
    fn side(&self, p: Vertex) -> i128 {
        self.dx * (p[1] - self.c0[1]) as i128 - self.dy * (p[0] - self.c0[0]) as i128
    }
}

/// One test line of one row.
struct LineSweep {
    off: i64,
    shape: CellShape,
    /// Walk crossings `(position in sixths, sign)`, sorted.
    walk: Vec<(i64, i64)>,
    /// `suffix[i]` is the signed count of `walk[i..]`.
    suffix: Vec<i64>,
    chord: Option<(i128, i128, i64)>,
}

impl LineSweep {
    fn new(row: &[RowCrossing], line: TestLine, chord: Option<&Chord>, r: i64) -> Self {
        let mut walk: Vec<(i64, i64)> = row
            .iter()
            .map(|c| (6 * c.a - if c.diag { line.t6 } else { 0 }, c.sign))
            .collect();
        walk.sort_unstable();
        let mut suffix = vec![0i64; walk.len() + 1];
        for i in (0..walk.len()).rev() {
            suffix[i] = suffix[i + 1] + walk[i].1;
        }
        let chord = chord.filter(|c| c.rows().contains(&r)).map(|c| {
            let (num, den) = c.crossing6(r, line.t6);
            (num, den, c.sign())
        });
        LineSweep {
            off: line.off,
            shape: line.shape,
            walk,
            suffix,
            chord,
        }
    }

    /// Signed count of walk crossings right of `6k + off`.
    fn walk_index_at(&self, k: i64) -> i64 {
        let tau = 6 * k + self.off;
        self.suffix[self.walk.partition_point(|&(p, _)| p < tau)]
    }

    /// Whether the chord crosses right of the test point of cell `k`;
    /// `None` if it passes through it.
    fn chord_right_of(&self, k: i64) -> Option<bool> {
        match self.chord {
            None => Some(false),
            Some((num, den, _)) => {
                let tau = (6 * k + self.off) as i128 * den;
                (num != tau).then_some(num > tau)
            }
        }
    }

    /// Calls `f(k_lo, k_hi, index)` for each maximal run of test points
    /// between consecutive crossings carrying a nonzero index.
    fn intervals(&self, mut f: impl FnMut(i64, i64, i64)) -> Result<()> {
        let mut events: Vec<(i128, i128, i64)> =
            self.walk.iter().map(|&(p, s)| (p as i128, 1, s)).collect();
        if let Some((num, den, s)) = self.chord {
            let at = self.walk.partition_point(|&(p, _)| (p as i128) * den < num);
            events.insert(at, (num, den, s));
        }
        let total: i64 = events.iter().map(|e| e.2).sum();
        if total != 0 {
            return Err(Error::Internal(format!(
                "row crossings do not cancel (net {total})"
            )));
        }
        let off = self.off as i128;
        let mut idx = 0i64;
        for w in events.windows(2) {
            idx -= w[0].2;
            if idx == 0 {
                continue;
            }
            let (n0, d0, _) = w[0];
            let (n1, d1, _) = w[1];
            let lo = Integer::div_floor(&(n0 - off * d0), &(6 * d0)) + 1;
            let hi = Integer::div_ceil(&(n1 - off * d1), &(6 * d1)) - 1;
            if lo <= hi {
                f(lo as i64, hi as i64, idx);
            }
        }
        Ok(())
    }
}

struct Piece {
    /// Vertices relative to the cell's corner `(x, y)`.
    local: Vec<Point<BigRational>>,
    twice_area: BigRational,
    /// True for the piece lying to the left of the chord along rows.
    x_left: bool,
}

struct CutCell {
    cell: CellId,
    pieces: [Piece; 2],
}

fn shapes(lattice: LatticeKind) -> &'static [CellShape] {
    match lattice {
        LatticeKind::Square => &[CellShape::Square],
        LatticeKind::Triangular => &[CellShape::Up, CellShape::Down],
    }
}

/// Cells of row `r` whose interior meets the chord line.
fn cut_cells(lattice: LatticeKind, chord: &Chord, r: i64) -> Vec<CutCell> {
    let (dx, dy) = (chord.dx, chord.dy);
    let (c0x, c0y) = (chord.c0[0] as i128, chord.c0[1] as i128);
    // x of the chord at the row's bottom and top, over dy
    let nb = c0x * dy + (r as i128 - c0y) * dx;
    let nt = nb + dx;
    let (nb, nt, den) = if dy > 0 {
        (nb, nt, dy)
    } else {
        (-nb, -nt, -dy)
    };
    let lo = Integer::div_floor(&nb.min(nt), &den) - 1;
    let hi = Integer::div_ceil(&nb.max(nt), &den);
    let mut out = Vec::new();
    for a in lo as i64..=hi as i64 {
        for &shape in shapes(lattice) {
            let cell = CellId { y: r, x: a, shape };
            let corners = cell.corners();
            let sides: Vec<i128> = corners.iter().map(|&p| chord.side(p)).collect();
            if !(sides.iter().any(|&s| s > 0) && sides.iter().any(|&s| s < 0)) {
                continue;
            }
            let local: Vec<Point<BigRational>> = corners
                .iter()
                .map(|p| Point::new(big(p[0] - a), big(p[1] - r)))
                .collect();
            let origin = Point::new(big(chord.c0[0] - a), big(chord.c0[1] - r));
            let dir = Point::new(
                BigRational::from_integer(BigInt::from(dx)),
                BigRational::from_integer(BigInt::from(dy)),
            );
            let left = clip_left(&local, &origin, &dir);
            let right = clip_right(&local, &origin, &dir);
            let (la, ra) = (twice_signed_area(&left), twice_signed_area(&right));
            debug_assert!(la.is_positive() && ra.is_positive());
            out.push(CutCell {
                cell,
                pieces: [
                    Piece {
                        local: left,
                        twice_area: la,
                        x_left: dy > 0,
                    },
                    Piece {
                        local: right,
                        twice_area: ra,
                        x_left: dy < 0,
                    },
                ],
            });
        }
    }
    out
}

fn row_crossings(lp: &ClosedLoop) -> Vec<RowCrossing> {
    let mut out: Vec<RowCrossing> = lp
        .path
        .vertices()
        .windows(2)
        .filter_map(|w| {
            let (u, v) = (w[0], w[1]);
            let dy = v[1] - u[1];
            if dy == 0 {
                return None;
            }
            let (lo, hi) = if dy > 0 { (u, v) } else { (v, u) };
            Some(RowCrossing {
                row: lo[1],
                a: lo[0],
                diag: lo[0] != hi[0],
                sign: dy,
            })
        })
        .collect();
    out.sort_unstable_by_key(|c| c.row);
    out
}

/// Runs the sweep, handing each row its test lines and cut cells.
fn sweep(
    lp: &ClosedLoop,
    mut visit: impl FnMut(i64, &[RowCrossing], &[LineSweep], Vec<CutCell>) -> Result<()>,
) -> Result<()> {
    let lattice = lp.lattice();
    let chord = Chord::from_loop(lp);
    let crossings = row_crossings(lp);
    for group in crossings.chunk_by(|a, b| a.row == b.row) {
        let r = group[0].row;
        let lines: Vec<LineSweep> = test_lines(lattice)
            .iter()
            .map(|&l| LineSweep::new(group, l, chord.as_ref(), r))
            .collect();
        let cuts = match &chord {
            Some(c) if c.rows().contains(&r) => cut_cells(lattice, c, r),
            _ => Vec::new(),
        };
        visit(r, group, &lines, cuts)?;
    }
    Ok(())
}

/// Index at a point of row `r` given in cell-local coordinates, by direct
/// crossing count.
fn local_index(row: &[RowCrossing], chord: &Chord, cell: CellId, p: &Point<BigRational>) -> i64 {
    let mut idx = 0;
    for c in row {
        let mut pos = big(c.a - cell.x);
        if c.diag {
            pos -= &p.y;
        }
        if pos > p.x {
            idx += c.sign;
        }
    }
    // chord x at height p.y, relative to the cell corner
    let c0x = big(chord.c0[0] - cell.x);
    let c0y = big(chord.c0[1] - cell.y);
    let slope = BigRational::new(BigInt::from(chord.dx), BigInt::from(chord.dy));
    let xc = c0x + (&p.y - c0y) * slope;
    if xc > p.x {
        idx += chord.sign();
    }
    idx
}

/// Exact index field of a closed loop.
pub fn index_field(lp: &ClosedLoop) -> Result<IndexField> {
    let lattice = lp.lattice();
    let chord = Chord::from_loop(lp);
    let mut cells = Vec::new();
    let mut split_cells = Vec::new();
    sweep(lp, |r, row, lines, cuts| {
        for line in lines {
            let mut skip: Vec<i64> = cuts
                .iter()
                .filter(|c| c.cell.shape == line.shape)
                .map(|c| c.cell.x)
                .collect();
            skip.sort_unstable();
            line.intervals(|lo, hi, idx| {
                let mut s = skip.partition_point(|&k| k < lo);
                for k in lo..=hi {
                    if s < skip.len() && skip[s] == k {
                        s += 1;
                        continue;
                    }
                    cells.push((
                        CellId {
                            y: r,
                            x: k,
                            shape: line.shape,
                        },
                        idx,
                    ));
                }
            })?;
        }
        for cut in cuts {
            let chord = chord.as_ref().expect("cut cells imply a chord");
            let line = lines
                .iter()
                .find(|l| l.shape == cut.cell.shape)
                .expect("every shape has a test line");
            let walk_part = line.walk_index_at(cut.cell.x);
            for piece in cut.pieces {
                let c = centroid(&piece.local).expect("cut pieces have positive area");
                let index = local_index(row, chord, cut.cell, &c);
                debug_assert_eq!(index, walk_part + chord.sign() * piece.x_left as i64);
                let shift = Point::new(big(cut.cell.x), big(cut.cell.y));
                split_cells.push(SplitCell {
                    cell: cut.cell,
                    polygon: piece.local.into_iter().map(|p| p + shift.clone()).collect(),
                    area: piece.twice_area * half(),
                    index,
                });
            }
        }
        Ok(())
    })?;
    cells.sort_unstable_by(|a, b| a.0.cmp(&b.0));
    split_cells.sort_by(|a, b| a.cell.cmp(&b.cell));
    Ok(IndexField {
        lattice,
        cells,
        split_cells,
        twice_signed_area: lp.twice_signed_area(),
    })
}

/// Histogram of a materialized field.
pub fn index_histogram(field: &IndexField) -> IndexHistogram {
    let mut counts: HashMap<i64, i128> = HashMap::new();
    for &(_, k) in &field.cells {
        *counts.entry(k).or_default() += 1;
    }
    let mut split: BTreeMap<i64, BigRational> = BTreeMap::new();
    for s in &field.split_cells {
        *split.entry(s.index).or_insert_with(BigRational::zero) += &s.area;
    }
    assemble_histogram(field.lattice, counts, split)
}

fn assemble_histogram(
    lattice: LatticeKind,
    counts: HashMap<i64, i128>,
    mut split: BTreeMap<i64, BigRational>,
) -> IndexHistogram {
    let cell = cell_basis_area(lattice);
    for (k, n) in counts {
        if n != 0 {
            *split.entry(k).or_insert_with(BigRational::zero) +=
                &cell * BigRational::from_integer(BigInt::from(n));
        }
    }
    split.remove(&0);
    split.retain(|_, a| !a.is_zero());
    IndexHistogram {
        lattice,
        areas: split,
    }
}

/// Integral of the absolute index over a materialized field.
pub fn total_winding(field: &IndexField) -> ExactArea {
    index_histogram(field).total_abs()
}

/// The histogram of a loop computed by the sweep without materializing cells.
pub fn winding_histogram(lp: &ClosedLoop) -> Result<IndexHistogram> {
    let lattice = lp.lattice();
    let chord = Chord::from_loop(lp);
    let mut counts: HashMap<i64, i128> = HashMap::new();
    let mut split: BTreeMap<i64, BigRational> = BTreeMap::new();
    sweep(lp, |_, _, lines, cuts| {
        for line in lines {
            line.intervals(|lo, hi, idx| {
                *counts.entry(idx).or_default() += (hi - lo + 1) as i128;
            })?;
        }
        let Some(chord) = chord.as_ref() else {
            return Ok(());
        };
        for cut in cuts {
            let line = lines
                .iter()
                .find(|l| l.shape == cut.cell.shape)
                .expect("every shape has a test line");
            let walk_part = line.walk_index_at(cut.cell.x);
            if let Some(right) = line.chord_right_of(cut.cell.x) {
                let counted = walk_part + chord.sign() * right as i64;
                *counts.entry(counted).or_default() -= 1;
            }
            for piece in cut.pieces {
                let k = walk_part + chord.sign() * piece.x_left as i64;
                *split.entry(k).or_insert_with(BigRational::zero) += piece.twice_area * half();
            }
        }
        Ok(())
    })?;
    Ok(assemble_histogram(lattice, counts, split))
}

/// `sum |index| area` of a loop without materializing its field.
pub fn total_winding_of(lp: &ClosedLoop) -> Result<ExactArea> {
    Ok(winding_histogram(lp)?.total_abs())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::{close_loop, gen_walk, WalkPath};

    fn lp(lattice: LatticeKind, v: Vec<Vertex>) -> ClosedLoop {
        close_loop(WalkPath::from_vertices(lattice, v).unwrap())
    }

    fn unit_square() -> ClosedLoop {
        lp(
            LatticeKind::Square,
            vec![[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]],
        )
    }

    #[test]
    fn unit_square_field() {
        let f = index_field(&unit_square()).unwrap();
        assert_eq!(f.cells(), &[(CellId::square(0, 0), 1)]);
        assert!(f.split_cells.is_empty());
        assert_eq!(f.signed_area().basis, big(1));
        assert_eq!(total_winding(&f).basis, big(1));
        let h = index_histogram(&f);
        assert_eq!(h.areas, BTreeMap::from([(1, big(1))]));
    }

    #[test]
    fn double_wound_square() {
        let l = lp(
            LatticeKind::Square,
            vec![
                [0, 0],
                [1, 0],
                [1, 1],
                [0, 1],
                [0, 0],
                [1, 0],
                [1, 1],
                [0, 1],
                [0, 0],
            ],
        );
        let f = index_field(&l).unwrap();
        assert_eq!(f.cells(), &[(CellId::square(0, 0), 2)]);
        assert_eq!(total_winding(&f).basis, big(2));
        assert_eq!(index_histogram(&f).areas, BTreeMap::from([(2, big(1))]));
    }

    #[test]
    fn chord_splits_cells() {
        // walk (0,0) -> (2,0) -> (2,1); chord back along the diagonal
        let l = lp(LatticeKind::Square, vec![[0, 0], [1, 0], [2, 0], [2, 1]]);
        let f = index_field(&l).unwrap();
        // the chord from (2,1) to (0,0) cuts cells (0,0) and (1,0)
        assert!(f.cells().is_empty());
        assert_eq!(f.split_cells.len(), 4);
        let total = total_winding(&f);
        assert_eq!(total.basis, big(1));
        for s in &f.split_cells {
            let inside = s.index;
            assert!(inside == 0 || inside == 1);
        }
        assert_eq!(winding_histogram(&l).unwrap().total_abs(), total);
    }

    #[test]
    fn split_pieces_sum_to_cell_area() {
        for seed in 0..30 {
            for lattice in [LatticeKind::Square, LatticeKind::Triangular] {
                let f = index_field(&close_loop(gen_walk(lattice, 40, seed).unwrap())).unwrap();
                let mut by_cell: BTreeMap<CellId, BigRational> = BTreeMap::new();
                for s in &f.split_cells {
                    *by_cell.entry(s.cell).or_insert_with(BigRational::zero) += &s.area;
                }
                for a in by_cell.values() {
                    assert_eq!(*a, cell_basis_area(lattice));
                }
            }
        }
    }

    #[test]
    fn fast_histogram_matches_field() {
        for seed in 0..60 {
            for lattice in [LatticeKind::Square, LatticeKind::Triangular] {
                let l = close_loop(gen_walk(lattice, 80, seed).unwrap());
                let f = index_field(&l).unwrap();
                assert_eq!(index_histogram(&f), winding_histogram(&l).unwrap());
            }
        }
    }

    #[test]
    fn triangle_loop() {
        // one up triangle, counterclockwise
        let l = lp(
            LatticeKind::Triangular,
            vec![[0, 0], [1, 0], [0, 1], [0, 0]],
        );
        let f = index_field(&l).unwrap();
        assert_eq!(f.cells(), &[(CellId::triangle(0, 0, true), 1)]);
        let t = total_winding(&f);
        assert_eq!(t.basis, half());
        assert!((t.to_f64() - 3f64.sqrt() / 4.0).abs() < 1e-15);
        assert_eq!(t.to_string(), "1/2*sqrt(3)/2");
    }

    #[test]
    fn json_shape() {
        let v = index_field(&unit_square()).unwrap().to_json();
        assert_eq!(v["lattice"], "square");
        assert_eq!(v["cells"], json!([[0, 0, 1]]));
        assert_eq!(v["split_cells"], json!([]));
        assert_eq!(v["signed_area"]["basis"], "1");
    }
}
