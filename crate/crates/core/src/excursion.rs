//! Excursions between the two halves of a line through a point's cell.
//!
//! On the square lattice the line is the slope-one diagonal through the cell
//! center; it meets the lattice only at vertices, so the walk alternates
//! between the halves at integer times. On the triangular lattice the line
//! carries an edge `s` of the triangle containing the point, and the halves
//! are the two rays of that line on either side of `s`.

use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use statrs::distribution::{Binomial, DiscreteCDF};

use crate::error::{Error, Result};
use crate::geom::{subtended_angle, Point};
use crate::walk::{LatticeKind, ScaleParams, Vertex, WalkPath};
use crate::winding::{path_winding, CellId, CellShape};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Half {
    Plus,
    Minus,
}

/// The reference line for a point `z` in the open complement of the lattice.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiagonalFrame {
    pub lattice: LatticeKind,
    /// Euclidean, lattice units.
    pub z: Point<f64>,
    /// Center of the cell containing `z`.
    pub z_hat: Point<f64>,
    pub cell: CellId,
    /// Triangular lattice only: the edge `s` whose line separates the halves.
    pub edge: Option<(Vertex, Vertex)>,
}

impl DiagonalFrame {
    /// Which half a vertex lies on, if any.
    pub fn half(&self, v: Vertex) -> Option<Half> {
        let (cx, cy) = (self.cell.x, self.cell.y);
        match self.edge {
            None => {
                (v[0] - v[1] == cx - cy).then(|| if v[0] > cx { Half::Plus } else { Half::Minus })
            }
            Some((a, _)) => {
                (v[1] == a[1]).then(|| if v[0] > a[0] { Half::Plus } else { Half::Minus })
            }
        }
    }

    /// Point around which excursion weights are measured: `z_hat` on the
    /// square lattice, the midpoint of `s` on the triangular lattice. Each
    /// excursion turns by exactly a half turn around it.
    pub fn pivot(&self) -> Point<f64> {
        match self.edge {
            None => self.z_hat,
            Some((a, b)) => {
                let (p, q) = (self.lattice.embed(a), self.lattice.embed(b));
                p.lerp(&q, 0.5)
            }
        }
    }

    fn is_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.edge
            .is_some_and(|(a, b)| (u == a && v == b) || (u == b && v == a))
    }
}

/// Builds the frame for the Euclidean point `z` (lattice units).
pub fn build_frame(z: Point<f64>, lattice: LatticeKind) -> Result<DiagonalFrame> {
    if !(z.x.is_finite() && z.y.is_finite()) {
        return Err(Error::DegeneratePoint("non-finite coordinates".into()));
    }
    let p = lattice.to_basis(z);
    let on_line = match lattice {
        LatticeKind::Square => p.x.fract() == 0.0 || p.y.fract() == 0.0,
        LatticeKind::Triangular => {
            p.x.fract() == 0.0 || p.y.fract() == 0.0 || (p.x + p.y).fract() == 0.0
        }
    };
    if on_line {
        return Err(Error::DegeneratePoint(format!(
            "({}, {}) lies on a lattice line",
            z.x, z.y
        )));
    }
    let cell = CellId::containing(lattice, p);
    let (a, b) = (cell.x, cell.y);
    let (z_hat, edge) = match cell.shape {
        CellShape::Square => (Point::new(a as f64 + 0.5, b as f64 + 0.5), None),
        CellShape::Up => (
            lattice.embed_f64(Point::new(a as f64 + 1.0 / 3.0, b as f64 + 1.0 / 3.0)),
            Some(([a, b], [a + 1, b])),
        ),
        CellShape::Down => (
            lattice.embed_f64(Point::new(a as f64 + 2.0 / 3.0, b as f64 + 2.0 / 3.0)),
            Some(([a, b + 1], [a + 1, b + 1])),
        ),
    };
    Ok(DiagonalFrame {
        lattice,
        z,
        z_hat,
        cell,
        edge,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ExcursionClass {
    Small,
    Medium,
    Large,
    Unclassified,
}

impl ExcursionClass {
    pub fn name(self) -> &'static str {
        match self {
            ExcursionClass::Small => "small",
            ExcursionClass::Medium => "medium",
            ExcursionClass::Large => "large",
            ExcursionClass::Unclassified => "unclassified",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Excursion {
    pub t_start: usize,
    pub t_end: usize,
    /// `-1/2`, `0` or `+1/2`.
    pub weight: f64,
    pub class: ExcursionClass,
}

/// Counts produced by [`classify`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ClassSummary {
    /// Completed outward crossings of the `2 r_n` to `4 r_n` annulus.
    pub crossings: usize,
    /// Medium excursions starting outside `B(z, 8 r_n)`.
    pub medium_outer: usize,
    /// Medium excursions starting inside `B(z, 8 r_n)`.
    pub medium_inner: usize,
    /// Excursions starting at distance in `[r_n, 8 r_n]`.
    pub escape_trials: usize,
    /// Those of them that leave `B(z, 11 r_n)` before ending.
    pub escape_successes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExcursionSet {
    pub frame: DiagonalFrame,
    pub excursions: Vec<Excursion>,
    /// Square: `|theta_z / 2pi - sum w|`; triangular: `|j_n(z) - sum w|`.
    pub residual: f64,
    /// Bound the residual must satisfy: 2, plus half the traversals of `s`.
    pub residual_bound: f64,
    /// The walk's winding angle around `z`.
    pub theta: f64,
    /// Triangular lattice: number of traversals of `s`.
    pub traversals: Option<usize>,
    pub summary: Option<ClassSummary>,
}

impl ExcursionSet {
    pub fn weight_sum(&self) -> f64 {
        self.excursions.iter().map(|e| e.weight).sum()
    }

    pub fn to_json(&self) -> Value {
        let ex: Vec<Value> = self
            .excursions
            .iter()
            .map(|e| json!([e.t_start, e.t_end, e.weight, e.class.name()]))
            .collect();
        json!({
            "z": [self.frame.z.x, self.frame.z.y],
            "z_hat": [self.frame.z_hat.x, self.frame.z_hat.y],
            "excursions": ex,
            "residual": self.residual,
            "crossings": self.summary.map(|s| s.crossings),
        })
    }
}

/// Splits the walk into excursions between the two halves.
pub fn decompose(path: &WalkPath, frame: &DiagonalFrame) -> Result<ExcursionSet> {
    if path.lattice != frame.lattice {
        return Err(Error::LatticeMismatch(format!(
            "path on {} lattice, frame on {}",
            path.lattice.name(),
            frame.lattice.name()
        )));
    }
    let lattice = path.lattice;
    let v = path.vertices();
    let pivot = frame.pivot();
    let mut excursions = Vec::new();
    let mut last: Option<(Half, usize)> = None;
    for (t, &x) in v.iter().enumerate() {
        let Some(h) = frame.half(x) else { continue };
        match last {
            None => last = Some((h, t)),
            Some((prev, t0)) if prev != h => {
                let traversed = (t0..t).any(|i| frame.is_edge(v[i], v[i + 1]));
                let weight = if traversed {
                    0.0
                } else {
                    let mut angle = 0.0;
                    for i in t0..t {
                        angle +=
                            subtended_angle(lattice.embed(v[i]), lattice.embed(v[i + 1]), pivot)
                                .ok_or_else(|| {
                                    Error::Internal("walk passes through the pivot".into())
                                })?;
                    }
                    let turns = angle / TAU;
                    let w = if turns > 0.0 { 0.5 } else { -0.5 };
                    if (turns - w).abs() >= 0.1 {
                        return Err(Error::Internal(format!(
                            "excursion [{t0}, {t}] turns {turns}, not a half turn"
                        )));
                    }
                    w
                };
                excursions.push(Excursion {
                    t_start: t0,
                    t_end: t,
                    weight,
                    class: ExcursionClass::Unclassified,
                });
                last = Some((h, t));
            }
            Some(_) => {}
        }
    }
    let sum: f64 = excursions.iter().map(|e| e.weight).sum();
    let sample = path_winding(path, frame.z)?;
    let (residual, residual_bound, traversals) = match frame.edge {
        None => ((sample.theta / TAU - sum).abs(), 2.0, None),
        Some(_) => {
            let g = v.windows(2).filter(|w| frame.is_edge(w[0], w[1])).count();
            (
                (sample.index.value() as f64 - sum).abs(),
                2.0 + g as f64 / 2.0,
                Some(g),
            )
        }
    };
    Ok(ExcursionSet {
        frame: frame.clone(),
        excursions,
        residual,
        residual_bound,
        theta: sample.theta,
        traversals,
        summary: None,
    })
}

/// Labels excursions small, medium or large relative to `r_n`.
///
/// The far set is built from the walk: it holds from time 0 until the
/// first entry into `B(z, 2 r_n)`, and again after each subsequent exit
/// from `B(z, 4 r_n)`.
pub fn classify(mut set: ExcursionSet, params: &ScaleParams, path: &WalkPath) -> ExcursionSet {
    let lattice = path.lattice;
    let z = set.frame.z;
    let r = params.r_n;
    let dist: Vec<f64> = path
        .vertices()
        .iter()
        .map(|&x| lattice.embed(x).dist(&z))
        .collect();
    // not_far_prefix[t] = number of times before t outside the far set
    let mut not_far_prefix = Vec::with_capacity(dist.len() + 1);
    not_far_prefix.push(0usize);
    let mut far = true;
    let mut crossings = 0;
    for &d in &dist {
        if far && d < 2.0 * r {
            far = false;
        } else if !far && d > 4.0 * r {
            far = true;
            crossings += 1;
        }
        let last = *not_far_prefix.last().expect("nonempty");
        not_far_prefix.push(last + (!far) as usize);
    }
    let mut summary = ClassSummary {
        crossings,
        ..Default::default()
    };
    for e in &mut set.excursions {
        let (u, v) = (e.t_start, e.t_end);
        let d0 = dist[u];
        e.class = if d0 <= r {
            ExcursionClass::Small
        } else if not_far_prefix[v + 1] == not_far_prefix[u] {
            ExcursionClass::Large
        } else {
            ExcursionClass::Medium
        };
        if e.class == ExcursionClass::Medium {
            if d0 > 8.0 * r {
                summary.medium_outer += 1;
            } else {
                summary.medium_inner += 1;
            }
        }
        if (r..=8.0 * r).contains(&d0) {
            summary.escape_trials += 1;
            if dist[u..=v].iter().any(|&d| d > 11.0 * r) {
                summary.escape_successes += 1;
            }
        }
    }
    set.summary = Some(summary);
    set
}

/// Counts of signed weights, plus per-walk moments for a clustered
/// standard error. `h` is a walk's `plus - minus` and `c` its excursion count.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignCounts {
    pub plus: u64,
    pub minus: u64,
    pub zero: u64,
    #[serde(default)]
    pub walks: u64,
    #[serde(default)]
    pub sum_h2: u64,
    #[serde(default)]
    pub sum_hc: i64,
    #[serde(default)]
    pub sum_c2: u64,
}

impl SignCounts {
    fn add(&mut self, w: f64) {
        if w > 0.0 {
            self.plus += 1;
        } else if w < 0.0 {
            self.minus += 1;
        } else {
            self.zero += 1;
        }
    }

    /// Two-sided binomial p-value of `plus` among the signed weights under p = 1/2.
    pub fn p_value(&self) -> f64 {
        let n = self.plus + self.minus;
        if n == 0 {
            return 1.0;
        }
        let b = Binomial::new(0.5, n).expect("valid binomial");
        let k = self.plus.min(self.minus);
        (2.0 * b.cdf(k)).min(1.0)
    }

    fn close_walk(&mut self, before: SignCounts) {
        let h = (self.plus - before.plus) as i64 - (self.minus - before.minus) as i64;
        let c = self.plus + self.minus + self.zero - (before.plus + before.minus + before.zero);
        self.walks += 1;
        self.sum_h2 += (h * h) as u64;
        self.sum_hc += h * c as i64;
        self.sum_c2 += c * c;
    }

    fn merge(&mut self, b: &SignCounts) {
        self.plus += b.plus;
        self.minus += b.minus;
        self.zero += b.zero;
        self.walks += b.walks;
        self.sum_h2 += b.sum_h2;
        self.sum_hc += b.sum_hc;
        self.sum_c2 += b.sum_c2;
    }

    /// Mean weight with a standard error that treats excursions from one walk
    /// as a cluster (ratio estimator). Weights along a walk are strongly
    /// correlated, so this is the honest error bar for pooled data.
    pub fn mean_weight_clustered(&self) -> (f64, f64) {
        let n = (self.plus + self.minus + self.zero) as f64;
        let g = self.walks as f64;
        if n == 0.0 || g < 2.0 {
            return (self.mean_weight().0, f64::NAN);
        }
        let mean = 0.5 * (self.plus as f64 - self.minus as f64) / n;
        // residual of walk w: 0.5 h_w - mean c_w
        let ss = 0.25 * self.sum_h2 as f64 - mean * self.sum_hc as f64
            + mean * mean * self.sum_c2 as f64;
        let var = g / (g - 1.0) * ss.max(0.0) / (n * n);
        (mean, var.sqrt())
    }

    /// Mean weight over all excursions and its standard error, treating the
    /// excursions as independent.
    pub fn mean_weight(&self) -> (f64, f64) {
        let n = (self.plus + self.minus + self.zero) as f64;
        if n == 0.0 {
            return (0.0, 0.0);
        }
        let s = 0.5 * (self.plus as f64 - self.minus as f64);
        let s2 = 0.25 * (self.plus + self.minus) as f64;
        let mean = s / n;
        let var = (s2 / n - mean * mean).max(0.0);
        (mean, (var / n).sqrt())
    }
}

/// Pooled weight signs, overall and per class.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct WeightStats {
    pub overall: SignCounts,
    pub by_class: BTreeMap<ExcursionClass, SignCounts>,
}

impl WeightStats {
    /// Adds one walk's decomposition.
    pub fn add(&mut self, set: &ExcursionSet) {
        let before = self.overall;
        let class_before = self.by_class.clone();
        for e in &set.excursions {
            self.overall.add(e.weight);
            self.by_class.entry(e.class).or_default().add(e.weight);
        }
        self.overall.close_walk(before);
        for (c, s) in self.by_class.iter_mut() {
            s.close_walk(class_before.get(c).copied().unwrap_or_default());
        }
    }

    pub fn merge(&mut self, other: &WeightStats) {
        self.overall.merge(&other.overall);
        for (c, s) in &other.by_class {
            self.by_class.entry(*c).or_default().merge(s);
        }
    }
}

/// Pools the weights of many decompositions.
pub fn weight_symmetry_stats<'a>(
    samples: impl IntoIterator<Item = &'a ExcursionSet>,
) -> WeightStats {
    let mut s = WeightStats::default();
    for set in samples {
        s.add(set);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::walk::gen_walk;

    fn hand_square() -> WalkPath {
        WalkPath::from_vertices(
            LatticeKind::Square,
            vec![[0, 0], [1, 0], [1, 1], [0, 1], [0, 0]],
        )
        .unwrap()
    }

    #[test]
    fn frame_examples() {
        let f = build_frame(Point::new(0.3, 0.7), LatticeKind::Square).unwrap();
        assert_eq!(f.z_hat, Point::new(0.5, 0.5));
        let f = build_frame(Point::new(0.3 + 5.0, 0.7 - 2.0), LatticeKind::Square).unwrap();
        assert_eq!(f.z_hat, Point::new(5.5, -1.5));
        assert!(matches!(
            build_frame(Point::new(0.5, 1.0), LatticeKind::Square),
            Err(Error::DegeneratePoint(_))
        ));
        assert!(build_frame(Point::new(1.0, 0.0), LatticeKind::Triangular).is_err());
    }

    #[test]
    fn hand_traced_square() {
        let p = hand_square();
        let f = build_frame(Point::new(0.3, 0.7), LatticeKind::Square).unwrap();
        let s = decompose(&p, &f).unwrap();
        let spans: Vec<_> = s
            .excursions
            .iter()
            .map(|e| (e.t_start, e.t_end, e.weight))
            .collect();
        assert_eq!(spans, vec![(0, 2, 0.5), (2, 4, 0.5)]);
        assert_eq!(s.weight_sum(), 1.0);
        assert!(s.residual <= 2.0);
        let st = weight_symmetry_stats([&s]);
        assert_eq!((st.overall.plus, st.overall.minus), (2, 0));
    }

    #[test]
    fn reflection_negates_weights() {
        for seed in 0..50 {
            let p = gen_walk(LatticeKind::Square, 400, seed).unwrap();
            let z = Point::new(0.3, 0.45);
            let a = decompose(&p, &build_frame(z, LatticeKind::Square).unwrap()).unwrap();
            let zr = Point::new(z.y, z.x);
            let b = decompose(
                &p.reflected(),
                &build_frame(zr, LatticeKind::Square).unwrap(),
            )
            .unwrap();
            assert_eq!(a.excursions.len(), b.excursions.len());
            for (x, y) in a.excursions.iter().zip(&b.excursions) {
                assert_eq!(x.weight, -y.weight);
            }
            let (sa, sb) = (weight_symmetry_stats([&a]), weight_symmetry_stats([&b]));
            assert_eq!(sa.overall.plus, sb.overall.minus);
        }
    }

    #[test]
    fn residual_bound_on_random_walks() {
        for lattice in [LatticeKind::Square, LatticeKind::Triangular] {
            for seed in 0..200 {
                let p = gen_walk(lattice, 500, seed).unwrap();
                let z = Point::new(
                    ((seed * 7919) % 13) as f64 * 0.77 - 5.0 + 0.123,
                    ((seed * 104729) % 11) as f64 * 0.81 - 4.0 + 0.0371,
                );
                let f = build_frame(z, lattice).unwrap();
                let s = decompose(&p, &f).unwrap();
                assert!(
                    s.residual <= s.residual_bound,
                    "{lattice:?} {seed} {}",
                    s.residual
                );
            }
        }
    }

    #[test]
    fn never_touching_walk() {
        let p = WalkPath::from_vertices(LatticeKind::Square, vec![[0, 0], [1, 0], [2, 0]]).unwrap();
        let f = build_frame(Point::new(10.5, -20.5), LatticeKind::Square).unwrap();
        let s = decompose(&p, &f).unwrap();
        assert!(s.excursions.is_empty());
        assert!(s.residual <= 2.0);
    }

    #[test]
    fn classes() {
        let p = gen_walk(LatticeKind::Square, 2000, 5).unwrap();
        let params = ScaleParams::new(LatticeKind::Square, 2000, 1.0).unwrap();
        // far away: everything large, no crossings
        let f = build_frame(Point::new(2000.0 + 50.5, 0.5), LatticeKind::Square).unwrap();
        let s = classify(decompose(&p, &f).unwrap(), &params, &p);
        assert!(s
            .excursions
            .iter()
            .all(|e| e.class == ExcursionClass::Large));
        assert_eq!(s.summary.unwrap().crossings, 0);
        // near the origin: every excursion gets a class
        let f = build_frame(Point::new(0.5, 0.5), LatticeKind::Square).unwrap();
        let s = classify(decompose(&p, &f).unwrap(), &params, &p);
        assert!(!s.excursions.is_empty());
        assert!(s
            .excursions
            .iter()
            .all(|e| e.class != ExcursionClass::Unclassified));
        assert_eq!(s.excursions[0].class, ExcursionClass::Small);
    }

    #[test]
    fn small_when_confined() {
        // walk stays within r_n of z between two diagonal hits
        let p = hand_square();
        let params = ScaleParams::new(LatticeKind::Square, 1000, 1.0).unwrap();
        let f = build_frame(Point::new(0.4, 0.6), LatticeKind::Square).unwrap();
        let s = classify(decompose(&p, &f).unwrap(), &params, &p);
        assert!(s
            .excursions
            .iter()
            .all(|e| e.class == ExcursionClass::Small));
    }

    #[test]
    fn binomial_p_value() {
        let c = SignCounts {
            plus: 50,
            minus: 50,
            ..Default::default()
        };
        assert!((c.p_value() - 1.0).abs() < 1e-12);
        let c = SignCounts {
            plus: 90,
            minus: 10,
            ..Default::default()
        };
        assert!(c.p_value() < 1e-10);
    }

    #[test]
    fn clustered_error_matches_direct_formula() {
        let sets: Vec<ExcursionSet> = (0..40)
            .map(|seed| {
                let p = gen_walk(LatticeKind::Square, 3000, seed).unwrap();
                decompose(
                    &p,
                    &build_frame(Point::new(0.5, 0.5), LatticeKind::Square).unwrap(),
                )
                .unwrap()
            })
            .collect();
        let st = weight_symmetry_stats(&sets);
        let (m, se) = st.overall.mean_weight_clustered();
        // direct: per-walk totals
        let tot: Vec<(f64, f64)> = sets
            .iter()
            .map(|s| {
                (
                    s.excursions.iter().map(|e| e.weight).sum(),
                    s.excursions.len() as f64,
                )
            })
            .collect();
        let n: f64 = tot.iter().map(|t| t.1).sum();
        let mean = tot.iter().map(|t| t.0).sum::<f64>() / n;
        let g = tot.len() as f64;
        let ss: f64 = tot.iter().map(|t| (t.0 - mean * t.1).powi(2)).sum();
        let direct = (g / (g - 1.0) * ss).sqrt() / n;
        assert!((m - mean).abs() < 1e-12);
        assert!(
            (se - direct).abs() < 1e-9 * direct.max(1.0),
            "{se} {direct}"
        );
        assert_eq!(st.overall.walks, 40);
        // merging halves gives the same totals
        let mut a = weight_symmetry_stats(&sets[..17]);
        a.merge(&weight_symmetry_stats(&sets[17..]));
        assert_eq!(a, st);
    }

    #[test]
    fn triangular_zero_weight_when_traversing_s() {
        // z in the up triangle (0,0); s is the edge (0,0)-(1,0)
        let p =
            WalkPath::from_vertices(LatticeKind::Triangular, vec![[0, 0], [1, 0], [0, 0]]).unwrap();
        let z = LatticeKind::Triangular.embed_f64(Point::new(0.3, 0.3));
        let f = build_frame(z, LatticeKind::Triangular).unwrap();
        let s = decompose(&p, &f).unwrap();
        assert_eq!(s.excursions.len(), 2);
        assert!(s.excursions.iter().all(|e| e.weight == 0.0));
        assert_eq!(s.traversals, Some(2));
    }
}
