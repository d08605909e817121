use num_traits::Float;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::rng::{keyed_normal_pair, mix64, rng_from_seed};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BmKind {
    Motion,
    Bridge,
}

/// A planar Brownian path sampled at times `k / m`, or a synthetic polyline.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BmPath<T> {
    pub kind: BmKind,
    samples: Vec<Point<T>>,
    /// Key for refinement draws; `None` for synthetic paths.
    pub seed: Option<u64>,
    /// Rotation applied since generation; refinement draws are rotated with it.
    #[serde(default)]
    rotation: f64,
}

impl<T: Float> BmPath<T> {
    /// Wraps explicit samples taken at equally spaced times on `[0, 1]`.
    pub fn from_samples(kind: BmKind, samples: Vec<Point<T>>) -> Result<Self> {
        if samples.len() < 2 {
            return Err(Error::arg("samples", "need at least two samples"));
        }
        Ok(BmPath {
            kind,
            samples,
            seed: None,
            rotation: 0.0,
        })
    }

    pub fn samples(&self) -> &[Point<T>] {
        &self.samples
    }

    /// Resolution: number of time steps.
    pub fn m(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn dt(&self) -> T {
        T::one() / T::from(self.m()).expect("m fits the scalar")
    }

    /// Segments of the sausage polyline, including the closing chord of a bridge.
    pub fn segments(&self) -> impl Iterator<Item = (Point<T>, Point<T>)> + '_ {
        let open = self.samples.windows(2).map(|w| (w[0], w[1]));
        let first = self.samples[0];
        let last = *self.samples.last().expect("nonempty");
        let chord = (self.kind == BmKind::Bridge && first != last).then_some((last, first));
        open.chain(chord)
    }

    /// Path and refinement key rotated about the origin.
    pub fn rotated(&self, angle: T) -> Self {
        BmPath {
            kind: self.kind,
            samples: self.samples.iter().map(|p| p.rotate(angle)).collect(),
            seed: self.seed,
            rotation: self.rotation + angle.to_f64().expect("finite angle"),
        }
    }

    /// Key for counter-based refinement normals.
    pub(crate) fn key(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub(crate) fn rotation(&self) -> f64 {
        self.rotation
    }
}

fn gen_increments<T: Float>(m: usize, seed: u64) -> Result<Vec<Point<T>>> {
    if m == 0 {
        return Err(Error::arg("m", "resolution must be at least 1"));
    }
    let mut rng = rng_from_seed(seed);
    let sd = (1.0 / m as f64).sqrt();
    let mut out = Vec::with_capacity(m + 1);
    let (mut x, mut y) = (0.0f64, 0.0f64);
    out.push(Point::new(T::zero(), T::zero()));
    for _ in 0..m {
        let dx: f64 = StandardNormal.sample(&mut rng);
        let dy: f64 = StandardNormal.sample(&mut rng);
        x += sd * dx;
        y += sd * dy;
        out.push(Point::new(cast(x), cast(y)));
    }
    Ok(out)
}

pub(crate) fn cast<T: Float>(v: f64) -> T {
    T::from(v).expect("finite value fits the scalar")
}

/// Brownian motion on `[0, 1]` at `m + 1` equally spaced times.
pub fn gen_bm<T: Float>(m: usize, seed: u64) -> Result<BmPath<T>> {
    Ok(BmPath {
        kind: BmKind::Motion,
        samples: gen_increments(m, seed)?,
        seed: Some(seed),
        rotation: 0.0,
    })
}

/// Brownian bridge `beta_t - t beta_1` from the motion with the same seed.
pub fn gen_bridge<T: Float>(m: usize, seed: u64) -> Result<BmPath<T>> {
    let mut s = gen_increments::<T>(m, seed)?;
    let end = s[m];
    let mf: T = cast(m as f64);
    for (k, p) in s.iter_mut().enumerate() {
        let t = cast::<T>(k as f64) / mf;
        *p = Point::new(p.x - t * end.x, p.y - t * end.y);
    }
    s[m] = Point::new(T::zero(), T::zero());
    Ok(BmPath {
        kind: BmKind::Bridge,
        samples: s,
        seed: Some(seed),
        rotation: 0.0,
    })
}

/// Conditional bridge midpoints addressed by `(segment, node)`, so deeper
/// refinements extend shallower ones of the same path.
/// Hard cap on bridge refinement depth.
pub const MAX_REFINE_DEPTH: u32 = 256;

const LEFT_CHILD: u64 = 0x243F_6A88_85A3_08D3;
const RIGHT_CHILD: u64 = 0x1319_8A2E_0370_7344;

pub(crate) struct Refiner {
    key: u64,
    cos: f64,
    sin: f64,
}

impl Refiner {
    pub(crate) fn new<T: Float>(path: &BmPath<T>) -> Self {
        let (sin, cos) = path.rotation().sin_cos();
        Refiner {
            key: path.key(),
            cos,
            sin,
        }
    }

    /// Splits the segment `a -> b` of duration `dt` while
    /// `split(a, b, dt, depth)` holds, visiting the leaves in time order.
    /// `node` is 1 for a whole sample segment; children are keyed by hashing,
    /// so depth is limited only by [`MAX_REFINE_DEPTH`]. Midpoints depend on
    /// `a` and `b` only through their difference, so callers may pass
    /// coordinates relative to any origin.
    #[allow(clippy::too_many_arguments)]
    pub(crate) fn refine<T: Float>(
        &self,
        seg: u64,
        node: u64,
        a: Point<T>,
        b: Point<T>,
        dt: f64,
        depth: u32,
        split: &mut impl FnMut(Point<T>, Point<T>, f64, u32) -> bool,
        leaf: &mut impl FnMut(Point<T>, Point<T>),
    ) {
        if depth < MAX_REFINE_DEPTH && split(a, b, dt, depth) {
            let (n1, n2) = keyed_normal_pair(self.key, seg, node);
            let (n1, n2) = (self.cos * n1 - self.sin * n2, self.sin * n1 + self.cos * n2);
            let s = (0.25 * dt).sqrt();
            let two = T::one() + T::one();
            let mid = Point::new(
                (a.x + b.x) / two + cast(s * n1),
                (a.y + b.y) / two + cast(s * n2),
            );
            let (left, right) = (mix64(node ^ LEFT_CHILD), mix64(node ^ RIGHT_CHILD));
            self.refine(seg, left, a, mid, 0.5 * dt, depth + 1, split, leaf);
            self.refine(seg, right, mid, b, 0.5 * dt, depth + 1, split, leaf);
        } else {
            leaf(a, b);
        }
    }
}
