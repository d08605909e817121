//! Nearest-neighbour random walks on the square and triangular lattices.
//!
//! Vertices are stored as integer coordinates. On the triangular lattice the
//! pair `(a, b)` denotes the point `a * (1, 0) + b * (1/2, sqrt(3)/2)`; the
//! Euclidean embedding is applied only where geometry needs it.
//!
//! Only these two lattices are generated. Walks with general bounded
//! increments are outside the scope of this crate.

use rand::{Rng, RngCore};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;
use crate::rng::{rng_from_seed, SimRng};

/// Integer lattice coordinates (basis coordinates on the triangular lattice).
pub type Vertex = [i64; 2];

const SQUARE_STEPS: [Vertex; 4] = [[1, 0], [0, 1], [-1, 0], [0, -1]];
// exp(i k pi / 3), k = 0..5, in the (a, b) basis
const TRIANGULAR_STEPS: [Vertex; 6] = [[1, 0], [0, 1], [-1, 1], [-1, 0], [0, -1], [1, -1]];

pub(crate) const SQRT3_2: f64 = 0.866_025_403_784_438_6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Square,
    Triangular,
}

impl LatticeKind {
    /// The unit step vectors in lattice coordinates.
    pub fn steps(self) -> &'static [Vertex] {
        match self {
            LatticeKind::Square => &SQUARE_STEPS,
            LatticeKind::Triangular => &TRIANGULAR_STEPS,
        }
    }

    pub fn is_step(self, d: Vertex) -> bool {
        self.steps().contains(&d)
    }

    /// Euclidean position of a lattice vertex.
    pub fn embed(self, v: Vertex) -> Point<f64> {
        let (a, b) = (v[0] as f64, v[1] as f64);
        match self {
            LatticeKind::Square => Point::new(a, b),
            LatticeKind::Triangular => Point::new(a + 0.5 * b, SQRT3_2 * b),
        }
    }

    /// Euclidean position of a (possibly fractional) point given in lattice coordinates.
    pub fn embed_f64(self, p: Point<f64>) -> Point<f64> {
        match self {
            LatticeKind::Square => p,
            LatticeKind::Triangular => Point::new(p.x + 0.5 * p.y, SQRT3_2 * p.y),
        }
    }

    /// Lattice (basis) coordinates of a Euclidean point.
    pub fn to_basis(self, p: Point<f64>) -> Point<f64> {
        match self {
            LatticeKind::Square => p,
            LatticeKind::Triangular => {
                let b = p.y / SQRT3_2;
                Point::new(p.x - 0.5 * b, b)
            }
        }
    }

    /// Euclidean area of a region of unit area in lattice coordinates.
    pub fn area_scale(self) -> f64 {
        match self {
            LatticeKind::Square => 1.0,
            LatticeKind::Triangular => SQRT3_2,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            LatticeKind::Square => "square",
            LatticeKind::Triangular => "triangular",
        }
    }
}

impl std::str::FromStr for LatticeKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "square" => Ok(LatticeKind::Square),
            "triangular" => Ok(LatticeKind::Triangular),
            other => Err(Error::arg("lattice", format!("unknown lattice `{other}`"))),
        }
    }
}

/// Per-coordinate step variance computed from the step set.
///
/// Returns `None` if the step covariance is not a multiple of the identity.
pub fn step_variance(lattice: LatticeKind) -> Option<f64> {
    let steps = lattice.steps();
    let k = steps.len() as f64;
    let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
    for &s in steps {
        let p = lattice.embed(s);
        xx += p.x * p.x;
        yy += p.y * p.y;
        xy += p.x * p.y;
    }
    let (xx, yy, xy) = (xx / k, yy / k, xy / k);
    ((xx - yy).abs() < 1e-12 && xy.abs() < 1e-12).then_some(xx)
}

/// Step source shared by path generation and the streaming kernels, so both
/// consume the generator identically.
pub(crate) struct StepStream {
    rng: SimRng,
    lattice: LatticeKind,
    word: u64,
    left: u32,
}

impl StepStream {
    pub(crate) fn new(lattice: LatticeKind, seed: u64) -> Self {
        StepStream {
            rng: rng_from_seed(seed),
            lattice,
            word: 0,
            left: 0,
        }
    }

    #[inline]
    pub(crate) fn next_step(&mut self) -> Vertex {
        match self.lattice {
            LatticeKind::Square => {
                if self.left == 0 {
                    self.word = self.rng.next_u64();
                    self.left = 32;
                }
                let k = (self.word & 3) as usize;
                self.word >>= 2;
                self.left -= 1;
                SQUARE_STEPS[k]
            }
            LatticeKind::Triangular => TRIANGULAR_STEPS[self.rng.random_range(0..6usize)],
        }
    }
}

/// Ordered vertices of an `n`-step nearest-neighbour walk started at the origin.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WalkPath {
    pub lattice: LatticeKind,
    vertices: Vec<Vertex>,
    pub seed: Option<u64>,
}

impl WalkPath {
    /// Builds a path from explicit vertices, checking the step-set invariant.
    pub fn from_vertices(lattice: LatticeKind, vertices: Vec<Vertex>) -> Result<Self> {
        if vertices.first() != Some(&[0, 0]) {
            return Err(Error::InvalidPath("walk must start at the origin".into()));
        }
        if let Some(i) = vertices
            .windows(2)
            .position(|w| !lattice.is_step([w[1][0] - w[0][0], w[1][1] - w[0][1]]))
        {
            return Err(Error::InvalidPath(format!(
                "vertices {i} and {} are not lattice neighbours",
                i + 1
            )));
        }
        Ok(WalkPath {
            lattice,
            vertices,
            seed: None,
        })
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    /// Number of steps.
    pub fn n(&self) -> usize {
        self.vertices.len() - 1
    }

    pub fn start(&self) -> Vertex {
        self.vertices[0]
    }

    pub fn end(&self) -> Vertex {
        *self.vertices.last().expect("walk has at least one vertex")
    }

    /// Euclidean positions of the vertices.
    pub fn euclidean(&self) -> Vec<Point<f64>> {
        self.vertices
            .iter()
            .map(|&v| self.lattice.embed(v))
            .collect()
    }

    /// The path reflected across the line `y = x` (square) or `b = a`
    /// in the basis (triangular); orientation is reversed.
    pub fn reflected(&self) -> WalkPath {
        WalkPath {
            lattice: self.lattice,
            vertices: self.vertices.iter().map(|v| [v[1], v[0]]).collect(),
            seed: self.seed,
        }
    }

    /// Checks the nearest-neighbour invariant on every step.
    pub fn is_valid(&self) -> bool {
        self.vertices.first() == Some(&[0, 0])
            && self
                .vertices
                .windows(2)
                .all(|w| self.lattice.is_step([w[1][0] - w[0][0], w[1][1] - w[0][1]]))
    }
}

/// Uniform nearest-neighbour walk of `n` steps; a pure function of its inputs.
pub fn gen_walk(lattice: LatticeKind, n: usize, seed: u64) -> Result<WalkPath> {
    if n == 0 {
        return Err(Error::ZeroSteps);
    }
    let mut steps = StepStream::new(lattice, seed);
    let mut vertices = Vec::with_capacity(n + 1);
    let mut cur = [0i64, 0];
    vertices.push(cur);
    for _ in 0..n {
        let s = steps.next_step();
        cur = [cur[0] + s[0], cur[1] + s[1]];
        vertices.push(cur);
    }
    Ok(WalkPath {
        lattice,
        vertices,
        seed: Some(seed),
    })
}

/// A walk closed by the straight chord from its end back to its start.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosedLoop {
    pub path: WalkPath,
    /// `(end, start)` of the walk.
    pub chord: (Vertex, Vertex),
}

impl ClosedLoop {
    pub fn lattice(&self) -> LatticeKind {
        self.path.lattice
    }

    /// True when the walk returns to its start.
    pub fn chord_is_degenerate(&self) -> bool {
        self.chord.0 == self.chord.1
    }

    /// All directed segments of the loop: walk edges followed by the chord.
    pub fn segments(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        let walk = self.path.vertices().windows(2).map(|w| (w[0], w[1]));
        let chord = (!self.chord_is_degenerate()).then_some(self.chord);
        walk.chain(chord)
    }

    /// Closed polygon vertex list; the start is not repeated when the walk
    /// returns to it.
    pub fn polygon(&self) -> &[Vertex] {
        let v = self.path.vertices();
        if v.len() > 1 && v[v.len() - 1] == v[0] {
            &v[..v.len() - 1]
        } else {
            v
        }
    }

    /// Twice the signed shoelace area in lattice coordinates.
    pub fn twice_signed_area(&self) -> i128 {
        let v = self.path.vertices();
        let mut acc = 0i128;
        for w in v.windows(2) {
            acc += w[0][0] as i128 * w[1][1] as i128 - w[0][1] as i128 * w[1][0] as i128;
        }
        let (e, s) = self.chord;
        acc + e[0] as i128 * s[1] as i128 - e[1] as i128 * s[0] as i128
    }

    /// Euclidean length of the walk plus the chord.
    pub fn length(&self) -> f64 {
        let l = self.lattice();
        self.segments()
            .map(|(a, b)| l.embed(a).dist(&l.embed(b)))
            .sum()
    }
}

/// Closes a walk with the chord from its last vertex to its first.
pub fn close_loop(path: WalkPath) -> ClosedLoop {
    let chord = (path.end(), path.start());
    ClosedLoop { path, chord }
}

/// Scale parameters tying lattice units to the rescaled process.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleParams {
    pub n: usize,
    /// Per-coordinate step variance.
    pub kappa: f64,
    /// Near-zone radius in lattice units, `c0 * ln n`.
    pub r_n: f64,
    pub c0: f64,
}

impl ScaleParams {
    pub fn new(lattice: LatticeKind, n: usize, c0: f64) -> Result<Self> {
        if n < 2 {
            return Err(Error::arg("n", "scale parameters need n >= 2"));
        }
        if !(c0 > 0.0 && c0.is_finite()) {
            return Err(Error::arg("c0", "must be positive"));
        }
        let kappa = step_variance(lattice)
            .ok_or_else(|| Error::Internal("step covariance is not isotropic".into()))?;
        Ok(ScaleParams {
            n,
            kappa,
            r_n: c0 * (n as f64).ln(),
            c0,
        })
    }

    /// Factor mapping lattice units to the rescaled plane: `1 / sqrt(kappa n)`.
    pub fn rescale(&self) -> f64 {
        1.0 / (self.kappa * self.n as f64).sqrt()
    }

    /// The near-zone radius in rescaled units, `c0 ln n / sqrt(kappa n)`.
    pub fn epsilon_n(&self) -> f64 {
        self.r_n * self.rescale()
    }

    /// Lattice-unit position of a point of the rescaled plane.
    pub fn to_lattice(&self, z: Point<f64>) -> Point<f64> {
        let s = (self.kappa * self.n as f64).sqrt();
        Point::new(z.x * s, z.y * s)
    }
}
