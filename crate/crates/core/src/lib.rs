//! Winding of planar random walks.
//!
//! Lattice walks closed by a chord, their exact index fields and total
//! winding, excursion decompositions, Brownian winding estimators, and
//! random Dehn function bounds.

pub mod brownian;
pub mod dehn;
pub mod error;
pub mod excursion;
pub mod geom;
pub mod harness;
pub mod rng;
pub mod stats;
pub mod walk;
pub mod winding;

use num_rational::BigRational;

pub use error::{Error, Result};
pub use geom::Point;
pub use walk::{close_loop, gen_walk, ClosedLoop, LatticeKind, ScaleParams, Vertex, WalkPath};

/// Points in double precision.
pub type Point64 = Point<f64>;
/// Points in single precision.
pub type Point32 = Point<f32>;
/// Exact rational scalar used for clipped areas and polygons.
pub type Exact = BigRational;
/// Exact rational point.
pub type ExactPoint = Point<BigRational>;
/// Brownian path in double precision.
pub type BmPath64 = brownian::BmPath<f64>;
