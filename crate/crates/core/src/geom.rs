//! Planar points and polygon primitives.
//!
//! Floating-point routines are generic over [`num_traits::Float`]; polygon
//! clipping, shoelace area and centroids work over any ordered field, so the
//! same code runs on `f64` and on exact rationals.

use std::ops::{Add, Mul, Sub};

use num_traits::{Float, Num, Signed};
use serde::{Deserialize, Serialize};

/// A point (or vector) in the plane.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Point<T> {
    pub x: T,
    pub y: T,
}

impl<T> Point<T> {
    pub const fn new(x: T, y: T) -> Self {
        Point { x, y }
    }
}

impl<T: Clone + Num> Point<T> {
    pub fn cross(&self, other: &Self) -> T {
        self.x.clone() * other.y.clone() - self.y.clone() * other.x.clone()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.x.clone() * other.x.clone() + self.y.clone() * other.y.clone()
    }

    pub fn norm_sq(&self) -> T {
        self.dot(self)
    }
}

impl<T: Float> Point<T> {
    pub fn norm(&self) -> T {
        self.x.hypot(self.y)
    }

    pub fn dist(&self, other: &Self) -> T {
        (*self - *other).norm()
    }

    /// Rotates the point about the origin by `angle` radians.
    pub fn rotate(&self, angle: T) -> Self {
        let (s, c) = angle.sin_cos();
        Point::new(c * self.x - s * self.y, s * self.x + c * self.y)
    }

    pub fn lerp(&self, other: &Self, t: T) -> Self {
        Point::new(
            self.x + (other.x - self.x) * t,
            self.y + (other.y - self.y) * t,
        )
    }
}

impl<T: Clone + Num> Add for Point<T> {
    type Output = Point<T>;
    fn add(self, rhs: Self) -> Self {
        Point::new(self.x + rhs.x, self.y + rhs.y)
    }
}

impl<T: Clone + Num> Sub for Point<T> {
    type Output = Point<T>;
    fn sub(self, rhs: Self) -> Self {
        Point::new(self.x - rhs.x, self.y - rhs.y)
    }
}

impl<T: Clone + Num> Mul<T> for Point<T> {
    type Output = Point<T>;
    fn mul(self, rhs: T) -> Self {
        Point::new(self.x * rhs.clone(), self.y * rhs)
    }
}

/// Signed angle subtended at `z` by the segment `a -> b`, in `(-pi, pi)`.
///
/// Returns `None` when `z` lies on the closed segment.
pub fn subtended_angle<T: Float>(a: Point<T>, b: Point<T>, z: Point<T>) -> Option<T> {
    let u = a - z;
    let v = b - z;
    let cr = u.cross(&v);
    let dt = u.dot(&v);
    if cr == T::zero() && dt <= T::zero() {
        return None;
    }
    Some(cr.atan2(dt))
}

/// Euclidean distance from `z` to the closed segment `a b`.
pub fn point_segment_distance<T: Float>(a: Point<T>, b: Point<T>, z: Point<T>) -> T {
    let d = b - a;
    let len_sq = d.norm_sq();
    if len_sq == T::zero() {
        return z.dist(&a);
    }
    let t = ((z - a).dot(&d) / len_sq).max(T::zero()).min(T::one());
    z.dist(&a.lerp(&b, t))
}

/// Ordered field scalar usable for exact polygon work.
pub trait FieldScalar: Clone + Num + Signed + PartialOrd {}
impl<T: Clone + Num + Signed + PartialOrd> FieldScalar for T {}

/// Twice the signed (shoelace) area of a closed polygon; counterclockwise is positive.
pub fn twice_signed_area<T: FieldScalar>(poly: &[Point<T>]) -> T {
    let n = poly.len();
    let mut acc = T::zero();
    for i in 0..n {
        let j = (i + 1) % n;
        acc = acc + poly[i].cross(&poly[j]);
    }
    acc
}

/// Area centroid of a simple polygon with nonzero area.
pub fn centroid<T: FieldScalar>(poly: &[Point<T>]) -> Option<Point<T>> {
    let a2 = twice_signed_area(poly);
    if a2.is_zero() {
        return None;
    }
    let n = poly.len();
    let mut cx = T::zero();
    let mut cy = T::zero();
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        let c = p.cross(q);
        cx = cx + (p.x.clone() + q.x.clone()) * c.clone();
        cy = cy + (p.y.clone() + q.y.clone()) * c;
    }
    let three = T::one() + T::one() + T::one();
    let denom = three * a2;
    Some(Point::new(cx / denom.clone(), cy / denom))
}

/// Clips a convex polygon to the closed half-plane to the left of the
/// directed line through `origin` with direction `dir`.
pub fn clip_left<T: FieldScalar>(
    poly: &[Point<T>],
    origin: &Point<T>,
    dir: &Point<T>,
) -> Vec<Point<T>> {
    let side = |p: &Point<T>| dir.cross(&(p.clone() - origin.clone()));
    let n = poly.len();
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..n {
        let p = &poly[i];
        let q = &poly[(i + 1) % n];
        let sp = side(p);
        let sq = side(q);
        let p_in = !sp.is_negative();
        let q_in = !sq.is_negative();
        if p_in {
            out.push(p.clone());
        }
        if p_in != q_in && !sp.is_zero() && !sq.is_zero() {
            let t = sp.clone() / (sp - sq);
            out.push(p.clone() + (q.clone() - p.clone()) * t);
        }
    }
    out
}

/// Clips a convex polygon to the closed half-plane right of the directed line.
pub fn clip_right<T: FieldScalar>(
    poly: &[Point<T>],
    origin: &Point<T>,
    dir: &Point<T>,
) -> Vec<Point<T>> {
    let flipped = Point::new(-dir.x.clone(), -dir.y.clone());
    clip_left(poly, origin, &flipped)
}
