use num_traits::Float;

use crate::error::{Error, Result};
use crate::geom::{subtended_angle, Point};

/// Total signed angle swept around `z` along an open polyline.
///
/// Each segment contributes the angle it subtends at `z`, which lies in
/// `(-pi, pi)`; the sum is the continuous lift of `arg(p - z)` from the first
/// point to the last. For a closed polyline the result is `2 pi` times the
/// winding index.
pub fn winding_angle<T: Float>(polyline: &[Point<T>], z: Point<T>) -> Result<T> {
    let mut acc = T::zero();
    for w in polyline.windows(2) {
        acc = acc + subtended_angle(w[0], w[1], z).ok_or(Error::PointOnCurve)?;
    }
    if polyline.len() == 1 && polyline[0] == z {
        return Err(Error::PointOnCurve);
    }
    Ok(acc)
}

/// Winding angle of the closed polyline obtained by appending the first point.
pub fn closed_winding_angle<T: Float>(polygon: &[Point<T>], z: Point<T>) -> Result<T> {
    let open = winding_angle(polygon, z)?;
    match (polygon.first(), polygon.last()) {
        (Some(&a), Some(&b)) if a != b => {
            Ok(open + subtended_angle(b, a, z).ok_or(Error::PointOnCurve)?)
        }
        _ => Ok(open),
    }
}
