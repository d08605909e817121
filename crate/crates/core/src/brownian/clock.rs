use num_traits::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geom::Point;

use super::path::{cast, BmPath};

/// The clock `Z_eps` at `z`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClockValue<T> {
    pub z: Point<T>,
    pub epsilon: T,
    pub value: T,
}

/// `sqrt( sum_{k < m} 1{|b_k - z| >= eps} |b_k - z|^-2 / m )`.
pub fn z_epsilon<T: Float>(path: &BmPath<T>, z: Point<T>, epsilon: T) -> Result<ClockValue<T>> {
    if !(epsilon > T::zero()) {
        return Err(Error::arg("epsilon", "must be positive"));
    }
    let s = path.samples();
    let eps2 = epsilon * epsilon;
    let mut acc = T::zero();
    for p in &s[..s.len() - 1] {
        let d2 = (*p - z).norm_sq();
        if d2 >= eps2 {
            acc = acc + d2.recip();
        }
    }
    Ok(ClockValue {
        z,
        epsilon,
        value: (acc / cast(path.m() as f64)).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::path::{gen_bm, BmKind};

    #[test]
    fn inside_ball_is_zero() {
        let p = BmPath::from_samples(BmKind::Motion, vec![Point::new(0.01, 0.0); 11]).unwrap();
        assert_eq!(z_epsilon(&p, Point::new(0.0, 0.0), 0.1).unwrap().value, 0.0);
    }

    #[test]
    fn constant_distance() {
        let p = BmPath::from_samples(BmKind::Motion, vec![Point::new(2.0, 0.0); 101]).unwrap();
        let v = z_epsilon(&p, Point::new(0.0, 0.0), 0.5).unwrap().value;
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn monotone_in_epsilon() {
        let p = gen_bm::<f64>(4000, 2).unwrap();
        let z = Point::new(0.1, 0.2);
        let mut prev = f64::INFINITY;
        for e in [1e-4, 1e-3, 1e-2, 0.1, 0.5] {
            let v = z_epsilon(&p, z, e).unwrap().value;
            assert!(v <= prev);
            prev = v;
        }
        assert!(z_epsilon(&p, z, 0.0).is_err());
    }
}
