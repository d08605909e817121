use num_traits::Float;

use crate::error::{Error, Result};
use crate::geom::{point_segment_distance, Point};

use super::path::{cast, BmPath, Refiner};

/// Whether `z` lies in the closed `epsilon`-neighbourhood of the sampled
/// polyline (closed by its chord for bridges).
pub fn sausage_contains<T: Float>(path: &BmPath<T>, epsilon: T, z: Point<T>) -> Result<bool> {
    if !(epsilon > T::zero()) {
        return Err(Error::arg("epsilon", "must be positive"));
    }
    Ok(path
        .segments()
        .any(|(a, b)| point_segment_distance(a, b, z) <= epsilon))
}

/// First sample time `k / m` with `|b_k - z| <= r`.
pub fn hitting_time<T: Float>(path: &BmPath<T>, z: Point<T>, r: T) -> Result<Option<T>> {
    if !(r > T::zero()) {
        return Err(Error::arg("r", "must be positive"));
    }
    let m: T = cast(path.m() as f64);
    Ok(path
        .samples()
        .iter()
        .position(|p| p.dist(&z) <= r)
        .map(|k| cast::<T>(k as f64) / m))
}

// A bridge piece of duration dt strays more than this many sqrt(dt) from its
// chord with probability below 1e-20.
const STRAY: f64 = 5.0;

/// Sausage membership of the continuous path behind the samples.
///
/// Segments that could come within `epsilon` of `z` are refined by bridge
/// midpoints until their duration is below `(epsilon / 16)^2`, then the
/// polyline distance decides.
pub fn sausage_contains_refined(path: &BmPath<f64>, epsilon: f64, z: Point<f64>) -> Result<bool> {
    if !(epsilon > 0.0) {
        return Err(Error::arg("epsilon", "must be positive"));
    }
    let refiner = Refiner::new(path);
    let dt0 = 1.0 / path.m() as f64;
    let fine = (epsilon / 16.0).powi(2);
    let found = std::cell::Cell::new(false);
    for (k, (a, b)) in path.segments().enumerate() {
        if found.get() {
            break;
        }
        let is_chord = k >= path.m();
        refiner.refine(
            k as u64,
            1,
            a,
            b,
            if is_chord { 0.0 } else { dt0 },
            0,
            &mut |a, b, dt, _| {
                if found.get() {
                    return false;
                }
                let d = point_segment_distance(a, b, z);
                dt > fine && d <= epsilon + STRAY * dt.sqrt()
            },
            &mut |a, b| {
                if point_segment_distance(a, b, z) <= epsilon {
                    found.set(true);
                }
            },
        );
    }
    Ok(found.get())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::brownian::path::{gen_bm, BmKind};

    fn line() -> BmPath<f64> {
        BmPath::from_samples(
            BmKind::Motion,
            vec![
                Point::new(0.0, 0.0),
                Point::new(1.0, 0.0),
                Point::new(1.0, 1.0),
            ],
        )
        .unwrap()
    }

    #[test]
    fn on_path_and_away() {
        let p = line();
        for e in [1e-9, 1e-3, 1.0] {
            assert!(sausage_contains(&p, e, Point::new(0.5, 0.0)).unwrap());
        }
        assert!(!sausage_contains(&p, 0.1, Point::new(0.5, -0.2)).unwrap());
        assert!(sausage_contains(&p, 0.2, Point::new(0.5, -0.2)).unwrap());
    }

    #[test]
    fn hitting() {
        let p = line();
        assert_eq!(
            hitting_time(&p, Point::new(1.0, 0.1), 0.2).unwrap(),
            Some(0.5)
        );
        assert_eq!(hitting_time(&p, Point::new(5.0, 5.0), 0.2).unwrap(), None);
    }

    #[test]
    fn refined_contains_coarse_hits() {
        for seed in 0..200 {
            let p = gen_bm::<f64>(256, seed).unwrap();
            let z = Point::new(0.4, -0.3);
            let fine = sausage_contains_refined(&p, 0.05, z).unwrap();
            // the refined path passes through every coarse sample
            if p.samples().iter().any(|s| s.dist(&z) <= 0.05) {
                assert!(fine);
            }
        }
    }

    #[test]
    fn monotone_in_epsilon() {
        let p = gen_bm::<f64>(1000, 8).unwrap();
        let z = Point::new(0.3, 0.3);
        let mut prev = false;
        for e in [1e-4, 1e-3, 1e-2, 0.1, 1.0] {
            let c = sausage_contains(&p, e, z).unwrap();
            assert!(c || !prev);
            prev = c;
        }
    }
}
