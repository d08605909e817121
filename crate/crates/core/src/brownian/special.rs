use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geom::Point;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Exponential integral `E1(x) = int_x^inf e^-t / t dt` for `x > 0`.
///
/// Power series below 1, Lentz continued fraction above.
pub fn exp_integral_e1(x: f64) -> Result<f64> {
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::arg("x", "E1 needs a finite positive argument"));
    }
    const EPS: f64 = 1e-16;
    if x > 1.0 {
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..10_000 {
            let an = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (an * d + b);
            c = b + an / c;
            let del = c * d;
            h *= del;
            if (del - 1.0).abs() < EPS {
                return Ok(h * (-x).exp());
            }
        }
        Err(Error::Internal(
            "E1 continued fraction did not converge".into(),
        ))
    } else {
        let mut sum = -x.ln() - EULER_GAMMA;
        let mut fact = 1.0;
        for i in 1..10_000 {
            fact *= -x / i as f64;
            let del = -fact / i as f64;
            sum += del;
            if del.abs() < sum.abs() * EPS {
                return Ok(sum);
            }
        }
        Err(Error::Internal("E1 series did not converge".into()))
    }
}

/// `(1/pi) int_0^1 p_s(0, z) ds = E1(|z|^2 / 2) / (2 pi^2)`.
pub fn p_integral_target(z: Point<f64>) -> Result<f64> {
    let r2 = z.norm_sq();
    if r2 == 0.0 {
        return Err(Error::Divergent);
    }
    Ok(exp_integral_e1(0.5 * r2)? / (2.0 * PI * PI))
}

/// Spitzer's constant `pi int_0^1 p_s(0, z) ds = E1(|z|^2 / 2) / 2`.
pub fn spitzer_target(z: Point<f64>) -> Result<f64> {
    Ok(p_integral_target(z)? * PI * PI)
}
