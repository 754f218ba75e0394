//! Exponential integral for negative arguments.

use crate::error::{Error, Result};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const SERIES_LIMIT: f64 = 10.0;
const MAX_TERMS: usize = 10_000;

/// `Ei(x) = -∫_{-x}^∞ e^{-t}/t dt` for `x < 0`.
pub fn exponential_integral_ei(x: f64) -> Result<f64> {
    if !(x.is_finite() && x < 0.0) {
        return Err(Error::EiDomain(x));
    }
    let u = -x;
    Ok(if u < SERIES_LIMIT {
        series(x)
    } else {
        -continued_fraction_scaled(u) * (-u).exp()
    })
}

/// `e^u E1(u) = -e^u Ei(-u)` for `u > 0`, without overflow for large `u`.
pub fn scaled_e1(u: f64) -> Result<f64> {
    if !(u.is_finite() && u > 0.0) {
        return Err(Error::EiDomain(-u));
    }
    // the fraction converges quickly from u = 1 up and keeps full relative
    // accuracy, which the cancelling series loses once multiplied by e^u
    Ok(if u >= 1.0 {
        continued_fraction_scaled(u)
    } else {
        -series(-u) * u.exp()
    })
}

/// `γ + ln|x| + Σ x^k / (k k!)`.
fn series(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 0.0;
    for k in 1..MAX_TERMS {
        let kf = k as f64;
        term *= x / kf;
        let add = term / kf;
        sum += add;
        if add.abs() <= f64::EPSILON * sum.abs() {
            break;
        }
    }
    EULER_GAMMA + x.abs().ln() + sum
}

/// `e^u E1(u)` by the Lentz evaluation of
/// `1/(u+1- 1/(u+3- 4/(u+5- ...)))`.
fn continued_fraction_scaled(u: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = u + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..MAX_TERMS {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let delta = c * d;
        h *= delta;
        if (delta - 1.0).abs() < 1e-16 {
            break;
        }
    }
    h
}
