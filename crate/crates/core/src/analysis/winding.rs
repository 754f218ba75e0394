//! Topological charge of a transverse field.

use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::ComplexField2D;

pub const MIN_SAMPLES: usize = 64;
const RESIDUAL_LIMIT: f64 = 0.05;
const AMPLITUDE_FLOOR: f64 = 1e-9;

/// Bilinear interpolation at `(x, y)`; `None` outside the sampled area.
pub fn interpolate(field: &ComplexField2D, x: f64, y: f64) -> Option<Complex64> {
    let g = field.grid();
    let fx = x / g.dx() + (g.nx() / 2) as f64;
    let fy = y / g.dy() + (g.ny() / 2) as f64;
    if fx < 0.0 || fy < 0.0 {
        return None;
    }
    let (i, j) = (fx.floor() as usize, fy.floor() as usize);
    if i + 1 >= g.nx() || j + 1 >= g.ny() {
        return None;
    }
    let (tx, ty) = (fx - i as f64, fy - j as f64);
    let v = |i, j| field.at(i, j);
    Some(
        v(i, j) * ((1.0 - tx) * (1.0 - ty))
            + v(i + 1, j) * (tx * (1.0 - ty))
            + v(i, j + 1) * ((1.0 - tx) * ty)
            + v(i + 1, j + 1) * (tx * ty),
    )
}

/// Radius where the azimuthally averaged amplitude peaks, at least two cells.
pub fn ring_radius(field: &ComplexField2D) -> f64 {
    let g = field.grid();
    let step = g.dx().min(g.dy());
    let bins = (0.5 * g.lx().min(g.ly()) / step).floor() as usize;
    let mut sum = vec![0.0; bins];
    let mut count = vec![0usize; bins];
    for (idx, v) in field.values().iter().enumerate() {
        let (x, y) = g.position(idx);
        let bin = ((x * x + y * y).sqrt() / step).round() as usize;
        if bin < bins {
            sum[bin] += v.norm();
            count[bin] += 1;
        }
    }
    let best = (0..bins)
        .filter(|&b| count[b] > 0)
        .max_by(|&a, &b| (sum[a] / count[a] as f64).total_cmp(&(sum[b] / count[b] as f64)))
        .unwrap_or(0);
    (best as f64 * step).max(2.0 * step)
}

/// Net phase winding `(1/2π) Σ Δφ` around a circle of `radius` (or the
/// [`ring_radius`] when `None`), sampled at `samples` points.
pub fn winding_residual(field: &ComplexField2D, radius: Option<f64>, samples: usize) -> Result<f64> {
    let radius = radius.unwrap_or_else(|| ring_radius(field));
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::param("radius", format!("{radius} must be positive")));
    }
    let samples = samples.max(MIN_SAMPLES);
    let floor = AMPLITUDE_FLOOR * field.max_abs();
    let mut values = Vec::with_capacity(samples);
    for n in 0..samples {
        let phi = TAU * n as f64 / samples as f64;
        let v = interpolate(field, radius * phi.cos(), radius * phi.sin())
            .ok_or_else(|| Error::param("radius", format!("circle of radius {radius} leaves the grid")))?;
        if v.norm() <= floor || floor == 0.0 {
            return Err(Error::AmplitudeTooSmall { radius });
        }
        values.push(v);
    }
    let total: f64 = (0..samples)
        .map(|n| (values[(n + 1) % samples] / values[n]).arg())
        .sum();
    Ok(total / TAU)
}

pub fn winding_number(field: &ComplexField2D, radius: Option<f64>) -> Result<i32> {
    let g = field.grid();
    let r = radius.unwrap_or_else(|| ring_radius(field));
    // roughly four samples per cell along the circumference
    let samples = (4.0 * TAU * r / g.dx().min(g.dy())).ceil() as usize;
    let w = winding_residual(field, Some(r), samples)?;
    let rounded = w.round();
    if (w - rounded).abs() >= RESIDUAL_LIMIT {
        return Err(Error::WindingNotInteger { residual: w - rounded });
    }
    Ok(rounded as i32)
}
