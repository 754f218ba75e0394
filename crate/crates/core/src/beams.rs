//! Analytic control-beam profiles and the ratios derived from them.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::{ComplexField2D, TransverseGrid};

/// One Laguerre–Gaussian control beam of order 0 or 1.
///
/// The sampled Rabi frequency is
/// `relative_factor * amplitude * (x + i y)^lg_order * exp(-rho^2 / width^2)`.
/// An infinite width gives a plane-wave (uniform) control.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlBeamSpec {
    pub lg_order: u8,
    pub amplitude: f64,
    pub width: f64,
    pub relative_factor: f64,
}

impl ControlBeamSpec {
    pub fn gaussian(amplitude: f64, width: f64) -> Self {
        Self {
            lg_order: 0,
            amplitude,
            width,
            relative_factor: 1.0,
        }
    }

    pub fn vortex(amplitude: f64, width: f64) -> Self {
        Self {
            lg_order: 1,
            ..Self::gaussian(amplitude, width)
        }
    }

    pub fn uniform(amplitude: f64) -> Self {
        Self::gaussian(amplitude, f64::INFINITY)
    }

    pub fn with_factor(mut self, factor: f64) -> Self {
        self.relative_factor = factor;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.lg_order > 1 {
            return Err(Error::param(
                "lg_order",
                format!("{} unsupported, only orders 0 and 1 exist here", self.lg_order),
            ));
        }
        if self.width.is_nan() || self.width <= 0.0 {
            return Err(Error::param("width", format!("{} must be positive", self.width)));
        }
        if !(self.amplitude.is_finite() && self.amplitude > 0.0) {
            return Err(Error::param(
                "amplitude",
                format!("{} must be positive and finite", self.amplitude),
            ));
        }
        if !self.relative_factor.is_finite() {
            return Err(Error::param("relative_factor", "must be finite"));
        }
        Ok(())
    }

    pub fn value_at(&self, x: f64, y: f64) -> Complex64 {
        let envelope = if self.width.is_infinite() {
            1.0
        } else {
            (-(x * x + y * y) / (self.width * self.width)).exp()
        };
        let scale = self.relative_factor * self.amplitude * envelope;
        match self.lg_order {
            0 => Complex64::new(scale, 0.0),
            _ => Complex64::new(x, y) * scale,
        }
    }
}

pub fn lg_field(spec: &ControlBeamSpec, grid: &TransverseGrid) -> Result<ComplexField2D> {
    spec.validate()?;
    Ok(ComplexField2D::from_fn(*grid, |x, y| spec.value_at(x, y)))
}

/// Rabi frequencies of the two control lasers on a common grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPair {
    pub omega_c2: ComplexField2D,
    pub omega_c3: ComplexField2D,
}

impl ControlPair {
    pub fn new(omega_c2: ComplexField2D, omega_c3: ComplexField2D) -> Result<Self> {
        omega_c2.same_grid(&omega_c3)?;
        Ok(Self { omega_c2, omega_c3 })
    }

    pub fn from_specs(c2: &ControlBeamSpec, c3: &ControlBeamSpec, grid: &TransverseGrid) -> Result<Self> {
        Self::new(lg_field(c2, grid)?, lg_field(c3, grid)?)
    }

    /// Single-control (Λ) configuration: the second control is identically zero.
    pub fn lambda(c2: &ControlBeamSpec, grid: &TransverseGrid) -> Result<Self> {
        Self::new(lg_field(c2, grid)?, ComplexField2D::zeros(*grid))
    }

    pub fn grid(&self) -> &TransverseGrid {
        self.omega_c2.grid()
    }

    /// Both controls multiplied by a common real factor.
    pub fn scaled(&self, factor: f64) -> Self {
        let f = Complex64::new(factor, 0.0);
        Self {
            omega_c2: self.omega_c2.scale(f),
            omega_c3: self.omega_c3.scale(f),
        }
    }

    pub(crate) fn rabi_values(&self) -> Vec<f64> {
        self.omega_c2
            .values()
            .iter()
            .zip(self.omega_c3.values())
            .map(|(a, b)| a.norm().hypot(b.norm()))
            .collect()
    }
}

/// `sqrt(|Ωc2|² + |Ωc3|²)` as a real-valued field.
pub fn total_rabi(pair: &ControlPair) -> ComplexField2D {
    let values = pair.rabi_values().into_iter().map(|r| Complex64::new(r, 0.0)).collect();
    ComplexField2D::from_values(*pair.grid(), values).expect("finite controls give finite totals")
}

pub(crate) fn zero_control_error(grid: &TransverseGrid, idx: usize) -> Error {
    let (i, j) = grid.coords_of(idx);
    Error::ZeroControlField { i, j }
}

/// Normalised control ratios `(Ωc2/Ωc, Ωc3/Ωc)`.
pub fn xi_ratios(pair: &ControlPair) -> Result<(ComplexField2D, ComplexField2D)> {
    let grid = *pair.grid();
    let rabi = pair.rabi_values();
    if let Some(idx) = rabi.iter().position(|&r| r == 0.0) {
        return Err(zero_control_error(&grid, idx));
    }
    let xi2 = pair
        .omega_c2
        .values()
        .iter()
        .zip(&rabi)
        .map(|(w, r)| w / r)
        .collect();
    let xi3 = pair
        .omega_c3
        .values()
        .iter()
        .zip(&rabi)
        .map(|(w, r)| w / r)
        .collect();
    Ok((
        ComplexField2D::from_values(grid, xi2)?,
        ComplexField2D::from_values(grid, xi3)?,
    ))
}

/// Centred first difference of a uniformly sampled sequence, one-sided at
/// the ends.
pub(crate) fn time_derivative(series: &[&[Complex64]], k: usize, dt: f64) -> Vec<Complex64> {
    let n = series.len();
    let (lo, hi, span) = if k == 0 {
        (0, 1, dt)
    } else if k == n - 1 {
        (n - 2, n - 1, dt)
    } else {
        (k - 1, k + 1, 2.0 * dt)
    };
    series[hi]
        .iter()
        .zip(series[lo])
        .map(|(a, b)| (a - b) / span)
        .collect()
}

/// Two-photon mismatch at each time sample of a control sequence.
pub fn two_photon_mismatch(
    pairs: &[ControlPair],
    omega21: f64,
    omega31: f64,
    dt: f64,
) -> Result<Vec<ComplexField2D>> {
    if pairs.len() < 2 {
        return Err(Error::param("pairs", "need at least two time samples"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", format!("{dt} must be positive")));
    }
    let grid = *pairs[0].grid();
    for p in pairs {
        if *p.grid() != grid {
            return Err(Error::GridMismatch);
        }
    }
    let ratios = pairs.iter().map(xi_ratios).collect::<Result<Vec<_>>>()?;
    let xi2c: Vec<Vec<Complex64>> = ratios.iter().map(|(a, _)| conj_values(a)).collect();
    let xi3c: Vec<Vec<Complex64>> = ratios.iter().map(|(_, b)| conj_values(b)).collect();
    let xi2c_refs: Vec<&[Complex64]> = xi2c.iter().map(Vec::as_slice).collect();
    let xi3c_refs: Vec<&[Complex64]> = xi3c.iter().map(Vec::as_slice).collect();

    let mut out = Vec::with_capacity(pairs.len());
    for (k, (xi2, xi3)) in ratios.iter().enumerate() {
        let d2 = time_derivative(&xi2c_refs, k, dt);
        let d3 = time_derivative(&xi3c_refs, k, dt);
        let values = (0..grid.len())
            .map(|i| {
                let (a, b) = (xi2.values()[i], xi3.values()[i]);
                let detuning = omega21 * a.norm_sqr() + omega31 * b.norm_sqr();
                let geometric = a * d2[i] + b * d3[i];
                Complex64::new(detuning, 0.0) - Complex64::i() * geometric
            })
            .collect();
        out.push(ComplexField2D::from_values(grid, values)?);
    }
    Ok(out)
}

fn conj_values(f: &ComplexField2D) -> Vec<Complex64> {
    f.values().iter().map(|v| v.conj()).collect()
}
