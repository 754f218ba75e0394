//! Atomic-state algebra for the tripod medium.
//!
//! Ground-state coherences `Φ2`, `Φ3` are rotated into the bright state
//! `Φ_B`, which couples to the excited level through the total control Rabi
//! frequency, and the dark state `Φ_D`, which does not.

use num_complex::Complex64;

use crate::beams::{time_derivative, zero_control_error, ControlPair};
use crate::error::{Error, Result};
use crate::grid::ComplexField2D;

/// Material constants of the atomic cloud. Frequencies share one unit; the
/// speed of light is 1, so a group velocity is a fraction of `c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MediumParams {
    /// `g² n`, squared coupling frequency of the probe transition.
    pub coupling_density: f64,
    /// Excited-state decay rate.
    pub gamma: f64,
    pub omega01: f64,
    pub omega21: f64,
    pub omega31: f64,
    /// Extent of the cloud along z in wavelengths.
    pub length: f64,
    /// Ground-state amplitude `|Φ1| = sqrt(n)`.
    pub phi1_amplitude: f64,
}

impl Default for MediumParams {
    fn default() -> Self {
        Self {
            coupling_density: 1.0e6,
            gamma: 1.0,
            omega01: 0.0,
            omega21: 0.0,
            omega31: 0.0,
            length: 100.0,
            phi1_amplitude: 1.0,
        }
    }
}

impl MediumParams {
    /// Condensate phase of level 1. Frozen at zero; kept as a named constant
    /// so the formulas below carry `Φ1` as a complex amplitude.
    pub const CONDENSATE_PHASE: f64 = 0.0;

    pub fn validate(&self) -> Result<()> {
        if !(self.coupling_density >= 0.0 && self.coupling_density.is_finite()) {
            return Err(Error::param("coupling_density", "must be finite and >= 0"));
        }
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            return Err(Error::param("gamma", "must be positive"));
        }
        for (name, v) in [("omega01", self.omega01), ("omega21", self.omega21), ("omega31", self.omega31)] {
            if !v.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if !(self.length > 0.0 && self.length.is_finite()) {
            return Err(Error::param("length", "must be positive"));
        }
        if !(self.phi1_amplitude > 0.0 && self.phi1_amplitude.is_finite()) {
            return Err(Error::param("phi1_amplitude", "must be positive"));
        }
        Ok(())
    }

    /// Single-atom coupling `g`.
    pub fn g(&self) -> f64 {
        self.coupling_density.sqrt() / self.phi1_amplitude
    }

    pub fn phi1(&self) -> Complex64 {
        Complex64::from_polar(self.phi1_amplitude, Self::CONDENSATE_PHASE)
    }

    /// `g Φ1`; its modulus squared is `g² n`.
    pub fn g_phi1(&self) -> Complex64 {
        self.phi1() * self.g()
    }
}

/// Ground-state coherence amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicFields {
    pub phi2: ComplexField2D,
    pub phi3: ComplexField2D,
}

impl AtomicFields {
    pub fn new(phi2: ComplexField2D, phi3: ComplexField2D) -> Result<Self> {
        phi2.same_grid(&phi3)?;
        Ok(Self { phi2, phi3 })
    }
}

fn checked_rabi(pair: &ControlPair) -> Result<Vec<f64>> {
    let rabi = pair.rabi_values();
    match rabi.iter().position(|&r| r == 0.0) {
        Some(idx) => Err(zero_control_error(pair.grid(), idx)),
        None => Ok(rabi),
    }
}

pub fn to_bright_dark(atomic: &AtomicFields, pair: &ControlPair) -> Result<(ComplexField2D, ComplexField2D)> {
    atomic.phi2.same_grid(&pair.omega_c2)?;
    atomic.phi2.same_grid(&atomic.phi3)?;
    let rabi = checked_rabi(pair)?;
    let grid = *pair.grid();
    let (mut bright, mut dark) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    for (k, &r) in rabi.iter().enumerate() {
        let (w2, w3) = (pair.omega_c2.values()[k], pair.omega_c3.values()[k]);
        let (p2, p3) = (atomic.phi2.values()[k], atomic.phi3.values()[k]);
        bright.push((w2 * p2 + w3 * p3) / r);
        dark.push((w3.conj() * p2 - w2.conj() * p3) / r);
    }
    Ok((
        ComplexField2D::from_values(grid, bright)?,
        ComplexField2D::from_values(grid, dark)?,
    ))
}

pub fn from_bright_dark(bright: &ComplexField2D, dark: &ComplexField2D, pair: &ControlPair) -> Result<AtomicFields> {
    bright.same_grid(dark)?;
    bright.same_grid(&pair.omega_c2)?;
    let rabi = checked_rabi(pair)?;
    let grid = *pair.grid();
    let (mut phi2, mut phi3) = (Vec::with_capacity(grid.len()), Vec::with_capacity(grid.len()));
    for (k, &r) in rabi.iter().enumerate() {
        let (w2, w3) = (pair.omega_c2.values()[k], pair.omega_c3.values()[k]);
        let (b, d) = (bright.values()[k], dark.values()[k]);
        phi2.push((w2.conj() * b + w3 * d) / r);
        phi3.push((w3.conj() * b - w2 * d) / r);
    }
    AtomicFields::new(
        ComplexField2D::from_values(grid, phi2)?,
        ComplexField2D::from_values(grid, phi3)?,
    )
}

/// Bright-state amplitude slaved to the probe once the excited state is
/// eliminated: `Φ_B = -g Φ1 E / Ωc`.
pub fn adiabatic_bright(probe: &ComplexField2D, pair: &ControlPair, params: &MediumParams) -> Result<ComplexField2D> {
    probe.same_grid(&pair.omega_c2)?;
    let rabi = checked_rabi(pair)?;
    let gp = params.g_phi1();
    let values = probe.values().iter().zip(&rabi).map(|(e, r)| -gp * e / r).collect();
    ComplexField2D::from_values(*probe.grid(), values)
}

/// Pointwise `v_g / c = 1 / (1 + g²n / Ωc²)`; zero where the control
/// vanishes inside a medium, one everywhere when `g²n = 0`.
pub fn group_velocity(pair: &ControlPair, params: &MediumParams) -> ComplexField2D {
    let values = pair
        .rabi_values()
        .into_iter()
        .map(|r| Complex64::new(group_velocity_at(r, params.coupling_density), 0.0))
        .collect();
    ComplexField2D::from_values(*pair.grid(), values).expect("group velocity is finite")
}

/// Scalar group velocity for a total Rabi frequency `rabi`, in units of c.
pub fn group_velocity_at(rabi: f64, coupling_density: f64) -> f64 {
    let r2 = rabi * rabi;
    if coupling_density == 0.0 {
        1.0
    } else if r2 == 0.0 {
        0.0
    } else {
        r2 / (r2 + coupling_density)
    }
}

/// Excited-state amplitude `Φ0 = Ωc⁻¹ (-i ∂t + δ) Φ_B` at each time sample.
pub fn excited_from_bright(
    bright_t: &[ComplexField2D],
    pair: &ControlPair,
    delta_t: &[ComplexField2D],
    dt: f64,
) -> Result<Vec<ComplexField2D>> {
    if bright_t.len() < 2 {
        return Err(Error::param("bright_t", "need at least two time samples"));
    }
    if delta_t.len() != bright_t.len() {
        return Err(Error::param("delta_t", "must have one sample per bright-state sample"));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", format!("{dt} must be positive")));
    }
    let grid = *pair.grid();
    for f in bright_t.iter().chain(delta_t) {
        if *f.grid() != grid {
            return Err(Error::GridMismatch);
        }
    }
    let rabi = checked_rabi(pair)?;
    let series: Vec<&[Complex64]> = bright_t.iter().map(|f| f.values()).collect();
    let mut out = Vec::with_capacity(bright_t.len());
    for k in 0..bright_t.len() {
        let deriv = time_derivative(&series, k, dt);
        let values = (0..grid.len())
            .map(|i| (-Complex64::i() * deriv[i] + delta_t[k].values()[i] * series[k][i]) / rabi[i])
            .collect();
        out.push(ComplexField2D::from_values(grid, values)?);
    }
    Ok(out)
}
