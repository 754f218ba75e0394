//! Storing the probe in ground-state coherences and releasing it again.
//!
//! Switching is abrupt: storage freezes `Φ2`, `Φ3` with the control ratios
//! held fixed while `Ωc → 0`, and retrieval maps the frozen coherences back
//! onto the probe through the new controls. The finite build-up time of the
//! regenerated field is resolved separately by [`regeneration_transient`].

use num_complex::Complex64;

use crate::beams::{zero_control_error, ControlBeamSpec, ControlPair};
use crate::error::{Error, Result};
use crate::grid::{field_power, ComplexField2D, TransverseGrid};
use crate::medium::{group_velocity_at, MediumParams};
use crate::propagation::SUPPORT_THRESHOLD;

/// Atomic coherences left behind after the controls are switched off.
#[derive(Debug, Clone, PartialEq)]
pub struct StoredCoherence {
    pub phi2: ComplexField2D,
    pub phi3: ComplexField2D,
    pub stored_xi2: ComplexField2D,
    pub stored_xi3: ComplexField2D,
    /// Total control Rabi frequency just before switch-off (real).
    pub storage_rabi: ComplexField2D,
    /// The probe that was stored.
    pub probe: ComplexField2D,
}

impl StoredCoherence {
    pub fn grid(&self) -> &TransverseGrid {
        self.phi2.grid()
    }

    /// Bright state with respect to the storage controls.
    pub fn bright(&self) -> ComplexField2D {
        let values = (0..self.grid().len())
            .map(|k| {
                self.stored_xi2.values()[k] * self.phi2.values()[k]
                    + self.stored_xi3.values()[k] * self.phi3.values()[k]
            })
            .collect();
        ComplexField2D::from_values(*self.grid(), values).expect("finite")
    }

    /// Pointwise `|Φ2|² + |Φ3|²`.
    pub fn density(&self) -> Vec<f64> {
        self.phi2
            .values()
            .iter()
            .zip(self.phi3.values())
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .collect()
    }
}

/// Outcome of releasing a stored pulse.
#[derive(Debug, Clone, PartialEq)]
pub struct RetrievalResult {
    pub probe: ComplexField2D,
    /// Spin excitation projected on the retrieval-time dark state.
    pub frozen_phi_d: ComplexField2D,
    /// Longitudinal rescaling `v_g(storage) / v_g(retrieval)` per sample.
    pub length_weight: ComplexField2D,
    pub probe_in: ComplexField2D,
    /// Energies per unit incident pulse length.
    pub energy_in: f64,
    pub energy_out: f64,
}

impl RetrievalResult {
    pub fn ratio(&self) -> f64 {
        if self.energy_in == 0.0 {
            0.0
        } else {
            self.energy_out / self.energy_in
        }
    }
}

fn probe_support(field: &ComplexField2D) -> Vec<bool> {
    let cutoff = SUPPORT_THRESHOLD * field.max_abs();
    field.values().iter().map(|v| v.norm() > cutoff).collect()
}

pub fn store(probe: &ComplexField2D, controls: &ControlPair, params: &MediumParams) -> Result<StoredCoherence> {
    probe.same_grid(&controls.omega_c2)?;
    probe.check_finite()?;
    let grid = *probe.grid();
    let rabi = controls.rabi_values();
    let support = probe_support(probe);
    if let Some(idx) = (0..grid.len()).find(|&k| support[k] && rabi[k] == 0.0) {
        return Err(zero_control_error(&grid, idx));
    }
    let gp = params.g_phi1();
    let zero = Complex64::new(0.0, 0.0);
    let n = grid.len();
    let (mut phi2, mut phi3, mut xi2, mut xi3) =
        (Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n));
    for (k, &r) in rabi.iter().enumerate() {
        if r == 0.0 {
            for v in [&mut phi2, &mut phi3, &mut xi2, &mut xi3] {
                v.push(zero);
            }
            continue;
        }
        let a = controls.omega_c2.values()[k] / r;
        let b = controls.omega_c3.values()[k] / r;
        let bright = -gp * probe.values()[k] / r;
        phi2.push(a.conj() * bright);
        phi3.push(b.conj() * bright);
        xi2.push(a);
        xi3.push(b);
    }
    Ok(StoredCoherence {
        phi2: ComplexField2D::from_values(grid, phi2)?,
        phi3: ComplexField2D::from_values(grid, phi3)?,
        stored_xi2: ComplexField2D::from_values(grid, xi2)?,
        stored_xi3: ComplexField2D::from_values(grid, xi3)?,
        storage_rabi: ComplexField2D::from_real_fn(grid, {
            let mut it = rabi.into_iter();
            move |_, _| it.next().unwrap_or(0.0)
        }),
        probe: probe.clone(),
    })
}

fn coherence_support(stored: &StoredCoherence) -> Vec<bool> {
    let density = stored.density();
    let max = density.iter().cloned().fold(0.0, f64::max).sqrt();
    let cutoff = SUPPORT_THRESHOLD * max;
    density.iter().map(|d| d.sqrt() > cutoff).collect()
}

pub fn retrieve(stored: &StoredCoherence, controls: &ControlPair, params: &MediumParams) -> Result<RetrievalResult> {
    stored.phi2.same_grid(&controls.omega_c2)?;
    let grid = *stored.grid();
    let rabi = controls.rabi_values();
    let support = coherence_support(stored);
    if let Some(idx) = (0..grid.len()).find(|&k| support[k] && rabi[k] == 0.0) {
        return Err(zero_control_error(&grid, idx));
    }
    let gp = params.g_phi1();
    let g2n = params.coupling_density;
    let zero = Complex64::new(0.0, 0.0);
    let (mut probe, mut dark, mut weight) = (
        Vec::with_capacity(grid.len()),
        Vec::with_capacity(grid.len()),
        Vec::with_capacity(grid.len()),
    );
    for (k, &r) in rabi.iter().enumerate() {
        let (w2, w3) = (controls.omega_c2.values()[k], controls.omega_c3.values()[k]);
        let (p2, p3) = (stored.phi2.values()[k], stored.phi3.values()[k]);
        // -(Ωr / gΦ1) (ξ2r ξ2s* + ξ3r ξ3s*) Φ_B(s), written through Φ2, Φ3
        let e = -(w2 * p2 + w3 * p3) / gp;
        probe.push(e);
        if r == 0.0 {
            dark.push(zero);
            weight.push(0.0);
            continue;
        }
        dark.push((w3.conj() * p2 - w2.conj() * p3) / r);
        let vs = group_velocity_at(stored.storage_rabi.values()[k].re, g2n);
        let vr = group_velocity_at(r, g2n);
        weight.push(vs / vr);
    }
    let probe = ComplexField2D::from_values(grid, probe)?;
    let energy_out = probe
        .values()
        .iter()
        .zip(&weight)
        .map(|(e, w)| if e.norm_sqr() == 0.0 { 0.0 } else { e.norm_sqr() * w })
        .sum::<f64>()
        * grid.cell_area();
    Ok(RetrievalResult {
        energy_in: field_power(&stored.probe),
        energy_out,
        probe,
        frozen_phi_d: ComplexField2D::from_values(grid, dark)?,
        length_weight: ComplexField2D::from_real_fn(grid, {
            let mut it = weight.into_iter();
            move |_, _| it.next().unwrap_or(0.0)
        }),
        probe_in: stored.probe.clone(),
    })
}

/// Field regenerated at one sample from a bright-state coherence `Φ_B(0)`
/// once the control `rabi` is switched on at `t = 0`.
///
/// The build-up obeys
/// `[1 + (g²n/Ωc²)(1 - e^{-Ωc² t/γ})] ∂t E = -(gΦ1*/γ)[gΦ1 E + Ωc Φ_B(0)] e^{-Ωc² t/γ}`
/// with `E(0) = 0`, i.e. a relaxation `∂t E = -λ(t) (E - E_ss)` towards
/// `E_ss = -Ωc Φ_B(0) / gΦ1`. Each step applies
/// `E - E_ss ← (E - E_ss) exp(-dt (λ(t) + λ(t + dt)) / 2)`, which is second
/// order and stable for the stiff start of the transient.
pub fn regenerate_sample(bright0: Complex64, rabi: f64, params: &MediumParams, dt: f64, n_steps: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(n_steps + 1);
    out.push(Complex64::new(0.0, 0.0));
    if rabi == 0.0 || bright0 == Complex64::new(0.0, 0.0) {
        out.resize(n_steps + 1, Complex64::new(0.0, 0.0));
        return out;
    }
    let g2n = params.coupling_density;
    let gamma = params.gamma;
    let r2 = rabi * rabi;
    let rate = |t: f64| {
        let decay = (-r2 * t / gamma).exp();
        (g2n / gamma) * decay / (1.0 + (g2n / r2) * (1.0 - decay))
    };
    let target = steady_state_sample(bright0, rabi, params);
    let mut deviation = -target;
    let mut lam = rate(0.0);
    for n in 0..n_steps {
        let next = rate((n + 1) as f64 * dt);
        deviation *= (-0.5 * dt * (lam + next)).exp();
        lam = next;
        out.push(target + deviation);
    }
    out
}

/// Steady regenerated field `-Ωc Φ_B(0) / gΦ1`.
pub fn steady_state_sample(bright0: Complex64, rabi: f64, params: &MediumParams) -> Complex64 {
    -bright0 * rabi / params.g_phi1()
}

#[derive(Debug, Clone)]
pub struct RegenerationSeries {
    pub times: Vec<f64>,
    pub fields: Vec<ComplexField2D>,
}

/// Pointwise regeneration of the probe from stored coherences.
pub fn regeneration_transient(
    stored: &StoredCoherence,
    controls: &ControlPair,
    params: &MediumParams,
    dt: f64,
    t_max: f64,
) -> Result<RegenerationSeries> {
    params.validate()?;
    stored.phi2.same_grid(&controls.omega_c2)?;
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::param("dt", format!("{dt} must be positive")));
    }
    if !(t_max >= 0.0 && t_max.is_finite()) {
        return Err(Error::param("t_max", "must be >= 0"));
    }
    let grid = *stored.grid();
    let rabi = controls.rabi_values();
    let rabi_max = rabi.iter().cloned().fold(0.0, f64::max);
    let limit = 0.1 * params.gamma / (rabi_max * rabi_max);
    if dt > limit {
        return Err(Error::StepTooLarge(format!(
            "dt = {dt} exceeds 0.1 gamma / Omega_c^2 = {limit}"
        )));
    }
    let support = coherence_support(stored);
    if let Some(idx) = (0..grid.len()).find(|&k| support[k] && rabi[k] == 0.0) {
        return Err(zero_control_error(&grid, idx));
    }
    let n_steps = (t_max / dt).round() as usize;
    let per_sample: Vec<Vec<Complex64>> = (0..grid.len())
        .map(|k| {
            let (w2, w3) = (controls.omega_c2.values()[k], controls.omega_c3.values()[k]);
            let bright = if rabi[k] == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                (w2 * stored.phi2.values()[k] + w3 * stored.phi3.values()[k]) / rabi[k]
            };
            regenerate_sample(bright, rabi[k], params, dt, n_steps)
        })
        .collect();
    let times = (0..=n_steps).map(|n| n as f64 * dt).collect();
    let fields = (0..=n_steps)
        .map(|n| ComplexField2D::from_values(grid, per_sample.iter().map(|s| s[n]).collect()))
        .collect::<Result<Vec<_>>>()?;
    Ok(RegenerationSeries { times, fields })
}

/// Beam parameters of the vortex-transfer protocols (widths in wavelengths).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexTransfer {
    /// Common control amplitude `A`.
    pub amplitude: f64,
    /// Retrieval-to-storage amplitude ratio of the first control.
    pub a: f64,
    /// Relative amplitude of the vortex-free second control.
    pub b: f64,
    pub sigma_s: f64,
    pub sigma_r: f64,
    pub sigma_r3: f64,
}

impl VortexTransfer {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("amplitude", self.amplitude),
            ("a", self.a),
            ("sigma_s", self.sigma_s),
            ("sigma_r", self.sigma_r),
            ("sigma_r3", self.sigma_r3),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::param(name, format!("{v} must be positive")));
            }
        }
        if !(self.b >= 0.0 && self.b.is_finite()) {
            return Err(Error::param("b", format!("{} must be >= 0", self.b)));
        }
        Ok(())
    }

    /// Λ storage with a Gaussian control, tripod retrieval with an LG1
    /// first control and a Gaussian second control.
    pub fn lambda_store_controls(&self, grid: &TransverseGrid) -> Result<(ControlPair, ControlPair)> {
        self.validate()?;
        let storage = ControlPair::lambda(
            &ControlBeamSpec::gaussian(self.amplitude, self.sigma_s).with_factor(1.0 / self.a),
            grid,
        )?;
        let retrieval = ControlPair::from_specs(
            &ControlBeamSpec::vortex(self.amplitude, self.sigma_r),
            &ControlBeamSpec::gaussian(self.amplitude, self.sigma_r3).with_factor(self.b),
            grid,
        )?;
        Ok((storage, retrieval))
    }

    /// Tripod storage with LG1 + Gaussian controls, Λ retrieval with a
    /// Gaussian control.
    pub fn tripod_store_controls(&self, grid: &TransverseGrid) -> Result<(ControlPair, ControlPair)> {
        self.validate()?;
        if self.b <= 0.0 {
            return Err(Error::param("b", "tripod storage needs b > 0 to cover the vortex core"));
        }
        let storage = ControlPair::from_specs(
            &ControlBeamSpec::vortex(self.amplitude, self.sigma_s),
            &ControlBeamSpec::gaussian(self.amplitude, self.sigma_s).with_factor(self.b),
            grid,
        )?;
        let retrieval = ControlPair::lambda(
            &ControlBeamSpec::gaussian(self.amplitude, self.sigma_r).with_factor(self.a),
            grid,
        )?;
        Ok((storage, retrieval))
    }
}

/// Λ store, tripod retrieve: the retrieval vortex is imprinted on the probe.
pub fn lambda_store_tripod_retrieve(
    probe: &ComplexField2D,
    transfer: &VortexTransfer,
    params: &MediumParams,
) -> Result<RetrievalResult> {
    let (storage, retrieval) = transfer.lambda_store_controls(probe.grid())?;
    let stored = store(probe, &storage, params)?;
    retrieve(&stored, &retrieval, params)
}

/// Tripod store, Λ retrieve: the storage vortex returns phase conjugated.
pub fn tripod_store_lambda_retrieve(
    probe: &ComplexField2D,
    transfer: &VortexTransfer,
    params: &MediumParams,
) -> Result<RetrievalResult> {
    let (storage, retrieval) = transfer.tripod_store_controls(probe.grid())?;
    let stored = store(probe, &storage, params)?;
    retrieve(&stored, &retrieval, params)
}

fn width_factor(rho2: f64, sigma_r: f64, sigma_s: f64) -> f64 {
    (-rho2 * (sigma_r.powi(-2) - sigma_s.powi(-2))).exp()
}

/// `a ρ e^{iφ} exp[-ρ²(σr⁻² - σs⁻²)] E(s)`.
pub fn lambda_store_closed_form(probe: &ComplexField2D, transfer: &VortexTransfer) -> ComplexField2D {
    let grid = *probe.grid();
    let values = probe
        .values()
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let (x, y) = grid.position(idx);
            let rho2 = x * x + y * y;
            Complex64::new(x, y) * (transfer.a * width_factor(rho2, transfer.sigma_r, transfer.sigma_s)) * e
        })
        .collect();
    ComplexField2D::from_values(grid, values).expect("finite closed form")
}

/// `a ρ e^{-iφ} / (ρ² + b²) exp[-ρ²(σr⁻² - σs⁻²)] E(s)`.
pub fn tripod_store_closed_form(probe: &ComplexField2D, transfer: &VortexTransfer) -> ComplexField2D {
    let grid = *probe.grid();
    let b2 = transfer.b * transfer.b;
    let values = probe
        .values()
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            let (x, y) = grid.position(idx);
            let rho2 = x * x + y * y;
            let scale = transfer.a / (rho2 + b2) * width_factor(rho2, transfer.sigma_r, transfer.sigma_s);
            Complex64::new(x, -y) * scale * e
        })
        .collect();
    ComplexField2D::from_values(grid, values).expect("finite closed form")
}

/// Largest pointwise deviation relative to the reference; samples where the
/// reference vanishes are compared against its peak instead.
pub fn max_pointwise_relative_error(field: &ComplexField2D, reference: &ComplexField2D) -> Result<f64> {
    field.same_grid(reference)?;
    let peak = reference.max_abs();
    Ok(field
        .values()
        .iter()
        .zip(reference.values())
        .map(|(a, b)| {
            let d = (a - b).norm();
            if b.norm() > 0.0 {
                d / b.norm()
            } else if peak > 0.0 {
                d / peak
            } else {
                d
            }
        })
        .fold(0.0, f64::max))
}
