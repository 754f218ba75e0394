//! Paraxial evolution of the probe envelope.
//!
//! In the medium the probe obeys
//!
//! ```text
//! ∂t E + v_g [∂z + (1/v_g - 1/c) i δ - i ∇⊥² / 2k] E = (1 - v_g/c) (∂t Ωc / Ωc) E
//! ```
//!
//! which is integrated by Strang splitting: a spectral diffraction half step,
//! the pointwise phase and gain map, and a second diffraction half step.
//! Lengths are in wavelengths (`k = 2π`) and `c = 1`.

use num_complex::Complex64;

use crate::beams::ControlPair;
use crate::error::{Error, Result};
use crate::grid::{field_power, moments, ComplexField2D, TransverseGrid};
use crate::medium::{group_velocity_at, MediumParams};
use crate::spectral::SpectralPlan;

/// Probe wavenumber in units of inverse wavelength.
pub const WAVENUMBER: f64 = std::f64::consts::TAU;

/// Samples with `|E|` below this fraction of the peak are outside the support.
pub const SUPPORT_THRESHOLD: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    /// Time stepping with `dt = dz / v_g`; needs a uniform group velocity.
    Lab,
    /// Steady-envelope z stepping; the longitudinal motion becomes a
    /// per-sample delay.
    Comoving,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Boundary {
    Periodic,
    /// Super-Gaussian damping within `width` of the grid edge, applied after
    /// every step.
    Absorbing { width: f64, strength: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PropagationConfig {
    pub dz: f64,
    pub n_steps: usize,
    pub frame: Frame,
    pub boundary: Boundary,
}

impl PropagationConfig {
    pub fn comoving(dz: f64, n_steps: usize) -> Self {
        Self {
            dz,
            n_steps,
            frame: Frame::Comoving,
            boundary: Boundary::Periodic,
        }
    }

    pub fn validate(&self, grid: &TransverseGrid) -> Result<()> {
        if !(self.dz > 0.0 && self.dz.is_finite()) {
            return Err(Error::param("dz", format!("{} must be positive", self.dz)));
        }
        if let Boundary::Absorbing { width, strength } = self.boundary {
            let limit = grid.lx().min(grid.ly()) / 4.0;
            if !(width > 0.0 && width < limit) {
                return Err(Error::param(
                    "boundary.width",
                    format!("{width} must lie in (0, {limit})"),
                ));
            }
            if !(strength >= 0.0 && strength.is_finite()) {
                return Err(Error::param("boundary.strength", "must be >= 0"));
            }
        }
        Ok(())
    }
}

/// Exact free-space paraxial step over `dz`.
pub fn vacuum_step(field: &ComplexField2D, dz: f64) -> ComplexField2D {
    Diffraction::new(*field.grid()).apply(field, dz)
}

/// Spectral diffraction operator with cached plans.
#[derive(Debug, Clone)]
pub struct Diffraction {
    plan: SpectralPlan,
    wavenumber_sq: Vec<f64>,
}

impl Diffraction {
    pub fn new(grid: TransverseGrid) -> Self {
        let plan = SpectralPlan::new(grid);
        let wavenumber_sq = plan.wavenumber_sq();
        Self { plan, wavenumber_sq }
    }

    /// Multiplies each spectral sample by `exp(-i κ² distance / 2k)`.
    pub fn apply(&self, field: &ComplexField2D, distance: f64) -> ComplexField2D {
        let mut data = field.values().to_vec();
        self.apply_in_place(&mut data, distance);
        ComplexField2D::from_values(*field.grid(), data).expect("unitary step keeps values finite")
    }

    fn apply_in_place(&self, data: &mut [Complex64], distance: f64) {
        if distance == 0.0 {
            return;
        }
        self.plan.forward(data);
        let c = distance / (2.0 * WAVENUMBER);
        for (v, k2) in data.iter_mut().zip(&self.wavenumber_sq) {
            *v *= Complex64::from_polar(1.0, -k2 * c);
        }
        self.plan.inverse(data);
    }
}

/// Step length of one slow-light step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Step {
    /// Advance the steady envelope by `dz` along the medium.
    Space(f64),
    /// Advance the envelope by `dt` in time.
    Time(f64),
}

/// Control fields at the beginning and end of one step.
#[derive(Debug, Clone, Copy)]
pub struct StepControls<'a> {
    pub start: &'a ControlPair,
    pub end: &'a ControlPair,
}

impl<'a> StepControls<'a> {
    pub fn fixed(pair: &'a ControlPair) -> Self {
        Self { start: pair, end: pair }
    }
}

/// Pointwise quantities of the local (non-diffractive) part of one step.
struct LocalMap {
    factor: Vec<Complex64>,
    /// Extra transit time relative to vacuum, `(1/v_g - 1/c) dz`, space steps only.
    delay: Vec<f64>,
    velocity_start: Vec<f64>,
    velocity_end: Vec<f64>,
}

fn support_mask(field: &ComplexField2D) -> Vec<bool> {
    let cutoff = SUPPORT_THRESHOLD * field.max_abs();
    field.values().iter().map(|v| v.norm() > cutoff).collect()
}

fn local_map(
    field: &ComplexField2D,
    controls: StepControls<'_>,
    params: &MediumParams,
    step: Step,
) -> Result<LocalMap> {
    let grid = *field.grid();
    field.same_grid(&controls.start.omega_c2)?;
    field.same_grid(&controls.end.omega_c2)?;
    let support = support_mask(field);
    let rabi0 = controls.start.rabi_values();
    let rabi1 = controls.end.rabi_values();
    if let Some(idx) = (0..grid.len()).find(|&k| support[k] && rabi0[k] == 0.0) {
        return Err(crate::beams::zero_control_error(&grid, idx));
    }
    if let Step::Space(_) = step {
        if let Some(idx) = (0..grid.len()).find(|&k| support[k] && rabi1[k] == 0.0) {
            return Err(crate::beams::zero_control_error(&grid, idx));
        }
    }

    let g2n = params.coupling_density;
    let xi_start = ratios_or_zero(controls.start, &rabi0);
    let xi_end = ratios_or_zero(controls.end, &rabi1);

    let mut factor = Vec::with_capacity(grid.len());
    let mut delay = vec![0.0; grid.len()];
    let velocity_start: Vec<f64> = rabi0.iter().map(|&r| group_velocity_at(r, g2n)).collect();
    let velocity_end: Vec<f64> = rabi1.iter().map(|&r| group_velocity_at(r, g2n)).collect();
    for k in 0..grid.len() {
        let stalled = match step {
            Step::Time(_) => rabi0[k] == 0.0,
            Step::Space(_) => rabi0[k] == 0.0 || rabi1[k] == 0.0,
        };
        if stalled {
            // only reachable off the probe support
            factor.push(Complex64::new(1.0, 0.0));
            continue;
        }
        let (v0, v1) = (velocity_start[k], velocity_end[k]);
        let v_mid = 0.5 * (v0 + v1);
        let slow = 1.0 - v_mid;
        // duration of the step seen by this sample
        let tau = match step {
            Step::Time(dt) => dt,
            Step::Space(dz) => {
                delay[k] = (1.0 / v_mid - 1.0) * dz;
                dz / v_mid
            }
        };
        let (a0, b0) = xi_start[k];
        let (a1, b1) = xi_end[k];
        let (am, bm) = ((a0 + a1) * 0.5, (b0 + b1) * 0.5);
        let detuning = params.omega21 * 0.5 * (a0.norm_sqr() + a1.norm_sqr())
            + params.omega31 * 0.5 * (b0.norm_sqr() + b1.norm_sqr());
        // δ τ, with the geometric part -i ξ ∂t ξ* integrated over the step
        let delta_tau = Complex64::new(detuning * tau, 0.0)
            - Complex64::i() * (am * (a1 - a0).conj() + bm * (b1 - b0).conj());
        let phase = (-Complex64::i() * delta_tau * slow).exp();
        // (1 - v_g/c) d ln Ωc integrates exactly to sqrt(v_g(end) / v_g(start))
        let gain = (v1 / v0).sqrt();
        factor.push(phase * gain);
    }
    Ok(LocalMap {
        factor,
        delay,
        velocity_start,
        velocity_end,
    })
}

fn ratios_or_zero(pair: &ControlPair, rabi: &[f64]) -> Vec<(Complex64, Complex64)> {
    pair.omega_c2
        .values()
        .iter()
        .zip(pair.omega_c3.values())
        .zip(rabi)
        .map(|((w2, w3), &r)| {
            if r == 0.0 {
                (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))
            } else {
                (w2 / r, w3 / r)
            }
        })
        .collect()
}

fn uniform_velocity(v: &[f64]) -> Result<f64> {
    let first = v[0];
    if v.iter().all(|&x| (x - first).abs() <= 1e-12 * first.abs().max(1e-300)) {
        Ok(first)
    } else {
        Err(Error::NonUniformGroupVelocity)
    }
}

/// Slow-light stepper reusing spectral plans across steps.
#[derive(Debug, Clone)]
pub struct SlowLightStepper {
    diffraction: Diffraction,
    params: MediumParams,
}

/// One step's output: the field and the per-sample extra delay (space
/// steps; zeros for time steps).
#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub field: ComplexField2D,
    pub delay: Vec<f64>,
}

impl SlowLightStepper {
    pub fn new(grid: TransverseGrid, params: MediumParams) -> Self {
        Self {
            diffraction: Diffraction::new(grid),
            params,
        }
    }

    pub fn step(&self, field: &ComplexField2D, controls: StepControls<'_>, step: Step) -> Result<StepOutcome> {
        field.check_finite()?;
        let map = local_map(field, controls, &self.params, step)?;
        // diffraction lengths of the two half steps
        let (first, second) = match step {
            Step::Space(dz) => {
                if !(dz >= 0.0 && dz.is_finite()) {
                    return Err(Error::param("dz", "must be >= 0"));
                }
                (dz / 2.0, dz / 2.0)
            }
            Step::Time(dt) => {
                if !(dt >= 0.0 && dt.is_finite()) {
                    return Err(Error::param("dt", "must be >= 0"));
                }
                let v0 = uniform_velocity(&map.velocity_start)?;
                let v1 = uniform_velocity(&map.velocity_end)?;
                (v0 * dt / 2.0, v1 * dt / 2.0)
            }
        };
        let mut data = field.values().to_vec();
        self.diffraction.apply_in_place(&mut data, first);
        for (v, f) in data.iter_mut().zip(&map.factor) {
            *v *= f;
        }
        self.diffraction.apply_in_place(&mut data, second);
        Ok(StepOutcome {
            field: ComplexField2D::from_values(*field.grid(), data)?,
            delay: map.delay,
        })
    }
}

/// One split step of the slow-light equation.
pub fn slowlight_step(
    field: &ComplexField2D,
    controls: StepControls<'_>,
    params: &MediumParams,
    step: Step,
) -> Result<ComplexField2D> {
    Ok(SlowLightStepper::new(*field.grid(), *params).step(field, controls, step)?.field)
}

/// Controls seen along a run: fixed, or one pair per step boundary.
#[derive(Debug, Clone)]
pub enum ControlSchedule {
    Static(ControlPair),
    PerStep(Vec<ControlPair>),
}

impl ControlSchedule {
    fn at(&self, k: usize) -> &ControlPair {
        match self {
            ControlSchedule::Static(p) => p,
            ControlSchedule::PerStep(v) => &v[k],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticRow {
    pub step: usize,
    pub z: f64,
    pub power: f64,
    pub centroid_x: f64,
    pub centroid_y: f64,
    pub rms_width: f64,
}

impl DiagnosticRow {
    fn of(step: usize, z: f64, field: &ComplexField2D) -> Self {
        let (centroid_x, centroid_y, rms_width) = moments(field);
        Self {
            step,
            z,
            power: field_power(field),
            centroid_x,
            centroid_y,
            rms_width,
        }
    }
}

pub fn write_diagnostics_csv<W: std::io::Write>(mut w: W, rows: &[DiagnosticRow]) -> Result<()> {
    writeln!(w, "step,z,power,centroid_x,centroid_y,rms_width")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            r.step, r.z, r.power, r.centroid_x, r.centroid_y, r.rms_width
        )?;
    }
    Ok(())
}

#[derive(Debug, Clone)]
pub struct PropagationOutcome {
    pub field: ComplexField2D,
    pub diagnostics: Vec<DiagnosticRow>,
    /// Accumulated extra delay `∫ (1/v_g - 1/c) dz` per sample (zeros in the
    /// lab frame, where time is stepped explicitly).
    pub delay: ComplexField2D,
    /// Elapsed time in the lab frame.
    pub elapsed: f64,
}

fn absorbing_mask(grid: &TransverseGrid, width: f64, strength: f64) -> Vec<f64> {
    let (hx, hy) = (grid.lx() / 2.0, grid.ly() / 2.0);
    (0..grid.len())
        .map(|idx| {
            let (x, y) = grid.position(idx);
            let edge = (hx - x.abs()).min(hy - y.abs());
            if edge < width {
                let s = (width - edge) / width;
                (-strength * s.powi(4)).exp()
            } else {
                1.0
            }
        })
        .collect()
}

/// Runs the probe through the cloud step by step.
pub fn propagate_through_medium(
    initial_probe: &ComplexField2D,
    controls: &ControlSchedule,
    params: &MediumParams,
    config: &PropagationConfig,
) -> Result<PropagationOutcome> {
    let grid = *initial_probe.grid();
    config.validate(&grid)?;
    params.validate()?;
    if config.dz * config.n_steps as f64 > params.length * (1.0 + 1e-12) {
        return Err(Error::param(
            "n_steps",
            format!(
                "{} steps of {} exceed the medium length {}",
                config.n_steps, config.dz, params.length
            ),
        ));
    }
    if let ControlSchedule::PerStep(v) = controls {
        if v.len() != config.n_steps + 1 {
            return Err(Error::param("controls", "need one pair per step boundary"));
        }
    }
    let stepper = SlowLightStepper::new(grid, *params);
    let mask = match config.boundary {
        Boundary::Periodic => None,
        Boundary::Absorbing { width, strength } => Some(absorbing_mask(&grid, width, strength)),
    };

    let mut field = initial_probe.clone();
    let mut delay = vec![0.0; grid.len()];
    let mut elapsed = 0.0;
    let mut diagnostics = vec![DiagnosticRow::of(0, 0.0, &field)];
    for n in 0..config.n_steps {
        let step_controls = StepControls {
            start: controls.at(n),
            end: controls.at(n + 1),
        };
        let step = match config.frame {
            Frame::Comoving => Step::Space(config.dz),
            Frame::Lab => {
                let v = uniform_velocity(&step_controls.start.rabi_values().iter().map(|&r| group_velocity_at(r, params.coupling_density)).collect::<Vec<_>>())?;
                if v == 0.0 {
                    return Err(crate::beams::zero_control_error(&grid, 0));
                }
                let dt = config.dz / v;
                elapsed += dt;
                Step::Time(dt)
            }
        };
        let out = stepper
            .step(&field, step_controls, step)
            .map_err(|e| e.context(format!("step {n}")))?;
        field = out.field;
        for (d, s) in delay.iter_mut().zip(&out.delay) {
            *d += s;
        }
        if let Some(m) = &mask {
            for (v, f) in field.values_mut().iter_mut().zip(m) {
                *v *= f;
            }
        }
        diagnostics.push(DiagnosticRow::of(n + 1, (n + 1) as f64 * config.dz, &field));
    }
    if config.frame == Frame::Comoving {
        // lab-frame transit time of the on-axis sample
        elapsed = delay[grid.center_index()] + config.dz * config.n_steps as f64;
    }
    let delay = ComplexField2D::from_real_fn(grid, {
        let mut it = delay.into_iter();
        move |_, _| it.next().unwrap_or(0.0)
    });
    Ok(PropagationOutcome {
        field,
        diagnostics,
        delay,
        elapsed,
    })
}

/// On-axis longitudinal transit through a cloud occupying `[0, length]`,
/// with a control that is uniform in space but may vary in time.
///
/// The state is the polariton amplitude `Ψ = E / sqrt(v_g/c)`, which is
/// carried along the characteristics unchanged, so switching the control
/// off parks the pulse inside the medium instead of erasing it.
/// Advection is first-order upwind and exact at Courant number 1.
#[derive(Debug, Clone)]
pub struct LongitudinalTransit {
    pub cells: usize,
    pub dt: f64,
    pub params: MediumParams,
    /// Two-photon detuning seen by the probe.
    pub delta: f64,
}

#[derive(Debug, Clone)]
pub struct TransitRecord {
    pub times: Vec<f64>,
    pub input: Vec<Complex64>,
    pub output: Vec<Complex64>,
}

impl TransitRecord {
    /// `∫ |E|² dt` of a time trace.
    pub fn energy(trace: &[Complex64], dt: f64) -> f64 {
        trace.iter().map(|v| v.norm_sqr()).sum::<f64>() * dt
    }

    /// Intensity-weighted mean time of a trace.
    pub fn centroid(&self, trace: &[Complex64]) -> f64 {
        let w: f64 = trace.iter().map(|v| v.norm_sqr()).sum();
        trace.iter().zip(&self.times).map(|(v, t)| v.norm_sqr() * t).sum::<f64>() / w
    }
}

impl LongitudinalTransit {
    pub fn dz(&self) -> f64 {
        self.params.length / self.cells as f64
    }

    /// Drives the entrance with `input(t)` for `n_steps` steps, with total
    /// Rabi frequency `rabi(t)`, and records the field at the exit.
    pub fn run(
        &self,
        input: impl Fn(f64) -> Complex64,
        rabi: impl Fn(f64) -> f64,
        n_steps: usize,
    ) -> Result<TransitRecord> {
        self.params.validate()?;
        if self.cells == 0 {
            return Err(Error::param("cells", "must be positive"));
        }
        let dz = self.dz();
        let g2n = self.params.coupling_density;
        let mut psi = vec![Complex64::new(0.0, 0.0); self.cells];
        let mut record = TransitRecord {
            times: Vec::with_capacity(n_steps),
            input: Vec::with_capacity(n_steps),
            output: Vec::with_capacity(n_steps),
        };
        // ghost sample at the entrance plane, cells sit at z = (i + 1) dz
        let entrance = |t: f64, v: f64| -> Result<Complex64> {
            let inflow = input(t);
            if inflow == Complex64::new(0.0, 0.0) {
                Ok(inflow)
            } else if v == 0.0 {
                Err(Error::ZeroControlField { i: 0, j: 0 })
            } else {
                Ok(inflow / v.sqrt())
            }
        };
        let mut ghost = entrance(0.0, group_velocity_at(rabi(0.0), g2n))?;
        for n in 0..n_steps {
            let t0 = n as f64 * self.dt;
            let t1 = t0 + self.dt;
            let (v0, v1) = (group_velocity_at(rabi(t0), g2n), group_velocity_at(rabi(t1), g2n));
            let v_mid = 0.5 * (v0 + v1);
            let courant = v_mid * self.dt / dz;
            if courant > 1.0 + 1e-12 {
                return Err(Error::StepTooLarge(format!(
                    "v_g dt = {} exceeds dz = {dz}",
                    v_mid * self.dt
                )));
            }
            let phase = (-Complex64::i() * self.delta * (1.0 - v_mid) * self.dt).exp();
            for i in (0..self.cells).rev() {
                let upstream = if i == 0 { ghost } else { psi[i - 1] };
                psi[i] = (psi[i] - courant * (psi[i] - upstream)) * phase;
            }
            ghost = entrance(t1, v1)?;
            record.times.push(t1);
            record.input.push(input(t1));
            record.output.push(psi[self.cells - 1] * v1.sqrt());
        }
        Ok(record)
    }
}
