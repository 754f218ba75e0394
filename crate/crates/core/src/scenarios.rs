//! End-to-end scenarios with embedded pass/fail assertions.
//!
//! Each run yields a [`ScenarioReport`]: summary values, assertions, field
//! dumps and auxiliary CSV tables, written to disk as
//!
//! ```text
//! <dir>/report.csv       key,value summary
//! <dir>/assertions.csv   name,expected,actual,tolerance,pass
//! <dir>/fields/*.tsl     binary field dumps
//! <dir>/*.csv            scenario tables (transit trace, loss curve, ...)
//! ```

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analysis::{
    loss_curve, loss_ratio_analytic, loss_ratio_from_fields, winding_number, write_loss_curve_csv, LossQuery,
};
use crate::beams::{xi_ratios, ControlPair};
use crate::error::{Error, Result};
use crate::grid::{field_power, moments, ComplexField2D, TransverseGrid};
use crate::io::save_field;
use crate::medium::{from_bright_dark, group_velocity_at, to_bright_dark, AtomicFields, MediumParams};
use crate::propagation::{Diffraction, LongitudinalTransit, TransitRecord};
use crate::storage::{
    lambda_store_closed_form, max_pointwise_relative_error, retrieve, store, tripod_store_closed_form,
    RetrievalResult, VortexTransfer,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ScenarioKind {
    VacuumDiffraction,
    EitTransit,
    LambdaStoreTripodRetrieve,
    TripodStoreLambdaRetrieve,
    LossCurve,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 5] = [
        ScenarioKind::VacuumDiffraction,
        ScenarioKind::EitTransit,
        ScenarioKind::LambdaStoreTripodRetrieve,
        ScenarioKind::TripodStoreLambdaRetrieve,
        ScenarioKind::LossCurve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::VacuumDiffraction => "vacuum_diffraction",
            ScenarioKind::EitTransit => "eit_transit",
            ScenarioKind::LambdaStoreTripodRetrieve => "lambda_store_tripod_retrieve",
            ScenarioKind::TripodStoreLambdaRetrieve => "tripod_store_lambda_retrieve",
            ScenarioKind::LossCurve => "loss_curve",
        }
    }

    pub fn from_name(name: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == name)
    }
}

impl std::fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Square simulation window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub n: usize,
    pub length: f64,
}

impl GridSpec {
    pub fn build(&self) -> Result<TransverseGrid> {
        TransverseGrid::square(self.n, self.length)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VacuumDiffractionParams {
    pub grid: GridSpec,
    pub waist: f64,
    /// Propagation distance in Rayleigh ranges `π w0²`.
    pub distance_rayleigh: f64,
    pub steps: usize,
}

impl Default for VacuumDiffractionParams {
    fn default() -> Self {
        VacuumDiffractionParams {
            grid: GridSpec { n: 256, length: 32.0 },
            waist: 2.0,
            distance_rayleigh: 1.0,
            steps: 4,
        }
    }
}

/// One-dimensional pulse transit, optionally parked by switching the
/// control off for `hold_duration` starting at `hold_start`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EitTransitParams {
    pub cells: usize,
    pub length: f64,
    pub coupling_density: f64,
    pub rabi: f64,
    pub delta: f64,
    /// Centre and half-width of the compact cos² input pulse.
    pub pulse_center: f64,
    pub pulse_half_width: f64,
    pub duration: f64,
    pub hold_start: f64,
    pub hold_duration: f64,
    /// Linear switch-off/on time of the control around the hold.
    pub ramp: f64,
}

impl Default for EitTransitParams {
    fn default() -> Self {
        EitTransitParams {
            cells: 200,
            length: 50.0,
            coupling_density: 99.0,
            rabi: 1.0,
            delta: 0.0,
            pulse_center: 2000.0,
            pulse_half_width: 1000.0,
            duration: 10_000.0,
            hold_start: 0.0,
            hold_duration: 0.0,
            ramp: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VortexTransferParams {
    pub grid: GridSpec,
    /// Width of the Gaussian probe.
    pub sigma_p: f64,
    pub transfer: VortexTransfer,
    pub coupling_density: f64,
    /// Randomized algebraic checks run alongside the transfer.
    pub random_instances: usize,
}

impl Default for VortexTransferParams {
    fn default() -> Self {
        VortexTransferParams {
            grid: GridSpec { n: 256, length: 160.0 },
            sigma_p: 10.0,
            transfer: VortexTransfer {
                amplitude: 1.0,
                a: 1.0,
                b: 10.0,
                sigma_s: 20.0,
                sigma_r: 20.0,
                sigma_r3: 20.0,
            },
            coupling_density: 1.0e12,
            random_instances: 100,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCurveParams {
    pub b_start: f64,
    pub b_end: f64,
    pub count: usize,
    pub sigma_p: f64,
    /// Widths of the two retrieval controls (storage uses `sigma_r`).
    pub sigma_r: f64,
    pub sigma_r3: f64,
    /// Grid size for the optional field-based column; 0 skips it.
    pub field_grid: usize,
    /// Field window in units of `sigma_p`.
    pub field_window: f64,
}

impl Default for LossCurveParams {
    fn default() -> Self {
        LossCurveParams {
            b_start: 0.0,
            b_end: 30.0,
            count: 31,
            sigma_p: 10.0,
            sigma_r: 20.0,
            sigma_r3: 20.0,
            field_grid: 0,
            field_window: 16.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ScenarioParams {
    VacuumDiffraction(VacuumDiffractionParams),
    EitTransit(EitTransitParams),
    LambdaStoreTripodRetrieve(VortexTransferParams),
    TripodStoreLambdaRetrieve(VortexTransferParams),
    LossCurve(LossCurveParams),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScenarioSpec {
    pub params: ScenarioParams,
    pub seed: u64,
}

impl ScenarioSpec {
    /// The documented defaults of a scenario kind.
    pub fn defaults(kind: ScenarioKind) -> Self {
        let params = match kind {
            ScenarioKind::VacuumDiffraction => ScenarioParams::VacuumDiffraction(Default::default()),
            ScenarioKind::EitTransit => ScenarioParams::EitTransit(Default::default()),
            ScenarioKind::LambdaStoreTripodRetrieve => ScenarioParams::LambdaStoreTripodRetrieve(Default::default()),
            ScenarioKind::TripodStoreLambdaRetrieve => ScenarioParams::TripodStoreLambdaRetrieve(Default::default()),
            ScenarioKind::LossCurve => ScenarioParams::LossCurve(Default::default()),
        };
        ScenarioSpec { params, seed: 1 }
    }

    pub fn kind(&self) -> ScenarioKind {
        match self.params {
            ScenarioParams::VacuumDiffraction(_) => ScenarioKind::VacuumDiffraction,
            ScenarioParams::EitTransit(_) => ScenarioKind::EitTransit,
            ScenarioParams::LambdaStoreTripodRetrieve(_) => ScenarioKind::LambdaStoreTripodRetrieve,
            ScenarioParams::TripodStoreLambdaRetrieve(_) => ScenarioKind::TripodStoreLambdaRetrieve,
            ScenarioParams::LossCurve(_) => ScenarioKind::LossCurve,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} must be positive")))
            }
        };
        let non_negative = |name: &'static str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::param(name, format!("{v} must be >= 0")))
            }
        };
        match &self.params {
            ScenarioParams::VacuumDiffraction(p) => {
                p.grid.build()?;
                positive("waist", p.waist)?;
                non_negative("distance_rayleigh", p.distance_rayleigh)?;
                if p.steps == 0 {
                    return Err(Error::param("steps", "must be at least 1"));
                }
            }
            ScenarioParams::EitTransit(p) => {
                if p.cells == 0 {
                    return Err(Error::param("cells", "must be at least 1"));
                }
                positive("length", p.length)?;
                non_negative("coupling_density", p.coupling_density)?;
                positive("rabi", p.rabi)?;
                positive("pulse_half_width", p.pulse_half_width)?;
                positive("duration", p.duration)?;
                non_negative("hold_duration", p.hold_duration)?;
                non_negative("ramp", p.ramp)?;
                non_negative("hold_start", p.hold_start)?;
                if !p.delta.is_finite() {
                    return Err(Error::param("delta", "must be finite"));
                }
                if p.pulse_center < p.pulse_half_width {
                    return Err(Error::param("pulse_center", "pulse must start at t >= 0"));
                }
                if p.hold_duration > 0.0 && p.hold_start < p.ramp {
                    return Err(Error::param("hold_start", "switch-off ramp must start at t >= 0"));
                }
            }
            ScenarioParams::LambdaStoreTripodRetrieve(p) | ScenarioParams::TripodStoreLambdaRetrieve(p) => {
                p.grid.build()?;
                positive("sigma_p", p.sigma_p)?;
                p.transfer.validate()?;
                non_negative("coupling_density", p.coupling_density)?;
                if self.kind() == ScenarioKind::TripodStoreLambdaRetrieve && p.transfer.b <= 0.0 {
                    return Err(Error::param("b", "tripod storage needs b > 0"));
                }
            }
            ScenarioParams::LossCurve(p) => {
                non_negative("b_start", p.b_start)?;
                non_negative("b_end", p.b_end)?;
                if p.b_end < p.b_start {
                    return Err(Error::param("b_end", "must not be below b_start"));
                }
                if p.count == 0 {
                    return Err(Error::param("count", "must be at least 1"));
                }
                positive("sigma_p", p.sigma_p)?;
                positive("sigma_r", p.sigma_r)?;
                positive("sigma_r3", p.sigma_r3)?;
                positive("field_window", p.field_window)?;
                if p.field_grid != 0 {
                    GridSpec { n: p.field_grid, length: p.field_window * p.sigma_p }.build()?;
                }
            }
        }
        Ok(())
    }
}

/// One embedded check: `|actual - expected| <= tolerance`.
#[derive(Debug, Clone, PartialEq)]
pub struct Assertion {
    pub name: String,
    pub expected: f64,
    pub actual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Assertion {
    pub fn within(name: impl Into<String>, expected: f64, actual: f64, tolerance: f64) -> Self {
        Assertion {
            name: name.into(),
            expected,
            actual,
            tolerance,
            pass: (actual - expected).abs() <= tolerance,
        }
    }

    pub fn relative(name: impl Into<String>, expected: f64, actual: f64, rel: f64) -> Self {
        Self::within(name, expected, actual, rel * expected.abs())
    }

    /// Passes when `actual` is true; recorded as 1/0.
    pub fn holds(name: impl Into<String>, actual: bool) -> Self {
        Self::within(name, 1.0, if actual { 1.0 } else { 0.0 }, 0.0)
    }
}

#[derive(Debug, Clone)]
pub struct ScenarioReport {
    pub kind: ScenarioKind,
    pub summary: Vec<(String, f64)>,
    pub assertions: Vec<Assertion>,
    pub fields: Vec<(String, ComplexField2D)>,
    /// Extra CSV files: (file name, contents).
    pub tables: Vec<(String, String)>,
}

impl ScenarioReport {
    fn new(kind: ScenarioKind) -> Self {
        ScenarioReport {
            kind,
            summary: Vec::new(),
            assertions: Vec::new(),
            fields: Vec::new(),
            tables: Vec::new(),
        }
    }

    fn note(&mut self, key: &str, value: f64) {
        self.summary.push((key.to_string(), value));
    }

    pub fn passed(&self) -> bool {
        self.assertions.iter().all(|a| a.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Assertion> {
        self.assertions.iter().filter(|a| !a.pass)
    }

    pub fn summary_value(&self, key: &str) -> Option<f64> {
        self.summary.iter().find(|(k, _)| k == key).map(|(_, v)| *v)
    }

    pub fn assertion(&self, name: &str) -> Option<&Assertion> {
        self.assertions.iter().find(|a| a.name == name)
    }

    pub fn summary_csv(&self) -> String {
        let mut out = String::from("key,value\n");
        let _ = writeln!(out, "kind,{}", self.kind);
        for (k, v) in &self.summary {
            let _ = writeln!(out, "{k},{v}");
        }
        out
    }

    pub fn assertions_csv(&self) -> String {
        let mut out = String::from("name,expected,actual,tolerance,pass\n");
        for a in &self.assertions {
            let _ = writeln!(out, "{},{},{},{},{}", a.name, a.expected, a.actual, a.tolerance, a.pass);
        }
        out
    }

    pub fn write_to(&self, dir: &Path) -> Result<()> {
        let ctx = |e: Error| e.context(format!("writing report to {}", dir.display()));
        let fields_dir = dir.join("fields");
        std::fs::create_dir_all(&fields_dir).map_err(|e| ctx(e.into()))?;
        std::fs::write(dir.join("report.csv"), self.summary_csv()).map_err(|e| ctx(e.into()))?;
        std::fs::write(dir.join("assertions.csv"), self.assertions_csv()).map_err(|e| ctx(e.into()))?;
        for (name, field) in &self.fields {
            save_field(fields_dir.join(format!("{name}.tsl")), field).map_err(ctx)?;
        }
        for (name, body) in &self.tables {
            std::fs::write(dir.join(name), body).map_err(|e| ctx(e.into()))?;
        }
        Ok(())
    }
}

pub fn run_scenario(spec: &ScenarioSpec) -> Result<ScenarioReport> {
    let kind = spec.kind();
    let run = || -> Result<ScenarioReport> {
        spec.validate()?;
        match &spec.params {
            ScenarioParams::VacuumDiffraction(p) => run_vacuum(p),
            ScenarioParams::EitTransit(p) => run_transit(p),
            ScenarioParams::LambdaStoreTripodRetrieve(p) | ScenarioParams::TripodStoreLambdaRetrieve(p) => {
                run_vortex(kind, p, spec.seed)
            }
            ScenarioParams::LossCurve(p) => run_loss_curve(p),
        }
    };
    run().map_err(|e| e.context(format!("scenario {kind}")))
}

/// Every kind at its defaults.
pub fn check_suite(seed: u64) -> Result<Vec<ScenarioReport>> {
    ScenarioKind::ALL
        .into_iter()
        .map(|kind| {
            let mut spec = ScenarioSpec::defaults(kind);
            spec.seed = seed;
            run_scenario(&spec)
        })
        .collect()
}

fn gaussian_probe(grid: TransverseGrid, width: f64) -> ComplexField2D {
    ComplexField2D::from_real_fn(grid, |x, y| (-(x * x + y * y) / (width * width)).exp())
}

fn run_vacuum(p: &VacuumDiffractionParams) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(ScenarioKind::VacuumDiffraction);
    let grid = p.grid.build()?;
    let rayleigh = PI * p.waist * p.waist;
    let distance = p.distance_rayleigh * rayleigh;
    let dz = distance / p.steps as f64;
    let input = gaussian_probe(grid, p.waist);
    let diffraction = Diffraction::new(grid);
    let mut field = input.clone();
    let mut power = field_power(&field);
    let mut worst_step = 0.0f64;
    for _ in 0..p.steps {
        field = diffraction.apply(&field, dz);
        let next = field_power(&field);
        worst_step = worst_step.max((next / power - 1.0).abs());
        power = next;
    }
    // intensity exp(-2ρ²/w²) has rms radius w/√2
    let width_in = moments(&input).2 * 2f64.sqrt();
    let width_out = moments(&field).2 * 2f64.sqrt();
    let expected = p.waist * (1.0 + p.distance_rayleigh * p.distance_rayleigh).sqrt();
    report.note("rayleigh_range", rayleigh);
    report.note("distance", distance);
    report.note("width_in", width_in);
    report.note("width_out", width_out);
    report.note("width_expected", expected);
    report.note("power_in", field_power(&input));
    report.note("power_out", power);
    report
        .assertions
        .push(Assertion::relative("width_law", expected, width_out, 1e-3));
    report
        .assertions
        .push(Assertion::within("power_change_per_step", 0.0, worst_step, 1e-12));
    report.fields.push(("probe_in".into(), input));
    report.fields.push(("probe_out".into(), field));
    Ok(report)
}

fn transit_rabi(p: &EitTransitParams) -> impl Fn(f64) -> f64 + '_ {
    move |t: f64| {
        if p.hold_duration == 0.0 {
            return p.rabi;
        }
        let (off, on) = (p.hold_start, p.hold_start + p.hold_duration);
        if t < off - p.ramp || t > on + p.ramp {
            p.rabi
        } else if t < off {
            p.rabi * (off - t) / p.ramp
        } else if t <= on {
            0.0
        } else {
            p.rabi * (t - on) / p.ramp
        }
    }
}

fn run_transit(p: &EitTransitParams) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(ScenarioKind::EitTransit);
    let params = MediumParams {
        coupling_density: p.coupling_density,
        length: p.length,
        ..MediumParams::default()
    };
    let v = group_velocity_at(p.rabi, p.coupling_density);
    let dz = p.length / p.cells as f64;
    let transit = LongitudinalTransit {
        cells: p.cells,
        dt: dz / v,
        params,
        delta: p.delta,
    };
    let n_steps = (p.duration / transit.dt).ceil() as usize;
    let pulse = |t: f64| {
        let s = (t - p.pulse_center) / p.pulse_half_width;
        let a = if s.abs() < 1.0 { (0.5 * PI * s).cos().powi(2) } else { 0.0 };
        Complex64::new(a, 0.0)
    };
    let record = transit.run(pulse, transit_rabi(p), n_steps)?;
    let e_in = TransitRecord::energy(&record.input, transit.dt);
    let e_out = TransitRecord::energy(&record.output, transit.dt);
    let delay = record.centroid(&record.output) - record.centroid(&record.input);
    let expected = p.length / v + p.hold_duration;
    report.note("group_velocity", v);
    report.note("dt", transit.dt);
    report.note("steps", n_steps as f64);
    report.note("energy_in", e_in);
    report.note("energy_out", e_out);
    report.note("delay", delay);
    report.note("delay_expected", expected);
    if p.hold_duration == 0.0 {
        report
            .assertions
            .push(Assertion::relative("energy_conservation", e_in, e_out, 5e-3));
        report.assertions.push(Assertion::relative("group_delay", expected, delay, 1e-2));
    }
    let mut table = String::from("t,input_re,input_im,output_re,output_im\n");
    for ((t, a), b) in record.times.iter().zip(&record.input).zip(&record.output) {
        let _ = writeln!(table, "{t},{},{},{},{}", a.re, a.im, b.re, b.im);
    }
    report.tables.push(("transit.csv".into(), table));
    Ok(report)
}

fn run_vortex(kind: ScenarioKind, p: &VortexTransferParams, seed: u64) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(kind);
    let grid = p.grid.build()?;
    let params = MediumParams {
        coupling_density: p.coupling_density,
        ..MediumParams::default()
    };
    let probe = gaussian_probe(grid, p.sigma_p);
    let t = &p.transfer;
    let lambda_first = kind == ScenarioKind::LambdaStoreTripodRetrieve;
    let (storage, retrieval) = if lambda_first {
        t.lambda_store_controls(&grid)?
    } else {
        t.tripod_store_controls(&grid)?
    };
    let stored = store(&probe, &storage, &params)?;
    let result = retrieve(&stored, &retrieval, &params)?;
    let closed = if lambda_first {
        lambda_store_closed_form(&probe, t)
    } else {
        tripod_store_closed_form(&probe, t)
    };
    let deviation = max_pointwise_relative_error(&result.probe, &closed)?;
    let winding_in = winding_number(&probe, None)?;
    let winding_out = winding_number(&result.probe, None)?;
    let expected_winding = if lambda_first { 1.0 } else { -1.0 };

    report.note("energy_in", result.energy_in);
    report.note("energy_out", result.energy_out);
    report.note("ratio", result.ratio());
    report.note("winding_in", winding_in as f64);
    report.note("winding_out", winding_out as f64);
    report.note("closed_form_deviation", deviation);
    report.assertions.push(Assertion::within("winding_in", 0.0, winding_in as f64, 0.0));
    report
        .assertions
        .push(Assertion::within("winding_out", expected_winding, winding_out as f64, 0.0));
    report
        .assertions
        .push(Assertion::within("closed_form_max_rel_error", 0.0, deviation, 1e-10));
    report.assertions.push(Assertion::holds(
        "energy_out_le_energy_in",
        result.energy_out <= result.energy_in * (1.0 + 1e-12),
    ));

    if t.sigma_r == t.sigma_r3 {
        let analytic = loss_ratio_analytic(&LossQuery {
            b: t.b,
            sigma_p: p.sigma_p,
            sigma_r: t.sigma_r,
            sigma_r3: t.sigma_r3,
            sigma_s: t.sigma_s,
        })?;
        let from_fields = loss_ratio_from_fields(&result)?;
        report.note("ratio_analytic", analytic);
        report
            .assertions
            .push(Assertion::relative("loss_ratio_vs_analytic", analytic, from_fields, 1e-2));
    }
    if !lambda_first && t.sigma_r == t.sigma_s {
        let (peak_rho, peak_value) = radial_ratio_peak(&result, &probe);
        report.note("profile_peak_rho", peak_rho);
        report.note("profile_peak_value", peak_value);
        report
            .assertions
            .push(Assertion::within("profile_peak_at_b", t.b, peak_rho, grid.dx()));
        report.assertions.push(Assertion::relative(
            "profile_peak_value",
            t.a / (2.0 * t.b),
            peak_value,
            1e-2,
        ));
    }
    if p.random_instances > 0 {
        report
            .assertions
            .extend(algebraic_invariants(seed, p.random_instances)?);
    }
    report.fields.push(("probe_in".into(), probe));
    report.fields.push(("probe_out".into(), result.probe.clone()));
    report.fields.push(("frozen_phi_d".into(), result.frozen_phi_d.clone()));
    report.fields.push(("closed_form".into(), closed));
    Ok(report)
}

/// Peak of `|E_out / E_in|` along the positive x axis.
fn radial_ratio_peak(result: &RetrievalResult, probe: &ComplexField2D) -> (f64, f64) {
    let g = probe.grid();
    let j = g.ny() / 2;
    (g.nx() / 2..g.nx())
        .map(|i| (g.x(i), (result.probe.at(i, j) / probe.at(i, j)).norm()))
        .filter(|(_, r)| r.is_finite())
        .fold((0.0, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best })
}

fn random_field(rng: &mut ChaCha8Rng, grid: TransverseGrid, min_modulus: f64) -> ComplexField2D {
    ComplexField2D::from_fn(grid, |_, _| {
        let r = rng.gen_range(min_modulus..1.0);
        Complex64::from_polar(r, rng.gen_range(-PI..PI))
    })
}

/// Unitarity and storage identities on seeded random fields.
pub fn algebraic_invariants(seed: u64, instances: usize) -> Result<Vec<Assertion>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = TransverseGrid::square(8, 8.0)?;
    let params = MediumParams::default();
    let (mut norm, mut round_trip, mut xi_norm, mut lossless, mut dark_at_storage) = (0.0f64, 0.0f64, 0.0f64, 0.0f64, 0.0f64);
    for _ in 0..instances {
        let pair = ControlPair::new(random_field(&mut rng, grid, 0.05), random_field(&mut rng, grid, 0.0))?;
        let atomic = AtomicFields::new(random_field(&mut rng, grid, 0.0), random_field(&mut rng, grid, 0.0))?;
        let (bright, dark) = to_bright_dark(&atomic, &pair)?;
        let back = from_bright_dark(&bright, &dark, &pair)?;
        for k in 0..grid.len() {
            let before = atomic.phi2.values()[k].norm_sqr() + atomic.phi3.values()[k].norm_sqr();
            let after = bright.values()[k].norm_sqr() + dark.values()[k].norm_sqr();
            norm = norm.max((after - before).abs() / before);
            let d = (back.phi2.values()[k] - atomic.phi2.values()[k]).norm()
                + (back.phi3.values()[k] - atomic.phi3.values()[k]).norm();
            round_trip = round_trip.max(d);
        }
        let (xi2, xi3) = xi_ratios(&pair)?;
        for k in 0..grid.len() {
            xi_norm = xi_norm.max((xi2.values()[k].norm_sqr() + xi3.values()[k].norm_sqr() - 1.0).abs());
        }

        let probe = random_field(&mut rng, grid, 0.05);
        let stored = store(&probe, &pair, &params)?;
        let atomic = AtomicFields::new(stored.phi2.clone(), stored.phi3.clone())?;
        let (_, dark) = to_bright_dark(&atomic, &pair)?;
        let scale = stored.density().iter().cloned().fold(0.0, f64::max).sqrt();
        dark_at_storage = dark_at_storage.max(dark.max_abs() / scale);

        let factor = rng.gen_range(0.2..5.0);
        let out = retrieve(&stored, &pair.scaled(factor), &params)?;
        for k in 0..grid.len() {
            let ratio = out.probe.values()[k].norm() / probe.values()[k].norm();
            lossless = lossless.max((ratio - factor).abs() / factor);
        }
    }
    Ok(vec![
        Assertion::within("bright_dark_norm_preservation", 0.0, norm, 1e-12),
        Assertion::within("bright_dark_round_trip", 0.0, round_trip, 1e-12),
        Assertion::within("xi_normalization", 0.0, xi_norm, 1e-12),
        Assertion::within("identical_ratio_retrieval", 0.0, lossless, 1e-12),
        Assertion::within("dark_content_at_storage", 0.0, dark_at_storage, 1e-10),
    ])
}

fn run_loss_curve(p: &LossCurveParams) -> Result<ScenarioReport> {
    let mut report = ScenarioReport::new(ScenarioKind::LossCurve);
    let b_values: Vec<f64> = if p.count == 1 {
        vec![p.b_start]
    } else {
        (0..p.count)
            .map(|n| p.b_start + (p.b_end - p.b_start) * n as f64 / (p.count - 1) as f64)
            .collect()
    };
    let mut rows = loss_curve(&b_values, p.sigma_p, p.sigma_r, p.sigma_r3)?;
    if p.field_grid != 0 {
        let grid = GridSpec {
            n: p.field_grid,
            length: p.field_window * p.sigma_p,
        }
        .build()?;
        let params = MediumParams {
            coupling_density: 1.0e12,
            ..MediumParams::default()
        };
        let probe = gaussian_probe(grid, p.sigma_p);
        for row in rows.iter_mut().filter(|r| r.b > 0.0) {
            let transfer = VortexTransfer {
                amplitude: 1.0,
                a: 1.0,
                b: row.b,
                sigma_s: p.sigma_r,
                sigma_r: p.sigma_r,
                sigma_r3: p.sigma_r3,
            };
            let result = crate::storage::tripod_store_lambda_retrieve(&probe, &transfer, &params)?;
            let ratio = loss_ratio_from_fields(&result)?;
            let reference = row.analytic.unwrap_or(row.numeric);
            report.assertions.push(Assertion::relative(
                format!("fields_vs_law_b{}", row.b),
                reference,
                ratio,
                1e-2,
            ));
            row.fields = Some(ratio);
        }
    }
    let worst = rows
        .iter()
        .filter_map(|r| r.analytic.map(|a| (r.numeric - a).abs() / a))
        .fold(0.0f64, f64::max);
    if p.sigma_r == p.sigma_r3 {
        report
            .assertions
            .push(Assertion::within("analytic_vs_quadrature_rel", 0.0, worst, 1e-8));
    }
    let monotone = rows.windows(2).all(|w| w[1].numeric < w[0].numeric || w[1].b == w[0].b);
    let bounded = rows.iter().all(|r| r.numeric > 0.0 && r.numeric <= 1.0);
    report.assertions.push(Assertion::holds("strictly_decreasing", monotone));
    report.assertions.push(Assertion::holds("bounded_in_unit_interval", bounded));
    if let Some(r) = rows.iter().find(|r| r.b == 0.0) {
        report
            .assertions
            .push(Assertion::within("no_second_control_is_lossless", 1.0, r.numeric, 0.0));
    }
    for r in rows.iter().filter(|r| r.b >= 5.0 * p.sigma_p) {
        if let Some(a) = r.analytic {
            let asymptote = p.sigma_p * p.sigma_p / (2.0 * r.b * r.b);
            report
                .assertions
                .push(Assertion::relative(format!("asymptote_b{}", r.b), asymptote, a, 5e-2));
        }
    }
    report.note("points", rows.len() as f64);
    if let (Some(first), Some(last)) = (rows.first(), rows.last()) {
        report.note("ratio_first", first.numeric);
        report.note("ratio_last", last.numeric);
    }
    let mut csv = Vec::new();
    write_loss_curve_csv(&mut csv, &rows)?;
    report
        .tables
        .push(("loss_curve.csv".into(), String::from_utf8(csv).expect("ascii csv")));
    Ok(report)
}
