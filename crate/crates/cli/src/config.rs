//! Scenario files: TOML with flat (optionally dotted) keys.
//!
//! ```toml
//! kind = "loss_curve"
//! seed = 1
//! sigma_p = 10.0
//! grid.n = 256        # dotted keys are accepted and flattened
//! ```
//!
//! Every key except `kind` has a documented default; unknown keys are
//! rejected with the list of valid ones.

use std::collections::BTreeMap;

use slowlight::scenarios::{
    EitTransitParams, GridSpec, LossCurveParams, VacuumDiffractionParams, VortexTransferParams,
};
use slowlight::{ScenarioKind, ScenarioParams, ScenarioSpec, VortexTransfer};
use thiserror::Error;
use toml::Value;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("missing key `{key}`; valid keys: {valid}")]
    Missing { key: String, valid: String },
    #[error("unknown key `{key}` for kind {kind}; valid keys: {valid}")]
    Unknown { key: String, kind: String, valid: String },
    #[error("unknown scenario kind `{0}`; expected one of: {1}")]
    UnknownKind(String, String),
    #[error("key `{key}`: {reason}")]
    Type { key: String, reason: String },
    #[error("override `{0}` is not of the form KEY=VALUE")]
    Override(String),
    #[error("invalid scenario: {0}")]
    Invalid(#[from] slowlight::Error),
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Kind {
    Float,
    Int,
}

/// Keys of one scenario kind, in printing order.
fn schema(kind: ScenarioKind) -> &'static [(&'static str, Kind)] {
    use Kind::*;
    match kind {
        ScenarioKind::VacuumDiffraction => &[
            ("grid.n", Int),
            ("grid.length", Float),
            ("waist", Float),
            ("distance_rayleigh", Float),
            ("steps", Int),
        ],
        ScenarioKind::EitTransit => &[
            ("cells", Int),
            ("length", Float),
            ("coupling_density", Float),
            ("rabi", Float),
            ("delta", Float),
            ("pulse_center", Float),
            ("pulse_half_width", Float),
            ("duration", Float),
            ("hold_start", Float),
            ("hold_duration", Float),
            ("ramp", Float),
        ],
        ScenarioKind::LambdaStoreTripodRetrieve | ScenarioKind::TripodStoreLambdaRetrieve => &[
            ("grid.n", Int),
            ("grid.length", Float),
            ("sigma_p", Float),
            ("amplitude", Float),
            ("a", Float),
            ("b", Float),
            ("sigma_s", Float),
            ("sigma_r", Float),
            ("sigma_r3", Float),
            ("coupling_density", Float),
            ("random_instances", Int),
        ],
        ScenarioKind::LossCurve => &[
            ("b_start", Float),
            ("b_end", Float),
            ("count", Int),
            ("sigma_p", Float),
            ("sigma_r", Float),
            ("sigma_r3", Float),
            ("field_grid", Int),
            ("field_window", Float),
        ],
    }
}

fn valid_keys(kind: ScenarioKind) -> String {
    let mut keys = vec!["kind", "seed"];
    keys.extend(schema(kind).iter().map(|(k, _)| *k));
    keys.join(", ")
}

fn kind_names() -> String {
    ScenarioKind::ALL.iter().map(|k| k.name()).collect::<Vec<_>>().join(", ")
}

fn flatten(prefix: &str, table: &toml::Table, out: &mut BTreeMap<String, Value>) {
    for (k, v) in table {
        let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
        match v {
            Value::Table(t) => flatten(&key, t, out),
            other => {
                out.insert(key, other.clone());
            }
        }
    }
}

/// The spec as `key -> value` in schema order.
fn to_pairs(spec: &ScenarioSpec) -> Vec<(&'static str, Value)> {
    let f = Value::Float;
    let i = |v: usize| Value::Integer(v as i64);
    match &spec.params {
        ScenarioParams::VacuumDiffraction(p) => vec![
            ("grid.n", i(p.grid.n)),
            ("grid.length", f(p.grid.length)),
            ("waist", f(p.waist)),
            ("distance_rayleigh", f(p.distance_rayleigh)),
            ("steps", i(p.steps)),
        ],
        ScenarioParams::EitTransit(p) => vec![
            ("cells", i(p.cells)),
            ("length", f(p.length)),
            ("coupling_density", f(p.coupling_density)),
            ("rabi", f(p.rabi)),
            ("delta", f(p.delta)),
            ("pulse_center", f(p.pulse_center)),
            ("pulse_half_width", f(p.pulse_half_width)),
            ("duration", f(p.duration)),
            ("hold_start", f(p.hold_start)),
            ("hold_duration", f(p.hold_duration)),
            ("ramp", f(p.ramp)),
        ],
        ScenarioParams::LambdaStoreTripodRetrieve(p) | ScenarioParams::TripodStoreLambdaRetrieve(p) => vec![
            ("grid.n", i(p.grid.n)),
            ("grid.length", f(p.grid.length)),
            ("sigma_p", f(p.sigma_p)),
            ("amplitude", f(p.transfer.amplitude)),
            ("a", f(p.transfer.a)),
            ("b", f(p.transfer.b)),
            ("sigma_s", f(p.transfer.sigma_s)),
            ("sigma_r", f(p.transfer.sigma_r)),
            ("sigma_r3", f(p.transfer.sigma_r3)),
            ("coupling_density", f(p.coupling_density)),
            ("random_instances", i(p.random_instances)),
        ],
        ScenarioParams::LossCurve(p) => vec![
            ("b_start", f(p.b_start)),
            ("b_end", f(p.b_end)),
            ("count", i(p.count)),
            ("sigma_p", f(p.sigma_p)),
            ("sigma_r", f(p.sigma_r)),
            ("sigma_r3", f(p.sigma_r3)),
            ("field_grid", i(p.field_grid)),
            ("field_window", f(p.field_window)),
        ],
    }
}

struct Resolver {
    values: BTreeMap<String, Value>,
}

impl Resolver {
    fn float(&self, key: &str, default: f64) -> Result<f64, ConfigError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(Value::Float(v)) => Ok(*v),
            Some(Value::Integer(v)) => Ok(*v as f64),
            Some(other) => Err(ConfigError::Type {
                key: key.into(),
                reason: format!("expected a number, got {other}"),
            }),
        }
    }

    fn int(&self, key: &str, default: usize) -> Result<usize, ConfigError> {
        match self.values.get(key) {
            None => Ok(default),
            Some(Value::Integer(v)) if *v >= 0 => Ok(*v as usize),
            Some(other) => Err(ConfigError::Type {
                key: key.into(),
                reason: format!("expected a non-negative integer, got {other}"),
            }),
        }
    }

    fn grid(&self, default: GridSpec) -> Result<GridSpec, ConfigError> {
        Ok(GridSpec {
            n: self.int("grid.n", default.n)?,
            length: self.float("grid.length", default.length)?,
        })
    }
}

/// Resolves flattened values against the schema and defaults, then validates.
fn resolve(values: BTreeMap<String, Value>) -> Result<ScenarioSpec, ConfigError> {
    let kind_name = match values.get("kind") {
        None => {
            return Err(ConfigError::Missing {
                key: "kind".into(),
                valid: kind_names(),
            })
        }
        Some(Value::String(s)) => s.clone(),
        Some(other) => {
            return Err(ConfigError::Type {
                key: "kind".into(),
                reason: format!("expected a string, got {other}"),
            })
        }
    };
    let kind = ScenarioKind::from_name(&kind_name).ok_or_else(|| ConfigError::UnknownKind(kind_name, kind_names()))?;
    for key in values.keys() {
        if key != "kind" && key != "seed" && !schema(kind).iter().any(|(k, _)| k == key) {
            return Err(ConfigError::Unknown {
                key: key.clone(),
                kind: kind.name().into(),
                valid: valid_keys(kind),
            });
        }
    }
    let r = Resolver { values };
    let seed = match r.values.get("seed") {
        None => ScenarioSpec::defaults(kind).seed,
        Some(Value::Integer(v)) if *v >= 0 => *v as u64,
        Some(other) => {
            return Err(ConfigError::Type {
                key: "seed".into(),
                reason: format!("expected a non-negative integer, got {other}"),
            })
        }
    };
    let params = match kind {
        ScenarioKind::VacuumDiffraction => {
            let d = VacuumDiffractionParams::default();
            ScenarioParams::VacuumDiffraction(VacuumDiffractionParams {
                grid: r.grid(d.grid)?,
                waist: r.float("waist", d.waist)?,
                distance_rayleigh: r.float("distance_rayleigh", d.distance_rayleigh)?,
                steps: r.int("steps", d.steps)?,
            })
        }
        ScenarioKind::EitTransit => {
            let d = EitTransitParams::default();
            ScenarioParams::EitTransit(EitTransitParams {
                cells: r.int("cells", d.cells)?,
                length: r.float("length", d.length)?,
                coupling_density: r.float("coupling_density", d.coupling_density)?,
                rabi: r.float("rabi", d.rabi)?,
                delta: r.float("delta", d.delta)?,
                pulse_center: r.float("pulse_center", d.pulse_center)?,
                pulse_half_width: r.float("pulse_half_width", d.pulse_half_width)?,
                duration: r.float("duration", d.duration)?,
                hold_start: r.float("hold_start", d.hold_start)?,
                hold_duration: r.float("hold_duration", d.hold_duration)?,
                ramp: r.float("ramp", d.ramp)?,
            })
        }
        ScenarioKind::LambdaStoreTripodRetrieve | ScenarioKind::TripodStoreLambdaRetrieve => {
            let d = VortexTransferParams::default();
            let sigma_r = r.float("sigma_r", d.transfer.sigma_r)?;
            let p = VortexTransferParams {
                grid: r.grid(d.grid)?,
                sigma_p: r.float("sigma_p", d.sigma_p)?,
                transfer: VortexTransfer {
                    amplitude: r.float("amplitude", d.transfer.amplitude)?,
                    a: r.float("a", d.transfer.a)?,
                    b: r.float("b", d.transfer.b)?,
                    sigma_s: r.float("sigma_s", d.transfer.sigma_s)?,
                    sigma_r,
                    sigma_r3: r.float("sigma_r3", sigma_r)?,
                },
                coupling_density: r.float("coupling_density", d.coupling_density)?,
                random_instances: r.int("random_instances", d.random_instances)?,
            };
            if kind == ScenarioKind::LambdaStoreTripodRetrieve {
                ScenarioParams::LambdaStoreTripodRetrieve(p)
            } else {
                ScenarioParams::TripodStoreLambdaRetrieve(p)
            }
        }
        ScenarioKind::LossCurve => {
            let d = LossCurveParams::default();
            let sigma_r = r.float("sigma_r", d.sigma_r)?;
            ScenarioParams::LossCurve(LossCurveParams {
                b_start: r.float("b_start", d.b_start)?,
                b_end: r.float("b_end", d.b_end)?,
                count: r.int("count", d.count)?,
                sigma_p: r.float("sigma_p", d.sigma_p)?,
                sigma_r,
                sigma_r3: r.float("sigma_r3", sigma_r)?,
                field_grid: r.int("field_grid", d.field_grid)?,
                field_window: r.float("field_window", d.field_window)?,
            })
        }
    };
    let spec = ScenarioSpec { params, seed };
    spec.validate()?;
    Ok(spec)
}

fn parse_table(text: &str) -> Result<BTreeMap<String, Value>, ConfigError> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse(e.to_string()))?;
    let mut flat = BTreeMap::new();
    flatten("", &table, &mut flat);
    Ok(flat)
}

pub fn parse_config(text: &str) -> Result<ScenarioSpec, ConfigError> {
    resolve(parse_table(text)?)
}

/// Parses `text` and applies `KEY=VALUE` overrides; values use TOML syntax
/// (`sigma_p=20`, `kind="loss_curve"`).
pub fn parse_config_with_overrides(text: &str, overrides: &[String]) -> Result<ScenarioSpec, ConfigError> {
    let mut values = parse_table(text)?;
    for item in overrides {
        let (key, raw) = item.split_once('=').ok_or_else(|| ConfigError::Override(item.clone()))?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Override(item.clone()));
        }
        let probe: toml::Table = format!("v = {}", raw.trim())
            .parse()
            .map_err(|e: toml::de::Error| ConfigError::Parse(format!("override `{item}`: {e}")))?;
        values.insert(key.to_string(), probe["v"].clone());
    }
    resolve(values)
}

/// Canonical text form with every default resolved.
pub fn print_config(spec: &ScenarioSpec) -> String {
    let mut out = format!("kind = \"{}\"\nseed = {}\n", spec.kind(), spec.seed);
    for (key, value) in to_pairs(spec) {
        out.push_str(&format!("{key} = {value}\n"));
    }
    out
}
