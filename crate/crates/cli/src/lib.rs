//! Front end of the `tsl` binary: config handling and scenario dispatch.

pub mod config;

use std::io::Write;
use std::path::{Path, PathBuf};

use slowlight::scenarios::check_suite;
use slowlight::{run_scenario, ScenarioKind, ScenarioReport, ScenarioSpec};

pub use config::{parse_config, parse_config_with_overrides, print_config, ConfigError};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const DEFAULT_OUT: &str = "tsl-out";

/// Options shared by all subcommands.
#[derive(Debug, Clone, Default)]
pub struct RunConfig {
    pub out: Option<PathBuf>,
    pub overrides: Vec<String>,
    pub quiet: bool,
}

impl RunConfig {
    fn report_dir(&self, kind: ScenarioKind) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)).join(kind.name())
    }
}

fn write_report(dir: &Path, spec: &ScenarioSpec, report: &ScenarioReport) -> Result<(), String> {
    report.write_to(dir).map_err(|e| e.to_string())?;
    std::fs::write(dir.join("config.toml"), print_config(spec)).map_err(|e| format!("{}: {e}", dir.display()))
}

fn summarize(report: &ScenarioReport, quiet: bool, out: &mut dyn Write) {
    for a in &report.assertions {
        if !a.pass || !quiet {
            let _ = writeln!(
                out,
                "{} {}: expected {} actual {} tolerance {}",
                if a.pass { "PASS" } else { "FAIL" },
                a.name,
                a.expected,
                a.actual,
                a.tolerance
            );
        }
    }
}

/// `tsl run <config>`.
pub fn cmd_run(path: &Path, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let text = match std::fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            let _ = writeln!(err, "error: cannot read {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    let spec = match parse_config_with_overrides(&text, &cfg.overrides) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {}: {e}", path.display());
            return EXIT_USAGE;
        }
    };
    execute(&spec, cfg, out, err)
}

fn execute(spec: &ScenarioSpec, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let report = match run_scenario(spec) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let dir = cfg.report_dir(spec.kind());
    if let Err(e) = write_report(&dir, spec, &report) {
        let _ = writeln!(err, "error: {e}");
        return EXIT_USAGE;
    }
    summarize(&report, cfg.quiet, out);
    if !cfg.quiet {
        let _ = writeln!(out, "report written to {}", dir.display());
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_ASSERTION
    }
}

/// Parses `start:end:count`.
pub fn parse_range(text: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = text.split(':').collect();
    let bad = || format!("range `{text}` must look like START:END:COUNT");
    if parts.len() != 3 {
        return Err(bad());
    }
    let start = parts[0].trim().parse::<f64>().map_err(|_| bad())?;
    let end = parts[1].trim().parse::<f64>().map_err(|_| bad())?;
    let count = parts[2].trim().parse::<usize>().map_err(|_| bad())?;
    Ok((start, end, count))
}

/// `tsl loss-curve <range> <sigma_p>`: CSV on stdout, report only with `--out`.
pub fn cmd_loss_curve(range: &str, sigma_p: f64, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let (start, end, count) = match parse_range(range) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let text = format!(
        "kind = \"loss_curve\"\nb_start = {}\nb_end = {}\ncount = {count}\nsigma_p = {}\n",
        toml::Value::Float(start),
        toml::Value::Float(end),
        toml::Value::Float(sigma_p)
    );
    let spec = match parse_config_with_overrides(&text, &cfg.overrides) {
        Ok(s) => s,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let report = match run_scenario(&spec) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    if let Some((_, csv)) = report.tables.iter().find(|(name, _)| name == "loss_curve.csv") {
        let _ = out.write_all(csv.as_bytes());
    }
    if cfg.out.is_some() {
        if let Err(e) = write_report(&cfg.report_dir(spec.kind()), &spec, &report) {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    }
    for a in report.failures() {
        let _ = writeln!(err, "FAIL {}: expected {} actual {}", a.name, a.expected, a.actual);
    }
    if report.passed() {
        EXIT_OK
    } else {
        EXIT_ASSERTION
    }
}

/// `tsl check`: every scenario kind at its defaults.
pub fn cmd_check(seed: u64, cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let reports = match check_suite(seed) {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            return EXIT_USAGE;
        }
    };
    let mut failed = 0;
    for report in &reports {
        let pass = report.passed();
        if !pass {
            failed += 1;
        }
        let _ = writeln!(
            out,
            "{} {} ({} assertions)",
            if pass { "PASS" } else { "FAIL" },
            report.kind,
            report.assertions.len()
        );
        summarize(report, true, out);
        if cfg.out.is_some() {
            let mut spec = ScenarioSpec::defaults(report.kind);
            spec.seed = seed;
            if let Err(e) = write_report(&cfg.report_dir(report.kind), &spec, report) {
                let _ = writeln!(err, "error: {e}");
                return EXIT_USAGE;
            }
        }
    }
    if failed == 0 {
        EXIT_OK
    } else {
        let _ = writeln!(out, "{failed} scenario(s) failed");
        EXIT_ASSERTION
    }
}

/// `tsl dump-defaults <kind>`.
pub fn cmd_dump_defaults(kind: &str, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    match ScenarioKind::from_name(kind) {
        Some(k) => {
            let _ = out.write_all(print_config(&ScenarioSpec::defaults(k)).as_bytes());
            EXIT_OK
        }
        None => {
            let names: Vec<_> = ScenarioKind::ALL.iter().map(|k| k.name()).collect();
            let _ = writeln!(err, "error: unknown kind `{kind}`; expected one of: {}", names.join(", "));
            EXIT_USAGE
        }
    }
}
