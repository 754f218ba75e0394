//! Energy lost to excitations left frozen in the dark state at retrieval.
//!
//! For a Gaussian probe `exp(-ρ²/σp²)` stored and retrieved with a second
//! control of relative amplitude `b`, the radial energy integrals reduce in
//! `x = ρ²` to
//! `W_r / W_s = (2/σp²) ∫ x e^{-2x(σr⁻²+σp⁻²)} / (x e^{-2x/σr²} + b² e^{-2x/σr3²}) dx`,
//! which for `σr = σr3` is `1 + u e^u Ei(-u)` with `u = 2b²/σp²`.

use std::io::Write;

use super::quadrature::{integrate, Tolerance};
use super::special::scaled_e1;
use crate::error::{Error, Result};
use crate::storage::RetrievalResult;

/// Parameters of the loss law (widths in wavelengths).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossQuery {
    pub b: f64,
    pub sigma_p: f64,
    pub sigma_r: f64,
    pub sigma_r3: f64,
    /// Storage width; it cancels from the ratio but is kept for reporting.
    pub sigma_s: f64,
}

impl LossQuery {
    /// All control beams share the width `sigma`.
    pub fn equal_widths(b: f64, sigma_p: f64, sigma: f64) -> Self {
        LossQuery {
            b,
            sigma_p,
            sigma_r: sigma,
            sigma_r3: sigma,
            sigma_s: sigma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("sigma_p", self.sigma_p),
            ("sigma_r", self.sigma_r),
            ("sigma_r3", self.sigma_r3),
            ("sigma_s", self.sigma_s),
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

    pub fn u(&self) -> f64 {
        2.0 * self.b * self.b / (self.sigma_p * self.sigma_p)
    }
}

pub fn loss_ratio_analytic(query: &LossQuery) -> Result<f64> {
    query.validate()?;
    if query.sigma_r != query.sigma_r3 {
        return Err(Error::WidthMismatch {
            sigma_r: query.sigma_r,
            sigma_r3: query.sigma_r3,
        });
    }
    let u = query.u();
    if u == 0.0 {
        return Ok(1.0);
    }
    // 1 + u e^u Ei(-u) = 1 - u e^u E1(u)
    Ok(1.0 - u * scaled_e1(u)?)
}

/// Direct quadrature of the radial energy integral; allows `σr ≠ σr3`.
pub fn loss_ratio_numeric(query: &LossQuery) -> Result<f64> {
    query.validate()?;
    if query.b == 0.0 {
        return Ok(1.0);
    }
    let sp2 = query.sigma_p * query.sigma_p;
    let b2 = query.b * query.b;
    let decay = 2.0 / sp2;
    let tilt = 2.0 * (query.sigma_r.powi(-2) - query.sigma_r3.powi(-2));
    // numerator and denominator divided by e^{-2x/σr²}
    let integrand = |x: f64| {
        let den = x + b2 * (x * tilt).exp();
        if den == 0.0 {
            0.0
        } else {
            x * (-decay * x).exp() / den
        }
    };
    // e^{-40} truncation, then split near the knee at x ~ b² for accuracy
    let upper = 20.0 * sp2;
    let tol = Tolerance {
        abs: 0.0,
        rel: 1e-12,
        max_intervals: 4000,
    };
    let knee = b2.min(upper);
    let head = integrate(integrand, 0.0, knee, tol)?;
    let tail = integrate(integrand, knee, upper, tol)?;
    Ok((head.value + tail.value) / (0.5 * sp2))
}

/// Fraction of a field's weight lying in the outer tenth of the window.
fn outer_band_fraction(result: &RetrievalResult, weights: impl Fn(usize) -> f64) -> f64 {
    let g = result.probe.grid();
    let (hx, hy) = (0.5 * g.lx(), 0.5 * g.ly());
    let (mut outer, mut total) = (0.0, 0.0);
    for idx in 0..g.len() {
        let w = weights(idx);
        let (x, y) = g.position(idx);
        total += w;
        if (x.abs() / hx).max(y.abs() / hy) > 0.9 {
            outer += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        outer / total
    }
}

/// `energy_out / energy_in` of a simulated retrieval.
pub fn loss_ratio_from_fields(result: &RetrievalResult) -> Result<f64> {
    let input = outer_band_fraction(result, |k| result.probe_in.values()[k].norm_sqr());
    let output = outer_band_fraction(result, |k| {
        result.probe.values()[k].norm_sqr() * result.length_weight.values()[k].re
    });
    let fraction = input.max(output);
    if fraction > 0.01 {
        return Err(Error::GridTooCoarse { fraction });
    }
    if result.energy_in == 0.0 {
        return Err(Error::param("energy_in", "no probe energy was stored"));
    }
    Ok(result.ratio())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossCurveRow {
    pub b: f64,
    /// Closed form; only defined for `σr = σr3`.
    pub analytic: Option<f64>,
    pub numeric: f64,
    pub fields: Option<f64>,
}

/// Loss law over `b_values` at fixed probe and retrieval widths.
pub fn loss_curve(b_values: &[f64], sigma_p: f64, sigma_r: f64, sigma_r3: f64) -> Result<Vec<LossCurveRow>> {
    b_values
        .iter()
        .map(|&b| {
            let q = LossQuery {
                b,
                sigma_p,
                sigma_r,
                sigma_r3,
                sigma_s: sigma_r,
            };
            Ok(LossCurveRow {
                b,
                analytic: if sigma_r == sigma_r3 { Some(loss_ratio_analytic(&q)?) } else { None },
                numeric: loss_ratio_numeric(&q)?,
                fields: None,
            })
        })
        .collect()
}

/// CSV with header `b,ratio_analytic,ratio_numeric,ratio_fields`; columns
/// without a value are left empty.
pub fn write_loss_curve_csv<W: Write>(mut w: W, rows: &[LossCurveRow]) -> Result<()> {
    writeln!(w, "b,ratio_analytic,ratio_numeric,ratio_fields")?;
    for r in rows {
        let show = |v: Option<f64>| v.map(|v| v.to_string()).unwrap_or_default();
        writeln!(w, "{},{},{},{}", r.b, show(r.analytic), r.numeric, show(r.fields))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn analytic_examples() {
        assert_eq!(loss_ratio_analytic(&LossQuery::equal_widths(0.0, 10.0, 20.0)).unwrap(), 1.0);
        let r = loss_ratio_analytic(&LossQuery::equal_widths(10.0, 10.0, 20.0)).unwrap();
        assert!((r - 0.277_34).abs() < 1e-4, "{r}");
        let far = loss_ratio_analytic(&LossQuery::equal_widths(100.0, 10.0, 20.0)).unwrap();
        assert!((far / 0.005 - 1.0).abs() < 0.01, "{far}");
    }

    #[test]
    fn width_mismatch_needs_quadrature() {
        let q = LossQuery {
            sigma_r3: 30.0,
            ..LossQuery::equal_widths(5.0, 10.0, 20.0)
        };
        assert!(matches!(loss_ratio_analytic(&q), Err(Error::WidthMismatch { .. })));
        let wide = loss_ratio_numeric(&q).unwrap();
        let equal = loss_ratio_numeric(&LossQuery::equal_widths(5.0, 10.0, 20.0)).unwrap();
        // a wider second control holds more of the excitation in the dark state
        assert!(wide < equal);
    }

    #[test]
    fn numeric_matches_analytic() {
        for b in [0.1, 1.0, 3.0, 10.0, 30.0, 100.0] {
            let q = LossQuery::equal_widths(b, 10.0, 15.0);
            let a = loss_ratio_analytic(&q).unwrap();
            let n = loss_ratio_numeric(&q).unwrap();
            assert!((a - n).abs() <= 1e-8 * a, "b = {b}: {a} vs {n}");
        }
    }

    #[test]
    fn curve_csv() {
        let rows = loss_curve(&[0.0, 10.0], 10.0, 20.0, 20.0).unwrap();
        let mut buf = Vec::new();
        write_loss_curve_csv(&mut buf, &rows).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines[0], "b,ratio_analytic,ratio_numeric,ratio_fields");
        assert_eq!(lines[1], "0,1,1,");
        assert_eq!(lines.len(), 3);
        let mismatched = loss_curve(&[2.0], 10.0, 20.0, 25.0).unwrap();
        assert_eq!(mismatched[0].analytic, None);
    }

    #[test]
    fn rejects_bad_queries() {
        assert!(loss_ratio_analytic(&LossQuery::equal_widths(-1.0, 10.0, 20.0)).is_err());
        assert!(loss_ratio_numeric(&LossQuery::equal_widths(1.0, 0.0, 20.0)).is_err());
    }
}
