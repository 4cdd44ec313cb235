//! Closed-form rate expressions and rate-curve tables.
//!
//! Notation: `c` is the coverage depth, `lbar` the normalized read length
//! `L / log2 n`, `delta` the erasure probability and
//! `alpha = c / (lbar (1 - delta))`. The achievable-rate expression needs
//! `c > 0` and `lbar (1 - delta) > 1`.

mod dd;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

use crate::error::RateError;
use crate::par::{map_slice, Execution};
use dd::Dd;

pub use dd::Dd as DoubleDouble;

/// Below this `alpha * d` [`beta`] switches from the closed form to its
/// Taylor expansion in `d`.
pub const BETA_SERIES_THRESHOLD: f64 = 1e-3;

/// `K L / n`.
pub fn coverage_depth(k: usize, l: usize, n: usize) -> f64 {
    (k as f64 * l as f64) / n as f64
}

fn check_hypothesis(c: f64, lbar: f64, delta: f64) -> Result<f64, RateError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(RateError::Domain(format!(
            "coverage depth c = {c} must be positive"
        )));
    }
    if !(0.0..=1.0).contains(&delta) {
        return Err(RateError::Domain(format!(
            "erasure probability delta = {delta} outside [0, 1]"
        )));
    }
    let eff = lbar * (1.0 - delta);
    if !(eff.is_finite() && eff > 1.0) {
        return Err(RateError::Domain(format!(
            "lbar * (1 - delta) = {eff} must exceed 1"
        )));
    }
    Ok(c / eff)
}

/// `alpha = c / (lbar (1 - delta))`, checking the hypothesis.
pub fn alpha(c: f64, lbar: f64, delta: f64) -> Result<f64, RateError> {
    check_hypothesis(c, lbar, delta)
}

/// Achievable rate on the erasure channel:
/// `(1 - e^{-c(1-delta)}) - (1-delta)(e^{-c(1 - 1/(lbar(1-delta)))} - e^{-c})`.
pub fn sse_rate_bound(c: f64, lbar: f64, delta: f64) -> Result<f64, RateError> {
    let a = check_hypothesis(c, lbar, delta)?;
    let keep = 1.0 - delta;
    Ok(-(-c * keep).exp_m1() - keep * ((-c + a).exp() - (-c).exp()))
}

/// Capacity of the erasure-free channel, `1 - e^{-c(1 - 1/lbar)}`.
pub fn ssc_capacity(c: f64, lbar: f64) -> Result<f64, RateError> {
    if !(c.is_finite() && c > 0.0) {
        return Err(RateError::Domain(format!(
            "coverage depth c = {c} must be positive"
        )));
    }
    if !(lbar > 1.0) {
        return Err(RateError::Domain(format!("lbar = {lbar} must exceed 1")));
    }
    Ok(-(-c * (1.0 - 1.0 / lbar)).exp_m1())
}

/// `(c / lbar)^2 e^{-c} / (1 - delta)`.
fn beta_prefactor(c: f64, lbar: f64, delta: f64) -> f64 {
    let r = c / lbar;
    r * r * (-c).exp() / (1.0 - delta)
}

/// The bracket of `beta(d)` times `d`, from the closed form, in double-double.
fn beta_bracket_closed(a: f64, d: f64) -> Dd {
    let e = Dd::new(a).exp();
    let ad = Dd::new(a) * Dd::new(d);
    let ed = ad.exp();
    let m = ed - Dd::ONE;
    let dd = Dd::new(d);
    let first = ed * (e - Dd::ONE) / m;
    let second = ed * ed * (e * m - dd * (e * ed - Dd::ONE)) / (m * m);
    dd * (first - second)
}

/// Taylor expansion of the same quantity in `d`, through `d^6`.
fn beta_bracket_series(a: f64, d: f64) -> Dd {
    let e = Dd::new(a).exp();
    let al = Dd::new(a);
    let one = Dd::ONE;
    let q = |x: f64| Dd::new(x);
    let inv = one / al;
    let a2 = al * al;
    let a3 = a2 * al;
    let a4 = a3 * al;
    let a5 = a4 * al;
    let coeffs = [
        (e - one - al) / a2,
        e * (q(2.0) * inv - one) - q(0.5) - inv,
        e * (q(23.0) / q(12.0) - al) - al / q(12.0) - q(5.0) / q(12.0),
        e * (q(7.0) / q(6.0) * al - a2 / q(2.0)) - al / q(12.0),
        e * (q(121.0) / q(240.0) * a2 - a3 / q(6.0)) + a3 / q(720.0) - a2 / q(240.0),
        e * (q(59.0) / q(360.0) * a3 - a4 / q(24.0)) + a3 / q(720.0),
        e * (q(251.0) / q(6048.0) * a4 - a5 / q(120.0)) - a5 / q(30240.0) + a4 / q(6048.0),
    ];
    let x = Dd::new(d);
    coeffs.iter().rev().fold(Dd::ZERO, |acc, &ck| acc * x + ck)
}

/// `beta(d)`, the gap between the intermediate rate expression and
/// `(1 - e^{-c(1-delta)}) - c e^{-c} / lbar`.
pub fn beta(c: f64, lbar: f64, delta: f64, d: f64) -> Result<f64, RateError> {
    let a = check_hypothesis(c, lbar, delta)?;
    if !(d.is_finite() && d > 0.0) {
        return Err(RateError::Domain(format!("d = {d} must be positive")));
    }
    let bracket = if a * d < BETA_SERIES_THRESHOLD {
        beta_bracket_series(a, d)
    } else {
        beta_bracket_closed(a, d)
    };
    Ok(beta_prefactor(c, lbar, delta) * bracket.to_f64())
}

/// `lim_{d -> 0} beta(d) = (1 - delta) e^{-c} (e^alpha - 1 - alpha)`
/// `= (1-delta)(e^{-c(1 - 1/(lbar(1-delta)))} - e^{-c}) - (c / lbar) e^{-c}`.
///
/// With this value the intermediate rate expression reduces exactly to
/// [`sse_rate_bound`].
pub fn beta_limit(c: f64, lbar: f64, delta: f64) -> Result<f64, RateError> {
    let a = check_hypothesis(c, lbar, delta)?;
    let keep = 1.0 - delta;
    // e^a - 1 - a without cancellation for small a
    let core = if a < 1e-2 {
        let mut term = a * a / 2.0;
        let mut sum = 0.0;
        for k in 3..20 {
            sum += term;
            term *= a / k as f64;
        }
        sum
    } else {
        a.exp_m1() - a
    };
    Ok(keep * (-c).exp() * core)
}

/// `(1 - e^{-c(1-delta)}) - c e^{-c} / lbar - beta(d)`.
pub fn rate_with_beta(c: f64, lbar: f64, delta: f64, d: f64) -> Result<f64, RateError> {
    let b = beta(c, lbar, delta, d)?;
    Ok(-(-c * (1.0 - delta)).exp_m1() - c * (-c).exp() / lbar - b)
}

/// Asymptotic upper bound `(1 + 2p) e^{alpha p d} beta(d)` on
/// `(log n / n) sum_tau (1 - tau) Ḡ(tau)`.
pub fn ci_exponent_bound(c: f64, lbar: f64, delta: f64, d: f64, p: f64) -> Result<f64, RateError> {
    if !(p.is_finite() && p > 0.0) {
        return Err(RateError::Domain(format!("p = {p} must be positive")));
    }
    let b = beta(c, lbar, delta, d)?;
    let a = c / (lbar * (1.0 - delta));
    Ok((1.0 + 2.0 * p) * (a * p * d).exp() * b)
}

/// One row of a rate-curve table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatePoint {
    pub c: f64,
    pub delta: f64,
    pub lbar: f64,
    /// `c / (lbar (1 - delta))`; `None` when undefined.
    pub alpha: Option<f64>,
    pub rate_sse: Option<f64>,
    /// Erasure-free capacity at the shortened read length `lbar (1 - delta)`.
    pub rate_ssc_short: Option<f64>,
    pub valid: bool,
    pub reason: Option<String>,
}

impl RatePoint {
    pub fn evaluate(c: f64, lbar: f64, delta: f64) -> Self {
        let reason = if !(c.is_finite() && c > 0.0) {
            Some("c_not_positive")
        } else if !(0.0..=1.0).contains(&delta) {
            Some("delta_out_of_range")
        } else if !(lbar * (1.0 - delta) > 1.0) {
            Some("effective_read_length_not_above_1")
        } else {
            None
        };
        match reason {
            Some(r) => RatePoint {
                c,
                delta,
                lbar,
                alpha: None,
                rate_sse: None,
                rate_ssc_short: None,
                valid: false,
                reason: Some(r.to_string()),
            },
            None => RatePoint {
                c,
                delta,
                lbar,
                alpha: alpha(c, lbar, delta).ok(),
                rate_sse: sse_rate_bound(c, lbar, delta).ok(),
                rate_ssc_short: ssc_capacity(c, lbar * (1.0 - delta)).ok(),
                valid: true,
                reason: None,
            },
        }
    }
}

/// Rows for every `delta` (outer) and `c` (inner). Points that violate the
/// hypothesis are kept with `valid = false`.
pub fn rate_curve(
    c_grid: &[f64],
    lbar: f64,
    deltas: &[f64],
    exec: Execution,
) -> Result<Vec<RatePoint>, RateError> {
    if c_grid.is_empty() || deltas.is_empty() {
        return Err(RateError::Domain("rate grid is empty".into()));
    }
    let pairs: Vec<(f64, f64)> = deltas
        .iter()
        .flat_map(|&dl| c_grid.iter().map(move |&c| (c, dl)))
        .collect();
    Ok(map_slice(&pairs, exec, |&(c, dl)| {
        RatePoint::evaluate(c, lbar, dl)
    }))
}

pub const RATE_CSV_HEADER: &str = "c,delta,lbar,rate_sse,rate_ssc_short,valid,reason";

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_rate_csv<W: Write>(points: &[RatePoint], mut w: W) -> io::Result<()> {
    w.write_all(RATE_CSV_HEADER.as_bytes())?;
    w.write_all(b"\n")?;
    for p in points {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            p.c,
            p.delta,
            p.lbar,
            opt(p.rate_sse),
            opt(p.rate_ssc_short),
            p.valid,
            p.reason.as_deref().unwrap_or("")
        )?;
    }
    Ok(())
}

/// Parses the output of [`write_rate_csv`].
pub fn parse_rate_csv(text: &str) -> Result<Vec<RatePoint>, RateError> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == RATE_CSV_HEADER => {}
        other => return Err(RateError::Domain(format!("unexpected header {other:?}"))),
    }
    let num = |s: &str, line: usize| -> Result<f64, RateError> {
        s.parse::<f64>()
            .map_err(|_| RateError::Domain(format!("line {line}: bad number {s:?}")))
    };
    let opt_num = |s: &str, line: usize| -> Result<Option<f64>, RateError> {
        if s.is_empty() {
            Ok(None)
        } else {
            num(s, line).map(Some)
        }
    };
    lines
        .enumerate()
        .filter(|(_, l)| !l.is_empty())
        .map(|(i, l)| {
            let line = i + 2;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 7 {
                return Err(RateError::Domain(format!(
                    "line {line}: expected 7 fields, got {}",
                    f.len()
                )));
            }
            let (c, delta, lbar) = (num(f[0], line)?, num(f[1], line)?, num(f[2], line)?);
            let valid = match f[5] {
                "true" => true,
                "false" => false,
                v => return Err(RateError::Domain(format!("line {line}: bad flag {v:?}"))),
            };
            Ok(RatePoint {
                c,
                delta,
                lbar,
                alpha: if valid {
                    alpha(c, lbar, delta).ok()
                } else {
                    None
                },
                rate_sse: opt_num(f[3], line)?,
                rate_ssc_short: opt_num(f[4], line)?,
                valid,
                reason: (!f[6].is_empty()).then(|| f[6].to_string()),
            })
        })
        .collect()
}

/// Parses `start:stop:step` (inclusive, within half a step), a comma list,
/// or a single number.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>, RateError> {
    let bad = |s: &str| RateError::Domain(format!("bad grid value {s:?}"));
    let parse = |s: &str| {
        s.trim().parse::<f64>().map_err(|_| bad(s)).and_then(|v| {
            if v.is_finite() {
                Ok(v)
            } else {
                Err(bad(s))
            }
        })
    };
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(RateError::Domain(format!(
                "grid {spec:?} is not start:stop:step"
            )));
        }
        let (start, stop, step) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
        if !(step > 0.0) || stop < start {
            return Err(RateError::Domain(format!(
                "grid {spec:?} needs step > 0 and stop >= start"
            )));
        }
        let count = ((stop - start) / step + 0.5).floor() as usize + 1;
        Ok((0..count)
            .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
            .collect())
    } else {
        let v = spec.split(',').map(parse).collect::<Result<Vec<_>, _>>()?;
        if v.is_empty() {
            return Err(RateError::Domain("empty grid".into()));
        }
        Ok(v)
    }
}
