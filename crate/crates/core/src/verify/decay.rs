use rayon::prelude::*;
use serde::Serialize;

use super::{interval_value, num, values, NamedSet, Suite, SuiteConfig, SuiteResult, Tally};
use crate::error::{Error, Result};
use crate::numeric::{le_slack, serialize_extended};
use crate::porosity::{certify, decay_constants, rho, sweep, PorosityParams, ProbeFamily, Side};
use crate::real_sets::{Interval, SetDescription, DEFAULT_POINT_CAP};

/// Below this the measures are treated as underflowed and the sequence stops.
const UNDERFLOW: f64 = 1e-300;

/// Allowed distance between a fitted dimension and a known value.
pub const DIMENSION_TOLERANCE: f64 = 0.05;

/// Least-squares slope of `ys` against `xs`.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return None;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs[..n].iter().map(|x| (x - mx) * (x - mx)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayRow {
    pub k: u32,
    /// `β₁^k ε₀`
    pub eps: f64,
    pub measure: f64,
    /// `β₂^k` times the first measure.
    pub bound: f64,
    /// Next measure over this one; absent on the last row.
    pub ratio: Option<f64>,
    pub ok: bool,
}

/// Neighbourhood measures `|F(ε)|` of `E` inside the reduced interval along
/// `ε = β₁^k ε₀`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayReport {
    pub set: String,
    pub params: PorosityParams,
    /// Whether the right-sided condition with `params` held on the supplied
    /// probes; `None` when no probes were given.
    pub certified: Option<bool>,
    pub interval: Interval,
    /// From the left end of the interval to the centre of the largest pore
    /// of its right half.
    pub reduced: Interval,
    pub eps0: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub rows: Vec<DecayRow>,
    /// `exp` of the fitted slope of `ln |F|` against `k`.
    pub fitted_rate: Option<f64>,
    pub stopped_early: bool,
    pub pass: bool,
}

/// Interval straddling the point of `E` nearest the window centre, with that
/// point in its left half.
fn default_interval(set: &SetDescription, window: &Interval) -> Result<Interval> {
    let c = window.center();
    let p = match (set.nearest_at_or_below(c), set.nearest_at_or_above(c)) {
        (Some(a), Some(b)) => {
            if c - a <= b - c {
                a
            } else {
                b
            }
        }
        (Some(a), None) => a,
        (None, Some(b)) => b,
        (None, None) => return Err(Error::EmptySet),
    };
    let s = window.length() / 4.0;
    Interval::new(p - 0.5 * s, p + 1.5 * s)
}

pub fn decay_report(
    named: &NamedSet,
    params: &PorosityParams,
    interval: &Interval,
    eps0: Option<f64>,
    depth: u32,
    probes: Option<&ProbeFamily>,
) -> Result<DecayReport> {
    if params.side != Side::Right {
        return Err(Error::Precondition(
            "decay needs right-sided parameters".into(),
        ));
    }
    let set = &named.set;
    if !set.meets(&interval.left_half())? {
        return Err(Error::Precondition(format!(
            "the left half of {interval} contains no point of the set"
        )));
    }
    let plus = interval.right_half();
    let rho_plus = rho(set, &plus)?;
    let pore = *set
        .gaps(&plus)?
        .largest()
        .ok_or_else(|| Error::Precondition(format!("{plus} has no pore")))?;
    let reduced = Interval::new(interval.lo(), pore.center())?;
    let eps0 = eps0.unwrap_or(0.5 * rho_plus);
    if !(eps0 > 0.0 && eps0 < rho_plus) {
        return Err(Error::Precondition(format!(
            "eps0 = {eps0} must lie strictly between 0 and the right-half radius {rho_plus}"
        )));
    }
    let (beta1, beta2) = decay_constants(params.sigma, params.gamma);
    let certified = probes
        .map(|f| certify(set, params, f).map(|r| r.pass))
        .transpose()?;

    let mut measures = Vec::new();
    let mut stopped_early = false;
    for k in 0..=depth + 1 {
        let eps = eps0 * beta1.powi(k as i32);
        let m = set.neighborhood_measure(&reduced, eps)?;
        measures.push((eps, m));
        if m < UNDERFLOW {
            stopped_early = k < depth + 1;
            break;
        }
    }
    let first = measures[0].1;
    let rows: Vec<DecayRow> = measures
        .iter()
        .enumerate()
        .map(|(k, &(eps, m))| {
            let next = measures.get(k + 1).map(|n| n.1);
            let ok = match next {
                Some(n) if k as u32 <= depth => le_slack(n, beta2 * m),
                _ => true,
            };
            DecayRow {
                k: k as u32,
                eps,
                measure: m,
                bound: beta2.powi(k as i32) * first,
                ratio: next.map(|n| n / m),
                ok,
            }
        })
        .collect();
    let (ks, logs): (Vec<f64>, Vec<f64>) = rows
        .iter()
        .filter(|r| r.measure > 0.0)
        .map(|r| (f64::from(r.k), r.measure.ln()))
        .unzip();
    Ok(DecayReport {
        set: named.label.clone(),
        params: *params,
        certified,
        interval: *interval,
        reduced,
        eps0,
        beta1,
        beta2,
        fitted_rate: least_squares_slope(&ks, &logs).map(f64::exp),
        stopped_early,
        pass: rows.iter().all(|r| r.ok),
        rows,
    })
}

pub(super) fn decay_suite(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let mut t = Tally::new(Suite::Decay, named);
    let params = PorosityParams::new(0.5, 0.5, Side::Right)?;
    let interval = match default_interval(&named.set, &config.window) {
        Ok(i) => i,
        Err(Error::EmptySet) => {
            t.not_applicable("the set is empty");
            return Ok(t.finish());
        }
        Err(e) => return Err(e),
    };
    let family = config.family(&named.set)?;
    t.probes(&family);
    let report = decay_report(
        named,
        &params,
        &interval,
        None,
        config.decay_depth,
        Some(&family),
    )?;
    t.parameter("interval", interval_value(&interval));
    t.parameter("sigma", num(params.sigma));
    t.parameter("gamma", num(params.gamma));
    t.parameter("depth", config.decay_depth.into());
    t.constant("beta1", num(report.beta1));
    t.constant("beta2", num(report.beta2));
    t.constant("eps0", num(report.eps0));
    t.constant(
        "fitted_rate",
        report.fitted_rate.map_or(serde_json::Value::Null, num),
    );
    if report.certified == Some(false) {
        t.note("the right-sided condition with these parameters fails on the probes; decay is measured anyway");
    }
    for r in &report.rows {
        t.check(r.ok, "measure ratio at most beta2", || {
            values([
                ("k", r.k.into()),
                ("eps", num(r.eps)),
                ("measure", num(r.measure)),
                ("ratio", r.ratio.map_or(serde_json::Value::Null, num)),
            ])
        });
    }
    t.details(serde_json::to_value(&report).expect("reports serialize"));
    Ok(t.finish())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionReport {
    pub set: String,
    pub window: Interval,
    pub eps: Vec<f64>,
    /// `|E(ε) ∩ J|` for each `ε`.
    pub measures: Vec<f64>,
    pub slope: f64,
    /// `1 - slope`, clipped to `[0, 1]`.
    pub fitted: f64,
    pub params: Option<PorosityParams>,
    /// `1 - log β₂ / log β₁` for `params`.
    pub bound: Option<f64>,
    pub within_bound: Option<bool>,
    #[serde(serialize_with = "serialize_extended")]
    pub tolerance: f64,
}

const DIMENSION_OCTAVES: u32 = 9;
const SAMPLES_PER_OCTAVE: u32 = 4;

/// Fits `log |E(ε) ∩ J|` against `log ε` on a geometric grid of `ε` starting
/// three octaves below `min(|J|/16, largest gap/4)`, where neighbourhoods of
/// separate pieces have mostly stopped merging.
pub fn dimension_report(
    named: &NamedSet,
    window: &Interval,
    params: Option<PorosityParams>,
) -> Result<DimensionReport> {
    let set = &named.set;
    let largest = set
        .gaps(window)?
        .largest()
        .map_or(window.length(), Interval::length);
    let eps_max = (window.length() / 128.0).min(largest / 32.0);
    let count = DIMENSION_OCTAVES * SAMPLES_PER_OCTAVE + 1;
    let eps: Vec<f64> = (0..count)
        .map(|j| eps_max * (-f64::from(j) / f64::from(SAMPLES_PER_OCTAVE)).exp2())
        .collect();
    let measures: Vec<f64> = eps
        .par_iter()
        .map(|&e| set.neighborhood_measure(window, e))
        .collect::<Result<_>>()?;
    let (xs, ys): (Vec<f64>, Vec<f64>) = eps
        .iter()
        .zip(&measures)
        .filter(|(_, m)| **m > 0.0)
        .map(|(e, m)| (e.ln(), m.ln()))
        .unzip();
    let slope = least_squares_slope(&xs, &ys)
        .ok_or_else(|| Error::Precondition(format!("the set does not meet {window}")))?;
    let fitted = (1.0 - slope).clamp(0.0, 1.0);
    let bound = params.map(|p| {
        let (b1, b2) = decay_constants(p.sigma, p.gamma);
        1.0 - b2.ln() / b1.ln()
    });
    Ok(DimensionReport {
        set: named.label.clone(),
        window: *window,
        eps,
        measures,
        slope,
        fitted,
        params,
        bound,
        within_bound: bound.map(|b| fitted <= b),
        tolerance: DIMENSION_TOLERANCE,
    })
}

/// Smallest window around the points of `E` inside `window`.
fn hull(set: &SetDescription, window: &Interval) -> Result<Interval> {
    let points = set.points_in(window.lo(), window.hi(), DEFAULT_POINT_CAP)?;
    match (points.first(), points.last()) {
        (Some(&a), Some(&b)) if b > a => Interval::new(a, b),
        _ => Ok(*window),
    }
}

pub(super) fn dimension_suite(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let mut t = Tally::new(Suite::Dimension, named);
    let window = hull(&named.set, &config.window)?;
    let family = config.family(&named.set)?;
    t.probes(&family);
    let params = sweep(&named.set, Side::Right, &family)?.best;
    let report = match dimension_report(named, &window, params) {
        Ok(r) => r,
        Err(Error::Precondition(why)) => {
            t.not_applicable(why);
            return Ok(t.finish());
        }
        Err(e) => return Err(e),
    };
    t.parameter("window", interval_value(&window));
    t.constant("fitted_dimension", num(report.fitted));
    if let Some(b) = report.bound {
        t.constant("bound", num(b));
    }
    t.check(
        (-1e-9..=1.0 + 1e-9).contains(&(1.0 - report.slope)),
        "fitted dimension in [0, 1] before clipping",
        || values([("slope", num(report.slope))]),
    );
    if let Some(ok) = report.within_bound {
        t.check(ok, "fitted dimension below the porosity bound", || {
            values([
                ("fitted", num(report.fitted)),
                ("bound", report.bound.map_or(serde_json::Value::Null, num)),
            ])
        });
    } else {
        t.note("no right-sided certification, so no bound to compare against");
    }
    t.details(serde_json::to_value(&report).expect("reports serialize"));
    Ok(t.finish())
}
