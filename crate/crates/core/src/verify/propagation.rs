use rayon::prelude::*;

use super::{interval_value, num, values, NamedSet, Suite, SuiteConfig, SuiteResult, Tally};
use crate::error::Result;
use crate::porosity::{
    comparison_check, comparison_counterexample, left_propagation_check, sweep, ComparisonCheck,
    PorosityParams, PropagationCheck, Side,
};
use crate::real_sets::{Interval, SetDescription};

fn record_params(t: &mut Tally, p: &PorosityParams) {
    t.constant("sigma", num(p.sigma));
    t.constant("gamma", num(p.gamma));
}

/// `ρ(I) ≤ ((γ+1)/γ) ρ(I⁻)` on at least `propagation_probes` probes, with `γ`
/// from the right-sided sweep on the same probes.
pub fn left_propagation(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let set = &named.set;
    let mut family = config.family(set)?;
    if family.len() < config.propagation_probes {
        let missing = config.propagation_probes - family.len();
        family = family.with_random(&config.window, missing, config.probes.seed.wrapping_add(1))?;
    }
    let mut t = Tally::new(Suite::LeftPropagation, named);
    t.probes(&family);
    let report = sweep(set, Side::Right, &family)?;
    let Some(params) = report.best else {
        t.not_applicable("no right-sided certification on these probes");
        return Ok(t.finish());
    };
    record_params(&mut t, &params);
    let checks: Vec<PropagationCheck> = family
        .intervals()
        .par_iter()
        .map(|i| left_propagation_check(set, i, params.gamma))
        .collect::<Result<_>>()?;
    for c in checks {
        t.check(c.ok, "whole radius within left-half bound", || {
            values([
                ("interval", interval_value(&c.interval)),
                ("gamma", num(c.gamma)),
                ("rho", num(c.rho)),
                ("rho_minus", num(c.rho_minus)),
                ("bound", num(c.bound)),
            ])
        });
    }
    Ok(t.finish())
}

/// Inner intervals paired with each probe: the left half, the left quarter
/// and the centred half. All satisfy `J ⊂ I` and `center(J) ≤ center(I)`.
fn inner_intervals(i: &Interval) -> Vec<Interval> {
    let q = 0.25 * i.length();
    [
        Some(i.left_half()),
        Interval::new(i.lo(), i.lo() + q).ok(),
        Interval::new(i.lo() + q, i.hi() - q).ok(),
    ]
    .into_iter()
    .flatten()
    .filter(|j| i.contains_interval(j) && j.center() <= i.center())
    .collect()
}

/// Counterexample parameters: `ℕ₀`, `γ = 1/2`, `t = 1/4`.
const COUNTER_T: f64 = 0.25;
const COUNTER_N: u32 = 128;

/// `ρ(I⁺) ≤ θ₁ (|I|/|J|)^θ₂ ρ(J⁺)` for probe pairs meeting the hypothesis,
/// and the failure of the same bound on `ℕ₀` once the hypothesis on the
/// centres is dropped.
pub fn scale_comparison(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let set = &named.set;
    let family = config.family(set)?;
    let mut t = Tally::new(Suite::ScaleComparison, named);
    t.probes(&family);

    let rows =
        comparison_counterexample(&SetDescription::naturals(), 0.5, COUNTER_T, 1..=COUNTER_N)?;
    let first_break = rows.iter().find(|r| !r.check.ok).map(|r| r.n);
    t.constant("counterexample_t", num(COUNTER_T));
    t.constant(
        "counterexample_first_failure",
        first_break.map_or(serde_json::Value::Null, Into::into),
    );
    t.check(
        first_break.is_some(),
        "bound breaks without the centre hypothesis",
        || values([("largest_n", COUNTER_N.into())]),
    );

    let report = sweep(set, Side::Right, &family)?;
    let Some(params) = report.best else {
        t.note("no right-sided certification on these probes; only the counterexample was checked");
        return Ok(t.finish());
    };
    record_params(&mut t, &params);
    let checks: Vec<Vec<ComparisonCheck>> = family
        .intervals()
        .par_iter()
        .map(|i| {
            inner_intervals(i)
                .iter()
                .map(|j| comparison_check(set, i, j, params.gamma))
                .collect()
        })
        .collect::<Result<_>>()?;
    if let Some(c) = checks.iter().flatten().next() {
        t.constant("theta1", num(c.theta1));
        t.constant("theta2", num(c.theta2));
    }
    for c in checks.into_iter().flatten() {
        t.check(c.ok, "right-half radius comparison", || {
            values([
                ("outer", interval_value(&c.outer)),
                ("inner", interval_value(&c.inner)),
                ("gamma", num(c.gamma)),
                ("lhs", num(c.lhs)),
                ("rhs", num(c.rhs)),
            ])
        });
    }
    Ok(t.finish())
}
