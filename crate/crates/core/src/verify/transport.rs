use rayon::prelude::*;

use super::{interval_value, num, values, NamedSet, Suite, SuiteConfig, SuiteResult, Tally};
use crate::error::Result;
use crate::porosity::{
    certify, doubling_witness, rho, sigma_at, sweep, PorosityParams, PorosityReport, Side,
};
use crate::real_sets::{CutSide, Interval};

fn report_values(r: &PorosityReport) -> super::Values {
    values([
        ("sigma", num(r.params.sigma)),
        ("gamma", num(r.params.gamma)),
        ("side", r.params.side.name().into()),
        ("worst_sigma", num(r.worst_sigma)),
        (
            "witness",
            r.witnesses
                .first()
                .map_or(serde_json::Value::Null, |w| interval_value(&w.interval)),
        ),
    ])
}

/// Two-sided `(σ, γ)` on the probes and their halves gives both one-sided
/// conditions with `(σ, γ/Φ)`; both one-sided conditions with `(σ₀, γ₀)`
/// give the two-sided one with `(σ₀/2, γ₀/2)`.
pub fn side_equivalence(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let set = &named.set;
    let family = config.family(set)?;
    let closed = family.halves_closed();
    let mut t = Tally::new(Suite::SideEquivalence, named);
    t.probes(&family);

    let two = sweep(set, Side::TwoSided, &closed)?;
    let doubling = doubling_witness(set, &family)?;
    t.constant("phi", num(doubling.phi_estimate));
    t.constant("doubling_diverges", doubling.diverging.into());
    t.constant("two_sided_certified", two.best.is_some().into());
    match two.best {
        Some(p) if doubling.phi_estimate.is_finite() && !doubling.diverging => {
            let gamma = p.gamma / doubling.phi_estimate;
            t.constant("transported_gamma", num(gamma));
            for side in [Side::Right, Side::Left] {
                let r = certify(set, &PorosityParams::new(p.sigma, gamma, side)?, &family)?;
                t.check(r.pass, &format!("two-sided gives {}", side.name()), || {
                    report_values(&r)
                });
            }
        }
        Some(_) => t.note(
            "two-sided sweep certified but no finite doubling constant; forward transport skipped",
        ),
        None => t.note("no two-sided certification on these probes"),
    }

    let right = sweep(set, Side::Right, &family)?.best;
    let left = sweep(set, Side::Left, &family)?.best;
    t.constant("right_certified", right.is_some().into());
    t.constant("left_certified", left.is_some().into());
    if let (Some(r), Some(l)) = (right, left) {
        let sigma = r.sigma.min(l.sigma) / 2.0;
        let gamma = r.gamma.min(l.gamma) / 2.0;
        let two = certify(
            set,
            &PorosityParams::new(sigma, gamma, Side::TwoSided)?,
            &family,
        )?;
        t.check(two.pass, "both one-sided give two-sided", || {
            report_values(&two)
        });
    }
    Ok(t.finish())
}

/// Bitwise reflection duality of `ρ` and `σ`, duality of whole
/// certifications, and transport of two-sided porosity to the cut set
/// `E ∩ [x₀, ∞)`.
pub fn transforms(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let set = &named.set;
    let mirror = set.clone().reflect();
    let family = config.family(set)?;
    let mut t = Tally::new(Suite::Transforms, named);
    t.probes(&family);
    t.parameter("cut_at", num(config.cut_at));
    let gamma = 0.5;

    type Mismatch = (Interval, &'static str, f64, f64);
    let mismatches: Vec<Vec<Mismatch>> = family
        .intervals()
        .par_iter()
        .map(|i| -> Result<Vec<Mismatch>> {
            let r = i.reflect();
            let mut out = Vec::new();
            let (a, b) = (rho(set, i)?, rho(&mirror, &r)?);
            if a.to_bits() != b.to_bits() {
                out.push((*i, "rho", a, b));
            }
            for side in [Side::Right, Side::Left, Side::TwoSided] {
                let a = sigma_at(set, i, gamma, side)?;
                let b = sigma_at(&mirror, &r, gamma, side.mirror())?;
                if a.to_bits() != b.to_bits() {
                    out.push((*i, side.name(), a, b));
                }
            }
            Ok(out)
        })
        .collect::<Result<_>>()?;
    for (i, m) in family.intervals().iter().zip(&mismatches) {
        t.check(m.is_empty(), "reflection is exact", || {
            let (_, what, a, b) = m[0];
            values([
                ("interval", interval_value(i)),
                ("quantity", what.into()),
                ("value", num(a)),
                ("mirrored", num(b)),
            ])
        });
    }

    let reflected = family.reflect();
    if let Some(p) = sweep(set, Side::Right, &family)?.best {
        let a = certify(set, &p, &family)?;
        let b = certify(
            &mirror,
            &PorosityParams::new(p.sigma, p.gamma, Side::Left)?,
            &reflected,
        )?;
        t.check(
            a.pass == b.pass && a.worst_sigma.to_bits() == b.worst_sigma.to_bits(),
            "right certification equals mirrored left certification",
            || {
                values([
                    ("right", num(a.worst_sigma)),
                    ("mirrored_left", num(b.worst_sigma)),
                ])
            },
        );
    }

    let closed = family.halves_closed();
    let two = sweep(set, Side::TwoSided, &closed)?;
    let doubling = doubling_witness(set, &family)?;
    match two.best {
        Some(p) if doubling.phi_estimate.is_finite() && !doubling.diverging => {
            let cut = set.clone().cutoff(config.cut_at, CutSide::Right);
            let params =
                PorosityParams::new(p.sigma, p.gamma / doubling.phi_estimate, Side::Right)?;
            let r = certify(&cut, &params, &family)?;
            t.constant("cut_sigma", num(params.sigma));
            t.constant("cut_gamma", num(params.gamma));
            t.check(r.pass, "cut set is right-sided porous", || {
                report_values(&r)
            });
        }
        _ => t.note(
            "no two-sided certification with a finite doubling constant; cutoff transport skipped",
        ),
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::preset;

    #[test]
    fn integers_transport_both_ways() {
        let z = preset("integers").unwrap();
        let r = side_equivalence(&z, &SuiteConfig::default()).unwrap();
        assert!(r.pass && r.checks == 3, "{:?}", r.failures);
        let r = transforms(&z, &SuiteConfig::default()).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert!(r.constants.contains_key("cut_gamma"));
    }

    #[test]
    fn reflection_is_exact_on_geometric_naturals() {
        let r = transforms(
            &preset("geometric-naturals").unwrap(),
            &SuiteConfig::default(),
        )
        .unwrap();
        assert!(r.pass, "{:?}", r.failures);
    }
}
