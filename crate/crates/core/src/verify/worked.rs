use super::{interval_value, num, values, NamedSet, Suite, SuiteConfig, SuiteResult, Tally};
use crate::error::Result;
use crate::muckenhoupt::triple_value;
use crate::porosity::{
    certify, comparison_counterexample, decay_constants, doubling_witness, rho, PorosityParams,
    ProbeFamily, Side,
};
use crate::real_sets::{Interval, SetDescription};
use crate::weights::WeightSpec;

fn symmetric(n: i32) -> Result<Interval> {
    let p = 2f64.powi(n);
    Interval::new(-p, p)
}

/// Fixed worked examples; the result does not depend on the set argument
/// beyond its label.
pub fn examples(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let mut t = Tally::new(Suite::Examples, named);
    let half = |side| PorosityParams::new(0.5, 0.5, side);
    let z = SetDescription::integers();
    let n = SetDescription::naturals();
    let g = SetDescription::geometric_naturals();

    let family = config.family(&z)?;
    t.probes(&family);
    let r = certify(&z, &half(Side::TwoSided)?, &family)?;
    t.check(r.pass, "integers two-sided (1/2, 1/2)", || {
        values([("worst_sigma", num(r.worst_sigma))])
    });

    let witnesses: Vec<Interval> = (1..=20).map(symmetric).collect::<Result<_>>()?;
    for (k, i) in (1..=20).zip(&witnesses) {
        let r = rho(&n, i)?;
        t.check(
            r == 2f64.powi(k - 1),
            "naturals radius on symmetric intervals",
            || values([("interval", interval_value(i)), ("rho", num(r))]),
        );
    }
    let n_family = config.family(&n)?.with_extra(witnesses.iter().copied());
    let r = certify(&n, &half(Side::TwoSided)?, &n_family)?;
    t.check(!r.pass, "naturals fail two-sided (1/2, 1/2)", || {
        values([("worst_sigma", num(r.worst_sigma))])
    });
    let d = doubling_witness(&n, &ProbeFamily::from_intervals(witnesses.clone()))?;
    t.check(d.diverging, "naturals have no doubling constant", || {
        values([("phi", num(d.phi_estimate))])
    });
    t.constant("naturals_phi_on_witnesses", num(d.phi_estimate));

    for (k, i) in (2..=20).zip(&witnesses[1..]) {
        let r = rho(&g, i)?;
        t.check(
            r == 2f64.powi(k - 2),
            "geometric naturals radius on symmetric intervals",
            || values([("interval", interval_value(i)), ("rho", num(r))]),
        );
    }
    let r = certify(&g, &half(Side::Right)?, &config.family(&g)?)?;
    t.check(r.pass, "geometric naturals right-sided (1/2, 1/2)", || {
        values([("worst_sigma", num(r.worst_sigma))])
    });

    let rows = comparison_counterexample(&n, 0.5, 0.25, 1..=80)?;
    let breaks_after_54 = rows.iter().all(|r| r.check.ok == (r.n <= 54));
    t.check(
        breaks_after_54,
        "counterexample breaks exactly beyond n = 54",
        || {
            values([(
                "first_failure",
                rows.iter()
                    .find(|r| !r.check.ok)
                    .map_or(serde_json::Value::Null, |r| r.n.into()),
            )])
        },
    );

    let origin = WeightSpec::new(SetDescription::singleton(0.0), 0.5)?;
    let lattice = WeightSpec::new(z.clone(), 0.5)?;
    let exact = [
        (
            "point weight on (0, 1)",
            origin.integrate(&Interval::new(0.0, 1.0)?)?,
            2.0,
        ),
        (
            "point weight on (-1, 1)",
            origin.integrate(&Interval::new(-1.0, 1.0)?)?,
            4.0,
        ),
    ];
    for (what, got, want) in exact {
        t.check(got == want, what, || {
            values([("value", num(got)), ("expected", num(want))])
        });
    }
    let approx = [
        (
            "lattice weight on (0, 1)",
            lattice.integrate(&Interval::new(0.0, 1.0)?)?,
            2.0 * 2f64.sqrt(),
        ),
        (
            "point weight triple (0, 1, 2)",
            triple_value(&origin, 0.0, 1.0, 2.0)?,
            2f64.sqrt(),
        ),
    ];
    for (what, got, want) in approx {
        t.check((got - want).abs() <= 1e-14 * want, what, || {
            values([("value", num(got)), ("expected", num(want))])
        });
    }
    let (b1, b2) = decay_constants(0.5, 0.5);
    t.check(
        (b1, b2) == (0.125, 0.75),
        "decay constants for (1/2, 1/2)",
        || values([("beta1", num(b1)), ("beta2", num(b2))]),
    );
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::preset;

    #[test]
    fn worked_examples_pass() {
        let r = examples(&preset("integers").unwrap(), &SuiteConfig::default()).unwrap();
        assert!(r.pass, "{:?}", r.failures);
        assert!(r.checks > 40);
    }
}
