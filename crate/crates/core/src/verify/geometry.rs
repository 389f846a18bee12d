use rayon::prelude::*;

use super::{interval_value, num, values, NamedSet, Suite, SuiteConfig, SuiteResult, Tally};
use crate::error::{Error, Result};
use crate::numeric::le_slack;
use crate::porosity::rho;
use crate::real_sets::Interval;

/// `max_{x ∈ I} d(x, E) ≤ 2 (1 + d(I, E)/|I|) ρ(I)` on every probe.
pub fn distance_bound(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let set = &named.set;
    let family = config.family(set)?;
    let rows: Vec<(Interval, f64, f64, f64)> = family
        .intervals()
        .par_iter()
        .map(|i| -> Result<_> {
            Ok((*i, set.max_distance(i)?, set.set_distance(i)?, rho(set, i)?))
        })
        .collect::<Result<_>>()?;
    let mut t = Tally::new(Suite::DistanceBound, named);
    t.probes(&family);
    let mut tight = 0.0f64;
    for (i, far, gap, r) in rows {
        let bound = 2.0 * (1.0 + gap / i.length()) * r;
        tight = tight.max(far / bound);
        t.check(le_slack(far, bound), "max distance within bound", || {
            values([
                ("interval", interval_value(&i)),
                ("max_distance", num(far)),
                ("set_distance", num(gap)),
                ("rho", num(r)),
                ("bound", num(bound)),
            ])
        });
    }
    t.constant("largest_ratio", num(tight));
    Ok(t.finish())
}

/// `ρ(I⁺) ≥ C₀ max_{x ∈ I⁺} d(x, E)` with `C₀ = 1/(6 + 4η)` on the probes with
/// `d(I, E) ≤ η |I|`.
pub fn pore_distance(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let eta = config.eta;
    if !(eta > 0.0 && eta.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "eta",
            value: eta,
            reason: "must be a finite number > 0",
        });
    }
    let c0 = 1.0 / (6.0 + 4.0 * eta);
    let set = &named.set;
    let family = config.family(set)?;
    let rows: Vec<Option<(Interval, f64, f64)>> = family
        .intervals()
        .par_iter()
        .map(|i| -> Result<_> {
            if set.set_distance(i)? > eta * i.length() {
                return Ok(None);
            }
            let plus = i.right_half();
            Ok(Some((*i, rho(set, &plus)?, set.max_distance(&plus)?)))
        })
        .collect::<Result<_>>()?;
    let mut t = Tally::new(Suite::PoreDistance, named);
    t.probes(&family);
    t.parameter("eta", num(eta));
    t.constant("c0", num(c0));
    let excluded = rows.iter().filter(|r| r.is_none()).count();
    t.constant("excluded_far_probes", excluded.into());
    for (i, r, far) in rows.into_iter().flatten() {
        t.check(
            le_slack(c0 * far, r),
            "pore radius dominates distance",
            || {
                values([
                    ("interval", interval_value(&i)),
                    ("rho_plus", num(r)),
                    ("max_distance_plus", num(far)),
                    ("c0", num(c0)),
                ])
            },
        );
    }
    Ok(t.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real_sets::SetDescription;

    #[test]
    fn bound_is_tight_next_to_a_point() {
        let set = SetDescription::singleton(0.0);
        let i = Interval::new(1.0, 2.0).unwrap();
        let bound =
            2.0 * (1.0 + set.set_distance(&i).unwrap() / i.length()) * rho(&set, &i).unwrap();
        assert_eq!((set.max_distance(&i).unwrap(), bound), (2.0, 2.0));
        let z = SetDescription::integers();
        let j = Interval::new(0.1, 0.9).unwrap();
        // the farthest point is the midpoint 1/2, and d(I, E) = 0.1
        assert_eq!(z.max_distance(&j).unwrap(), 0.5);
        assert!((rho(&z, &j).unwrap() - 0.4).abs() < 1e-15);
        let bound = 2.0 * (1.0 + z.set_distance(&j).unwrap() / j.length()) * rho(&z, &j).unwrap();
        assert!((bound - 0.9).abs() < 1e-15);
    }

    #[test]
    fn catalog_sets_pass() {
        let config = SuiteConfig::default();
        for name in ["integers", "naturals", "singleton"] {
            let set = super::super::preset(name).unwrap();
            let a = distance_bound(&set, &config).unwrap();
            assert!(
                a.pass && a.checks > 1000,
                "{name}: {:?}",
                a.failures.first()
            );
            let b = pore_distance(&set, &config).unwrap();
            assert!(b.pass && b.checks > 0, "{name}: {:?}", b.failures.first());
            assert_eq!(b.constants["c0"], num(1.0 / 14.0));
        }
    }
}
