use serde::Serialize;

use super::{check_gamma, rho};
use crate::error::{Error, Result};
use crate::numeric::le_slack;
use crate::real_sets::{Interval, SetDescription};

/// `ρ(I) ≤ ((γ+1)/γ) ρ(I⁻)` on one interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropagationCheck {
    pub interval: Interval,
    pub gamma: f64,
    pub rho: f64,
    pub rho_minus: f64,
    pub bound: f64,
    pub ok: bool,
}

pub fn left_propagation_check(
    set: &SetDescription,
    interval: &Interval,
    gamma: f64,
) -> Result<PropagationCheck> {
    check_gamma(gamma)?;
    let whole = rho(set, interval)?;
    let rho_minus = rho(set, &interval.left_half())?;
    let bound = (gamma + 1.0) / gamma * rho_minus;
    Ok(PropagationCheck {
        interval: *interval,
        gamma,
        rho: whole,
        rho_minus,
        bound,
        ok: le_slack(whole, bound),
    })
}

/// `ρ(I⁺) ≤ θ₁ (|I|/|J|)^θ₂ ρ(J⁺)` with `θ₁ = ((γ+1)/γ)²`, `θ₂ = log₂((γ+1)/γ)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonCheck {
    pub outer: Interval,
    pub inner: Interval,
    pub gamma: f64,
    pub theta1: f64,
    pub theta2: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub ok: bool,
}

/// Evaluates both sides without checking that `J ⊂ I` and `z_J ≤ z_I`.
pub fn comparison_bound(
    set: &SetDescription,
    outer: &Interval,
    inner: &Interval,
    gamma: f64,
) -> Result<ComparisonCheck> {
    check_gamma(gamma)?;
    let base = (gamma + 1.0) / gamma;
    let theta1 = base * base;
    let theta2 = base.log2();
    let lhs = rho(set, &outer.right_half())?;
    let rhs =
        theta1 * (outer.length() / inner.length()).powf(theta2) * rho(set, &inner.right_half())?;
    Ok(ComparisonCheck {
        outer: *outer,
        inner: *inner,
        gamma,
        theta1,
        theta2,
        lhs,
        rhs,
        ok: le_slack(lhs, rhs),
    })
}

/// [`comparison_bound`] behind its hypotheses: `J ⊂ I` and `center(J) ≤ center(I)`.
pub fn comparison_check(
    set: &SetDescription,
    outer: &Interval,
    inner: &Interval,
    gamma: f64,
) -> Result<ComparisonCheck> {
    if !outer.contains_interval(inner) {
        return Err(Error::Precondition(format!(
            "{inner} is not contained in {outer}"
        )));
    }
    if inner.center() > outer.center() {
        return Err(Error::Precondition(format!(
            "center of {inner} lies right of the center of {outer}"
        )));
    }
    comparison_bound(set, outer, inner, gamma)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CounterexampleRow {
    pub n: u32,
    pub check: ComparisonCheck,
}

/// Evaluates the pair `I_n = (-2n(1+t), 2n(1-t))`, `J_n = (-n, n)` for each
/// `n`; here `J_n` sits right of the center of `I_n`, so the hypothesis is
/// violated and the bound is expected to break for large `n`.
pub fn comparison_counterexample(
    set: &SetDescription,
    gamma: f64,
    t: f64,
    ns: impl IntoIterator<Item = u32>,
) -> Result<Vec<CounterexampleRow>> {
    if !(t > 0.0 && t < 0.5) {
        return Err(Error::InvalidParameter {
            name: "t",
            value: t,
            reason: "must lie in (0, 1/2)",
        });
    }
    ns.into_iter()
        .map(|n| {
            let m = f64::from(n);
            let outer = Interval::new(-2.0 * m * (1.0 + t), 2.0 * m * (1.0 - t))?;
            let inner = Interval::new(-m, m)?;
            Ok(CounterexampleRow {
                n,
                check: comparison_bound(set, &outer, &inner, gamma)?,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn propagation_examples() {
        let c = left_propagation_check(&SetDescription::integers(), &iv(-2.0, 2.0), 0.5).unwrap();
        assert_eq!((c.rho, c.bound, c.ok), (0.5, 1.5, true));
        let c =
            left_propagation_check(&SetDescription::singleton(0.0), &iv(1.0, 5.0), 0.5).unwrap();
        assert_eq!(c.rho_minus, 1.0);
        assert!(c.ok);
        let c = left_propagation_check(&SetDescription::geometric_naturals(), &iv(-8.0, 8.0), 0.5)
            .unwrap();
        assert_eq!((c.rho, c.bound, c.ok), (2.0, 6.0, true));
    }

    #[test]
    fn propagation_fails_for_the_reflected_naturals() {
        let r = SetDescription::naturals().reflect();
        let c = left_propagation_check(&r, &iv(-64.0, 64.0), 0.5).unwrap();
        assert!(!c.ok);
    }

    #[test]
    fn comparison_constants() {
        let c = comparison_check(
            &SetDescription::integers(),
            &iv(-8.0, 8.0),
            &iv(-4.0, 2.0),
            0.5,
        )
        .unwrap();
        assert_eq!(c.theta1, 9.0);
        assert!((c.theta2 - 3f64.log2()).abs() < 1e-15);
        assert!(c.ok);
    }

    #[test]
    fn comparison_preconditions() {
        let z = SetDescription::integers();
        assert!(matches!(
            comparison_check(&z, &iv(-8.0, 8.0), &iv(0.0, 4.0), 0.5),
            Err(Error::Precondition(_))
        ));
        assert!(matches!(
            comparison_check(&z, &iv(-8.0, 8.0), &iv(-9.0, 0.0), 0.5),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn counterexample_breaks_beyond_fifty_four() {
        let rows =
            comparison_counterexample(&SetDescription::naturals(), 0.5, 0.25, 1..=80).unwrap();
        for row in &rows {
            // ρ(I_n⁺) = n/4 once the negative pore dominates, rhs = 9·2^θ₂/2 = 13.5
            assert!((row.check.rhs - 13.5).abs() < 1e-9);
            assert_eq!(row.check.ok, row.n <= 54, "n = {}", row.n);
        }
    }
}
