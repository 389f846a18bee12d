//! Maximal hole function and one-sided / two-sided weak porosity over finite
//! probe families.

mod checks;
mod probes;
mod report;

use serde::{Deserialize, Serialize};

pub use checks::{
    comparison_bound, comparison_check, comparison_counterexample, left_propagation_check,
    ComparisonCheck, CounterexampleRow, PropagationCheck,
};
pub use probes::{Alignment, ProbeFamily, ProbeOptions};
pub use report::{
    certify, decay_constants, doubling_witness, exponent_bound, sweep, DoublingReport,
    PorosityReport, ProbeRow, ScaleMax, SweepReport, SweepRow, Witness, GAMMA_GRID_OCTAVES,
    SIGMA_CAP, SIGMA_FLOOR,
};

use crate::error::{Error, Result};
use crate::numeric::{canonical_sum, le_slack};
use crate::real_sets::scan::Scan;
use crate::real_sets::{Interval, SetDescription};

/// Which half of an interval has to carry the pores.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    /// Pores in `I⁻` measured against `ρ(I⁺)`.
    Right,
    /// Pores in `I⁺` measured against `ρ(I⁻)`.
    Left,
    /// Pores anywhere in `I` measured against `ρ(I)`.
    TwoSided,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Right => "right",
            Side::Left => "left",
            Side::TwoSided => "two_sided",
        }
    }

    pub fn mirror(self) -> Side {
        match self {
            Side::Right => Side::Left,
            Side::Left => Side::Right,
            Side::TwoSided => Side::TwoSided,
        }
    }
}

impl std::str::FromStr for Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<Side> {
        match s {
            "right" | "plus" => Ok(Side::Right),
            "left" | "minus" => Ok(Side::Left),
            "two_sided" | "two-sided" => Ok(Side::TwoSided),
            _ => Err(Error::Parse(format!(
                "unknown side {s:?} (expected right, left or two_sided)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PorosityParams {
    pub sigma: f64,
    pub gamma: f64,
    pub side: Side,
}

impl PorosityParams {
    pub fn new(sigma: f64, gamma: f64, side: Side) -> Result<Self> {
        for (name, v) in [("sigma", sigma), ("gamma", gamma)] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "must lie in (0, 1)",
                });
            }
        }
        Ok(PorosityParams { sigma, gamma, side })
    }
}

pub(crate) fn check_gamma(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "gamma",
            value: gamma,
            reason: "must lie in (0, 1)",
        })
    }
}

/// `ρ_E(I)`: radius of the largest `E`-free open interval inside `I`.
pub fn rho(set: &SetDescription, interval: &Interval) -> Result<f64> {
    set.max_hole(interval)
}

/// Fraction of `part` covered by components of `part \ E` of length at least
/// `threshold`.
fn passing_fraction(set: &SetDescription, part: &Interval, threshold: f64) -> Result<f64> {
    let scan = Scan::new(set, part)?;
    let covered = canonical_sum(
        scan.pieces()
            .iter()
            .filter(|p| le_slack(threshold, p.length()))
            .map(|p| (p.length(), p.mult))
            .collect(),
    );
    Ok((covered / part.length()).min(1.0))
}

/// The largest `σ` for which the porosity condition on `side` holds on `I`
/// with the given `γ`.
pub fn sigma_at(set: &SetDescription, interval: &Interval, gamma: f64, side: Side) -> Result<f64> {
    check_gamma(gamma)?;
    Ok(evaluate(set, interval, gamma, side)?.sigma)
}

/// Per-interval quantities behind [`sigma_at`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Evaluation {
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub rho: f64,
    pub sigma: f64,
}

pub(crate) fn evaluate(
    set: &SetDescription,
    interval: &Interval,
    gamma: f64,
    side: Side,
) -> Result<Evaluation> {
    let (minus, plus) = (interval.left_half(), interval.right_half());
    let rho_minus = rho(set, &minus)?;
    let rho_plus = rho(set, &plus)?;
    let whole = rho(set, interval)?;
    let sigma = match side {
        Side::Right => passing_fraction(set, &minus, 2.0 * gamma * rho_plus)?,
        Side::Left => passing_fraction(set, &plus, 2.0 * gamma * rho_minus)?,
        Side::TwoSided => passing_fraction(set, interval, 2.0 * gamma * whole)?,
    };
    Ok(Evaluation {
        rho_minus,
        rho_plus,
        rho: whole,
        sigma,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    #[test]
    fn hole_function_examples() {
        for n in 1..=20 {
            let p = 2f64.powi(n);
            let i = iv(-p, p);
            assert_eq!(rho(&SetDescription::naturals(), &i).unwrap(), p / 2.0);
            if n >= 2 {
                assert_eq!(
                    rho(&SetDescription::geometric_naturals(), &i).unwrap(),
                    p / 4.0
                );
            }
        }
        assert_eq!(
            rho(&SetDescription::singleton(0.0), &iv(1.0, 3.0)).unwrap(),
            1.0
        );
        assert_eq!(
            rho(&SetDescription::integers(), &iv(0.25, 2.25)).unwrap(),
            0.5
        );
    }

    #[test]
    fn sigma_examples() {
        let i = iv(-2.0, 2.0);
        assert_eq!(
            sigma_at(&SetDescription::integers(), &i, 0.5, Side::Right).unwrap(),
            1.0
        );
        assert_eq!(
            sigma_at(&SetDescription::naturals(), &i, 0.5, Side::Right).unwrap(),
            1.0
        );
        let s = sigma_at(
            &SetDescription::singleton(0.0),
            &iv(-1.0, 1.0),
            0.5,
            Side::Right,
        )
        .unwrap();
        assert!(s >= 0.5);
    }

    #[test]
    fn sigma_on_the_other_sides() {
        // ℕ₀ on (-7, 9): the negative half-line is the only long pore
        let s = sigma_at(
            &SetDescription::naturals(),
            &iv(-7.0, 9.0),
            0.5,
            Side::TwoSided,
        )
        .unwrap();
        assert_eq!(s, 7.0 / 16.0);
        // reflected ℕ₀ on (-16, 16): I⁺ is one pore of radius 8, I⁻ only unit gaps
        let r = SetDescription::naturals().reflect();
        assert_eq!(
            sigma_at(&r, &iv(-16.0, 16.0), 0.5, Side::Right).unwrap(),
            0.0
        );
        assert_eq!(
            sigma_at(&r, &iv(-16.0, 16.0), 0.5, Side::Left).unwrap(),
            1.0
        );
    }

    #[test]
    fn gamma_is_validated() {
        let i = iv(0.0, 1.0);
        assert!(sigma_at(&SetDescription::integers(), &i, 0.0, Side::Right).is_err());
        assert!(sigma_at(&SetDescription::integers(), &i, 1.0, Side::Right).is_err());
        assert!(PorosityParams::new(0.5, 1.5, Side::Left).is_err());
    }

    #[test]
    fn side_names_round_trip() {
        for side in [Side::Right, Side::Left, Side::TwoSided] {
            assert_eq!(side.name().parse::<Side>().unwrap(), side);
            assert_eq!(side.mirror().mirror(), side);
        }
    }
}
