use serde::Serialize;

use super::{num, NamedSet, Suite, SuiteConfig, SuiteResult, Tally};
use crate::error::Result;
use crate::muckenhoupt::{a1_constant, A1Side, TripleFamily, TripleSample};
use crate::numeric::serialize_extended;
use crate::porosity::{sweep, PorosityParams, Side};
use crate::weights::WeightSpec;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A1Probe {
    pub alpha: f64,
    pub diverging: bool,
    #[serde(serialize_with = "serialize_extended")]
    pub constant_lower_bound: f64,
}

/// One side of the comparison between one-sided porosity and the matching
/// one-sided `A₁` condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SideAgreement {
    pub porosity_side: Side,
    pub a1_side: A1Side,
    pub certified: bool,
    pub params: Option<PorosityParams>,
    pub constructed_alpha: Option<f64>,
    pub a1: Vec<A1Probe>,
    /// Certified with bounded constants at the constructed exponent, or not
    /// certified with divergence at every grid exponent.
    pub agree: bool,
    pub witnesses: Vec<TripleSample>,
}

fn compare(
    named: &NamedSet,
    config: &SuiteConfig,
    porosity_side: Side,
    triples: &TripleFamily,
) -> Result<SideAgreement> {
    let set = &named.set;
    let a1_side = match porosity_side {
        Side::Left => A1Side::Minus,
        _ => A1Side::Plus,
    };
    let family = config.wide_family(set)?;
    let report = sweep(set, porosity_side, &family)?;
    let alphas: Vec<f64> = match report.constructed_alpha {
        Some(a) => vec![a],
        None => config.alpha_grid.clone(),
    };
    let mut a1 = Vec::new();
    let mut witnesses = Vec::new();
    for alpha in alphas {
        let r = a1_constant(&WeightSpec::new(set.clone(), alpha)?, a1_side, triples)?;
        if r.diverging && witnesses.is_empty() {
            witnesses = r.witnesses.clone();
        }
        a1.push(A1Probe {
            alpha,
            diverging: r.diverging,
            constant_lower_bound: r.constant_lower_bound,
        });
    }
    let certified = report.best.is_some();
    let agree = if certified {
        a1.iter().all(|p| !p.diverging)
    } else {
        a1.iter().all(|p| p.diverging)
    };
    Ok(SideAgreement {
        porosity_side,
        a1_side,
        certified,
        params: report.best,
        constructed_alpha: report.constructed_alpha,
        a1,
        agree,
        witnesses,
    })
}

/// Right-sided porosity against boundedness of the plus-side constants at
/// the exponent built from the certified pair (and the mirrored statement).
/// A set that is not certified must diverge at every exponent of the grid.
pub fn a1_equivalence(named: &NamedSet, config: &SuiteConfig) -> Result<SuiteResult> {
    let mut t = Tally::new(Suite::A1Equivalence, named);
    let family = config.wide_family(&named.set)?;
    t.probes(&family);
    let triples = TripleFamily::around(&named.set, &config.window, &config.triples)?;
    t.parameter("triples", triples.len().into());
    t.parameter(
        "alpha_grid",
        config
            .alpha_grid
            .iter()
            .map(|a| num(*a))
            .collect::<Vec<_>>()
            .into(),
    );
    let mut sides = Vec::new();
    for side in [Side::Right, Side::Left] {
        let s = compare(named, config, side, &triples)?;
        let key = side.name();
        t.constant(&format!("{key}_certified"), s.certified.into());
        if let Some(p) = s.params {
            t.constant(&format!("{key}_sigma"), num(p.sigma));
            t.constant(&format!("{key}_gamma"), num(p.gamma));
        }
        if let Some(a) = s.constructed_alpha {
            t.constant(&format!("{key}_alpha0"), num(a));
        }
        if let (true, Some(p)) = (s.certified, s.a1.first()) {
            t.constant(
                &format!("{key}_measured_constant"),
                num(p.constant_lower_bound),
            );
        }
        t.check(
            s.agree,
            &format!("{key} porosity agrees with {} constants", s.a1_side.name()),
            || {
                super::values([
                    ("certified", s.certified.into()),
                    ("a1", serde_json::to_value(&s.a1).expect("serializes")),
                ])
            },
        );
        sides.push(s);
    }
    t.details(serde_json::to_value(&sides).expect("serializes"));
    Ok(t.finish())
}
