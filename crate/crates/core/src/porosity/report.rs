use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use super::{evaluate, Evaluation, PorosityParams, ProbeFamily, Side};
use crate::error::{Error, Result};
use crate::numeric::{canonical_sum, le_slack, top_octaves_diverge};
use crate::real_sets::scan::Scan;
use crate::real_sets::{Interval, SetDescription};

/// Certified `σ` below this value are not reported as a porosity pair.
pub const SIGMA_FLOOR: f64 = 1.0 / 16.0;
/// Larger `σ` do not improve the decay constants.
pub const SIGMA_CAP: f64 = 0.75;
/// `γ` runs over `2^-1, …, 2^-GAMMA_GRID_OCTAVES`.
pub const GAMMA_GRID_OCTAVES: i32 = 12;
const MAX_WITNESSES: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub lo: f64,
    pub hi: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
    pub sigma_at: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Witness {
    pub interval: Interval,
    pub sigma: f64,
    pub rho: f64,
    pub rho_minus: f64,
    pub rho_plus: f64,
}

/// Outcome of checking a porosity condition on every probe of a family.
///
/// A pass means the condition held on the listed probes only.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PorosityReport {
    pub params: PorosityParams,
    pub probe_count: usize,
    pub worst_interval: Option<Interval>,
    pub worst_sigma: f64,
    #[serde(serialize_with = "crate::numeric::serialize_extended")]
    pub phi_estimate: f64,
    pub pass: bool,
    pub witnesses: Vec<Witness>,
    #[serde(skip)]
    pub rows: Vec<ProbeRow>,
}

impl PorosityReport {
    /// One probe per row: `lo,hi,rho_minus,rho_plus,sigma_at`.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        for row in &self.rows {
            w.serialize(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

fn evaluate_all(
    set: &SetDescription,
    probes: &[Interval],
    gamma: f64,
    side: Side,
) -> Result<Vec<Evaluation>> {
    probes
        .par_iter()
        .map(|i| evaluate(set, i, gamma, side))
        .collect()
}

/// Checks the porosity condition of `params` on every probe.
pub fn certify(
    set: &SetDescription,
    params: &PorosityParams,
    probes: &ProbeFamily,
) -> Result<PorosityReport> {
    let intervals = probes.intervals();
    if intervals.is_empty() {
        return Err(Error::Precondition("the probe family is empty".into()));
    }
    let evals = evaluate_all(set, &intervals, params.gamma, params.side)?;
    let mut worst: Option<(Interval, f64)> = None;
    let mut failing: Vec<Witness> = Vec::new();
    let mut rows = Vec::with_capacity(intervals.len());
    for (interval, e) in intervals.iter().zip(&evals) {
        rows.push(ProbeRow {
            lo: interval.lo(),
            hi: interval.hi(),
            rho_minus: e.rho_minus,
            rho_plus: e.rho_plus,
            sigma_at: e.sigma,
        });
        if worst.is_none_or(|(_, s)| e.sigma < s) {
            worst = Some((*interval, e.sigma));
        }
        if !le_slack(params.sigma, e.sigma) {
            failing.push(Witness {
                interval: *interval,
                sigma: e.sigma,
                rho: e.rho,
                rho_minus: e.rho_minus,
                rho_plus: e.rho_plus,
            });
        }
    }
    failing.sort_by(|a, b| a.sigma.total_cmp(&b.sigma));
    failing.truncate(MAX_WITNESSES);
    let doubling = doubling_witness(set, probes)?;
    Ok(PorosityReport {
        params: *params,
        probe_count: intervals.len(),
        worst_interval: worst.map(|w| w.0),
        worst_sigma: worst.map_or(1.0, |w| w.1),
        phi_estimate: doubling.phi_estimate,
        pass: failing.is_empty(),
        witnesses: failing,
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleMax {
    /// `floor(log2 |I|)`
    pub octave: i32,
    #[serde(serialize_with = "crate::numeric::serialize_extended")]
    pub max_ratio: f64,
}

/// Largest `ρ(I)/ρ(J)` over probes `I` and their halves `J` (`I⁻`, `I⁺` and
/// the centred half).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DoublingReport {
    #[serde(serialize_with = "crate::numeric::serialize_extended")]
    pub phi_estimate: f64,
    pub worst_outer: Option<Interval>,
    pub worst_inner: Option<Interval>,
    pub pair_count: usize,
    pub per_octave: Vec<ScaleMax>,
    /// Per-octave maxima keep growing: no doubling constant fits.
    pub diverging: bool,
}

pub fn doubling_witness(set: &SetDescription, probes: &ProbeFamily) -> Result<DoublingReport> {
    let intervals = probes.intervals();
    let per_probe: Vec<(f64, Interval)> = intervals
        .par_iter()
        .map(|i| -> Result<(f64, Interval)> {
            let outer = set.max_hole(i)?;
            let quarter = 0.25 * i.length();
            let centred =
                Interval::new(i.lo() + quarter, i.hi() - quarter).unwrap_or_else(|_| i.left_half());
            let mut best = (f64::NEG_INFINITY, *i);
            for inner in [i.left_half(), i.right_half(), centred] {
                let r = set.max_hole(&inner)?;
                let ratio = if r > 0.0 {
                    outer / r
                } else if outer > 0.0 {
                    f64::INFINITY
                } else {
                    1.0
                };
                if ratio > best.0 {
                    best = (ratio, inner);
                }
            }
            Ok(best)
        })
        .collect::<Result<_>>()?;
    let mut phi = 0.0;
    let mut worst = None;
    let mut octaves: std::collections::BTreeMap<i32, f64> = Default::default();
    for (i, (ratio, inner)) in intervals.iter().zip(&per_probe) {
        if *ratio > phi {
            phi = *ratio;
            worst = Some((*i, *inner));
        }
        let slot = octaves
            .entry(i.length().log2().floor() as i32)
            .or_insert(0.0);
        *slot = slot.max(*ratio);
    }
    let per_octave: Vec<ScaleMax> = octaves
        .into_iter()
        .map(|(octave, max_ratio)| ScaleMax { octave, max_ratio })
        .collect();
    let maxima: Vec<f64> = per_octave.iter().map(|s| s.max_ratio).collect();
    Ok(DoublingReport {
        phi_estimate: phi,
        worst_outer: worst.map(|w| w.0),
        worst_inner: worst.map(|w| w.1),
        pair_count: 3 * intervals.len(),
        diverging: top_octaves_diverge(&maxima),
        per_octave,
    })
}

/// `(β₁, β₂) = (γ/4, 1 - min(3/8, σ/2))`: the decay constants attached to a
/// right-sided pair.
pub fn decay_constants(sigma: f64, gamma: f64) -> (f64, f64) {
    (gamma / 4.0, 1.0 - (3.0f64 / 8.0).min(sigma / 2.0))
}

/// Largest exponent with `β₁^{-α} β₂ < 1`.
pub fn exponent_bound(sigma: f64, gamma: f64) -> f64 {
    let (b1, b2) = decay_constants(sigma, gamma);
    (1.0 / b2).ln() / (1.0 / b1).ln()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub gamma: f64,
    /// Minimum of `σ(I, γ)` over the probes.
    pub sigma_star: f64,
    pub certified: bool,
}

/// Best certified `(σ, γ)` over the dyadic `γ` grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub side: Side,
    pub probe_count: usize,
    pub rows: Vec<SweepRow>,
    pub best: Option<PorosityParams>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    /// `log(1/β₂) / log(1/β₁)` for the best pair.
    pub alpha_max: Option<f64>,
    /// Half of `alpha_max`, safely inside the admissible range.
    pub constructed_alpha: Option<f64>,
}

/// Piece lengths with multiplicity, the threshold radius and the length of
/// the part of `I` that carries pores.
type PoreProfile = (Vec<(f64, u64)>, f64, f64);

fn pore_profile(set: &SetDescription, i: &Interval, side: Side) -> Result<PoreProfile> {
    let (part, reference) = match side {
        Side::Right => (i.left_half(), i.right_half()),
        Side::Left => (i.right_half(), i.left_half()),
        Side::TwoSided => (*i, *i),
    };
    let radius = set.max_hole(&reference)?;
    let scan = Scan::new(set, &part)?;
    let lengths = scan.pieces().iter().map(|p| (p.length(), p.mult)).collect();
    Ok((lengths, radius, part.length()))
}

pub fn sweep(set: &SetDescription, side: Side, probes: &ProbeFamily) -> Result<SweepReport> {
    let intervals = probes.intervals();
    if intervals.is_empty() {
        return Err(Error::Precondition("the probe family is empty".into()));
    }
    let profiles: Vec<PoreProfile> = intervals
        .par_iter()
        .map(|i| pore_profile(set, i, side))
        .collect::<Result<_>>()?;
    let gammas: Vec<f64> = (1..=GAMMA_GRID_OCTAVES).map(|k| 2f64.powi(-k)).collect();
    let rows: Vec<SweepRow> = gammas
        .par_iter()
        .map(|&gamma| {
            let sigma_star = profiles
                .iter()
                .map(|(lengths, radius, total)| {
                    let threshold = 2.0 * gamma * radius;
                    let covered = canonical_sum(
                        lengths
                            .iter()
                            .filter(|(l, _)| le_slack(threshold, *l))
                            .copied()
                            .collect(),
                    );
                    (covered / total).min(1.0)
                })
                .fold(1.0, f64::min);
            SweepRow {
                gamma,
                sigma_star,
                certified: sigma_star >= SIGMA_FLOOR,
            }
        })
        .collect();
    let mut best: Option<(f64, PorosityParams)> = None;
    for row in rows.iter().filter(|r| r.certified) {
        let sigma = row.sigma_star.min(SIGMA_CAP);
        let a = exponent_bound(sigma, row.gamma);
        if best.is_none_or(|(b, _)| a > b) {
            best = Some((a, PorosityParams::new(sigma, row.gamma, side)?));
        }
    }
    let constants = best.map(|(_, p)| decay_constants(p.sigma, p.gamma));
    Ok(SweepReport {
        side,
        probe_count: intervals.len(),
        rows,
        best: best.map(|b| b.1),
        beta1: constants.map(|c| c.0),
        beta2: constants.map(|c| c.1),
        alpha_max: best.map(|b| b.0),
        constructed_alpha: best.map(|b| b.0 / 2.0),
    })
}
