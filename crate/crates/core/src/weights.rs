//! The weight `w(x) = d(x, E)^{-α}`: exact integrals, essential bounds and
//! one-sided maximal averages.
//!
//! On every component of `J \ E` the distance is `min(x - e₀, e₁ - x)` for the
//! two points of `E` bracketing it, so integrals reduce to sums of
//! `∫ u^{-α} du` over explicit ranges.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numeric::{canonical_sum, power_integral_span, serialize_extended};
use crate::real_sets::scan::{Piece, Scan};
use crate::real_sets::{Interval, SetDescription, DEFAULT_POINT_CAP};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeightSpec {
    pub set: SetDescription,
    pub alpha: f64,
}

/// `x₀ ≤ x₁` with `w = 0` left of `x₀`, `0 < w < ∞` between, `w = ∞` right of
/// `x₁`. For distance powers `w` is positive and finite off the null set `E`,
/// so the profile is always the whole line; local integrability is reported
/// separately.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportProfile {
    #[serde(serialize_with = "serialize_extended")]
    pub x0: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub x1: f64,
    pub locally_integrable: bool,
    /// When not locally integrable: integrability fails on every
    /// neighbourhood of a point of this set.
    pub non_integrable_at: Option<SetDescription>,
}

/// Breakpoints of `x ↦ d(x, E)` on a window: points of `E` and the midpoints
/// of the gaps between them. The distance is affine with slope ±1 between
/// consecutive breakpoints.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PiecewiseDistance {
    pub window: Interval,
    pub breakpoints: Vec<f64>,
}

impl PiecewiseDistance {
    pub fn new(set: &SetDescription, window: &Interval) -> Result<Self> {
        let mut breakpoints = set.points_in(window.lo(), window.hi(), DEFAULT_POINT_CAP)?;
        let scan = Scan::new(set, window)?;
        for p in scan.points(DEFAULT_POINT_CAP)?.windows(2) {
            breakpoints.push(0.5 * (p[0] + p[1]));
        }
        // midpoints of the gaps cut by the window edges
        if let (Some(b), Some(first)) = (scan.below, breakpoints.first().copied()) {
            let m = 0.5 * (b + first.min(window.hi()));
            if window.contains(m) {
                breakpoints.push(m);
            }
        }
        if let (Some(a), Some(last)) = (scan.above, breakpoints.last().copied()) {
            let m = 0.5 * (last.max(window.lo()) + a);
            if window.contains(m) {
                breakpoints.push(m);
            }
        }
        if scan.runs.is_empty() {
            if let (Some(b), Some(a)) = (scan.below, scan.above) {
                let m = 0.5 * (a + b);
                if window.contains(m) {
                    breakpoints.push(m);
                }
            }
        }
        breakpoints.sort_by(f64::total_cmp);
        breakpoints.dedup();
        Ok(PiecewiseDistance {
            window: *window,
            breakpoints,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightRow {
    pub x: f64,
    pub distance: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub weight: f64,
}

/// `columns x,distance,weight`
pub fn write_table_csv<W: Write>(rows: &[WeightRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x", "distance", "weight"])?;
    for r in rows {
        w.write_record([
            r.x.to_string(),
            r.distance.to_string(),
            r.weight.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Candidate averaging lengths for the one-sided maximal operators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalOptions {
    /// Largest averaging length considered.
    pub reach: f64,
    /// Geometric fill-in lengths per octave below `reach`.
    pub per_octave: u32,
    pub octaves: u32,
}

impl Default for MaximalOptions {
    fn default() -> Self {
        MaximalOptions {
            reach: 1024.0,
            per_octave: 64,
            octaves: 40,
        }
    }
}

/// A certified lower bound for `M⁻w(x)` or `M⁺w(x)`, with the averaging
/// length that attains it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MaximalEstimate {
    pub x: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub value: f64,
    pub h: f64,
    pub candidates: usize,
}

#[derive(Clone, Copy)]
enum Direction {
    Backward,
    Forward,
}

fn piece_integral(p: &Piece, alpha: f64) -> f64 {
    let open_left = p.gap_lo == f64::NEG_INFINITY;
    let open_right = p.gap_hi == f64::INFINITY;
    match (open_left, open_right) {
        (true, true) => 0.0,
        (true, false) => power_integral_span(p.gap_hi - p.right, p.length(), alpha),
        (false, true) => power_integral_span(p.left - p.gap_lo, p.length(), alpha),
        (false, false) => {
            let mid = 0.5 * (p.gap_lo + p.gap_hi);
            let near_lo = (mid - p.left).min(p.length());
            let near_hi = (p.right - mid).min(p.length());
            power_integral_span(p.left - p.gap_lo, near_lo, alpha)
                + power_integral_span(p.gap_hi - p.right, near_hi, alpha)
        }
    }
}

impl WeightSpec {
    pub fn new(set: SetDescription, alpha: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                value: alpha,
                reason: "must be a finite number > 0",
            });
        }
        Ok(WeightSpec { set, alpha })
    }

    pub fn locally_integrable(&self) -> bool {
        self.alpha < 1.0
    }

    /// `w(x)`; `∞` on `E`, `0` when `E` is empty.
    pub fn value(&self, x: f64) -> f64 {
        let d = self.set.distance(x);
        if d == 0.0 {
            f64::INFINITY
        } else {
            d.powf(-self.alpha)
        }
    }

    pub fn table(&self, xs: &[f64]) -> Vec<WeightRow> {
        xs.iter()
            .map(|&x| WeightRow {
                x,
                distance: self.set.distance(x),
                weight: self.value(x),
            })
            .collect()
    }

    /// `∫_J w`, `∞` when the integral diverges.
    pub fn integrate(&self, interval: &Interval) -> Result<f64> {
        let scan = Scan::new(&self.set, interval)?;
        Ok(canonical_sum(
            scan.pieces()
                .iter()
                .map(|p| (piece_integral(p, self.alpha), p.mult))
                .collect(),
        ))
    }

    pub fn average(&self, interval: &Interval) -> Result<f64> {
        Ok(self.integrate(interval)? / interval.length())
    }

    /// `ess inf_J w = (max_{closure J} d)^{-α}`.
    pub fn ess_inf(&self, interval: &Interval) -> Result<f64> {
        Ok(self.set.max_distance(interval)?.powf(-self.alpha))
    }

    /// `∞` when the closure of `J` meets `E`; otherwise the larger endpoint value.
    pub fn ess_sup(&self, interval: &Interval) -> Result<f64> {
        let scan = Scan::new(&self.set, interval)?;
        if scan.touches_set() {
            return Ok(f64::INFINITY);
        }
        let left = scan.below.map_or(f64::INFINITY, |b| interval.lo() - b);
        let right = scan.above.map_or(f64::INFINITY, |a| a - interval.hi());
        Ok(left.min(right).powf(-self.alpha))
    }

    pub fn support_profile(&self) -> SupportProfile {
        SupportProfile {
            x0: f64::NEG_INFINITY,
            x1: f64::INFINITY,
            locally_integrable: self.locally_integrable(),
            non_integrable_at: (!self.locally_integrable()).then(|| self.set.clone()),
        }
    }

    /// Lower bound for `M⁻w(x) = sup_h (1/h) ∫_{x-h}^x w`.
    pub fn maximal_minus(
        &self,
        x: f64,
        options: &MaximalOptions,
        extra: &[f64],
    ) -> Result<MaximalEstimate> {
        self.maximal(x, options, extra, Direction::Backward)
    }

    /// Lower bound for `M⁺w(x) = sup_h (1/h) ∫_x^{x+h} w`.
    pub fn maximal_plus(
        &self,
        x: f64,
        options: &MaximalOptions,
        extra: &[f64],
    ) -> Result<MaximalEstimate> {
        self.maximal(x, options, extra, Direction::Forward)
    }

    fn window(x: f64, h: f64, dir: Direction) -> Result<Interval> {
        match dir {
            Direction::Backward => Interval::new(x - h, x),
            Direction::Forward => Interval::new(x, x + h),
        }
    }

    fn mean_over(&self, x: f64, h: f64, dir: Direction) -> Result<f64> {
        let w = Self::window(x, h, dir)?;
        Ok(self.integrate(&w)? / h)
    }

    fn maximal(
        &self,
        x: f64,
        options: &MaximalOptions,
        extra: &[f64],
        dir: Direction,
    ) -> Result<MaximalEstimate> {
        if !(options.reach > 0.0 && options.reach.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "reach",
                value: options.reach,
                reason: "must be a finite number > 0",
            });
        }
        if !self.locally_integrable() && self.set.distance(x) == 0.0 {
            return Err(Error::Precondition(format!(
                "x = {x} lies in E and alpha = {} >= 1",
                self.alpha
            )));
        }
        let reach = options.reach;
        let side = Self::window(x, reach, dir)?;
        let mut hs: Vec<f64> = PiecewiseDistance::new(&self.set, &side)?
            .breakpoints
            .into_iter()
            .map(|p| (p - x).abs())
            .collect();
        let steps = options.per_octave.max(1) * options.octaves;
        hs.extend(
            (0..=steps).map(|j| reach * (-(j as f64) / options.per_octave.max(1) as f64).exp2()),
        );
        hs.extend(extra.iter().copied());
        hs.retain(|h| *h > 0.0 && h.is_finite());
        hs.sort_by(f64::total_cmp);
        hs.dedup();
        let means: Vec<f64> = hs
            .par_iter()
            .map(|&h| self.mean_over(x, h, dir))
            .collect::<Result<_>>()?;
        let (mut best_i, mut best) = (0, f64::NEG_INFINITY);
        for (i, &m) in means.iter().enumerate() {
            if m > best {
                best = m;
                best_i = i;
            }
        }
        let mut best_h = hs[best_i];
        if best.is_finite() {
            // golden-section search between the neighbouring candidates
            let mut lo = hs[best_i.saturating_sub(1)];
            let mut hi = hs[(best_i + 1).min(hs.len() - 1)];
            let g = 0.5 * (5f64.sqrt() - 1.0);
            for _ in 0..60 {
                if hi - lo <= 1e-15 * hi {
                    break;
                }
                let m1 = hi - g * (hi - lo);
                let m2 = lo + g * (hi - lo);
                let (v1, v2) = (self.mean_over(x, m1, dir)?, self.mean_over(x, m2, dir)?);
                for (h, v) in [(m1, v1), (m2, v2)] {
                    if v > best {
                        best = v;
                        best_h = h;
                    }
                }
                if v1 >= v2 {
                    hi = m2;
                } else {
                    lo = m1;
                }
            }
        }
        Ok(MaximalEstimate {
            x,
            value: best,
            h: best_h,
            candidates: hs.len(),
        })
    }
}
