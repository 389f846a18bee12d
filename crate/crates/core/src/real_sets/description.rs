use serde::{Deserialize, Serialize};

use super::runs::{self, Budget, Run};
use crate::error::{Error, Result};

/// Default limit on points listed individually for one query window.
pub const DEFAULT_POINT_CAP: usize = 1_000_000;

/// Which half-line a lattice occupies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Extent {
    TwoSided,
    /// `origin + step·k`, `k >= 0`.
    Right,
    /// `origin + step·k`, `k <= 0`.
    Left,
}

/// `origin + step·ℤ`, possibly restricted to one side of the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Lattice {
    pub origin: f64,
    pub step: f64,
    pub extent: Extent,
}

/// The endpoint set of the `depth`-th iterate of a middle-fraction Cantor
/// construction on `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CantorIterate {
    pub lo: f64,
    pub hi: f64,
    /// Fraction of each interval removed from its middle.
    pub middle: f64,
    pub depth: u32,
}

/// Side kept by a cutoff.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CutSide {
    /// `E ∩ [at, ∞)`
    Right,
    /// `E ∩ (-∞, at]`
    Left,
}

/// A closed, Lebesgue-null subset of the real line that can be queried exactly
/// on any bounded window.
///
/// Serialized as a JSON object whose `kind` field selects the variant.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SetDescription {
    Finite {
        points: Vec<f64>,
    },
    Lattice(Lattice),
    /// `{-ratio^m : m >= 1} ∪ lattice`.
    GeometricLattice {
        ratio: f64,
        lattice: Lattice,
    },
    Cantor(CantorIterate),
    Union {
        sets: Vec<SetDescription>,
    },
    Translate {
        set: Box<SetDescription>,
        shift: f64,
    },
    /// Image under `x ↦ -x`.
    Reflect {
        set: Box<SetDescription>,
    },
    Cutoff {
        set: Box<SetDescription>,
        at: f64,
        side: CutSide,
    },
}

const MAX_CANTOR_DEPTH: u32 = 40;

/// Beyond this index magnitude consecutive lattice indices are no longer
/// distinguishable in `f64` and the index fix-up is skipped.
const INDEX_EXACT_LIMIT: f64 = 4_503_599_627_370_496.0; // 2^52

impl SetDescription {
    pub fn finite(mut points: Vec<f64>) -> Result<Self> {
        points.sort_by(f64::total_cmp);
        points.dedup();
        let set = SetDescription::Finite { points };
        set.validate()?;
        Ok(set)
    }

    pub fn singleton(x: f64) -> Self {
        SetDescription::Finite { points: vec![x] }
    }

    pub fn lattice(origin: f64, step: f64, extent: Extent) -> Result<Self> {
        let set = SetDescription::Lattice(Lattice {
            origin,
            step,
            extent,
        });
        set.validate()?;
        Ok(set)
    }

    /// ℤ
    pub fn integers() -> Self {
        SetDescription::Lattice(Lattice {
            origin: 0.0,
            step: 1.0,
            extent: Extent::TwoSided,
        })
    }

    /// ℕ₀ = {0, 1, 2, …}
    pub fn naturals() -> Self {
        SetDescription::Lattice(Lattice {
            origin: 0.0,
            step: 1.0,
            extent: Extent::Right,
        })
    }

    /// `{-2^m : m >= 1} ∪ {0, 1, 2, …}`: right-sided but not two-sided weakly porous.
    pub fn geometric_naturals() -> Self {
        SetDescription::GeometricLattice {
            ratio: 2.0,
            lattice: Lattice {
                origin: 0.0,
                step: 1.0,
                extent: Extent::Right,
            },
        }
    }

    pub fn cantor(lo: f64, hi: f64, middle: f64, depth: u32) -> Result<Self> {
        let set = SetDescription::Cantor(CantorIterate {
            lo,
            hi,
            middle,
            depth,
        });
        set.validate()?;
        Ok(set)
    }

    pub fn union(sets: Vec<SetDescription>) -> Result<Self> {
        let set = SetDescription::Union { sets };
        set.validate()?;
        Ok(set)
    }

    pub fn reflect(self) -> Self {
        SetDescription::Reflect {
            set: Box::new(self),
        }
    }

    pub fn translate(self, shift: f64) -> Self {
        SetDescription::Translate {
            set: Box::new(self),
            shift,
        }
    }

    pub fn cutoff(self, at: f64, side: CutSide) -> Self {
        SetDescription::Cutoff {
            set: Box::new(self),
            at,
            side,
        }
    }

    /// Parses and validates a JSON set document.
    pub fn from_json(text: &str) -> Result<Self> {
        let set: SetDescription = serde_json::from_str(text)
            .map_err(|e| Error::Parse(format!("line {} column {}: {e}", e.line(), e.column())))?;
        set.validate()?;
        Ok(set)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("set descriptions always serialize")
    }

    /// Checks every numeric field; errors name the offending field by path.
    pub fn validate(&self) -> Result<()> {
        self.validate_at("$")
    }

    fn validate_at(&self, path: &str) -> Result<()> {
        let invalid = |field: &str, reason: &str| Error::InvalidSet {
            field: format!("{path}.{field}"),
            reason: reason.to_string(),
        };
        match self {
            SetDescription::Finite { points } => {
                if points.is_empty() {
                    return Err(invalid("points", "must contain at least one point"));
                }
                if points.iter().any(|p| !p.is_finite()) {
                    return Err(invalid("points", "must be finite numbers"));
                }
                if points.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(invalid("points", "must be strictly increasing"));
                }
            }
            SetDescription::Lattice(l) => l.validate(path)?,
            SetDescription::GeometricLattice { ratio, lattice } => {
                if !(ratio.is_finite() && *ratio > 1.0) {
                    return Err(invalid("ratio", "must be a finite number > 1"));
                }
                lattice.validate(&format!("{path}.lattice"))?;
            }
            SetDescription::Cantor(c) => {
                if !(c.lo.is_finite() && c.hi.is_finite() && c.lo < c.hi) {
                    return Err(invalid("lo", "need finite lo < hi"));
                }
                if !(c.middle > 0.0 && c.middle < 1.0) {
                    return Err(invalid("middle", "must lie in (0, 1)"));
                }
                if c.depth > MAX_CANTOR_DEPTH {
                    return Err(invalid("depth", "must be at most 40"));
                }
            }
            SetDescription::Union { sets } => {
                if sets.is_empty() {
                    return Err(invalid("sets", "must list at least one set"));
                }
                for (i, s) in sets.iter().enumerate() {
                    s.validate_at(&format!("{path}.sets[{i}]"))?;
                }
            }
            SetDescription::Translate { set, shift } => {
                if !shift.is_finite() {
                    return Err(invalid("shift", "must be finite"));
                }
                set.validate_at(&format!("{path}.set"))?;
            }
            SetDescription::Reflect { set } => set.validate_at(&format!("{path}.set"))?,
            SetDescription::Cutoff { set, at, .. } => {
                if !at.is_finite() {
                    return Err(invalid("at", "must be finite"));
                }
                set.validate_at(&format!("{path}.set"))?;
            }
        }
        Ok(())
    }

    /// Largest point `<= x`.
    pub fn nearest_at_or_below(&self, x: f64) -> Option<f64> {
        match self {
            SetDescription::Finite { points } => {
                let k = points.partition_point(|&p| p <= x);
                k.checked_sub(1).map(|i| points[i])
            }
            SetDescription::Lattice(l) => l.at_or_below(x),
            SetDescription::GeometricLattice { ratio, lattice } => {
                max_opt(geometric_at_or_below(*ratio, x), lattice.at_or_below(x))
            }
            SetDescription::Cantor(c) => c.at_or_below(x),
            SetDescription::Union { sets } => sets
                .iter()
                .filter_map(|s| s.nearest_at_or_below(x))
                .reduce(f64::max),
            SetDescription::Translate { set, shift } => {
                set.nearest_at_or_below(x - shift).map(|p| p + shift)
            }
            SetDescription::Reflect { set } => set.nearest_at_or_above(-x).map(|p| -p),
            SetDescription::Cutoff { set, at, side } => match side {
                CutSide::Right => set.nearest_at_or_below(x).filter(|p| p >= at),
                CutSide::Left => set.nearest_at_or_below(x.min(*at)),
            },
        }
    }

    /// Smallest point `>= x`.
    pub fn nearest_at_or_above(&self, x: f64) -> Option<f64> {
        match self {
            SetDescription::Finite { points } => {
                let k = points.partition_point(|&p| p < x);
                points.get(k).copied()
            }
            SetDescription::Lattice(l) => l.at_or_above(x),
            SetDescription::GeometricLattice { ratio, lattice } => {
                min_opt(geometric_at_or_above(*ratio, x), lattice.at_or_above(x))
            }
            SetDescription::Cantor(c) => c.at_or_above(x),
            SetDescription::Union { sets } => sets
                .iter()
                .filter_map(|s| s.nearest_at_or_above(x))
                .reduce(f64::min),
            SetDescription::Translate { set, shift } => {
                set.nearest_at_or_above(x - shift).map(|p| p + shift)
            }
            SetDescription::Reflect { set } => set.nearest_at_or_below(-x).map(|p| -p),
            SetDescription::Cutoff { set, at, side } => match side {
                CutSide::Right => set.nearest_at_or_above(x.max(*at)),
                CutSide::Left => set.nearest_at_or_above(x).filter(|p| p <= at),
            },
        }
    }

    /// `d(x, E)`; infinite only if the set is empty.
    pub fn distance(&self, x: f64) -> f64 {
        let below = self.nearest_at_or_below(x).map_or(f64::INFINITY, |p| x - p);
        let above = self.nearest_at_or_above(x).map_or(f64::INFINITY, |p| p - x);
        below.min(above)
    }

    /// All points in the closed window `[lo, hi]`, in increasing order.
    pub fn points_in(&self, lo: f64, hi: f64, cap: usize) -> Result<Vec<f64>> {
        let mut budget = Budget::new(lo, hi, cap);
        let runs = self.runs(lo, hi, &mut budget)?;
        let total: u64 = runs.iter().map(|r| r.count).sum();
        if total as usize > cap {
            return Err(Error::WindowTooLarge { lo, hi, cap });
        }
        Ok(runs
            .iter()
            .flat_map(|r| (0..r.count).map(move |k| r.point(k)))
            .collect())
    }

    /// Points of the set in `[lo, hi]` as sorted runs with disjoint ranges.
    pub(crate) fn runs(&self, lo: f64, hi: f64, budget: &mut Budget) -> Result<Vec<Run>> {
        if lo.partial_cmp(&hi).is_none_or(|o| o.is_gt()) {
            return Ok(Vec::new());
        }
        match self {
            SetDescription::Finite { points } => {
                let from = points.partition_point(|&p| p < lo);
                let to = points.partition_point(|&p| p <= hi);
                budget.take((to - from) as u64)?;
                Ok(points[from..to].iter().map(|&p| Run::single(p)).collect())
            }
            SetDescription::Lattice(l) => Ok(l.run(lo, hi).into_iter().collect()),
            SetDescription::GeometricLattice { ratio, lattice } => {
                let geo = geometric_points(*ratio, lo, hi);
                budget.take(geo.len() as u64)?;
                let geo_runs = geo.into_iter().map(Run::single).collect();
                runs::union(
                    vec![geo_runs, lattice.run(lo, hi).into_iter().collect()],
                    budget,
                )
            }
            SetDescription::Cantor(c) => {
                let mut out = Vec::new();
                c.collect(lo, hi, budget, &mut out)?;
                Ok(out)
            }
            SetDescription::Union { sets } => {
                let lists = sets
                    .iter()
                    .map(|s| s.runs(lo, hi, budget))
                    .collect::<Result<Vec<_>>>()?;
                runs::union(lists, budget)
            }
            SetDescription::Translate { set, shift } => {
                let inner = set.runs(lo - shift, hi - shift, budget)?;
                Ok(runs::clip(
                    inner.into_iter().map(|r| r.translate(*shift)).collect(),
                    lo,
                    hi,
                ))
            }
            SetDescription::Reflect { set } => {
                let inner = set.runs(-hi, -lo, budget)?;
                Ok(inner.iter().rev().map(Run::reflect).collect())
            }
            SetDescription::Cutoff { set, at, side } => match side {
                CutSide::Right => set.runs(lo.max(*at), hi, budget),
                CutSide::Left => set.runs(lo, hi.min(*at), budget),
            },
        }
    }
}

impl Lattice {
    fn validate(&self, path: &str) -> Result<()> {
        if !self.origin.is_finite() {
            return Err(Error::InvalidSet {
                field: format!("{path}.origin"),
                reason: "must be finite".into(),
            });
        }
        if !(self.step.is_finite() && self.step > 0.0) {
            return Err(Error::InvalidSet {
                field: format!("{path}.step"),
                reason: "must be a finite number > 0".into(),
            });
        }
        Ok(())
    }

    fn point(&self, k: f64) -> f64 {
        self.origin + k * self.step
    }

    fn index_allowed(&self, k: f64) -> bool {
        match self.extent {
            Extent::TwoSided => true,
            Extent::Right => k >= 0.0,
            Extent::Left => k <= 0.0,
        }
    }

    /// Largest index with point `<= x`, ignoring the extent.
    fn floor_index(&self, x: f64) -> f64 {
        let mut k = ((x - self.origin) / self.step).floor();
        if k.abs() >= INDEX_EXACT_LIMIT {
            return k;
        }
        while self.point(k) > x {
            k -= 1.0;
        }
        while self.point(k + 1.0) <= x {
            k += 1.0;
        }
        k
    }

    /// Smallest index with point `>= x`, ignoring the extent.
    fn ceil_index(&self, x: f64) -> f64 {
        let mut k = ((x - self.origin) / self.step).ceil();
        if k.abs() >= INDEX_EXACT_LIMIT {
            return k;
        }
        while self.point(k) < x {
            k += 1.0;
        }
        while self.point(k - 1.0) >= x {
            k -= 1.0;
        }
        k
    }

    fn at_or_below(&self, x: f64) -> Option<f64> {
        let k = self.floor_index(x);
        let k = match self.extent {
            Extent::Left => k.min(0.0),
            _ => k,
        };
        self.index_allowed(k).then(|| self.point(k))
    }

    fn at_or_above(&self, x: f64) -> Option<f64> {
        let k = self.ceil_index(x);
        let k = match self.extent {
            Extent::Right => k.max(0.0),
            _ => k,
        };
        self.index_allowed(k).then(|| self.point(k))
    }

    fn run(&self, lo: f64, hi: f64) -> Option<Run> {
        let mut k_lo = self.ceil_index(lo);
        let mut k_hi = self.floor_index(hi);
        match self.extent {
            Extent::TwoSided => {}
            Extent::Right => k_lo = k_lo.max(0.0),
            Extent::Left => k_hi = k_hi.min(0.0),
        }
        if k_lo > k_hi {
            return None;
        }
        let count = (k_hi - k_lo) as u64 + 1;
        Some(Run::arithmetic(
            self.point(k_lo),
            self.step,
            count,
            self.point(k_hi),
        ))
    }
}

/// Largest `m >= 1` with `r^m <= y`.
fn exponent_at_or_below(r: f64, y: f64) -> Option<i32> {
    if y < r {
        return None;
    }
    let mut m = (y.ln() / r.ln()).floor().max(1.0) as i32;
    while m > 1 && r.powi(m) > y {
        m -= 1;
    }
    while r.powi(m + 1) <= y {
        m += 1;
    }
    Some(m)
}

/// Smallest `m >= 1` with `r^m >= y`.
fn exponent_at_or_above(r: f64, y: f64) -> i32 {
    if y <= r {
        return 1;
    }
    let mut m = (y.ln() / r.ln()).ceil().max(1.0) as i32;
    while m > 1 && r.powi(m - 1) >= y {
        m -= 1;
    }
    while r.powi(m) < y {
        m += 1;
    }
    m
}

/// Largest `-r^m <= x` with `m >= 1`.
fn geometric_at_or_below(r: f64, x: f64) -> Option<f64> {
    let p = -r.powi(exponent_at_or_above(r, -x));
    p.is_finite().then_some(p)
}

/// Smallest `-r^m >= x` with `m >= 1`.
fn geometric_at_or_above(r: f64, x: f64) -> Option<f64> {
    exponent_at_or_below(r, -x).map(|m| -r.powi(m))
}

/// Increasing list of `-r^m` (`m >= 1`) inside `[lo, hi]`.
fn geometric_points(r: f64, lo: f64, hi: f64) -> Vec<f64> {
    let Some(m_hi) = exponent_at_or_below(r, -lo) else {
        return Vec::new();
    };
    let m_lo = exponent_at_or_above(r, -hi);
    (m_lo..=m_hi).rev().map(|m| -r.powi(m)).collect()
}

impl CantorIterate {
    fn keep(&self, a: f64, b: f64) -> f64 {
        (b - a) * (1.0 - self.middle) / 2.0
    }

    fn at_or_below(&self, x: f64) -> Option<f64> {
        self.below_rec(self.lo, self.hi, 0, x)
    }

    fn below_rec(&self, a: f64, b: f64, level: u32, x: f64) -> Option<f64> {
        if x < a {
            return None;
        }
        if x >= b {
            return Some(b);
        }
        if level == self.depth {
            return Some(a);
        }
        let k = self.keep(a, b);
        self.below_rec(b - k, b, level + 1, x)
            .or_else(|| self.below_rec(a, a + k, level + 1, x))
    }

    fn at_or_above(&self, x: f64) -> Option<f64> {
        self.above_rec(self.lo, self.hi, 0, x)
    }

    fn above_rec(&self, a: f64, b: f64, level: u32, x: f64) -> Option<f64> {
        if x > b {
            return None;
        }
        if x <= a {
            return Some(a);
        }
        if level == self.depth {
            return Some(b);
        }
        let k = self.keep(a, b);
        self.above_rec(a, a + k, level + 1, x)
            .or_else(|| self.above_rec(b - k, b, level + 1, x))
    }

    fn collect(&self, lo: f64, hi: f64, budget: &mut Budget, out: &mut Vec<Run>) -> Result<()> {
        self.collect_rec(self.lo, self.hi, 0, lo, hi, budget, out)
    }

    #[allow(clippy::too_many_arguments)]
    fn collect_rec(
        &self,
        a: f64,
        b: f64,
        level: u32,
        lo: f64,
        hi: f64,
        budget: &mut Budget,
        out: &mut Vec<Run>,
    ) -> Result<()> {
        if b < lo || a > hi {
            return Ok(());
        }
        if level == self.depth {
            for p in [a, b] {
                if lo <= p && p <= hi {
                    budget.take(1)?;
                    out.push(Run::single(p));
                }
            }
            return Ok(());
        }
        let k = self.keep(a, b);
        self.collect_rec(a, a + k, level + 1, lo, hi, budget, out)?;
        self.collect_rec(b - k, b, level + 1, lo, hi, budget, out)
    }
}

fn max_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.max(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}
