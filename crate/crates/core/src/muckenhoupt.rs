//! One-sided `A₁` constants of distance-power weights, sampled on triples
//! `a < b < c`.

use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric::{serialize_extended, top_octaves_diverge};
use crate::real_sets::{Interval, SetDescription};
use crate::weights::WeightSpec;

/// Which one-sided condition is sampled.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum A1Side {
    /// Average over `(a, b)` against the infimum over `(b, c)`.
    Plus,
    /// Average over `(b, c)` against the infimum over `(a, b)`.
    Minus,
    TwoSided,
}

impl A1Side {
    pub fn name(self) -> &'static str {
        match self {
            A1Side::Plus => "plus",
            A1Side::Minus => "minus",
            A1Side::TwoSided => "two_sided",
        }
    }

    pub fn mirror(self) -> A1Side {
        match self {
            A1Side::Plus => A1Side::Minus,
            A1Side::Minus => A1Side::Plus,
            A1Side::TwoSided => A1Side::TwoSided,
        }
    }
}

impl std::str::FromStr for A1Side {
    type Err = Error;

    fn from_str(s: &str) -> Result<A1Side> {
        match s {
            "plus" | "right" => Ok(A1Side::Plus),
            "minus" | "left" => Ok(A1Side::Minus),
            "two_sided" | "two-sided" => Ok(A1Side::TwoSided),
            _ => Err(Error::Parse(format!(
                "unknown side {s:?} (expected plus, minus or two_sided)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TripleSample {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    #[serde(serialize_with = "serialize_extended")]
    pub value: f64,
    /// Dyadic exponent of the generating scale.
    pub scale: i32,
    pub side: A1Side,
}

fn ratio(numerator: f64, infimum: f64) -> f64 {
    if numerator == 0.0 {
        0.0
    } else {
        numerator / infimum
    }
}

/// `(1/(c-a)) ∫_a^b w / ess inf_{(b,c)} w`.
pub fn triple_value(w: &WeightSpec, a: f64, b: f64, c: f64) -> Result<f64> {
    let left = Interval::new(a, b)?;
    let right = Interval::new(b, c)?;
    Ok(ratio(w.integrate(&left)? / (c - a), w.ess_inf(&right)?))
}

/// `(1/(c-a)) ∫_b^c w / ess inf_{(a,b)} w`.
pub fn triple_value_minus(w: &WeightSpec, a: f64, b: f64, c: f64) -> Result<f64> {
    let left = Interval::new(a, b)?;
    let right = Interval::new(b, c)?;
    Ok(ratio(w.integrate(&right)? / (c - a), w.ess_inf(&left)?))
}

/// Triples stay well inside the range where consecutive integers are
/// representable.
pub const MAX_SCALE_EXPONENT: i32 = 47;

/// Ratios `u` in the generated triples.
pub const TRIPLE_RATIOS: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleOptions {
    pub scale_count: u32,
    /// Exponent of the largest scale; defaults to `ceil(log2 |window|) + 37`
    /// and never exceeds [`MAX_SCALE_EXPONENT`].
    pub top_exponent: Option<i32>,
    pub anchor_cap: usize,
}

impl Default for TripleOptions {
    fn default() -> Self {
        TripleOptions {
            scale_count: 61,
            top_exponent: None,
            anchor_cap: 48,
        }
    }
}

/// Anchors `p` and dyadic scales `s = 2^k`; the plus triples are
/// `(p - s·u, p, p + s)` and the minus triples `(p - s, p, p + s·u)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TripleFamily {
    pub anchors: Vec<f64>,
    pub exponents: Vec<i32>,
}

impl TripleFamily {
    pub fn around(
        set: &SetDescription,
        window: &Interval,
        options: &TripleOptions,
    ) -> Result<Self> {
        if options.scale_count == 0 || options.anchor_cap == 0 {
            return Err(Error::InvalidParameter {
                name: "scale_count",
                value: f64::from(options.scale_count),
                reason: "scale count and anchor cap must be positive",
            });
        }
        let top = options
            .top_exponent
            .unwrap_or(window.length().log2().ceil() as i32 + 37)
            .min(MAX_SCALE_EXPONENT);
        let bottom = top - options.scale_count as i32 + 1;
        let exponents = (bottom..=top).collect();
        Ok(TripleFamily {
            anchors: set.features(window, options.anchor_cap)?,
            exponents,
        })
    }

    pub fn new(anchors: Vec<f64>, exponents: Vec<i32>) -> Self {
        TripleFamily { anchors, exponents }
    }

    /// Mirror image: negated anchors in reversed order.
    pub fn reflect(&self) -> TripleFamily {
        TripleFamily {
            anchors: self.anchors.iter().rev().map(|p| -p).collect(),
            exponents: self.exponents.clone(),
        }
    }

    pub fn len(&self) -> usize {
        self.anchors.len() * self.exponents.len() * TRIPLE_RATIOS.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn samples_at(
        &self,
        w: &WeightSpec,
        anchor: f64,
        k: i32,
        side: A1Side,
    ) -> Result<Vec<TripleSample>> {
        let s = 2f64.powi(k);
        let mut out = Vec::with_capacity(2 * TRIPLE_RATIOS.len());
        for u in TRIPLE_RATIOS {
            if side != A1Side::Minus {
                let (a, b, c) = (anchor - s * u, anchor, anchor + s);
                out.push(TripleSample {
                    a,
                    b,
                    c,
                    value: triple_value(w, a, b, c)?,
                    scale: k,
                    side: A1Side::Plus,
                });
            }
            if side != A1Side::Plus {
                let (a, b, c) = (anchor - s, anchor, anchor + s * u);
                out.push(TripleSample {
                    a,
                    b,
                    c,
                    value: triple_value_minus(w, a, b, c)?,
                    scale: k,
                    side: A1Side::Minus,
                });
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleRow {
    pub exponent: i32,
    #[serde(serialize_with = "serialize_extended")]
    pub max_value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct A1Report {
    pub side: A1Side,
    pub alpha: f64,
    pub triple_count: usize,
    /// Largest sampled value: a lower bound for the constant.
    #[serde(serialize_with = "serialize_extended")]
    pub constant_lower_bound: f64,
    pub maximizer: Option<TripleSample>,
    pub diverging: bool,
    pub per_scale: Vec<ScaleRow>,
    /// Per-scale maximizers from the middle scale up, keeping only those that
    /// beat every earlier one; filled when `diverging`.
    pub witnesses: Vec<TripleSample>,
    #[serde(skip)]
    pub samples: Vec<TripleSample>,
}

impl A1Report {
    /// `columns a,b,c,value,scale`
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["a", "b", "c", "value", "scale"])?;
        for s in &self.samples {
            w.write_record([
                s.a.to_string(),
                s.b.to_string(),
                s.c.to_string(),
                s.value.to_string(),
                s.scale.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

pub fn a1_constant(w: &WeightSpec, side: A1Side, family: &TripleFamily) -> Result<A1Report> {
    if !(w.alpha > 0.0 && w.alpha < 1.0) {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: w.alpha,
            reason: "must lie in (0, 1)",
        });
    }
    let jobs: Vec<(f64, i32)> = family
        .exponents
        .iter()
        .flat_map(|&k| family.anchors.iter().map(move |&p| (p, k)))
        .collect();
    let batches: Vec<Vec<TripleSample>> = jobs
        .par_iter()
        .map(|&(p, k)| family.samples_at(w, p, k, side))
        .collect::<Result<_>>()?;
    let samples: Vec<TripleSample> = batches.into_iter().flatten().collect();

    let mut best: Option<TripleSample> = None;
    let mut per_scale: Vec<(ScaleRow, Option<TripleSample>)> = family
        .exponents
        .iter()
        .map(|&k| {
            (
                ScaleRow {
                    exponent: k,
                    max_value: 0.0,
                },
                None,
            )
        })
        .collect();
    for s in &samples {
        if best.is_none_or(|b| s.value > b.value) {
            best = Some(*s);
        }
        if let Some(slot) = per_scale.iter_mut().find(|(r, _)| r.exponent == s.scale) {
            if slot.1.is_none_or(|b| s.value > b.value) {
                slot.0.max_value = s.value;
                slot.1 = Some(*s);
            }
        }
    }
    let maxima: Vec<f64> = per_scale.iter().map(|(r, _)| r.max_value).collect();
    let diverging = top_octaves_diverge(&maxima);
    let mut witnesses = Vec::new();
    if diverging {
        let mut running = f64::NEG_INFINITY;
        for (row, arg) in &per_scale[per_scale.len() / 2..] {
            if row.max_value > running {
                running = row.max_value;
                witnesses.extend(arg);
            }
        }
    }
    Ok(A1Report {
        side,
        alpha: w.alpha,
        triple_count: samples.len(),
        constant_lower_bound: best.map_or(0.0, |b| b.value),
        maximizer: best,
        diverging,
        per_scale: per_scale.into_iter().map(|(r, _)| r).collect(),
        witnesses,
        samples,
    })
}

/// Smallest exponent tried by [`critical_alpha`].
pub const ALPHA_FLOOR: f64 = 0.125;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridPoint {
    pub alpha: f64,
    pub diverging: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalAlpha {
    pub side: A1Side,
    /// Largest exponent (within `tolerance`) without divergence; `None` when
    /// the floor already diverges.
    pub alpha: Option<f64>,
    pub floor: f64,
    pub tolerance: f64,
    pub bisection: Vec<GridPoint>,
    /// Divergence on an even grid of exponents, checked after the search.
    pub grid: Vec<GridPoint>,
    /// The grid switches from bounded to diverging at most once.
    pub monotone: bool,
}

/// Bisection on `[ALPHA_FLOOR, 1)` for the last exponent whose sampled
/// constants stay bounded.
pub fn critical_alpha(
    set: &SetDescription,
    side: A1Side,
    family: &TripleFamily,
    tolerance: f64,
) -> Result<CriticalAlpha> {
    if !(tolerance > 0.0 && tolerance < 0.5) {
        return Err(Error::InvalidParameter {
            name: "tolerance",
            value: tolerance,
            reason: "must lie in (0, 1/2)",
        });
    }
    let diverges = |alpha: f64| -> Result<bool> {
        let w = WeightSpec::new(set.clone(), alpha)?;
        Ok(a1_constant(&w, side, family)?.diverging)
    };
    let mut bisection = Vec::new();
    let floor_diverges = diverges(ALPHA_FLOOR)?;
    bisection.push(GridPoint {
        alpha: ALPHA_FLOOR,
        diverging: floor_diverges,
    });
    let alpha = if floor_diverges {
        None
    } else {
        let (mut lo, mut hi) = (ALPHA_FLOOR, 1.0);
        while hi - lo > tolerance {
            let mid = 0.5 * (lo + hi);
            let d = diverges(mid)?;
            bisection.push(GridPoint {
                alpha: mid,
                diverging: d,
            });
            if d {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        Some(lo)
    };
    let grid: Vec<GridPoint> = (0..8)
        .map(|j| {
            let alpha = ALPHA_FLOOR + (1.0 - ALPHA_FLOOR) * f64::from(j) / 8.0;
            Ok(GridPoint {
                alpha,
                diverging: diverges(alpha)?,
            })
        })
        .collect::<Result<_>>()?;
    let monotone = grid.windows(2).all(|p| p[0].diverging <= p[1].diverging);
    Ok(CriticalAlpha {
        side,
        alpha,
        floor: ALPHA_FLOOR,
        tolerance,
        bisection,
        grid,
        monotone,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(set: SetDescription, alpha: f64) -> WeightSpec {
        WeightSpec::new(set, alpha).unwrap()
    }

    fn window() -> Interval {
        Interval::new(-64.0, 64.0).unwrap()
    }

    #[test]
    fn triple_examples() {
        let origin = w(SetDescription::singleton(0.0), 0.5);
        let v = triple_value(&origin, 0.0, 1.0, 2.0).unwrap();
        assert!((v - 2f64.sqrt()).abs() < 1e-15);
        // nearly constant weight
        let far = w(SetDescription::singleton(1e9), 0.5);
        let v = triple_value(&far, 0.0, 1.0, 4.0).unwrap();
        assert!((v - 0.25).abs() < 1e-8);
        assert!(triple_value(&origin, 1.0, 1.0, 2.0).is_err());
    }

    #[test]
    fn reflected_naturals_grow_like_a_square_root() {
        let r = w(SetDescription::naturals().reflect(), 0.5);
        let mut previous = 0.0;
        for k in 2..12 {
            let n = 2f64.powi(k);
            let v = triple_value(&r, -n, 0.0, n).unwrap();
            assert!(v > previous);
            let scaled = v / n.sqrt();
            // average of w over (-n, 0) tends to 2·∫_0^{1/2} u^{-1/2} = 2√2
            assert!((scaled - 2f64.sqrt()).abs() < 0.1, "{k}: {scaled}");
            previous = v;
        }
    }

    #[test]
    fn naturals_are_bounded_on_the_plus_side_only() {
        let n = SetDescription::naturals();
        let family = TripleFamily::around(&n, &window(), &TripleOptions::default()).unwrap();
        let plus = a1_constant(&w(n.clone(), 0.5), A1Side::Plus, &family).unwrap();
        assert!(!plus.diverging);
        assert!(plus.constant_lower_bound.is_finite());
        let minus = a1_constant(&w(n, 0.5), A1Side::Minus, &family).unwrap();
        assert!(minus.diverging);
        assert!(!minus.witnesses.is_empty());
        assert!(minus.witnesses.windows(2).all(|p| p[0].value < p[1].value));
    }

    #[test]
    fn integers_are_bounded_on_both_sides() {
        let z = SetDescription::integers();
        let family = TripleFamily::around(&z, &window(), &TripleOptions::default()).unwrap();
        let r = a1_constant(&w(z, 0.5), A1Side::TwoSided, &family).unwrap();
        assert!(!r.diverging);
        assert_eq!(r.triple_count, 2 * family.len());
    }

    #[test]
    fn minus_is_plus_on_the_mirror() {
        let n = SetDescription::geometric_naturals();
        let family = TripleFamily::around(&n, &window(), &TripleOptions::default()).unwrap();
        let minus = a1_constant(&w(n.clone(), 0.3), A1Side::Minus, &family).unwrap();
        let plus = a1_constant(&w(n.reflect(), 0.3), A1Side::Plus, &family.reflect()).unwrap();
        assert_eq!(
            minus.constant_lower_bound.to_bits(),
            plus.constant_lower_bound.to_bits()
        );
        assert_eq!(minus.diverging, plus.diverging);
        for (a, b) in minus.per_scale.iter().zip(&plus.per_scale) {
            assert_eq!(a.max_value.to_bits(), b.max_value.to_bits());
        }
    }

    #[test]
    fn alpha_is_validated() {
        let family = TripleFamily::new(vec![0.0], vec![0]);
        assert!(a1_constant(&w(SetDescription::integers(), 1.0), A1Side::Plus, &family).is_err());
    }

    #[test]
    fn critical_exponents() {
        let opts = TripleOptions {
            anchor_cap: 16,
            ..TripleOptions::default()
        };
        let origin = SetDescription::singleton(0.0);
        let family = TripleFamily::around(&origin, &window(), &opts).unwrap();
        let c = critical_alpha(&origin, A1Side::TwoSided, &family, 1.0 / 64.0).unwrap();
        assert!(c.alpha.unwrap() > 0.95);
        assert!(c.monotone);

        let r = SetDescription::naturals().reflect();
        let family = TripleFamily::around(&r, &window(), &opts).unwrap();
        let c = critical_alpha(&r, A1Side::Plus, &family, 1.0 / 64.0).unwrap();
        assert_eq!(c.alpha, None);
        assert!(c.grid.iter().all(|g| g.diverging));
    }

    #[test]
    fn csv_rows() {
        let family = TripleFamily::new(vec![0.0], vec![0, 1]);
        let r = a1_constant(&w(SetDescription::integers(), 0.5), A1Side::Plus, &family).unwrap();
        let mut buf = Vec::new();
        r.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("a,b,c,value,scale\n"));
        assert_eq!(text.lines().count(), 1 + 10);
    }
}
