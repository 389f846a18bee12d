use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::real_sets::{Interval, SetDescription};

/// Where the anchor sits in a generated probe interval.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alignment {
    /// Anchor is the left endpoint.
    Left,
    Center,
    /// Anchor is the right endpoint.
    Right,
}

impl Alignment {
    fn place(self, anchor: f64, length: f64) -> Result<Interval> {
        match self {
            Alignment::Left => Interval::new(anchor, anchor + length),
            Alignment::Center => Interval::new(anchor - 0.5 * length, anchor + 0.5 * length),
            Alignment::Right => Interval::new(anchor - length, anchor),
        }
    }

    fn mirror(self) -> Alignment {
        match self {
            Alignment::Left => Alignment::Right,
            Alignment::Center => Alignment::Center,
            Alignment::Right => Alignment::Left,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeOptions {
    /// Number of dyadic lengths per anchor.
    pub octaves: u32,
    /// Exponent of the largest dyadic length; defaults to `ceil(log2 |window|)`.
    pub top_exponent: Option<i32>,
    pub anchor_cap: usize,
    pub random_count: usize,
    pub seed: u64,
}

impl Default for ProbeOptions {
    fn default() -> Self {
        ProbeOptions {
            octaves: 12,
            top_exponent: None,
            anchor_cap: 512,
            random_count: 1000,
            seed: 0,
        }
    }
}

/// A finite family of open intervals standing in for "every open interval".
///
/// Structured probes are all `anchors × scales × alignments` (scales are
/// interval lengths); seeded random intervals and explicit extras follow.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProbeFamily {
    pub anchors: Vec<f64>,
    pub scales: Vec<f64>,
    pub alignments: Vec<Alignment>,
    pub random_count: usize,
    pub seed: u64,
    pub random: Vec<Interval>,
    pub extra: Vec<Interval>,
}

impl ProbeFamily {
    /// Default family for a set seen through `window`.
    pub fn around(set: &SetDescription, window: &Interval, options: &ProbeOptions) -> Result<Self> {
        if options.octaves == 0 {
            return Err(Error::InvalidParameter {
                name: "octaves",
                value: 0.0,
                reason: "must be at least 1",
            });
        }
        let top = options
            .top_exponent
            .unwrap_or_else(|| window.length().log2().ceil() as i32);
        let bottom = top - options.octaves as i32 + 1;
        let scales: Vec<f64> = (bottom..=top).map(|k| 2f64.powi(k)).collect();
        let anchors = set.features(window, options.anchor_cap)?;
        let random = random_intervals(window, bottom, top + 1, options.random_count, options.seed)?;
        Ok(ProbeFamily {
            anchors,
            scales,
            alignments: vec![Alignment::Left, Alignment::Center, Alignment::Right],
            random_count: options.random_count,
            seed: options.seed,
            random,
            extra: Vec::new(),
        })
    }

    /// Structured probes only.
    pub fn anchored(anchors: Vec<f64>, scales: Vec<f64>) -> Self {
        ProbeFamily {
            anchors,
            scales,
            alignments: vec![Alignment::Left, Alignment::Center, Alignment::Right],
            random_count: 0,
            seed: 0,
            random: Vec::new(),
            extra: Vec::new(),
        }
    }

    pub fn from_intervals(intervals: Vec<Interval>) -> Self {
        ProbeFamily {
            anchors: Vec::new(),
            scales: Vec::new(),
            alignments: Vec::new(),
            random_count: 0,
            seed: 0,
            random: Vec::new(),
            extra: intervals,
        }
    }

    pub fn with_extra(mut self, intervals: impl IntoIterator<Item = Interval>) -> Self {
        self.extra.extend(intervals);
        self
    }

    /// Adds `count` more seeded random intervals over `window` with lengths
    /// spread over the family's dyadic range.
    pub fn with_random(mut self, window: &Interval, count: usize, seed: u64) -> Result<Self> {
        let (bottom, top) = self.exponent_range(window);
        self.random
            .extend(random_intervals(window, bottom, top + 1, count, seed)?);
        self.random_count += count;
        Ok(self)
    }

    fn exponent_range(&self, window: &Interval) -> (i32, i32) {
        let exps: Vec<i32> = self
            .scales
            .iter()
            .map(|s| s.log2().round() as i32)
            .collect();
        match (exps.iter().min(), exps.iter().max()) {
            (Some(&a), Some(&b)) => (a, b),
            _ => {
                let top = window.length().log2().ceil() as i32;
                (top - 11, top)
            }
        }
    }

    /// The family closed under taking halves (each interval is followed by
    /// its `I⁻` and `I⁺`).
    pub fn halves_closed(&self) -> ProbeFamily {
        let halves: Vec<Interval> = self
            .intervals()
            .iter()
            .flat_map(|i| [*i, i.left_half(), i.right_half()])
            .collect();
        ProbeFamily::from_intervals(halves)
    }

    /// Image of every probe under `x ↦ -x`, in the same order.
    pub fn reflect(&self) -> ProbeFamily {
        ProbeFamily {
            anchors: self.anchors.iter().map(|a| -a).collect(),
            scales: self.scales.clone(),
            alignments: self.alignments.iter().map(|a| a.mirror()).collect(),
            random_count: self.random_count,
            seed: self.seed,
            random: self.random.iter().map(Interval::reflect).collect(),
            extra: self.extra.iter().map(Interval::reflect).collect(),
        }
    }

    pub fn translate(&self, shift: f64) -> Result<ProbeFamily> {
        Ok(ProbeFamily {
            anchors: self.anchors.iter().map(|a| a + shift).collect(),
            scales: self.scales.clone(),
            alignments: self.alignments.clone(),
            random_count: self.random_count,
            seed: self.seed,
            random: self
                .random
                .iter()
                .map(|i| i.translate(shift))
                .collect::<Result<_>>()?,
            extra: self
                .extra
                .iter()
                .map(|i| i.translate(shift))
                .collect::<Result<_>>()?,
        })
    }

    pub fn len(&self) -> usize {
        self.anchors.len() * self.scales.len() * self.alignments.len()
            + self.random.len()
            + self.extra.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// All probe intervals in a fixed order.
    pub fn intervals(&self) -> Vec<Interval> {
        let mut out = Vec::with_capacity(self.len());
        for &anchor in &self.anchors {
            for &scale in &self.scales {
                for alignment in &self.alignments {
                    if let Ok(i) = alignment.place(anchor, scale) {
                        out.push(i);
                    }
                }
            }
        }
        out.extend(self.random.iter().copied());
        out.extend(self.extra.iter().copied());
        out
    }
}

fn random_intervals(
    window: &Interval,
    bottom: i32,
    top: i32,
    count: usize,
    seed: u64,
) -> Result<Vec<Interval>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let center = window.lo() + rng.gen::<f64>() * window.length();
        let exponent = bottom as f64 + rng.gen::<f64>() * (top - bottom) as f64;
        let half = 0.5 * exponent.exp2();
        if let Ok(i) = Interval::new(center - half, center + half) {
            out.push(i);
        }
    }
    Ok(out)
}
