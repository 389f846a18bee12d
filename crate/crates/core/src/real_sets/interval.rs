use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bounded open interval `(lo, hi)`.
///
/// Its halves are `I⁻ = (lo, mid)` and `I⁺ = (mid, hi)` with
/// `mid = (lo + hi) / 2`; the midpoint itself is measure zero and never
/// matters. The midpoint is computed as `0.5 * (lo + hi)` so that reflecting
/// and (dyadically) translating an interval commutes exactly with halving.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct Interval {
    lo: f64,
    hi: f64,
}

#[derive(Deserialize)]
struct RawInterval {
    lo: f64,
    hi: f64,
}

impl TryFrom<RawInterval> for Interval {
    type Error = Error;

    fn try_from(raw: RawInterval) -> Result<Self> {
        Interval::new(raw.lo, raw.hi)
    }
}

impl Interval {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if lo.is_finite() && hi.is_finite() && lo < hi {
            Ok(Interval { lo, hi })
        } else {
            Err(Error::InvalidInterval { lo, hi })
        }
    }

    /// Interval of total length `2 * radius` centred at `center`.
    pub fn centered(center: f64, radius: f64) -> Result<Self> {
        Interval::new(center - radius, center + radius)
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    /// `I⁻`, the left half.
    pub fn left_half(&self) -> Interval {
        Interval {
            lo: self.lo,
            hi: self.center(),
        }
    }

    /// `I⁺`, the right half.
    pub fn right_half(&self) -> Interval {
        Interval {
            lo: self.center(),
            hi: self.hi,
        }
    }

    /// Image under `x ↦ -x`.
    pub fn reflect(&self) -> Interval {
        Interval {
            lo: -self.hi,
            hi: -self.lo,
        }
    }

    pub fn translate(&self, shift: f64) -> Result<Interval> {
        Interval::new(self.lo + shift, self.hi + shift)
    }

    /// Open-interval membership.
    pub fn contains(&self, x: f64) -> bool {
        self.lo < x && x < self.hi
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lo <= other.lo && other.hi <= self.hi
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo, self.hi)
    }
}
