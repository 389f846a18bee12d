use super::description::{SetDescription, DEFAULT_POINT_CAP};
use super::runs::{Budget, Run};
use super::Interval;
use crate::error::Result;

/// Class of connected components of `I \ E`.
///
/// A piece is the open component `(left, right)` sitting inside the gap
/// `(gap_lo, gap_hi)` of `E`; the gap ends are points of `E` (or `∓∞`) and
/// `d(x, E) = min(x - gap_lo, gap_hi - x)` on the piece. When `mult > 1` the
/// piece stands for `mult` congruent components spaced one lattice step apart
/// (all unclipped, so `left = gap_lo` and `right = gap_hi`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Piece {
    pub left: f64,
    pub right: f64,
    pub gap_lo: f64,
    pub gap_hi: f64,
    pub mult: u64,
}

impl Piece {
    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn gap_length(&self) -> f64 {
        self.gap_hi - self.gap_lo
    }

    /// Largest value of `d(x, E)` on the closed piece.
    pub fn max_distance(&self) -> f64 {
        if self.gap_lo == f64::NEG_INFINITY {
            return self.gap_hi - self.left;
        }
        if self.gap_hi == f64::INFINITY {
            return self.right - self.gap_lo;
        }
        let mid = 0.5 * (self.gap_lo + self.gap_hi);
        if self.right <= mid {
            self.right - self.gap_lo
        } else if self.left >= mid {
            self.gap_hi - self.left
        } else {
            0.5 * self.gap_length()
        }
    }

    /// Measure of `{x in piece : d(x, E) < eps}` for one copy.
    pub fn covered(&self, eps: f64) -> f64 {
        let len = self.length();
        let from_left = if self.gap_lo == f64::NEG_INFINITY {
            0.0
        } else {
            ((self.gap_lo + eps).min(self.right) - self.left).max(0.0)
        };
        let from_right = if self.gap_hi == f64::INFINITY {
            0.0
        } else {
            (self.right - (self.gap_hi - eps).max(self.left)).max(0.0)
        };
        (from_left + from_right).min(len)
    }
}

/// The points of `E` in the closure of a window, plus the nearest points of
/// `E` just outside it.
#[derive(Debug, Clone)]
pub(crate) struct Scan {
    pub lo: f64,
    pub hi: f64,
    pub below: Option<f64>,
    pub above: Option<f64>,
    pub runs: Vec<Run>,
}

impl Scan {
    pub fn new(set: &SetDescription, window: &Interval) -> Result<Scan> {
        Scan::with_cap(set, window, DEFAULT_POINT_CAP)
    }

    pub fn with_cap(set: &SetDescription, window: &Interval, cap: usize) -> Result<Scan> {
        let (lo, hi) = (window.lo(), window.hi());
        let mut budget = Budget::new(lo, hi, cap);
        let runs = set.runs(lo, hi, &mut budget)?;
        let below = match runs.first() {
            Some(r) if r.start == lo => Some(lo),
            _ => set.nearest_at_or_below(lo),
        };
        let above = match runs.last() {
            Some(r) if r.last == hi => Some(hi),
            _ => set.nearest_at_or_above(hi),
        };
        Ok(Scan {
            lo,
            hi,
            below,
            above,
            runs,
        })
    }

    /// True when the closed window meets `E`.
    pub fn touches_set(&self) -> bool {
        !self.runs.is_empty()
    }

    /// True when the open window contains a point of `E`.
    pub fn has_interior_point(&self) -> bool {
        self.runs
            .iter()
            .any(|r| r.last > self.lo && r.start < self.hi && self.interior_in_run(r))
    }

    fn interior_in_run(&self, r: &Run) -> bool {
        let k = r.first_index_after(self.lo);
        k < r.count && r.point(k) < self.hi
    }

    /// Component classes of the open window minus `E`, left to right.
    pub fn pieces(&self) -> Vec<Piece> {
        let mut out = Vec::with_capacity(2 * self.runs.len() + 1);
        let mut prev = self.lo;
        let mut gap_lo = match self.runs.first() {
            Some(r) if r.start == self.lo => self.lo,
            _ => self.below.unwrap_or(f64::NEG_INFINITY),
        };
        for run in &self.runs {
            if run.start > prev {
                out.push(Piece {
                    left: prev,
                    right: run.start,
                    gap_lo,
                    gap_hi: run.start,
                    mult: 1,
                });
            }
            if run.count >= 2 {
                let second = run.point(1);
                if run.count == 2 {
                    out.push(Piece {
                        left: run.start,
                        right: run.last,
                        gap_lo: run.start,
                        gap_hi: run.last,
                        mult: 1,
                    });
                } else {
                    out.push(Piece {
                        left: run.start,
                        right: second,
                        gap_lo: run.start,
                        gap_hi: second,
                        mult: run.count - 1,
                    });
                }
            }
            prev = run.last;
            gap_lo = run.last;
        }
        if prev < self.hi {
            out.push(Piece {
                left: prev,
                right: self.hi,
                gap_lo,
                gap_hi: self.above.unwrap_or(f64::INFINITY),
                mult: 1,
            });
        }
        out
    }

    /// All points of `E` in the closed window, listed individually.
    pub fn points(&self, cap: usize) -> Result<Vec<f64>> {
        let total: u64 = self.runs.iter().map(|r| r.count).sum();
        let mut budget = Budget::new(self.lo, self.hi, cap);
        budget.take(total)?;
        Ok(self
            .runs
            .iter()
            .flat_map(|r| (0..r.count).map(move |k| r.point(k)))
            .collect())
    }
}
