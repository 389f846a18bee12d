//! Compressed point lists: a window's points are returned as arithmetic runs
//! so that lattice parts of a set never need to be listed one by one.

use crate::error::{Error, Result};

/// Points `start, start + step, …, last` (`count` of them).
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Run {
    pub start: f64,
    pub step: f64,
    pub count: u64,
    pub last: f64,
}

impl Run {
    pub fn single(x: f64) -> Run {
        Run {
            start: x,
            step: 0.0,
            count: 1,
            last: x,
        }
    }

    pub fn arithmetic(start: f64, step: f64, count: u64, last: f64) -> Run {
        debug_assert!(count >= 1);
        if count == 1 {
            Run::single(start)
        } else {
            Run {
                start,
                step,
                count,
                last,
            }
        }
    }

    pub fn point(&self, k: u64) -> f64 {
        if k + 1 == self.count {
            self.last
        } else {
            self.start + k as f64 * self.step
        }
    }

    /// Smallest index whose point is `>= x` (`count` if none).
    pub fn first_index_at_or_after(&self, x: f64) -> u64 {
        if self.start >= x {
            return 0;
        }
        if self.last < x {
            return self.count;
        }
        let mut k = ((x - self.start) / self.step).ceil().max(0.0) as u64;
        k = k.min(self.count - 1);
        while k > 0 && self.point(k - 1) >= x {
            k -= 1;
        }
        while k < self.count && self.point(k) < x {
            k += 1;
        }
        k
    }

    /// Smallest index whose point is `> x` (`count` if none).
    pub fn first_index_after(&self, x: f64) -> u64 {
        let mut k = self.first_index_at_or_after(x);
        while k < self.count && self.point(k) <= x {
            k += 1;
        }
        k
    }

    /// Sub-run of indices `[from, to)`, `None` when empty.
    pub fn slice(&self, from: u64, to: u64) -> Option<Run> {
        if from >= to {
            return None;
        }
        Some(Run::arithmetic(
            self.point(from),
            self.step,
            to - from,
            self.point(to - 1),
        ))
    }

    pub fn translate(&self, shift: f64) -> Run {
        Run {
            start: self.start + shift,
            step: self.step,
            count: self.count,
            last: self.last + shift,
        }
    }

    pub fn reflect(&self) -> Run {
        Run {
            start: -self.last,
            step: self.step,
            count: self.count,
            last: -self.start,
        }
    }
}

/// Limits how many points may be listed individually for one window.
#[derive(Debug)]
pub(crate) struct Budget {
    lo: f64,
    hi: f64,
    cap: usize,
    used: usize,
}

impl Budget {
    pub fn new(lo: f64, hi: f64, cap: usize) -> Budget {
        Budget {
            lo,
            hi,
            cap,
            used: 0,
        }
    }

    pub fn take(&mut self, n: u64) -> Result<()> {
        self.used = self.used.saturating_add(n as usize);
        if self.used > self.cap {
            Err(Error::WindowTooLarge {
                lo: self.lo,
                hi: self.hi,
                cap: self.cap,
            })
        } else {
            Ok(())
        }
    }
}

/// Restricts runs to the closed window `[lo, hi]`.
pub(crate) fn clip(runs: Vec<Run>, lo: f64, hi: f64) -> Vec<Run> {
    runs.into_iter()
        .filter_map(|r| {
            let from = r.first_index_at_or_after(lo);
            let to = r.first_index_after(hi);
            r.slice(from, to)
        })
        .collect()
}

/// Merges run lists into one sorted list of runs with pairwise disjoint ranges.
///
/// A multi-point run is split wherever another run's range overlaps it; the
/// overlapping stretch is listed point by point (charged to `budget`).
pub(crate) fn union(lists: Vec<Vec<Run>>, budget: &mut Budget) -> Result<Vec<Run>> {
    let all: Vec<Run> = lists.into_iter().flatten().collect();
    if all.len() <= 1 {
        return Ok(all);
    }
    let mut singles: Vec<f64> = Vec::new();
    let mut blocks: Vec<Run> = Vec::new();
    for (i, run) in all.iter().enumerate() {
        if run.count == 1 {
            singles.push(run.start);
            continue;
        }
        let mut foreign: Vec<(f64, f64)> = all
            .iter()
            .enumerate()
            .filter(|&(j, other)| j != i && other.last >= run.start && other.start <= run.last)
            .map(|(_, other)| (other.start, other.last))
            .collect();
        if foreign.is_empty() {
            blocks.push(*run);
            continue;
        }
        foreign.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut merged: Vec<(f64, f64)> = Vec::with_capacity(foreign.len());
        for (a, b) in foreign {
            match merged.last_mut() {
                Some(m) if a <= m.1 => m.1 = m.1.max(b),
                _ => merged.push((a, b)),
            }
        }
        let mut cursor = 0u64;
        for (a, b) in merged {
            let enter = run.first_index_at_or_after(a);
            let leave = run.first_index_after(b);
            if let Some(part) = run.slice(cursor, enter.max(cursor)) {
                blocks.push(part);
            }
            let from = enter.max(cursor);
            if leave > from {
                budget.take(leave - from)?;
                singles.extend((from..leave).map(|k| run.point(k)));
            }
            cursor = cursor.max(leave);
        }
        if let Some(part) = run.slice(cursor, run.count) {
            blocks.push(part);
        }
    }
    singles.sort_by(f64::total_cmp);
    singles.dedup();
    let mut out: Vec<Run> = blocks;
    out.extend(singles.into_iter().map(Run::single));
    out.sort_by(|a, b| a.start.total_cmp(&b.start));
    Ok(out)
}
