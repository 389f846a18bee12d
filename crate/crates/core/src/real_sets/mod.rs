//! Closed null subsets of the line and exact window queries on them.
//!
//! Every [`SetDescription`] answers, for a bounded window, which of its points
//! lie in the window and which points sit just outside it. From that the
//! connected components of `I \ E` (with the gaps of `E` that contain them)
//! are exact, and so are distances, neighbourhood measures and the piecewise
//! distance integrals built on top in [`crate::weights`].
//!
//! Lattice parts are carried as arithmetic runs, so windows of astronomical
//! length over `ℤ`-like sets cost O(1). Points that have to be listed one by
//! one are capped per window (see [`DEFAULT_POINT_CAP`]).

mod description;
mod interval;
pub(crate) mod runs;
pub(crate) mod scan;

use serde::Serialize;

pub use description::{CantorIterate, CutSide, Extent, Lattice, SetDescription, DEFAULT_POINT_CAP};
pub use interval::Interval;

use crate::error::{Error, Result};
use crate::numeric::canonical_sum;
use scan::Scan;

/// Connected components of `I \ E`, left to right.
///
/// `left_touches` is true when the left end of `I` is not a point of `E`,
/// i.e. the first component is cut by the window rather than bounded by `E`;
/// `right_touches` likewise.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapList {
    pub interval: Interval,
    pub components: Vec<Interval>,
    pub left_touches: bool,
    pub right_touches: bool,
}

impl GapList {
    pub fn total_length(&self) -> f64 {
        canonical_sum(self.components.iter().map(|c| (c.length(), 1)).collect())
    }

    pub fn largest(&self) -> Option<&Interval> {
        self.components
            .iter()
            .max_by(|a, b| a.length().total_cmp(&b.length()))
    }

    pub fn reflect(&self) -> GapList {
        GapList {
            interval: self.interval.reflect(),
            components: self
                .components
                .iter()
                .rev()
                .map(Interval::reflect)
                .collect(),
            left_touches: self.right_touches,
            right_touches: self.left_touches,
        }
    }
}

impl SetDescription {
    /// Connected components of `I \ E`.
    pub fn gaps(&self, interval: &Interval) -> Result<GapList> {
        let scan = Scan::new(self, interval)?;
        let points = scan.points(DEFAULT_POINT_CAP)?;
        let mut components = Vec::with_capacity(points.len() + 1);
        let mut prev = interval.lo();
        for &p in points.iter().chain(std::iter::once(&interval.hi())) {
            if p > prev {
                components.push(Interval::new(prev, p)?);
            }
            prev = prev.max(p);
        }
        Ok(GapList {
            interval: *interval,
            components,
            left_touches: points.first() != Some(&interval.lo()),
            right_touches: points.last() != Some(&interval.hi()),
        })
    }

    /// `d(I, E) = inf_{x in I} d(x, E)`.
    pub fn set_distance(&self, interval: &Interval) -> Result<f64> {
        let scan = Scan::new(self, interval)?;
        if scan.touches_set() {
            return Ok(0.0);
        }
        let left = scan.below.map_or(f64::INFINITY, |p| interval.lo() - p);
        let right = scan.above.map_or(f64::INFINITY, |p| p - interval.hi());
        Ok(left.min(right))
    }

    /// `|{x in I : d(x, E) < eps}|`.
    pub fn neighborhood_measure(&self, interval: &Interval, eps: f64) -> Result<f64> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "eps",
                value: eps,
                reason: "must be a finite number > 0",
            });
        }
        let scan = Scan::new(self, interval)?;
        Ok(canonical_sum(
            scan.pieces()
                .iter()
                .map(|p| (p.covered(eps), p.mult))
                .collect(),
        ))
    }

    /// Half the length of the largest component of `I \ E`: the radius of the
    /// largest `E`-free ball inside `I`.
    pub fn max_hole(&self, interval: &Interval) -> Result<f64> {
        let scan = Scan::new(self, interval)?;
        Ok(scan.pieces().iter().map(|p| p.length()).fold(0.0, f64::max) / 2.0)
    }

    /// `max d(x, E)` over the closure of `I`; infinite when `E` is empty.
    pub fn max_distance(&self, interval: &Interval) -> Result<f64> {
        let scan = Scan::new(self, interval)?;
        Ok(scan
            .pieces()
            .iter()
            .map(|p| p.max_distance())
            .fold(0.0, f64::max))
    }

    /// True when the open interval contains a point of `E`.
    pub fn meets(&self, interval: &Interval) -> Result<bool> {
        Ok(Scan::new(self, interval)?.has_interior_point())
    }

    /// Points of `E` in the closed window together with the midpoints of the
    /// components of `window \ E`, sorted and thinned evenly to at most `cap`.
    pub fn features(&self, window: &Interval, cap: usize) -> Result<Vec<f64>> {
        let gaps = self.gaps(window)?;
        let mut all: Vec<f64> = self.points_in(window.lo(), window.hi(), DEFAULT_POINT_CAP)?;
        all.extend(gaps.components.iter().map(Interval::center));
        all.sort_by(f64::total_cmp);
        all.dedup();
        Ok(thin(all, cap))
    }
}

/// Keeps `cap` evenly spaced entries (including both ends).
pub(crate) fn thin(values: Vec<f64>, cap: usize) -> Vec<f64> {
    let n = values.len();
    if n <= cap {
        return values;
    }
    if cap == 0 {
        return Vec::new();
    }
    if cap == 1 {
        return vec![values[n / 2]];
    }
    (0..cap).map(|i| values[i * (n - 1) / (cap - 1)]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(lo: f64, hi: f64) -> Interval {
        Interval::new(lo, hi).unwrap()
    }

    fn comps(g: &GapList) -> Vec<(f64, f64)> {
        g.components.iter().map(|c| (c.lo(), c.hi())).collect()
    }

    #[test]
    fn gaps_of_integers() {
        let g = SetDescription::integers().gaps(&iv(0.25, 2.25)).unwrap();
        assert_eq!(comps(&g), vec![(0.25, 1.0), (1.0, 2.0), (2.0, 2.25)]);
        assert!(g.left_touches && g.right_touches);
    }

    #[test]
    fn gaps_without_points() {
        let g = SetDescription::singleton(0.0).gaps(&iv(1.0, 2.0)).unwrap();
        assert_eq!(comps(&g), vec![(1.0, 2.0)]);
    }

    #[test]
    fn gaps_of_geometric_naturals() {
        let g = SetDescription::geometric_naturals()
            .gaps(&iv(-8.0, 0.0))
            .unwrap();
        assert_eq!(comps(&g), vec![(-8.0, -4.0), (-4.0, -2.0), (-2.0, 0.0)]);
        assert!(!g.left_touches && !g.right_touches);
    }

    #[test]
    fn distances() {
        assert_eq!(SetDescription::integers().distance(0.3), 0.3);
        assert_eq!(SetDescription::naturals().distance(-5.0), 5.0);
        assert_eq!(SetDescription::singleton(0.0).distance(-2.0), 2.0);
        assert_eq!(SetDescription::integers().distance(7.0), 0.0);
        let e32 = SetDescription::geometric_naturals();
        assert_eq!(e32.distance(-5.0), 1.0);
        assert_eq!(e32.distance(-7.0), 1.0);
        assert_eq!(e32.distance(-1.5), 0.5);
        assert_eq!(e32.distance(-1000.0), 24.0);
    }

    #[test]
    fn set_distances() {
        assert_eq!(
            SetDescription::singleton(0.0)
                .set_distance(&iv(1.0, 2.0))
                .unwrap(),
            1.0
        );
        assert_eq!(
            SetDescription::integers()
                .set_distance(&iv(0.25, 0.75))
                .unwrap(),
            0.25
        );
        assert_eq!(
            SetDescription::naturals()
                .set_distance(&iv(-3.0, -1.0))
                .unwrap(),
            1.0
        );
        assert_eq!(
            SetDescription::integers()
                .set_distance(&iv(1.0, 1.5))
                .unwrap(),
            0.0
        );
    }

    #[test]
    fn neighborhood_measures() {
        // every unit gap of (0, 10) loses its middle half
        let m = SetDescription::integers()
            .neighborhood_measure(&iv(0.0, 10.0), 0.25)
            .unwrap();
        assert_eq!(m, 5.0);
        let m = SetDescription::singleton(0.0)
            .neighborhood_measure(&iv(-1.0, 1.0), 0.5)
            .unwrap();
        assert_eq!(m, 1.0);
        let m = SetDescription::integers()
            .neighborhood_measure(&iv(0.0, 1.0), 0.6)
            .unwrap();
        assert_eq!(m, 1.0);
        assert!(SetDescription::integers()
            .neighborhood_measure(&iv(0.0, 1.0), 0.0)
            .is_err());
    }

    #[test]
    fn neighborhood_uses_points_outside_the_window() {
        let m = SetDescription::integers()
            .neighborhood_measure(&iv(0.5, 0.9), 0.25)
            .unwrap();
        assert!((m - 0.15).abs() < 1e-15);
    }

    #[test]
    fn transforms() {
        let r = SetDescription::naturals().reflect();
        let pts = r.points_in(-3.0, 3.0, 100).unwrap();
        assert_eq!(pts, vec![-3.0, -2.0, -1.0, 0.0]);
        let c = SetDescription::integers().cutoff(0.0, CutSide::Right);
        assert_eq!(
            c.points_in(-3.0, 3.0, 100).unwrap(),
            vec![0.0, 1.0, 2.0, 3.0]
        );
        assert_eq!(c.distance(-4.0), SetDescription::naturals().distance(-4.0));
        let t = SetDescription::singleton(0.0).translate(3.0);
        assert_eq!(t.points_in(-10.0, 10.0, 100).unwrap(), vec![3.0]);
        let l = SetDescription::integers().cutoff(0.5, CutSide::Left);
        assert_eq!(l.nearest_at_or_below(0.7), Some(0.0));
        assert_eq!(l.nearest_at_or_above(0.2), None);
        assert_eq!(l.points_in(2.0, 3.0, 10).unwrap(), Vec::<f64>::new());
        assert_eq!(l.distance(3.0), 3.0);
    }

    #[test]
    fn cantor_points() {
        let c = SetDescription::cantor(0.0, 1.0, 1.0 / 3.0, 2).unwrap();
        let pts = c.points_in(0.0, 1.0, 100).unwrap();
        assert_eq!(pts.len(), 8);
        assert_eq!(pts[0], 0.0);
        assert_eq!(pts[7], 1.0);
        assert!((pts[1] - 1.0 / 9.0).abs() < 1e-15);
        assert_eq!(c.nearest_at_or_below(0.5), Some(pts[3]));
        assert_eq!(c.nearest_at_or_above(0.5), Some(pts[4]));
        assert_eq!(c.nearest_at_or_above(1.5), None);
    }

    #[test]
    fn cap_is_enforced_for_listed_points() {
        let c = SetDescription::cantor(0.0, 1.0, 1.0 / 3.0, 12).unwrap();
        assert!(matches!(
            c.points_in(0.0, 1.0, 100),
            Err(Error::WindowTooLarge { .. })
        ));
        assert!(matches!(
            SetDescription::integers().gaps(&iv(0.0, 2e6)),
            Err(Error::WindowTooLarge { .. })
        ));
        // compressed queries do not list lattice points
        assert_eq!(
            SetDescription::integers().max_hole(&iv(0.0, 1e15)).unwrap(),
            0.5
        );
    }

    #[test]
    fn max_hole_uses_largest_component() {
        assert_eq!(
            SetDescription::integers()
                .max_hole(&iv(0.25, 2.25))
                .unwrap(),
            0.5
        );
        assert_eq!(
            SetDescription::naturals().max_hole(&iv(-8.0, 8.0)).unwrap(),
            4.0
        );
    }
}
