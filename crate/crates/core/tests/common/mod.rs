//! Independent reference computations for the acceptance target. Nothing
//! here calls the gap scanner, the hole radius or the closed-form integrals.

#![allow(dead_code)]

use porosity_core::real_sets::Extent;
use porosity_core::{Interval, SetDescription};

/// Points of `set` in `[lo, hi]`, enumerated straight from the description.
pub fn points(set: &SetDescription, lo: f64, hi: f64) -> Vec<f64> {
    let mut out = Vec::new();
    collect(set, lo, hi, &mut out);
    out.sort_by(f64::total_cmp);
    out.dedup();
    out
}

fn collect(set: &SetDescription, lo: f64, hi: f64, out: &mut Vec<f64>) {
    match set {
        SetDescription::Finite { points } => {
            out.extend(points.iter().copied().filter(|p| (lo..=hi).contains(p)));
        }
        SetDescription::Lattice(l) => {
            let mut k0 = ((lo - l.origin) / l.step).ceil() as i64;
            let mut k1 = ((hi - l.origin) / l.step).floor() as i64;
            match l.extent {
                Extent::TwoSided => {}
                Extent::Right => k0 = k0.max(0),
                Extent::Left => k1 = k1.min(0),
            }
            out.extend((k0..=k1).map(|k| l.origin + k as f64 * l.step));
        }
        SetDescription::GeometricLattice { ratio, lattice } => {
            let mut p = -ratio;
            while p >= lo {
                if p <= hi {
                    out.push(p);
                }
                p *= ratio;
            }
            collect(&SetDescription::Lattice(*lattice), lo, hi, out);
        }
        SetDescription::Cantor(c) => cantor(c.lo, c.hi, c.middle, c.depth, lo, hi, out),
        SetDescription::Union { sets } => {
            for s in sets {
                collect(s, lo, hi, out);
            }
        }
        SetDescription::Translate { set, shift } => {
            let mut inner = Vec::new();
            collect(set, lo - shift, hi - shift, &mut inner);
            out.extend(
                inner
                    .into_iter()
                    .map(|p| p + shift)
                    .filter(|p| (lo..=hi).contains(p)),
            );
        }
        SetDescription::Reflect { set } => {
            let mut inner = Vec::new();
            collect(set, -hi, -lo, &mut inner);
            out.extend(inner.into_iter().map(|p| -p));
        }
        SetDescription::Cutoff { set, at, side } => {
            let mut inner = Vec::new();
            collect(set, lo, hi, &mut inner);
            out.extend(inner.into_iter().filter(|p| match side {
                porosity_core::real_sets::CutSide::Right => p >= at,
                porosity_core::real_sets::CutSide::Left => p <= at,
            }));
        }
    }
}

fn cantor(a: f64, b: f64, middle: f64, depth: u32, lo: f64, hi: f64, out: &mut Vec<f64>) {
    if b < lo || a > hi {
        return;
    }
    if depth == 0 {
        out.extend([a, b].into_iter().filter(|p| (lo..=hi).contains(p)));
        return;
    }
    let keep = (b - a) * (1.0 - middle) / 2.0;
    cantor(a, a + keep, middle, depth - 1, lo, hi, out);
    cantor(b - keep, b, middle, depth - 1, lo, hi, out);
}

/// Points in `[lo, hi]` plus the nearest point beyond each end, if any
/// lies within `2^40` of it.
pub fn points_with_neighbours(set: &SetDescription, lo: f64, hi: f64) -> Vec<f64> {
    let mut all = points(set, lo, hi);
    let mut reach = (hi - lo).max(1.0);
    let (mut below, mut above) = (None, None);
    while reach <= 2f64.powi(40) && (below.is_none() || above.is_none()) {
        if below.is_none() {
            below = points(set, lo - reach, lo).into_iter().rfind(|p| *p < lo);
        }
        if above.is_none() {
            above = points(set, hi, hi + reach).into_iter().find(|p| *p > hi);
        }
        reach *= 2.0;
    }
    all.extend(below);
    all.extend(above);
    all.sort_by(f64::total_cmp);
    all
}

/// Supremum of `s` over a grid of `n` centres `y` with `(y - s, y + s)`
/// inside `I` and free of `E`.
pub fn grid_radius(set: &SetDescription, i: &Interval, n: usize) -> f64 {
    let pts = points(set, i.lo(), i.hi());
    let step = i.length() / n as f64;
    (0..=n)
        .map(|k| {
            let y = i.lo() + k as f64 * step;
            let edge = (y - i.lo()).min(i.hi() - y);
            let near = pts
                .iter()
                .map(|p| (y - p).abs())
                .fold(f64::INFINITY, f64::min);
            edge.min(near)
        })
        .fold(0.0, f64::max)
}

/// Double-exponential quadrature of `f` over `(0, w)`. The integrand gets
/// both offsets `(t, w - t)` so that endpoint singularities keep their
/// relative precision.
pub fn double_exponential(f: impl Fn(f64, f64) -> f64, w: f64) -> f64 {
    let mut previous = f64::NAN;
    let mut h: f64 = 0.5;
    loop {
        let mut sum = 0.0;
        let limit = (4.5 / h).ceil() as i64;
        for k in -limit..=limit {
            let u = k as f64 * h;
            let v = std::f64::consts::PI * u.sinh();
            let left = 1.0 / (1.0 + v.exp());
            let right = 1.0 / (1.0 + (-v).exp());
            let (t, rest) = (w * right, w * left);
            if t <= 0.0 || rest <= 0.0 {
                continue;
            }
            let jacobian = w * std::f64::consts::PI * u.cosh() * left * right;
            sum += f(t, rest) * jacobian;
        }
        let estimate = sum * h;
        if (estimate - previous).abs() <= 1e-13 * estimate.abs() || h < 1.0 / 256.0 {
            return estimate;
        }
        previous = estimate;
        h /= 2.0;
    }
}

/// `∫_I d(x, E)^{-α} dx`, split at the points of `E` and the midpoints
/// between them so that every piece is smooth inside. A piece ending at a
/// point of `E` is integrated in the variable `s` with `t = w s^q`,
/// `q = 1/(1 - α)`, which turns `t^{-α} dt` into a bounded integrand.
pub fn weight_integral(set: &SetDescription, alpha: f64, i: &Interval) -> f64 {
    let pts = points_with_neighbours(set, i.lo(), i.hi());
    let mut cuts = vec![i.lo(), i.hi()];
    cuts.extend(pts.iter().copied().filter(|p| i.contains(*p)));
    for pair in pts.windows(2) {
        let mid = 0.5 * (pair[0] + pair[1]);
        if i.contains(mid) {
            cuts.push(mid);
        }
    }
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let q = 1.0 / (1.0 - alpha);
    cuts.windows(2)
        .map(|c| {
            let (a, b) = (c[0], c[1]);
            let w = b - a;
            let distance = |t: f64, rest: f64| {
                pts.iter()
                    .map(|&p| if p <= a { (a - p) + t } else { (p - b) + rest })
                    .fold(f64::INFINITY, f64::min)
            };
            let stretched = |s: f64, at_a: bool| {
                let t = w * s.powf(q);
                if t == 0.0 {
                    return q * w.powf(1.0 - alpha);
                }
                let d = if at_a {
                    distance(t, w - t)
                } else {
                    distance(w - t, t)
                };
                q * w.powf(1.0 - alpha) * (t / d).powf(alpha)
            };
            if pts.contains(&a) {
                double_exponential(|s, _| stretched(s, true), 1.0)
            } else if pts.contains(&b) {
                double_exponential(|s, _| stretched(s, false), 1.0)
            } else {
                double_exponential(|t, rest| distance(t, rest).powf(-alpha), w)
            }
        })
        .sum()
}

/// Slope of `log N(δ)` against `log(1/δ)` where `N(δ)` counts the boxes
/// `[kδ, (k+1)δ)` holding a point, for `δ = 2^-j`.
pub fn box_count_dimension(pts: &[f64], exponents: std::ops::RangeInclusive<i32>) -> f64 {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for j in exponents {
        let delta = 2f64.powi(-j);
        let mut boxes: Vec<i64> = pts.iter().map(|p| (p / delta).floor() as i64).collect();
        boxes.dedup();
        xs.push(f64::from(j) * std::f64::consts::LN_2);
        ys.push((boxes.len() as f64).ln());
    }
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}
