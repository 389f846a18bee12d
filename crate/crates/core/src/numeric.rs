//! Small numeric helpers shared by the set, weight and porosity code.

use std::cmp::Ordering;

use crate::error::{Error, Result};

/// Relative slack applied to equality-sensitive comparisons on non-dyadic data.
pub const REL_SLACK: f64 = 1e-12;

/// `lhs <= rhs` up to [`REL_SLACK`].
pub fn le_slack(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs + REL_SLACK * rhs.abs().max(lhs.abs())
}

/// Sums `value * multiplicity` terms in an order that depends only on the
/// multiset of terms, so mirrored or shifted decompositions give identical bits.
pub fn canonical_sum(mut terms: Vec<(f64, u64)>) -> f64 {
    terms.retain(|&(_, m)| m > 0);
    terms.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut total = 0.0;
    let mut i = 0;
    while i < terms.len() {
        let value = terms[i].0;
        let mut mult: u64 = 0;
        while i < terms.len() && terms[i].0.total_cmp(&value) == Ordering::Equal {
            mult = mult.saturating_add(terms[i].1);
            i += 1;
        }
        total += value * mult as f64;
    }
    total
}

/// Serializes an extended real: finite values as numbers, `±∞` and NaN as
/// the strings `"inf"`, `"-inf"`, `"nan"` (JSON has no such numbers).
pub fn serialize_extended<S: serde::Serializer>(
    x: &f64,
    s: S,
) -> std::result::Result<S::Ok, S::Error> {
    if x.is_finite() {
        s.serialize_f64(*x)
    } else if x.is_nan() {
        s.serialize_str("nan")
    } else if *x > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}

/// Growth test on per-octave maxima (ascending octaves): true when each of
/// the top three octaves exceeds 8 times the middle octave.
pub fn top_octaves_diverge(maxima: &[f64]) -> bool {
    let k = maxima.len();
    if k < 6 {
        return false;
    }
    let reference = maxima[k / 2];
    maxima[k - 3..].iter().all(|&m| m > 8.0 * reference)
}

/// `∫_{u0}^{u1} u^{-alpha} du` for `0 <= u0 <= u1`.
///
/// Infinite when the lower limit is 0 and `alpha >= 1`.
pub fn power_integral(u0: f64, u1: f64, alpha: f64) -> f64 {
    debug_assert!(u0 >= 0.0 && u1 >= u0);
    if u1 <= u0 {
        return 0.0;
    }
    if u0 == 0.0 {
        if alpha >= 1.0 {
            return f64::INFINITY;
        }
        let p = 1.0 - alpha;
        return u1.powf(p) / p;
    }
    power_integral_span(u0, u1 - u0, alpha)
}

/// `∫_{u0}^{u0+width} u^{-α} du` with the width given directly, so that short
/// spans far from the origin keep their precision.
pub fn power_integral_span(u0: f64, width: f64, alpha: f64) -> f64 {
    if width <= 0.0 {
        return 0.0;
    }
    if u0 == 0.0 {
        return power_integral(0.0, width, alpha);
    }
    let ratio_log = (width / u0).ln_1p();
    if alpha == 1.0 {
        return ratio_log;
    }
    // u1^p - u0^p = u0^p * expm1(p * ln(u1/u0)), accurate when u1 ≈ u0
    let p = 1.0 - alpha;
    u0.powf(p) * (p * ratio_log).exp_m1() / p
}

/// Parses a real number written as a decimal, a fraction `p/q`, or an exact
/// power `b^e` optionally scaled as `m*b^e`.
pub fn parse_real(text: &str) -> Result<f64> {
    let bad = || Error::Parse(format!("cannot read a number from {text:?}"));
    let t = text.trim();
    if t.is_empty() {
        return Err(bad());
    }
    let value = if let Some((m, p)) = t.split_once('*') {
        parse_real(m)? * parse_real(p)?
    } else if let Some((b, e)) = t.split_once('^') {
        let (sign, b) = match b.trim().strip_prefix('-') {
            Some(rest) => (-1.0, rest),
            None => (1.0, b.trim()),
        };
        let base: f64 = b.trim().parse().map_err(|_| bad())?;
        let exp: i32 = e.trim().parse().map_err(|_| bad())?;
        sign * base.powi(exp)
    } else if let Some((p, q)) = t.split_once('/') {
        let p: f64 = p.trim().parse().map_err(|_| bad())?;
        let q: f64 = q.trim().parse().map_err(|_| bad())?;
        p / q
    } else {
        t.parse().map_err(|_| bad())?
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(bad())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn divergence_needs_three_large_octaves() {
        let growing: Vec<f64> = (0..12).map(|k| 3f64.powi(k)).collect();
        assert!(top_octaves_diverge(&growing));
        let mut flat_top = growing.clone();
        flat_top[9] = 8.0 * flat_top[6];
        assert!(!top_octaves_diverge(&flat_top));
        assert!(!top_octaves_diverge(&[1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]));
        assert!(!top_octaves_diverge(&[1.0, 100.0, 1000.0]));
    }

    #[test]
    fn power_integral_closed_forms() {
        assert_eq!(power_integral(0.0, 1.0, 0.5), 2.0);
        assert!((power_integral(1.0, 4.0, 0.5) - 2.0).abs() < 1e-15);
        assert!((power_integral(1.0, std::f64::consts::E, 1.0) - 1.0).abs() < 1e-15);
        assert!((power_integral(1.0, 2.0, 2.0) - 0.5).abs() < 1e-15);
        assert_eq!(power_integral(0.0, 1.0, 1.0), f64::INFINITY);
        assert_eq!(power_integral(0.0, 1.0, 1.5), f64::INFINITY);
        assert_eq!(power_integral(2.0, 2.0, 0.5), 0.0);
    }

    #[test]
    fn power_integral_short_pieces_are_accurate() {
        let u1 = 5.0 + 1e-12;
        let v = power_integral(5.0, u1, 0.5);
        let exact = (u1 - 5.0) / 5f64.sqrt();
        assert!(((v - exact) / exact).abs() < 1e-9);
    }

    #[test]
    fn canonical_sum_ignores_order() {
        let a = vec![(0.1, 1), (0.7, 3), (1e-17, 2), (0.3, 1)];
        let mut b = a.clone();
        b.reverse();
        b.push((0.7, 0));
        assert_eq!(canonical_sum(a).to_bits(), canonical_sum(b).to_bits());
        let split = vec![
            (0.7, 1),
            (0.1, 1),
            (0.7, 2),
            (1e-17, 1),
            (0.3, 1),
            (1e-17, 1),
        ];
        assert_eq!(
            canonical_sum(split).to_bits(),
            canonical_sum(vec![(0.1, 1), (0.7, 3), (1e-17, 2), (0.3, 1)]).to_bits()
        );
    }

    #[test]
    fn parse_real_forms() {
        assert_eq!(parse_real("2^-5").unwrap(), 1.0 / 32.0);
        assert_eq!(parse_real("-2^3").unwrap(), -8.0);
        assert_eq!(parse_real("3*2^-2").unwrap(), 0.75);
        assert_eq!(parse_real("1/4").unwrap(), 0.25);
        assert_eq!(parse_real(" 0.5 ").unwrap(), 0.5);
        assert!(parse_real("two").is_err());
        assert!(parse_real("1/0").is_err());
    }
}
