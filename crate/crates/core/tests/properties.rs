use porosity_core::muckenhoupt::{a1_constant, triple_value, A1Side, TripleFamily};
use porosity_core::porosity::{rho, sigma_at, Side};
use porosity_core::weights::WeightSpec;
use porosity_core::{Interval, SetDescription};
use proptest::prelude::*;

/// Multiples of 1/64, so that sums and reflections stay exact.
fn dyadic(lo: i32, hi: i32) -> impl Strategy<Value = f64> {
    (lo * 64..hi * 64).prop_map(|k| f64::from(k) / 64.0)
}

fn any_set() -> impl Strategy<Value = SetDescription> {
    prop_oneof![
        Just(SetDescription::integers()),
        Just(SetDescription::naturals()),
        Just(SetDescription::naturals().reflect()),
        Just(SetDescription::geometric_naturals()),
        Just(SetDescription::geometric_naturals().reflect()),
        dyadic(-8, 8).prop_map(SetDescription::singleton),
        prop::collection::vec(dyadic(-40, 40), 1..12)
            .prop_map(|p| SetDescription::finite(p).unwrap()),
        (0u32..5).prop_map(|d| SetDescription::cantor(0.0, 8.0, 0.5, d).unwrap()),
        (dyadic(-4, 4), 1u32..4).prop_map(|(shift, k)| {
            let step = 2f64.powi(-(k as i32));
            SetDescription::lattice(0.0, step, porosity_core::real_sets::Extent::Right)
                .unwrap()
                .translate(shift)
        }),
    ]
}

fn any_interval() -> impl Strategy<Value = Interval> {
    (dyadic(-40, 40), 1i32..64 * 64)
        .prop_map(|(lo, len)| Interval::new(lo, lo + f64::from(len) / 64.0).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn gap_lengths_fill_the_interval(set in any_set(), i in any_interval()) {
        let gaps = set.gaps(&i).unwrap();
        let total = gaps.total_length();
        prop_assert!((total - i.length()).abs() <= 1e-12 * i.length());
        for pair in gaps.components.windows(2) {
            prop_assert!(pair[0].hi() <= pair[1].lo());
        }
    }

    #[test]
    fn distance_is_one_lipschitz(set in any_set(), x in dyadic(-50, 50), y in dyadic(-50, 50)) {
        let (a, b) = (set.distance(x), set.distance(y));
        prop_assert!((a - b).abs() <= (x - y).abs() * (1.0 + 1e-15));
    }

    #[test]
    fn gaps_reflect_exactly(set in any_set(), i in any_interval()) {
        let direct = set.gaps(&i.reflect()).unwrap();
        let mirrored = set.clone().reflect().gaps(&i).unwrap();
        let expected: Vec<Interval> = direct.components.iter().rev().map(Interval::reflect).collect();
        prop_assert_eq!(mirrored.components, expected);
    }

    #[test]
    fn translation_moves_distances(set in any_set(), x in dyadic(-30, 30), t in dyadic(-16, 16)) {
        let moved = set.clone().translate(t);
        prop_assert_eq!(moved.distance(x + t).to_bits(), set.distance(x).to_bits());
    }

    #[test]
    fn neighbourhoods_grow_with_eps(set in any_set(), i in any_interval(), e in 1i32..512) {
        let eps = f64::from(e) / 64.0;
        let small = set.neighborhood_measure(&i, eps).unwrap();
        let large = set.neighborhood_measure(&i, 2.0 * eps).unwrap();
        prop_assert!(small <= large * (1.0 + 1e-12));
        prop_assert!(large <= i.length() * (1.0 + 1e-12));
    }

    #[test]
    fn wide_neighbourhoods_cover(set in any_set(), i in any_interval()) {
        let far = set.max_distance(&i).unwrap();
        if far.is_finite() {
            let m = set.neighborhood_measure(&i, 2.0 * far + 1.0).unwrap();
            prop_assert!((m - i.length()).abs() <= 1e-12 * i.length());
        }
    }

    #[test]
    fn hole_radius_is_monotone(set in any_set(), i in any_interval(), a in 0u32..64, b in 0u32..64) {
        let (a, b) = (f64::from(a) / 128.0, f64::from(b) / 128.0);
        let inner = Interval::new(i.lo() + a * i.length(), i.hi() - b * i.length()).unwrap();
        prop_assert!(rho(&set, &inner).unwrap() <= rho(&set, &i).unwrap());
    }

    #[test]
    fn sigma_decreases_in_gamma(set in any_set(), i in any_interval(), k in 1i32..12) {
        for side in [Side::Right, Side::Left, Side::TwoSided] {
            let coarse = sigma_at(&set, &i, 2f64.powi(-k), side).unwrap();
            let fine = sigma_at(&set, &i, 2f64.powi(-k - 1), side).unwrap();
            prop_assert!(coarse <= fine);
            prop_assert!((0.0..=1.0).contains(&coarse));
        }
    }

    #[test]
    fn sigma_reflects_exactly(set in any_set(), i in any_interval(), k in 1i32..8) {
        let mirror = set.clone().reflect();
        let gamma = 2f64.powi(-k);
        for side in [Side::Right, Side::Left, Side::TwoSided] {
            let a = sigma_at(&set, &i, gamma, side).unwrap();
            let b = sigma_at(&mirror, &i.reflect(), gamma, side.mirror()).unwrap();
            prop_assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn integrals_are_additive(set in any_set(), i in any_interval(), cut in 1u32..64, a in 1u32..16) {
        let w = WeightSpec::new(set, f64::from(a) / 16.0).unwrap();
        let mid = i.lo() + i.length() * f64::from(cut) / 64.0;
        let left = w.integrate(&Interval::new(i.lo(), mid).unwrap()).unwrap();
        let right = w.integrate(&Interval::new(mid, i.hi()).unwrap()).unwrap();
        let whole = w.integrate(&i).unwrap();
        prop_assert!((left + right - whole).abs() <= 1e-12 * whole.max(1e-300));
    }

    #[test]
    fn averages_sit_between_essential_bounds(set in any_set(), i in any_interval(), a in 1u32..16) {
        let w = WeightSpec::new(set, f64::from(a) / 16.0).unwrap();
        let avg = w.average(&i).unwrap();
        let lo = w.ess_inf(&i).unwrap();
        let hi = w.ess_sup(&i).unwrap();
        prop_assert!(lo <= avg * (1.0 + 1e-12));
        prop_assert!(avg <= hi * (1.0 + 1e-12));
    }

    #[test]
    fn integrals_are_covariant(set in any_set(), i in any_interval(), t in dyadic(-16, 16), a in 1u32..16) {
        let alpha = f64::from(a) / 16.0;
        let base = WeightSpec::new(set.clone(), alpha).unwrap().integrate(&i).unwrap();
        let moved = WeightSpec::new(set.clone().translate(t), alpha).unwrap()
            .integrate(&i.translate(t).unwrap()).unwrap();
        let mirrored = WeightSpec::new(set.reflect(), alpha).unwrap()
            .integrate(&i.reflect()).unwrap();
        prop_assert_eq!(mirrored.to_bits(), base.to_bits());
        prop_assert_eq!(moved.to_bits(), base.to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn more_anchors_never_lower_the_constant(set in any_set(), extra in dyadic(-30, 30), a in 1u32..8) {
        let w = WeightSpec::new(set, f64::from(a) / 8.0).unwrap();
        let base = TripleFamily::new(vec![-3.0, 0.5, 7.25], (-3..12).collect());
        let mut anchors = base.anchors.clone();
        anchors.push(extra);
        let wider = TripleFamily::new(anchors, base.exponents.clone());
        let small = a1_constant(&w, A1Side::TwoSided, &base).unwrap();
        let large = a1_constant(&w, A1Side::TwoSided, &wider).unwrap();
        prop_assert!(small.constant_lower_bound <= large.constant_lower_bound);
    }

    #[test]
    fn minus_side_is_the_mirrored_plus_side(set in any_set(), a in 1u32..8) {
        let alpha = f64::from(a) / 8.0;
        let family = TripleFamily::new(vec![-5.0, -0.25, 0.0, 3.5], (-2..10).collect());
        let minus = a1_constant(&WeightSpec::new(set.clone(), alpha).unwrap(), A1Side::Minus, &family).unwrap();
        let plus = a1_constant(&WeightSpec::new(set.reflect(), alpha).unwrap(), A1Side::Plus, &family.reflect()).unwrap();
        prop_assert_eq!(minus.constant_lower_bound.to_bits(), plus.constant_lower_bound.to_bits());
        for (x, y) in minus.per_scale.iter().zip(&plus.per_scale) {
            prop_assert_eq!(x.max_value.to_bits(), y.max_value.to_bits());
        }
    }

    #[test]
    fn sampled_triples_are_lower_bounds(set in any_set(), anchor in dyadic(-20, 20), k in -2i32..8, a in 1u32..8) {
        let w = WeightSpec::new(set, f64::from(a) / 8.0).unwrap();
        let family = TripleFamily::new(vec![anchor], vec![k]);
        let report = a1_constant(&w, A1Side::Plus, &family).unwrap();
        let s = 2f64.powi(k);
        let direct = triple_value(&w, anchor - s, anchor, anchor + s).unwrap();
        prop_assert!(direct <= report.constant_lower_bound);
    }
}

/// The interval form `(avg over I⁻) / (ess inf over I⁺)` equals twice the
/// triple `(lo, mid, hi)`, so it stays within twice the sampled constant
/// whenever the triple is sampled.
#[test]
fn interval_form_is_twice_the_triple_form() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for set in [
        SetDescription::integers(),
        SetDescription::naturals(),
        SetDescription::singleton(0.0),
    ] {
        let w = WeightSpec::new(set.clone(), 0.5).unwrap();
        let window = Interval::new(-64.0, 64.0).unwrap();
        let family = TripleFamily::around(&set, &window, &Default::default()).unwrap();
        let constant = a1_constant(&w, A1Side::Plus, &family)
            .unwrap()
            .constant_lower_bound;
        for _ in 0..50 {
            let center = rng.gen_range(-32i32..32) as f64;
            let k = rng.gen_range(-2i32..8);
            let i = Interval::centered(center, 2f64.powi(k)).unwrap();
            let form = w.average(&i.left_half()).unwrap() / w.ess_inf(&i.right_half()).unwrap();
            let triple = triple_value(&w, i.lo(), i.center(), i.hi()).unwrap();
            assert!((form - 2.0 * triple).abs() <= 1e-12 * form);
            assert!(
                form <= 2.0 * constant * (1.0 + 1e-12),
                "{i}: {form} vs {constant}"
            );
        }
    }
}
