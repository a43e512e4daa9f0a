mod common;

use common::{exponent, indicator_combination, indicator_lp_power, rel};
use herzlab_core::norms::{herz_morrey_norm, herz_morrey_norm_split, luxemburg_norm};
use herzlab_core::quad::modular_scaled;
use herzlab_core::verify::FunctionFamily;
use herzlab_core::{ExponentField, Primitive, QuadratureSpec, Term, TestFunction};
use proptest::prelude::*;

fn builtin(seed: u64) -> TestFunction {
    FunctionFamily::random(1, 1, seed).members().unwrap()[0]
        .function
        .clone()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn luxemburg_norm_is_homogeneous(
        seed in any::<u64>(),
        q in exponent(1),
        c in prop_oneof![-8.0f64..-0.125, 0.125f64..8.0],
    ) {
        let spec = QuadratureSpec::default();
        let f = builtin(seed);
        let a = luxemburg_norm(&f, &q, &spec).unwrap();
        let b = luxemburg_norm(&f.scaled(c), &q, &spec).unwrap();
        prop_assert!(rel(b.value, c.abs() * a.value) <= 1e-8, "{} vs {}", b.value, c.abs() * a.value);
    }

    #[test]
    fn luxemburg_triangle_inequality(
        (s1, s2) in (any::<u64>(), any::<u64>()),
        q in exponent(1),
    ) {
        let spec = QuadratureSpec::default();
        let (f, g) = (builtin(s1), builtin(s2));
        let fg = luxemburg_norm(&f.plus(&g).unwrap(), &q, &spec).unwrap();
        let nf = luxemburg_norm(&f, &q, &spec).unwrap();
        let ng = luxemburg_norm(&g, &q, &spec).unwrap();
        let slack = fg.err_estimate + nf.err_estimate + ng.err_estimate;
        prop_assert!(fg.value <= nf.value + ng.value + slack);
    }

    #[test]
    fn normalised_functions_have_unit_modular(seed in any::<u64>(), q in exponent(1)) {
        let spec = QuadratureSpec::default();
        let f = builtin(seed);
        let norm = luxemburg_norm(&f, &q, &spec).unwrap();
        let m = modular_scaled(&f, &q, norm.value, &spec).unwrap();
        prop_assert!((m.value - 1.0).abs() <= 1e-6, "modular {}", m.value);
    }

    #[test]
    fn constant_exponent_collapses_to_lp(
        n in 1usize..=3,
        f in indicator_combination(1),
        p in 1.05f64..6.0,
    ) {
        let f = TestFunction::new(n, f.terms().to_vec()).unwrap();
        let q = ExponentField::constant(p, n).unwrap();
        let got = luxemburg_norm(&f, &q, &QuadratureSpec::default()).unwrap();
        let want = indicator_lp_power(&f, p, -6, 6).powf(1.0 / p);
        prop_assert!(rel(got.value, want) <= 1e-8, "{} vs {want}", got.value);
    }

    #[test]
    fn herz_morrey_norm_is_homogeneous(
        f in indicator_combination(1),
        lambda in 0.0f64..0.4,
        p in 0.5f64..3.0,
        c in 0.125f64..8.0,
    ) {
        let spec = QuadratureSpec::default();
        let alpha = ExponentField::radial_log(0.2, -0.1, 1).unwrap();
        let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
        let a = herz_morrey_norm(&f, &alpha, lambda, p, &q, &spec).unwrap();
        let b = herz_morrey_norm(&f.scaled(-c), &alpha, lambda, p, &q, &spec).unwrap();
        prop_assert!(rel(b.value, c * a.value) <= 1e-8);
    }

    #[test]
    fn herz_morrey_triangle_inequality(
        f in indicator_combination(1),
        g in indicator_combination(1),
        lambda in 0.0f64..0.4,
        p in 0.5f64..3.0,
    ) {
        let spec = QuadratureSpec::default();
        let alpha = ExponentField::radial_log(0.2, -0.1, 1).unwrap();
        let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
        let norm = |h: &TestFunction| herz_morrey_norm(h, &alpha, lambda, p, &q, &spec).unwrap();
        let (fg, nf, ng) = (norm(&f.plus(&g.scaled(-1.0)).unwrap()), norm(&f), norm(&g));
        let slack = fg.err_estimate + nf.err_estimate + ng.err_estimate;
        // below p = 1 only the p-th power is subadditive
        let (lhs, rhs) = if p >= 1.0 {
            (fg.value, nf.value + ng.value)
        } else {
            (fg.value.powf(p), nf.value.powf(p) + ng.value.powf(p))
        };
        prop_assert!(lhs <= rhs + slack * (1.0 + rhs), "{lhs} > {rhs}");
    }

    #[test]
    fn larger_lambda_never_increases_the_norm_away_from_the_origin(
        annuli in prop::collection::vec((0i32..8, 0.25f64..2.0), 1..4),
        (l1, dl) in (0.0f64..0.6, 0.0f64..0.6),
        p in 0.5f64..3.0,
    ) {
        // supported in |x| > 1/2, so only k₀ ≥ 0 contributes and 2^{−k₀λ} ≤ 1
        let terms = annuli
            .into_iter()
            .map(|(j, coef)| Term { coef, primitive: Primitive::AnnulusIndicator { j } })
            .collect();
        let f = TestFunction::new(1, terms).unwrap();
        let spec = QuadratureSpec::default();
        let alpha = ExponentField::radial_log(0.2, -0.1, 1).unwrap();
        let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
        let a = herz_morrey_norm(&f, &alpha, l1, p, &q, &spec).unwrap();
        let b = herz_morrey_norm(&f, &alpha, l1 + dl, p, &q, &spec).unwrap();
        prop_assert!(b.value <= a.value + a.err_estimate + b.err_estimate);
    }

    #[test]
    fn larger_lambda_never_decreases_the_norm_inside_the_unit_ball(
        j in -8i32..0,
        (l1, dl) in (0.0f64..0.2, 0.0f64..0.2),
        p in 0.5f64..3.0,
    ) {
        // every k₀ ≤ 0 carries 2^{−k₀λ} ≥ 1, so the monotonicity reverses
        let f = TestFunction::ball_indicator(1, j);
        let spec = QuadratureSpec::default();
        let alpha = ExponentField::radial_log(0.2, -0.1, 1).unwrap();
        let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
        let a = herz_morrey_norm(&f, &alpha, l1, p, &q, &spec).unwrap();
        let b = herz_morrey_norm(&f, &alpha, l1 + dl, p, &q, &spec).unwrap();
        prop_assert!(b.value >= a.value - a.err_estimate - b.err_estimate);
    }

    #[test]
    fn split_form_is_equivalent(
        f in indicator_combination(1),
        lambda in prop_oneof![Just(0.0), Just(0.3)],
        p in prop_oneof![Just(1.0), Just(2.0)],
    ) {
        let spec = QuadratureSpec::default();
        let alpha = ExponentField::radial_log(0.2, -0.1, 1).unwrap();
        let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
        let a = herz_morrey_norm(&f, &alpha, lambda, p, &q, &spec).unwrap();
        let b = herz_morrey_norm_split(&f, &alpha, lambda, p, &q, &spec).unwrap();
        let r = a.value / b.value;
        prop_assert!((1.0 / 10f64.sqrt()..=10f64.sqrt()).contains(&r), "ratio {r}");
    }
}

#[test]
fn single_block_split_form_agrees_for_constant_alpha() {
    let spec = QuadratureSpec::default();
    let alpha = ExponentField::constant(0.15, 1).unwrap();
    let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
    for j in -4..=4 {
        let f = TestFunction::annulus_indicator(1, j);
        for p in [1.0, 2.0] {
            let a = herz_morrey_norm(&f, &alpha, 0.3, p, &q, &spec).unwrap();
            let b = herz_morrey_norm_split(&f, &alpha, 0.3, p, &q, &spec).unwrap();
            assert!(
                rel(a.value, b.value) <= 1e-6,
                "j={j} p={p}: {} vs {}",
                a.value,
                b.value
            );
        }
    }
}
