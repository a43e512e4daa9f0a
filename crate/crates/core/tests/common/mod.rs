#![allow(dead_code)]

use herzlab_core::{ExponentField, Primitive, RadialFunction, Term, TestFunction};
use proptest::prelude::*;

/// Exponent fields bounded away from 1 on both sides.
pub fn exponent(n: usize) -> impl Strategy<Value = ExponentField> {
    prop_oneof![
        (1.1f64..5.0).prop_map(move |c| ExponentField::constant(c, n).unwrap()),
        (1.3f64..4.0, -0.2f64..1.5)
            .prop_map(move |(c, a)| ExponentField::radial_log(c, a, n).unwrap()),
        (1.3f64..4.0, -0.2f64..1.0)
            .prop_map(move |(c, a)| ExponentField::radial_origin_log(c, a, n).unwrap()),
    ]
}

pub fn probe_radius() -> impl Strategy<Value = f64> {
    (-8.0f64..6.0).prop_map(|e| 10f64.powf(e))
}

/// Non-negative combinations of ball and annulus indicators.
pub fn indicator_combination(n: usize) -> impl Strategy<Value = TestFunction> {
    prop::collection::vec((any::<bool>(), -6i32..6, 0.25f64..2.0), 1..4).prop_map(move |ts| {
        let terms = ts
            .into_iter()
            .map(|(ball, k, coef)| Term {
                coef,
                primitive: if ball {
                    Primitive::BallIndicator { k }
                } else {
                    Primitive::AnnulusIndicator { j: k }
                },
            })
            .collect();
        TestFunction::new(n, terms).unwrap()
    })
}

/// Value of an indicator combination on each annulus `A_j`, `j ∈ [lo, hi]`.
pub fn annulus_values(f: &TestFunction, lo: i32, hi: i32) -> Vec<(i32, f64)> {
    (lo..=hi)
        .map(|j| {
            let v = f
                .terms()
                .iter()
                .map(|t| match t.primitive {
                    Primitive::BallIndicator { k } if j <= k => t.coef,
                    Primitive::AnnulusIndicator { j: i } if i == j => t.coef,
                    Primitive::BallIndicator { .. } | Primitive::AnnulusIndicator { .. } => 0.0,
                    other => panic!("not an indicator: {other:?}"),
                })
                .sum();
            (j, v)
        })
        .collect()
}

/// `|B(0, r)|` in dimensions 1–3.
pub fn ball_measure(n: usize, r: f64) -> f64 {
    let unit = [2.0, std::f64::consts::PI, 4.0 * std::f64::consts::PI / 3.0][n - 1];
    unit * r.powi(n as i32)
}

pub fn dyadic(k: i32) -> f64 {
    2f64.powi(k)
}

pub fn annulus_measure(n: usize, j: i32) -> f64 {
    ball_measure(n, dyadic(j)) - ball_measure(n, dyadic(j - 1))
}

/// `∫|f|^p` for an indicator combination supported in `B(0, 2^hi)`: a finite
/// sum over annuli plus the geometric series of the balls below `lo`.
pub fn indicator_lp_power(f: &TestFunction, p: f64, lo: i32, hi: i32) -> f64 {
    let vals = annulus_values(f, lo, hi);
    let inner: f64 = f
        .terms()
        .iter()
        .filter(|t| matches!(t.primitive, Primitive::BallIndicator { .. }))
        .map(|t| t.coef)
        .sum();
    let core = inner.abs().powf(p) * ball_measure(f.dim(), dyadic(lo - 1));
    core + vals
        .iter()
        .map(|&(j, v)| v.abs().powf(p) * annulus_measure(f.dim(), j))
        .sum::<f64>()
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}
