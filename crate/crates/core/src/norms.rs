//! Luxemburg, weighted and Herz–Morrey norms of radial functions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::function::{annulus_index, dyadic, Modified, RadialFunction};
use crate::quad::{modular_scaled, IntegralValue, QuadratureSpec};

const MAX_BRACKET_STEPS: usize = 200;
const MAX_ROOT_ITERATIONS: usize = 200;
/// Residual `|F − 1|` below which the root search stops early.
const RESIDUAL_STOP: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct NormMeta {
    /// Modular evaluations (Luxemburg) or block norms (Herz–Morrey).
    pub iterations: usize,
    /// `|F_q(f/η*) − 1|` for Luxemburg norms.
    pub residual: f64,
    /// Maximising `k₀` of the Herz–Morrey supremum.
    pub k0: Option<i32>,
    /// Dyadic window the blocks were drawn from.
    pub window: Option<(i32, i32)>,
    /// Bound on the contribution of blocks outside the window.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormValue {
    pub value: f64,
    pub err_estimate: f64,
    pub meta: NormMeta,
}

impl NormValue {
    pub fn zero() -> Self {
        NormValue {
            value: 0.0,
            err_estimate: 0.0,
            meta: NormMeta::default(),
        }
    }

    pub fn rel_err(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.err_estimate / self.value
        }
    }
}

/// `‖f‖_{L^{q(·)}} = inf{η > 0 : F_q(f/η) ≤ 1}`.
///
/// The bracket `[η_lo, η_hi]` is found by doubling/halving from `η = 1`;
/// the root of `ln F_q(f/e^t)` (strictly decreasing in `t`) is then found
/// by false position with the Illinois modification, falling back to
/// bisection whenever the bracket fails to halve.
pub fn luxemburg_norm(
    f: &dyn RadialFunction,
    q: &ExponentField,
    spec: &QuadratureSpec,
) -> Result<NormValue> {
    spec.validate()?;
    if f.dim() != q.dim() {
        return Err(Error::config(
            "function and exponent live in different dimensions",
        ));
    }
    if f.is_zero() {
        return Ok(NormValue::zero());
    }
    if !(q.ess_inf() > 0.0) {
        return Err(Error::domain("Luxemburg norm needs a positive exponent"));
    }
    let mut iterations = 0usize;
    let mut eval = |t: f64| -> Result<IntegralValue> {
        iterations += 1;
        modular_scaled(f, q, t.exp(), spec)
    };

    let m0 = eval(0.0)?;
    if m0.value == 0.0 {
        return Ok(NormValue::zero());
    }
    // (t, F) with F > 1 on the low side and F ≤ 1 on the high side
    let mut low = (0.0, m0);
    let mut high = (0.0, m0);
    let step = std::f64::consts::LN_2;
    let mut found = false;
    for i in 1..=MAX_BRACKET_STEPS {
        if m0.value > 1.0 {
            let t = i as f64 * step;
            let m = eval(t)?;
            if m.value <= 1.0 {
                high = (t, m);
                found = true;
                break;
            }
            low = (t, m);
        } else {
            let t = -(i as f64) * step;
            let m = eval(t)?;
            if m.value > 1.0 {
                low = (t, m);
                found = true;
                break;
            }
            if m.value == 0.0 {
                return Ok(NormValue::zero());
            }
            high = (t, m);
        }
    }
    if !found {
        return Err(Error::Divergence(format!(
            "no Luxemburg bracket within {MAX_BRACKET_STEPS} doublings"
        )));
    }

    let lg = |m: &IntegralValue| m.value.ln();
    let (mut t_lo, mut g_lo) = (low.0, lg(&low.1));
    let (mut t_hi, mut g_hi) = (high.0, lg(&high.1));
    let mut best = if (low.1.value - 1.0).abs() < (high.1.value - 1.0).abs() {
        low
    } else {
        high
    };
    let mut side = 0i8;
    let mut force_bisect = false;
    let mut width_before = t_hi - t_lo;
    for it in 0..MAX_ROOT_ITERATIONS {
        let width = t_hi - t_lo;
        if (best.1.value - 1.0).abs() <= RESIDUAL_STOP
            || width <= 4.0 * f64::EPSILON * (1.0 + t_lo.abs())
        {
            break;
        }
        let mid = 0.5 * (t_lo + t_hi);
        let mut t = if !force_bisect && g_lo.is_finite() && g_hi.is_finite() && g_lo != g_hi {
            (t_lo * g_hi - t_hi * g_lo) / (g_hi - g_lo)
        } else {
            mid
        };
        if !(t > t_lo && t < t_hi) {
            t = mid;
        }
        let m = eval(t)?;
        let g = lg(&m);
        if (m.value - 1.0).abs() < (best.1.value - 1.0).abs() {
            best = (t, m);
        }
        if m.value > 1.0 {
            t_lo = t;
            g_lo = g;
            if side == 1 {
                g_hi *= 0.5;
            }
            side = 1;
        } else {
            t_hi = t;
            g_hi = g;
            if side == -1 {
                g_lo *= 0.5;
            }
            side = -1;
        }
        if it % 2 == 1 {
            force_bisect = t_hi - t_lo > 0.5 * width_before;
            width_before = t_hi - t_lo;
        } else {
            force_bisect = false;
        }
    }

    let eta = best.0.exp();
    let m = best.1;
    let residual = (m.value - 1.0).abs();
    let q_lo = q.ess_inf().max(1e-300);
    // d ln F/dt ≤ −q₋, so the root lies within (|ln F| + δF/F)/q₋ of t; it
    // also lies inside the final bracket.
    let dt = (m.value.ln().abs() + m.err_estimate / m.value) / q_lo;
    let err_estimate = eta * dt.min(t_hi - t_lo);
    Ok(NormValue {
        value: eta,
        err_estimate,
        meta: NormMeta {
            iterations,
            residual,
            ..NormMeta::default()
        },
    })
}

/// `‖ω f‖_{L^{q(·)}}` with `ω(x) = (1 + |x|)^{−γ(x)}`.
pub fn weighted_norm(
    f: &dyn RadialFunction,
    gamma: &ExponentField,
    q: &ExponentField,
    spec: &QuadratureSpec,
) -> Result<NormValue> {
    let w = Modified::new(f).weighted(gamma);
    luxemburg_norm(&w, q, spec)
}

/// Dyadic annuli within `window` that the exact support of `f` meets.
pub fn candidate_blocks(f: &dyn RadialFunction, window: (i32, i32)) -> Vec<i32> {
    if f.is_zero() {
        return Vec::new();
    }
    let (lo, hi) = f.radial_support();
    let k_lo = if lo > 0.0 {
        annulus_index(lo).max(window.0)
    } else {
        window.0
    };
    let k_hi = if hi.is_finite() {
        annulus_index(hi).min(window.1)
    } else {
        window.1
    };
    (k_lo..=k_hi).filter(|&k| f.touches_annulus(k)).collect()
}

/// `‖f χ_k‖_{L^{q(·)}}` for every block meeting the support.
pub fn block_norms(
    f: &dyn RadialFunction,
    q: &ExponentField,
    spec: &QuadratureSpec,
) -> Result<Vec<(i32, NormValue)>> {
    spec.validate()?;
    candidate_blocks(f, spec.dyadic_window)
        .into_iter()
        .map(|k| Ok((k, luxemburg_norm(&Modified::block(f, k), q, spec)?)))
        .collect()
}

/// Validated Herz–Morrey parameters.
fn check_params(alpha: &ExponentField, lambda: f64, p: f64) -> Result<()> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(Error::config("p must be positive and finite"));
    }
    if !(lambda >= 0.0 && lambda.is_finite()) {
        return Err(Error::config("lambda must be finite and >= 0"));
    }
    if !(alpha.ess_inf().is_finite() && alpha.ess_sup().is_finite()) {
        return Err(Error::domain("alpha must be essentially bounded"));
    }
    Ok(())
}

/// One dyadic block after scaling: `(k, value, relative error)`.
#[derive(Debug, Clone, Copy)]
struct Block {
    k: i32,
    value: f64,
    rel_err: f64,
}

/// Geometric estimate of `Σ_{k<k_first} b_k^p` from the two lowest blocks,
/// with the change against the estimate from the next pair as its error.
fn lower_tail(blocks: &[Block], p: f64) -> Result<(f64, f64)> {
    let contiguous = |i: usize| blocks.len() > i + 1 && blocks[i + 1].k == blocks[i].k + 1;
    if !contiguous(0) {
        return Ok((0.0, 0.0));
    }
    let ratio = |i: usize| (blocks[i].value / blocks[i + 1].value).powf(p);
    let rho = ratio(0);
    if !(rho < 1.0) {
        return Err(Error::Divergence(
            "block norms do not decay toward the origin below the dyadic window".into(),
        ));
    }
    let b0 = blocks[0].value.powf(p);
    let tail = b0 * rho / (1.0 - rho);
    let err = if contiguous(1) && ratio(1) < 1.0 {
        let r1 = ratio(1);
        (tail - b0 * r1 / (1.0 - r1)).abs()
    } else {
        tail
    };
    Ok((tail, err))
}

/// `sup_{k₀} 2^{−k₀λ} · G(k₀)` where `G` is the cumulative block functional
/// (plain `ℓ^p` sum, or the two-sided sum of the split form).
fn sup_fold(
    blocks: &[Block],
    lambda: f64,
    p: f64,
    split: bool,
    below_window: bool,
    above_window: bool,
    window: (i32, i32),
) -> Result<NormValue> {
    if blocks.is_empty() {
        return Ok(NormValue::zero());
    }
    let (tail_lo, tail_lo_err) = if below_window {
        lower_tail(blocks, p)?
    } else {
        (0.0, 0.0)
    };
    let (mut neg, mut pos) = (0.0, 0.0);
    if blocks[0].k < 0 || !split {
        neg = tail_lo;
    } else {
        pos = tail_lo;
    }
    let last_k = blocks.last().map(|b| b.k).unwrap_or(window.1);
    let k_end = if above_window { window.1 } else { last_k };
    let mut idx = 0;
    let mut best = (f64::NEG_INFINITY, blocks[0].k);
    let mut series = Vec::new();
    let mut max_rel: f64 = 0.0;
    let mut max_rel_at_best = 0.0;
    let mut mass_at_best = 0.0;
    for k0 in blocks[0].k..=k_end {
        while idx < blocks.len() && blocks[idx].k <= k0 {
            let b = blocks[idx];
            if split && b.k >= 0 {
                pos += b.value.powf(p);
            } else {
                neg += b.value.powf(p);
            }
            max_rel = max_rel.max(b.rel_err);
            idx += 1;
        }
        let g = if split {
            neg.powf(1.0 / p) + pos.powf(1.0 / p)
        } else {
            (neg + pos).powf(1.0 / p)
        };
        let s = (-(k0 as f64) * lambda * std::f64::consts::LN_2).exp() * g;
        series.push(s);
        if s > best.0 {
            best = (s, k0);
            max_rel_at_best = max_rel;
            mass_at_best = neg + pos;
        }
    }
    let n = series.len();
    let mut tail_bound = 0.0;
    if above_window {
        let last = series[n - 1];
        if lambda == 0.0 {
            // the cumulative sum must have settled by the end of the window
            let b_last = blocks.last().map_or(0.0, |b| b.value);
            let b_prev = blocks.iter().rev().nth(1).map_or(0.0, |b| b.value);
            let rho = if b_prev > 0.0 {
                (b_last / b_prev).powf(p)
            } else {
                0.0
            };
            if b_last > 0.0 && !(rho < 1.0) {
                return Err(Error::Divergence(
                    "block norms are not summable (lambda = 0)".into(),
                ));
            }
            tail_bound = if b_last > 0.0 {
                b_last.powf(p) * rho / (1.0 - rho)
            } else {
                0.0
            };
            let g_total = (neg + pos + tail_bound).powf(1.0 / p);
            if split {
                let g_split = neg.powf(1.0 / p) + (pos + tail_bound).powf(1.0 / p);
                best.0 = best.0.max(g_split);
            } else {
                best.0 = best.0.max(g_total);
            }
            tail_bound = best.0 - last.min(best.0);
        } else if best.1 == k_end && n >= 2 && series[n - 1] > series[n - 2] {
            return Err(Error::Divergence(
                "Herz-Morrey supremum still increasing at the end of the dyadic window".into(),
            ));
        } else {
            tail_bound = last;
        }
    }
    if below_window && best.1 == blocks[0].k && n >= 2 && series[0] > series[1] {
        return Err(Error::Divergence(
            "Herz-Morrey supremum still increasing toward the origin at the window edge".into(),
        ));
    }
    // d(S^{1/p}) = S^{1/p}·dS/(p·S) for the lower-tail uncertainty
    let tail_lo_rel = if mass_at_best > 0.0 {
        tail_lo_err / (p * mass_at_best)
    } else {
        0.0
    };
    Ok(NormValue {
        value: best.0,
        err_estimate: best.0 * (max_rel_at_best + tail_lo_rel)
            + if lambda == 0.0 { tail_bound } else { 0.0 },
        meta: NormMeta {
            iterations: blocks.len(),
            residual: 0.0,
            k0: Some(best.1),
            window: Some(window),
            tail_bound,
        },
    })
}

fn window_flags(f: &dyn RadialFunction, window: (i32, i32)) -> (bool, bool) {
    let (lo, hi) = f.radial_support();
    (lo < dyadic(window.0 - 1), hi > dyadic(window.1))
}

/// `sup_{k₀} 2^{−k₀λ} (Σ_{k≤k₀} ‖2^{kα(·)} f χ_k‖_{q(·)}^p)^{1/p}`, with the
/// variable multiplier kept inside each block norm.
pub fn herz_morrey_norm(
    f: &dyn RadialFunction,
    alpha: &ExponentField,
    lambda: f64,
    p: f64,
    q: &ExponentField,
    spec: &QuadratureSpec,
) -> Result<NormValue> {
    spec.validate()?;
    check_params(alpha, lambda, p)?;
    if f.is_zero() {
        return Ok(NormValue::zero());
    }
    let window = spec.dyadic_window;
    let mut blocks = Vec::new();
    for k in candidate_blocks(f, window) {
        let g = Modified::block(f, k).dyadic_multiplier(alpha, k);
        let b = luxemburg_norm(&g, q, spec)?;
        if b.value > 0.0 {
            blocks.push(Block {
                k,
                value: b.value,
                rel_err: b.rel_err(),
            });
        }
    }
    let (below, above) = window_flags(f, window);
    sup_fold(&blocks, lambda, p, false, below, above, window)
}

/// The equivalent split form: scalar factors `2^{kα(0)}` for `k < 0` and
/// `2^{kα_∞}` for `k ≥ 0` outside plain block norms, with the negative and
/// non-negative parts summed as separate `ℓ^p` terms.
pub fn herz_morrey_norm_split(
    f: &dyn RadialFunction,
    alpha: &ExponentField,
    lambda: f64,
    p: f64,
    q: &ExponentField,
    spec: &QuadratureSpec,
) -> Result<NormValue> {
    spec.validate()?;
    check_params(alpha, lambda, p)?;
    let a_inf = alpha
        .limit_at_infinity()
        .ok_or_else(|| Error::domain("alpha has no limit at infinity"))?;
    let a0 = alpha.value_at_origin();
    if f.is_zero() {
        return Ok(NormValue::zero());
    }
    let window = spec.dyadic_window;
    let blocks: Vec<Block> = block_norms(f, q, spec)?
        .into_iter()
        .filter(|(_, b)| b.value > 0.0)
        .map(|(k, b)| {
            let a = if k < 0 { a0 } else { a_inf };
            Block {
                k,
                value: b.value * dyadic(k).powf(a),
                rel_err: b.rel_err(),
            }
        })
        .collect();
    let (below, above) = window_flags(f, window);
    sup_fold(&blocks, lambda, p, true, below, above, window)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exponent::ExponentForm;
    use crate::function::{Primitive, Region, Term, TestFunction};
    use crate::quad::modular;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs()
    }

    fn c(p: f64) -> ExponentField {
        ExponentField::constant(p, 1).unwrap()
    }

    fn two_plus_min() -> ExponentField {
        ExponentField::piecewise_radial(
            vec![1.0],
            vec![
                ExponentForm::RadialLinear {
                    c0: 2.0,
                    slope: 1.0,
                },
                ExponentForm::Constant { c: 3.0 },
            ],
            1,
        )
        .unwrap()
    }

    #[test]
    fn luxemburg_examples() {
        let f = TestFunction::ball_indicator(1, 0);
        let v = luxemburg_norm(&f, &c(2.0), &spec()).unwrap();
        assert!(rel(v.value, 2f64.sqrt()) < 1e-12, "{v:?}");
        assert!(v.meta.residual <= 1e-8);

        // |S| = 1 via A_0 in n = 1
        let g = TestFunction::annulus_indicator(1, 0).scaled(3.0);
        let v = luxemburg_norm(&g, &c(4.0), &spec()).unwrap();
        assert!(rel(v.value, 3.0) < 1e-12);

        assert_eq!(
            luxemburg_norm(&TestFunction::zero(1), &c(2.0), &spec())
                .unwrap()
                .value,
            0.0
        );
        let cancel = TestFunction::annulus_indicator(1, 0)
            .plus(&TestFunction::annulus_indicator(1, 0).scaled(-1.0))
            .unwrap();
        assert_eq!(
            luxemburg_norm(&cancel, &c(2.0), &spec()).unwrap().value,
            0.0
        );
    }

    /// Independent oracle: `∫_{−1}^{1} η^{−(2+|x|)} dx = 2(η^{-2} − η^{-3})/ln η`,
    /// solved by plain bisection.
    #[test]
    fn luxemburg_variable_exponent_oracle() {
        let modular_closed = |eta: f64| {
            let l = eta.ln();
            if l.abs() < 1e-12 {
                2.0
            } else {
                2.0 * (eta.powi(-2) - eta.powi(-3)) / l
            }
        };
        let (mut lo, mut hi) = (1.0f64, 2.0f64);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if modular_closed(mid) > 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let oracle = 0.5 * (lo + hi);
        let f = TestFunction::ball_indicator(1, 0);
        let v = luxemburg_norm(&f, &two_plus_min(), &spec()).unwrap();
        assert!(rel(v.value, oracle) < 1e-9, "{} vs {oracle}", v.value);
    }

    #[test]
    fn weighted_examples() {
        let f = TestFunction::annulus_indicator(1, 0);
        let zero = c(0.0);
        let a = weighted_norm(&f, &zero, &c(2.0), &spec()).unwrap();
        let b = luxemburg_norm(&f, &c(2.0), &spec()).unwrap();
        assert_eq!(a.value, b.value);

        let gamma = c(1.0);
        let v = weighted_norm(&f, &gamma, &c(2.0), &spec()).unwrap();
        // ∫_{1/2}^{1} 2 (1+r)^{-2} dr = 2 (1/(3/2) − 1/2)
        let oracle = (2.0f64 * (2.0 / 3.0 - 0.5)).sqrt();
        assert!(rel(v.value, oracle) < 1e-10);

        let v7 = weighted_norm(&f.scaled(7.0), &gamma, &c(2.0), &spec()).unwrap();
        assert!(rel(v7.value, 7.0 * v.value) < 1e-10);
    }

    #[test]
    fn block_examples() {
        let f = TestFunction::annulus_indicator(1, 0);
        let b = block_norms(&f, &c(2.0), &spec()).unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(b[0].0, 0);

        let g = TestFunction::ball_indicator(1, 0);
        let b = block_norms(&g, &c(2.0), &spec()).unwrap();
        let (k, v) = b.last().unwrap();
        assert_eq!(*k, 0);
        assert!(rel(v.value, 1.0) < 1e-12);
        for (k, v) in &b {
            // ‖χ_{A_k}‖₂ = |A_k|^{1/2} = (2^k)^{1/2}
            assert!(rel(v.value, dyadic(*k).sqrt()) < 1e-11);
        }

        let h = TestFunction::new(
            1,
            vec![
                Term {
                    coef: 1.0,
                    primitive: Primitive::AnnulusIndicator { j: -2 },
                },
                Term {
                    coef: 1.0,
                    primitive: Primitive::AnnulusIndicator { j: 3 },
                },
                Term {
                    coef: 1.0,
                    primitive: Primitive::RadialPower {
                        s: 1.0,
                        piece: Region::Annulus { j: 0 },
                    },
                },
            ],
        )
        .unwrap();
        let span: Vec<i32> = (-2..=3).collect();
        let (lo, hi) = h.support_window().unwrap();
        assert_eq!((lo.unwrap()..=hi.unwrap()).collect::<Vec<_>>(), span);
        assert_eq!(candidate_blocks(&h, (-40, 40)), vec![-2, 0, 3]);
    }

    #[test]
    fn herz_morrey_examples() {
        let alpha = c(0.4);
        let f = TestFunction::annulus_indicator(1, 0);
        let v = herz_morrey_norm(&f, &alpha, 0.3, 2.0, &c(2.0), &spec()).unwrap();
        assert!(rel(v.value, 1.0) < 1e-12, "{v:?}");
        assert_eq!(v.meta.k0, Some(0));

        let z =
            herz_morrey_norm(&TestFunction::zero(1), &alpha, 0.3, 2.0, &c(2.0), &spec()).unwrap();
        assert_eq!(z.value, 0.0);

        let two = TestFunction::annulus_indicator(1, 0)
            .plus(&TestFunction::annulus_indicator(1, 1))
            .unwrap();
        let v = herz_morrey_norm(&two, &c(0.0), 0.0, 1.0, &c(2.0), &spec()).unwrap();
        assert!(rel(v.value, 1.0 + 2f64.sqrt()) < 1e-12);
    }

    #[test]
    fn split_examples() {
        let f = TestFunction::annulus_indicator(1, -1);
        let v = herz_morrey_norm_split(&f, &c(0.0), 0.0, 1.0, &c(2.0), &spec()).unwrap();
        assert!(rel(v.value, 0.5f64.sqrt()) < 1e-12);
        let g = TestFunction::annulus_indicator(1, 2);
        for (lambda, p) in [(0.0, 1.0), (0.3, 2.0)] {
            let a = herz_morrey_norm(&g, &c(0.25), lambda, p, &c(3.0), &spec()).unwrap();
            let b = herz_morrey_norm_split(&g, &c(0.25), lambda, p, &c(3.0), &spec()).unwrap();
            assert!(rel(a.value, b.value) < 1e-12);
        }
        let zero =
            herz_morrey_norm_split(&TestFunction::zero(1), &c(0.0), 0.0, 1.0, &c(2.0), &spec())
                .unwrap();
        assert_eq!(zero.value, 0.0);
    }

    #[test]
    fn unbounded_support_is_handled() {
        // χ_{B_0} reaches below the window; blocks decay geometrically there
        let f = TestFunction::ball_indicator(1, 0);
        let spec = spec().with_window(-20, 20);
        let v = herz_morrey_norm(&f, &c(0.0), 0.0, 1.0, &c(2.0), &spec).unwrap();
        // Σ_{k≤0} 2^{k/2} = 1/(1 − 2^{−1/2})
        let oracle = 1.0 / (1.0 - 0.5f64.sqrt());
        assert!(rel(v.value, oracle) < 1e-10, "{} vs {oracle}", v.value);

        // λ = 0 with non-summable blocks
        let big = TestFunction::single(
            1,
            1.0,
            Primitive::RadialPower {
                s: 0.0,
                piece: Region::Exterior { k: 0 },
            },
        )
        .unwrap();
        assert!(matches!(
            herz_morrey_norm(&big, &c(0.0), 0.0, 1.0, &c(2.0), &spec),
            Err(Error::Divergence(_))
        ));
    }

    #[test]
    fn unit_modular_for_variable_exponent() {
        let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
        let f = TestFunction::single(
            1,
            1.5,
            Primitive::RadialPower {
                s: -0.3,
                piece: Region::Ball { k: 1 },
            },
        )
        .unwrap();
        let v = luxemburg_norm(&f, &q, &spec()).unwrap();
        let m = modular(&f.scaled(1.0 / v.value), &q, &spec()).unwrap();
        assert!((m.value - 1.0).abs() <= 1e-6);
    }
}
