//! Variable-order Hardy operators, the adjoint Hardy operator and the
//! Riesz-type potential, evaluated pointwise with `β` frozen at the output
//! point:
//!
//! * `𝓗_β f(x)  = |x|^{β(x)−n} ∫_{|t|<|x|} f(t) dt`
//! * `𝓗*_β f(x) = ∫_{|t|≥|x|} f(t) |t|^{β(x)−n} dt`
//! * `I_β f(x)  = ∫ f(y) |x−y|^{β(x)−n} dy`

use std::cell::RefCell;
use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::function::{sphere_measure, Modified, RadialFunction, TestFunction};
use crate::norms::{luxemburg_norm, NormValue};
use crate::quad::{
    integrate_1d, integrate_graded, integrate_radii, integrate_segment, IntegralValue, Integrand,
    QuadratureSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Hardy,
    HardyStar,
    Riesz,
    /// No operator: only the weight is applied.
    Identity,
}

fn radius(x: &[f64]) -> f64 {
    x.iter().map(|c| c * c).sum::<f64>().sqrt()
}

fn check_dims(f: &dyn RadialFunction, beta: &ExponentField) -> Result<()> {
    if f.dim() != beta.dim() {
        return Err(Error::config(
            "function and beta live in different dimensions",
        ));
    }
    Ok(())
}

fn check_point(f: &dyn RadialFunction, x: &[f64]) -> Result<f64> {
    if x.len() != f.dim() {
        return Err(Error::config("point dimension does not match the function"));
    }
    Ok(radius(x))
}

/// `𝓗_β f` at radius `r > 0`.
pub fn hardy_radial(
    f: &dyn RadialFunction,
    beta: &ExponentField,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    check_dims(f, beta)?;
    if !(r > 0.0) {
        return Err(Error::domain("hardy operator is evaluated at x != 0 only"));
    }
    let mass = integrate_radii(&Integrand::from_function(f), 0.0, r, spec)?;
    let scale = r.powf(beta.radial(r) - f.dim() as f64);
    Ok(IntegralValue {
        value: scale * mass.value,
        err_estimate: scale * mass.err_estimate,
        panels_used: mass.panels_used,
    })
}

pub fn hardy(
    f: &dyn RadialFunction,
    beta: &ExponentField,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let r = check_point(f, x)?;
    Ok(hardy_radial(f, beta, r, spec)?.value)
}

/// `𝓗*_β f` at radius `r > 0`.
pub fn hardy_star_radial(
    f: &dyn RadialFunction,
    beta: &ExponentField,
    r: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    check_dims(f, beta)?;
    if !(r > 0.0) {
        return Err(Error::domain(
            "adjoint hardy operator is evaluated at x != 0 only",
        ));
    }
    let e = beta.radial(r) - f.dim() as f64;
    let (lo, hi) = f.radial_support();
    let g = Integrand::radial(f.dim(), |s| {
        let v = f.value(s);
        if v == 0.0 {
            0.0
        } else {
            v * s.powf(e)
        }
    })
    .with_breakpoints(f.breakpoints())
    .with_support(lo, hi);
    let out = integrate_radii(&g, r, f64::INFINITY, spec);
    if let Some(err) = f.take_error() {
        return Err(err);
    }
    out
}

pub fn hardy_star(
    f: &dyn RadialFunction,
    beta: &ExponentField,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let r = check_point(f, x)?;
    Ok(hardy_star_radial(f, beta, r, spec)?.value)
}

/// `I_β f` at radius `a ≥ 0`, in polar coordinates around the output point:
/// `I = ∫_0^∞ ρ^{β−1} F(ρ) dρ` with `F(ρ)` the integral of `f` over the
/// sphere of radius `ρ` centred at `x`.
pub fn riesz_radial(
    f: &dyn RadialFunction,
    beta: &ExponentField,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    check_dims(f, beta)?;
    let n = f.dim();
    let b = beta.radial(a);
    // β = n is the borderline kernel |x−y|⁰ ≡ 1 and is still well defined
    if !(b > 0.0 && b <= n as f64) {
        return Err(Error::domain(format!(
            "riesz potential needs 0 < beta(x) <= n (beta = {b} at |x| = {a})"
        )));
    }
    if !(a >= 0.0) || f.is_zero() {
        return if a >= 0.0 {
            Ok(IntegralValue::ZERO)
        } else {
            Err(Error::domain("negative radius"))
        };
    }
    let (lo, hi) = f.radial_support();
    let rho_lo = (a - hi).max(lo - a).max(0.0);
    let rho_hi = a + hi;
    if !(rho_lo < rho_hi) {
        return Ok(IntegralValue::ZERO);
    }

    if a > 0.0 && ((hi.is_finite() && a >= 2.0 * hi) || a <= 0.5 * lo) {
        return riesz_far(f, n, b, a, spec);
    }

    let mut radii = f.breakpoints();
    radii.extend([lo, hi].into_iter().filter(|r| *r > 0.0 && r.is_finite()));
    let inner_spec = inner_spec(spec);
    let inner_error: RefCell<Option<Error>> = RefCell::new(None);
    let stash = |r: Result<IntegralValue>| match r {
        Ok(v) => v.value,
        Err(e) => {
            inner_error.borrow_mut().get_or_insert(e);
            0.0
        }
    };

    let sphere_mean = |rho: f64| -> f64 {
        match n {
            1 => f.value(a + rho) + f.value((a - rho).abs()),
            _ if a == 0.0 => sphere_measure(n) * f.value(rho),
            2 => {
                let s_of = |th: f64| {
                    (a * a + rho * rho + 2.0 * a * rho * th.cos())
                        .max(0.0)
                        .sqrt()
                };
                let cuts: Vec<f64> = radii
                    .iter()
                    .filter_map(|&r| {
                        let c = (r * r - a * a - rho * rho) / (2.0 * a * rho);
                        (c > -1.0 && c < 1.0).then(|| c.acos())
                    })
                    .collect();
                let g = |th: f64| f.value(s_of(th));
                2.0 * stash(integrate_segment(
                    &g,
                    0.0,
                    std::f64::consts::PI,
                    &cuts,
                    &inner_spec,
                ))
            }
            _ => {
                let g = |s: f64| f.value(s) * s;
                let (s0, s1) = ((a - rho).abs(), a + rho);
                let inner = stash(integrate_segment(&g, s0, s1, &radii, &inner_spec));
                2.0 * std::f64::consts::PI / (a * rho) * inner
            }
        }
    };
    let h = |rho: f64| {
        let m = sphere_mean(rho);
        if m == 0.0 {
            0.0
        } else {
            rho.powf(b - 1.0) * m
        }
    };

    let touches_origin = lo == 0.0 && a > 0.0;
    let mut pts = vec![rho_lo, rho_hi];
    for &r in &radii {
        pts.push((r - a).abs());
        pts.push(r + a);
    }
    if touches_origin {
        pts.push(a);
    }
    pts.retain(|&p| p >= rho_lo && p <= rho_hi);
    pts.sort_by(f64::total_cmp);
    pts.dedup();

    let singular = |p: f64| p == 0.0 || (touches_origin && p == a);
    let mut total = IntegralValue::ZERO;
    for w in pts.windows(2) {
        let (u, v) = (w[0], w[1]);
        let piece = match (singular(u), singular(v)) {
            (_, _) if v.is_infinite() => {
                if u == 0.0 || !singular(u) {
                    integrate_1d(&h, u, v, &[], spec)?
                } else {
                    integrate_1d(&|t| h(u + t), 0.0, v, &[], spec)?
                }
            }
            (true, true) => {
                let m = 0.5 * (u + v);
                integrate_graded(&|t| h(u + t), m - u, &[], spec)?
                    + integrate_graded(&|t| h(v - t), v - m, &[], spec)?
            }
            (true, false) => integrate_graded(&|t| h(u + t), v - u, &[], spec)?,
            (false, true) => integrate_graded(&|t| h(v - t), v - u, &[], spec)?,
            (false, false) => integrate_segment(&h, u, v, &[], spec)?,
        };
        total = total + piece;
    }
    if let Some(e) = inner_error.into_inner().or_else(|| f.take_error()) {
        return Err(e);
    }
    Ok(total)
}

/// Mean of `|aθ₀ − sθ|^{β−n}` over the unit sphere, times its measure.
fn kernel_sphere_integral(n: usize, b: f64, a: f64, s: f64, angular_points: usize) -> f64 {
    let d = (a - s).abs();
    match n {
        1 => d.powf(b - 1.0) + (a + s).powf(b - 1.0),
        2 => {
            // smooth periodic integrand: the trapezoid rule converges
            // geometrically in min(a,s)/max(a,s)
            let m = angular_points.max(32);
            let h = 2.0 * std::f64::consts::PI / m as f64;
            (0..m)
                .map(|i| {
                    let th = i as f64 * h;
                    let r2 = d * d + 2.0 * a * s * (1.0 - th.cos());
                    r2.powf(0.5 * (b - 2.0))
                })
                .sum::<f64>()
                * h
        }
        _ => {
            // 2π ((a+s)^c − |a−s|^c) / (c·a·s), c = β − 1
            let l = (2.0 * a.min(s) / d).ln_1p();
            let c = b - 1.0;
            let core = if c == 0.0 {
                l
            } else {
                d.powf(c) * (c * l).exp_m1() / c
            };
            2.0 * std::f64::consts::PI * core / (a * s)
        }
    }
}

/// `I_β f(x)` for `x` well separated from the support of `f`, as
/// `∫ f(s) s^{n−1} K(a, s) ds` with the spherical kernel integral `K`.
/// Unlike the polar form it needs no differences `|x| − ρ` of large
/// nearly equal numbers.
fn riesz_far(
    f: &dyn RadialFunction,
    n: usize,
    b: f64,
    a: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    let (lo, hi) = f.radial_support();
    let sigma = sphere_measure(n);
    let m = spec.angular_points;
    let g = Integrand::radial(n, |s| {
        let v = f.value(s);
        if v == 0.0 {
            0.0
        } else {
            v * kernel_sphere_integral(n, b, a, s, m) / sigma
        }
    })
    .with_breakpoints(f.breakpoints())
    .with_support(lo, hi);
    let out = integrate_radii(&g, lo, hi, spec)?;
    if let Some(e) = f.take_error() {
        return Err(e);
    }
    Ok(out)
}

pub fn riesz(
    f: &dyn RadialFunction,
    beta: &ExponentField,
    x: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let a = check_point(f, x)?;
    Ok(riesz_radial(f, beta, a, spec)?.value)
}

/// Nested integrals run two orders of magnitude tighter than the outer
/// quadrature so that their noise stays below the outer error target.
fn inner_spec(spec: &QuadratureSpec) -> QuadratureSpec {
    spec.with_rel_tol((spec.rel_tol * 1e-2).max(1e-13))
}

/// The lazily evaluated radial function `x ↦ Π(1+|x|)^{−γᵢ(x)} · T f(x)`.
///
/// Values are memoised by radius, since the Luxemburg root search revisits
/// the same quadrature nodes many times. Failures of the inner quadrature
/// are stashed and surfaced through [`RadialFunction::take_error`].
#[derive(Debug)]
pub struct OperatorImage {
    source: TestFunction,
    kind: OperatorKind,
    beta: ExponentField,
    weights: Vec<ExponentField>,
    spec: QuadratureSpec,
    cache: RefCell<HashMap<u64, f64>>,
    error: RefCell<Option<Error>>,
}

impl OperatorImage {
    pub fn new(
        kind: OperatorKind,
        source: TestFunction,
        beta: ExponentField,
        spec: QuadratureSpec,
    ) -> Result<Self> {
        check_dims(&source, &beta)?;
        spec.validate()?;
        Ok(OperatorImage {
            source,
            kind,
            beta,
            weights: Vec::new(),
            spec: inner_spec(&spec),
            cache: RefCell::new(HashMap::new()),
            error: RefCell::new(None),
        })
    }

    /// The unweighted source itself, as an image to be weighted.
    pub fn identity(source: TestFunction) -> Self {
        let n = source.dim();
        OperatorImage {
            source,
            kind: OperatorKind::Identity,
            beta: ExponentField::constant(0.0, n).expect("constant field is valid"),
            weights: Vec::new(),
            spec: QuadratureSpec::default(),
            cache: RefCell::new(HashMap::new()),
            error: RefCell::new(None),
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn source(&self) -> &TestFunction {
        &self.source
    }

    pub fn beta(&self) -> &ExponentField {
        &self.beta
    }

    /// Pointwise multiplication by `(1 + |x|)^{−γ(x)}`.
    pub fn apply_weight(mut self, gamma: &ExponentField) -> Self {
        if !(gamma.ess_inf() == 0.0 && gamma.ess_sup() == 0.0) {
            self.weights.push(gamma.clone());
            self.cache.borrow_mut().clear();
        }
        self
    }

    pub fn weight_at(&self, r: f64) -> f64 {
        self.weights.iter().map(|g| g.weight(r)).product()
    }

    fn unweighted(&self, r: f64) -> Result<f64> {
        let f = &self.source;
        Ok(match self.kind {
            OperatorKind::Identity => f.value(r),
            OperatorKind::Hardy => hardy_radial(f, &self.beta, r, &self.spec)?.value,
            OperatorKind::HardyStar => hardy_star_radial(f, &self.beta, r, &self.spec)?.value,
            OperatorKind::Riesz => riesz_radial(f, &self.beta, r, &self.spec)?.value,
        })
    }

    /// Evaluate at the point `x`.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        let r = check_point(&self.source, x)?;
        if r == 0.0 && self.kind != OperatorKind::Riesz {
            return Err(Error::domain("operator image is evaluated at x != 0 only"));
        }
        Ok(self.unweighted(r)? * self.weight_at(r))
    }
}

impl RadialFunction for OperatorImage {
    fn dim(&self) -> usize {
        self.source.dim()
    }

    fn value(&self, r: f64) -> f64 {
        if !(r > 0.0) {
            return 0.0;
        }
        let key = r.to_bits();
        if let Some(v) = self.cache.borrow().get(&key) {
            return *v;
        }
        let v = match self.unweighted(r) {
            Ok(v) => v * self.weight_at(r),
            Err(e) => {
                self.error.borrow_mut().get_or_insert(e);
                0.0
            }
        };
        self.cache.borrow_mut().insert(key, v);
        v
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out = self.source.breakpoints();
        out.extend(self.beta.breakpoints());
        for g in &self.weights {
            out.extend(g.breakpoints());
        }
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn radial_support(&self) -> (f64, f64) {
        let (lo, hi) = self.source.radial_support();
        match self.kind {
            OperatorKind::Identity => (lo, hi),
            OperatorKind::Hardy => (lo, f64::INFINITY),
            OperatorKind::HardyStar => (0.0, hi),
            OperatorKind::Riesz => (0.0, f64::INFINITY),
        }
    }

    fn is_zero(&self) -> bool {
        self.source.is_zero()
    }

    fn take_error(&self) -> Option<Error> {
        self.error.borrow_mut().take()
    }
}

/// `‖(1+|x|)^{−γ(x)} T f · χ_k‖_{L^{q(·)}}`.
#[allow(clippy::too_many_arguments)]
pub fn operator_block_norm(
    kind: OperatorKind,
    f: &TestFunction,
    beta: &ExponentField,
    gamma: &ExponentField,
    k: i32,
    q: &ExponentField,
    spec: &QuadratureSpec,
) -> Result<NormValue> {
    let image = OperatorImage::new(kind, f.clone(), beta.clone(), *spec)?.apply_weight(gamma);
    if !image.touches_annulus(k) {
        return Ok(NormValue::zero());
    }
    let block = Modified::block(&image, k);
    // bound to a local so the temporary drops before `image`
    #[allow(clippy::let_and_return)]
    let norm = luxemburg_norm(&block, q, spec);
    norm
}
