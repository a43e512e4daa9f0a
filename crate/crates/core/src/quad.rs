//! Adaptive quadrature over balls, annuli and exteriors in `ℝⁿ`, `n ≤ 3`.
//!
//! Every integral is reduced to the radius: `∫ g = ∫ Φ(r) r^{n−1} dr` with
//! `Φ(r)` the integral of `g` over the sphere of radius `r` (exactly
//! `σ_{n−1}·g(r)` for radial `g`, a product angular rule otherwise).
//! The radial integral is split at every dyadic radius `2^j` and at the
//! integrand's breakpoints, and refined with a globally adaptive
//! Gauss–Kronrod (7, 15) scheme. Near the origin panels are graded
//! geometrically with ratio 1/2; beyond `2^{k_max}` a tail is estimated
//! from the last two dyadic shells.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::function::{dyadic, sphere_measure, RadialFunction};

/// Smallest absolute error target; protects identically-zero integrals.
pub const ABS_FLOOR: f64 = 1e-30;

const MAX_ORIGIN_SHELLS: usize = 900;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
    pub dyadic_window: (i32, i32),
    pub angular_points: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-8,
            max_subdivisions: 1 << 20,
            dyadic_window: (-40, 40),
            angular_points: 64,
        }
    }
}

impl QuadratureSpec {
    pub fn with_rel_tol(self, rel_tol: f64) -> Self {
        QuadratureSpec { rel_tol, ..self }
    }

    pub fn with_window(self, k_min: i32, k_max: i32) -> Self {
        QuadratureSpec {
            dyadic_window: (k_min, k_max),
            ..self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return Err(Error::config("rel_tol must be positive"));
        }
        let (lo, hi) = self.dyadic_window;
        if lo >= hi {
            return Err(Error::config("dyadic_window must satisfy k_min < k_max"));
        }
        if lo < -1000 || hi > 1000 {
            return Err(Error::config("dyadic_window must lie within [-1000, 1000]"));
        }
        if self.max_subdivisions == 0 {
            return Err(Error::config("max_subdivisions must be positive"));
        }
        if self.angular_points == 0 {
            return Err(Error::config("angular_points must be positive"));
        }
        Ok(())
    }

    fn check_index(&self, k: i32) -> Result<()> {
        let (lo, hi) = self.dyadic_window;
        if k < lo || k > hi {
            return Err(Error::config(format!(
                "dyadic index {k} outside the window [{lo}, {hi}]"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct IntegralValue {
    pub value: f64,
    pub err_estimate: f64,
    pub panels_used: usize,
}

impl IntegralValue {
    pub const ZERO: IntegralValue = IntegralValue {
        value: 0.0,
        err_estimate: 0.0,
        panels_used: 0,
    };
}

impl std::ops::Add for IntegralValue {
    type Output = IntegralValue;

    fn add(self, o: IntegralValue) -> IntegralValue {
        IntegralValue {
            value: self.value + o.value,
            err_estimate: self.err_estimate + o.err_estimate,
            panels_used: self.panels_used + o.panels_used,
        }
    }
}

type PointFn<'a> = Box<dyn Fn(&[f64]) -> f64 + 'a>;

enum Eval<'a> {
    Radial(Box<dyn Fn(f64) -> f64 + 'a>),
    Point(PointFn<'a>),
}

/// Something to integrate over a subset of `ℝⁿ`.
pub struct Integrand<'a> {
    n: usize,
    eval: Eval<'a>,
    breakpoints: Vec<f64>,
    support: (f64, f64),
    source: Option<&'a dyn RadialFunction>,
}

impl<'a> Integrand<'a> {
    /// `g(x) = profile(|x|)`.
    pub fn radial(n: usize, profile: impl Fn(f64) -> f64 + 'a) -> Self {
        Integrand {
            n,
            eval: Eval::Radial(Box::new(profile)),
            breakpoints: Vec::new(),
            support: (0.0, f64::INFINITY),
            source: None,
        }
    }

    /// A general, possibly non-radial integrand.
    pub fn pointwise(n: usize, g: impl Fn(&[f64]) -> f64 + 'a) -> Self {
        Integrand {
            n,
            eval: Eval::Point(Box::new(g)),
            breakpoints: Vec::new(),
            support: (0.0, f64::INFINITY),
            source: None,
        }
    }

    pub fn from_function(f: &'a dyn RadialFunction) -> Self {
        Integrand {
            n: f.dim(),
            eval: Eval::Radial(Box::new(move |r| f.value(r))),
            breakpoints: f.breakpoints(),
            support: f.radial_support(),
            source: Some(f),
        }
    }

    /// `|f(x)/η|^{q(x)}`.
    pub fn modular_density(f: &'a dyn RadialFunction, q: &'a ExponentField, eta: f64) -> Self {
        let mut bps = f.breakpoints();
        bps.extend(q.breakpoints());
        Integrand {
            n: f.dim(),
            eval: Eval::Radial(Box::new(move |r| {
                let v = f.value(r);
                if v == 0.0 {
                    0.0
                } else {
                    (v.abs() / eta).powf(q.radial(r))
                }
            })),
            breakpoints: bps,
            support: f.radial_support(),
            source: Some(f),
        }
    }

    /// Radii where the integrand is not smooth.
    pub fn with_breakpoints(mut self, bps: Vec<f64>) -> Self {
        self.breakpoints.extend(bps);
        self
    }

    /// The integrand vanishes for `|x| < lo` and `|x| > hi`.
    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = (self.support.0.max(lo), self.support.1.min(hi));
        self
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    fn check(&self) -> Result<()> {
        if !(1..=3).contains(&self.n) {
            return Err(Error::config(format!(
                "dimension n must be 1, 2 or 3 (got {})",
                self.n
            )));
        }
        Ok(())
    }
}

/// Angular rule for non-radial integrands: `Φ(r) = ∫_{S^{n−1}} g(rθ) dθ`.
struct Sphere {
    n: usize,
    sigma: f64,
    /// `(unit direction, weight)` pairs; empty for radial integrands.
    nodes: Vec<([f64; 3], f64)>,
}

impl Sphere {
    fn new(g: &Integrand, angular_points: usize) -> Self {
        let n = g.n;
        let mut nodes = Vec::new();
        if matches!(g.eval, Eval::Point(_)) {
            let m = angular_points;
            let tau = 2.0 * std::f64::consts::PI;
            match n {
                1 => nodes = vec![([1.0, 0.0, 0.0], 1.0), ([-1.0, 0.0, 0.0], 1.0)],
                2 => {
                    for i in 0..m {
                        let phi = tau * i as f64 / m as f64;
                        nodes.push(([phi.cos(), phi.sin(), 0.0], tau / m as f64));
                    }
                }
                _ => {
                    let (xs, ws) = gauss_legendre(m);
                    for (c, w) in xs.iter().zip(&ws) {
                        let s = (1.0 - c * c).max(0.0).sqrt();
                        for i in 0..m {
                            let phi = tau * i as f64 / m as f64;
                            nodes.push(([s * phi.cos(), s * phi.sin(), *c], w * tau / m as f64));
                        }
                    }
                }
            }
        }
        Sphere {
            n,
            sigma: sphere_measure(n),
            nodes,
        }
    }

    /// `Φ(r)·r^{n−1}`.
    #[inline]
    fn density(&self, g: &Integrand, r: f64) -> f64 {
        let phi = match &g.eval {
            Eval::Radial(f) => {
                let v = f(r);
                if v == 0.0 {
                    return 0.0;
                }
                self.sigma * v
            }
            Eval::Point(f) => {
                let mut x = [0.0; 3];
                let mut acc = 0.0;
                for (u, w) in &self.nodes {
                    for d in 0..self.n {
                        x[d] = r * u[d];
                    }
                    acc += w * f(&x[..self.n]);
                }
                acc
            }
        };
        match self.n {
            1 => phi,
            2 => phi * r,
            _ => phi * r * r,
        }
    }
}

/// Nodes and weights of the `m`-point Gauss–Legendre rule on `[−1, 1]`.
pub fn gauss_legendre(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut xs = vec![0.0; m];
    let mut ws = vec![0.0; m];
    for i in 0..m {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (m as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=m {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let p = if m == 0 { 1.0 } else { p1 };
            let pm1 = if m == 1 { 1.0 } else { p0 };
            dp = m as f64 * (x * p - pm1) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        xs[i] = x;
        ws[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    (xs, ws)
}

#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
];
#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    val: f64,
    err: f64,
    resabs: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

fn gk15(f: &dyn Fn(f64) -> f64, a: f64, b: f64) -> Panel {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut resg = fc * WG[3];
    let mut resk = fc * WGK[7];
    let mut resabs = resk.abs();
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (f1, f2) = (f(c - x), f(c + x));
        fv1[j] = f1;
        fv2[j] = f2;
        resk += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            resg += WG[j / 2] * (f1 + f2);
        }
    }
    let reskh = 0.5 * resk;
    let mut resasc = WGK[7] * (fc - reskh).abs();
    for j in 0..7 {
        resasc += WGK[j] * ((fv1[j] - reskh).abs() + (fv2[j] - reskh).abs());
    }
    let val = resk * h;
    if !val.is_finite() {
        return Panel {
            a,
            b,
            val,
            err: 0.0,
            resabs: f64::INFINITY,
        };
    }
    let resabs = resabs * h.abs();
    let resasc = resasc * h.abs();
    let mut err = ((resk - resg) * h).abs();
    if resasc != 0.0 && err != 0.0 {
        err = resasc * (200.0 * err / resasc).powf(1.5).min(1.0);
    }
    if resabs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        err = err.max(50.0 * f64::EPSILON * resabs);
    }
    Panel {
        a,
        b,
        val,
        err,
        resabs,
    }
}

/// Globally adaptive G7K15 over the pieces delimited by `edges` (sorted).
///
/// Converges when the summed error is at most `max(rel_tol·|I|, 1e-30)`.
/// Panels whose error is at the rounding floor of their own magnitude are
/// frozen; if only frozen panels remain the result is accepted as
/// rounding-limited.
fn adaptive(
    f: &dyn Fn(f64) -> f64,
    edges: &[f64],
    rel_tol: f64,
    max_panels: usize,
) -> Result<IntegralValue> {
    let mut heap = BinaryHeap::new();
    let mut frozen = Vec::new();
    let (mut total, mut err) = (0.0, 0.0);
    for w in edges.windows(2) {
        if w[0] < w[1] {
            let p = gk15(f, w[0], w[1]);
            total += p.val;
            err += p.err;
            heap.push(p);
        }
    }
    let mut count = heap.len();
    if total.is_nan() {
        return Err(Error::domain("integrand evaluated to NaN"));
    }
    if total.is_infinite() {
        return Ok(IntegralValue {
            value: total,
            err_estimate: 0.0,
            panels_used: count,
        });
    }
    loop {
        if err <= (rel_tol * total.abs()).max(ABS_FLOOR) {
            break;
        }
        let Some(p) = heap.pop() else { break };
        let mid = 0.5 * (p.a + p.b);
        if p.err <= 100.0 * f64::EPSILON * p.resabs || !(p.a < mid && mid < p.b) {
            frozen.push(p);
            continue;
        }
        if count >= max_panels {
            heap.push(p);
            let (value, err_estimate) = sum_panels(heap.iter().chain(&frozen));
            return Err(Error::Quadrature {
                best: value,
                err_estimate,
                panels: count,
            });
        }
        let l = gk15(f, p.a, mid);
        let r = gk15(f, mid, p.b);
        total += l.val + r.val - p.val;
        err += l.err + r.err - p.err;
        if total.is_nan() {
            return Err(Error::domain("integrand evaluated to NaN"));
        }
        heap.push(l);
        heap.push(r);
        count += 1;
    }
    let (value, err_estimate) = sum_panels(heap.iter().chain(&frozen));
    Ok(IntegralValue {
        value,
        err_estimate,
        panels_used: count,
    })
}

fn sum_panels<'p>(panels: impl Iterator<Item = &'p Panel>) -> (f64, f64) {
    panels.fold((0.0, 0.0), |(v, e), p| (v + p.val, e + p.err))
}

fn edges_between(a: f64, b: f64, breakpoints: &[f64], dyadic_splits: bool) -> Vec<f64> {
    let mut edges = vec![a, b];
    if dyadic_splits && a > 0.0 && b.is_finite() {
        let mut j = a.log2().floor() as i32;
        while dyadic(j) < b {
            if dyadic(j) > a {
                edges.push(dyadic(j));
            }
            j += 1;
        }
    }
    edges.extend(breakpoints.iter().copied().filter(|&r| r > a && r < b));
    edges.sort_by(f64::total_cmp);
    edges.dedup();
    edges
}

/// `∫_{a ≤ |x| ≤ b} g(x) dx` for `0 ≤ a < b ≤ ∞`.
pub fn integrate_radii(
    g: &Integrand,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    spec.validate()?;
    g.check()?;
    let out = integrate_radii_unchecked(g, a, b, spec);
    // an error stashed by a nested evaluation explains any failure here
    if let Some(e) = g.source.and_then(|s| s.take_error()) {
        return Err(e);
    }
    out
}

/// `∫_a^b h(t) dt` for `0 ≤ a < b ≤ ∞`, with the splitting, grading toward
/// `t = 0` and tail rules of the radial integrals.
pub fn integrate_1d(
    h: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    // σ₀ = 2 in dimension one; the halving is exact in binary arithmetic
    let g = Integrand::radial(1, move |t| 0.5 * h(t)).with_breakpoints(breakpoints.to_vec());
    integrate_radii(&g, a, b, spec)
}

fn integrate_radii_unchecked(
    g: &Integrand,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    let lo = a.max(g.support.0);
    let hi = b.min(g.support.1);
    if !(lo < hi) {
        return Ok(IntegralValue::ZERO);
    }
    let sphere = Sphere::new(g, spec.angular_points);
    let h = |r: f64| sphere.density(g, r);
    let mut bps = g.breakpoints.clone();
    bps.sort_by(f64::total_cmp);

    let (k_min, mut k_max) = spec.dyadic_window;
    let r0 = dyadic(k_min - 1);
    if hi.is_infinite() && lo > 0.0 {
        k_max = k_max.max(lo.log2().ceil() as i32 + 2);
    }
    let r_max = dyadic(k_max);

    let mut total = IntegralValue::ZERO;
    if lo < r0 {
        let top = hi.min(r0);
        total = total + graded(&h, lo, top, &bps, spec)?;
    }
    let mid_lo = lo.max(r0);
    let mid_hi = if hi.is_infinite() { r_max } else { hi };
    if mid_lo < mid_hi {
        let edges = edges_between(mid_lo, mid_hi, &bps, true);
        total = total + adaptive(&h, &edges, spec.rel_tol, spec.max_subdivisions)?;
    }
    if hi.is_infinite() {
        let tail = exterior_tail(&h, k_max, &bps, spec)?;
        let tolerance = spec.rel_tol * total.value.abs();
        if tail + total.err_estimate > tolerance.max(ABS_FLOOR) {
            let required_k_max = required_window(&h, k_max, tail, tolerance, &bps, spec);
            return Err(Error::Truncation {
                tail,
                tolerance,
                required_k_max,
            });
        }
        total.err_estimate += tail;
    }
    Ok(total)
}

/// Geometric grading toward `lo` (toward the origin when `lo = 0`).
fn graded(
    h: &dyn Fn(f64) -> f64,
    lo: f64,
    top: f64,
    bps: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    let mut total = IntegralValue::ZERO;
    if lo > 0.0 {
        let mut edges = vec![top];
        let mut r = top;
        while r > lo {
            r = (r * 0.5).max(lo);
            edges.push(r);
        }
        edges.extend(bps.iter().copied().filter(|&x| x > lo && x < top));
        edges.sort_by(f64::total_cmp);
        edges.dedup();
        return adaptive(h, &edges, spec.rel_tol, spec.max_subdivisions);
    }
    let mut shells: Vec<f64> = Vec::new();
    let mut upper = top;
    for _ in 0..MAX_ORIGIN_SHELLS {
        let lower = upper * 0.5;
        let edges = edges_between(lower, upper, bps, false);
        let s = adaptive(h, &edges, spec.rel_tol, spec.max_subdivisions)?;
        total = total + s;
        shells.push(s.value);
        upper = lower;
        let j = shells.len();
        if j >= 2 && shells[j - 1] == 0.0 && shells[j - 2] == 0.0 {
            return Ok(total);
        }
        if j >= 3 {
            let (s0, s1, s2) = (shells[j - 3], shells[j - 2], shells[j - 1]);
            let rho = s2 / s1;
            let rho_prev = s1 / s0;
            if (0.0..1.0).contains(&rho) && (0.0..1.0).contains(&rho_prev) {
                let tail = s2 * rho / (1.0 - rho);
                let tail_prev = s2 * rho_prev / (1.0 - rho_prev);
                let tail_err = (tail - tail_prev).abs();
                if tail_err <= (0.1 * spec.rel_tol * (total.value + tail).abs()).max(ABS_FLOOR) {
                    total.value += tail;
                    total.err_estimate += tail_err;
                    return Ok(total);
                }
            }
        }
    }
    Err(Error::Quadrature {
        best: total.value,
        err_estimate: total.err_estimate + shells.last().map_or(0.0, |s| s.abs()),
        panels: total.panels_used,
    })
}

fn shell(h: &dyn Fn(f64) -> f64, k: i32, bps: &[f64], spec: &QuadratureSpec) -> Result<f64> {
    let edges = edges_between(dyadic(k - 1), dyadic(k), bps, false);
    Ok(adaptive(h, &edges, spec.rel_tol, spec.max_subdivisions)?.value)
}

/// Geometric tail `S·ρ/(1−ρ)` from the last two shells below `2^{k_max}`.
fn exterior_tail(
    h: &dyn Fn(f64) -> f64,
    k_max: i32,
    bps: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64> {
    let last = shell(h, k_max, bps, spec)?.abs();
    if last == 0.0 {
        return Ok(0.0);
    }
    let prev = shell(h, k_max - 1, bps, spec)?.abs();
    let rho = last / prev;
    if !(rho < 1.0) {
        return Ok(f64::INFINITY);
    }
    Ok(last * rho / (1.0 - rho))
}

fn required_window(
    h: &dyn Fn(f64) -> f64,
    k_max: i32,
    tail: f64,
    tolerance: f64,
    bps: &[f64],
    spec: &QuadratureSpec,
) -> Option<i32> {
    if !tail.is_finite() || tolerance <= 0.0 {
        return None;
    }
    let last = shell(h, k_max, bps, spec).ok()?.abs();
    let prev = shell(h, k_max - 1, bps, spec).ok()?.abs();
    let rho = last / prev;
    let extra = ((tolerance / tail).ln() / rho.ln()).ceil();
    (extra.is_finite() && extra < 1e6).then(|| k_max + extra as i32)
}

/// `∫_a^b h` over a finite interval by plain adaptive refinement, split at
/// `breakpoints`; for integrands that are bounded on `[a, b]`.
pub fn integrate_segment(
    h: &dyn Fn(f64) -> f64,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    spec.validate()?;
    if !(a < b) {
        return Ok(IntegralValue::ZERO);
    }
    let edges = edges_between(a, b, breakpoints, false);
    adaptive(h, &edges, spec.rel_tol, spec.max_subdivisions)
}

/// `∫_0^len h` for an integrand with an integrable singularity at `0`,
/// by geometric grading (ratio 1/2) toward `0` with geometric extrapolation
/// of the remaining shells.
pub fn integrate_graded(
    h: &dyn Fn(f64) -> f64,
    len: f64,
    breakpoints: &[f64],
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    spec.validate()?;
    if !(len > 0.0) {
        return Ok(IntegralValue::ZERO);
    }
    graded(h, 0.0, len, breakpoints, spec)
}

/// `∫_{A_k} g`.
pub fn integrate_annulus(g: &Integrand, k: i32, spec: &QuadratureSpec) -> Result<IntegralValue> {
    spec.validate()?;
    spec.check_index(k)?;
    integrate_radii(g, dyadic(k - 1), dyadic(k), spec)
}

/// `∫_{B_k} g`: annuli `k_min..=k` plus a graded origin panel.
pub fn integrate_ball(g: &Integrand, k: i32, spec: &QuadratureSpec) -> Result<IntegralValue> {
    spec.validate()?;
    spec.check_index(k)?;
    integrate_radii(g, 0.0, dyadic(k), spec)
}

/// `∫_{|x| ≥ 2^k} g`, truncated at `2^{k_max}` with the tail folded into
/// the error estimate.
pub fn integrate_exterior(g: &Integrand, k: i32, spec: &QuadratureSpec) -> Result<IntegralValue> {
    spec.validate()?;
    spec.check_index(k)?;
    integrate_radii(g, dyadic(k), f64::INFINITY, spec)
}

/// `F_q(f) = ∫ |f(x)|^{q(x)} dx`.
pub fn modular(
    f: &dyn RadialFunction,
    q: &ExponentField,
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    modular_scaled(f, q, 1.0, spec)
}

/// `F_q(f/η)`.
pub fn modular_scaled(
    f: &dyn RadialFunction,
    q: &ExponentField,
    eta: f64,
    spec: &QuadratureSpec,
) -> Result<IntegralValue> {
    if f.dim() != q.dim() {
        return Err(Error::config(
            "function and exponent live in different dimensions",
        ));
    }
    if f.is_zero() {
        return Ok(IntegralValue::ZERO);
    }
    let g = Integrand::modular_density(f, q, eta);
    integrate_radii(&g, 0.0, f64::INFINITY, spec)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::function::{ball_measure, Primitive, Region, TestFunction};
    use std::f64::consts::PI;

    fn spec() -> QuadratureSpec {
        QuadratureSpec::default()
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn annulus_examples() {
        let one = Integrand::radial(1, |_| 1.0);
        assert!(rel(integrate_annulus(&one, 0, &spec()).unwrap().value, 1.0) < 1e-14);
        let one2 = Integrand::radial(2, |_| 1.0);
        assert!(
            rel(
                integrate_annulus(&one2, 1, &spec()).unwrap().value,
                3.0 * PI
            ) < 1e-14
        );
        let inv = Integrand::radial(1, |r| 1.0 / r);
        let v = integrate_annulus(&inv, 0, &spec()).unwrap();
        assert!(rel(v.value, 2.0 * 2f64.ln()) < 1e-12);
        assert!(v.err_estimate <= 1e-8 * v.value);
    }

    #[test]
    fn ball_examples() {
        let one = Integrand::radial(1, |_| 1.0);
        assert!(rel(integrate_ball(&one, 0, &spec()).unwrap().value, 2.0) < 1e-13);
        let sing = Integrand::radial(1, |r| r.powf(-0.5));
        let v = integrate_ball(&sing, 0, &spec()).unwrap();
        assert!(rel(v.value, 4.0) < 1e-10, "{v:?}");
        let one3 = Integrand::radial(3, |_| 1.0);
        let v = integrate_ball(&one3, 1, &spec()).unwrap();
        assert!(rel(v.value, 4.0 * PI / 3.0 * 8.0) < 1e-13);
        assert!(matches!(
            integrate_ball(&one, 41, &spec()),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn exterior_examples() {
        let inv2 = Integrand::radial(1, |r| r.powi(-2));
        let v = integrate_exterior(&inv2, 0, &spec()).unwrap();
        assert!((v.value - 2.0).abs() <= v.err_estimate + 1e-14, "{v:?}");
        assert!(rel(v.value, 2.0) < 1e-10);

        let f = TestFunction::single(1, 1.0, Primitive::BallIndicator { k: 3 }).unwrap();
        let g = Integrand::from_function(&f);
        assert!(rel(integrate_exterior(&g, 0, &spec()).unwrap().value, 14.0) < 1e-13);

        let inv = Integrand::radial(1, |r| 1.0 / r);
        assert!(matches!(
            integrate_exterior(&inv, 0, &spec()),
            Err(Error::Truncation { .. })
        ));
    }

    #[test]
    fn modular_examples() {
        let spec = spec();
        let q = ExponentField::radial_log(2.0, 1.0, 1).unwrap();
        let f = TestFunction::ball_indicator(1, 0);
        assert!(rel(modular(&f, &q, &spec).unwrap().value, 2.0) < 1e-13);
        let f = TestFunction::annulus_indicator(1, 0).scaled(2.0);
        let q2 = ExponentField::constant(2.0, 1).unwrap();
        assert!(rel(modular(&f, &q2, &spec).unwrap().value, 4.0) < 1e-13);
        assert_eq!(
            modular(&TestFunction::zero(1), &q2, &spec).unwrap().value,
            0.0
        );
    }

    #[test]
    fn non_radial_product_rule() {
        // ∫_{A_1} x₁² dx in ℝ² = π ∫_1^2 r³ dr = 15π/4
        let g = Integrand::pointwise(2, |x| x[0] * x[0]);
        let v = integrate_annulus(&g, 1, &spec()).unwrap();
        assert!(rel(v.value, 15.0 * PI / 4.0) < 1e-12, "{v:?}");
        // ∫_{B_0} x₃² dx in ℝ³ = (4π/3)·(1/5)
        let g = Integrand::pointwise(3, |x| x[2] * x[2]);
        let v = integrate_ball(&g, 0, &spec()).unwrap();
        assert!(rel(v.value, 4.0 * PI / 15.0) < 1e-10, "{v:?}");
        // odd integrand on ℝ¹ cancels
        let g = Integrand::pointwise(1, |x| x[0]);
        assert!(integrate_annulus(&g, 2, &spec()).unwrap().value.abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_is_exact_for_polynomials() {
        let (xs, ws) = gauss_legendre(8);
        let s: f64 = xs.iter().zip(&ws).map(|(x, w)| w * x.powi(14)).sum();
        assert!((s - 2.0 / 15.0).abs() < 1e-14);
        assert!((ws.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn origin_grading_handles_log_singularity() {
        // ∫_0^1 r^{-1/2} ln(e + 1/r) dr checked against a substitution r = u²:
        // 2∫_0^1 ln(e + u^{-2}) du, smooth enough away from u = 0 after grading.
        let f = TestFunction::single(
            1,
            1.0,
            Primitive::RadialPowerLog {
                s: -0.5,
                t: 1.0,
                piece: Region::Ball { k: 0 },
                scale: 1.0,
            },
        )
        .unwrap();
        let v = integrate_radii(&Integrand::from_function(&f), 0.0, 1.0, &spec()).unwrap();
        let oracle = {
            // composite Simpson in u on a fine graded grid (independent rule)
            let g = |u: f64| 2.0 * 2.0 * (std::f64::consts::E + 1.0 / (u * u)).ln();
            let mut acc = 0.0;
            let mut hi = 1.0;
            while hi > 1e-150 {
                let lo = hi * 0.5;
                let m = 64;
                let h = (hi - lo) / m as f64;
                let mut s = g(lo) + g(hi);
                for i in 1..m {
                    s += g(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
                }
                acc += s * h / 3.0;
                hi = lo;
            }
            acc
        };
        assert!(rel(v.value, oracle) < 1e-9, "{} vs {oracle}", v.value);
    }

    #[test]
    fn ball_measures_in_all_dimensions() {
        for n in 1..=3 {
            let f = TestFunction::ball_indicator(n, 2);
            let v = integrate_ball(&Integrand::from_function(&f), 3, &spec()).unwrap();
            assert!(rel(v.value, ball_measure(n, 4.0)) < 1e-13);
        }
    }

    #[test]
    fn invalid_spec_rejected() {
        let g = Integrand::radial(1, |_| 1.0);
        let bad = spec().with_rel_tol(-1.0);
        match integrate_annulus(&g, 0, &bad) {
            Err(Error::Config(m)) => assert!(m.contains("rel_tol must be positive")),
            other => panic!("{other:?}"),
        }
        assert!(integrate_annulus(&g, 0, &spec().with_window(3, 3)).is_err());
    }

    #[test]
    fn subdivision_cap_reports_best_estimate() {
        let g = Integrand::radial(1, |r| (1.0 / (r - 1.3)).sin());
        let tight = QuadratureSpec {
            max_subdivisions: 4,
            rel_tol: 1e-12,
            ..spec()
        };
        assert!(matches!(
            integrate_annulus(&g, 1, &tight),
            Err(Error::Quadrature { .. })
        ));
    }
}
