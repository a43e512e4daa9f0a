//! Symbolic radial test functions built from indicators and power laws.
//!
//! Dyadic conventions: `B_k = {|x| ≤ 2^k}` and `A_k = B_k ∖ B_{k−1}`.

use std::f64::consts::E;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exponent::ExponentField;

/// Surface measure of the unit sphere `S^{n−1}` (`2`, `2π`, `4π`).
pub fn sphere_measure(n: usize) -> f64 {
    match n {
        1 => 2.0,
        2 => 2.0 * std::f64::consts::PI,
        3 => 4.0 * std::f64::consts::PI,
        _ => panic!("unsupported dimension {n}"),
    }
}

/// Lebesgue measure of the ball of radius `r` in `ℝⁿ`.
pub fn ball_measure(n: usize, r: f64) -> f64 {
    sphere_measure(n) / n as f64 * r.powi(n as i32)
}

#[inline]
pub fn dyadic(k: i32) -> f64 {
    2f64.powi(k)
}

/// The dyadic annulus `A_k` containing radius `r > 0`.
pub fn annulus_index(r: f64) -> i32 {
    // A_k = (2^{k-1}, 2^k]  <=>  k = ceil(log2 r)
    let mut k = r.log2().ceil() as i32;
    while dyadic(k) < r {
        k += 1;
    }
    while dyadic(k - 1) >= r {
        k -= 1;
    }
    k
}

/// A radial function on `ℝⁿ` that can be integrated block by block.
pub trait RadialFunction {
    fn dim(&self) -> usize;

    /// Value at radius `r > 0`.
    fn value(&self, r: f64) -> f64;

    /// Radii where the profile is discontinuous or not smooth.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }

    /// `(lo, hi)`: the profile vanishes identically for `r < lo` and `r > hi`.
    fn radial_support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }

    /// `true` only when the function is known to vanish identically.
    fn is_zero(&self) -> bool {
        false
    }

    /// Errors raised by nested computations during evaluation are stashed
    /// and surfaced here, since `value` itself is infallible.
    fn take_error(&self) -> Option<Error> {
        None
    }

    /// Whether the exact support meets `A_k`.
    fn touches_annulus(&self, k: i32) -> bool {
        let (lo, hi) = self.radial_support();
        !self.is_zero() && lo < dyadic(k) && hi > dyadic(k - 1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "region", rename_all = "snake_case", deny_unknown_fields)]
pub enum Region {
    /// `|x| ≤ 2^k`
    Ball { k: i32 },
    /// `A_j`
    Annulus { j: i32 },
    /// `|x| > 2^k`
    Exterior { k: i32 },
}

impl Region {
    pub fn radii(&self) -> (f64, f64) {
        match *self {
            Region::Ball { k } => (0.0, dyadic(k)),
            Region::Annulus { j } => (dyadic(j - 1), dyadic(j)),
            Region::Exterior { k } => (dyadic(k), f64::INFINITY),
        }
    }

    /// Range of annulus indices covered.
    pub fn window(&self) -> (Option<i32>, Option<i32>) {
        match *self {
            Region::Ball { k } => (None, Some(k)),
            Region::Annulus { j } => (Some(j), Some(j)),
            Region::Exterior { k } => (Some(k + 1), None),
        }
    }

    #[inline]
    pub fn contains(&self, r: f64) -> bool {
        let (lo, hi) = self.radii();
        match self {
            Region::Ball { .. } => r <= hi,
            Region::Annulus { .. } => lo < r && r <= hi,
            Region::Exterior { .. } => r > lo,
        }
    }

    fn shifted(&self, m: i32) -> Region {
        match *self {
            Region::Ball { k } => Region::Ball { k: k - m },
            Region::Annulus { j } => Region::Annulus { j: j - m },
            Region::Exterior { k } => Region::Exterior { k: k - m },
        }
    }

    fn touches_origin(&self) -> bool {
        matches!(self, Region::Ball { .. })
    }
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Primitive {
    AnnulusIndicator {
        j: i32,
    },
    BallIndicator {
        k: i32,
    },
    /// `|x|^s` on a piece.
    RadialPower {
        s: f64,
        piece: Region,
    },
    /// `exp(−(|x|/scale)²)`.
    Gaussian {
        scale: f64,
    },
    /// `|x|^s · ln(e + 1/(scale·|x|))^t` on a piece.
    RadialPowerLog {
        s: f64,
        t: f64,
        piece: Region,
        #[serde(default = "one")]
        scale: f64,
    },
}

impl Primitive {
    #[inline]
    pub fn value(&self, r: f64) -> f64 {
        match *self {
            Primitive::AnnulusIndicator { j } => {
                if dyadic(j - 1) < r && r <= dyadic(j) {
                    1.0
                } else {
                    0.0
                }
            }
            Primitive::BallIndicator { k } => {
                if r <= dyadic(k) {
                    1.0
                } else {
                    0.0
                }
            }
            Primitive::RadialPower { s, piece } => {
                if piece.contains(r) {
                    r.powf(s)
                } else {
                    0.0
                }
            }
            Primitive::Gaussian { scale } => {
                let u = r / scale;
                (-u * u).exp()
            }
            Primitive::RadialPowerLog { s, t, piece, scale } => {
                if piece.contains(r) {
                    r.powf(s) * (E + 1.0 / (scale * r)).ln().powf(t)
                } else {
                    0.0
                }
            }
        }
    }

    pub fn region(&self) -> Option<Region> {
        match *self {
            Primitive::AnnulusIndicator { j } => Some(Region::Annulus { j }),
            Primitive::BallIndicator { k } => Some(Region::Ball { k }),
            Primitive::RadialPower { piece, .. } | Primitive::RadialPowerLog { piece, .. } => {
                Some(piece)
            }
            Primitive::Gaussian { .. } => None,
        }
    }

    pub fn window(&self) -> (Option<i32>, Option<i32>) {
        self.region().map_or((None, None), |r| r.window())
    }

    pub fn radii(&self) -> (f64, f64) {
        self.region().map_or((0.0, f64::INFINITY), |r| r.radii())
    }

    fn validate(&self, n: usize) -> Result<()> {
        let nf = n as f64;
        match *self {
            Primitive::RadialPower { s, piece } | Primitive::RadialPowerLog { s, piece, .. } => {
                if !s.is_finite() {
                    return Err(Error::config("power exponent must be finite"));
                }
                if piece.touches_origin() && s <= -nf {
                    return Err(Error::config(format!(
                        "|x|^{s} is not locally integrable at the origin in dimension {n}"
                    )));
                }
                if let Primitive::RadialPowerLog { t, scale, .. } = *self {
                    if !t.is_finite() || !(scale > 0.0 && scale.is_finite()) {
                        return Err(Error::config(
                            "radial_power_log needs finite t and positive scale",
                        ));
                    }
                }
                Ok(())
            }
            Primitive::Gaussian { scale } if !(scale > 0.0 && scale.is_finite()) => {
                Err(Error::config("gaussian scale must be positive"))
            }
            _ => Ok(()),
        }
    }

    /// `(coefficient factor, primitive)` of `x ↦ p(2^m x)`.
    fn dilated(&self, m: i32) -> (f64, Primitive) {
        let sc = dyadic(m);
        match *self {
            Primitive::AnnulusIndicator { j } => (1.0, Primitive::AnnulusIndicator { j: j - m }),
            Primitive::BallIndicator { k } => (1.0, Primitive::BallIndicator { k: k - m }),
            Primitive::RadialPower { s, piece } => (
                sc.powf(s),
                Primitive::RadialPower {
                    s,
                    piece: piece.shifted(m),
                },
            ),
            Primitive::Gaussian { scale } => (1.0, Primitive::Gaussian { scale: scale / sc }),
            Primitive::RadialPowerLog { s, t, piece, scale } => (
                sc.powf(s),
                Primitive::RadialPowerLog {
                    s,
                    t,
                    piece: piece.shifted(m),
                    scale: scale * sc,
                },
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Term {
    pub coef: f64,
    pub primitive: Primitive,
}

/// A finite linear combination of radial primitives on `ℝⁿ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, try_from = "RawTestFunction")]
pub struct TestFunction {
    n: usize,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTestFunction {
    n: usize,
    terms: Vec<Term>,
}

impl TryFrom<RawTestFunction> for TestFunction {
    type Error = Error;

    fn try_from(raw: RawTestFunction) -> Result<Self> {
        TestFunction::new(raw.n, raw.terms)
    }
}

impl TestFunction {
    pub fn new(n: usize, terms: Vec<Term>) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::config(format!(
                "dimension n must be 1, 2 or 3 (got {n})"
            )));
        }
        for t in &terms {
            if !t.coef.is_finite() {
                return Err(Error::config("term coefficients must be finite"));
            }
            t.primitive.validate(n)?;
        }
        Ok(TestFunction { n, terms })
    }

    pub fn zero(n: usize) -> Self {
        TestFunction {
            n,
            terms: Vec::new(),
        }
    }

    pub fn single(n: usize, coef: f64, primitive: Primitive) -> Result<Self> {
        Self::new(n, vec![Term { coef, primitive }])
    }

    /// `χ_{B_k}`.
    pub fn ball_indicator(n: usize, k: i32) -> Self {
        Self::single(n, 1.0, Primitive::BallIndicator { k }).expect("indicator is always valid")
    }

    /// `χ_{A_j}`.
    pub fn annulus_indicator(n: usize, j: i32) -> Self {
        Self::single(n, 1.0, Primitive::AnnulusIndicator { j }).expect("indicator is always valid")
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn scaled(&self, c: f64) -> Self {
        TestFunction {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| Term {
                    coef: c * t.coef,
                    primitive: t.primitive,
                })
                .collect(),
        }
    }

    pub fn plus(&self, other: &TestFunction) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::config(
                "cannot add test functions of different dimensions",
            ));
        }
        let mut terms = self.terms.clone();
        terms.extend_from_slice(&other.terms);
        Ok(TestFunction { n: self.n, terms })
    }

    /// `x ↦ f(2^m x)`.
    pub fn dilate_dyadic(&self, m: i32) -> Self {
        TestFunction {
            n: self.n,
            terms: self
                .terms
                .iter()
                .map(|t| {
                    let (c, p) = t.primitive.dilated(m);
                    Term {
                        coef: t.coef * c,
                        primitive: p,
                    }
                })
                .collect(),
        }
    }

    fn live_terms(&self) -> impl Iterator<Item = &Term> {
        self.terms.iter().filter(|t| t.coef != 0.0)
    }

    /// Exact dyadic support window `(k_lo, k_hi)`; `None` is unbounded.
    /// Returns `None` overall for the zero function.
    pub fn support_window(&self) -> Option<(Option<i32>, Option<i32>)> {
        let mut iter = self.live_terms().map(|t| t.primitive.window());
        let first = iter.next()?;
        Some(iter.fold(first, |(lo, hi), (l, h)| {
            (
                lo.zip(l).map(|(a, b)| a.min(b)),
                hi.zip(h).map(|(a, b)| a.max(b)),
            )
        }))
    }

    /// Annulus indices that may carry mass, clipped to `window`.
    pub fn blocks(&self, window: (i32, i32)) -> Vec<i32> {
        let Some((lo, hi)) = self.support_window() else {
            return Vec::new();
        };
        let lo = lo.map_or(window.0, |l| l.max(window.0));
        let hi = hi.map_or(window.1, |h| h.min(window.1));
        (lo..=hi).filter(|&k| self.touches_annulus(k)).collect()
    }
}

impl RadialFunction for TestFunction {
    fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    fn value(&self, r: f64) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coef * t.primitive.value(r))
            .sum()
    }

    fn breakpoints(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self
            .live_terms()
            .flat_map(|t| {
                let (lo, hi) = t.primitive.radii();
                [lo, hi]
            })
            .filter(|r| *r > 0.0 && r.is_finite())
            .collect();
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn radial_support(&self) -> (f64, f64) {
        self.live_terms()
            .map(|t| t.primitive.radii())
            .fold((f64::INFINITY, 0.0), |(lo, hi), (l, h)| {
                (lo.min(l), hi.max(h))
            })
    }

    fn is_zero(&self) -> bool {
        self.live_terms().next().is_none()
    }

    fn touches_annulus(&self, k: i32) -> bool {
        self.live_terms().any(|t| {
            let (lo, hi) = t.primitive.radii();
            lo < dyadic(k) && hi > dyadic(k - 1)
        })
    }
}

/// A radial function multiplied by a radial factor and optionally
/// restricted to a radius range `(lo, hi]`.
pub struct Modified<'a> {
    inner: &'a dyn RadialFunction,
    factor: Option<Box<dyn Fn(f64) -> f64 + 'a>>,
    extra_breakpoints: Vec<f64>,
    window: (f64, f64),
}

impl<'a> Modified<'a> {
    pub fn new(inner: &'a dyn RadialFunction) -> Self {
        Modified {
            inner,
            factor: None,
            extra_breakpoints: Vec::new(),
            window: (0.0, f64::INFINITY),
        }
    }

    /// Restrict to `A_k`.
    pub fn block(inner: &'a dyn RadialFunction, k: i32) -> Self {
        Self::new(inner).restrict(dyadic(k - 1), dyadic(k))
    }

    pub fn restrict(mut self, lo: f64, hi: f64) -> Self {
        self.window = (self.window.0.max(lo), self.window.1.min(hi));
        self
    }

    pub fn times(mut self, factor: impl Fn(f64) -> f64 + 'a, breakpoints: Vec<f64>) -> Self {
        let prev = self.factor.take();
        self.factor = Some(match prev {
            None => Box::new(factor),
            Some(p) => Box::new(move |r| p(r) * factor(r)),
        });
        self.extra_breakpoints.extend(breakpoints);
        self
    }

    /// Multiply by `(1 + r)^{−γ(r)}`.
    pub fn weighted(self, gamma: &'a ExponentField) -> Self {
        if gamma.ess_inf() == 0.0 && gamma.ess_sup() == 0.0 {
            return self;
        }
        let bps = gamma.breakpoints();
        self.times(move |r| gamma.weight(r), bps)
    }

    /// Multiply by the variable factor `2^{k α(r)}`.
    pub fn dyadic_multiplier(self, alpha: &'a ExponentField, k: i32) -> Self {
        let bps = alpha.breakpoints();
        let kf = k as f64 * std::f64::consts::LN_2;
        self.times(move |r| (kf * alpha.radial(r)).exp(), bps)
    }
}

impl RadialFunction for Modified<'_> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[inline]
    fn value(&self, r: f64) -> f64 {
        let (lo, hi) = self.window;
        if r <= lo || r > hi {
            return 0.0;
        }
        let v = self.inner.value(r);
        match &self.factor {
            Some(f) if v != 0.0 => v * f(r),
            _ => v,
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        let (lo, hi) = self.radial_support();
        let mut out = self.inner.breakpoints();
        out.extend(self.extra_breakpoints.iter().copied());
        out.extend([self.window.0, self.window.1]);
        out.retain(|&r| r > lo && r < hi && r.is_finite());
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn radial_support(&self) -> (f64, f64) {
        let (lo, hi) = self.inner.radial_support();
        (lo.max(self.window.0), hi.min(self.window.1))
    }

    fn is_zero(&self) -> bool {
        let (lo, hi) = self.radial_support();
        self.inner.is_zero() || lo >= hi
    }

    fn take_error(&self) -> Option<Error> {
        self.inner.take_error()
    }
}

/// A radial profile given by a closure, mainly for tests and oracles.
pub struct RadialFn<F> {
    pub n: usize,
    pub f: F,
    pub breakpoints: Vec<f64>,
    pub support: (f64, f64),
}

impl<F: Fn(f64) -> f64> RadialFn<F> {
    pub fn new(n: usize, f: F) -> Self {
        RadialFn {
            n,
            f,
            breakpoints: Vec::new(),
            support: (0.0, f64::INFINITY),
        }
    }

    pub fn with_breakpoints(mut self, bps: Vec<f64>) -> Self {
        self.breakpoints = bps;
        self
    }

    pub fn with_support(mut self, lo: f64, hi: f64) -> Self {
        self.support = (lo, hi);
        self
    }
}

impl<F: Fn(f64) -> f64> RadialFunction for RadialFn<F> {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, r: f64) -> f64 {
        (self.f)(r)
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.breakpoints.clone()
    }

    fn radial_support(&self) -> (f64, f64) {
        self.support
    }
}
