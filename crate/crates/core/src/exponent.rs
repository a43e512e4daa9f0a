//! Radial variable exponents `q(·)`, `α(·)`, `β(·)`, `γ(·)` and the
//! admissibility conditions imposed on them.
//!
//! An [`ExponentField`] is a closed-form [`ExponentForm`] together with the
//! spatial dimension and cached bounds. Bounds of the primitive forms are
//! derived analytically (every primitive is monotone in `|x|`); bounds of
//! composite forms (conjugate, Sobolev exponent, weight exponent) are
//! recomputed from the composite by dense sampling plus golden-section
//! refinement.

use std::f64::consts::E;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Slack used when comparing an exponent against its limit at infinity.
pub const MINIMAL_AT_INFINITY_TOL: f64 = 1e-12;

const SAMPLES_PER_SEGMENT: usize = 2048;
const SAMPLE_R_MIN: f64 = 1e-15;
const SAMPLE_R_MAX: f64 = 1e15;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "form", rename_all = "snake_case", deny_unknown_fields)]
pub enum ExponentForm {
    Constant {
        c: f64,
    },
    /// `c_inf + a / ln(e + |x|)`.
    RadialLog {
        c_inf: f64,
        a: f64,
    },
    /// `c0 + a / ln(e + 1/|x|)` for `|x| < 1`, continued by its value at
    /// `|x| = 1` outside the unit ball.
    RadialOriginLog {
        c0: f64,
        a: f64,
    },
    /// `c0 + slope·|x|`; mostly useful as a piece of a piecewise field.
    RadialLinear {
        c0: f64,
        slope: f64,
    },
    /// Piece `i` applies on `[breakpoints[i-1], breakpoints[i])`.
    PiecewiseRadial {
        breakpoints: Vec<f64>,
        pieces: Vec<ExponentForm>,
    },
    /// Pointwise `q/(q-1)`.
    Conjugate {
        of: Box<ExponentForm>,
    },
    /// `1/q2 = 1/q1 - β/n`.
    Sobolev {
        q1: Box<ExponentForm>,
        beta: Box<ExponentForm>,
    },
    /// `c_inf · β · (1 - β/n)`.
    GammaWeight {
        beta: Box<ExponentForm>,
        c_inf: f64,
    },
}

fn origin_log_tail(c0: f64, a: f64) -> f64 {
    c0 + a / (E + 1.0).ln()
}

impl ExponentForm {
    /// Value at radius `r >= 0`; `r = ∞` gives the limit when it exists.
    pub fn radial(&self, r: f64, n: usize) -> f64 {
        match self {
            ExponentForm::Constant { c } => *c,
            ExponentForm::RadialLog { c_inf, a } => {
                if r.is_infinite() {
                    *c_inf
                } else {
                    c_inf + a / (E + r).ln()
                }
            }
            ExponentForm::RadialOriginLog { c0, a } => {
                if r >= 1.0 {
                    origin_log_tail(*c0, *a)
                } else if r == 0.0 {
                    *c0
                } else {
                    c0 + a / (E + 1.0 / r).ln()
                }
            }
            ExponentForm::RadialLinear { c0, slope } => {
                if r.is_infinite() {
                    if *slope == 0.0 {
                        *c0
                    } else {
                        slope.signum() * f64::INFINITY
                    }
                } else {
                    c0 + slope * r
                }
            }
            ExponentForm::PiecewiseRadial {
                breakpoints,
                pieces,
            } => {
                let idx = breakpoints.partition_point(|&b| b <= r);
                pieces[idx].radial(r, n)
            }
            ExponentForm::Conjugate { of } => {
                let q = of.radial(r, n);
                if q.is_infinite() {
                    1.0
                } else {
                    q / (q - 1.0)
                }
            }
            ExponentForm::Sobolev { q1, beta } => {
                sobolev_value(q1.radial(r, n), beta.radial(r, n), n)
            }
            ExponentForm::GammaWeight { beta, c_inf } => {
                let b = beta.radial(r, n);
                c_inf * b * (1.0 - b / n as f64)
            }
        }
    }

    /// `lim_{|x|→∞}`, if the form has a finite radial limit.
    pub fn limit(&self, n: usize) -> Option<f64> {
        match self {
            ExponentForm::RadialLinear { slope, .. } if *slope != 0.0 => None,
            ExponentForm::PiecewiseRadial { pieces, .. } => pieces.last()?.limit(n),
            ExponentForm::Conjugate { of } => of.limit(n).map(|q| q / (q - 1.0)),
            ExponentForm::Sobolev { q1, beta } => {
                let v = sobolev_value(q1.limit(n)?, beta.limit(n)?, n);
                v.is_finite().then_some(v)
            }
            ExponentForm::GammaWeight { beta, c_inf } => {
                let b = beta.limit(n)?;
                Some(c_inf * b * (1.0 - b / n as f64))
            }
            other => Some(other.radial(f64::INFINITY, n)),
        }
    }

    /// Radii where the form is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            ExponentForm::RadialOriginLog { .. } => out.push(1.0),
            ExponentForm::PiecewiseRadial {
                breakpoints,
                pieces,
            } => {
                out.extend_from_slice(breakpoints);
                for p in pieces {
                    p.collect_breakpoints(out);
                }
            }
            ExponentForm::Conjugate { of } => of.collect_breakpoints(out),
            ExponentForm::Sobolev { q1, beta } => {
                q1.collect_breakpoints(out);
                beta.collect_breakpoints(out);
            }
            ExponentForm::GammaWeight { beta, .. } => beta.collect_breakpoints(out),
            _ => {}
        }
    }

    fn validate(&self) -> Result<()> {
        let finite = |name: &str, v: f64| {
            if v.is_finite() {
                Ok(())
            } else {
                Err(Error::config(format!(
                    "exponent parameter `{name}` must be finite"
                )))
            }
        };
        match self {
            ExponentForm::Constant { c } => finite("c", *c),
            ExponentForm::RadialLog { c_inf, a } => {
                finite("c_inf", *c_inf)?;
                finite("a", *a)
            }
            ExponentForm::RadialOriginLog { c0, a } => {
                finite("c0", *c0)?;
                finite("a", *a)
            }
            ExponentForm::RadialLinear { c0, slope } => {
                finite("c0", *c0)?;
                finite("slope", *slope)
            }
            ExponentForm::PiecewiseRadial {
                breakpoints,
                pieces,
            } => {
                if pieces.len() != breakpoints.len() + 1 {
                    return Err(Error::config(format!(
                        "piecewise_radial needs {} pieces for {} breakpoints, got {}",
                        breakpoints.len() + 1,
                        breakpoints.len(),
                        pieces.len()
                    )));
                }
                if breakpoints.iter().any(|b| !(b.is_finite() && *b > 0.0)) {
                    return Err(Error::config(
                        "piecewise_radial breakpoints must be positive and finite",
                    ));
                }
                if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
                    return Err(Error::config(
                        "piecewise_radial breakpoints overlap (must be strictly increasing)",
                    ));
                }
                pieces.iter().try_for_each(ExponentForm::validate)
            }
            ExponentForm::Conjugate { of } => of.validate(),
            ExponentForm::Sobolev { q1, beta } => {
                q1.validate()?;
                beta.validate()
            }
            ExponentForm::GammaWeight { beta, c_inf } => {
                finite("c_inf", *c_inf)?;
                beta.validate()
            }
        }
    }

    fn is_primitive(&self) -> bool {
        matches!(
            self,
            ExponentForm::Constant { .. }
                | ExponentForm::RadialLog { .. }
                | ExponentForm::RadialOriginLog { .. }
                | ExponentForm::RadialLinear { .. }
        )
    }

    /// `(inf, sup)` over radii in `[lo, hi]`, `hi` possibly infinite.
    fn range_on(&self, lo: f64, hi: f64, n: usize) -> (f64, f64) {
        if self.is_primitive() {
            // every primitive is monotone in the radius
            let a = self.radial(lo, n);
            let b = self.radial(hi, n);
            return (a.min(b), a.max(b));
        }
        if let ExponentForm::PiecewiseRadial {
            breakpoints,
            pieces,
        } = self
        {
            let mut acc = (f64::INFINITY, f64::NEG_INFINITY);
            let mut start = 0.0_f64;
            for (i, piece) in pieces.iter().enumerate() {
                let end = breakpoints.get(i).copied().unwrap_or(f64::INFINITY);
                let (a, b) = (start.max(lo), end.min(hi));
                if a <= b && !(a == b && end <= lo) {
                    let (pl, ph) = piece.range_on(a, b, n);
                    acc = (acc.0.min(pl), acc.1.max(ph));
                }
                start = end;
            }
            return acc;
        }
        sampled_range(
            &|r| self.radial(r, n),
            lo,
            hi,
            self.limit(n),
            &self.breakpoints(),
        )
    }
}

fn sobolev_value(q1: f64, beta: f64, n: usize) -> f64 {
    let inv = 1.0 / q1 - beta / n as f64;
    if inv <= 0.0 {
        f64::INFINITY
    } else {
        1.0 / inv
    }
}

/// Infimum and supremum of a radial function over `[lo, hi]` from a dense
/// logarithmic sample refined by golden-section search around the extremal
/// samples. Breakpoints split the sampling into smooth segments.
pub(crate) fn sampled_range(
    f: &dyn Fn(f64) -> f64,
    lo: f64,
    hi: f64,
    limit: Option<f64>,
    breakpoints: &[f64],
) -> (f64, f64) {
    let mut edges = vec![lo];
    edges.extend(breakpoints.iter().copied().filter(|&b| b > lo && b < hi));
    edges.push(hi);

    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    let mut take = |v: f64| {
        if !v.is_nan() {
            min = min.min(v);
            max = max.max(v);
        }
    };
    if hi.is_infinite() {
        match limit {
            Some(l) => take(l),
            None => take(f(f64::INFINITY)),
        }
    }
    for seg in edges.windows(2) {
        let (a, b) = (seg[0], seg[1]);
        take(f(a));
        if b.is_finite() {
            take(f(b));
        }
        let sa = a.max(SAMPLE_R_MIN);
        let sb = b.min(SAMPLE_R_MAX);
        if sa >= sb {
            continue;
        }
        let (la, lb) = (sa.ln(), sb.ln());
        let xs: Vec<f64> = (0..=SAMPLES_PER_SEGMENT)
            .map(|i| la + (lb - la) * i as f64 / SAMPLES_PER_SEGMENT as f64)
            .collect();
        let vals: Vec<f64> = xs.iter().map(|&x| f(x.exp())).collect();
        vals.iter().for_each(|&v| take(v));
        let g = |x: f64| f(x.exp());
        let imin = argext(&vals, |a, b| a < b);
        let imax = argext(&vals, |a, b| a > b);
        for (i, sign) in [(imin, 1.0), (imax, -1.0)] {
            let l = xs[i.saturating_sub(1)];
            let r = xs[(i + 1).min(xs.len() - 1)];
            let x = golden_min(&|x| sign * g(x), l, r);
            take(g(x));
        }
    }
    (min, max)
}

fn argext(vals: &[f64], better: impl Fn(f64, f64) -> bool) -> usize {
    let mut best = 0;
    for (i, &v) in vals.iter().enumerate() {
        if better(v, vals[best]) {
            best = i;
        }
    }
    best
}

fn golden_min(f: &dyn Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..80 {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = f(d);
        }
    }
    (a + b) / 2.0
}

/// A radial exponent function on `ℝⁿ` with cached bounds.
///
/// For order fields `β`, `ess_inf` is `β₀`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExponentField {
    form: ExponentForm,
    n: usize,
    ess_inf: f64,
    ess_sup: f64,
    value_at_origin: f64,
    limit_at_infinity: Option<f64>,
}

impl ExponentField {
    pub fn new(form: ExponentForm, n: usize) -> Result<Self> {
        if !(1..=3).contains(&n) {
            return Err(Error::config(format!(
                "dimension n must be 1, 2 or 3 (got {n})"
            )));
        }
        form.validate()?;
        let (ess_inf, ess_sup) = form.range_on(0.0, f64::INFINITY, n);
        Ok(ExponentField {
            value_at_origin: form.radial(0.0, n),
            limit_at_infinity: form.limit(n),
            form,
            n,
            ess_inf,
            ess_sup,
        })
    }

    pub fn constant(c: f64, n: usize) -> Result<Self> {
        Self::new(ExponentForm::Constant { c }, n)
    }

    pub fn radial_log(c_inf: f64, a: f64, n: usize) -> Result<Self> {
        Self::new(ExponentForm::RadialLog { c_inf, a }, n)
    }

    pub fn radial_origin_log(c0: f64, a: f64, n: usize) -> Result<Self> {
        Self::new(ExponentForm::RadialOriginLog { c0, a }, n)
    }

    pub fn radial_linear(c0: f64, slope: f64, n: usize) -> Result<Self> {
        Self::new(ExponentForm::RadialLinear { c0, slope }, n)
    }

    pub fn piecewise_radial(
        breakpoints: Vec<f64>,
        pieces: Vec<ExponentForm>,
        n: usize,
    ) -> Result<Self> {
        Self::new(
            ExponentForm::PiecewiseRadial {
                breakpoints,
                pieces,
            },
            n,
        )
    }

    pub fn form(&self) -> &ExponentForm {
        &self.form
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn ess_inf(&self) -> f64 {
        self.ess_inf
    }

    pub fn ess_sup(&self) -> f64 {
        self.ess_sup
    }

    pub fn value_at_origin(&self) -> f64 {
        self.value_at_origin
    }

    pub fn limit_at_infinity(&self) -> Option<f64> {
        self.limit_at_infinity
    }

    pub fn is_constant(&self) -> bool {
        self.ess_inf == self.ess_sup
    }

    /// Value at the point `x ∈ ℝⁿ`.
    pub fn value(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.n {
            return Err(Error::config(format!(
                "point has {} coordinates, field lives in dimension {}",
                x.len(),
                self.n
            )));
        }
        Ok(self.radial(x.iter().map(|c| c * c).sum::<f64>().sqrt()))
    }

    #[inline]
    pub fn radial(&self, r: f64) -> f64 {
        self.form.radial(r, self.n)
    }

    pub fn breakpoints(&self) -> Vec<f64> {
        self.form.breakpoints()
    }

    /// Pointwise conjugate `q' = q/(q-1)`; requires `q₋ > 1`.
    pub fn conjugate(&self) -> Result<ExponentField> {
        if !(self.ess_inf > 1.0) {
            return Err(Error::domain(format!(
                "conjugate exponent undefined: ess inf q = {} <= 1",
                self.ess_inf
            )));
        }
        let conj = |q: f64| if q.is_infinite() { 1.0 } else { q / (q - 1.0) };
        Ok(ExponentField {
            form: ExponentForm::Conjugate {
                of: Box::new(self.form.clone()),
            },
            n: self.n,
            ess_inf: conj(self.ess_sup),
            ess_sup: conj(self.ess_inf),
            value_at_origin: conj(self.value_at_origin),
            limit_at_infinity: self.limit_at_infinity.map(conj),
        })
    }

    /// `(1 + |x|)^{-γ(x)}` with `self` playing the role of `γ`.
    #[inline]
    pub fn weight(&self, r: f64) -> f64 {
        let g = self.radial(r);
        if g == 0.0 {
            1.0
        } else {
            (-g * r.ln_1p()).exp()
        }
    }

    /// Infimum and supremum over all radii of `self(r)·other(r)`.
    pub fn product_range(&self, other: &ExponentField) -> (f64, f64) {
        let mut bps = self.breakpoints();
        bps.extend(other.breakpoints());
        bps.sort_by(f64::total_cmp);
        let limit = match (self.limit_at_infinity, other.limit_at_infinity) {
            (Some(a), Some(b)) => Some(a * b),
            _ => None,
        };
        sampled_range(
            &|r| self.radial(r) * other.radial(r),
            0.0,
            f64::INFINITY,
            limit,
            &bps,
        )
    }
}

impl Serialize for ExponentField {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let mut value = serde_json::to_value(&self.form).map_err(serde::ser::Error::custom)?;
        if let Some(map) = value.as_object_mut() {
            map.insert("n".into(), self.n.into());
        }
        value.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ExponentField {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let mut value = serde_json::Value::deserialize(deserializer)?;
        let map = value
            .as_object_mut()
            .ok_or_else(|| D::Error::custom("exponent field must be a JSON object"))?;
        let n = map
            .remove("n")
            .ok_or_else(|| D::Error::missing_field("n"))?
            .as_u64()
            .ok_or_else(|| D::Error::custom("`n` must be a positive integer"))?
            as usize;
        let form: ExponentForm = serde_json::from_value(value).map_err(D::Error::custom)?;
        ExponentField::new(form, n).map_err(D::Error::custom)
    }
}

/// `1/q₂ = 1/q₁ − β/n`; requires `q₁(x)·β(x) < n` everywhere.
pub fn sobolev_exponent(q1: &ExponentField, beta: &ExponentField) -> Result<ExponentField> {
    if q1.n != beta.n {
        return Err(Error::config("q1 and beta live in different dimensions"));
    }
    let n = q1.n as f64;
    let mut probes = ProbeGrid::default().radii();
    probes.extend([0.0, f64::INFINITY]);
    probes.extend(q1.breakpoints());
    probes.extend(beta.breakpoints());
    for r in probes {
        let (q, b) = if r.is_infinite() {
            match (q1.limit_at_infinity, beta.limit_at_infinity) {
                (Some(q), Some(b)) => (q, b),
                _ => continue,
            }
        } else {
            (q1.radial(r), beta.radial(r))
        };
        if !(q * b < n) {
            return Err(Error::Admissibility(format!(
                "q1·beta = {} >= n = {} at |x| = {r}",
                q * b,
                n
            )));
        }
    }
    let (_, sup_prod) = q1.product_range(beta);
    if !(sup_prod < n) {
        return Err(Error::Admissibility(format!(
            "sup q1·beta = {sup_prod} >= n = {n}"
        )));
    }
    ExponentField::new(
        ExponentForm::Sobolev {
            q1: Box::new(q1.form.clone()),
            beta: Box::new(beta.form.clone()),
        },
        q1.n,
    )
}

/// `γ(x) = C∞·β(x)·(1 − β(x)/n)`, never above `n·C∞/4`.
pub fn gamma_weight_exponent(beta: &ExponentField, c_inf: f64) -> Result<ExponentField> {
    let n = beta.n as f64;
    if !(c_inf >= 0.0 && c_inf.is_finite()) {
        return Err(Error::Admissibility(format!(
            "C_inf must be finite and >= 0 (got {c_inf})"
        )));
    }
    if !(beta.ess_inf >= 0.0 && beta.ess_sup < n) {
        return Err(Error::Admissibility(format!(
            "beta must satisfy 0 <= beta < n (range [{}, {}], n = {n})",
            beta.ess_inf, beta.ess_sup
        )));
    }
    let gamma = ExponentField::new(
        ExponentForm::GammaWeight {
            beta: Box::new(beta.form.clone()),
            c_inf,
        },
        beta.n,
    )?;
    let cap = n / 4.0 * c_inf;
    if gamma.ess_sup > cap * (1.0 + 1e-12) + 1e-15 {
        return Err(Error::Admissibility(format!(
            "weight exponent {} exceeds n·C_inf/4 = {cap}",
            gamma.ess_sup
        )));
    }
    Ok(gamma)
}

/// Logarithmically spaced probe radii `10^(lo_exp + i/per_decade)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProbeGrid {
    pub lo_exp: i32,
    pub hi_exp: i32,
    pub per_decade: usize,
}

impl Default for ProbeGrid {
    fn default() -> Self {
        ProbeGrid {
            lo_exp: -8,
            hi_exp: 6,
            per_decade: 512,
        }
    }
}

impl ProbeGrid {
    pub fn new(lo_exp: i32, hi_exp: i32, per_decade: usize) -> Self {
        ProbeGrid {
            lo_exp,
            hi_exp,
            per_decade,
        }
    }

    pub fn len(&self) -> usize {
        if self.per_decade == 0 || self.hi_exp < self.lo_exp {
            0
        } else {
            (self.hi_exp - self.lo_exp) as usize * self.per_decade + 1
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Doubling `per_decade` keeps every existing probe radius bit-exact.
    pub fn refined(&self) -> Self {
        ProbeGrid {
            per_decade: self.per_decade * 2,
            ..*self
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        let m = self.per_decade as f64;
        (0..self.len())
            .map(|i| 10f64.powf(self.lo_exp as f64 + i as f64 / m))
            .collect()
    }

    fn min_radius(&self) -> f64 {
        10f64.powi(self.lo_exp)
    }

    fn max_radius(&self) -> f64 {
        10f64.powi(self.hi_exp)
    }
}

/// Empirical log-Hölder constant over a probe grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogHolderEstimate {
    pub constant: f64,
    pub worst_radius: f64,
    pub grid_size: usize,
}

fn sup_over_grid(grid: &ProbeGrid, f: impl Fn(f64) -> f64) -> LogHolderEstimate {
    let mut best = LogHolderEstimate {
        constant: 0.0,
        worst_radius: f64::NAN,
        grid_size: grid.len(),
    };
    for r in grid.radii() {
        let v = f(r);
        if v > best.constant || best.worst_radius.is_nan() {
            best.constant = best.constant.max(v);
            best.worst_radius = r;
        }
    }
    best
}

/// `max |v(x) − v(0)|·ln(e + 1/|x|)` over the grid.
pub fn estimate_log_holder_origin(
    field: &ExponentField,
    grid: &ProbeGrid,
) -> Result<LogHolderEstimate> {
    if grid.is_empty() {
        return Err(Error::config("probe grid is empty"));
    }
    if grid.min_radius() > 1e-8 || grid.max_radius() < 1.0 {
        return Err(Error::config(
            "origin probe grid must span at least [1e-8, 1]",
        ));
    }
    let v0 = field.value_at_origin;
    Ok(sup_over_grid(grid, |r| {
        (field.radial(r) - v0).abs() * (E + 1.0 / r).ln()
    }))
}

/// `max |v(x) − v(∞)|·ln(e + |x|)` over the grid.
pub fn estimate_log_holder_infinity(
    field: &ExponentField,
    grid: &ProbeGrid,
) -> Result<LogHolderEstimate> {
    let limit = field
        .limit_at_infinity
        .ok_or_else(|| Error::domain("field has no limit at infinity"))?;
    if grid.is_empty() {
        return Err(Error::config("probe grid is empty"));
    }
    if grid.min_radius() > 1.0 || grid.max_radius() < 1e6 {
        return Err(Error::config(
            "infinity probe grid must span at least [1, 1e6]",
        ));
    }
    Ok(sup_over_grid(grid, |r| {
        (field.radial(r) - limit).abs() * (E + r).ln()
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaAdmissibility {
    pub beta0: f64,
    pub beta0_positive: bool,
    pub sup_q1_beta: f64,
    pub sup_q1_beta_below_n: bool,
    pub sup_q1_inf_beta: f64,
    pub sup_q1_inf_beta_below_n: bool,
}

impl BetaAdmissibility {
    pub fn holds(&self) -> bool {
        self.beta0_positive && self.sup_q1_beta_below_n && self.sup_q1_inf_beta_below_n
    }
}

/// `β₀ > 0`, `sup q₁β < n` and `sup q₁(∞)β < n`, each checked independently.
pub fn check_beta_admissible(
    beta: &ExponentField,
    q1: &ExponentField,
) -> Result<BetaAdmissibility> {
    if beta.n != q1.n {
        return Err(Error::config("beta and q1 live in different dimensions"));
    }
    let n = beta.n as f64;
    let (_, sup_q1_beta) = q1.product_range(beta);
    let sup_q1_inf_beta = match q1.limit_at_infinity {
        Some(qi) => qi * beta.ess_sup,
        None => f64::INFINITY,
    };
    Ok(BetaAdmissibility {
        beta0: beta.ess_inf,
        beta0_positive: beta.ess_inf > 0.0,
        sup_q1_beta,
        sup_q1_beta_below_n: sup_q1_beta < n,
        sup_q1_inf_beta,
        sup_q1_inf_beta_below_n: sup_q1_inf_beta < n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MinimalAtInfinity {
    pub holds: bool,
    pub limit: f64,
    /// `min over the grid of q(x) − q(∞)`.
    pub min_excess: f64,
    pub witness_radius: f64,
}

/// `1 < q(∞) ≤ q(x) ≤ q₊ < ∞` on the probe grid.
pub fn check_minimal_at_infinity(q: &ExponentField, grid: &ProbeGrid) -> Result<MinimalAtInfinity> {
    let limit = q
        .limit_at_infinity
        .ok_or_else(|| Error::domain("field has no limit at infinity"))?;
    let mut min_excess = f64::INFINITY;
    let mut witness_radius = f64::NAN;
    for r in std::iter::once(0.0).chain(grid.radii()) {
        let ex = q.radial(r) - limit;
        if ex < min_excess {
            min_excess = ex;
            witness_radius = r;
        }
    }
    Ok(MinimalAtInfinity {
        holds: limit > 1.0 && min_excess >= -MINIMAL_AT_INFINITY_TOL && q.ess_sup.is_finite(),
        limit,
        min_excess,
        witness_radius,
    })
}
