use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::lemmas::{fit_delta, measured_c_inf};
use super::report::{ExperimentReport, Measurement, Status, Verdict};
use super::{config_value, par_map, DyadicRange, FunctionFamily};
use crate::error::{Error, Result};
use crate::exponent::{
    check_beta_admissible, check_minimal_at_infinity, estimate_log_holder_infinity,
    estimate_log_holder_origin, gamma_weight_exponent, sobolev_exponent, ExponentField, ProbeGrid,
};
use crate::function::RadialFunction;
use crate::norms::{herz_morrey_norm, luxemburg_norm};
use crate::operators::{OperatorImage, OperatorKind};
use crate::quad::QuadratureSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TheoremKind {
    /// `𝓗_β` on Herz–Morrey spaces.
    Hardy,
    /// `𝓗*_β` on Herz–Morrey spaces.
    HardyStar,
    /// `I_β` from `L^{q₁}` to `L^{q₂}`.
    Riesz,
}

impl TheoremKind {
    pub fn id(self) -> &'static str {
        match self {
            TheoremKind::Hardy => "theorem_ratio:hardy",
            TheoremKind::HardyStar => "theorem_ratio:hardy_star",
            TheoremKind::Riesz => "theorem_ratio:riesz",
        }
    }

    fn operator(self) -> OperatorKind {
        match self {
            TheoremKind::Hardy => OperatorKind::Hardy,
            TheoremKind::HardyStar => OperatorKind::HardyStar,
            TheoremKind::Riesz => OperatorKind::Riesz,
        }
    }
}

fn default_stabilization() -> f64 {
    0.05
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TheoremInputs {
    pub family: FunctionFamily,
    pub q1: ExponentField,
    pub beta: ExponentField,
    /// Herz–Morrey parameters; required for the Hardy kinds, unused for
    /// the Riesz potential.
    #[serde(default)]
    pub alpha: Option<ExponentField>,
    #[serde(default)]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub p1: Option<f64>,
    #[serde(default)]
    pub p2: Option<f64>,
    /// Log-Hölder constant at infinity of `q1`; measured when absent.
    #[serde(default)]
    pub c_inf: Option<f64>,
    /// Run even when a gate fails; the verdict is then withheld.
    #[serde(default)]
    pub exploratory: bool,
    /// Radii for the `δ` fit.
    #[serde(default)]
    pub delta_radii: DyadicRange,
    /// Largest admissible relative growth of the running sup over the last
    /// half of the family.
    #[serde(default = "default_stabilization")]
    pub stabilization: f64,
    #[serde(default)]
    pub spec: QuadratureSpec,
}

struct HerzParams<'a> {
    alpha: &'a ExponentField,
    lambda: f64,
    p1: f64,
    p2: f64,
}

fn herz_params(inputs: &TheoremInputs) -> Result<HerzParams<'_>> {
    match (&inputs.alpha, inputs.lambda, inputs.p1, inputs.p2) {
        (Some(alpha), Some(lambda), Some(p1), Some(p2)) => Ok(HerzParams {
            alpha,
            lambda,
            p1,
            p2,
        }),
        _ => Err(Error::config(
            "alpha, lambda, p1 and p2 are required for the Hardy experiments",
        )),
    }
}

/// Preconditions of the boundedness statements. Each failed check adds a
/// reason; `derived` receives the measured quantities behind them.
fn gates(
    kind: TheoremKind,
    inputs: &TheoremInputs,
    q2: Option<&ExponentField>,
    derived: &mut BTreeMap<String, f64>,
) -> Result<Vec<String>> {
    let mut failed = Vec::new();
    let grid = ProbeGrid::default();
    let adm = check_beta_admissible(&inputs.beta, &inputs.q1)?;
    if !adm.beta0_positive {
        failed.push(format!("beta_0 = {} is not positive", adm.beta0));
    }
    if !adm.sup_q1_beta_below_n {
        failed.push(format!("sup q1*beta = {} is not below n", adm.sup_q1_beta));
    }
    if !adm.sup_q1_inf_beta_below_n {
        failed.push(format!(
            "sup q1(inf)*beta = {} is not below n",
            adm.sup_q1_inf_beta
        ));
    }
    let minimal = check_minimal_at_infinity(&inputs.q1, &grid)?;
    if !minimal.holds {
        failed.push(format!(
            "q1 is not minimal at infinity (q1(inf) = {}, min excess {} at |x| = {})",
            minimal.limit, minimal.min_excess, minimal.witness_radius
        ));
    }
    if kind == TheoremKind::Riesz {
        return Ok(failed);
    }
    let hp = herz_params(inputs)?;
    let n = inputs.q1.dim() as f64;
    if !(hp.lambda >= 0.0) {
        failed.push(format!("lambda = {} is negative", hp.lambda));
    }
    if !(hp.p1 > 0.0 && hp.p1 <= hp.p2) {
        failed.push(format!(
            "need 0 < p1 <= p2 (p1 = {}, p2 = {})",
            hp.p1, hp.p2
        ));
    }
    let alpha_origin = estimate_log_holder_origin(hp.alpha, &grid)?.constant;
    derived.insert("alpha_log_holder_origin".into(), alpha_origin);
    if !alpha_origin.is_finite() {
        failed.push("alpha is not log-Hoelder continuous at the origin".into());
    }
    let Some(a_inf) = hp.alpha.limit_at_infinity() else {
        failed.push("alpha has no limit at infinity".into());
        return Ok(failed);
    };
    let alpha_infinity = estimate_log_holder_infinity(hp.alpha, &grid)?.constant;
    derived.insert("alpha_log_holder_infinity".into(), alpha_infinity);
    if !alpha_infinity.is_finite() {
        failed.push("alpha is not log-Hoelder continuous at infinity".into());
    }
    let a0 = hp.alpha.value_at_origin();
    if !(a0 <= a_inf) {
        failed.push(format!("alpha(0) = {a0} exceeds alpha_inf = {a_inf}"));
    }
    let (field, inv_plus) = match kind {
        TheoremKind::Hardy => {
            let q1c = inputs.q1.conjugate()?;
            let inv = 1.0 / q1c.ess_sup();
            (q1c, inv)
        }
        _ => match q2 {
            Some(q2) => (q2.clone(), 1.0 / q2.ess_sup()),
            None => return Ok(failed),
        },
    };
    let delta = fit_delta(&field, &inputs.delta_radii, &inputs.spec)?.delta;
    derived.insert("delta".into(), delta);
    derived.insert("delta_range_margin".into(), inv_plus - delta);
    match kind {
        TheoremKind::Hardy => {
            let margin = hp.lambda + n * delta - a_inf;
            derived.insert("gate_margin".into(), margin);
            if !(margin > 0.0) {
                failed.push(format!(
                    "alpha_inf = {a_inf} is not below lambda + n*delta1 = {}",
                    hp.lambda + n * delta
                ));
            }
        }
        _ => {
            let margin = a0 - (hp.lambda - n * delta);
            derived.insert("gate_margin".into(), margin);
            if !(margin > 0.0) {
                failed.push(format!(
                    "alpha(0) = {a0} is not above lambda - n*delta2 = {}",
                    hp.lambda - n * delta
                ));
            }
        }
    }
    Ok(failed)
}

fn member_ratio(
    kind: TheoremKind,
    inputs: &TheoremInputs,
    f: &crate::function::TestFunction,
    q2: &ExponentField,
    gamma: &ExponentField,
) -> Result<(f64, f64)> {
    let spec = &inputs.spec;
    let image = OperatorImage::new(kind.operator(), f.clone(), inputs.beta.clone(), *spec)?
        .apply_weight(gamma);
    let (lhs, rhs) = match kind {
        TheoremKind::Riesz => (
            luxemburg_norm(&image, q2, spec),
            luxemburg_norm(f, &inputs.q1, spec)?,
        ),
        _ => {
            let hp = herz_params(inputs)?;
            (
                herz_morrey_norm(&image, hp.alpha, hp.lambda, hp.p2, q2, spec),
                herz_morrey_norm(f, hp.alpha, hp.lambda, hp.p1, &inputs.q1, spec)?,
            )
        }
    };
    if let Some(e) = image.take_error() {
        return Err(e);
    }
    match lhs {
        Ok(v) => Ok((v.value, rhs.value)),
        Err(Error::Divergence(_)) => Ok((f64::INFINITY, rhs.value)),
        Err(e) => Err(e),
    }
}

pub fn theorem_ratio(kind: TheoremKind, inputs: &TheoremInputs) -> Result<ExperimentReport> {
    let spec = &inputs.spec;
    spec.validate()?;
    // an inadmissible β leaves q₂ or γ undefined: that is a gate violation
    let admissible = |r: Result<ExponentField>, failed: &mut Vec<String>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Admissibility(msg)) => {
            failed.push(msg);
            Ok(None)
        }
        Err(e) => Err(e),
    };
    let mut undefined = Vec::new();
    let q2 = admissible(sobolev_exponent(&inputs.q1, &inputs.beta), &mut undefined)?;
    let c_inf = match inputs.c_inf {
        Some(c) => c,
        None => measured_c_inf(&inputs.q1)?,
    };
    let gamma = admissible(gamma_weight_exponent(&inputs.beta, c_inf), &mut undefined)?;
    let mut derived = BTreeMap::from([("c_inf".to_string(), c_inf)]);
    if let Some(g) = &gamma {
        derived.insert("gamma_sup".into(), g.ess_sup());
    }
    let mut failed = gates(kind, inputs, q2.as_ref(), &mut derived)?;
    failed.extend(undefined.iter().cloned());
    let seed = inputs.family.seed;
    let rule = "sup ratio finite and running sup grows < stabilization over the last half";
    if !failed.is_empty() && !inputs.exploratory {
        let mut verdict =
            Verdict::new(false, Some(inputs.stabilization), rule).because("gate violation");
        verdict.reasons.extend(failed);
        return Ok(ExperimentReport::new(
            kind.id(),
            seed,
            config_value(inputs),
            Vec::new(),
            verdict,
            derived,
        ));
    }

    let (Some(q2), Some(gamma)) = (q2, gamma) else {
        return Err(Error::Admissibility(undefined.join("; ")));
    };

    let members = inputs.family.members()?;
    let n = inputs.q1.dim();
    if members.iter().any(|m| m.function.dim() != n) {
        return Err(Error::config(
            "family members must live in the dimension of q1",
        ));
    }
    let measurements = par_map(&members, |m| {
        if m.function.is_zero() {
            return Ok(Measurement::skipped(&m.label, 0.0, 0.0, "zero member"));
        }
        let (lhs, rhs) = member_ratio(kind, inputs, &m.function, &q2, &gamma)?;
        let out = Measurement::new(&m.label, lhs, rhs);
        Ok(if lhs.is_infinite() {
            out.with_note("output norm diverges")
        } else {
            out
        })
    })?;

    // running sup at the midpoint vs. at the end
    let first_len = members.len() - members.len() / 2;
    let sup_of = |ms: &[Measurement]| {
        ms.iter()
            .filter_map(|m| m.ratio)
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let sup_half = sup_of(&measurements[..first_len]);
    let sup_all = sup_of(&measurements);
    let growth = if sup_half > 0.0 {
        (sup_all - sup_half) / sup_half
    } else {
        f64::NAN
    };
    derived.insert("sup_first_half".into(), sup_half);
    derived.insert("growth_last_half".into(), growth);
    let dil: Vec<f64> = members
        .iter()
        .zip(&measurements)
        .filter(|(m, _)| m.generator == "dilations")
        .filter_map(|(_, x)| x.ratio)
        .collect();
    if dil.len() >= 2 {
        let lo = dil.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = dil.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        derived.insert("dilation_spread".into(), hi / lo - 1.0);
    }

    let verdict = if !failed.is_empty() {
        let mut v = Verdict::new(false, Some(inputs.stabilization), rule)
            .because("exploratory run: gate violation");
        v.status = Status::Withheld;
        v.reasons.extend(failed);
        v
    } else if inputs.exploratory {
        let mut v =
            Verdict::new(false, Some(inputs.stabilization), rule).because("exploratory run");
        v.status = Status::Withheld;
        v
    } else {
        let finite = sup_all.is_finite();
        let stable = growth < inputs.stabilization;
        let mut v = Verdict::new(finite && stable, Some(inputs.stabilization), rule);
        if !finite {
            v = v.because("sup ratio is not finite");
        }
        if !stable {
            v = v.because(format!("running sup grew by {growth} over the last half"));
        }
        v
    };
    Ok(ExperimentReport::new(
        kind.id(),
        seed,
        config_value(inputs),
        measurements,
        verdict,
        derived,
    ))
}
