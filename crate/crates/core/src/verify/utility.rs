use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::report::{ExperimentReport, Measurement, Verdict};
use super::{config_value, par_map};
use crate::error::{Error, Result};
use crate::exponent::ExponentField;
use crate::function::{RadialFunction, TestFunction};
use crate::norms::{herz_morrey_norm, herz_morrey_norm_split, luxemburg_norm, weighted_norm};
use crate::operators::{hardy_radial, hardy_star_radial, riesz_radial, OperatorKind};
use crate::quad::QuadratureSpec;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum NormKind {
    #[default]
    Luxemburg,
    Weighted {
        gamma: ExponentField,
    },
    HerzMorrey {
        alpha: ExponentField,
        lambda: f64,
        p: f64,
    },
    HerzMorreySplit {
        alpha: ExponentField,
        lambda: f64,
        p: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormInputs {
    pub f: TestFunction,
    pub q: ExponentField,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default)]
    pub spec: QuadratureSpec,
}

/// A single norm; the measurement records `lhs = value`, `rhs = error
/// estimate`.
pub fn norm_report(inputs: &NormInputs) -> Result<ExperimentReport> {
    let (f, q, spec) = (&inputs.f, &inputs.q, &inputs.spec);
    let (label, v) = match &inputs.norm {
        NormKind::Luxemburg => ("luxemburg", luxemburg_norm(f, q, spec)?),
        NormKind::Weighted { gamma } => ("weighted", weighted_norm(f, gamma, q, spec)?),
        NormKind::HerzMorrey { alpha, lambda, p } => (
            "herz_morrey",
            herz_morrey_norm(f, alpha, *lambda, *p, q, spec)?,
        ),
        NormKind::HerzMorreySplit { alpha, lambda, p } => (
            "herz_morrey_split",
            herz_morrey_norm_split(f, alpha, *lambda, *p, q, spec)?,
        ),
    };
    let m = Measurement::skipped(
        label,
        v.value,
        v.err_estimate,
        "lhs = value, rhs = error estimate",
    );
    let mut derived = BTreeMap::from([
        ("value".to_string(), v.value),
        ("err_estimate".to_string(), v.err_estimate),
        ("iterations".to_string(), v.meta.iterations as f64),
        ("residual".to_string(), v.meta.residual),
        ("tail_bound".to_string(), v.meta.tail_bound),
    ]);
    if let Some(k0) = v.meta.k0 {
        derived.insert("k0".into(), k0 as f64);
    }
    Ok(ExperimentReport::new(
        "norm",
        0,
        config_value(inputs),
        vec![m],
        Verdict::new(true, None, "computed"),
        derived,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorInputs {
    pub kind: OperatorKind,
    pub f: TestFunction,
    pub beta: ExponentField,
    #[serde(default)]
    pub gamma: Option<ExponentField>,
    pub radii: Vec<f64>,
    #[serde(default)]
    pub spec: QuadratureSpec,
}

/// Pointwise values of `(1+|x|)^{−γ(x)} T f(x)` at the requested radii.
pub fn operator_report(inputs: &OperatorInputs) -> Result<ExperimentReport> {
    let (f, beta, spec) = (&inputs.f, &inputs.beta, &inputs.spec);
    spec.validate()?;
    if inputs.radii.is_empty() {
        return Err(Error::config("radii must not be empty"));
    }
    let measurements = par_map(&inputs.radii, |&r| {
        if !(r >= 0.0 && r.is_finite()) {
            return Err(Error::domain(format!(
                "radius {r} is not a finite non-negative number"
            )));
        }
        let v = match inputs.kind {
            OperatorKind::Identity => crate::quad::IntegralValue {
                value: f.value(r),
                err_estimate: 0.0,
                panels_used: 0,
            },
            _ if r == 0.0 && inputs.kind != OperatorKind::Riesz => {
                return Err(Error::domain("operator image is evaluated at x != 0 only"))
            }
            OperatorKind::Hardy => hardy_radial(f, beta, r, spec)?,
            OperatorKind::HardyStar => hardy_star_radial(f, beta, r, spec)?,
            OperatorKind::Riesz => riesz_radial(f, beta, r, spec)?,
        };
        let w = inputs.gamma.as_ref().map_or(1.0, |g| g.weight(r));
        Ok(Measurement::skipped(
            format!("|x|={r:e}"),
            v.value * w,
            v.err_estimate * w,
            "lhs = value, rhs = error estimate",
        ))
    })?;
    Ok(ExperimentReport::new(
        "operator",
        0,
        config_value(inputs),
        measurements,
        Verdict::new(true, None, "computed"),
        BTreeMap::new(),
    ))
}
