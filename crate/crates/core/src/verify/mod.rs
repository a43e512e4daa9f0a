//! Reproducible numeric experiments: each inequality becomes a list of
//! measured `(lhs, rhs, ratio)` cases, an empirical constant and a verdict.
//!
//! Experiments take a JSON `inputs` object (strict schema), fan the cases
//! out over a rayon pool and merge results in case order, so reports are
//! byte-identical regardless of thread count.

mod family;
mod lemmas;
mod report;
mod theorems;
mod utility;

use rayon::prelude::*;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};

pub use family::{FunctionFamily, Generator, Member, Order};
pub use lemmas::{
    block_estimate_check, case_estimate_check, fit_delta, holder_check, lemma2_delta_fit,
    lemma2_duality_check, weight_equivalence_check, BlockEstimateInputs, BlockKind,
    CaseEstimateInputs, DeltaFit, DeltaFitInputs, DualityInputs, HolderInputs,
    WeightEquivalenceInputs,
};
pub use report::{ratio_band, sup_ratio, ExperimentReport, Measurement, Status, Verdict};
pub use theorems::{theorem_ratio, TheoremInputs, TheoremKind};
pub use utility::{norm_report, operator_report, NormInputs, NormKind, OperatorInputs};

/// Inclusive range of dyadic exponents `lo..=hi`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DyadicRange {
    pub lo: i32,
    pub hi: i32,
}

impl Default for DyadicRange {
    fn default() -> Self {
        DyadicRange { lo: -10, hi: 10 }
    }
}

impl DyadicRange {
    pub fn new(lo: i32, hi: i32) -> Self {
        DyadicRange { lo, hi }
    }

    pub fn indices(&self) -> std::ops::RangeInclusive<i32> {
        self.lo..=self.hi
    }

    fn check(&self) -> Result<()> {
        if self.lo > self.hi {
            return Err(Error::config("dyadic range must satisfy lo <= hi"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub description: &'static str,
    pub anchor: &'static str,
}

const CATALOG: &[CatalogEntry] = &[
    CatalogEntry {
        id: "block_estimate_check",
        description: "per-annulus operator norms against the geometric block sums",
        anchor: "dyadic block estimates for H and H*",
    },
    CatalogEntry {
        id: "case_estimate_check",
        description: "single-block norms against the Herz-Morrey norm, both sides of the origin",
        anchor: "single-block case estimates",
    },
    CatalogEntry {
        id: "holder_check",
        description: "generalized Hoelder inequality with C_q = 1 + 1/q- - 1/q+",
        anchor: "generalized Hoelder inequality",
    },
    CatalogEntry {
        id: "lemma2_delta_fit",
        description: "fit of ||chi_S|| / ||chi_B|| <= C (|S|/|B|)^delta on nested balls",
        anchor: "ball-shrinking estimate",
    },
    CatalogEntry {
        id: "lemma2_duality_check",
        description: "band of |B|^-1 ||chi_B||_q ||chi_B||_q' over dyadic balls",
        anchor: "ball duality estimate",
    },
    CatalogEntry {
        id: "theorem_ratio:hardy",
        description: "weighted fractional Hardy operator on Herz-Morrey spaces",
        anchor: "Hardy operator boundedness on Herz-Morrey spaces",
    },
    CatalogEntry {
        id: "theorem_ratio:hardy_star",
        description: "weighted adjoint Hardy operator on Herz-Morrey spaces",
        anchor: "adjoint Hardy operator boundedness on Herz-Morrey spaces",
    },
    CatalogEntry {
        id: "theorem_ratio:riesz",
        description: "weighted Riesz-type potential from L^q1 to L^q2",
        anchor: "weighted Riesz potential boundedness",
    },
    CatalogEntry {
        id: "weight_equivalence_check",
        description: "(1+|x|)^-gamma(x) against (1+|x|)^-gamma_inf on a probe grid",
        anchor: "weight equivalence at infinity",
    },
];

/// The verification experiments, in lexicographic order.
pub fn catalog() -> &'static [CatalogEntry] {
    CATALOG
}

/// Ids accepted by [`run_experiment`] that compute a single quantity rather
/// than verify an inequality.
pub const UTILITIES: &[&str] = &["norm", "operator"];

fn parse<T: DeserializeOwned>(inputs: &Value) -> Result<T> {
    serde_json::from_value(inputs.clone()).map_err(|e| Error::config(format!("inputs: {e}")))
}

/// Run an experiment by id on a JSON `inputs` object.
pub fn run_experiment(id: &str, inputs: &Value) -> Result<ExperimentReport> {
    match id {
        "holder_check" => holder_check(&parse(inputs)?),
        "lemma2_delta_fit" => lemma2_delta_fit(&parse(inputs)?),
        "lemma2_duality_check" => lemma2_duality_check(&parse(inputs)?),
        "block_estimate_check" => block_estimate_check(&parse(inputs)?),
        "case_estimate_check" => case_estimate_check(&parse(inputs)?),
        "theorem_ratio:hardy" => theorem_ratio(TheoremKind::Hardy, &parse(inputs)?),
        "theorem_ratio:hardy_star" => theorem_ratio(TheoremKind::HardyStar, &parse(inputs)?),
        "theorem_ratio:riesz" => theorem_ratio(TheoremKind::Riesz, &parse(inputs)?),
        "weight_equivalence_check" => weight_equivalence_check(&parse(inputs)?),
        "norm" => norm_report(&parse(inputs)?),
        "operator" => operator_report(&parse(inputs)?),
        other => Err(Error::config(format!("unknown experiment `{other}`"))),
    }
}

/// Parse `inputs` against the schema of `id` without running anything.
pub fn validate_experiment(id: &str, inputs: &Value) -> Result<()> {
    let spec = match id {
        "holder_check" => parse::<HolderInputs>(inputs)?.spec,
        "lemma2_delta_fit" => parse::<DeltaFitInputs>(inputs)?.spec,
        "lemma2_duality_check" => parse::<DualityInputs>(inputs)?.spec,
        "block_estimate_check" => parse::<BlockEstimateInputs>(inputs)?.spec,
        "case_estimate_check" => parse::<CaseEstimateInputs>(inputs)?.spec,
        "theorem_ratio:hardy" | "theorem_ratio:hardy_star" | "theorem_ratio:riesz" => {
            parse::<TheoremInputs>(inputs)?.spec
        }
        "weight_equivalence_check" => {
            parse::<WeightEquivalenceInputs>(inputs)?;
            return Ok(());
        }
        "norm" => parse::<NormInputs>(inputs)?.spec,
        "operator" => parse::<OperatorInputs>(inputs)?.spec,
        other => return Err(Error::config(format!("unknown experiment `{other}`"))),
    };
    spec.validate()
}

pub fn is_known(id: &str) -> bool {
    CATALOG.iter().any(|e| e.id == id) || UTILITIES.contains(&id)
}

/// Ordered parallel map; the first error in input order wins.
pub(crate) fn par_map<T, U, F>(items: &[T], f: F) -> Result<Vec<U>>
where
    T: Sync,
    U: Send,
    F: Fn(&T) -> Result<U> + Sync + Send,
{
    let out: Vec<Result<U>> = items.par_iter().map(f).collect();
    out.into_iter().collect()
}

pub(crate) fn config_value<T: Serialize>(inputs: &T) -> Value {
    serde_json::to_value(inputs).expect("inputs are always serializable")
}
