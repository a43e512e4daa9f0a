//! Numerical laboratory for variable-exponent function spaces.
//!
//! The crate evaluates Luxemburg norms on `L^{q(·)}(ℝⁿ)`, homogeneous
//! Herz-Morrey norms built from dyadic annuli, the variable-order fractional
//! Hardy operators and the Riesz-type potential, and turns the classical
//! inequalities relating them into reproducible numeric experiments.
//!
//! Everything is radial: exponent fields and test functions depend on `|x|`
//! only, so every integral reduces to an adaptive one-dimensional quadrature
//! in the radius (see [`quad`]).

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exponent;
pub mod function;
pub mod norms;
pub mod operators;
pub mod quad;
pub mod verify;

pub use error::{Error, Result};
pub use exponent::{ExponentField, ExponentForm, ProbeGrid};
pub use function::{Primitive, RadialFunction, Region, Term, TestFunction};
pub use norms::NormValue;
pub use operators::{OperatorImage, OperatorKind};
pub use quad::{IntegralValue, Integrand, QuadratureSpec};
