//! Exact symbolic model of the cohomology of Hyperquot schemes on a smooth
//! projective curve.
//!
//! The cohomology of `FⁿQuot(V)` is modelled as a super-Fock module spanned by
//! commuting creation operators `a_k^(v)(γ)` acting on a vacuum. On top of
//! that module the crate provides annihilation operators via bracket
//! rewriting, multiplication by tautological Chern classes, the closed
//! Poincaré product formula, and a checker for the shifted-Yangian relations
//! that the model makes computable.

pub mod curve;
pub mod error;
pub mod fock;
pub mod linalg;
pub mod operators;
pub mod rational;
pub mod series;
pub mod yangian;

pub use curve::{BiClass, CurveClass, CurveRing};
pub use error::{Error, ParseError, Result};
pub use fock::{FockElement, GeneratorKey, ModelParams, Monomial};
pub use operators::{Model, OperatorExpr, Strategy};
pub use rational::Q;
pub use series::TruncSeries;
