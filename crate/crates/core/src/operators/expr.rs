//! Operator expressions and their evaluation.

use serde::{Deserialize, Serialize};

use super::Model;
use crate::error::{Error, ParseError, Result};
use crate::fock::FockElement;
use crate::rational::Q;

/// Abstract syntax of colored operators. Colors are basis indices.
///
/// `Compose` applies its factors right to left; the empty composition is
/// the identity.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op")]
pub enum OperatorExpr {
    A { k: usize, v: usize, c: usize },
    B { k: usize, j: usize, c: usize },
    ChernQuot { j: usize, t: usize, c: usize },
    ChernE { j: usize, t: usize, c: usize },
    M0 { t: usize, c: usize },
    Sum { terms: Vec<OperatorExpr> },
    Compose { factors: Vec<OperatorExpr> },
    Scale { coeff: Q, expr: Box<OperatorExpr> },
}

impl OperatorExpr {
    pub fn identity() -> Self {
        OperatorExpr::Compose { factors: Vec::new() }
    }

    pub fn compose(factors: Vec<OperatorExpr>) -> Self {
        OperatorExpr::Compose { factors }
    }

    pub fn scale(coeff: Q, expr: OperatorExpr) -> Self {
        OperatorExpr::Scale { coeff, expr: Box::new(expr) }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()).into())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("expression serializes")
    }
}

impl Model {
    /// Evaluates `expr` on `x`. Errors are wrapped with the path of the
    /// failing node, e.g. `$.factors[1].terms[0]`.
    pub fn evaluate(&self, expr: &OperatorExpr, x: &FockElement) -> Result<FockElement> {
        self.eval_at(expr, x, "$")
    }

    fn eval_at(&self, expr: &OperatorExpr, x: &FockElement, path: &str) -> Result<FockElement> {
        let wrap = |e: Error| match e {
            e @ Error::InExpr { .. } => e,
            e => Error::InExpr { path: path.to_string(), source: Box::new(e) },
        };
        let r = self.params.r;
        match expr {
            OperatorExpr::A { k, v, c } => self.apply_a(*k, *v, *c, x).map_err(wrap),
            OperatorExpr::B { k, j, c } => self.apply_b(*k, *j, *c, x).map_err(wrap),
            OperatorExpr::ChernQuot { j, t, c } => {
                if *t == 0 || *t > r {
                    return Err(wrap(Error::IndexOutOfRange(format!("ChernQuot degree {t} not in 1..={r}"))));
                }
                let gamma = self.color(*c).map_err(wrap)?;
                self.apply_chern_quot(*j, *t, &gamma, x).map_err(wrap)
            }
            OperatorExpr::ChernE { j, t, c } => {
                if *t > r {
                    return Err(wrap(Error::IndexOutOfRange(format!("ChernE degree {t} not in 0..={r}"))));
                }
                let gamma = self.color(*c).map_err(wrap)?;
                self.apply_chern_e(*j, *t, &gamma, x).map_err(wrap)
            }
            OperatorExpr::M0 { t, c } => {
                if *t > r {
                    return Err(wrap(Error::IndexOutOfRange(format!("M0 degree {t} not in 0..={r}"))));
                }
                let gamma = self.color(*c).map_err(wrap)?;
                self.apply_bundle(*t, &gamma, x).map_err(wrap)
            }
            OperatorExpr::Sum { terms } => {
                let mut out = FockElement::zero();
                for (i, t) in terms.iter().enumerate() {
                    out.add_scaled(&self.eval_at(t, x, &format!("{path}.terms[{i}]"))?, Q::one());
                }
                Ok(out)
            }
            OperatorExpr::Compose { factors } => {
                let mut acc = x.clone();
                for (i, f) in factors.iter().enumerate().rev() {
                    acc = self.eval_at(f, &acc, &format!("{path}.factors[{i}]"))?;
                }
                Ok(acc)
            }
            OperatorExpr::Scale { coeff, expr } => {
                if coeff.is_zero() {
                    return Ok(FockElement::zero());
                }
                Ok(self.eval_at(expr, x, &format!("{path}.expr"))?.scale(*coeff))
            }
        }
    }
}
