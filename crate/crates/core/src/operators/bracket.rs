//! The colored `[b, a]` bracket as an operator expression.

use std::collections::BTreeMap;

use super::{Model, OperatorExpr};
use crate::curve::{basis_parity, basis_product, omega_index, CurveClass};
use crate::error::{Error, Result};
use crate::rational::Q;

impl Model {
    /// The colored correction term `C` of
    /// `b_k^(j)(φ)·a_k^(i)(γ) = (-1)^{|γ||φ|} a_k^(i)(γ)·b_k^(j)(φ) + C`.
    /// Each `a^(s)(e')b^(t)(e'')` term of `Δ_*(γ·φ)` carries `(-1)^{|e'||e''|}`.
    pub fn bracket_ba(&self, k: usize, i: usize, j: usize, gamma: &CurveClass, phi: &CurveClass) -> Result<OperatorExpr> {
        self.check_layer(k)?;
        self.check_genus(gamma)?;
        self.check_genus(phi)?;
        let (g, r) = (self.genus(), self.params.r);
        if i >= r || j >= r {
            return Err(Error::IndexOutOfRange(format!("bracket indices ({i}, {j}) not in 0..{r}")));
        }
        let mut scalar = Q::zero();
        let mut ab: BTreeMap<(usize, usize, usize), Q> = BTreeMap::new();
        for (x, cx) in gamma.terms() {
            for (y, cy) in phi.terms() {
                let Some((prod, psign)) = basis_product(g, x, y) else { continue };
                let coef = cx * cy * psign;
                if i + j == r - 1 && prod == omega_index(g) {
                    scalar += Q::sign(i as i64) * coef;
                }
                let range: Vec<(usize, Q)> = if i + j < r {
                    (0..i).map(|s| (s, Q::sign((i - s) as i64))).collect()
                } else {
                    (i..r).map(|s| (s, Q::sign(i as i64 + 1 - s as i64))).collect()
                };
                for (s, sign) in range {
                    for &(e1, e2, c) in self.ring.push_basis(prod) {
                        let v = coef * sign * c * Q::sign((basis_parity(g, e1) * basis_parity(g, e2)) as i64);
                        *ab.entry((s, e1, e2)).or_insert_with(Q::zero) += v;
                    }
                }
            }
        }
        let mut terms = vec![OperatorExpr::scale(scalar, OperatorExpr::identity())];
        for ((s, e1, e2), v) in ab {
            if v.is_zero() {
                continue;
            }
            terms.push(OperatorExpr::scale(
                v,
                OperatorExpr::compose(vec![
                    OperatorExpr::A { k, v: s, c: e1 },
                    OperatorExpr::B { k, j: i + j - s - 1, c: e2 },
                ]),
            ));
        }
        Ok(OperatorExpr::Sum { terms })
    }
}
