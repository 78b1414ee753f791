//! Colored operators on the Fock module.
//!
//! `a_k^(v)(γ)` acts by multiplication with a generator. `b_k^(j)(φ)` is
//! computed by moving it rightwards through layer-`k` generators with the
//! colored `[b, a]` bracket until it reaches `H_{k-1}`, where it vanishes;
//! superscripts `j >= r` are reduced through the degree-`r` relation of the
//! tautological line class. Multiplication by tautological Chern classes is
//! built from `a·b` sums restricted to the diagonal, then untwisted and
//! inverted layer by layer.

mod bracket;
mod engine;
mod expr;

use std::sync::Arc;

pub use expr::OperatorExpr;
pub use engine::Strategy;

use crate::curve::{CurveClass, CurveRing};
use crate::error::{Error, Result};
use crate::fock::{FockElement, GeneratorKey, ModelParams};
use crate::rational::Q;

/// Parameters together with the cached curve tables.
#[derive(Debug, Clone)]
pub struct Model {
    params: ModelParams,
    ring: Arc<CurveRing>,
}

impl Model {
    pub fn new(params: ModelParams) -> Result<Self> {
        params.validate()?;
        Ok(Model { params, ring: CurveRing::get(params.g) })
    }

    pub fn params(&self) -> &ModelParams {
        &self.params
    }

    pub fn genus(&self) -> u32 {
        self.params.g
    }

    pub fn ring(&self) -> &CurveRing {
        &self.ring
    }

    pub fn color(&self, c: usize) -> Result<CurveClass> {
        CurveClass::basis(self.params.g, c)
    }

    fn check_genus(&self, x: &CurveClass) -> Result<()> {
        if x.genus() == self.params.g {
            Ok(())
        } else {
            Err(Error::GenusMismatch(self.params.g, x.genus()))
        }
    }

    fn check_layer(&self, k: usize) -> Result<()> {
        if k == 0 || k > self.params.n {
            return Err(Error::IndexOutOfRange(format!("layer {k} not in 1..={}", self.params.n)));
        }
        Ok(())
    }

    /// Künneth terms of `Δ_*(γ)`.
    pub fn push(&self, gamma: &CurveClass) -> Vec<(usize, usize, Q)> {
        let mut acc = std::collections::BTreeMap::new();
        for (c, x) in gamma.terms() {
            for &(e1, e2, y) in self.ring.push_basis(c) {
                let v: &mut Q = acc.entry((e1, e2)).or_insert_with(Q::zero);
                *v += x * y;
            }
        }
        acc.into_iter().filter(|(_, v)| !v.is_zero()).map(|((a, b), v)| (a, b, v)).collect()
    }

    /// `a_k^(v)(e_c)·x`.
    pub fn apply_a(&self, k: usize, v: usize, c: usize, x: &FockElement) -> Result<FockElement> {
        let key = GeneratorKey::new(k, v, c);
        self.params.check_key(key)?;
        let out = x.mul_generator(self.params.g, key);
        for (m, _) in out.terms() {
            let d_n = m.dvec(self.params.n)[self.params.n - 1];
            if d_n > self.params.bound {
                return Err(Error::Truncation { d_n, bound: self.params.bound });
            }
        }
        Ok(out)
    }

    /// `a_k^(v)(γ)·x` for an arbitrary class.
    pub fn apply_a_class(&self, k: usize, v: usize, gamma: &CurveClass, x: &FockElement) -> Result<FockElement> {
        self.check_genus(gamma)?;
        let mut out = FockElement::zero();
        for (c, w) in gamma.terms() {
            out.add_scaled(&self.apply_a(k, v, c, x)?, w);
        }
        Ok(out)
    }
}
