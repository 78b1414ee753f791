//! Evaluation of annihilators and Chern multiplications.
//!
//! The two are mutually recursive. For `j < r`, `b_k^(j)` is moved through
//! the layer-`k` creation factors with the colored bracket. For `j >= r`,
//! the tautological line class `λ` satisfies `Σ_s (-1)^s c_s(E_k) λ^{r-s} = 0`
//! on the correspondence. This gives
//! `b_k^(j) = Σ_{s=1}^r (-1)^{s+1} [c_s(E_k)·b_k^(j-s)]|_Δ`, which lowers
//! the word length before any Chern class is applied.
//!
//! `c(E_l)` on `H_l` is `c(E_{l-1})·c(E_{l-1} - E_l)^{-1}`. The second factor
//! comes from the `a·b` formula for the twisted classes, untwisted by
//! `K_C`. Every diagonal-colored composition `Σ_{Δ_*γ} X(e')Y(e'')` carries
//! the Koszul sign `(-1)^{|e'||e''|}`. Lower-layer classes `c(E_i)` with `i < m` supercommute with the
//! layer-`m` creation operators, so on `H_m` they pass through to `H_{m-1}`.

use std::cell::RefCell;
use std::collections::HashMap;

use super::Model;
use crate::curve::{basis_parity, basis_product, omega_index, CurveClass, UNIT};
use crate::error::{Error, Result};
use crate::fock::{normalize_keys, FockElement, GeneratorKey, Monomial};
use crate::rational::Q;

/// Order in which `b` meets the creation factors of a monomial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Canonical (descending) order; intermediate words stay canonical and
    /// are memoized.
    #[default]
    InnermostFirst,
    /// The layer-`k` factors are first reordered ascending, with the Koszul
    /// sign, and `b` is moved through them in that order. Nothing is
    /// memoized along the bracket recursion.
    Reversed,
}

/// Even classes on `FⁿQuot × C` whose colored multiplication is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub(crate) enum Class {
    /// `c_t((E_{l-1} - E_l) ⊗ ω_C^{-1})`.
    Twisted(usize, usize),
    /// `c_t(E_{l-1} - E_l)`.
    Untwisted(usize, usize),
    /// Degree-`t` part of `c(E_{l-1} - E_l)^{-1}`.
    Inverse(usize, usize),
    /// `c_t(E_l)`; `E_0 = V`.
    Sub(usize, usize),
}

type BKey = (usize, usize, usize, Vec<GeneratorKey>);
type ClassKey = (Class, usize, Vec<GeneratorKey>);

pub(crate) struct Engine<'a> {
    model: &'a Model,
    strategy: Strategy,
    b_memo: RefCell<HashMap<BKey, FockElement>>,
    class_memo: RefCell<HashMap<ClassKey, FockElement>>,
}

fn koszul(g: u32, x: usize, y: usize) -> Q {
    Q::sign((basis_parity(g, x) * basis_parity(g, y)) as i64)
}

/// Reverses the layer-`k` prefix of a word, returning the new word and the
/// Koszul sign of the reversal.
fn reverse_prefix(genus: u32, keys: &[GeneratorKey], k: usize) -> (Vec<GeneratorKey>, Q) {
    let split = keys.iter().position(|key| key.layer != k).unwrap_or(keys.len());
    let mut word = keys.to_vec();
    word[..split].reverse();
    let odd = keys[..split].iter().filter(|key| key.is_odd(genus)).count() as i64;
    (word, Q::sign(odd * (odd - 1) / 2))
}

impl<'a> Engine<'a> {
    pub(crate) fn new(model: &'a Model, strategy: Strategy) -> Self {
        Engine { model, strategy, b_memo: RefCell::default(), class_memo: RefCell::default() }
    }

    fn g(&self) -> u32 {
        self.model.genus()
    }

    fn r(&self) -> usize {
        self.model.params.r
    }

    /// `b_k^(j)(e_φ)` on an element of `H_k`.
    pub(crate) fn b(&self, k: usize, j: usize, phi: usize, x: &FockElement) -> FockElement {
        let mut out = FockElement::zero();
        for (m, coef) in x.terms() {
            match self.strategy {
                Strategy::InnermostFirst => out.add_scaled(&self.b_word(k, j, phi, m.keys()), coef),
                Strategy::Reversed => {
                    let (word, sign) = reverse_prefix(self.g(), m.keys(), k);
                    out.add_scaled(&self.b_word(k, j, phi, &word), coef * sign);
                }
            }
        }
        out
    }

    /// `b_k^(j)(e_φ)` on a word whose layer-`k` factors form a prefix.
    pub(crate) fn b_word(&self, k: usize, j: usize, phi: usize, w: &[GeneratorKey]) -> FockElement {
        if w.first().is_none_or(|h| h.layer < k) {
            return FockElement::zero();
        }
        if self.strategy == Strategy::Reversed {
            return self.b_step(k, j, phi, w);
        }
        let key = (k, j, phi, w.to_vec());
        if let Some(hit) = self.b_memo.borrow().get(&key) {
            return hit.clone();
        }
        let out = self.b_step(k, j, phi, w);
        self.b_memo.borrow_mut().insert(key, out.clone());
        out
    }

    fn b_step(&self, k: usize, j: usize, phi: usize, w: &[GeneratorKey]) -> FockElement {
        let (g, r) = (self.g(), self.r());
        let mut out = FockElement::zero();
        if j >= r {
            for s in 1..=r {
                for &(e1, e2, c) in self.model.ring.push_basis(phi) {
                    let inner = self.b_word(k, j - s, e2, w);
                    if inner.is_zero() {
                        continue;
                    }
                    let coef = Q::sign(s as i64 + 1) * c * self.diag_sign(e1, e2);
                    out.add_scaled(&self.class(Class::Sub(k, s), e1, &inner), coef);
                }
            }
            return out;
        }

        let (head, rest) = (w[0], &w[1..]);
        let swap = koszul(g, head.color, phi);

        // Pass b through the head factor.
        let inner = self.b_word(k, j, phi, rest);
        if !inner.is_zero() {
            out.add_scaled(&inner.mul_generator(g, head), swap);
        }

        // Bracket correction, colored by Δ_*(γ·φ).
        let Some((prod, psign)) = basis_product(g, head.color, phi) else {
            return out;
        };
        let i = head.charge;
        let ab_term = |s: usize, t: usize, coef: Q, out: &mut FockElement| {
            for &(e1, e2, c) in self.model.ring.push_basis(prod) {
                let tail = self.b_word(k, t, e2, rest);
                if !tail.is_zero() {
                    let key = GeneratorKey::new(k, s, e1);
                    out.add_scaled(&tail.mul_generator(g, key), coef * psign * c * self.diag_sign(e1, e2));
                }
            }
        };
        if i + j < r {
            if i + j == r - 1 && prod == omega_index(g) {
                if let Some((m, s)) = normalize_keys(g, rest) {
                    out.add_term(m, Q::sign(i as i64) * psign * s);
                }
            }
            for s in 0..i {
                ab_term(s, i + j - s - 1, Q::sign((i - s) as i64), &mut out);
            }
        } else {
            for s in i..r {
                ab_term(s, i + j - s - 1, Q::sign(i as i64 + 1 - s as i64), &mut out);
            }
        }
        out
    }

    /// Sign of the diagonal term `e'⊗e''` in any composition `X(e')Y(e'')`.
    fn diag_sign(&self, e1: usize, e2: usize) -> Q {
        koszul(self.g(), e1, e2)
    }

    /// Multiplication by `class` colored by `e_c`.
    pub(crate) fn class(&self, class: Class, c: usize, x: &FockElement) -> FockElement {
        let mut out = FockElement::zero();
        for (m, coef) in x.terms() {
            out.add_scaled(&self.class_word(class, c, m.keys()), coef);
        }
        out
    }

    /// `Σ_{Δ_*e_c} X(e')(Y(e'')(w))`.
    fn colored(&self, outer: Class, inner: Class, c: usize, w: &[GeneratorKey]) -> FockElement {
        let mut out = FockElement::zero();
        for &(e1, e2, coef) in self.model.ring.push_basis(c) {
            let y = self.class_word(inner, e2, w);
            if y.is_zero() {
                continue;
            }
            out.add_scaled(&self.class(outer, e1, &y), coef * self.diag_sign(e1, e2));
        }
        out
    }

    fn scalar(&self, c: usize, w: &[GeneratorKey]) -> FockElement {
        if c != omega_index(self.g()) {
            return FockElement::zero();
        }
        FockElement::monomial(Monomial::from_sorted(w.to_vec()))
    }

    /// `class(e_c)` on a canonical word.
    fn class_word(&self, class: Class, c: usize, w: &[GeneratorKey]) -> FockElement {
        let key = (class, c, w.to_vec());
        if let Some(hit) = self.class_memo.borrow().get(&key) {
            return hit.clone();
        }
        let out = self.class_step(class, c, w);
        self.class_memo.borrow_mut().insert(key, out.clone());
        out
    }

    fn class_step(&self, class: Class, c: usize, w: &[GeneratorKey]) -> FockElement {
        let (g, r) = (self.g(), self.r());
        match class {
            Class::Twisted(_, 0) | Class::Untwisted(_, 0) | Class::Inverse(_, 0) | Class::Sub(_, 0) => {
                self.scalar(c, w)
            }
            Class::Sub(0, t) => {
                if t == 1 && c == UNIT {
                    FockElement::monomial(Monomial::from_sorted(w.to_vec())).scale(Q::from_int(self.model.params.deg_v))
                } else {
                    FockElement::zero()
                }
            }
            Class::Sub(l, t) => {
                let top = w.first().map_or(0, |h| h.layer);
                if top < l {
                    return self.class_word(Class::Sub(top, t), c, w);
                }
                if top > l {
                    // Supercommute past the layer-`top` prefix.
                    let split = w.iter().position(|key| key.layer != top).unwrap_or(w.len());
                    let odd = w[..split].iter().filter(|key| key.is_odd(g)).count() as u32;
                    let sign = Q::sign((odd * basis_parity(g, c)) as i64);
                    let inner = self.class_word(class, c, &w[split..]);
                    let mut out = FockElement::zero();
                    for (m, coef) in inner.terms() {
                        let mut keys = w[..split].to_vec();
                        keys.extend_from_slice(m.keys());
                        out.add_term(Monomial::from_sorted(keys), coef * sign);
                    }
                    return out;
                }
                let mut out = FockElement::zero();
                for a in 0..=t {
                    out.add_scaled(&self.colored(Class::Sub(l - 1, a), Class::Inverse(l, t - a), c, w), Q::one());
                }
                out
            }
            Class::Inverse(l, b) => {
                let mut out = FockElement::zero();
                for u in 1..=b {
                    out.add_scaled(&self.colored(Class::Untwisted(l, u), Class::Inverse(l, b - u), c, w), -Q::one());
                }
                out
            }
            Class::Untwisted(l, t) => {
                // K_C^2 = 0 leaves a single correction term.
                let mut out = self.class_word(Class::Twisted(l, t), c, w);
                if t >= 2 && c == UNIT && g != 1 {
                    let corr = self.class_word(Class::Twisted(l, t - 1), omega_index(g), w);
                    out.add_scaled(&corr, -Q::from_int((t as i64 - 1) * (2 * g as i64 - 2)));
                }
                out
            }
            Class::Twisted(l, t) => {
                if w.first().is_none_or(|h| h.layer < l) {
                    return FockElement::zero();
                }
                // c_t = -Σ_i (-1)^{i+t} a^(i) b^(r+t-i-2) restricted to the diagonal.
                let x = FockElement::monomial(Monomial::from_sorted(w.to_vec()));
                let mut out = FockElement::zero();
                for &(e1, e2, coef) in self.model.ring.push_basis(c) {
                    for i in 0..r {
                        let bx = self.b(l, r + t - i - 2, e2, &x);
                        if bx.is_zero() {
                            continue;
                        }
                        let sign = -Q::sign(i as i64 + t as i64) * coef * self.diag_sign(e1, e2);
                        out.add_scaled(&bx.mul_generator(g, GeneratorKey::new(l, i, e1)), sign);
                    }
                }
                out
            }
        }
    }
}

impl Model {
    /// `b_k^(j)(e_c)·x` for `x ∈ H_k`, using the default strategy.
    pub fn apply_b(&self, k: usize, j: usize, c: usize, x: &FockElement) -> Result<FockElement> {
        self.apply_b_with(Strategy::InnermostFirst, k, j, c, x)
    }

    pub fn apply_b_with(&self, strategy: Strategy, k: usize, j: usize, c: usize, x: &FockElement) -> Result<FockElement> {
        self.check_layer(k)?;
        self.check_color(c)?;
        self.check_top(x, k, || format!("b_{k}^({j})"))?;
        Ok(Engine::new(self, strategy).b(k, j, c, x))
    }

    /// `b_k^(j)(φ)·x` for an arbitrary class.
    pub fn apply_b_class(&self, k: usize, j: usize, phi: &CurveClass, x: &FockElement) -> Result<FockElement> {
        self.check_genus(phi)?;
        let mut out = FockElement::zero();
        for (c, w) in phi.terms() {
            out.add_scaled(&self.apply_b(k, j, c, x)?, w);
        }
        Ok(out)
    }

    /// `b_k^(j)` applied to an arbitrary (not necessarily canonical) word
    /// whose layer-`k` factors come first. Used to test order independence.
    pub fn apply_b_to_word(&self, k: usize, j: usize, c: usize, word: &[GeneratorKey]) -> Result<FockElement> {
        self.check_layer(k)?;
        self.check_color(c)?;
        for &key in word {
            self.params.check_key(key)?;
        }
        let split = word.iter().position(|key| key.layer != k).unwrap_or(word.len());
        if let Some(bad) = word[split..].iter().find(|key| key.layer >= k) {
            return Err(Error::Domain { op: format!("b_{k}^({j})"), level: k, found: bad.layer.max(k + 1) });
        }
        Ok(Engine::new(self, Strategy::Reversed).b_word(k, j, c, word))
    }

    /// Multiplication by `c_t((E_{j-1} - E_j) ⊗ ω_C^{-1})` colored by γ.
    /// Requires `x ∈ H_j`; vanishes on `H_{j-1}`.
    pub fn apply_chern_quot(&self, j: usize, t: usize, gamma: &CurveClass, x: &FockElement) -> Result<FockElement> {
        self.check_layer(j)?;
        self.check_genus(gamma)?;
        if t == 0 {
            return Err(Error::IndexOutOfRange("twisted Chern degree must be at least 1".into()));
        }
        self.check_top(x, j, || format!("c_{t}(E_{}-E_{j})", j - 1))?;
        Ok(self.colored_class(Class::Twisted(j, t), gamma, x))
    }

    /// Multiplication by `c_t(E_j)` colored by γ, on all of `H_n`.
    pub fn apply_chern_e(&self, j: usize, t: usize, gamma: &CurveClass, x: &FockElement) -> Result<FockElement> {
        if j > self.params.n {
            return Err(Error::IndexOutOfRange(format!("layer {j} not in 0..={}", self.params.n)));
        }
        self.check_genus(gamma)?;
        Ok(self.colored_class(Class::Sub(j, t), gamma, x))
    }

    /// `c_t(V)` colored by γ: the scalar `∫ γ·c_t(V)`.
    pub fn apply_bundle(&self, t: usize, gamma: &CurveClass, x: &FockElement) -> Result<FockElement> {
        self.check_genus(gamma)?;
        Ok(self.colored_class(Class::Sub(0, t), gamma, x))
    }

    fn colored_class(&self, class: Class, gamma: &CurveClass, x: &FockElement) -> FockElement {
        let engine = Engine::new(self, Strategy::InnermostFirst);
        let mut out = FockElement::zero();
        for (c, w) in gamma.terms() {
            out.add_scaled(&engine.class(class, c, x), w);
        }
        out
    }

    fn check_color(&self, c: usize) -> Result<()> {
        if c >= self.params.colors() {
            return Err(Error::ColorOutOfRange { color: c, genus: self.genus() });
        }
        Ok(())
    }

    fn check_top(&self, x: &FockElement, level: usize, op: impl Fn() -> String) -> Result<()> {
        match x.terms().map(|(m, _)| m.top_layer()).max() {
            Some(found) if found > level => Err(Error::Domain { op: op(), level, found }),
            _ => Ok(()),
        }
    }
}
