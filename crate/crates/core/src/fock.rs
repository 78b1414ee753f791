//! The bigraded super-Fock module spanned by canonical monomials in the
//! creation generators `a_k^(v)(e_c)` acting on the vacuum.
//!
//! A monomial is stored left to right as it acts: the leftmost key is the
//! outermost operator. Canonical order is strictly descending in
//! `(layer, charge, color)` for odd keys and weakly descending for even ones.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::curve::{basis_degree, basis_name, basis_parity, basis_size};
use crate::error::{Error, ParseError, Result};
use crate::rational::Q;

/// Numerical data fixing one Hyperquot family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelParams {
    pub n: usize,
    pub r: usize,
    pub g: u32,
    #[serde(rename = "degV")]
    pub deg_v: i64,
    pub bound: u32,
}

impl ModelParams {
    pub fn new(n: usize, r: usize, g: u32, deg_v: i64, bound: u32) -> Result<Self> {
        let p = ModelParams { n, r, g, deg_v, bound };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParams("n must be at least 1".into()));
        }
        if self.r == 0 {
            return Err(Error::InvalidParams("r must be at least 1".into()));
        }
        Ok(())
    }

    pub fn colors(&self) -> usize {
        basis_size(self.g)
    }

    pub fn check_key(&self, key: GeneratorKey) -> Result<()> {
        if key.layer == 0 || key.layer > self.n {
            return Err(Error::IndexOutOfRange(format!("layer {} not in 1..={}", key.layer, self.n)));
        }
        if key.charge >= self.r {
            return Err(Error::IndexOutOfRange(format!("charge {} not in 0..{}", key.charge, self.r)));
        }
        if key.color >= self.colors() {
            return Err(Error::ColorOutOfRange { color: key.color, genus: self.g });
        }
        Ok(())
    }

    pub fn check_dvec(&self, dvec: &[u32]) -> Result<()> {
        if dvec.len() != self.n {
            return Err(Error::DvecLength { expected: self.n, got: dvec.len() });
        }
        let d_n = dvec[self.n - 1];
        if d_n > self.bound {
            return Err(Error::Truncation { d_n, bound: self.bound });
        }
        Ok(())
    }

    /// All non-decreasing dvecs with `d_n <= bound`, in lexicographic order.
    pub fn cells(&self) -> Vec<Vec<u32>> {
        fn rec(n: usize, bound: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
            if prefix.len() == n {
                out.push(prefix.clone());
                return;
            }
            let lo = prefix.last().copied().unwrap_or(0);
            for d in lo..=bound {
                prefix.push(d);
                rec(n, bound, prefix, out);
                prefix.pop();
            }
        }
        let mut out = Vec::new();
        rec(self.n, self.bound, &mut Vec::with_capacity(self.n), &mut out);
        out
    }
}

/// The creation generator `a_layer^(charge)(e_color)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(from = "[usize; 3]", into = "[usize; 3]")]
pub struct GeneratorKey {
    pub layer: usize,
    pub charge: usize,
    pub color: usize,
}

impl From<[usize; 3]> for GeneratorKey {
    fn from([layer, charge, color]: [usize; 3]) -> Self {
        GeneratorKey { layer, charge, color }
    }
}

impl From<GeneratorKey> for [usize; 3] {
    fn from(k: GeneratorKey) -> Self {
        [k.layer, k.charge, k.color]
    }
}

impl GeneratorKey {
    pub const fn new(layer: usize, charge: usize, color: usize) -> Self {
        GeneratorKey { layer, charge, color }
    }

    pub fn parity(&self, genus: u32) -> u32 {
        basis_parity(genus, self.color)
    }

    pub fn is_odd(&self, genus: u32) -> bool {
        self.parity(genus) == 1
    }

    pub fn cohdeg(&self, genus: u32) -> u32 {
        2 * self.charge as u32 + basis_degree(genus, self.color)
    }

    pub fn dvec(&self, n: usize) -> Vec<u32> {
        (1..=n).map(|i| u32::from(i >= self.layer)).collect()
    }

    pub fn display(&self, genus: u32) -> String {
        format!("a_{}^({})({})", self.layer, self.charge, basis_name(genus, self.color))
    }
}

/// A canonical word of generators; the empty word is the vacuum.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<GeneratorKey>);

impl Monomial {
    pub fn vacuum() -> Self {
        Monomial(Vec::new())
    }

    /// Wraps keys assumed to be canonical already.
    pub(crate) fn from_sorted(keys: Vec<GeneratorKey>) -> Self {
        Monomial(keys)
    }

    pub fn keys(&self) -> &[GeneratorKey] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Highest layer present, `0` for the vacuum.
    pub fn top_layer(&self) -> usize {
        self.0.first().map_or(0, |k| k.layer)
    }

    pub fn dvec(&self, n: usize) -> Vec<u32> {
        let mut d = vec![0u32; n];
        for k in &self.0 {
            for slot in d.iter_mut().skip(k.layer - 1) {
                *slot += 1;
            }
        }
        d
    }

    pub fn cohdeg(&self, genus: u32) -> u32 {
        self.0.iter().map(|k| k.cohdeg(genus)).sum()
    }

    pub fn display(&self, genus: u32) -> String {
        let mut s: String = self.0.iter().map(|k| k.display(genus) + " ").collect();
        s.push_str("|0>");
        s
    }
}

/// Sorts `keys` into canonical order with Koszul signs. Returns `None` when
/// an odd key repeats.
pub fn normalize_keys(genus: u32, keys: &[GeneratorKey]) -> Option<(Monomial, Q)> {
    let mut v = keys.to_vec();
    let mut odd_swaps = 0u32;
    // Insertion sort: counts transpositions of odd pairs exactly.
    for i in 1..v.len() {
        let mut j = i;
        while j > 0 && v[j - 1] < v[j] {
            if v[j - 1].is_odd(genus) && v[j].is_odd(genus) {
                odd_swaps += 1;
            }
            v.swap(j - 1, j);
            j -= 1;
        }
    }
    if v.windows(2).any(|w| w[0] == w[1] && w[0].is_odd(genus)) {
        return None;
    }
    Some((Monomial(v), Q::sign(odd_swaps as i64)))
}

/// A finite rational combination of canonical monomials.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FockElement {
    terms: BTreeMap<Monomial, Q>,
}

impl FockElement {
    pub fn zero() -> Self {
        FockElement::default()
    }

    pub fn vacuum() -> Self {
        Self::monomial(Monomial::vacuum())
    }

    pub fn monomial(m: Monomial) -> Self {
        let mut out = Self::zero();
        out.add_term(m, Q::one());
        out
    }

    /// The normalized product of `keys` applied to the vacuum, times `coeff`.
    pub fn normalize(params: &ModelParams, keys: &[GeneratorKey], coeff: Q) -> Result<Self> {
        for &k in keys {
            params.check_key(k)?;
        }
        let mut out = Self::zero();
        if let Some((m, s)) = normalize_keys(params.g, keys) {
            out.add_term(m, coeff * s);
        }
        Ok(out)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// Number of nonzero terms.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).copied().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, Q)> + '_ {
        self.terms.iter().map(|(m, &c)| (m, c))
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                let v = *e.get() + c;
                if v.is_zero() {
                    e.remove();
                } else {
                    *e.get_mut() = v;
                }
            }
        }
    }

    /// `self += c·other`.
    pub fn add_scaled(&mut self, other: &FockElement, c: Q) {
        if c.is_zero() {
            return;
        }
        for (m, v) in other.terms() {
            self.add_term(m.clone(), v * c);
        }
    }

    pub fn scale(&self, c: Q) -> Self {
        let mut out = Self::zero();
        out.add_scaled(self, c);
        out
    }

    pub fn sub(&self, other: &FockElement) -> Self {
        let mut out = self.clone();
        out.add_scaled(other, -Q::one());
        out
    }

    /// Left multiplication by one generator, inserting it at its canonical
    /// position. No range checks.
    pub fn mul_generator(&self, genus: u32, key: GeneratorKey) -> Self {
        let mut out = Self::zero();
        let odd = key.is_odd(genus);
        for (m, c) in self.terms() {
            let keys = m.keys();
            // Number of keys that stay to the left of `key`.
            let pos = keys.partition_point(|k| *k > key);
            if odd && keys.get(pos) == Some(&key) {
                continue;
            }
            let sign = if odd {
                Q::sign(keys[..pos].iter().filter(|k| k.is_odd(genus)).count() as i64)
            } else {
                Q::one()
            };
            let mut v = Vec::with_capacity(keys.len() + 1);
            v.extend_from_slice(&keys[..pos]);
            v.push(key);
            v.extend_from_slice(&keys[pos..]);
            out.add_term(Monomial(v), c * sign);
        }
        out
    }

    /// Highest layer occurring in any term.
    pub fn top_layer(&self) -> usize {
        self.terms.keys().map(Monomial::top_layer).max().unwrap_or(0)
    }

    /// `true` when every monomial lies in the filtration step `H_m`.
    pub fn in_filtration(&self, m: usize) -> bool {
        self.top_layer() <= m
    }

    pub fn bidegree(&self, params: &ModelParams) -> BTreeSet<(Vec<u32>, u32)> {
        self.terms.keys().map(|m| (m.dvec(params.n), m.cohdeg(params.g))).collect()
    }

    pub fn display(&self, genus: u32) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.terms()
            .map(|(m, c)| format!("({}) {}", c, m.display(genus)))
            .collect::<Vec<_>>()
            .join(" + ")
    }
}

#[derive(Serialize, Deserialize)]
struct TermDoc {
    gens: Vec<GeneratorKey>,
    coeff: Q,
}

#[derive(Serialize, Deserialize)]
struct ElementDoc {
    params: ModelParams,
    terms: Vec<TermDoc>,
}

impl FockElement {
    pub fn to_json(&self, params: &ModelParams) -> String {
        let doc = ElementDoc {
            params: *params,
            terms: self.terms().map(|(m, c)| TermDoc { gens: m.keys().to_vec(), coeff: c }).collect(),
        };
        serde_json::to_string_pretty(&doc).expect("element serializes")
    }

    /// Parses an element document; generator lists are normalized, so any
    /// input order is accepted.
    pub fn from_json(text: &str) -> Result<(ModelParams, FockElement)> {
        let doc: ElementDoc = serde_json::from_str(text).map_err(|e| ParseError::Json(e.to_string()))?;
        doc.params.validate()?;
        let mut out = FockElement::zero();
        for t in doc.terms {
            let x = FockElement::normalize(&doc.params, &t.gens, t.coeff)?;
            out.add_scaled(&x, Q::one());
        }
        for (m, _) in out.terms() {
            doc.params.check_dvec(&m.dvec(doc.params.n))?;
        }
        Ok((doc.params, out))
    }
}

/// Visits every canonical monomial with the given dvec, in a fixed order.
/// Non-monotone dvecs have no monomials.
pub fn for_each_basis(params: &ModelParams, dvec: &[u32], mut f: impl FnMut(&Monomial)) -> Result<()> {
    params.check_dvec(dvec)?;
    let mut counts = Vec::with_capacity(params.n);
    let mut prev = 0u32;
    for &d in dvec {
        if d < prev {
            return Ok(());
        }
        counts.push((d - prev) as usize);
        prev = d;
    }
    // Slots to fill, outermost first: layer n, then n-1, ...
    let slots: Vec<usize> = (1..=params.n).rev().flat_map(|k| std::iter::repeat_n(k, counts[k - 1])).collect();
    let mut word = Vec::with_capacity(slots.len());
    fill(params, &slots, &mut word, &mut f);
    Ok(())
}

fn fill(params: &ModelParams, slots: &[usize], word: &mut Vec<GeneratorKey>, f: &mut impl FnMut(&Monomial)) {
    let depth = word.len();
    if depth == slots.len() {
        let m = Monomial(std::mem::take(word));
        f(&m);
        *word = m.0;
        return;
    }
    let layer = slots[depth];
    let prev = word.last().copied().filter(|k| k.layer == layer);
    let colors = params.colors();
    for charge in (0..params.r).rev() {
        for color in (0..colors).rev() {
            let key = GeneratorKey::new(layer, charge, color);
            if let Some(p) = prev {
                if key > p || (key == p && key.is_odd(params.g)) {
                    continue;
                }
            }
            word.push(key);
            fill(params, slots, word, f);
            word.pop();
        }
    }
}

/// All canonical monomials with the given dvec, sorted by cohomological
/// degree and then by the canonical enumeration order.
pub fn enumerate_basis(params: &ModelParams, dvec: &[u32]) -> Result<Vec<Monomial>> {
    let mut out = Vec::new();
    for_each_basis(params, dvec, |m| out.push(m.clone()))?;
    out.sort_by_key(|m| m.cohdeg(params.g));
    Ok(out)
}

/// Basis of the whole truncated filtration step `H_m`: every monomial with
/// top layer at most `m` and `d_n <= bound`.
pub fn enumerate_filtration(params: &ModelParams, m: usize) -> Vec<Monomial> {
    let mut out = Vec::new();
    for cell in params.cells() {
        // Cells in H_m have d_m = ... = d_n.
        if cell[m.min(params.n).saturating_sub(1)..].windows(2).all(|w| w[0] == w[1])
            && (m > 0 || cell.iter().all(|&d| d == 0))
        {
            for_each_basis(params, &cell, |mono| out.push(mono.clone())).expect("cell within bound");
        }
    }
    out
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for k in &self.0 {
            write!(f, "a_{}^({})[{}] ", k.layer, k.charge, k.color)?;
        }
        write!(f, "|0>")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(n: usize, r: usize, g: u32) -> ModelParams {
        ModelParams::new(n, r, g, 0, 5).unwrap()
    }

    #[test]
    fn normalize_examples() {
        let p = params(1, 1, 1);
        assert_eq!(FockElement::normalize(&p, &[], Q::one()).unwrap(), FockElement::vacuum());
        let (a, b) = (GeneratorKey::new(1, 0, 1), GeneratorKey::new(1, 0, 2));
        let x = FockElement::normalize(&p, &[a, b], Q::one()).unwrap();
        let y = FockElement::normalize(&p, &[b, a], Q::one()).unwrap();
        assert_eq!(x, y.scale(-Q::one()));
        assert!(FockElement::normalize(&p, &[a, a], Q::one()).unwrap().is_zero());
        assert!(FockElement::normalize(&p, &[GeneratorKey::new(2, 0, 0)], Q::one()).is_err());
    }

    #[test]
    fn bidegree_examples() {
        let p = params(2, 2, 0);
        let vac = FockElement::vacuum();
        assert_eq!(vac.bidegree(&p), BTreeSet::from([(vec![0, 0], 0)]));
        let x = FockElement::normalize(&p, &[GeneratorKey::new(1, 1, 1)], Q::one()).unwrap();
        assert_eq!(x.bidegree(&p), BTreeSet::from([(vec![1, 1], 4)]));
        let y = FockElement::normalize(&p, &[GeneratorKey::new(2, 0, 0)], Q::one()).unwrap();
        assert_eq!(y.bidegree(&p), BTreeSet::from([(vec![0, 1], 0)]));
    }

    #[test]
    fn enumerate_examples() {
        let b = enumerate_basis(&params(1, 1, 0), &[1]).unwrap();
        assert_eq!(b.len(), 2);
        assert_eq!(b.iter().map(|m| m.cohdeg(0)).collect::<Vec<_>>(), vec![0, 2]);

        let b = enumerate_basis(&params(2, 1, 0), &[1, 2]).unwrap();
        assert_eq!(b.iter().map(|m| m.cohdeg(0)).collect::<Vec<_>>(), vec![0, 2, 2, 4]);

        assert_eq!(enumerate_basis(&params(3, 2, 1), &[0, 0, 0]).unwrap(), vec![Monomial::vacuum()]);
        assert!(enumerate_basis(&params(2, 1, 0), &[2, 1]).unwrap().is_empty());
        assert!(matches!(enumerate_basis(&params(2, 1, 0), &[1]), Err(Error::DvecLength { .. })));
        assert!(matches!(enumerate_basis(&params(1, 1, 0), &[6]), Err(Error::Truncation { .. })));
    }

    #[test]
    fn mul_generator_matches_normalize() {
        let p = params(2, 2, 1);
        let keys = [GeneratorKey::new(1, 0, 1), GeneratorKey::new(2, 1, 2), GeneratorKey::new(1, 1, 2)];
        let base = FockElement::normalize(&p, &keys[1..], Q::one()).unwrap();
        assert_eq!(base.mul_generator(1, keys[0]), FockElement::normalize(&p, &keys, Q::one()).unwrap());
    }

    #[test]
    fn filtration_nesting() {
        let p = ModelParams::new(2, 1, 0, 0, 2).unwrap();
        let h0 = enumerate_filtration(&p, 0);
        let h1 = enumerate_filtration(&p, 1);
        let h2 = enumerate_filtration(&p, 2);
        assert_eq!(h0, vec![Monomial::vacuum()]);
        assert!(h0.iter().all(|m| h1.contains(m)));
        assert!(h1.iter().all(|m| h2.contains(m) && m.top_layer() <= 1));
        assert_eq!(h1.len(), 1 + 2 + 3);
    }

    #[test]
    fn json_roundtrip() {
        let p = params(2, 2, 1);
        let x = FockElement::normalize(&p, &[GeneratorKey::new(1, 0, 1), GeneratorKey::new(2, 1, 3)], Q::new(3, 4)).unwrap();
        let (p2, y) = FockElement::from_json(&x.to_json(&p)).unwrap();
        assert_eq!((p2, y), (p, x));
        assert!(FockElement::from_json("{").is_err());
    }
}
