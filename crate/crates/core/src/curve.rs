//! Rational cohomology of a smooth projective curve of genus `g`.
//!
//! Basis indices: `0` is the unit, `1..=g` are the `α_i`, `g+1..=2g` are the
//! `β_i` (all of degree 1), and `2g+1` is the point class `ω`. Products follow
//! the symplectic convention `α_i·β_i = ω = -β_i·α_i`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, ParseError, Result};
use crate::linalg;
use crate::rational::Q;

pub const UNIT: usize = 0;

pub fn basis_size(genus: u32) -> usize {
    2 * genus as usize + 2
}

pub fn omega_index(genus: u32) -> usize {
    2 * genus as usize + 1
}

pub fn basis_degree(genus: u32, index: usize) -> u32 {
    if index == UNIT {
        0
    } else if index == omega_index(genus) {
        2
    } else {
        1
    }
}

pub fn basis_parity(genus: u32, index: usize) -> u32 {
    basis_degree(genus, index) % 2
}

/// Human-readable name of a basis class: `1`, `a1`, `b1`, `w`.
pub fn basis_name(genus: u32, index: usize) -> String {
    let g = genus as usize;
    if index == UNIT {
        "1".into()
    } else if index == omega_index(genus) {
        "w".into()
    } else if index <= g {
        format!("a{index}")
    } else {
        format!("b{}", index - g)
    }
}

fn check_color(genus: u32, index: usize) -> Result<()> {
    if index < basis_size(genus) {
        Ok(())
    } else {
        Err(Error::ColorOutOfRange { color: index, genus })
    }
}

/// Product of two basis classes as `(index, sign)`, or `None` when it vanishes.
pub fn basis_product(genus: u32, i: usize, j: usize) -> Option<(usize, Q)> {
    let g = genus as usize;
    if i == UNIT {
        return Some((j, Q::one()));
    }
    if j == UNIT {
        return Some((i, Q::one()));
    }
    if basis_degree(genus, i) + basis_degree(genus, j) != 2 {
        return None;
    }
    // Both of degree one.
    if i <= g && j == i + g {
        Some((omega_index(genus), Q::one()))
    } else if j <= g && i == j + g {
        Some((omega_index(genus), -Q::one()))
    } else {
        None
    }
}

/// A class in `H*(C; Q)` stored sparsely.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CurveClass {
    genus: u32,
    coeffs: BTreeMap<usize, Q>,
}

impl CurveClass {
    pub fn zero(genus: u32) -> Self {
        CurveClass { genus, coeffs: BTreeMap::new() }
    }

    pub fn basis(genus: u32, index: usize) -> Result<Self> {
        check_color(genus, index)?;
        Ok(Self::zero(genus).with_term(index, Q::one()))
    }

    pub fn unit(genus: u32) -> Self {
        Self::zero(genus).with_term(UNIT, Q::one())
    }

    pub fn omega(genus: u32) -> Self {
        Self::zero(genus).with_term(omega_index(genus), Q::one())
    }

    /// `K_C = (2g - 2)·ω`.
    pub fn canonical(genus: u32) -> Self {
        Self::omega(genus).scale(Q::from_int(2 * genus as i64 - 2))
    }

    pub fn from_terms(genus: u32, terms: impl IntoIterator<Item = (usize, Q)>) -> Result<Self> {
        let mut out = Self::zero(genus);
        for (i, c) in terms {
            check_color(genus, i)?;
            out.add_term(i, c);
        }
        Ok(out)
    }

    fn with_term(mut self, index: usize, c: Q) -> Self {
        self.add_term(index, c);
        self
    }

    pub(crate) fn add_term(&mut self, index: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry(index).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&index);
        }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, index: usize) -> Q {
        self.coeffs.get(&index).copied().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, Q)> + '_ {
        self.coeffs.iter().map(|(&i, &c)| (i, c))
    }

    /// Cohomological degree, when homogeneous and nonzero.
    pub fn degree(&self) -> Option<u32> {
        let mut degs = self.coeffs.keys().map(|&i| basis_degree(self.genus, i));
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Parity, when all terms share one.
    pub fn parity(&self) -> Option<u32> {
        let mut pars = self.coeffs.keys().map(|&i| basis_parity(self.genus, i));
        let first = pars.next()?;
        pars.all(|p| p == first).then_some(first)
    }

    pub fn scale(&self, c: Q) -> Self {
        let mut out = Self::zero(self.genus);
        for (i, v) in self.terms() {
            out.add_term(i, v * c);
        }
        out
    }

    pub fn add(&self, other: &CurveClass) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::GenusMismatch(self.genus, other.genus));
        }
        let mut out = self.clone();
        for (i, v) in other.terms() {
            out.add_term(i, v);
        }
        Ok(out)
    }

    /// Supercommutative cup product.
    pub fn mul(&self, other: &CurveClass) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::GenusMismatch(self.genus, other.genus));
        }
        let mut out = Self::zero(self.genus);
        for (i, a) in self.terms() {
            for (j, b) in other.terms() {
                if let Some((k, s)) = basis_product(self.genus, i, j) {
                    out.add_term(k, a * b * s);
                }
            }
        }
        Ok(out)
    }

    /// Coefficient of the point class.
    pub fn integrate(&self) -> Q {
        self.coeff(omega_index(self.genus))
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return write!(f, "0");
        }
        for (n, (i, c)) in self.terms().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{}*{}", c, basis_name(self.genus, i))?;
        }
        Ok(())
    }
}

impl fmt::Debug for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CurveClass(g={}; {})", self.genus, self)
    }
}

#[derive(Serialize, Deserialize)]
struct CurveClassJson {
    g: u32,
    coeffs: BTreeMap<String, Q>,
}

impl Serialize for CurveClass {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        CurveClassJson {
            g: self.genus,
            coeffs: self.terms().map(|(i, c)| (i.to_string(), c)).collect(),
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for CurveClass {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = CurveClassJson::deserialize(deserializer)?;
        let mut terms = Vec::with_capacity(raw.coeffs.len());
        for (k, v) in raw.coeffs {
            let idx: usize = k.parse().map_err(|_| {
                serde::de::Error::custom(ParseError::Malformed {
                    what: "curve class",
                    detail: format!("basis index `{k}`"),
                })
            })?;
            terms.push((idx, v));
        }
        CurveClass::from_terms(raw.g, terms).map_err(serde::de::Error::custom)
    }
}

/// A class in `H*(C × C; Q)` in the Künneth basis `e_i ⊗ e_j`.
#[derive(Clone, PartialEq, Eq)]
pub struct BiClass {
    genus: u32,
    coeffs: BTreeMap<(usize, usize), Q>,
}

impl BiClass {
    pub fn zero(genus: u32) -> Self {
        BiClass { genus, coeffs: BTreeMap::new() }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn coeff(&self, i: usize, j: usize) -> Q {
        self.coeffs.get(&(i, j)).copied().unwrap_or_else(Q::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, Q)> + '_ {
        self.coeffs.iter().map(|(&(i, j), &c)| (i, j, c))
    }

    pub(crate) fn add_term(&mut self, i: usize, j: usize, c: Q) {
        if c.is_zero() {
            return;
        }
        let entry = self.coeffs.entry((i, j)).or_insert_with(Q::zero);
        *entry += c;
        if entry.is_zero() {
            self.coeffs.remove(&(i, j));
        }
    }

    /// `x ⊗ y`.
    pub fn tensor(x: &CurveClass, y: &CurveClass) -> Result<Self> {
        if x.genus != y.genus {
            return Err(Error::GenusMismatch(x.genus, y.genus));
        }
        let mut out = Self::zero(x.genus);
        for (i, a) in x.terms() {
            for (j, b) in y.terms() {
                out.add_term(i, j, a * b);
            }
        }
        Ok(out)
    }

    /// Product in `H*(C) ⊗ H*(C)`: `(a⊗b)(c⊗d) = (-1)^{|b||c|} ac ⊗ bd`.
    pub fn mul(&self, other: &BiClass) -> Result<Self> {
        if self.genus != other.genus {
            return Err(Error::GenusMismatch(self.genus, other.genus));
        }
        let g = self.genus;
        let mut out = Self::zero(g);
        for (a, b, x) in self.terms() {
            for (c, d, y) in other.terms() {
                let Some((ac, s1)) = basis_product(g, a, c) else { continue };
                let Some((bd, s2)) = basis_product(g, b, d) else { continue };
                let koszul = Q::sign((basis_parity(g, b) * basis_parity(g, c)) as i64);
                out.add_term(ac, bd, x * y * s1 * s2 * koszul);
            }
        }
        Ok(out)
    }

    /// Pull-back along the factor swap, with Koszul signs.
    pub fn swap(&self) -> Self {
        let g = self.genus;
        let mut out = Self::zero(g);
        for (a, b, c) in self.terms() {
            let s = Q::sign((basis_parity(g, a) * basis_parity(g, b)) as i64);
            out.add_term(b, a, c * s);
        }
        out
    }

    /// Integrates out the first factor: `Σ c · ∫e' · e''`.
    pub fn contract_first(&self) -> CurveClass {
        let g = self.genus;
        let om = omega_index(g);
        let mut out = CurveClass::zero(g);
        for (a, b, c) in self.terms() {
            if a == om {
                out.add_term(b, c);
            }
        }
        out
    }
}

impl fmt::Debug for BiClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BiClass(g={};", self.genus)?;
        for (a, b, c) in self.terms() {
            write!(f, " {}*{}⊗{}", c, basis_name(self.genus, a), basis_name(self.genus, b))?;
        }
        write!(f, ")")
    }
}

/// Intersection pairing matrix `P[b][a] = ∫ e_b · e_a`.
fn pairing_matrix(genus: u32) -> Vec<Vec<Q>> {
    let n = basis_size(genus);
    let om = omega_index(genus);
    (0..n)
        .map(|b| {
            (0..n)
                .map(|a| match basis_product(genus, b, a) {
                    Some((k, s)) if k == om => s,
                    _ => Q::zero(),
                })
                .collect()
        })
        .collect()
}

fn solve_diagonal(genus: u32) -> BiClass {
    // The kernel property Σ_a P[b][a] D[a][c] = δ_bc pins D = P^{-1}.
    let inv = linalg::inverse(&pairing_matrix(genus)).expect("intersection pairing is non-degenerate");
    let mut out = BiClass::zero(genus);
    for (a, row) in inv.iter().enumerate() {
        for (c, &v) in row.iter().enumerate() {
            out.add_term(a, c, v);
        }
    }
    out
}

/// Precomputed per-genus tables: the diagonal class and the Künneth
/// decompositions of `Δ_*(e_i)` for every basis class.
#[derive(Debug)]
pub struct CurveRing {
    genus: u32,
    diagonal: BiClass,
    push: Vec<Vec<(usize, usize, Q)>>,
}

impl CurveRing {
    /// Cached instance for genus `g`.
    pub fn get(genus: u32) -> Arc<CurveRing> {
        static CACHE: OnceLock<Mutex<HashMap<u32, Arc<CurveRing>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut guard = cache.lock().expect("curve ring cache poisoned");
        guard
            .entry(genus)
            .or_insert_with(|| Arc::new(CurveRing::build(genus)))
            .clone()
    }

    fn build(genus: u32) -> Self {
        let diagonal = solve_diagonal(genus);
        let push = (0..basis_size(genus))
            .map(|i| {
                let e = CurveClass::basis(genus, i).expect("in range");
                push_with(&diagonal, &e).terms().collect()
            })
            .collect();
        CurveRing { genus, diagonal, push }
    }

    pub fn genus(&self) -> u32 {
        self.genus
    }

    pub fn basis_size(&self) -> usize {
        basis_size(self.genus)
    }

    pub fn diagonal(&self) -> &BiClass {
        &self.diagonal
    }

    /// Künneth terms of `Δ_*(e_i)`.
    pub fn push_basis(&self, index: usize) -> &[(usize, usize, Q)] {
        &self.push[index]
    }
}

fn push_with(diagonal: &BiClass, gamma: &CurveClass) -> BiClass {
    let lifted = BiClass::tensor(gamma, &CurveClass::unit(gamma.genus)).expect("same genus");
    lifted.mul(diagonal).expect("same genus")
}

/// The class of the diagonal in `C × C`.
pub fn diagonal_class(genus: u32) -> BiClass {
    CurveRing::get(genus).diagonal.clone()
}

/// `Δ_*(γ) = (γ ⊗ 1)·δ`.
pub fn push_diagonal(gamma: &CurveClass) -> BiClass {
    push_with(CurveRing::get(gamma.genus).diagonal(), gamma)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(g: u32, i: usize) -> CurveClass {
        CurveClass::basis(g, i).unwrap()
    }

    #[test]
    fn unit_is_identity() {
        for g in 0..3 {
            for i in 0..basis_size(g) {
                assert_eq!(CurveClass::unit(g).mul(&e(g, i)).unwrap(), e(g, i));
            }
        }
    }

    #[test]
    fn odd_classes_anticommute_in_genus_one() {
        let (a, b, w) = (e(1, 1), e(1, 2), CurveClass::omega(1));
        assert_eq!(a.mul(&b).unwrap(), w);
        assert_eq!(b.mul(&a).unwrap(), w.scale(-Q::one()));
        assert!(a.mul(&a).unwrap().is_zero());
    }

    #[test]
    fn integrate_examples() {
        assert_eq!(CurveClass::unit(2).integrate(), Q::zero());
        assert_eq!(CurveClass::omega(2).integrate(), Q::one());
        let x = CurveClass::omega(0).scale(Q::from_int(3)).add(&CurveClass::unit(0).scale(Q::from_int(2))).unwrap();
        assert_eq!(x.integrate(), Q::from_int(3));
    }

    #[test]
    fn genus_mismatch_is_an_error() {
        assert_eq!(CurveClass::unit(0).mul(&CurveClass::unit(1)), Err(Error::GenusMismatch(0, 1)));
        assert!(CurveClass::basis(0, 2).is_err());
    }

    #[test]
    fn diagonal_genus_zero_and_one() {
        let d0 = diagonal_class(0);
        let mut expect = BiClass::zero(0);
        expect.add_term(0, 1, Q::one());
        expect.add_term(1, 0, Q::one());
        assert_eq!(d0, expect);

        let d1 = diagonal_class(1);
        assert_eq!(d1.coeff(0, 3), Q::one());
        assert_eq!(d1.coeff(3, 0), Q::one());
        assert_eq!(d1.coeff(1, 2), -Q::one());
        assert_eq!(d1.coeff(2, 1), Q::one());
        assert_eq!(d1.terms().count(), 4);
    }

    #[test]
    fn push_examples() {
        assert_eq!(push_diagonal(&CurveClass::unit(0)), diagonal_class(0));
        for g in 0..4 {
            let w = CurveClass::omega(g);
            assert_eq!(push_diagonal(&w), BiClass::tensor(&w, &w).unwrap());
        }
    }

    #[test]
    fn canonical_class_degree() {
        for g in 0..5 {
            assert_eq!(CurveClass::canonical(g).integrate(), Q::from_int(2 * g as i64 - 2));
        }
    }

    #[test]
    fn json_shape() {
        let x = e(1, 2).scale(Q::new(1, 2));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"{"g":1,"coeffs":{"2":"1/2"}}"#);
        let back: CurveClass = serde_json::from_str(&s).unwrap();
        assert_eq!(back, x);
        assert!(serde_json::from_str::<CurveClass>(r#"{"g":0,"coeffs":{"5":"1/1"}}"#).is_err());
    }
}
