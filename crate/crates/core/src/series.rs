//! Truncated series in `t_1..t_n, z` and the Poincaré product formula.
//!
//! Exponents are stored as raw dvecs; the product variables
//! `T_k = t_k·t_{k+1}···t_n` are expanded when the formula is evaluated.
//! Truncation keeps only terms with `d_n <= bound`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::fock::{for_each_basis, ModelParams};

/// Integer polynomial in `z`, lowest degree first, without trailing zeros.
pub type ZPoly = Vec<i64>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruncSeries {
    n: usize,
    bound: u32,
    coeffs: BTreeMap<(Vec<u32>, u32), i64>,
}

fn trim(mut p: ZPoly) -> ZPoly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

impl TruncSeries {
    pub fn zero(n: usize, bound: u32) -> Self {
        TruncSeries { n, bound, coeffs: BTreeMap::new() }
    }

    pub fn one(n: usize, bound: u32) -> Self {
        Self::monomial(n, bound, vec![0; n], 0, 1)
    }

    /// `c·t^dvec·z^zdeg`, or zero if it lies beyond the bound.
    pub fn monomial(n: usize, bound: u32, dvec: Vec<u32>, zdeg: u32, c: i64) -> Self {
        assert_eq!(dvec.len(), n, "dvec length");
        let mut s = Self::zero(n, bound);
        s.add_term(dvec, zdeg, c);
        s
    }

    /// `T_k^m z^zdeg` with `T_k = t_k···t_n` (`k` is 1-based).
    pub fn t_power(n: usize, bound: u32, k: usize, m: u32, zdeg: u32) -> Self {
        let dvec = (1..=n).map(|i| if i >= k { m } else { 0 }).collect();
        Self::monomial(n, bound, dvec, zdeg, 1)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn bound(&self) -> u32 {
        self.bound
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    fn add_term(&mut self, dvec: Vec<u32>, zdeg: u32, c: i64) {
        if c == 0 || dvec[self.n - 1] > self.bound {
            return;
        }
        let key = (dvec, zdeg);
        let v = self.coeffs.entry(key.clone()).or_insert(0);
        *v = v.checked_add(c).expect("series coefficient overflow");
        if *v == 0 {
            self.coeffs.remove(&key);
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[u32], u32, i64)> + '_ {
        self.coeffs.iter().map(|((d, z), &c)| (d.as_slice(), *z, c))
    }

    pub fn coeff(&self, dvec: &[u32], zdeg: u32) -> i64 {
        self.coeffs.get(&(dvec.to_vec(), zdeg)).copied().unwrap_or(0)
    }

    /// Coefficient of `t^dvec` as a polynomial in `z`.
    pub fn z_poly(&self, dvec: &[u32]) -> ZPoly {
        let lo = (dvec.to_vec(), 0);
        let mut out = Vec::new();
        for ((d, z), &c) in self.coeffs.range(lo..) {
            if d.as_slice() != dvec {
                break;
            }
            let z = *z as usize;
            if out.len() <= z {
                out.resize(z + 1, 0);
            }
            out[z] = c;
        }
        trim(out)
    }

    /// Distinct dvecs carrying a nonzero coefficient.
    pub fn dvecs(&self) -> Vec<Vec<u32>> {
        let mut out: Vec<Vec<u32>> = Vec::new();
        for (d, _) in self.coeffs.keys() {
            if out.last() != Some(d) {
                out.push(d.clone());
            }
        }
        out
    }

    fn check_shape(&self, other: &Self) {
        assert_eq!((self.n, self.bound), (other.n, other.bound), "series shape mismatch");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check_shape(other);
        let mut out = self.clone();
        for (d, z, c) in other.terms() {
            out.add_term(d.to_vec(), z, c);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    pub fn scale(&self, k: i64) -> Self {
        let mut out = Self::zero(self.n, self.bound);
        for (d, z, c) in self.terms() {
            out.add_term(d.to_vec(), z, c.checked_mul(k).expect("series coefficient overflow"));
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check_shape(other);
        let mut out = Self::zero(self.n, self.bound);
        for (d1, z1, c1) in self.terms() {
            for (d2, z2, c2) in other.terms() {
                if d1[self.n - 1] + d2[self.n - 1] > self.bound {
                    continue;
                }
                let d = d1.iter().zip(d2).map(|(a, b)| a + b).collect();
                out.add_term(d, z1 + z2, c1.checked_mul(c2).expect("series coefficient overflow"));
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(self.n, self.bound), |acc, _| acc.mul(self))
    }

    /// `1 / (1 - T_k z^a)`, expanded to the bound.
    pub fn geometric(n: usize, bound: u32, k: usize, a: u32) -> Self {
        let mut out = Self::zero(n, bound);
        for m in 0..=bound {
            out = out.add(&Self::t_power(n, bound, k, m, a * m));
        }
        out
    }
}

/// `Π_{k=1}^n Π_{i=0}^{r-1} (1 + T_k z^{2i+1})^{2g} / ((1 - T_k z^{2i})(1 - T_k z^{2i+2}))`.
pub fn poincare_product(params: &ModelParams) -> TruncSeries {
    let (n, bound) = (params.n, params.bound);
    let mut out = TruncSeries::one(n, bound);
    for k in 1..=n {
        for i in 0..params.r as u32 {
            let odd = TruncSeries::one(n, bound).add(&TruncSeries::t_power(n, bound, k, 1, 2 * i + 1));
            out = out
                .mul(&odd.pow(2 * params.g))
                .mul(&TruncSeries::geometric(n, bound, k, 2 * i))
                .mul(&TruncSeries::geometric(n, bound, k, 2 * i + 2));
        }
    }
    out
}

/// Counts basis monomials of the given dvec by cohomological degree.
pub fn poincare_enumerate(params: &ModelParams, dvec: &[u32]) -> Result<ZPoly> {
    let mut out: ZPoly = Vec::new();
    for_each_basis(params, dvec, |m| {
        let z = m.cohdeg(params.g) as usize;
        if out.len() <= z {
            out.resize(z + 1, 0);
        }
        out[z] += 1;
    })?;
    Ok(trim(out))
}

/// Macdonald's series `(1 + zt)^{2g} / ((1 - t)(1 - z^2 t))` for symmetric
/// products of a genus-`g` curve, up to `t^bound`.
pub fn macdonald_series(g: u32, bound: u32) -> TruncSeries {
    let one = TruncSeries::one(1, bound);
    let odd = one.add(&TruncSeries::t_power(1, bound, 1, 1, 1));
    odd.pow(2 * g).mul(&TruncSeries::geometric(1, bound, 1, 0)).mul(&TruncSeries::geometric(1, bound, 1, 2))
}

/// `true` if `p` is palindromic of the given degree.
pub fn is_palindromic(p: &[i64], degree: usize) -> bool {
    if p.len() != degree + 1 {
        return false;
    }
    (0..=degree).all(|i| p[i] == p[degree - i])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CellComparison {
    pub dvec: Vec<u32>,
    pub formula: ZPoly,
    pub enumerated: ZPoly,
    pub agree: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComparisonReport {
    pub params: ModelParams,
    pub cells: Vec<CellComparison>,
}

impl ComparisonReport {
    pub fn success(&self) -> bool {
        self.cells.iter().all(|c| c.agree)
    }
}

/// Compares the product formula with basis enumeration on every cell.
pub fn compare(params: &ModelParams) -> ComparisonReport {
    let series = poincare_product(params);
    let cells = params
        .cells()
        .into_par_iter()
        .map(|dvec| {
            let formula = series.z_poly(&dvec);
            let enumerated = poincare_enumerate(params, &dvec).expect("cell within bound");
            let agree = formula == enumerated;
            CellComparison { dvec, formula, enumerated, agree }
        })
        .collect();
    ComparisonReport { params: *params, cells }
}

/// One row of a Betti table.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BettiRow {
    pub dvec: Vec<u32>,
    pub zdeg: u32,
    pub betti: i64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub agree: Option<bool>,
}

/// Rows of the product-formula Betti table for the given cells; zero Betti
/// numbers are omitted.
pub fn betti_rows(series: &TruncSeries, cells: &[Vec<u32>]) -> Vec<BettiRow> {
    let mut rows = Vec::new();
    for dvec in cells {
        let p = series.z_poly(dvec);
        for (z, &b) in p.iter().enumerate().filter(|(_, &b)| b != 0) {
            rows.push(BettiRow { dvec: dvec.clone(), zdeg: z as u32, betti: b, agree: None });
        }
    }
    rows
}

/// CSV with columns `d_1..d_n, zdeg, betti` and, if present, `agree`.
pub fn betti_csv(n: usize, rows: &[BettiRow]) -> String {
    let mut out = String::new();
    let mut header: Vec<String> = (1..=n).map(|i| format!("d_{i}")).collect();
    header.push("zdeg".into());
    header.push("betti".into());
    let checked = rows.iter().any(|r| r.agree.is_some());
    if checked {
        header.push("agree".into());
    }
    out.push_str(&header.join(","));
    out.push('\n');
    for row in rows {
        for d in &row.dvec {
            write!(out, "{d},").unwrap();
        }
        write!(out, "{},{}", row.zdeg, row.betti).unwrap();
        if let Some(a) = row.agree {
            write!(out, ",{a}").unwrap();
        }
        out.push('\n');
    }
    out
}

pub fn betti_json(rows: &[BettiRow]) -> String {
    serde_json::to_string_pretty(rows).expect("rows serialize")
}
