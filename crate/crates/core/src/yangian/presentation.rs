//! The defining relations of the shifted Yangian as data.
//!
//! Each relation family is a pair of formal expressions in the symbols
//! `e_k^(v)`, `f_k^(v)`, `m_k^(t)`, `h_k^(l)` and `hbar`, together with the
//! set of node pairs `(i, j)` it is imposed for. Superscripts are affine in
//! the free variables `s, t, u`, the summation variable `l`, the rank `r`
//! and the shift `delta(i,n)*r`.
//!
//! The ASCII form of a relation, e.g.
//! `R11 [all i,j]: [f_j^(t), m_i^(s)]/hbar = -delta(i,j) sum_{l=0}^{s-1}(...)`,
//! is produced by [`Relation::render`] and read back by [`parse_relation`].

use std::fmt;

use serde::Serialize;

use crate::error::{ParseError, Result};

/// Generator symbol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Sym {
    E,
    F,
    M,
    H,
}

impl Sym {
    fn letter(self) -> char {
        match self {
            Sym::E => 'e',
            Sym::F => 'f',
            Sym::M => 'm',
            Sym::H => 'h',
        }
    }
}

/// Node index of a generator.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Node {
    I,
    J,
    IMinus1,
}

impl Node {
    fn render(self) -> &'static str {
        match self {
            Node::I => "i",
            Node::J => "j",
            Node::IMinus1 => "i-1",
        }
    }

    pub fn resolve(self, i: usize, j: usize) -> usize {
        match self {
            Node::I => i,
            Node::J => j,
            Node::IMinus1 => i - 1,
        }
    }
}

/// Variables appearing in superscripts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum Var {
    S,
    T,
    U,
    L,
    R,
}

impl Var {
    const ALL: [Var; 5] = [Var::S, Var::T, Var::U, Var::L, Var::R];

    fn name(self) -> char {
        match self {
            Var::S => 's',
            Var::T => 't',
            Var::U => 'u',
            Var::L => 'l',
            Var::R => 'r',
        }
    }

    fn from_char(c: char) -> Option<Var> {
        Var::ALL.into_iter().find(|v| v.name() == c)
    }
}

/// `constant + Σ coeff·var + shift·delta(i,n)·r`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize)]
pub struct Affine {
    pub constant: i64,
    pub coeffs: [i64; 5],
    pub shift: i64,
}

/// Values of the superscript variables at one grid point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Env {
    pub vars: [i64; 5],
    /// `delta(i,n)` for the current node assignment.
    pub at_last_node: bool,
}

impl Env {
    pub fn new(s: i64, t: i64, u: i64, r: i64, at_last_node: bool) -> Self {
        Env { vars: [s, t, u, 0, r], at_last_node }
    }

    pub fn with(&self, var: Var, value: i64) -> Self {
        let mut out = *self;
        out.vars[var as usize] = value;
        out
    }
}

impl Affine {
    pub fn constant(c: i64) -> Self {
        Affine { constant: c, ..Affine::default() }
    }

    pub fn var(v: Var) -> Self {
        let mut a = Affine::default();
        a.coeffs[v as usize] = 1;
        a
    }

    pub fn plus(mut self, c: i64) -> Self {
        self.constant += c;
        self
    }

    pub fn add_var(mut self, v: Var, k: i64) -> Self {
        self.coeffs[v as usize] += k;
        self
    }

    pub fn with_shift(mut self, k: i64) -> Self {
        self.shift += k;
        self
    }

    pub fn eval(&self, env: &Env) -> i64 {
        let mut x = self.constant;
        for (c, v) in self.coeffs.iter().zip(env.vars) {
            x += c * v;
        }
        if env.at_last_node {
            x += self.shift * env.vars[Var::R as usize];
        }
        x
    }

    /// Variables with nonzero coefficient, in declaration order.
    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        Var::ALL.into_iter().filter(|v| self.coeffs[*v as usize] != 0)
    }

    fn render(&self) -> String {
        let mut out = String::new();
        let push = |k: i64, body: &str, out: &mut String| {
            if k == 0 {
                return;
            }
            let sign = if k < 0 { "-" } else if out.is_empty() { "" } else { "+" };
            let mag = k.unsigned_abs();
            if mag == 1 {
                out.push_str(&format!("{sign}{body}"));
            } else {
                out.push_str(&format!("{sign}{mag}*{body}"));
            }
        };
        for v in Var::ALL {
            push(self.coeffs[v as usize], &v.name().to_string(), &mut out);
        }
        push(self.shift, "delta(i,n)*r", &mut out);
        if self.constant != 0 || out.is_empty() {
            let sign = if self.constant < 0 { "-" } else if out.is_empty() { "" } else { "+" };
            out.push_str(&format!("{sign}{}", self.constant.unsigned_abs()));
        }
        out
    }
}

/// Formal noncommutative expression. Products are read left to right as
/// operator compositions.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub enum Expr {
    Zero,
    Gen { sym: Sym, node: Node, sup: Affine },
    Hbar,
    /// Kronecker delta of two nodes, as a scalar factor.
    Delta(Node, Node),
    /// `(-1)^exponent`, as a scalar factor.
    Sign(Affine),
    Comm(Box<Expr>, Box<Expr>),
    OverHbar(Box<Expr>),
    Prod(Vec<Expr>),
    Sum(Vec<Expr>),
    Neg(Box<Expr>),
    /// `Σ_{var=lo}^{hi} body`.
    SumOver { var: Var, lo: Affine, hi: Affine, body: Box<Expr> },
}

pub fn gen(sym: Sym, node: Node, sup: Affine) -> Expr {
    Expr::Gen { sym, node, sup }
}

pub fn comm(a: Expr, b: Expr) -> Expr {
    Expr::Comm(Box::new(a), Box::new(b))
}

pub fn over_hbar(a: Expr) -> Expr {
    Expr::OverHbar(Box::new(a))
}

pub fn neg(a: Expr) -> Expr {
    Expr::Neg(Box::new(a))
}

pub fn prod(mut factors: Vec<Expr>) -> Expr {
    if factors.len() == 1 {
        factors.pop().unwrap()
    } else {
        Expr::Prod(factors)
    }
}

pub fn sum(mut terms: Vec<Expr>) -> Expr {
    if terms.len() == 1 {
        terms.pop().unwrap()
    } else {
        Expr::Sum(terms)
    }
}

impl Expr {
    /// Visits every generator symbol.
    pub fn for_each_gen(&self, f: &mut impl FnMut(Sym, Node, &Affine)) {
        match self {
            Expr::Gen { sym, node, sup } => f(*sym, *node, sup),
            Expr::Zero | Expr::Hbar | Expr::Delta(..) | Expr::Sign(_) => {}
            Expr::Comm(a, b) => {
                a.for_each_gen(f);
                b.for_each_gen(f);
            }
            Expr::OverHbar(a) | Expr::Neg(a) => a.for_each_gen(f),
            Expr::Prod(xs) | Expr::Sum(xs) => xs.iter().for_each(|x| x.for_each_gen(f)),
            Expr::SumOver { body, .. } => body.for_each_gen(f),
        }
    }

    pub fn render(&self) -> String {
        match self {
            Expr::Zero => "0".into(),
            Expr::Gen { sym, node, sup } => format!("{}_{}^({})", sym.letter(), node.render(), sup.render()),
            Expr::Hbar => "hbar".into(),
            Expr::Delta(a, b) => format!("delta({},{})", a.render(), b.render()),
            Expr::Sign(a) => format!("(-1)^({})", a.render()),
            Expr::Comm(a, b) => format!("[{}, {}]", a.render(), b.render()),
            Expr::OverHbar(a) => format!("{}/hbar", a.render_factor()),
            Expr::Prod(xs) => xs.iter().map(Expr::render_factor).collect::<Vec<_>>().join(" "),
            Expr::Sum(xs) => {
                let mut out = String::new();
                for (k, x) in xs.iter().enumerate() {
                    match (k, x) {
                        (0, Expr::Neg(y)) => out.push_str(&format!("-{}", y.render_term())),
                        (0, y) => out.push_str(&y.render_term()),
                        (_, Expr::Neg(y)) => out.push_str(&format!(" - {}", y.render_term())),
                        (_, y) => out.push_str(&format!(" + {}", y.render_term())),
                    }
                }
                out
            }
            Expr::Neg(a) => format!("-{}", a.render_term()),
            Expr::SumOver { var, lo, hi, body } => {
                format!("sum_{{{}={}}}^{{{}}}({})", var.name(), lo.render(), hi.render(), body.render())
            }
        }
    }

    /// Rendering as a summand: sums and negations are parenthesized.
    fn render_term(&self) -> String {
        match self {
            Expr::Sum(_) | Expr::Neg(_) => format!("({})", self.render()),
            _ => self.render(),
        }
    }

    /// Rendering as a factor of a product.
    fn render_factor(&self) -> String {
        match self {
            Expr::Sum(_) | Expr::Neg(_) | Expr::Prod(_) | Expr::OverHbar(_) => format!("({})", self.render()),
            _ => self.render(),
        }
    }
}

/// The node pairs a relation family is imposed for.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IndexSet {
    /// All `i, j ∈ 1..=n`.
    AllPairs,
    /// All `i ∈ 1..=n`, with `j = i`.
    Diagonal,
    /// `i ∈ 2..=n`, with `j = i - 1`.
    Adjacent,
    /// `|i - j| > 1`.
    Far,
    /// `|i - j| = 1`.
    Near,
}

impl IndexSet {
    const ALL: [IndexSet; 5] = [IndexSet::AllPairs, IndexSet::Diagonal, IndexSet::Adjacent, IndexSet::Far, IndexSet::Near];

    fn label(self) -> &'static str {
        match self {
            IndexSet::AllPairs => "all i,j",
            IndexSet::Diagonal => "all i",
            IndexSet::Adjacent => "i >= 2",
            IndexSet::Far => "|i-j| > 1",
            IndexSet::Near => "|i-j| = 1",
        }
    }

    /// Node pairs `(i, j)` for rank `n`, in lexicographic order.
    pub fn pairs(self, n: usize) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for i in 1..=n {
            for j in 1..=n {
                let keep = match self {
                    IndexSet::AllPairs => true,
                    IndexSet::Diagonal => i == j,
                    IndexSet::Adjacent => j + 1 == i,
                    IndexSet::Far => i.abs_diff(j) > 1,
                    IndexSet::Near => i.abs_diff(j) == 1,
                };
                if keep {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// One relation family `lhs = rhs`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    /// `1..=12`.
    pub id: u8,
    pub index_set: IndexSet,
    pub lhs: Expr,
    pub rhs: Expr,
    /// Node pairs the family is instantiated at.
    pub instances: Vec<(usize, usize)>,
}

impl Relation {
    pub fn name(&self) -> String {
        format!("R{}", self.id)
    }

    pub fn render(&self) -> String {
        format!("R{} [{}]: {} = {}", self.id, self.index_set.label(), self.lhs.render(), self.rhs.render())
    }

    /// Symbols of both sides.
    pub fn symbols(&self) -> Vec<(Sym, Node)> {
        let mut out = Vec::new();
        let mut push = |s: Sym, n: Node, _: &Affine| {
            if !out.contains(&(s, n)) {
                out.push((s, n));
            }
        };
        self.lhs.for_each_gen(&mut push);
        self.rhs.for_each_gen(&mut push);
        out
    }

    /// Free superscript variables (`s`, `t`, `u`) in order of appearance.
    pub fn free_vars(&self) -> Vec<Var> {
        let mut out = Vec::new();
        let mut push = |_: Sym, _: Node, a: &Affine| {
            for v in a.vars() {
                if matches!(v, Var::S | Var::T | Var::U) && !out.contains(&v) {
                    out.push(v);
                }
            }
        };
        self.lhs.for_each_gen(&mut push);
        self.rhs.for_each_gen(&mut push);
        out.sort_by_key(|v| *v as usize);
        out
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn v(var: Var) -> Affine {
    Affine::var(var)
}

/// The twelve relation families for `Y^r(sl_{n+1})`, in order `R1..R12`.
pub fn load_presentation(n: usize, _r: usize) -> Vec<Relation> {
    use Node::{IMinus1, I, J};
    use Sym::{E, F, H, M};
    use Var::{L, S, T, U};

    let (s, t, u) = (v(S), v(T), v(U));
    let quadratic = |x: Sym, lhs_pairs: [(Affine, Affine); 2]| {
        let c = |(a, b): (Affine, Affine)| over_hbar(comm(gen(x, I, a), gen(x, I, b)));
        let lhs = sum(vec![c(lhs_pairs[0]), neg(c(lhs_pairs[1]))]);
        let rhs = sum(vec![prod(vec![gen(x, I, s), gen(x, I, t)]), prod(vec![gen(x, I, t), gen(x, I, s)])]);
        (lhs, rhs)
    };
    let serre = |x: Sym| {
        let inner = |a: Affine| comm(gen(x, I, a), gen(x, J, u));
        sum(vec![comm(gen(x, I, s), inner(t)), comm(gen(x, I, t), inner(s))])
    };
    let delta_sum = |body: Expr| {
        neg(prod(vec![
            Expr::Delta(I, J),
            Expr::SumOver { var: L, lo: Affine::constant(0), hi: s.plus(-1), body: Box::new(body) },
        ]))
    };

    let (r2l, r2r) = quadratic(E, [(s.plus(1), t), (s, t.plus(1))]);
    let (r7l, r7r) = quadratic(F, [(t, s.plus(1)), (t.plus(1), s)]);
    let families: Vec<(IndexSet, Expr, Expr)> = vec![
        (IndexSet::AllPairs, comm(gen(M, I, s), gen(M, J, t)), Expr::Zero),
        (IndexSet::Diagonal, r2l, r2r),
        (
            IndexSet::Adjacent,
            sum(vec![
                over_hbar(comm(gen(E, I, s), gen(E, IMinus1, t.plus(1)))),
                neg(over_hbar(comm(gen(E, I, s.plus(1)), gen(E, IMinus1, t)))),
            ]),
            prod(vec![gen(E, I, s), gen(E, IMinus1, t)]),
        ),
        (IndexSet::Far, comm(gen(E, I, s), gen(E, J, t)), Expr::Zero),
        (IndexSet::Near, serre(E), Expr::Zero),
        (
            IndexSet::AllPairs,
            over_hbar(comm(gen(M, I, s), gen(E, J, t))),
            delta_sum(prod(vec![
                gen(E, J, t.add_var(L, 1)),
                gen(M, I, s.add_var(L, -1).plus(-1)),
                Expr::Sign(v(L).plus(1)),
            ])),
        ),
        (IndexSet::Diagonal, r7l, r7r),
        (
            IndexSet::Adjacent,
            sum(vec![
                over_hbar(comm(gen(F, I, s.plus(1)), gen(F, IMinus1, t))),
                neg(over_hbar(comm(gen(F, I, s), gen(F, IMinus1, t.plus(1))))),
            ]),
            prod(vec![gen(F, I, t), gen(F, IMinus1, s)]),
        ),
        (IndexSet::Far, comm(gen(F, I, s), gen(F, J, t)), Expr::Zero),
        (IndexSet::Near, serre(F), Expr::Zero),
        (
            IndexSet::AllPairs,
            over_hbar(comm(gen(F, J, t), gen(M, I, s))),
            delta_sum(prod(vec![
                gen(M, I, s.add_var(L, -1).plus(-1)),
                gen(F, J, t.add_var(L, 1)),
                Expr::Sign(v(L).plus(1)),
            ])),
        ),
        (
            IndexSet::AllPairs,
            over_hbar(comm(gen(E, I, s), gen(F, J, t))),
            prod(vec![Expr::Delta(I, J), gen(H, I, s.add_var(T, 1).with_shift(-1).plus(1))]),
        ),
    ];
    families
        .into_iter()
        .enumerate()
        .map(|(k, (index_set, lhs, rhs))| Relation {
            id: k as u8 + 1,
            index_set,
            lhs,
            rhs,
            instances: index_set.pairs(n),
        })
        .collect()
}

/// Reads the ASCII form produced by [`Relation::render`]. Instances are
/// filled in for rank `n`.
pub fn parse_relation(text: &str, n: usize) -> Result<Relation> {
    let mut p = Parser { src: text.as_bytes(), pos: 0 };
    p.expect("R")?;
    let id = p.number()?;
    if !(1..=12).contains(&id) {
        return Err(p.err(format!("relation id {id} not in 1..=12")));
    }
    p.skip_ws();
    p.expect("[")?;
    let index_set = IndexSet::ALL
        .into_iter()
        .find(|s| p.rest().starts_with(s.label().as_bytes()))
        .ok_or_else(|| p.err("unknown index set".into()))?;
    p.pos += index_set.label().len();
    p.expect("]:")?;
    let lhs = p.expr()?;
    p.expect("=")?;
    let rhs = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.err("trailing input".into()));
    }
    Ok(Relation { id: id as u8, index_set, lhs, rhs, instances: index_set.pairs(n) })
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl Parser<'_> {
    fn err(&self, detail: String) -> crate::error::Error {
        ParseError::Relation { pos: self.pos, detail }.into()
    }

    fn rest(&self) -> &[u8] {
        &self.src[self.pos..]
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn looking_at(&mut self, s: &str) -> bool {
        self.skip_ws();
        self.rest().starts_with(s.as_bytes())
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.looking_at(s) {
            self.pos += s.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<()> {
        if self.eat(s) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{s}`")))
        }
    }

    fn number(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| self.err("expected a number".into()))
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut terms = Vec::new();
        let mut negate = self.eat("-");
        loop {
            let t = self.term()?;
            terms.push(if negate { neg(t) } else { t });
            if self.eat("+") {
                negate = false;
            } else if self.eat("-") {
                negate = true;
            } else {
                break;
            }
        }
        Ok(sum(terms))
    }

    fn term(&mut self) -> Result<Expr> {
        let mut factors = vec![self.factor()?];
        while matches!(self.peek(), Some(b'e' | b'f' | b'm' | b'h' | b'd' | b's' | b'[' | b'(' | b'0')) {
            factors.push(self.factor()?);
        }
        Ok(prod(factors))
    }

    fn factor(&mut self) -> Result<Expr> {
        let x = self.primary()?;
        Ok(if self.eat("/hbar") { over_hbar(x) } else { x })
    }

    fn primary(&mut self) -> Result<Expr> {
        if self.eat("hbar") {
            return Ok(Expr::Hbar);
        }
        if self.eat("delta(") {
            let a = self.node()?;
            self.expect(",")?;
            let b = self.node()?;
            self.expect(")")?;
            return Ok(Expr::Delta(a, b));
        }
        if self.eat("(-1)^(") {
            let a = self.affine()?;
            self.expect(")")?;
            return Ok(Expr::Sign(a));
        }
        if self.eat("sum_{") {
            let var = self.var()?;
            self.expect("=")?;
            let lo = self.affine()?;
            self.expect("}^{")?;
            let hi = self.affine()?;
            self.expect("}(")?;
            let body = self.expr()?;
            self.expect(")")?;
            return Ok(Expr::SumOver { var, lo, hi, body: Box::new(body) });
        }
        if self.eat("[") {
            let a = self.expr()?;
            self.expect(",")?;
            let b = self.expr()?;
            self.expect("]")?;
            return Ok(comm(a, b));
        }
        if self.eat("(") {
            let a = self.expr()?;
            self.expect(")")?;
            return Ok(a);
        }
        if self.eat("0") {
            return Ok(Expr::Zero);
        }
        let sym = match self.peek() {
            Some(b'e') => Sym::E,
            Some(b'f') => Sym::F,
            Some(b'm') => Sym::M,
            Some(b'h') => Sym::H,
            _ => return Err(self.err("expected an expression".into())),
        };
        self.pos += 1;
        self.expect("_")?;
        let node = self.node()?;
        self.expect("^(")?;
        let sup = self.affine()?;
        self.expect(")")?;
        Ok(gen(sym, node, sup))
    }

    fn node(&mut self) -> Result<Node> {
        if self.eat("i-1") {
            Ok(Node::IMinus1)
        } else if self.eat("i") {
            Ok(Node::I)
        } else if self.eat("j") {
            Ok(Node::J)
        } else {
            Err(self.err("expected a node index".into()))
        }
    }

    fn var(&mut self) -> Result<Var> {
        let c = self.peek().map(char::from).and_then(Var::from_char).ok_or_else(|| self.err("expected a variable".into()))?;
        self.pos += 1;
        Ok(c)
    }

    fn affine(&mut self) -> Result<Affine> {
        let mut out = Affine::default();
        let mut sign = if self.eat("-") { -1 } else { 1 };
        loop {
            if self.eat("delta(i,n)*r") {
                out.shift += sign;
            } else if self.peek().is_some_and(|c| c.is_ascii_digit()) {
                let k = self.number()?;
                if self.eat("*") {
                    let v = self.var()?;
                    out.coeffs[v as usize] += sign * k;
                } else {
                    out.constant += sign * k;
                }
            } else {
                let v = self.var()?;
                out.coeffs[v as usize] += sign;
            }
            if self.eat("+") {
                sign = 1;
            } else if self.looking_at("-") {
                self.pos += 1;
                sign = -1;
            } else {
                return Ok(out);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn family_sizes() {
        let rels = load_presentation(1, 1);
        assert_eq!(rels.len(), 12);
        for id in [3, 8] {
            assert!(rels[id - 1].instances.is_empty());
        }
        let rels = load_presentation(2, 2);
        for id in [4, 9] {
            assert!(rels[id - 1].instances.is_empty());
        }
        assert_eq!(rels[2].instances, vec![(2, 1)]);
        assert_eq!(rels[4].instances, vec![(1, 2), (2, 1)]);
        let rels = load_presentation(4, 1);
        assert_eq!(rels[3].instances, vec![(1, 3), (1, 4), (2, 4), (3, 1), (4, 1), (4, 2)]);
    }

    #[test]
    fn shift_only_at_last_node() {
        for n in 1..=3 {
            let r = 2;
            let rel = &load_presentation(n, r)[11];
            let mut sup = None;
            rel.rhs.for_each_gen(&mut |s, _, a| {
                if s == Sym::H {
                    sup = Some(*a);
                }
            });
            let sup = sup.unwrap();
            for &(i, _) in &rel.instances {
                let env = Env::new(0, 0, 0, r as i64, i == n);
                assert_eq!(sup.eval(&env), if i == n { 1 - r as i64 } else { 1 });
            }
        }
    }

    #[test]
    fn rendering_examples() {
        let rels = load_presentation(2, 2);
        assert_eq!(rels[0].render(), "R1 [all i,j]: [m_i^(s), m_j^(t)] = 0");
        assert_eq!(
            rels[1].render(),
            "R2 [all i]: [e_i^(s+1), e_i^(t)]/hbar - [e_i^(s), e_i^(t+1)]/hbar = e_i^(s) e_i^(t) + e_i^(t) e_i^(s)"
        );
        assert_eq!(
            rels[10].render(),
            "R11 [all i,j]: [f_j^(t), m_i^(s)]/hbar = -delta(i,j) sum_{l=0}^{s-1}(m_i^(s-l-1) f_j^(t+l) (-1)^(l+1))"
        );
        assert_eq!(rels[11].render(), "R12 [all i,j]: [e_i^(s), f_j^(t)]/hbar = delta(i,j) h_i^(s+t-delta(i,n)*r+1)");
    }

    #[test]
    fn round_trip() {
        for n in 1..=3 {
            for rel in load_presentation(n, 2) {
                let text = rel.render();
                let back = parse_relation(&text, n).unwrap();
                assert_eq!(back, rel, "{text}");
            }
        }
    }

    #[test]
    fn parse_errors() {
        assert!(parse_relation("R13 [all i]: 0 = 0", 1).is_err());
        assert!(parse_relation("R1 [all i]: [m_i^(s), m_k^(t)] = 0", 1).is_err());
        assert!(parse_relation("R1 [all i]: 0 = 0 junk", 1).is_err());
        let e = parse_relation("R1 [nowhere]: 0 = 0", 1).unwrap_err();
        assert!(matches!(e, crate::error::Error::Parse(ParseError::Relation { .. })));
    }

    #[test]
    fn free_variables() {
        let rels = load_presentation(2, 1);
        assert_eq!(rels[4].free_vars(), vec![Var::S, Var::T, Var::U]);
        assert_eq!(rels[10].free_vars(), vec![Var::S, Var::T]);
    }
}
