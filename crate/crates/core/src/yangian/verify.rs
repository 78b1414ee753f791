//! Checking relation families as operator identities on the truncated module.
//!
//! A family is computable when it contains no `e` or `h` symbol and all its
//! `f` symbols sit at one node `k`; it is then checked on `H_k` (or on `H_n`
//! when there is no `f`), with `f_k` realized by `b_k` and `m_k^(t)` by
//! multiplication with `c_t(E_k)`. Everything else is reported as skipped.
//!
//! A relation `Σ ε [x, y]/hbar = R` is checked in its two-point form
//! `Σ ε [x, y] = -δ·R`: the commutators are evaluated with one color per
//! superscript variable (`s`, `t`, `u` color the first, second and third
//! point), and `δ·R` at `γ₁ ⊠ γ₂` is `R` colored by `γ₁γ₂`. Products inside
//! `R` are composed through `Δ_*` of their color.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::presentation::{load_presentation, Env, Expr, Node, Relation, Sym, Var};
use crate::curve::{basis_parity, CurveClass};
use crate::error::{Error, Result};
use crate::fock::{enumerate_filtration, normalize_keys, FockElement, GeneratorKey, ModelParams, Monomial};
use crate::operators::{Model, Strategy};
use crate::rational::Q;

/// Reason reported for families containing `e` or `h`.
pub const SKIP_E: &str = "e_k not computable in model (no closed formula for this operator)";
/// Reason reported for families mixing `f` symbols at different nodes.
pub const SKIP_F: &str = "f_k outside H_k not computable in model (no closed formula for this operator)";

/// Name of the `[b, a]` bracket check.
pub const BRACKET: &str = "BA";
/// Name of the randomized strategy-confluence check.
pub const CONFLUENCE: &str = "CONF";

/// Which part of the module, and which superscripts and colors, to test.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Grid {
    /// Inclusive range for `s`. Defaults: `1..=r` when `s` labels an `m`
    /// in a commutator, otherwise `0..=r`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<[i64; 2]>,
    /// Inclusive range for `t`. Defaults: `1..=r` for `m`, `0..=2` for `f`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub t: Option<[i64; 2]>,
    /// Color pairs `(c₁, c₂)`; all pairs when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub colors: Option<Vec<[usize; 2]>>,
    /// Basis monomials to test on, as generator lists; every monomial of
    /// the relevant `H_k` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<Vec<Vec<GeneratorKey>>>,
    /// Number of random samples for the confluence check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    /// Seed for the confluence check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

impl Grid {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedGrid(e.to_string()))
    }

    /// Checks ranges, colors and basis entries against the parameters.
    pub fn validate(&self, params: &ModelParams) -> Result<()> {
        for (name, range) in [("s", self.s), ("t", self.t)] {
            if let Some([lo, hi]) = range {
                if lo < 0 || lo > hi {
                    return Err(Error::MalformedGrid(format!("range {name} = [{lo}, {hi}] is empty or negative")));
                }
            }
        }
        if let Some(colors) = &self.colors {
            if let Some(bad) = colors.iter().flatten().find(|&&c| c >= params.colors()) {
                return Err(Error::MalformedGrid(format!("color {bad} out of range for genus {}", params.g)));
            }
        }
        if let Some(basis) = &self.basis {
            for keys in basis {
                let x = FockElement::normalize(params, keys, Q::one()).map_err(|e| Error::MalformedGrid(e.to_string()))?;
                if x.len() != 1 {
                    return Err(Error::MalformedGrid(format!("basis entry {keys:?} is not a nonzero monomial")));
                }
                for (m, _) in x.terms() {
                    params.check_dvec(&m.dvec(params.n)).map_err(|e| Error::MalformedGrid(e.to_string()))?;
                }
            }
        }
        Ok(())
    }
}

/// A reproducible counterexample.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    /// Node pair `(i, j)` of the instance.
    pub nodes: (usize, usize),
    /// Superscript variables as `(name, value)`.
    pub vars: Vec<(String, i64)>,
    pub colors: Vec<usize>,
    /// The input basis monomial.
    pub input: Vec<GeneratorKey>,
    pub input_text: String,
    /// `lhs - rhs` applied to the input.
    pub difference: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum Status {
    Verified { checks: usize, grid: String },
    Skipped { reason: String },
    Failed { witness: Box<Witness> },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RelationReport {
    pub relation: String,
    pub text: String,
    #[serde(flatten)]
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub params: ModelParams,
    pub relations: Vec<RelationReport>,
}

impl VerificationReport {
    pub fn success(&self) -> bool {
        !self.relations.iter().any(|r| matches!(r.status, Status::Failed { .. }))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// One line per relation.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for r in &self.relations {
            let line = match &r.status {
                Status::Verified { checks, grid } => format!("{}: verified ({checks} checks; {grid})", r.relation),
                Status::Skipped { reason } => format!("{}: skipped ({reason})", r.relation),
                Status::Failed { witness } => format!(
                    "{}: FAILED at nodes {:?}, vars {:?}, colors {:?}, input {}: difference {}",
                    r.relation, witness.nodes, witness.vars, witness.colors, witness.input_text, witness.difference
                ),
            };
            out.push_str(&line);
            out.push('\n');
        }
        out
    }
}

/// Relation selectors accepted by [`verify`]: `R1`..`R12`, `BA`, `CONF`.
pub fn selectors() -> Vec<String> {
    let mut out: Vec<String> = (1..=12).map(|k| format!("R{k}")).collect();
    out.push(BRACKET.into());
    out.push(CONFLUENCE.into());
    out
}

/// Verifies one selector (`R1`..`R12`, `BA`, `CONF`) or `all`.
pub fn verify(selector: &str, params: &ModelParams, grid: &Grid) -> Result<VerificationReport> {
    let model = Model::new(*params)?;
    grid.validate(params)?;
    let wanted: Vec<String> = if selector.eq_ignore_ascii_case("all") {
        selectors()
    } else {
        let s = selector.to_ascii_uppercase();
        if !selectors().contains(&s) {
            return Err(Error::UnknownRelation(selector.to_string()));
        }
        vec![s]
    };
    let presentation = load_presentation(params.n, params.r);
    let mut relations = Vec::new();
    for name in wanted {
        let report = match name.as_str() {
            BRACKET => RelationReport {
                relation: name.clone(),
                text: "[b_k^(j)(phi), a_k^(i)(gamma)] = colored bracket".into(),
                status: check_bracket(&model, grid)?,
            },
            CONFLUENCE => RelationReport {
                relation: name.clone(),
                text: "b-strings agree under both reduction strategies".into(),
                status: check_confluence(&model, grid)?,
            },
            _ => {
                let rel = presentation.iter().find(|r| r.name() == name).expect("selector is a relation");
                RelationReport { relation: name.clone(), text: rel.render(), status: check_relation(&model, rel, grid)? }
            }
        };
        relations.push(report);
    }
    Ok(VerificationReport { params: *params, relations })
}

/// Why a family cannot be evaluated, or `None` when it can.
pub fn skip_reason(rel: &Relation) -> Option<&'static str> {
    let syms = rel.symbols();
    if syms.iter().any(|(s, _)| matches!(s, Sym::E | Sym::H)) {
        return Some(SKIP_E);
    }
    let mut f_nodes = syms.iter().filter(|(s, _)| *s == Sym::F).map(|(_, n)| *n);
    if let Some(first) = f_nodes.next() {
        if f_nodes.any(|n| n != first) {
            return Some(SKIP_F);
        }
    }
    None
}

/// The node whose filtration step the family is checked on.
fn domain_node(rel: &Relation) -> Option<Node> {
    rel.symbols().into_iter().find(|(s, _)| *s == Sym::F).map(|(_, n)| n)
}

fn check_relation(model: &Model, rel: &Relation, grid: &Grid) -> Result<Status> {
    if let Some(reason) = skip_reason(rel) {
        return Ok(Status::Skipped { reason: reason.into() });
    }
    let params = model.params();
    let vars = rel.free_vars();
    let ranges: Vec<(Var, [i64; 2])> = vars.iter().map(|&v| (v, var_range(rel, v, params.r as i64, grid))).collect();
    let colors = color_tuples(params, grid, vars.len());
    let (instances, outside) = checkable_instances(rel);
    let mut points = Vec::new();
    for &(i, j) in &instances {
        let level = domain_node(rel).map_or(params.n, |node| node.resolve(i, j));
        let basis = basis_in(params, grid, level);
        for env in assignments(&ranges, Env::new(0, 0, 0, params.r as i64, i == params.n)) {
            for cs in &colors {
                for mono in &basis {
                    points.push(((i, j), env, cs.clone(), mono.clone()));
                }
            }
        }
    }
    let checks = points.len();
    let failure = points
        .par_iter()
        .map(|((i, j), env, cs, mono)| -> Result<Option<Witness>> {
            let ctx = Ctx { model, i: *i, j: *j };
            let x = FockElement::monomial(mono.clone());
            let diff = ctx.relation_difference(rel, env, cs, &x)?;
            Ok((!diff.is_zero()).then(|| Witness {
                nodes: (*i, *j),
                vars: vars.iter().map(|v| (var_name(*v), env.vars[*v as usize])).collect(),
                colors: cs.clone(),
                input: mono.keys().to_vec(),
                input_text: mono.display(params.g),
                difference: diff.display(params.g),
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(match failure {
        Some(w) => Status::Failed { witness: Box::new(w) },
        None => Status::Verified { checks, grid: describe(&ranges, colors.len(), instances.len(), outside) },
    })
}

/// Node pairs that can be checked, and the number left out. With `f` at
/// node `k`, the check runs on `H_k`, which only carries the `m_i` with
/// `i <= k`; pairs putting an `m` above `k` are outside the model.
fn checkable_instances(rel: &Relation) -> (Vec<(usize, usize)>, usize) {
    let Some(f_node) = domain_node(rel) else { return (rel.instances.clone(), 0) };
    let mut m_nodes = Vec::new();
    let mut collect = |sym: Sym, node: Node, _: &_| {
        if sym == Sym::M {
            m_nodes.push(node);
        }
    };
    rel.lhs.for_each_gen(&mut collect);
    rel.rhs.for_each_gen(&mut collect);
    let keep: Vec<_> = rel
        .instances
        .iter()
        .copied()
        .filter(|&(i, j)| m_nodes.iter().all(|m| m.resolve(i, j) <= f_node.resolve(i, j)))
        .collect();
    let outside = rel.instances.len() - keep.len();
    (keep, outside)
}

fn var_name(v: Var) -> String {
    match v {
        Var::S => "s",
        Var::T => "t",
        Var::U => "u",
        Var::L => "l",
        Var::R => "r",
    }
    .into()
}

fn describe(ranges: &[(Var, [i64; 2])], colors: usize, instances: usize, outside: usize) -> String {
    let mut parts: Vec<String> = ranges.iter().map(|(v, [lo, hi])| format!("{} in {lo}..={hi}", var_name(*v))).collect();
    parts.push(format!("{colors} color tuples"));
    parts.push(format!("{instances} node pairs"));
    if outside > 0 {
        parts.push(format!("{outside} pairs with m above the f node not in the model"));
    }
    parts.join(", ")
}

/// Default and overridden superscript ranges.
fn var_range(rel: &Relation, v: Var, r: i64, grid: &Grid) -> [i64; 2] {
    let given = match v {
        Var::S => grid.s,
        Var::T => grid.t,
        _ => None,
    };
    if let Some(range) = given {
        return range;
    }
    let mut labels_m = false;
    rel.lhs.for_each_gen(&mut |sym, _, sup| {
        if sym == Sym::M && sup.vars().any(|x| x == v) {
            labels_m = true;
        }
    });
    let in_commutator_only = matches!(rel.rhs, Expr::Zero);
    match (labels_m, in_commutator_only) {
        (true, true) => [1, r],
        (true, false) => [0, r],
        (false, _) => [0, 2],
    }
}

fn assignments(ranges: &[(Var, [i64; 2])], base: Env) -> Vec<Env> {
    let mut out = vec![base];
    for &(v, [lo, hi]) in ranges {
        out = out.into_iter().flat_map(|e| (lo..=hi).map(move |x| e.with(v, x))).collect();
    }
    out
}

fn color_tuples(params: &ModelParams, grid: &Grid, slots: usize) -> Vec<Vec<usize>> {
    if let (Some(pairs), 2) = (&grid.colors, slots) {
        return pairs.iter().map(|p| p.to_vec()).collect();
    }
    let mut out = vec![Vec::new()];
    for _ in 0..slots {
        out = out
            .into_iter()
            .flat_map(|t| {
                (0..params.colors()).map(move |c| {
                    let mut t = t.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    out
}

/// Grid basis (or the full basis) restricted to `H_level`.
fn basis_in(params: &ModelParams, grid: &Grid, level: usize) -> Vec<Monomial> {
    match &grid.basis {
        None => enumerate_filtration(params, level),
        Some(list) => list
            .iter()
            .filter_map(|keys| normalize_keys(params.g, keys).map(|(m, _)| m))
            .filter(|m| m.top_layer() <= level)
            .collect(),
    }
}

struct Ctx<'a> {
    model: &'a Model,
    i: usize,
    j: usize,
}

impl Ctx<'_> {
    fn genus(&self) -> u32 {
        self.model.genus()
    }

    fn parity(&self, c: usize) -> u32 {
        basis_parity(self.genus(), c)
    }

    /// `lhs - rhs` of the two-point form, applied to `x`.
    fn relation_difference(&self, rel: &Relation, env: &Env, colors: &[usize], x: &FockElement) -> Result<FockElement> {
        let lhs = self.two_point(&rel.lhs, env, colors, x)?;
        let rhs = if contains_over_hbar(&rel.lhs) {
            // Σ ε [x, y]/hbar = R becomes Σ ε [x, y] = -δ·R.
            let mut gamma = CurveClass::unit(self.genus());
            for &c in colors {
                gamma = gamma.mul(&self.model.color(c)?)?;
            }
            self.one_point(&rel.rhs, env, &gamma, x)?.scale(-Q::one())
        } else {
            self.two_point(&rel.rhs, env, colors, x)?
        };
        Ok(lhs.sub(&rhs))
    }

    /// Evaluates sums of (possibly `/hbar`) commutators of generators, each
    /// generator colored by the point of its superscript variable.
    fn two_point(&self, e: &Expr, env: &Env, colors: &[usize], x: &FockElement) -> Result<FockElement> {
        match e {
            Expr::Zero => Ok(FockElement::zero()),
            Expr::Sum(xs) => {
                let mut out = FockElement::zero();
                for y in xs {
                    out.add_scaled(&self.two_point(y, env, colors, x)?, Q::one());
                }
                Ok(out)
            }
            Expr::Neg(y) => Ok(self.two_point(y, env, colors, x)?.scale(-Q::one())),
            Expr::OverHbar(y) => self.two_point(y, env, colors, x),
            Expr::Comm(a, b) => {
                let ab = self.compose(a, b, env, colors, x)?;
                let ba = self.compose(b, a, env, colors, x)?;
                Ok(ab.sub(&ba))
            }
            other => Err(Error::NotComputable(format!("two-point evaluation of `{}`", other.render()))),
        }
    }

    /// `X∘Y` on the two points. Reordering the colors so that the first
    /// point comes first costs the Koszul sign of the two colors.
    fn compose(&self, a: &Expr, b: &Expr, env: &Env, colors: &[usize], x: &FockElement) -> Result<FockElement> {
        let (sa, sb) = (slot(a)?, slot(b)?);
        let (ca, cb) = (colors[sa], colors[sb]);
        let y = self.gen_at(b, env, &self.model.color(cb)?, x)?;
        let out = self.gen_at(a, env, &self.model.color(ca)?, &y)?;
        let swap = sa < sb && self.parity(ca) * self.parity(cb) == 1;
        Ok(if swap { out.scale(-Q::one()) } else { out })
    }

    fn gen_at(&self, e: &Expr, env: &Env, gamma: &CurveClass, x: &FockElement) -> Result<FockElement> {
        match e {
            Expr::Gen { sym, node, sup } => self.apply_gen(*sym, *node, sup.eval(env), gamma, x),
            other => Err(Error::NotComputable(format!("`{}` is not a generator", other.render()))),
        }
    }

    fn apply_gen(&self, sym: Sym, node: Node, sup: i64, gamma: &CurveClass, x: &FockElement) -> Result<FockElement> {
        let k = node.resolve(self.i, self.j);
        let r = self.model.params().r as i64;
        if sup < 0 {
            return Ok(FockElement::zero());
        }
        match sym {
            Sym::M if sup == 0 => Ok(x.scale(gamma.integrate())),
            Sym::M if sup > r => Ok(FockElement::zero()),
            Sym::M => self.model.apply_chern_e(k, sup as usize, gamma, x),
            Sym::F => self.model.apply_b_class(k, sup as usize, gamma, x),
            Sym::E | Sym::H => Err(Error::NotComputable(format!("{sym:?}_{k}"))),
        }
    }

    /// Evaluates a one-point expression colored by `gamma`. A product `X Y`
    /// colored by γ is `Σ_{Δ_*γ} (-1)^{|e'||e''|} X(e') Y(e'')`.
    fn one_point(&self, e: &Expr, env: &Env, gamma: &CurveClass, x: &FockElement) -> Result<FockElement> {
        match e {
            Expr::Zero => Ok(FockElement::zero()),
            Expr::Gen { .. } => self.gen_at(e, env, gamma, x),
            Expr::Neg(y) => Ok(self.one_point(y, env, gamma, x)?.scale(-Q::one())),
            Expr::Sum(xs) => {
                let mut out = FockElement::zero();
                for y in xs {
                    out.add_scaled(&self.one_point(y, env, gamma, x)?, Q::one());
                }
                Ok(out)
            }
            Expr::SumOver { var, lo, hi, body } => {
                let mut out = FockElement::zero();
                for l in lo.eval(env)..=hi.eval(env) {
                    out.add_scaled(&self.one_point(body, &env.with(*var, l), gamma, x)?, Q::one());
                }
                Ok(out)
            }
            Expr::Prod(factors) => {
                let mut scalar = Q::one();
                let mut gamma = gamma.clone();
                let mut gens = Vec::new();
                for f in factors {
                    match f {
                        Expr::Delta(a, b) => {
                            if a.resolve(self.i, self.j) != b.resolve(self.i, self.j) {
                                return Ok(FockElement::zero());
                            }
                        }
                        Expr::Sign(a) => scalar *= Q::sign(a.eval(env)),
                        Expr::Hbar => gamma = gamma.mul(&CurveClass::canonical(self.genus()))?,
                        other => gens.push(other),
                    }
                }
                Ok(self.product(&gens, env, &gamma, x)?.scale(scalar))
            }
            Expr::Delta(a, b) => {
                let same = a.resolve(self.i, self.j) == b.resolve(self.i, self.j);
                Ok(if same { x.scale(gamma.integrate()) } else { FockElement::zero() })
            }
            other => Err(Error::NotComputable(format!("one-point evaluation of `{}`", other.render()))),
        }
    }

    fn product(&self, gens: &[&Expr], env: &Env, gamma: &CurveClass, x: &FockElement) -> Result<FockElement> {
        match gens {
            [] => Ok(x.scale(gamma.integrate())),
            [only] => self.one_point(only, env, gamma, x),
            [first, rest @ ..] => {
                let g = self.genus();
                let mut out = FockElement::zero();
                for (e1, e2, c) in self.model.push(gamma) {
                    let inner = self.product(rest, env, &self.model.color(e2)?, x)?;
                    if inner.is_zero() {
                        continue;
                    }
                    let outer = self.one_point(first, env, &CurveClass::basis(g, e1)?, &inner)?;
                    let sign = Q::sign((basis_parity(g, e1) * basis_parity(g, e2)) as i64);
                    out.add_scaled(&outer, c * sign);
                }
                Ok(out)
            }
        }
    }
}

fn contains_over_hbar(e: &Expr) -> bool {
    match e {
        Expr::OverHbar(_) => true,
        Expr::Sum(xs) | Expr::Prod(xs) => xs.iter().any(contains_over_hbar),
        Expr::Neg(y) => contains_over_hbar(y),
        _ => false,
    }
}

/// Point index of a generator: the first of `s`, `t`, `u` in its superscript.
fn slot(e: &Expr) -> Result<usize> {
    if let Expr::Gen { sup, .. } = e {
        for v in sup.vars() {
            match v {
                Var::S => return Ok(0),
                Var::T => return Ok(1),
                Var::U => return Ok(2),
                _ => {}
            }
        }
    }
    Err(Error::NotComputable(format!("no point attached to `{}`", e.render())))
}

/// `b_k^(j)(φ) a_k^(i)(γ) - (-1)^{|γ||φ|} a_k^(i)(γ) b_k^(j)(φ)` evaluated
/// with the reversed strategy, against the bracket expression evaluated
/// with the default one.
fn check_bracket(model: &Model, grid: &Grid) -> Result<Status> {
    let params = *model.params();
    let g = params.g;
    let colors = color_tuples(&params, grid, 2);
    let mut points = Vec::new();
    for k in 1..=params.n {
        for mono in basis_in(&params, grid, k) {
            if mono.dvec(params.n)[params.n - 1] >= params.bound {
                continue;
            }
            for i in 0..params.r {
                for j in 0..params.r {
                    for cs in &colors {
                        points.push((k, i, j, cs.clone(), mono.clone()));
                    }
                }
            }
        }
    }
    let checks = points.len();
    let failure = points
        .par_iter()
        .map(|(k, i, j, cs, mono)| -> Result<Option<Witness>> {
            let (k, i, j) = (*k, *i, *j);
            let (cg, cp) = (cs[0], cs[1]);
            let x = FockElement::monomial(mono.clone());
            let ax = model.apply_a(k, i, cg, &x)?;
            let mut lhs = model.apply_b_with(Strategy::Reversed, k, j, cp, &ax)?;
            let bx = model.apply_b_with(Strategy::Reversed, k, j, cp, &x)?;
            let sign = Q::sign((basis_parity(g, cg) * basis_parity(g, cp)) as i64);
            lhs.add_scaled(&model.apply_a(k, i, cg, &bx)?, -sign);
            let expr = model.bracket_ba(k, i, j, &model.color(cg)?, &model.color(cp)?)?;
            let diff = lhs.sub(&model.evaluate(&expr, &x)?);
            Ok((!diff.is_zero()).then(|| Witness {
                nodes: (k, k),
                vars: vec![("i".into(), i as i64), ("j".into(), j as i64)],
                colors: cs.clone(),
                input: mono.keys().to_vec(),
                input_text: mono.display(g),
                difference: diff.display(g),
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(match failure {
        Some(w) => Status::Failed { witness: Box::new(w) },
        None => Status::Verified {
            checks,
            grid: format!("i, j in 0..{}, {} color pairs, layers 1..={}", params.r, colors.len(), params.n),
        },
    })
}

/// Default number of confluence samples.
pub const DEFAULT_SAMPLES: usize = 1000;

/// Random strings of `b` operators on random elements, evaluated with both
/// strategies; the reversed strategy also sees a shuffled input word.
fn check_confluence(model: &Model, grid: &Grid) -> Result<Status> {
    let params = *model.params();
    let g = params.g;
    let samples = grid.samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = grid.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cases = Vec::with_capacity(samples);
    for _ in 0..samples {
        let k = rng.gen_range(1..=params.n);
        let basis = basis_in(&params, grid, k);
        if basis.is_empty() {
            continue;
        }
        let mono = basis[rng.gen_range(0..basis.len())].clone();
        let len = rng.gen_range(1..=3);
        let ops: Vec<(usize, usize)> =
            (0..len).map(|_| (rng.gen_range(0..params.r + 2), rng.gen_range(0..params.colors()))).collect();
        // Shuffle the layer-k prefix and the remainder separately.
        let split = mono.keys().iter().position(|key| key.layer != k).unwrap_or(mono.len());
        let mut head = mono.keys()[..split].to_vec();
        let mut tail = mono.keys()[split..].to_vec();
        head.shuffle(&mut rng);
        tail.shuffle(&mut rng);
        head.extend(tail);
        cases.push((k, mono, head, ops));
    }
    let checks = cases.len();
    let failure = cases
        .par_iter()
        .map(|(k, mono, word, ops)| -> Result<Option<Witness>> {
            let k = *k;
            let (_, sign) = normalize_keys(g, word).expect("shuffle of a nonzero monomial");
            let x = FockElement::monomial(mono.clone());
            let (j0, c0) = ops[0];
            let mut left = model.apply_b_with(Strategy::InnermostFirst, k, j0, c0, &x)?;
            let mut right = model.apply_b_to_word(k, j0, c0, word)?.scale(sign);
            for &(j, c) in &ops[1..] {
                left = model.apply_b_with(Strategy::InnermostFirst, k, j, c, &left)?;
                right = model.apply_b_with(Strategy::Reversed, k, j, c, &right)?;
            }
            let diff = left.sub(&right);
            Ok((!diff.is_zero()).then(|| Witness {
                nodes: (k, k),
                vars: ops.iter().map(|&(j, _)| ("j".to_string(), j as i64)).collect(),
                colors: ops.iter().map(|&(_, c)| c).collect(),
                input: mono.keys().to_vec(),
                input_text: mono.display(g),
                difference: diff.display(g),
            }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .next();
    Ok(match failure {
        Some(w) => Status::Failed { witness: Box::new(w) },
        None => Status::Verified { checks, grid: format!("{checks} random b-strings, seed {seed}") },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::omega_index;

    fn params(n: usize, r: usize, g: u32, bound: u32) -> ModelParams {
        ModelParams::new(n, r, g, 0, bound).unwrap()
    }

    #[test]
    fn single_point_example() {
        let p = params(1, 1, 0, 2);
        let grid = Grid {
            s: Some([1, 1]),
            t: Some([0, 0]),
            colors: Some(vec![[0, omega_index(0)]]),
            basis: Some(vec![vec![GeneratorKey::new(1, 0, 0)]]),
            ..Grid::default()
        };
        let report = verify("R11", &p, &grid).unwrap();
        assert_eq!(report.relations[0].status, Status::Verified { checks: 1, grid: "s in 1..=1, t in 0..=0, 1 color tuples, 1 node pairs".into() });
    }

    #[test]
    fn small_grids_verify() {
        for (n, r, g) in [(2, 2, 0), (1, 1, 2), (2, 1, 1)] {
            let report = verify("all", &params(n, r, g, 2), &Grid::default()).unwrap();
            assert!(report.success(), "{}", report.to_text());
        }
    }

    #[test]
    fn coverage_audit() {
        let report = verify("all", &params(2, 1, 0, 1), &Grid::default()).unwrap();
        let names: Vec<_> = report.relations.iter().map(|r| r.relation.as_str()).collect();
        assert_eq!(names, selectors());
        for r in &report.relations {
            let expect_verified = matches!(r.relation.as_str(), "R1" | "R7" | "R11" | "BA" | "CONF");
            match &r.status {
                Status::Verified { .. } => assert!(expect_verified, "{}", r.relation),
                Status::Skipped { reason } => {
                    assert!(!expect_verified, "{}", r.relation);
                    assert!(reason.contains("not computable in model"));
                }
                Status::Failed { .. } => panic!("{}", r.relation),
            }
        }
        let r12 = verify("R12", &params(1, 1, 0, 1), &Grid::default()).unwrap();
        assert_eq!(r12.relations[0].status, Status::Skipped { reason: SKIP_E.into() });
    }

    #[test]
    fn wrong_relations_fail_with_witness() {
        let p = params(1, 1, 2, 2);
        let model = Model::new(p).unwrap();
        let mut rel = load_presentation(1, 1).remove(10);
        rel.rhs = crate::yangian::presentation::neg(rel.rhs);
        let Status::Failed { witness } = check_relation(&model, &rel, &Grid::default()).unwrap() else { panic!() };
        // Replaying the witness reproduces the failure.
        let grid = Grid {
            s: Some([witness.vars[0].1; 2]),
            t: Some([witness.vars[1].1; 2]),
            colors: Some(vec![[witness.colors[0], witness.colors[1]]]),
            basis: Some(vec![witness.input.clone()]),
            ..Grid::default()
        };
        assert!(matches!(check_relation(&model, &rel, &grid).unwrap(), Status::Failed { .. }));
    }

    #[test]
    fn grid_errors() {
        let p = params(1, 1, 0, 2);
        assert!(matches!(Grid::from_json("{\"s\": [2]}"), Err(Error::MalformedGrid(_))));
        assert!(matches!(Grid::from_json("{\"bogus\": 1}"), Err(Error::MalformedGrid(_))));
        let bad_range = Grid { s: Some([2, 1]), ..Grid::default() };
        assert!(matches!(verify("R1", &p, &bad_range), Err(Error::MalformedGrid(_))));
        let bad_color = Grid { colors: Some(vec![[0, 5]]), ..Grid::default() };
        assert!(matches!(verify("R1", &p, &bad_color), Err(Error::MalformedGrid(_))));
        let bad_basis = Grid { basis: Some(vec![vec![GeneratorKey::new(2, 0, 0)]]), ..Grid::default() };
        assert!(matches!(verify("R1", &p, &bad_basis), Err(Error::MalformedGrid(_))));
        assert!(matches!(verify("R13", &p, &Grid::default()), Err(Error::UnknownRelation(_))));
    }

    #[test]
    fn reports_are_deterministic() {
        let p = params(2, 1, 1, 2);
        let grid = Grid { samples: Some(200), seed: Some(7), ..Grid::default() };
        let a = verify("all", &p, &grid).unwrap().to_json();
        let b = verify("all", &p, &grid).unwrap().to_json();
        assert_eq!(a, b);
    }
}
