//! Acceptance run: one PASS/FAIL line per criterion. All comparisons are
//! exact (rational or integer equality, tolerance 0).

use std::process::ExitCode;
use std::time::Instant;

use hyperquot_core::curve::omega_index;
use hyperquot_core::fock::{enumerate_basis, enumerate_filtration};
use hyperquot_core::linalg::rank;
use hyperquot_core::series::{compare, is_palindromic, macdonald_series, poincare_product};
use hyperquot_core::yangian::{verify, Grid, Status, VerificationReport};
use hyperquot_core::{CurveClass, FockElement, GeneratorKey, Model, ModelParams, Monomial, Q};
use rayon::prelude::*;

type Outcome = Result<String, String>;

fn params(n: usize, r: usize, g: u32, bound: u32) -> ModelParams {
    ModelParams::new(n, r, g, 0, bound).unwrap()
}

fn grid_1() -> Vec<ModelParams> {
    let mut out = Vec::new();
    for n in 1..=3 {
        for r in 1..=3 {
            for g in 0..=2 {
                out.push(params(n, r, g, 5));
            }
        }
    }
    out
}

/// Criteria 1 and 9 share the grid.
fn enumeration_vs_product() -> (Outcome, Outcome) {
    let mut cells = 0;
    let mut bad = Vec::new();
    let mut palin = 0;
    let mut bad_palin = Vec::new();
    for p in grid_1() {
        let report = compare(&p);
        for c in &report.cells {
            cells += 1;
            if !c.agree {
                bad.push(format!("{:?} {:?}: {:?} vs {:?}", (p.n, p.r, p.g), c.dvec, c.formula, c.enumerated));
            }
            let d_n = c.dvec[p.n - 1] as usize;
            palin += 1;
            if !is_palindromic(&c.formula, 2 * p.r * d_n) {
                bad_palin.push(format!("{:?} {:?}: {:?}", (p.n, p.r, p.g), c.dvec, c.formula));
            }
        }
    }
    let c1 = if bad.is_empty() { Ok(format!("{cells} cells agree")) } else { Err(bad[0].clone()) };
    let c9 = if bad_palin.is_empty() { Ok(format!("{palin} polynomials")) } else { Err(bad_palin[0].clone()) };
    (c1, c9)
}

fn classical_degenerations() -> Outcome {
    let mut checked = 0;
    for g in 0..=3 {
        let product = poincare_product(&params(1, 1, g, 6));
        let expected = macdonald_series(g, 6);
        for d in 0..=6 {
            checked += 1;
            if product.z_poly(&[d]) != expected.z_poly(&[d]) {
                return Err(format!("g={g} d={d}: {:?} vs {:?}", product.z_poly(&[d]), expected.z_poly(&[d])));
            }
            if g == 0 && product.z_poly(&[d]) != (0..=2 * d).map(|i| i64::from(i % 2 == 0)).collect::<Vec<_>>() {
                return Err(format!("Sym^{d} P^1 row {:?}", product.z_poly(&[d])));
            }
        }
        if g == 1 && product.z_poly(&[1]) != vec![1, 2, 1] {
            return Err(format!("g=1 d=1 row {:?}", product.z_poly(&[1])));
        }
    }
    Ok(format!("{checked} rows equal"))
}

fn supercommutativity() -> Outcome {
    let mut checks = 0usize;
    for n in 1..=2 {
        for r in 1..=2 {
            for g in 0..=1 {
                // Room for two more generators above d_n = 3.
                let model = Model::new(params(n, r, g, 5)).unwrap();
                let p = *model.params();
                let keys: Vec<GeneratorKey> = (1..=n)
                    .flat_map(|k| (0..r).flat_map(move |v| (0..p.colors()).map(move |c| GeneratorKey::new(k, v, c))))
                    .collect();
                let basis = enumerate_filtration(&params(n, r, g, 3), n);
                let failures: Vec<String> = basis
                    .par_iter()
                    .flat_map_iter(|m| {
                        let x = FockElement::monomial(m.clone());
                        let model = &model;
                        let keys = &keys;
                        keys.iter().flat_map(move |&k1| {
                            let x = x.clone();
                            keys.iter().filter_map(move |&k2| {
                                let one = model.apply_a(k1.layer, k1.charge, k1.color, &model.apply_a(k2.layer, k2.charge, k2.color, &x).unwrap()).unwrap();
                                let two = model.apply_a(k2.layer, k2.charge, k2.color, &model.apply_a(k1.layer, k1.charge, k1.color, &x).unwrap()).unwrap();
                                let sign = Q::sign((k1.parity(g) * k2.parity(g)) as i64);
                                (one != two.scale(sign)).then(|| format!("{k1:?} {k2:?} on {}", m.display(g)))
                            })
                        })
                    })
                    .collect();
                checks += basis.len() * keys.len() * keys.len();
                if let Some(f) = failures.first() {
                    return Err(f.clone());
                }
            }
        }
    }
    Ok(format!("{checks} ordered pairs"))
}

fn relation_report(sel: &str, p: ModelParams, grid: &Grid) -> Result<VerificationReport, String> {
    verify(sel, &p, grid).map_err(|e| format!("{sel} at {p:?}: {e}"))
}

fn confluence() -> Outcome {
    let mut total = 0;
    for (n, r, g, seed) in [(1, 2, 1, 11), (2, 2, 1, 12), (2, 3, 0, 13), (1, 3, 2, 14)] {
        let grid = Grid { samples: Some(1000), seed: Some(seed), ..Grid::default() };
        let report = relation_report("CONF", params(n, r, g, 3), &grid)?;
        match &report.relations[0].status {
            Status::Verified { checks, .. } => total += checks,
            other => return Err(format!("({n},{r},{g}) seed {seed}: {other:?}")),
        }
    }
    Ok(format!("{total} seeded pairs agree"))
}

/// All words in `u` copies of `a_{k+1}` and `u` copies of `b_{k+1}`, every
/// superscript tuple with total below `u(r-1)` and every color, applied to
/// every basis vector of `H_k`. Words are applied right to left and share
/// their common suffixes.
fn annihilation() -> Outcome {
    let mut applications = 0usize;
    for u in 1..=2usize {
        for r in 1..=3usize {
            for g in 0..=1u32 {
                for n in 1..=2usize {
                    let model = Model::new(params(n, r, g, 3 + u as u32)).unwrap();
                    for k in 0..n {
                        let basis = enumerate_filtration(&params(n, r, g, 3), k);
                        let results: Vec<Result<usize, String>> = basis
                            .par_iter()
                            .map(|m| {
                                let x = FockElement::monomial(m.clone());
                                let mut count = 0;
                                annihilate(&model, k + 1, (u, u), u * (r - 1), &x, &mut count)
                                    .map(|_| count)
                                    .map_err(|w| format!("u={u} r={r} g={g} n={n} on {}: {w}", m.display(g)))
                            })
                            .collect();
                        for res in results {
                            applications += res?;
                        }
                    }
                }
            }
        }
    }
    Ok(format!("{applications} operator applications, all words vanish"))
}

fn annihilate(model: &Model, layer: usize, left: (usize, usize), budget: usize, x: &FockElement, count: &mut usize) -> Result<(), String> {
    let p = model.params();
    if x.is_zero() {
        return Ok(());
    }
    if left == (0, 0) {
        return Err(format!("nonzero result {}", x.display(p.g)));
    }
    for v in 0..p.r.min(budget) {
        for c in 0..p.colors() {
            if left.0 > 0 {
                *count += 1;
                let y = model.apply_a(layer, v, c, x).map_err(|e| e.to_string())?;
                annihilate(model, layer, (left.0 - 1, left.1), budget - v, &y, count)?;
            }
            if left.1 > 0 {
                *count += 1;
                let y = model.apply_b(layer, v, c, x).map_err(|e| e.to_string())?;
                annihilate(model, layer, (left.0, left.1 - 1), budget - v, &y, count)?;
            }
        }
    }
    Ok(())
}

fn verifier() -> Outcome {
    let mut lines = Vec::new();
    // R1 on the grid of criterion 3.
    for n in 1..=2 {
        for r in 1..=2 {
            for g in 0..=1 {
                let report = relation_report("R1", params(n, r, g, 3), &Grid::default())?;
                expect_verified(&report, &mut lines)?;
            }
        }
    }
    // R11 on H_j, all j <= n, both genera where hbar is not degenerate.
    for n in 1..=2 {
        for r in 1..=2 {
            for g in [0, 2] {
                let grid = Grid { s: Some([0, r as i64]), t: Some([0, 2]), ..Grid::default() };
                let report = relation_report("R11", params(n, r, g, 2), &grid)?;
                expect_verified(&report, &mut lines)?;
            }
        }
    }
    // Everything else: e-bearing families skipped, nothing fails.
    let report = relation_report("all", params(2, 2, 0, 2), &Grid::default())?;
    for rel in &report.relations {
        let has_e = rel.text.contains("e_") || rel.text.contains("h_");
        match &rel.status {
            Status::Skipped { reason } if has_e && reason.starts_with("e_k not computable in model") => {}
            Status::Skipped { .. } if !has_e => {}
            Status::Verified { .. } if !has_e => {}
            other => return Err(format!("{}: {other:?}", rel.relation)),
        }
    }
    if !report.success() {
        return Err("full report has failures".into());
    }
    Ok(format!("{} checks verified; e-bearing families skipped; exit status 0", lines.iter().sum::<usize>()))
}

fn expect_verified(report: &VerificationReport, checks: &mut Vec<usize>) -> Result<(), String> {
    for rel in &report.relations {
        match &rel.status {
            Status::Verified { checks: c, .. } => checks.push(*c),
            other => return Err(format!("{} at {:?}: {other:?}", rel.relation, report.params)),
        }
    }
    Ok(())
}

fn sign_oracle(c1: &Outcome) -> Outcome {
    let model = Model::new(params(1, 1, 0, 1)).unwrap();
    let unit = CurveClass::unit(0);
    let mut checked = 0;
    for m in enumerate_basis(model.params(), &[1]).unwrap() {
        if m.cohdeg(0) != 0 {
            continue;
        }
        let x = FockElement::monomial(m);
        let y = model.apply_chern_quot(1, 1, &unit, &x).map_err(|e| e.to_string())?;
        if y != x {
            return Err(format!("c_1 on {} gave {}", x.display(0), y.display(0)));
        }
        checked += 1;
    }
    if checked == 0 {
        return Err("no degree-0 class".into());
    }
    c1.as_ref().map_err(|e| format!("grid of criterion 1 breaks: {e}"))?;
    Ok("c_1(unit) = +Identity on the degree-0 piece; sigma = -1 stable on criterion 1".into())
}

/// Dual color: `∫ e_c · e_dual(c) = ±1`.
fn dual_color(g: u32, c: usize) -> usize {
    let omega = omega_index(g);
    let g = g as usize;
    match c {
        0 => omega,
        c if c == omega => 0,
        c if c <= g => c + g,
        c => c - g,
    }
}

/// The lowering string of a monomial: for each factor `a_k^(v)(e_c)`,
/// outermost first, `b_k^(r-1-v)(e_c^dual)`.
fn lower(model: &Model, word: &Monomial, x: &FockElement) -> FockElement {
    let r = model.params().r;
    let g = model.genus();
    let mut y = x.clone();
    for key in word.keys() {
        if y.is_zero() {
            break;
        }
        y = model.apply_b(key.layer, r - 1 - key.charge, dual_color(g, key.color), &y).unwrap();
    }
    y
}

fn pairing_rank() -> Outcome {
    let mut blocks = 0;
    for n in 1..=2 {
        for r in 1..=2 {
            for g in 0..=1 {
                let model = Model::new(params(n, r, g, 3)).unwrap();
                for dvec in model.params().cells() {
                    let basis = enumerate_basis(model.params(), &dvec).unwrap();
                    if basis.is_empty() {
                        continue;
                    }
                    let vacuum = Monomial::vacuum();
                    let rows: Vec<Vec<Q>> = basis
                        .par_iter()
                        .map(|row| {
                            basis
                                .iter()
                                .map(|col| lower(&model, row, &FockElement::monomial(col.clone())).coeff(&vacuum))
                                .collect()
                        })
                        .collect();
                    let k = rank(rows);
                    if k != basis.len() {
                        return Err(format!("(n,r,g)=({n},{r},{g}) dvec {dvec:?}: rank {k} < {}", basis.len()));
                    }
                    blocks += 1;
                }
            }
        }
    }
    Ok(format!("{blocks} blocks of full rank"))
}

fn main() -> ExitCode {
    let mut all_ok = true;
    let mut report = |id: usize, title: &str, start: Instant, outcome: &Outcome| {
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {id}: PASS  {title} (tolerance 0) -- {detail} [{secs:.1}s]"),
            Err(detail) => {
                all_ok = false;
                println!("criterion {id}: FAIL  {title} (tolerance 0) -- {detail} [{secs:.1}s]")
            }
        }
    };
    let t = Instant::now();
    let (c1, c9) = enumeration_vs_product();
    report(1, "enumeration equals product formula, n,r<=3, g<=2, d_n<=5", t, &c1);
    let t = Instant::now();
    report(2, "n=r=1 series equals Macdonald's formula, g<=3, d<=6", t, &classical_degenerations());
    let t = Instant::now();
    report(3, "colored a-supercommutativity, n,r<=2, g<=1, d_n<=3", t, &supercommutativity());
    let t = Instant::now();
    report(4, "b-rewriting confluence across strategies, >=1000 seeded pairs", t, &confluence());
    let t = Instant::now();
    report(5, "annihilation lemma, u<=2, r<=3, g<=1, d_n<=3", t, &annihilation());
    let t = Instant::now();
    report(6, "relation verifier: R1, R11 verified; e-bearing skipped", t, &verifier());
    let t = Instant::now();
    report(7, "sign oracle on Quot_1(O_P1)", t, &sign_oracle(&c1));
    let t = Instant::now();
    report(8, "dual pairing rank, n,r<=2, g<=1, d_n<=3", t, &pairing_rank());
    report(9, "palindromic Poincare polynomials of degree 2 r d_n", Instant::now(), &c9);
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
