//! Randomized invariants.

use hyperquot_core::curve::basis_size;
use hyperquot_core::fock::{enumerate_filtration, normalize_keys};
use hyperquot_core::series::TruncSeries;
use hyperquot_core::yangian::{load_presentation, parse_relation};
use hyperquot_core::{CurveClass, FockElement, GeneratorKey, Model, ModelParams, OperatorExpr, Q, Strategy as Reduction};
use proptest::prelude::*;

fn model(n: usize, r: usize, g: u32, bound: u32) -> Model {
    Model::new(ModelParams::new(n, r, g, 0, bound).unwrap()).unwrap()
}

fn series(n: usize, bound: u32) -> impl Strategy<Value = TruncSeries> {
    prop::collection::vec((prop::collection::vec(0u32..=bound, n), 0u32..6, -3i64..=3), 0..6).prop_map(move |terms| {
        let mut s = TruncSeries::zero(n, bound);
        for (mut d, z, c) in terms {
            d.sort_unstable();
            s = s.add(&TruncSeries::monomial(n, bound, d, z, c));
        }
        s
    })
}

fn key(n: usize, r: usize, g: u32) -> impl Strategy<Value = GeneratorKey> {
    (1..=n, 0..r, 0..basis_size(g)).prop_map(|(k, v, c)| GeneratorKey::new(k, v, c))
}

fn curve_class(g: u32) -> impl Strategy<Value = CurveClass> {
    prop::collection::vec(-2i64..=2, basis_size(g))
        .prop_map(move |cs| CurveClass::from_terms(g, cs.into_iter().enumerate().map(|(i, c)| (i, Q::from(c)))).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn series_ring_axioms(a in series(2, 3), b in series(2, 3), c in series(2, 3)) {
        prop_assert_eq!(a.mul(&b), b.mul(&a));
        prop_assert_eq!(a.mul(&b).mul(&c), a.mul(&b.mul(&c)));
        prop_assert_eq!(a.mul(&b.add(&c)), a.mul(&b).add(&a.mul(&c)));
        prop_assert_eq!(a.mul(&TruncSeries::one(2, 3)), a.clone());
        prop_assert!(a.add(&a.neg()).is_zero());
    }

    #[test]
    fn a_operators_supercommute(g in 0u32..=2, k1 in key(2, 2, 2), k2 in key(2, 2, 2), idx in 0usize..200) {
        prop_assume!(k1.color < basis_size(g) && k2.color < basis_size(g));
        let m = model(2, 2, g, 4);
        let basis = enumerate_filtration(m.params(), 2);
        let x = FockElement::monomial(basis[idx % basis.len()].clone());
        prop_assume!(x.terms().all(|(mono, _)| mono.dvec(2)[1] <= 2));
        let one = m.apply_a(k1.layer, k1.charge, k1.color, &m.apply_a(k2.layer, k2.charge, k2.color, &x).unwrap()).unwrap();
        let two = m.apply_a(k2.layer, k2.charge, k2.color, &m.apply_a(k1.layer, k1.charge, k1.color, &x).unwrap()).unwrap();
        prop_assert_eq!(one, two.scale(Q::sign((k1.parity(g) * k2.parity(g)) as i64)));
    }

    #[test]
    fn normalization_is_order_independent(keys in prop::collection::vec(key(2, 2, 1), 0..5), seed in any::<u64>()) {
        let mut shuffled = keys.clone();
        let len = shuffled.len();
        if len > 1 {
            shuffled.swap((seed as usize) % len, (seed as usize / 7) % len);
        }
        let a = normalize_keys(1, &keys);
        let b = normalize_keys(1, &shuffled);
        prop_assert_eq!(a.is_some(), b.is_some());
        if let (Some((ma, sa)), Some((mb, sb))) = (a, b) {
            prop_assert_eq!(&ma, &mb);
            prop_assert!(sa == sb || sa == -sb);
        }
    }

    #[test]
    fn b_is_linear_in_its_color(phi in curve_class(1), psi in curve_class(1), j in 0usize..4, idx in 0usize..100) {
        let m = model(1, 2, 1, 3);
        let basis = enumerate_filtration(m.params(), 1);
        let x = FockElement::monomial(basis[idx % basis.len()].clone());
        let sum = phi.add(&psi).unwrap();
        let mut expected = m.apply_b_class(1, j, &phi, &x).unwrap();
        expected.add_scaled(&m.apply_b_class(1, j, &psi, &x).unwrap(), Q::one());
        prop_assert_eq!(m.apply_b_class(1, j, &sum, &x).unwrap(), expected);
    }

    #[test]
    fn strategies_agree(j in 0usize..5, c in 0usize..4, idx in 0usize..500) {
        let m = model(2, 2, 1, 3);
        let basis = enumerate_filtration(m.params(), 2);
        let x = FockElement::monomial(basis[idx % basis.len()].clone());
        prop_assert_eq!(
            m.apply_b_with(Reduction::InnermostFirst, 2, j, c, &x).unwrap(),
            m.apply_b_with(Reduction::Reversed, 2, j, c, &x).unwrap()
        );
    }

    #[test]
    fn chern_classes_commute(t1 in 1usize..=2, t2 in 1usize..=2, j1 in 1usize..=2, j2 in 1usize..=2, g1 in curve_class(1), g2 in curve_class(1), idx in 0usize..500) {
        let m = model(2, 2, 1, 2);
        let basis = enumerate_filtration(m.params(), 2);
        let x = FockElement::monomial(basis[idx % basis.len()].clone());
        // Even colors only, so no Koszul sign enters.
        let even = |c: &CurveClass| CurveClass::from_terms(1, c.terms().filter(|(i, _)| *i == 0 || *i == 3)).unwrap();
        let (g1, g2) = (even(&g1), even(&g2));
        let one = m.apply_chern_e(j1, t1, &g1, &m.apply_chern_e(j2, t2, &g2, &x).unwrap()).unwrap();
        let two = m.apply_chern_e(j2, t2, &g2, &m.apply_chern_e(j1, t1, &g1, &x).unwrap()).unwrap();
        prop_assert_eq!(one, two);
    }

    #[test]
    fn element_json_round_trip(keys in prop::collection::vec(key(2, 2, 1), 0..4), c in -5i64..=5) {
        let p = ModelParams::new(2, 2, 1, 0, 4).unwrap();
        let x = FockElement::normalize(&p, &keys, Q::from(c)).unwrap();
        let (q, y) = FockElement::from_json(&x.to_json(&p)).unwrap();
        prop_assert_eq!(q, p);
        prop_assert_eq!(y, x);
    }

    #[test]
    fn expression_json_round_trip(ops in prop::collection::vec((0usize..3, 1usize..=2, 0usize..3, 0usize..4), 1..4)) {
        let factors = ops
            .into_iter()
            .map(|(kind, k, v, c)| match kind {
                0 => OperatorExpr::A { k, v, c },
                1 => OperatorExpr::B { k, j: v, c },
                _ => OperatorExpr::ChernE { j: k, t: v, c },
            })
            .collect();
        let e = OperatorExpr::scale(Q::new(-3, 2), OperatorExpr::compose(factors));
        prop_assert_eq!(OperatorExpr::from_json(&e.to_json()).unwrap(), e);
    }
}

#[test]
fn relation_text_round_trip() {
    for n in 1..=4 {
        for r in 1..=3 {
            for rel in load_presentation(n, r) {
                assert_eq!(parse_relation(&rel.render(), n).unwrap(), rel);
            }
        }
    }
}
