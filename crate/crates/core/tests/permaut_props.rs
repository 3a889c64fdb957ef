use std::collections::BTreeMap;
use std::sync::Arc;

use monster_core::completion::{sample_basis, TruncAut};
use monster_core::index::{ExtIndex, SupportConfig};
use monster_core::monster::{Monster, MonsterElt};
use monster_core::permaut::*;
use monster_core::rational::{frac, q};
use num_bigint::BigUint;
use proptest::prelude::*;

fn engine() -> Arc<Monster> {
    Arc::new(Monster::new(SupportConfig::new(8, [(1, 3), (2, 2)]).unwrap()))
}

fn perm(level: u32, images: &[u64]) -> SparsePerm {
    let map: BTreeMap<BigUint, BigUint> =
        images.iter().enumerate().map(|(i, &k)| (BigUint::from(i as u64 + 1), BigUint::from(k))).collect();
    SparsePerm::new(level, map).unwrap()
}

#[test]
fn identity_acts_trivially() {
    let m = engine();
    let g = perm_aut(&SparsePerm::identity(1), m, 8).unwrap();
    assert!(g.ops().is_empty());
    assert!(g.is_identity().unwrap());
}

#[test]
fn transposition_swaps_letters_and_keeps_relations() {
    let m = Arc::new(Monster::new(SupportConfig::new(9, [(1, 2), (2, 2), (3, 1)]).unwrap()));
    let s = SparsePerm::parse_cycles(1, "(1 2)").unwrap();
    let g = perm_aut(&s, m.clone(), 9).unwrap();
    let e = |k| MonsterElt::e(ExtIndex::at(0, 1, k));
    assert_eq!(g.apply(&e(1), 9).unwrap().upto(9), e(2));
    assert_eq!(g.apply(&MonsterElt::f(ExtIndex::at(0, 1, 2)), 9).unwrap().upto(9), MonsterElt::f(ExtIndex::at(0, 1, 1)));
    let rep = verify_perm_relations(&s, &m).unwrap();
    assert!(rep.all_pass());
    assert!(rep.instances() > 30, "{}", rep.instances());
}

#[test]
fn moves_outside_the_caps_are_refused() {
    let s = SparsePerm::parse_cycles(2, "(1 5)").unwrap();
    assert!(perm_aut(&s, engine(), 8).is_err());
}

#[test]
fn commutes_with_torus_and_mirror() {
    let m = engine();
    let s = perm(1, &[3, 1, 2]);
    let g = perm_aut(&s, m.clone(), 8).unwrap();
    let t = TruncAut::torus(m.clone(), &q(3), &frac(-1, 2), 8).unwrap();
    assert!(g.compose(&t).unwrap().equal(&t.compose(&g).unwrap()).unwrap());
    let map = s.small_map(3).unwrap();
    let relabel = |x: &ExtIndex| if x.j == 1 { x.with_k(map.get(&x.k).copied().unwrap_or(x.k)) } else { *x };
    for b in sample_basis(&m, 8, 3) {
        let gb = b.map_letters(m.free(), &relabel);
        assert_eq!(gb.omega(), b.omega().map_letters(m.free(), &relabel));
        // root spaces are preserved
        let r = |e: &MonsterElt| e.terms().iter().map(|(t, _)| t.root()).collect::<Vec<_>>();
        assert!(r(&gb).iter().all(|x| *x == r(&b)[0]));
    }
}

#[test]
fn relations_survive_every_level_three_permutation() {
    let m = Monster::new(SupportConfig::new(7, [(1, 3), (2, 1)]).unwrap());
    for imgs in [[1, 3, 2], [2, 1, 3], [2, 3, 1], [3, 1, 2], [3, 2, 1]] {
        assert!(verify_perm_relations(&perm(1, &imgs), &m).unwrap().all_pass());
    }
}

fn arb_perm3() -> impl Strategy<Value = SparsePerm> {
    Just(vec![1u64, 2, 3]).prop_shuffle().prop_map(|v| perm(1, &v))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn action_is_a_homomorphism(s in arb_perm3(), t in arb_perm3()) {
        let m = engine();
        let st = perm_aut(&s.compose(&t).unwrap(), m.clone(), 8).unwrap();
        let composed = perm_aut(&s, m.clone(), 8).unwrap().compose(&perm_aut(&t, m, 8).unwrap()).unwrap();
        prop_assert!(st.equal(&composed).unwrap());
    }

    #[test]
    fn cycle_notation_roundtrips(s in arb_perm3()) {
        let back = SparsePerm::parse_cycles(1, &s.to_string()).unwrap();
        prop_assert_eq!(back, s);
    }
}
