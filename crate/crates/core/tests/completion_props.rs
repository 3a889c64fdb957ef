use std::sync::Arc;

use monster_core::completion::{approximate_by_generators, random_unipotent_word, sample_basis, sample_pairs, TruncAut};
use monster_core::index::{ExtIndex, SupportConfig};
use monster_core::monster::{Monster, MonsterElt};
use monster_core::presentation::{realize, GenSymbol, GroupWord};
use monster_core::rational::{frac, q, qpow};
use monster_core::Q;
use num_bigint::BigInt;
use num_traits::{One, Zero};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn engine(n: i64) -> Arc<Monster> {
    Arc::new(Monster::new(SupportConfig::new(n, [(1, 2), (2, 1), (3, 1)]).unwrap()))
}

fn x(l: u32, j: u32, k: u64) -> ExtIndex {
    ExtIndex::at(l, j, k)
}

fn binom(n: u32, k: u32) -> Q {
    let mut b = BigInt::one();
    for i in 0..k {
        b = b * (n - i) / (i + 1);
    }
    Q::from_integer(b)
}

/// Random element of the positive part with small coefficients.
fn random_positive(m: &Monster, n: i64, rng: &mut impl Rng) -> MonsterElt {
    let pos: Vec<MonsterElt> = sample_basis(m, n, 2).into_iter().filter(MonsterElt::is_positive_sector).collect();
    let mut out = MonsterElt::zero();
    for _ in 0..3 {
        let b = &pos[rng.gen_range(0..pos.len())];
        out.add_scaled(b, &q(rng.gen_range(-2..=2)));
    }
    out
}

#[test]
fn real_exponential_on_a_string_matches_the_binomial_formula() {
    // exp(u ad e_{-1}) e_l = sum_m binom(m, l) u^(m-l) e_m, from [e_{-1}, e_l] = (l+1) e_{l+1}
    let m = engine(9);
    for u in [q(1), q(-2), frac(1, 3)] {
        let g = TruncAut::exp_ad(m.clone(), &MonsterElt::e_real().scale(&u), 9).unwrap();
        for j in 1..=3u32 {
            for l in 0..j {
                let got = g.apply(&MonsterElt::e(x(l, j, 1)), 9).unwrap().upto(9);
                let mut want = MonsterElt::zero();
                for mm in l..j {
                    want.add_scaled(&MonsterElt::e(x(mm, j, 1)), &(binom(mm, l) * qpow(&u, (mm - l) as i64)));
                }
                assert_eq!(got, want, "u = {u}, ({l},{j})");
            }
        }
    }
}

#[test]
fn torus_scales_root_spaces() {
    let m = engine(8);
    let (s, t) = (q(2), frac(-1, 3));
    let g = TruncAut::torus(m.clone(), &s, &t, 8).unwrap();
    for b in sample_basis(&m, 8, 3) {
        let (basis, _) = b.terms()[0].clone();
        let r = basis.root();
        let want = b.scale(&(qpow(&s, r.a) * qpow(&t, r.b)));
        assert_eq!(g.apply(&b, 8).unwrap().upto(8), want.restricted(|d| d <= 8));
    }
}

#[test]
fn exponentials_are_automorphisms() {
    let m = engine(8);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let pairs = sample_pairs(&m, 8, 120, &mut rng);
    for _ in 0..6 {
        let y = random_positive(&m, 8, &mut rng);
        let g = TruncAut::exp_ad(m.clone(), &y, 8).unwrap();
        let rep = g.aut_check(&pairs).unwrap();
        assert!(rep.passed(), "{y}: {:?}", rep.failures);
        assert!(rep.checked > 60);
    }
    let f = TruncAut::exp_ad(m.clone(), &MonsterElt::f_real().scale(&q(3)), 8).unwrap();
    assert!(f.aut_check(&pairs).unwrap().passed());
}

#[test]
fn homogeneous_exponentials_sit_at_their_degree() {
    let m = engine(9);
    for b in sample_basis(&m, 9, 3).into_iter().filter(MonsterElt::is_positive_sector) {
        let d = b.min_degree().unwrap();
        if d > 7 {
            continue;
        }
        let g = TruncAut::exp_ad(m.clone(), &b, 9).unwrap();
        assert!(g.in_level(d).unwrap(), "{b}");
        assert!(!g.in_level(d + 1).unwrap(), "{b}");
        // the certified level drops below d only when some generator's change
        // falls outside the window
        let lv = g.filtration_level().unwrap();
        assert!(lv.level <= d, "{b}");
        assert_eq!(lv.level < d, lv.window_limited, "{b}");
    }
}

#[test]
fn levels_are_monotone_under_composition() {
    let m = engine(8);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..15 {
        let a = realize(&random_unipotent_word(&m, 8, 2, &mut rng), m.clone(), 8).unwrap();
        let b = realize(&random_unipotent_word(&m, 8, 2, &mut rng), m.clone(), 8).unwrap();
        let la = a.filtration_level().unwrap().level;
        let lb = b.filtration_level().unwrap().level;
        let lab = a.compose(&b).unwrap().filtration_level().unwrap().level;
        assert!(lab >= la.min(lb));
    }
}

#[test]
fn log_and_exp_invert_each_other() {
    let m = engine(8);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..10 {
        let y = random_positive(&m, 8, &mut rng);
        let g = TruncAut::exp_ad(m.clone(), &y, 8).unwrap();
        let l = g.log_unipotent().unwrap();
        assert_eq!(l.restricted(|d| d <= 8), y.restricted(|d| d <= 8));
    }
    for _ in 0..10 {
        let g = realize(&random_unipotent_word(&m, 8, 4, &mut rng), m.clone(), 8).unwrap();
        let back = TruncAut::exp_ad(m.clone(), &g.log_unipotent().unwrap(), 8).unwrap();
        assert!(back.equal(&g).unwrap());
    }
}

#[test]
fn conjugation_diagram() {
    let m = engine(8);
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..10 {
        let g = realize(&random_unipotent_word(&m, 8, 3, &mut rng), m.clone(), 8).unwrap();
        let y = random_positive(&m, 8, &mut rng);
        let lhs = TruncAut::exp_ad(m.clone(), &g.Ad(&y).unwrap(), 8).unwrap();
        let rhs = g.compose(&TruncAut::exp_ad(m.clone(), &y, 8).unwrap()).unwrap().compose(&g.invert()).unwrap();
        assert!(lhs.equal(&rhs).unwrap());
    }
}

#[test]
fn peeling_examples() {
    let m = engine(8);
    let g = TruncAut::exp_ad(m.clone(), &MonsterElt::e(x(0, 1, 1)).scale(&q(5)), 8).unwrap();
    let w = approximate_by_generators(&g, 8).unwrap();
    assert_eq!(w, GroupWord::gen(GenSymbol::x(x(0, 1, 1), q(5))));

    let br = m.bracket_exact(&MonsterElt::e(x(0, 1, 1)), &MonsterElt::e(x(0, 1, 2)));
    let g = TruncAut::exp_ad(m.clone(), &br, 8).unwrap();
    let w = approximate_by_generators(&g, 6).unwrap();
    let comm = GroupWord::commutator(
        &GroupWord::gen(GenSymbol::x(x(0, 1, 1), q(1))),
        &GroupWord::gen(GenSymbol::x(x(0, 1, 2), q(1))),
    );
    assert_eq!(w, comm);
    let r = realize(&w, m.clone(), 8).unwrap().invert().compose(&g).unwrap();
    assert!(r.in_level(7).unwrap());
}

#[test]
fn peeling_roundtrip() {
    let m = engine(9);
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for _ in 0..8 {
        let g = realize(&random_unipotent_word(&m, 9, 3, &mut rng), m.clone(), 9).unwrap();
        let w = approximate_by_generators(&g, 8).unwrap();
        let r = realize(&w, m.clone(), 9).unwrap().invert().compose(&g).unwrap();
        assert!(r.in_level(9).unwrap(), "{w}");
    }
}

#[test]
fn torus_and_negative_part_are_rejected_where_they_must_be() {
    let m = engine(6);
    let t = TruncAut::torus(m.clone(), &q(2), &q(1), 6).unwrap();
    assert!(t.log_unipotent().is_err());
    assert!(approximate_by_generators(&t, 3).is_err());
    assert!(TruncAut::exp_ad(m.clone(), &MonsterElt::f(x(0, 1, 1)), 6).is_err());
    assert!(TruncAut::exp_ad(m, &MonsterElt::h1(), 6).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn one_parameter_subgroups(u in -4i64..4, v in -4i64..4, which in 0usize..6) {
        let m = engine(8);
        let xs = [
            MonsterElt::e_real(),
            MonsterElt::e(x(0, 1, 1)),
            MonsterElt::e(x(1, 2, 1)),
            MonsterElt::e(x(0, 3, 1)),
            m.bracket_exact(&MonsterElt::e(x(0, 1, 1)), &MonsterElt::e(x(0, 1, 2))),
            MonsterElt::f_real(),
        ];
        let y = &xs[which];
        let gu = TruncAut::exp_ad(m.clone(), &y.scale(&q(u)), 8).unwrap();
        let gv = TruncAut::exp_ad(m.clone(), &y.scale(&q(v)), 8).unwrap();
        let guv = TruncAut::exp_ad(m.clone(), &y.scale(&q(u + v)), 8).unwrap();
        prop_assert!(gu.compose(&gv).unwrap().equal(&guv).unwrap());
    }

    #[test]
    fn inverse_composes_to_identity(seed in 0u64..1000) {
        let m = engine(8);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = realize(&random_unipotent_word(&m, 8, 3, &mut rng), m.clone(), 8).unwrap();
        prop_assert!(g.compose(&g.invert()).unwrap().is_identity().unwrap());
        prop_assert!(g.invert().compose(&g).unwrap().is_identity().unwrap());
    }

    #[test]
    fn images_store_no_zero_coefficients(seed in 0u64..1000) {
        let m = engine(7);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let g = realize(&random_unipotent_word(&m, 7, 2, &mut rng), m.clone(), 7).unwrap();
        for (_, v) in g.images().unwrap().iter() {
            prop_assert!(v.upto(7).terms().iter().all(|(_, c)| !c.is_zero()));
        }
    }
}
