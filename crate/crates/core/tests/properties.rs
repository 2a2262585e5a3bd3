//! Structural invariants over random abelian-quotient and congruence handles.

use drinfeld_core::algebra::{Field, Poly, PolyRing};
use drinfeld_core::autos::{AutoSpec, Primitive};
use drinfeld_core::genuine::{verdict, Outcome, Reason};
use drinfeld_core::io::{AutoSpecFile, SubgroupFile};
use drinfeld_core::matrices::{Mat2, Mode};
use drinfeld_core::subgroups::{QuasiLevel, SubgroupHandle};
use drinfeld_core::Caps;
use proptest::prelude::*;
use proptest::test_runner::Config;

const BUDGET: usize = 64;

fn config(cases: u32) -> Config {
    Config { cases, failure_persistence: None, ..Config::default() }
}

fn poly(k: &Field, raw: &[u8]) -> Poly {
    Poly::from_coeffs(raw.iter().map(|&c| c % k.q() as u8).collect())
}

#[derive(Debug, Clone)]
struct RawHandle {
    q: u32,
    conductor: Vec<u8>,
    basis: Vec<Vec<u8>>,
}

fn raw_handle() -> impl Strategy<Value = RawHandle> {
    (prop_oneof![Just(2u32), Just(3u32)], 1usize..=3)
        .prop_flat_map(|(q, len)| {
            (
                Just(q),
                prop::collection::vec(any::<u8>(), len),
                prop::collection::vec(prop::collection::vec(any::<u8>(), len), 0..len),
            )
        })
        .prop_map(|(q, mut conductor, basis)| {
            conductor.push(1);
            RawHandle { q, conductor, basis }
        })
}

/// `None` when the quasi-level is everything.
fn build(raw: &RawHandle) -> Option<SubgroupHandle> {
    let k = Field::of_order(raw.q).unwrap();
    let basis: Vec<Poly> = raw.basis.iter().map(|b| poly(&k, b)).collect();
    let ql = QuasiLevel::new(&k, &poly(&k, &raw.conductor), &basis).unwrap();
    if ql.is_full() {
        return None;
    }
    Some(SubgroupHandle::from_quasilevel_abelian(&ql, Caps::default()).unwrap())
}

/// Inner by `T(c t^j) w`, a ring automorphism, or the contragredient.
fn standard(k: &Field, kind: u8, c: u8, j: u8) -> AutoSpec {
    let r = PolyRing::new(k.clone());
    let c = c % k.q() as u8;
    let p = match kind % 3 {
        0 => {
            let g = Mat2::t(Poly::monomial(c, (j % 3) as usize)).mul(&Mat2::weyl(k), &r);
            Primitive::Inner(g)
        }
        1 => Primitive::RingAuto { a: 1 + c % (k.q() as u8 - 1), b: j % k.q() as u8, e: 0 },
        _ => Primitive::Contragredient,
    };
    AutoSpec::single(k, p)
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn standard_automorphisms_preserve_index_normality_and_congruence(
        raw in raw_handle(), kind in any::<u8>(), c in any::<u8>(), j in any::<u8>()
    ) {
        let Some(h) = build(&raw) else { return Ok(()) };
        let a = standard(h.field(), kind, c, j);
        a.validate(Mode::SL).unwrap();
        let moved = a.apply(&h).unwrap();
        prop_assert_eq!(moved.index(), h.index());
        prop_assert_eq!(moved.is_normal(), h.is_normal());
        prop_assert_eq!(moved.is_congruence().unwrap(), h.is_congruence().unwrap());
        prop_assert_eq!(moved.quasi_level().unwrap().codim(), h.quasi_level().unwrap().codim());
    }

    #[test]
    fn application_is_functorial(
        raw in raw_handle(), k1 in any::<u8>(), k2 in any::<u8>(), c in any::<u8>(), j in any::<u8>()
    ) {
        let Some(h) = build(&raw) else { return Ok(()) };
        let k = h.field().clone();
        let a = standard(&k, k1, c, j);
        let b = standard(&k, k2, j, c);
        let ab = a.compose(&b).unwrap();
        let stepwise = a.apply(&b.apply(&h).unwrap()).unwrap();
        prop_assert!(ab.apply(&h).unwrap().same_subgroup(&stepwise).unwrap());
        let back = ab.inverse().apply(&ab.apply(&h).unwrap()).unwrap();
        prop_assert!(back.same_subgroup(&h).unwrap());
    }

    #[test]
    fn matrix_action_is_multiplicative(
        q in prop_oneof![Just(2u32), Just(3u32)],
        kind in any::<u8>(), c in any::<u8>(), j in any::<u8>(),
        x in prop::collection::vec(any::<u8>(), 1..4), y in prop::collection::vec(any::<u8>(), 1..4),
    ) {
        let k = Field::of_order(q).unwrap();
        let r = PolyRing::new(k.clone());
        let a = standard(&k, kind, c, j);
        let m1 = Mat2::t(poly(&k, &x)).mul(&Mat2::weyl(&k), &r);
        let m2 = Mat2::weyl(&k).mul(&Mat2::t(poly(&k, &y)), &r);
        let lhs = a.apply_matrix(&m1.mul(&m2, &r)).unwrap();
        let rhs = a.apply_matrix(&m1).unwrap().mul(&a.apply_matrix(&m2).unwrap(), &r);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn verdict_is_invariant_under_standard_automorphisms(
        raw in raw_handle(), kind in any::<u8>(), c in any::<u8>(), j in any::<u8>()
    ) {
        let Some(h) = build(&raw) else { return Ok(()) };
        let moved = standard(h.field(), kind, c, j).apply(&h).unwrap();
        prop_assert_eq!(verdict(&h, BUDGET).unwrap().label(), verdict(&moved, BUDGET).unwrap().label());
    }

    #[test]
    fn codimension_at_most_one_is_never_genuine(raw in raw_handle()) {
        let Some(h) = build(&raw) else { return Ok(()) };
        if h.quasi_level().unwrap().codim() <= 1 {
            prop_assert_eq!(verdict(&h, BUDGET).unwrap().label(), "not-genuine");
        }
    }

    #[test]
    fn verdicts_are_reproducible_from_their_record(raw in raw_handle()) {
        let Some(h) = build(&raw) else { return Ok(()) };
        let v = verdict(&h, BUDGET).unwrap();
        prop_assert_eq!(&verdict(&h, BUDGET).unwrap(), &v);
        // a round trip through the on-disk form judges the same subgroup
        let again = SubgroupFile::save(&h).load(Caps::default()).unwrap();
        prop_assert_eq!(&verdict(&again, BUDGET).unwrap(), &v);
        match &v.outcome {
            Outcome::NotGenuine(Reason::Witness(a)) => {
                prop_assert!(a.has_nonstandard());
                prop_assert!(a.apply(&h).unwrap().is_congruence().unwrap());
                prop_assert!(!h.is_congruence().unwrap());
            }
            Outcome::NotGenuine(Reason::Rule { rule, .. }) => {
                prop_assert!(v.provenance.iter().any(|r| r.fired && r.rule == *rule));
            }
            Outcome::Genuine(_) => prop_assert!(false, "abelian quotients carry no certificate"),
            Outcome::Unknown => {}
        }
    }

    #[test]
    fn spec_files_round_trip(raw in raw_handle(), kind in any::<u8>(), c in any::<u8>(), j in any::<u8>()) {
        let Some(h) = build(&raw) else { return Ok(()) };
        let text = serde_json::to_string(&SubgroupFile::save(&h)).unwrap();
        let back = SubgroupFile::from_json(&text, Caps::default()).unwrap();
        prop_assert!(back.same_subgroup(&h).unwrap());
        prop_assert_eq!(back.index(), h.index());
        let a = standard(h.field(), kind, c, j);
        let text = serde_json::to_string(&AutoSpecFile::save(&a)).unwrap();
        prop_assert_eq!(AutoSpecFile::from_json(&text).unwrap(), a);
    }
}

#[test]
fn principal_congruence_subgroups_are_stable_under_ring_shifts() {
    for q in [2, 3] {
        let k = Field::of_order(q).unwrap();
        let r = PolyRing::new(k.clone());
        for mode in [Mode::SL, Mode::GL] {
            let f = Poly::monomial(1, 1);
            let h = SubgroupHandle::principal_congruence(&k, &f, mode, Caps::default()).unwrap();
            let shift = AutoSpec::single(&k, Primitive::RingAuto { a: 1, b: 1, e: 0 });
            let moved = shift.apply(&h).unwrap();
            assert!(moved.is_congruence().unwrap());
            let expected = r.compose(&f, &Poly::from_coeffs(vec![1, 1]));
            assert_eq!(moved.quasi_level().unwrap().level(), expected, "q={q} {mode:?}");
        }
    }
}
