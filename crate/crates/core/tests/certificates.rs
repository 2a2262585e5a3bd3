use drinfeld_core::algebra::{Field, Poly};
use drinfeld_core::fingroup::{self, composition_factors, CompositionOptions, FactorKind, FinGroup, Subgroup};
use drinfeld_core::genuine::{certificate_from_quotient, divisibility_filter, premise_decision, Premises};
use drinfeld_core::matrices::{MatGroup, Mode};
use drinfeld_core::Caps;
use proptest::prelude::*;

fn full(g: &FinGroup) -> Subgroup {
    fingroup::closure(g, &g.generators(), Caps::default().group_limit()).unwrap()
}

fn sorted_factors(g: &FinGroup, seed: Option<u64>, q: u32) -> Vec<(u64, bool)> {
    let top = full(g);
    let opts = CompositionOptions { q: Some(q), shuffle_seed: seed };
    let mut f: Vec<(u64, bool)> = composition_factors(g, &top, &Subgroup::trivial(g), opts, 1 << 20)
        .unwrap()
        .into_iter()
        .map(|d| (d.order, d.kind == FactorKind::OtherSimple))
        .collect();
    f.sort();
    f
}

proptest! {
    #![proptest_config(proptest::test_runner::Config { cases: 12, failure_persistence: None, ..Default::default() })]

    // Jordan-Holder: any composition series gives the same factors.
    #[test]
    fn factors_do_not_depend_on_the_series(seed in any::<u64>()) {
        let s5 = FinGroup::symmetric(5).unwrap();
        prop_assert_eq!(sorted_factors(&s5, Some(seed), 2), vec![(2, false), (60, false)]);
        let k = Field::of_order(3).unwrap();
        let sl = FinGroup::Matrix(MatGroup::of(&k, &Poly::monomial(1, 2), Mode::SL).unwrap());
        prop_assert_eq!(sorted_factors(&sl, Some(seed), 3), sorted_factors(&sl, None, 3));
    }
}

#[test]
fn s7_certificate_is_reproducible() {
    let s7 = FinGroup::symmetric(7).unwrap();
    let top = full(&s7);
    let lim = Caps::default().group_limit();
    let first = certificate_from_quotient(&s7, &top, &Subgroup::trivial(&s7), 2, lim).unwrap();
    let (w, factors) = first.clone().expect("A7 lies outside the characteristic-2 family");
    assert_eq!((w.order, w.kind), (2520, FactorKind::OtherSimple));
    assert_eq!(factors.iter().map(|f| f.order).product::<u64>(), 5040);
    assert_eq!(certificate_from_quotient(&s7, &top, &Subgroup::trivial(&s7), 2, lim).unwrap(), first);
}

#[test]
fn psl2_family_members_give_no_certificate() {
    let lim = Caps::default().group_limit();
    for q in [4, 5] {
        let k = Field::of_order(q).unwrap();
        let sl = FinGroup::Matrix(MatGroup::of(&k, &Poly::t(), Mode::SL).unwrap());
        let top = full(&sl);
        assert_eq!(certificate_from_quotient(&sl, &top, &Subgroup::trivial(&sl), q, lim).unwrap(), None, "q={q}");
    }
    // A5 is PSL2(F4) but has no place in the characteristic-3 family
    let s5 = FinGroup::symmetric(5).unwrap();
    let top = full(&s5);
    assert!(certificate_from_quotient(&s5, &top, &Subgroup::trivial(&s5), 3, lim).unwrap().is_some());
}

#[test]
fn divisibility_filter_examples() {
    let (rule, _) = divisibility_filter(120, 120, 5, Mode::SL, true).unwrap();
    assert_eq!(rule.name(), "sl-normal-index-divisible-by-q-psl2");
    let (rule, _) = divisibility_filter(2, 2, 2, Mode::SL, true).unwrap();
    assert_eq!(rule.name(), "sl-normal-index-divisible-by-q-squared");
    assert!(divisibility_filter(600, 600, 5, Mode::GL, true).is_none());
    assert!(divisibility_filter(300, 300, 5, Mode::SL, true).is_none());
}

#[test]
fn filters_take_precedence_over_criteria() {
    for q in [2u32, 3, 4, 5, 7] {
        for mode in [Mode::SL, Mode::GL] {
            for index in 2..200u64 {
                for (torus_inside, scalars_inside) in [(false, false), (true, false), (true, true)] {
                    let p = Premises { mode, q, index, normal: true, torus_inside, scalars_inside };
                    let filtered = divisibility_filter(index, index, q, mode, true).is_some();
                    match premise_decision(&p, index) {
                        Some((false, _)) => assert!(filtered),
                        Some((true, _)) => assert!(!filtered),
                        None => assert!(!filtered),
                    }
                }
            }
        }
    }
}
