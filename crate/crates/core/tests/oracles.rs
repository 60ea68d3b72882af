//! Library results against independent brute-force reimplementations.

use std::collections::HashSet;

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use lexichoice_core::compose::{
    build_nested_reserves, build_soft_quota_tree, capacity_label, fold_left, fold_right, lex_compose,
    procedure_aggregate_quota, procedure_individual_quota,
};
use lexichoice_core::families::{enumerate_responsive, make_footnote_union, rng, ENUMERATION_CAP};
use lexichoice_core::props::{check_choice, table_violation};
use lexichoice_core::witness::procedure_witness;
use lexichoice_core::{
    ChoiceFunction, ChoiceTable, ExclusionFunction, GroundSet, ItemSet, LinearOrder, Property, SetValue,
    Threshold, TlcrParams,
};

fn s(items: &[usize]) -> ItemSet {
    ItemSet::from_items(items.iter().copied())
}

fn subsets(n: usize) -> impl Iterator<Item = ItemSet> {
    (0..1u32 << n).map(ItemSet::from_bits)
}

/// The `q` best acceptable items of `y`, walking `acceptable` from the top.
fn top_q(acceptable: &[usize], q: usize, y: ItemSet) -> ItemSet {
    ItemSet::from_items(acceptable.iter().copied().filter(|&x| y.contains(x)).take(q))
}

fn random_acceptable<R: Rng>(n: usize, r: &mut R) -> Vec<usize> {
    let mut v: Vec<usize> = (0..n).collect();
    v.shuffle(r);
    v.truncate(r.gen_range(0..=n));
    v
}

fn naive_pi(f: &dyn Fn(ItemSet) -> ItemSet, n: usize) -> bool {
    subsets(n).all(|a| subsets(n).all(|b| f(a | b) == f(f(a) | f(b))))
}

fn naive_sub(f: &dyn Fn(ItemSet) -> ItemSet, n: usize) -> bool {
    subsets(n).all(|a| subsets(n).filter(|&b| a.is_subset_of(b)).all(|b| ((a - f(a)) & f(b)).is_empty()))
}

fn naive_con(f: &dyn Fn(ItemSet) -> ItemSet, n: usize) -> bool {
    subsets(n).all(|a| {
        subsets(n)
            .filter(|&b| a.is_subset_of(b) && f(b).is_subset_of(a))
            .all(|b| f(a) == f(b))
    })
}

#[test]
fn responsive_matches_top_q_oracle() {
    let g = GroundSet::new(6).unwrap();
    let mut r = rng(11);
    for _ in 0..200 {
        let acc = random_acceptable(6, &mut r);
        let q = r.gen_range(0..=6);
        let c = ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&acc, 6).unwrap(), q).unwrap();
        for y in subsets(6) {
            assert_eq!(c.eval(y).unwrap(), top_q(&acc, q, y));
        }
    }
}

#[test]
fn responsive_examples() {
    let g = GroundSet::new(3).unwrap();
    let resp = |acc: &[usize], q| ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(acc, 3).unwrap(), q).unwrap();
    assert_eq!(resp(&[0, 1], 2).eval(s(&[1, 2])).unwrap(), s(&[1]));
    assert_eq!(resp(&[0, 1, 2], 0).eval(s(&[0, 1, 2])).unwrap(), s(&[]));
    assert_eq!(resp(&[1, 0], 1).eval(s(&[0, 1])).unwrap(), s(&[1]));
}

#[test]
fn union_of_orders_matches_oracle() {
    let g = GroundSet::new(5).unwrap();
    let mut r = rng(12);
    for _ in 0..100 {
        let lists: Vec<Vec<usize>> = (0..r.gen_range(0..4)).map(|_| random_acceptable(5, &mut r)).collect();
        let orders = lists.iter().map(|l| LinearOrder::from_acceptable(l, 5).unwrap()).collect();
        let c = ChoiceFunction::union_of_orders(&g, orders).unwrap();
        for y in subsets(5) {
            let want = lists.iter().fold(ItemSet::EMPTY, |acc, l| acc | top_q(l, 1, y));
            assert_eq!(c.eval(y).unwrap(), want);
        }
        let f = |y| c.eval(y).unwrap();
        assert!(naive_pi(&f, 5));
    }
}

/// Distinct tables over every `(order with ∅ marker, quota)` pair, built
/// without the library's enumeration.
fn brute_responsive_tables(n: usize, quotas: &[usize]) -> HashSet<Vec<ItemSet>> {
    let mut out = HashSet::new();
    for k in 0..=n {
        for acc in (0..n).permutations(k) {
            for &q in quotas {
                out.insert(subsets(n).map(|y| top_q(&acc, q, y)).collect());
            }
        }
    }
    out
}

#[test]
fn enumeration_counts_match_brute_force() {
    for (n, quotas) in [(2, vec![1]), (1, vec![0, 1]), (3, vec![0, 1, 2, 3]), (4, vec![0, 1, 2, 3, 4])] {
        let g = GroundSet::new(n).unwrap();
        let lib = enumerate_responsive(&g, None, quotas[0]..=*quotas.last().unwrap(), ENUMERATION_CAP).unwrap();
        let brute = brute_responsive_tables(n, &quotas);
        assert_eq!(lib.len(), brute.len(), "n={n}");
        let lib_tables: HashSet<Vec<ItemSet>> =
            lib.iter().map(|c| subsets(n).map(|y| c.eval(y).unwrap()).collect()).collect();
        assert_eq!(lib_tables, brute);
    }
    // With nothing acceptable only the constant-empty function remains.
    let g = GroundSet::new(3).unwrap();
    let only = enumerate_responsive(&g, Some(ItemSet::EMPTY), 0..=3, ENUMERATION_CAP).unwrap();
    assert_eq!(only.len(), 1);
}

#[test]
fn pi_equals_sub_and_con_on_every_table_with_three_items() {
    let n = 3;
    let slots: Vec<ItemSet> = subsets(n).collect();
    let mut agree = 0;
    let mut pi_count = 0;
    for code in 0u32..4096 {
        // Each input Y takes |Y| bits selecting its chosen subset.
        let mut bits = code;
        let mut raw = Vec::with_capacity(8);
        for &y in &slots {
            let members = y.to_vec();
            let mut chosen = ItemSet::EMPTY;
            for (i, &x) in members.iter().enumerate() {
                if bits >> i & 1 == 1 {
                    chosen = chosen.with(x);
                }
            }
            bits >>= members.len();
            raw.push(chosen.bits());
        }
        let t = ChoiceTable::from_raw(n, raw.clone()).unwrap();
        let lib_pi = table_violation(&t, Property::Pi, None).unwrap().is_none();
        let lib_sub = table_violation(&t, Property::Sub, None).unwrap().is_none();
        let lib_con = table_violation(&t, Property::Con, None).unwrap().is_none();
        let f = |y: ItemSet| ItemSet::from_bits(raw[y.bits() as usize]);
        assert_eq!(lib_pi, naive_pi(&f, n));
        assert_eq!(lib_sub, naive_sub(&f, n));
        assert_eq!(lib_con, naive_con(&f, n));
        agree += usize::from(lib_pi == (lib_sub && lib_con));
        pi_count += usize::from(lib_pi);
    }
    assert_eq!(agree, 4096);
    assert!(pi_count > 0 && pi_count < 4096);
}

#[test]
fn footnote_union_choices() {
    let g = GroundSet::new(7).unwrap();
    for (z, zp) in [(s(&[0]), s(&[1, 2])), (s(&[0, 1]), s(&[1, 2, 3])), (s(&[0, 3]), s(&[1, 2, 4])), (s(&[5]), s(&[0, 1, 2, 3]))] {
        let c = make_footnote_union(&g, z, zp).unwrap();
        assert!(check_choice(&c, Property::Pi).unwrap().holds);
        let rest = g.full() - (z | zp);
        for w in rest.subsets() {
            assert_eq!(c.eval(z | zp | w).unwrap(), z, "Z={z} Z'={zp} W={w}");
            assert_eq!(c.eval(zp | w).unwrap(), zp, "Z={z} Z'={zp} W={w}");
        }
    }
    assert!(make_footnote_union(&g, s(&[0, 1]), s(&[2])).is_err());
    assert!(make_footnote_union(&g, s(&[0]), s(&[0, 1])).is_err());
}

fn naive_lex(c1: &ChoiceFunction, c2: &ChoiceFunction, e: &ExclusionFunction, y: ItemSet) -> ItemSet {
    let z = c1.eval(y).unwrap();
    let rest = match e.eval(z).unwrap() {
        SetValue::Top => ItemSet::EMPTY,
        SetValue::Finite(b) => y - b,
    };
    z | c2.eval(rest).unwrap()
}

#[test]
fn lex_compose_examples() {
    let g = GroundSet::new(3).unwrap();
    let c1 = ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&[0, 1, 2], 3).unwrap(), 1).unwrap();
    let c2 = ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&[1, 2], 3).unwrap(), 1).unwrap();
    let full = g.full();
    assert_eq!(lex_compose(&c1, &c2, &ExclusionFunction::identity(&g)).unwrap().eval(full).unwrap(), s(&[0, 1]));
    assert_eq!(lex_compose(&c1, &c2, &ExclusionFunction::capacity(&g, 1)).unwrap().eval(full).unwrap(), s(&[0]));
}

#[test]
fn two_input_folds_agree_with_direct_evaluation() {
    let g = GroundSet::new(6).unwrap();
    let mut r = rng(13);
    for _ in 0..20 {
        let c1 = ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&random_acceptable(6, &mut r), 6).unwrap(), r.gen_range(0..4)).unwrap();
        let c2 = ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&random_acceptable(6, &mut r), 6).unwrap(), r.gen_range(0..4)).unwrap();
        let e = ExclusionFunction::from_fn(&g, |_| {
            if r.gen_bool(0.2) { SetValue::Top } else { SetValue::Finite(ItemSet::from_bits(r.gen::<u32>()) & g.full()) }
        });
        let cs = [c1.clone(), c2.clone()];
        let (l, rt, d) = (
            fold_left(&cs, std::slice::from_ref(&e)).unwrap(),
            fold_right(&cs, std::slice::from_ref(&e)).unwrap(),
            lex_compose(&c1, &c2, &e).unwrap(),
        );
        for y in subsets(6) {
            let want = naive_lex(&c1, &c2, &e, y);
            assert_eq!(d.eval(y).unwrap(), want);
            assert_eq!(l.eval(y).unwrap(), want);
            assert_eq!(rt.eval(y).unwrap(), want);
        }
    }
}

/// The procedures read directly off their prose, independent of the
/// library's implementation.
fn naive_procedure(cs: &[ChoiceFunction], n: usize, aggregate: bool, y: ItemSet) -> ItemSet {
    let mut left = y;
    let mut out = ItemSet::EMPTY;
    let mut sizes = Vec::new();
    for c in cs {
        let open = if aggregate { sizes.iter().sum::<usize>() < n } else { sizes.iter().all(|&k| k < n) };
        let pick = if open { c.eval(left).unwrap() } else { ItemSet::EMPTY };
        sizes.push(pick.len());
        left = left - pick;
        out = out | pick;
    }
    out
}

fn component_battery(g: &GroundSet, seed: u64) -> Vec<Vec<ChoiceFunction>> {
    let n = g.size();
    let mut r = rng(seed);
    (0..30)
        .map(|_| {
            (0..r.gen_range(1..=4))
                .map(|_| {
                    let orders = (0..r.gen_range(1..=2))
                        .map(|_| LinearOrder::from_acceptable(&random_acceptable(n, &mut r), n).unwrap())
                        .collect::<Vec<_>>();
                    if r.gen_bool(0.5) {
                        ChoiceFunction::responsive(g, orders[0].clone(), r.gen_range(0..=3)).unwrap()
                    } else {
                        ChoiceFunction::union_of_orders(g, orders).unwrap()
                    }
                })
                .collect()
        })
        .collect()
}

#[test]
fn procedures_match_prose_and_folds() {
    for n in [5, 6] {
        let g = GroundSet::new(n).unwrap();
        for cs in component_battery(&g, n as u64) {
            for quota in 1..=4 {
                let labels = vec![capacity_label(&g, quota); cs.len() - 1];
                let p1 = procedure_aggregate_quota(&cs, quota).unwrap();
                let p2 = procedure_individual_quota(&cs, quota).unwrap();
                let fr = fold_right(&cs, &labels).unwrap();
                let fl = fold_left(&cs, &labels).unwrap();
                for y in subsets(n) {
                    let a = naive_procedure(&cs, quota, true, y);
                    let i = naive_procedure(&cs, quota, false, y);
                    assert_eq!(p1.eval(y).unwrap(), a);
                    assert_eq!(p2.eval(y).unwrap(), i);
                    assert_eq!(fr.eval(y).unwrap(), a, "aggregate vs right fold, n={n} N={quota}");
                    assert_eq!(fl.eval(y).unwrap(), i, "individual vs left fold, n={n} N={quota}");
                }
            }
        }
    }
}

#[test]
fn procedure_instance_separates_folds() {
    let g = GroundSet::new(5).unwrap();
    let w = procedure_witness(&g, 3).unwrap();
    assert_eq!(w.aggregate, s(&[0, 1, 2, 3]));
    assert_eq!(w.individual, s(&[0, 1, 2, 3, 4]));
    assert!(w.separates());
    assert!(procedure_witness(&g, 2).is_err());
    assert!(procedure_witness(&GroundSet::new(4).unwrap(), 3).is_err());
}

/// No sampled pair of labels makes the left fold reproduce the aggregate
/// procedure, or the right fold the individual one on both instances.
#[test]
fn opposite_fold_labels_never_reproduce_procedures() {
    let g = GroundSet::new(5).unwrap();
    let w = procedure_witness(&g, 3).unwrap();
    let p1 = procedure_aggregate_quota(&w.components, 3).unwrap().tabulate().unwrap();
    let p2 = procedure_individual_quota(&w.components, 3).unwrap().tabulate().unwrap();
    let p2_merged = procedure_individual_quota(&w.merged, 3).unwrap().tabulate().unwrap();
    let mut r = rng(14);
    let mut labels: Vec<ExclusionFunction> = Vec::new();
    for t in [Threshold::Finite(0), Threshold::Finite(1), Threshold::Finite(2), Threshold::Finite(3), Threshold::Finite(4), Threshold::Infinite] {
        for k in [s(&[]), s(&[4]), s(&[2, 3])] {
            labels.push(ExclusionFunction::tlcr(&g, TlcrParams::new(t, k, vec![])).unwrap());
        }
    }
    for _ in 0..40 {
        labels.push(ExclusionFunction::from_fn(&g, |_| {
            if r.gen_bool(0.3) { SetValue::Top } else { SetValue::Finite(ItemSet::from_bits(r.gen::<u32>()) & g.full()) }
        }));
    }
    for e1 in &labels {
        for e2 in &labels {
            let pair = [e1.clone(), e2.clone()];
            assert_ne!(fold_left(&w.components, &pair).unwrap().tabulate().unwrap(), p1);
            let right_a = fold_right(&w.components, &pair).unwrap().tabulate().unwrap();
            let right_b = fold_right(&w.merged, &pair).unwrap().tabulate().unwrap();
            assert!(right_a != p2 || right_b != p2_merged);
        }
    }
}

#[test]
fn identity_folds_associate() {
    let g = GroundSet::new(5).unwrap();
    let id = ExclusionFunction::identity(&g);
    let mut r = rng(15);
    for _ in 0..20 {
        let cs: Vec<ChoiceFunction> = (0..3)
            .map(|_| ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&random_acceptable(5, &mut r), 5).unwrap(), r.gen_range(0..=5)).unwrap())
            .collect();
        let labels = [id.clone(), id.clone()];
        assert_eq!(fold_left(&cs, &labels).unwrap().tabulate().unwrap(), fold_right(&cs, &labels).unwrap().tabulate().unwrap());
    }
}

#[test]
fn empty_exclusion_ignores_order_of_inputs() {
    let g = GroundSet::new(5).unwrap();
    let empty = ExclusionFunction::empty(&g);
    let mut r = rng(16);
    for _ in 0..20 {
        let cs: Vec<ChoiceFunction> = (0..3)
            .map(|_| {
                let orders = (0..2).map(|_| LinearOrder::from_acceptable(&random_acceptable(5, &mut r), 5).unwrap()).collect();
                ChoiceFunction::union_of_orders(&g, orders).unwrap()
            })
            .collect();
        let labels = [empty.clone(), empty.clone()];
        let base = fold_right(&cs, &labels).unwrap().tabulate().unwrap();
        for perm in (0..3).permutations(3) {
            let p: Vec<ChoiceFunction> = perm.iter().map(|&i| cs[i].clone()).collect();
            assert_eq!(fold_right(&p, &labels).unwrap().tabulate().unwrap(), base);
            assert_eq!(fold_left(&p, &labels).unwrap().tabulate().unwrap(), base);
        }
    }
}

#[test]
fn soft_quota_caps_single_valued_components() {
    let g = GroundSet::new(5).unwrap();
    let mut r = rng(17);
    for _ in 0..20 {
        let cs: Vec<ChoiceFunction> = (0..5)
            .map(|_| ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&random_acceptable(5, &mut r), 5).unwrap(), 1).unwrap())
            .collect();
        let c = build_soft_quota_tree(&cs, 2).unwrap().eval().unwrap();
        for y in subsets(5) {
            let got = c.eval(y).unwrap();
            assert!(got.len() <= 3, "{y} -> {got}");
            // The tree keeps adding while fewer than three are chosen.
            assert_eq!(got, naive_procedure(&cs, 3, true, y));
        }
        let wide = build_soft_quota_tree(&cs, 5).unwrap().eval().unwrap();
        let id = vec![ExclusionFunction::identity(&g); 4];
        assert_eq!(wide.tabulate().unwrap(), fold_right(&cs, &id).unwrap().tabulate().unwrap());
    }
}

#[test]
fn nested_reserves_keep_reserved_items_early() {
    let g = GroundSet::new(6).unwrap();
    let mut r = rng(18);
    let reserves = [s(&[0, 1, 2, 3]), s(&[0, 1]), s(&[0])];
    for _ in 0..30 {
        let cs: Vec<ChoiceFunction> = (0..3)
            .map(|_| ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&random_acceptable(6, &mut r), 6).unwrap(), r.gen_range(0..=3)).unwrap())
            .collect();
        let c = build_nested_reserves(&cs, &reserves).unwrap().eval().unwrap();
        for y in subsets(6) {
            // Hand evaluation: chooser j sees what is left minus items whose
            // reserve level is below j.
            let mut left = y;
            let mut out = ItemSet::EMPTY;
            for (j, cj) in cs.iter().enumerate() {
                let blocked = reserves[0] - reserves[j];
                let pick = cj.eval(left - blocked).unwrap();
                out = out | pick;
                left = left - pick;
            }
            assert_eq!(c.eval(y).unwrap(), out);
        }
    }
    // No reserves at all: plain identity composition.
    let cs: Vec<ChoiceFunction> = (0..2)
        .map(|_| ChoiceFunction::responsive(&g, LinearOrder::from_acceptable(&random_acceptable(6, &mut r), 6).unwrap(), 2).unwrap())
        .collect();
    let plain = build_nested_reserves(&cs, &[ItemSet::EMPTY, ItemSet::EMPTY]).unwrap().eval().unwrap();
    let id = lex_compose(&cs[0], &cs[1], &ExclusionFunction::identity(&g)).unwrap();
    assert_eq!(plain.tabulate().unwrap(), id.tabulate().unwrap());
    assert!(build_nested_reserves(&cs, &[s(&[0]), s(&[1])]).is_err());
}
