use std::collections::BTreeSet;
use std::sync::OnceLock;

use latcorr::bitset::Set;
use latcorr::catalog::{enumerate_lattices, parse_lattice, serialize};
use latcorr::classical::{
    ackermann_sweep, adjunction_holds, church_rosser, modal_valid, reduced_form, KripkeFrame, ModalFormula,
};
use latcorr::lattice::FiniteLattice;
use latcorr::nation::{dgraph, fo_translate, pure_system, Variant};
use latcorr::presentation::{isomorphic_to, presentation_of};
use latcorr::term::{valid_inequality, LatticeTerm};
use proptest::prelude::*;

fn catalog() -> &'static [FiniteLattice] {
    static L: OnceLock<Vec<FiniteLattice>> = OnceLock::new();
    L.get_or_init(|| enumerate_lattices(6, true).unwrap())
}

fn frame(n: usize, succ: &[u8]) -> KripkeFrame {
    let pairs: Vec<(usize, usize)> =
        (0..n).flat_map(|a| (0..n).filter(move |&b| succ[a] >> b & 1 == 1).map(move |b| (a, b))).collect();
    KripkeFrame::new(n, &pairs)
}

fn term() -> impl Strategy<Value = LatticeTerm> {
    let leaf = prop_oneof![
        Just(LatticeTerm::Bot),
        Just(LatticeTerm::Top),
        Just(LatticeTerm::var("x")),
        Just(LatticeTerm::var("y")),
        Just(LatticeTerm::var("z")),
    ];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| LatticeTerm::meet(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| LatticeTerm::join(a, b)),
        ]
    })
}

#[test]
fn dedup_counts() {
    let sizes: Vec<usize> = (1..=6).map(|k| catalog().iter().filter(|l| l.size() == k).count()).collect();
    assert_eq!(sizes, [1, 1, 1, 2, 5, 15]);
}

#[test]
fn dplus_is_contained_in_d() {
    for l in catalog() {
        let d = dgraph(l, Variant::D);
        let plus = dgraph(l, Variant::Dplus);
        for &(a, b) in &plus.edges {
            assert!(d.has_edge(a, b));
        }
    }
}

#[test]
fn first_order_reading_matches_walks() {
    for n in 1..=3 {
        let fo = fo_translate(&pure_system(n)).unwrap();
        for l in catalog() {
            let p = presentation_of(l);
            let g = dgraph(l, Variant::Dplus);
            assert_eq!(fo.holds_in(&p), !g.has_chain(n));
            assert_eq!(fo.holds_in_graph(&g), !g.has_chain(n));
        }
    }
}

#[test]
fn walk_monotonicity() {
    for l in catalog() {
        let g = dgraph(l, Variant::Dplus);
        for n in 0..5 {
            assert!(!g.has_chain(n + 1) || g.has_chain(n));
            assert!(!g.has_simple_chain(n) || g.has_chain(n));
            assert_eq!(g.chain_witness(n).is_some(), g.has_chain(n));
        }
    }
}

#[test]
fn adjunction_on_small_frames() {
    for n in 1..=3 {
        assert!(KripkeFrame::all_frames(n).all(|f| adjunction_holds(&f)));
    }
}

#[test]
fn right_ackermann_instances() {
    let p = ModalFormula::var("p");
    let q = ModalFormula::var("q");
    let alpha = ModalFormula::black_dia(ModalFormula::dia(q.clone()));
    let beta = ModalFormula::dia(p.clone());
    let gamma = ModalFormula::not(ModalFormula::boxed(p));
    for f in KripkeFrame::all_frames(2) {
        assert!(ackermann_sweep(&f, &alpha, &beta, &gamma, "p").unwrap());
    }
    let bad = ModalFormula::var("p");
    let f = frame(1, &[0]);
    assert!(ackermann_sweep(&f, &alpha, &bad, &q, "q").is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn church_rosser_views_agree_on_five_states(succ in proptest::collection::vec(0u8..32, 5)) {
        let f = frame(5, &succ);
        let cr = church_rosser(&f);
        prop_assert_eq!(reduced_form(&f), cr);
        prop_assert_eq!(modal_valid(&f, &ModalFormula::church_rosser()).unwrap(), cr);
    }

    #[test]
    fn adjunction_on_random_frames(succ in proptest::collection::vec(0u8..32, 5)) {
        prop_assert!(adjunction_holds(&frame(5, &succ)));
    }

    #[test]
    fn lattice_text_round_trip(i in 0usize..25) {
        let l = &catalog()[i];
        let back = parse_lattice(&serialize("L", l)).unwrap();
        prop_assert!(isomorphic_to(l, &back).is_some());
    }

    #[test]
    fn join_and_meet_bounds(i in 0usize..25, s in term(), t in term()) {
        let l = &catalog()[i];
        let budget = 1 << 20;
        let st = LatticeTerm::meet(s.clone(), t.clone());
        let sj = LatticeTerm::join(s.clone(), t.clone());
        prop_assert!(valid_inequality(l, &st, &s, budget).unwrap());
        prop_assert!(valid_inequality(l, &s, &sj, budget).unwrap());
        prop_assert!(valid_inequality(l, &s, &s, budget).unwrap());
    }

    #[test]
    fn set_algebra(a in any::<u64>(), b in any::<u64>()) {
        let (x, y) = (Set(a as u128), Set(b as u128));
        let model = |s: Set| s.iter().collect::<BTreeSet<usize>>();
        let (mx, my) = (model(x), model(y));
        prop_assert_eq!(model(x.union(y)), mx.union(&my).copied().collect());
        prop_assert_eq!(model(x.inter(y)), mx.intersection(&my).copied().collect());
        prop_assert_eq!(model(x.minus(y)), mx.difference(&my).copied().collect());
        prop_assert_eq!(x.is_subset(y), mx.is_subset(&my));
        prop_assert_eq!(x.len(), mx.len());
    }

    #[test]
    fn closure_is_a_closure_operator(i in 0usize..25, raw in any::<u16>()) {
        let p = presentation_of(&catalog()[i]);
        let s = Set(raw as u128).inter(p.all());
        let c = p.cl(s);
        prop_assert!(s.is_subset(c));
        prop_assert_eq!(p.cl(c), c);
        prop_assert!(p.is_closed(c));
    }
}
