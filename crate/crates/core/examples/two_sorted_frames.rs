//! The enriched two-sorted frame of a lattice, evaluation of L⁺ terms, and quasi-inequality
//! validity with closed assignments.

use std::collections::BTreeMap;

use latcorr::bitset::Set;
use latcorr::catalog::builtin;
use latcorr::lplus::{parse_quasi, parse_term_props, Sort};
use latcorr::presentation::presentation_of;
use latcorr::two_sorted::{enriched_frame_of, holds, Model, ValuationMode, YMode, DEFAULT_SEARCH_BUDGET};

fn main() {
    let l = builtin("N5").expect("builtin");
    let p = presentation_of(&l);
    let f = enriched_frame_of(&p, YMode::Powerset);
    println!("E_N5: |X| = {}, |Y| = {}, directness {:?}", f.nx(), f.ny(), f.directness());
    for s in f.closed_sets() {
        println!("  closed set {}", p.show_set(s));
    }
    let mut v = BTreeMap::new();
    v.insert("p".to_string(), Set::singleton(0));
    let t = parse_term_props("<XY>[YX]<XX>p").expect("term");
    println!("cl({{{}}}) = {}", p.label(0), p.show_set(f.eval(&v, &t, Sort::X).expect("evaluates")));

    let model = Model::new(f, ValuationMode::Closed, "E_N5");
    for src in [
        "forall j : nomX ; p : prop . j <= p , j /\\ p <= bot => false",
        "forall j k : nomX ; C : nomY . j <= <XY>C , k <= <YX-1>C , <XX>j /\\ k <= bot => false",
    ] {
        let q = parse_quasi(src).expect("quasi-inequality");
        println!("{src}\n  holds: {}", holds(&model, &q, DEFAULT_SEARCH_BUDGET).expect("within budget"));
    }
}
