//! A lattice is recovered from its join-presentation as the lattice of closed downsets.

use latcorr::catalog::{enumerate_lattices, paper_fig_presentation};
use latcorr::presentation::{canonical_map, presentation_of};

fn main() {
    let mut ok = 0;
    let lattices = enumerate_lattices(6, true).expect("within budget");
    for l in &lattices {
        let p = presentation_of(l);
        let closed = p.closed_downsets().expect("closed downsets form a lattice");
        if canonical_map(l, &p, &closed).is_some() {
            ok += 1;
        }
    }
    println!("{ok} of {} lattices of size ≤ 6 are isomorphic to their closed downsets", lattices.len());

    let p = paper_fig_presentation();
    println!("paper_fig presentation: direct = {}", p.properties().direct());
    let closed = p.closed_downsets().expect("lattice");
    for s in &closed.members {
        println!("  closed downset {}", p.show_set(*s));
    }
}
