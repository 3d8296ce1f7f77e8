//! The D and D⁺ relations of the example lattice and walks along them.

use latcorr::catalog::builtin;
use latcorr::nation::{dgraph, Variant};

fn main() {
    let l = builtin("paper_fig").expect("builtin");
    for variant in [Variant::D, Variant::Dplus] {
        let g = dgraph(&l, variant);
        println!("{variant:?}: {}", g.edge_labels().join(" "));
        for n in 0..=3 {
            let walk = g.chain_witness(n).map(|w| w.iter().map(|&v| g.labels[v].as_str()).collect::<Vec<_>>().join(","));
            println!("  walk of length {n}: {}", walk.unwrap_or_else(|| "none".into()));
        }
        println!("  {}; simple path of length 3: {}", g.max_finite_or_cyclic(), g.has_simple_chain(3));
    }
    let e = dgraph(&l, Variant::Dplus);
    let from_e: Vec<String> = e.edge_labels().into_iter().filter(|s| s.starts_with('e')).collect();
    println!("D⁺ edges out of e: {}", from_e.join(" "));
    let ei = e.labels.iter().position(|x| x == "e").expect("e is join-irreducible");
    println!("D⁺ walk of length 2 from e: {}", e.has_chain_from(ei, 2));
}
