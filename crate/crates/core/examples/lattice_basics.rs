//! Join- and meet-irreducibles, minimal join-covers and the dual of a few named lattices.

use latcorr::catalog::builtin;

fn main() {
    for name in ["N5", "M3", "paper_fig"] {
        let l = builtin(name).expect("builtin");
        println!("{name}: {} elements, bottom {}, top {}", l.size(), l.label(l.bottom()), l.label(l.top()));
        println!("  J(L) = {}", l.show_set(l.join_irreducibles()));
        println!("  M(L) = {}", l.show_set(l.meet_irreducibles()));
        for j in l.join_irreducibles().iter() {
            let covers: Vec<String> = l.minimal_covers(j).covers.iter().map(|&c| l.show_set(c)).collect();
            println!("  minimal covers of {}: {}", l.label(j), covers.join(" "));
        }
        let d = l.dual();
        println!("  dual has |J| = {}", d.join_irreducibles().len());
    }
}
