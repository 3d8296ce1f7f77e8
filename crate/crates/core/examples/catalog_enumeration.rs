//! Number of lattices of each size, up to isomorphism and as labelled structures.

use latcorr::catalog::{enumerate_lattices, serialize};

fn main() {
    let max: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(6);
    let dedup = enumerate_lattices(max, true).expect("within budget");
    for n in 1..=max {
        println!("size {n}: {} up to isomorphism", dedup.iter().filter(|l| l.size() == n).count());
    }
    println!("total {}", dedup.len());
    if let Some(l) = dedup.iter().find(|l| l.size() == 5) {
        println!("first lattice of size 5:\n{}", serialize("example", l));
    }
}
