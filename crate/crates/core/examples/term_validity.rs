//! Brute-force validity of `t_n ≤ s_n`, with a falsifying assignment when there is one.

use latcorr::catalog::builtin;
use latcorr::term::{counterexample, s_term, t_term};

fn main() {
    for name in ["chain_3", "boolean_2", "M3", "N5", "paper_fig"] {
        let l = builtin(name).expect("builtin");
        for n in 0..=2 {
            match counterexample(&l, &t_term(n), &s_term(n), 1 << 24).expect("within budget") {
                None => println!("{name:<10} n={n}: valid"),
                Some(v) => {
                    let shown: Vec<String> = v.iter().map(|(x, &e)| format!("{x}={}", l.label(e))).collect();
                    println!("{name:<10} n={n}: fails at {}", shown.join(" "));
                }
            }
        }
    }
    println!("t_2 = {}", t_term(2));
    println!("s_2 = {}", s_term(2));
}
