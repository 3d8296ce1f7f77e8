//! The standard translation into monotone modal logic, checked against lattice semantics at a
//! single point and for whole inequalities.

use latcorr::catalog::builtin;
use latcorr::mml::{all_assignments, check_corollary, check_local_satisfaction, standard_translation};
use latcorr::term::parse_term;

fn main() {
    let l = builtin("N5").expect("builtin");
    let t = parse_term("x /\\ (y \\/ z)").expect("term");
    println!("ST({t}) = {}", standard_translation(&t));
    let vars: Vec<String> = ["x", "y", "z"].map(String::from).to_vec();
    let mut agree = 0;
    let mut total = 0;
    for v in all_assignments(&l, &vars) {
        for j in l.join_irreducibles().iter() {
            let (a, b) = check_local_satisfaction(&l, &t, j, &v).expect("checkable");
            total += 1;
            agree += usize::from(a == b);
        }
    }
    println!("local satisfaction agrees at {agree}/{total} (point, assignment) pairs");

    for (lhs, rhs) in [("x /\\ (y \\/ z)", "(x /\\ y) \\/ (x /\\ z)"), ("x", "x \\/ y")] {
        let (a, b) = check_corollary(&l, &parse_term(lhs).unwrap(), &parse_term(rhs).unwrap(), 1 << 20).expect("checkable");
        println!("N5 ⊨ {lhs} ≤ {rhs}: {a}; frame validity: {b}");
    }
}
