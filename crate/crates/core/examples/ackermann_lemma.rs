//! The right Ackermann lemma on small Kripke frames: substituting the minimal value `α` for
//! `p` agrees with the existence of a `p`-variant above `α`.

use latcorr::classical::{ackermann_sweep, KripkeFrame, ModalFormula};

fn main() {
    let (p, q, r) = (ModalFormula::var("p"), ModalFormula::var("q"), ModalFormula::var("r"));
    let alphas = [
        ModalFormula::Bot,
        q.clone(),
        ModalFormula::dia(q.clone()),
        ModalFormula::boxed(ModalFormula::or(q.clone(), r.clone())),
        ModalFormula::and(ModalFormula::dia(q.clone()), ModalFormula::not(r.clone())),
    ];
    let beta = ModalFormula::dia(p.clone());
    let gamma = ModalFormula::not(p.clone());
    let mut checked = 0;
    for states in 1..=3 {
        for f in KripkeFrame::all_frames(states) {
            for a in &alphas {
                assert!(ackermann_sweep(&f, a, &beta, &gamma, "p").expect("preconditions hold"));
                checked += 1;
            }
        }
    }
    println!("β = {beta}, γ = {gamma}: both sides agree on {checked} (frame, α) pairs");
    let f = KripkeFrame::new(2, &[(0, 1)]);
    println!("positive γ is rejected: {:?}", ackermann_sweep(&f, &q, &beta, &p, "p").unwrap_err());
}
