//! Validity of `t_n ≤ s_n`, absence of D⁺-walks, and equi-validity of every derivation step,
//! for every lattice up to a size.

use latcorr::catalog::enumerate_lattices;
use latcorr::nation::verify_catalog;

fn main() {
    let max_size: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(5);
    let max_n: usize = std::env::args().nth(2).and_then(|a| a.parse().ok()).unwrap_or(2);
    let lattices: Vec<_> = enumerate_lattices(max_size, true)
        .expect("enumeration")
        .into_iter()
        .enumerate()
        .map(|(i, l)| (format!("L{i}"), l))
        .collect();
    let reports = verify_catalog(&lattices, max_n, 1 << 26, true).expect("derivations build");
    println!("{:<6} {:>3} {:>2} {:>8} {:>9} {:>6} status", "name", "|L|", "n", "valid", "no-chain", "steps");
    let mut failed = 0;
    for r in &reports {
        let valid = r.validity.map_or("skipped".to_string(), |v| v.to_string());
        let status = if r.passed() { "ok" } else { "FAIL" };
        failed += usize::from(!r.passed());
        println!("{:<6} {:>3} {:>2} {:>8} {:>9} {:>6} {status}", r.lattice, r.size, r.n, valid, r.no_chain, r.steps_checked);
        if let Some(f) = &r.step_failure {
            println!("       step {}: {}", f.step, f.detail);
        }
    }
    println!("{} checks, {failed} failed", reports.len());
    std::process::exit(i32::from(failed > 0));
}
