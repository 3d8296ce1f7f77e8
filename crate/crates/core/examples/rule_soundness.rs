//! Runs the soundness and invertibility suite of every rule at the default bounds.

use std::time::Instant;

use latcorr::alba::{rule_soundness_suite, RuleId, SoundnessBounds};

fn main() {
    let bounds = SoundnessBounds::default();
    let mut failed = 0;
    for &rule in RuleId::ALL {
        let start = Instant::now();
        let rep = rule_soundness_suite(rule, &bounds).expect("suite runs");
        let status = if rep.passed() { "pass" } else { "FAIL" };
        println!(
            "{status} {:<16} {:>4} instances {:>9} comparisons {:>7.2}s",
            rule.id(),
            rep.instances,
            rep.comparisons,
            start.elapsed().as_secs_f64()
        );
        if let Some((inst, why)) = rep.failure {
            failed += 1;
            println!("    {inst}\n    {why:?}");
        }
    }
    std::process::exit(if failed == 0 { 0 } else { 1 });
}
