//! The scripted derivation of `t_n ≤ s_n` into its pure ladder, as text or JSON.
//!
//! `cargo run --example alba_trace -- 2 json`

use latcorr::nation::{fo_translate, scripted_derivation};

fn main() {
    let n: usize = std::env::args().nth(1).and_then(|a| a.parse().ok()).unwrap_or(1);
    let json = std::env::args().nth(2).is_some_and(|a| a == "json");
    let trace = scripted_derivation(n).expect("n in range");
    if json {
        println!("{}", serde_json::to_string_pretty(&trace.to_json()).expect("json"));
        return;
    }
    print!("{}", trace.to_text());
    println!("{} rule steps; replay: {:?}", trace.rule_ids().len(), trace.replay());
    let fo = fo_translate(trace.last()).expect("ends in a ladder");
    println!("first-order reading: {fo}");
}
