use latcorr::cli::run;

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("latcorr").chain(args.iter().copied());
    let code = run(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

#[test]
fn check_ineq_valid() {
    let (code, out, _) = call(&["check-ineq", "--lattice", "chain_1", "--lhs", "x", "--rhs", "x"]);
    assert_eq!(code, 0);
    assert_eq!(out.trim(), "VALID");
}

#[test]
fn check_ineq_invalid_prints_counterexample() {
    let (code, out, _) = call(&["check-ineq", "--lattice", "N5", "--lhs", "x \\/ y", "--rhs", "x"]);
    assert_eq!(code, 1);
    assert!(out.starts_with("INVALID"));
    let json: serde_json::Value = serde_json::from_str(&out[out.find('{').unwrap()..]).unwrap();
    assert!(json["counterexample"]["assignment"].is_object());
}

#[test]
fn distributive_check() {
    let args = ["check-ineq", "--lattice", "N5", "--lhs", "x /\\ (y \\/ z)", "--rhs", "(x /\\ y) \\/ (x /\\ z)"];
    assert_eq!(call(&args).0, 1);
    let args = ["check-ineq", "--lattice", "boolean_2", "--lhs", "x /\\ (y \\/ z)", "--rhs", "(x /\\ y) \\/ (x /\\ z)"];
    assert_eq!(call(&args).0, 0);
}

#[test]
fn dchain_on_example_lattice() {
    let (code, out, _) = call(&["dchain", "--lattice", "paper_fig", "--plus"]);
    assert_eq!(code, 0);
    assert!(out.lines().any(|l| l == "e→d"));
    assert!(!out.lines().any(|l| l == "e→c" || l == "e→a"));
    let (_, d, _) = call(&["dchain", "--lattice", "paper_fig"]);
    assert!(d.lines().any(|l| l == "e→c") && d.lines().any(|l| l == "c→b"));
}

#[test]
fn church_rosser_three_states() {
    let (code, out, _) = call(&["church-rosser", "--max-states", "3"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("512 frames, equivalence holds"));
}

#[test]
fn lattice_enumeration_counts() {
    let (code, out, _) = call(&["lattices", "enum", "--max-size", "6", "--dedup"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().last().unwrap(), "25 lattices");
}

#[test]
fn lattice_show_json_round_trips() {
    let (code, out, _) = call(&["--json", "lattices", "show", "N5"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["direct"], true);
    let l = latcorr::catalog::parse_lattice_json(&v["lattice"].to_string()).unwrap();
    let n5 = latcorr::catalog::builtin("N5").unwrap();
    assert!(latcorr::presentation::isomorphic_to(&l, &n5).is_some());
}

#[test]
fn nation_verify_small() {
    let (code, out, _) = call(&["nation", "verify", "--max-size", "4", "--max-n", "1"]);
    assert_eq!(code, 0);
    assert!(out.contains("0 failed"));
}

#[test]
fn alba_trace_json() {
    let (code, out, _) = call(&["--json", "alba", "trace", "--n", "1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert!(v.is_object());
}

#[test]
fn single_rule_soundness() {
    let (code, out, _) = call(&["rules", "soundness", "--rule", "SPand", "--max-x", "2", "--max-y", "1", "--depth", "1"]);
    assert_eq!(code, 0, "{out}");
}

#[test]
fn translate_term() {
    let (code, out, _) = call(&["translate", "--term", "x \\/ y"]);
    assert_eq!(code, 0);
    assert!(out.contains("(EA)(x \\/ y)"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(call(&["bogus"]).0, 2);
    assert_eq!(call(&["check-ineq", "--lattice", "chain_1"]).0, 2);
    assert_eq!(call(&["check-ineq", "--lattice", "no_such", "--lhs", "x", "--rhs", "x"]).0, 2);
    assert_eq!(call(&["check-ineq", "--lattice", "chain_1", "--lhs", "x /\\", "--rhs", "x"]).0, 2);
}
