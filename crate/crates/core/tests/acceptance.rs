//! Acceptance suite: one PASS/FAIL line per criterion.

use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use latcorr::alba::{rule_soundness_suite, RuleId, SoundnessBounds};
use latcorr::bitset::Set;
use latcorr::catalog::{builtin, enumerate_lattices, lattices_with_join_irreducibles};
use latcorr::classical::church_rosser_sweep_exact;
use latcorr::lattice::FiniteLattice;
use latcorr::mml::{all_assignments, closed_valuations, standard_translation, vstar, LatticeFrame};
use latcorr::nation::{dgraph, pure_system, scripted_derivation, verify_catalog, Variant};
use latcorr::presentation::{canonical_map, is_isomorphism, isomorphic_to, presentation_of};
use latcorr::term::{eval, terms_up_to_depth, LatticeTerm};

const GOLDEN_BASE_CASE: &[&str] = &[
    "SPand", "RAcl", "AtomRXX", "OrBot", "AtCoat1", "TAndBot", "TBD", "TDB", "TNM", "APdiaXY", "SPand", "AJboxYX",
    "APdiaYX", "DM", "SPand", "TRRinv", "TAndBot", "AtCoat1", "TAndBot", "AtCoat1", "TBD", "TDB", "TR", "TAndBot",
    "MT", "DoubleAckermann", "MinCov2", "MinCovD", "CAnd", "AtomRXX", "AtCoat1", "CAnd",
];

type Outcome = Result<String, String>;

fn lattices(max: usize) -> Vec<(String, FiniteLattice)> {
    enumerate_lattices(max, true)
        .expect("enumeration within budget")
        .into_iter()
        .enumerate()
        .map(|(i, l)| (format!("L{i}"), l))
        .collect()
}

fn church_rosser_endpoints() -> Outcome {
    let mut parts = Vec::new();
    for states in [3, 4] {
        let start = Instant::now();
        let r = church_rosser_sweep_exact(states).map_err(|e| e.to_string())?;
        if !r.holds() {
            return Err(format!("{states} states: {:?}", r.disagreements.first()));
        }
        parts.push(format!("{} frames at |W|={states} in {:.1}s", r.frames, start.elapsed().as_secs_f64()));
    }
    Ok(parts.join(", "))
}

fn main_theorem() -> Outcome {
    let ls = lattices(6);
    let reports = verify_catalog(&ls, 3, 1 << 26, false).map_err(|e| e.to_string())?;
    let mut skipped = 0;
    for r in &reports {
        if r.validity.is_none() {
            if r.n <= 2 {
                return Err(format!("{} n={} skipped", r.lattice, r.n));
            }
            skipped += 1;
        }
        if !r.agrees() {
            return Err(format!("{} n={}: valid={:?} no_chain={}", r.lattice, r.n, r.validity, r.no_chain));
        }
    }
    Ok(format!("{} lattices × n≤3, {} checks, {skipped} skipped", ls.len(), reports.len()))
}

fn example_lattice() -> Outcome {
    let l = builtin("paper_fig").map_err(|e| e.to_string())?;
    let plus = dgraph(&l, Variant::Dplus);
    let d = dgraph(&l, Variant::D);
    let at = |g: &latcorr::nation::DGraph, x: &str| g.labels.iter().position(|y| y == x).expect("label");
    let e = at(&plus, "e");
    let from_e: Vec<String> = plus.successors(e).map(|k| format!("e→{}", plus.labels[k])).collect();
    if from_e != ["e→d"] {
        return Err(format!("D⁺ out-edges of e: {from_e:?}"));
    }
    if !(d.has_edge(at(&d, "e"), at(&d, "c")) && d.has_edge(at(&d, "c"), at(&d, "b"))) {
        return Err("no D-walk e,c,b".into());
    }
    Ok("D⁺(e) = {e→d}, D-walk e→c→b".into())
}

fn rule_soundness() -> Outcome {
    let bounds = SoundnessBounds::default();
    let mut comparisons = 0;
    for &rule in RuleId::ALL {
        let r = rule_soundness_suite(rule, &bounds).map_err(|e| format!("{}: {e}", rule.id()))?;
        if let Some((label, failure)) = &r.failure {
            return Err(format!("{}: {label}: {failure}", rule.id()));
        }
        if r.instances == 0 {
            return Err(format!("{}: no instances", rule.id()));
        }
        comparisons += r.comparisons;
    }
    Ok(format!("{} rules, {comparisons} comparisons", RuleId::ALL.len()))
}

fn derivation_replay() -> Outcome {
    let base = scripted_derivation(1).map_err(|e| e.to_string())?;
    let ids: Vec<&str> = base.rule_ids().iter().map(|r| r.id()).collect();
    if ids != GOLDEN_BASE_CASE {
        return Err(format!("base case sequence {ids:?}"));
    }
    base.replay().map_err(|(k, m)| format!("replay step {k}: {m}"))?;
    if base.last() != &pure_system(1) || base.last().system.len() != 3 {
        return Err(format!("base case ends in {}", base.last()));
    }
    let two = scripted_derivation(2).map_err(|e| e.to_string())?;
    if two.last() != &pure_system(2) || two.last().system.len() != 6 {
        return Err(format!("n=2 ends in {}", two.last()));
    }
    let ls: Vec<(String, FiniteLattice)> = lattices_with_join_irreducibles(3)
        .into_iter()
        .enumerate()
        .map(|(i, l)| (format!("J{i}"), l))
        .collect();
    let reports = verify_catalog(&ls, 2, 1 << 26, true).map_err(|e| e.to_string())?;
    let mut steps = 0;
    for r in &reports {
        if let Some(f) = &r.step_failure {
            return Err(format!("{} n={} step {}: {}", r.lattice, r.n, f.step, f.detail));
        }
        steps += r.steps_checked;
    }
    Ok(format!("golden trace, ladders of 3 and 6, {} lattices, {steps} step pairs equi-valid", ls.len()))
}

fn duality() -> Outcome {
    let ls = lattices(6);
    for (name, l) in &ls {
        let p = presentation_of(l);
        let closed = p.closed_downsets().map_err(|e| format!("{name}: {e}"))?;
        let map = canonical_map(l, &p, &closed).ok_or(format!("{name}: no canonical map"))?;
        if !is_isomorphism(l, &closed.lattice, &map) || isomorphic_to(l, &closed.lattice).is_none() {
            return Err(format!("{name}: not isomorphic"));
        }
    }
    Ok(format!("{} lattices", ls.len()))
}

/// Exhaustive over terms: local satisfaction per term, and the corollary over all pairs of
/// terms via their value tables (validity of `s ≤ t` depends only on those tables).
fn translation() -> Outcome {
    let vars = vec!["x".to_string(), "y".to_string()];
    let atoms = [LatticeTerm::Bot, LatticeTerm::Top, LatticeTerm::var("x"), LatticeTerm::var("y")];
    let terms = terms_up_to_depth(&atoms, 3);
    let ls = lattices(5);
    let mut classes_total = 0;
    for (name, l) in &ls {
        let lf = LatticeFrame::new(l);
        let origin = lf.presentation.origin().expect("from lattice").to_vec();
        let assigns: Vec<_> = all_assignments(l, &vars)
            .into_iter()
            .map(|v| {
                let u = vstar(l, &lf.presentation, &v);
                (v, u)
            })
            .collect();
        let closed = closed_valuations(&lf.presentation, &vars);
        let mut classes: BTreeMap<(Vec<usize>, Vec<Set>), &LatticeTerm> = BTreeMap::new();
        for t in &terms {
            let st = standard_translation(t);
            let mut alg = Vec::with_capacity(assigns.len());
            for (v, u) in &assigns {
                let a = eval(l, t, v).map_err(|e| e.to_string())?;
                let ext = lf.frame.extension(u, &st).map_err(|e| e.to_string())?;
                let expected: Set = (0..origin.len()).filter(|&i| l.leq(origin[i], a)).collect();
                if ext != expected {
                    return Err(format!("{name}: local satisfaction fails for {t} at {v:?}"));
                }
                alg.push(a);
            }
            let frame: Vec<Set> = closed
                .iter()
                .map(|u| lf.frame.extension(u, &st))
                .collect::<Result<_, _>>()
                .map_err(|e| e.to_string())?;
            classes.entry((alg, frame)).or_insert(t);
        }
        let reps: Vec<(&(Vec<usize>, Vec<Set>), &&LatticeTerm)> = classes.iter().collect();
        for ((a1, f1), s) in &reps {
            for ((a2, f2), t) in &reps {
                let algebraic = a1.iter().zip(a2).all(|(&x, &y)| l.leq(x, y));
                let framed = f1.iter().zip(f2).all(|(x, y)| x.is_subset(*y));
                let (lib_alg, lib_frame) = lf.corollary(s, t, 1 << 20).map_err(|e| e.to_string())?;
                if algebraic != framed || lib_alg != algebraic || lib_frame != framed {
                    return Err(format!("{name}: corollary fails for {s} ≤ {t}"));
                }
            }
        }
        classes_total += reps.len();
    }
    Ok(format!("{} terms on {} lattices, {classes_total} value classes compared pairwise", terms.len(), ls.len()))
}

fn closure_laws() -> Outcome {
    let ls = lattices(6);
    let mut covers = 0;
    for (name, l) in &ls {
        let p = presentation_of(l);
        let downs = p.downsets();
        let bar: Vec<Set> = downs.iter().map(|&s| p.closure_bar(s)).collect::<Result<_, _>>().map_err(|e| e.to_string())?;
        for (i, &s) in downs.iter().enumerate() {
            if !s.is_subset(bar[i]) || p.closure_bar(bar[i]).map_err(|e| e.to_string())? != bar[i] {
                return Err(format!("{name}: closure_bar not increasing/idempotent at {}", p.show_set(s)));
            }
            for (k, &t) in downs.iter().enumerate() {
                if s.is_subset(t) && !bar[i].is_subset(bar[k]) {
                    return Err(format!("{name}: closure_bar not monotone"));
                }
            }
        }
        for j in 0..p.size() {
            for &c in p.covers(j) {
                for k in c.iter() {
                    covers += 1;
                    let rest = p.cl(c.without(k));
                    let below = p.down_set(k).without(k);
                    let item4 = !p.covers(j).iter().any(|d| d.is_subset(rest.union(below)));
                    if rest.contains(j) || rest.contains(k) || below.contains(j) || !item4 {
                        return Err(format!("{name}: cover lemma fails at j={}, C={}, k={}", p.label(j), p.show_set(c), p.label(k)));
                    }
                }
            }
        }
    }
    Ok(format!("{} lattices, {covers} (j, C, k) triples", ls.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("Church–Rosser endpoint equivalence", church_rosser_endpoints),
        ("main theorem on lattices of size ≤ 6", main_theorem),
        ("example lattice D/D⁺ facts", example_lattice),
        ("rule soundness suites", rule_soundness),
        ("derivation replay", derivation_replay),
        ("duality reconstruction", duality),
        ("translation correctness", translation),
        ("closure laws and minimal-cover lemma", closure_laws),
    ];
    let mut failed = BTreeSet::new();
    for (k, (title, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}: {title} ({detail}) [{secs:.1}s]", k + 1),
            Err(detail) => {
                println!("FAIL {}: {title}: {detail} [{secs:.1}s]", k + 1);
                failed.insert(k + 1);
            }
        }
    }
    if !failed.is_empty() {
        eprintln!("failed criteria: {failed:?}");
        std::process::exit(1);
    }
}
