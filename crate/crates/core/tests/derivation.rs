use latcorr::alba::{apply, apply_rule, reorder, Step};
use latcorr::catalog::builtin;
use latcorr::nation::{
    dgraph, fo_translate, holds_on_lattice, initial_system, pure_system, scripted_derivation, scripted_derivation_up_to,
    NationError, Variant, MAX_SCRIPTED_N,
};

#[test]
fn base_case_has_thirty_two_rule_steps() {
    let t = scripted_derivation(1).unwrap();
    assert_eq!(t.rule_ids().len(), 32);
    assert_eq!(t.initial, initial_system(1));
    assert_eq!(t.last(), &pure_system(1));
    assert_eq!(
        t.last().to_string(),
        "forall j0 j1 : nomX ; C0 : nomY . j1 <= <XY>C0 , j0 <= <YX-1>C0 , <XX>j1 /\\ j0 <= bot => false"
    );
}

#[test]
fn second_level_ends_in_six_inequalities() {
    let t = scripted_derivation(2).unwrap();
    assert_eq!(t.steps.len(), 69);
    assert_eq!(t.last().system.len(), 6);
    assert!(t.replay().is_ok());
}

#[test]
fn third_level_ends_in_ladder() {
    let t = scripted_derivation(3).unwrap();
    assert_eq!(t.last(), &pure_system(3));
    assert_eq!(fo_translate(t.last()).unwrap().length, 3);
}

#[test]
fn out_of_range_is_reported() {
    assert!(matches!(scripted_derivation(0), Err(NationError::OutOfRange { .. })));
    assert!(matches!(scripted_derivation(MAX_SCRIPTED_N + 1), Err(NationError::OutOfRange { .. })));
    assert!(scripted_derivation_up_to(4, 4).is_ok());
}

#[test]
fn replay_detects_tampering() {
    let mut t = scripted_derivation(1).unwrap();
    let k = 5;
    t.steps[k].result = t.steps[k - 1].result.clone();
    assert_eq!(t.replay().unwrap_err().0, k);
}

#[test]
fn every_step_is_undone_by_its_inverse() {
    let t = scripted_derivation(2).unwrap();
    let mut prev = &t.initial;
    for (k, s) in t.steps.iter().enumerate() {
        match &s.step {
            Step::Rule(app) => {
                let (result, inverse) = apply_rule(prev, app).unwrap();
                assert_eq!(result, s.result, "step {}", k + 1);
                assert_eq!(&apply(&result, &inverse).unwrap(), prev, "inverse of step {}", k + 1);
            }
            Step::Reorder(p) => assert_eq!(reorder(prev, p).unwrap(), s.result),
        }
        prev = &s.result;
    }
}

#[test]
fn final_ladder_tracks_dplus_edges() {
    for name in ["boolean_2", "chain_3", "N5", "M3", "paper_fig"] {
        let l = builtin(name).unwrap();
        let edges = dgraph(&l, Variant::Dplus).has_chain(1);
        assert_eq!(holds_on_lattice(&l, &pure_system(1)).unwrap(), !edges, "{name}");
    }
}

#[test]
fn example_lattice_walks_from_e() {
    let l = builtin("paper_fig").unwrap();
    let plus = dgraph(&l, Variant::Dplus);
    let d = dgraph(&l, Variant::D);
    let e = plus.labels.iter().position(|x| x == "e").unwrap();
    assert!(!plus.has_chain_from(e, 2));
    assert!(d.has_chain_from(e, 2));
    assert!(plus.has_chain_from(e, 1));
}
