//! Semantic equivalence of quasi-inequalities over finite model families.

use std::collections::BTreeSet;
use std::fmt;

use rayon::prelude::*;

use crate::bitset::Set;
use crate::catalog::enumerate_lattices;
use crate::lplus::{QuasiInequality, Rel};
use crate::presentation::presentation_of;
use crate::two_sorted::{
    all_frames, all_partial_orders, all_relations, enriched_frame_of, FrameError, Model, Search, ValuationMode, Witness, YMode,
};

/// What "equivalent on a model" means.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Granularity {
    /// Both quasi-inequalities hold, or both fail.
    Validity,
    /// The satisfying assignments of the two systems have the same projections onto the
    /// variables they share. This is the form in which rule soundness lemmas are stated.
    Local,
}

/// A family of finite models.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ModelClass {
    /// Every two-sorted frame with `1 ≤ |X| ≤ max_x`, `1 ≤ |Y| ≤ max_y`, arbitrary valuations.
    /// `R_XX` is enumerated only when the instance mentions it.
    TwoSorted { max_x: usize, max_y: usize },
    /// Enriched frames whose `R_XX` is a partial order, downset valuations.
    OrderedEnriched { max_x: usize, max_y: usize },
    /// Enriched frames of all lattices up to a size, closed valuations.
    Lattices { max_size: usize, y_mode: YMode },
}

impl ModelClass {
    /// The models of the class; relations not in `relations` are left empty.
    pub fn models(&self, relations: &BTreeSet<Rel>) -> Result<Vec<Model>, FrameError> {
        let uses_xx = relations.contains(&Rel::XX) || relations.contains(&Rel::XXInv);
        Ok(match *self {
            ModelClass::TwoSorted { max_x, max_y } | ModelClass::OrderedEnriched { max_x, max_y } => {
                let ordered = matches!(self, ModelClass::OrderedEnriched { .. });
                let mut out = Vec::new();
                for nx in 1..=max_x {
                    for ny in 1..=max_y {
                        let xx = if ordered {
                            Some(all_partial_orders(nx))
                        } else if uses_xx {
                            Some(all_relations(nx))
                        } else {
                            None
                        };
                        let mode = if ordered { ValuationMode::Downset } else { ValuationMode::Arbitrary };
                        for (i, f) in all_frames(nx, ny, relations, xx.as_deref()).into_iter().enumerate() {
                            out.push(Model::new(f, mode, format!("frame {nx}x{ny} #{i}")));
                        }
                    }
                }
                out
            }
            ModelClass::Lattices { max_size, y_mode } => enumerate_lattices(max_size, true)
                .map_err(|e| FrameError::Family(e.to_string()))?
                .iter()
                .enumerate()
                .map(|(i, l)| {
                    let f = enriched_frame_of(&presentation_of(l), y_mode);
                    Model::new(f, ValuationMode::Closed, format!("E_L #{i} (|L|={})", l.size()))
                })
                .collect(),
        })
    }
}

/// A model on which two quasi-inequalities disagree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Counterexample {
    pub model: String,
    pub granularity: Granularity,
    /// 1 or 2: the quasi-inequality whose system the witness satisfies.
    pub satisfied_by: u8,
    /// For `Local`, an assignment of the shared variables extending to a solution of one
    /// system only; for `Validity`, a full solution of the system that fails to hold.
    pub witness: Witness,
}

impl fmt::Display for Counterexample {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let w: Vec<String> = self.witness.iter().map(|(n, s)| format!("{n}={s:?}")).collect();
        write!(f, "{}: only system {} is satisfied by {{{}}}", self.model, self.satisfied_by, w.join(", "))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Verdict {
    Equivalent { models: usize },
    Counterexample(Counterexample),
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }
}

/// Compares the two quasi-inequalities on one model.
pub fn equivalent_on(
    model: &Model,
    q1: &QuasiInequality,
    q2: &QuasiInequality,
    granularity: Granularity,
    budget: u64,
) -> Result<Option<Counterexample>, FrameError> {
    let s1 = Search::new(model, q1, budget)?;
    let s2 = Search::new(model, q2, budget)?;
    let cex = |satisfied_by: u8, witness: Witness| Counterexample { model: model.name.clone(), granularity, satisfied_by, witness };
    match granularity {
        Granularity::Validity => {
            let (w1, w2) = (s1.witness()?, s2.witness()?);
            Ok(match (w1, w2) {
                (Some(w), None) => Some(cex(1, w)),
                (None, Some(w)) => Some(cex(2, w)),
                _ => None,
            })
        }
        Granularity::Local => {
            let u2 = q2.used();
            let shared: Vec<String> = q1.used().into_iter().filter(|(n, k)| u2.get(n) == Some(k)).map(|(n, _)| n).collect();
            let (p1, p2) = (s1.projections(&shared)?, s2.projections(&shared)?);
            let named = |v: &Vec<Set>| shared.iter().cloned().zip(v.iter().copied()).collect::<Witness>();
            if let Some(v) = p1.difference(&p2).next() {
                return Ok(Some(cex(1, named(v))));
            }
            Ok(p2.difference(&p1).next().map(|v| cex(2, named(v))))
        }
    }
}

/// Compares the two quasi-inequalities on every model; reports the first disagreement in
/// model order.
pub fn equivalent_over(
    models: &[Model],
    q1: &QuasiInequality,
    q2: &QuasiInequality,
    granularity: Granularity,
    budget: u64,
) -> Result<Verdict, FrameError> {
    let found: Result<Option<Counterexample>, FrameError> = models
        .par_iter()
        .map(|m| equivalent_on(m, q1, q2, granularity, budget))
        .find_map_first(|r| match r {
            Ok(None) => None,
            other => Some(other),
        })
        .transpose()
        .map(Option::flatten);
    Ok(match found? {
        Some(c) => Verdict::Counterexample(c),
        None => Verdict::Equivalent { models: models.len() },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lplus::parse_quasi;

    #[test]
    fn identical_systems_are_equivalent() {
        let q = parse_quasi("forall j : nomX ; p : prop . j /\\ p <= bot => false").unwrap();
        let models = ModelClass::TwoSorted { max_x: 3, max_y: 1 }.models(&BTreeSet::new()).unwrap();
        for g in [Granularity::Validity, Granularity::Local] {
            assert!(equivalent_over(&models, &q, &q, g, 1 << 20).unwrap().is_equivalent());
        }
    }

    #[test]
    fn local_detects_what_validity_misses() {
        // Both fail everywhere (satisfiable), but constrain p differently.
        let q1 = parse_quasi("forall p : prop . p <= bot => false").unwrap();
        let q2 = parse_quasi("forall p : prop . top <= p => false").unwrap();
        let models = ModelClass::TwoSorted { max_x: 1, max_y: 1 }.models(&BTreeSet::new()).unwrap();
        assert!(equivalent_over(&models, &q1, &q2, Granularity::Validity, 1 << 20).unwrap().is_equivalent());
        assert!(!equivalent_over(&models, &q1, &q2, Granularity::Local, 1 << 20).unwrap().is_equivalent());
    }

    #[test]
    fn model_counts() {
        let rels: BTreeSet<Rel> = [Rel::XX].into_iter().collect();
        let n = ModelClass::OrderedEnriched { max_x: 3, max_y: 1 }.models(&rels).unwrap().len();
        assert_eq!(n, 1 + 3 + 19);
        let lat = ModelClass::Lattices { max_size: 5, y_mode: YMode::Powerset }.models(&rels).unwrap();
        assert_eq!(lat.len(), 10);
    }
}
