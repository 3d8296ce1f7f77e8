//! Derivation traces: an initial quasi-inequality and the systems produced step by step.

use serde_json::{json, Value};

use super::apply::{apply_rule, reorder};
use super::{AlbaError, RuleApplication, RuleId};
use crate::lplus::{QuasiInequality, Side};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Step {
    Rule(RuleApplication),
    /// New `i`-th inequality is the old `perm[i]`-th.
    Reorder(Vec<usize>),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub step: Step,
    pub result: QuasiInequality,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DerivationTrace {
    pub initial: QuasiInequality,
    pub steps: Vec<TraceStep>,
}

impl DerivationTrace {
    pub fn new(initial: QuasiInequality) -> DerivationTrace {
        DerivationTrace { initial, steps: Vec::new() }
    }

    /// The current system.
    pub fn last(&self) -> &QuasiInequality {
        self.steps.last().map_or(&self.initial, |s| &s.result)
    }

    /// Applies a rule to the current system and records it.
    pub fn push(&mut self, app: RuleApplication) -> Result<&QuasiInequality, AlbaError> {
        let (result, _) = apply_rule(self.last(), &app)?;
        self.steps.push(TraceStep { step: Step::Rule(app), result });
        Ok(self.last())
    }

    pub fn push_reorder(&mut self, perm: &[usize]) -> Result<&QuasiInequality, AlbaError> {
        let result = reorder(self.last(), perm)?;
        self.steps.push(TraceStep { step: Step::Reorder(perm.to_vec()), result });
        Ok(self.last())
    }

    /// The initial system followed by every intermediate one.
    pub fn systems(&self) -> impl Iterator<Item = &QuasiInequality> {
        std::iter::once(&self.initial).chain(self.steps.iter().map(|s| &s.result))
    }

    /// Rule identifiers of the rule steps, in order.
    pub fn rule_ids(&self) -> Vec<RuleId> {
        self.steps
            .iter()
            .filter_map(|s| match &s.step {
                Step::Rule(a) => Some(a.rule),
                Step::Reorder(_) => None,
            })
            .collect()
    }

    /// Recomputes every step; returns the index of the first step whose stored result differs.
    pub fn replay(&self) -> Result<(), (usize, String)> {
        let mut cur = self.initial.clone();
        for (k, s) in self.steps.iter().enumerate() {
            let next = match &s.step {
                Step::Rule(a) => apply_rule(&cur, a).map(|(r, _)| r),
                Step::Reorder(p) => reorder(&cur, p),
            }
            .map_err(|e| (k, e.to_string()))?;
            if next != s.result {
                return Err((k, "stored result differs from recomputation".into()));
            }
            cur = next;
        }
        Ok(())
    }

    /// One line per step: `step k: RULE dir targets | system`.
    pub fn to_text(&self) -> String {
        let mut out = format!("initial | {}\n", self.initial);
        for (k, s) in self.steps.iter().enumerate() {
            let head = match &s.step {
                Step::Rule(a) => a.to_string(),
                Step::Reorder(p) => format!("reorder {p:?}"),
            };
            out.push_str(&format!("step {}: {head} | {}\n", k + 1, system_text(&s.result)));
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let steps: Vec<Value> = self
            .steps
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let mut v = match &s.step {
                    Step::Rule(a) => json!({
                        "rule": a.rule.id(),
                        "direction": a.direction.text(),
                        "targets": a.targets,
                        "bindings": a.bindings.iter().map(|(n, t)| (n.clone(), Value::String(t.to_string()))).collect::<serde_json::Map<_, _>>(),
                        "fresh": a.fresh,
                        "position": a.position.as_ref().map(|p| json!({
                            "side": if p.side == Side::Lhs { "lhs" } else { "rhs" },
                            "path": p.path,
                        })),
                        "at": a.at,
                    }),
                    Step::Reorder(p) => json!({ "rule": "reorder", "permutation": p }),
                };
                v["step"] = json!(k + 1);
                v["system"] = json!(s.result.system.iter().map(|i| i.to_string()).collect::<Vec<_>>());
                v["quasi"] = json!(s.result.to_string());
                v
            })
            .collect();
        json!({ "initial": self.initial.to_string(), "steps": steps })
    }
}

fn system_text(q: &QuasiInequality) -> String {
    q.system.iter().map(|i| i.to_string()).collect::<Vec<_>>().join(" , ")
}
