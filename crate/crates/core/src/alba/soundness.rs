//! Exhaustive soundness and invertibility checks for each rule on its model class.
//!
//! Instances are generated from the rule's schemas: every metavariable is first replaced by a
//! fresh variable of its kind (the generic instance), then each `Any` slot in turn ranges over
//! a small pool of compound terms of bounded depth while the other slots stay generic.

use std::collections::BTreeSet;

use super::apply::apply_rule;
use super::equiv::{equivalent_over, Counterexample, Granularity, ModelClass, Verdict};
use super::schema::{double_ackermann_schema, reduce, rewrite_schemas, system_schemas, Bindings, MetaDecl, MetaKind};
use super::{AlbaError, RuleApplication, RuleClass, RuleId, RuleShape};
use crate::lplus::{Inequality, QuasiInequality, Rel, Side, Sort, Term, VarKind};
use crate::two_sorted::{Model, YMode, DEFAULT_SEARCH_BUDGET};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundnessBounds {
    pub max_x: usize,
    pub max_y: usize,
    /// Maximal depth of compound terms substituted for metavariables.
    pub depth: usize,
    /// Lattice size bound for the closed-model class.
    pub max_lattice: usize,
    pub budget: u64,
}

impl Default for SoundnessBounds {
    fn default() -> Self {
        SoundnessBounds { max_x: 3, max_y: 2, depth: 2, max_lattice: 5, budget: DEFAULT_SEARCH_BUDGET }
    }
}

impl SoundnessBounds {
    /// The model class a rule is checked on.
    pub fn class_for(&self, rule: RuleId) -> ModelClass {
        match rule.class() {
            RuleClass::Basic => ModelClass::TwoSorted { max_x: self.max_x, max_y: self.max_y },
            RuleClass::Ordered => ModelClass::OrderedEnriched { max_x: self.max_x, max_y: self.max_y },
            RuleClass::Closed => ModelClass::Lattices { max_size: self.max_lattice, y_mode: YMode::Powerset },
        }
    }
}

/// A concrete use of a rule: the system before, the application, and its result.
#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub before: QuasiInequality,
    pub app: RuleApplication,
}

#[derive(Debug, Clone)]
pub enum Failure {
    Counterexample(Counterexample),
    NotInvertible(String),
    Error(String),
}

impl std::fmt::Display for Failure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Failure::Counterexample(c) => write!(f, "counterexample on {c}"),
            Failure::NotInvertible(d) => write!(f, "inverse does not restore the system: {d}"),
            Failure::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SoundnessReport {
    pub rule: RuleId,
    pub class: ModelClass,
    pub instances: usize,
    /// Total number of (instance, model) comparisons made.
    pub comparisons: usize,
    /// First failing instance with its systems and the reason.
    pub failure: Option<(String, Failure)>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks every generated instance of `rule`: the application succeeds, its inverse restores
/// the original system, and both systems are locally equivalent on every model of the class.
pub fn rule_soundness_suite(rule: RuleId, bounds: &SoundnessBounds) -> Result<SoundnessReport, AlbaError> {
    let class = bounds.class_for(rule);
    let insts = instances(rule, bounds);
    let mut report = SoundnessReport { rule, class: class.clone(), instances: insts.len(), comparisons: 0, failure: None };
    let mut cache: Vec<(BTreeSet<Rel>, Vec<Model>)> = Vec::new();
    for inst in &insts {
        let describe = |after: Option<&QuasiInequality>| match after {
            Some(a) => format!("{}: {} ~> {}", inst.label, inst.before, a),
            None => format!("{}: {}", inst.label, inst.before),
        };
        let (after, inverse) = match apply_rule(&inst.before, &inst.app) {
            Ok(r) => r,
            Err(e) => {
                report.failure = Some((describe(None), Failure::Error(e.to_string())));
                return Ok(report);
            }
        };
        match apply_rule(&after, &inverse) {
            Ok((back, _)) if back == inst.before => {}
            Ok((back, _)) => {
                report.failure = Some((describe(Some(&after)), Failure::NotInvertible(format!("inverse gives {back}"))));
                return Ok(report);
            }
            Err(e) => {
                report.failure = Some((describe(Some(&after)), Failure::NotInvertible(e.to_string())));
                return Ok(report);
            }
        }
        let rels = relations(&inst.before).union(&relations(&after)).copied().collect::<BTreeSet<Rel>>();
        let models = match cache.iter().position(|(r, _)| *r == rels) {
            Some(i) => &cache[i].1,
            None => {
                cache.push((rels.clone(), class.models(&rels)?));
                &cache.last().expect("pushed").1
            }
        };
        report.comparisons += models.len();
        if let Verdict::Counterexample(c) = equivalent_over(models, &inst.before, &after, Granularity::Local, bounds.budget)? {
            report.failure = Some((describe(Some(&after)), Failure::Counterexample(c)));
            return Ok(report);
        }
    }
    Ok(report)
}

fn relations(q: &QuasiInequality) -> BTreeSet<Rel> {
    q.system.iter().flat_map(|i| i.lhs.relations().into_iter().chain(i.rhs.relations())).collect()
}

fn suffix(s: Sort) -> &'static str {
    match s {
        Sort::X => "x",
        Sort::Y => "y",
    }
}

fn generic(meta: &str, d: &MetaDecl) -> Term {
    let tag = match d.kind {
        MetaKind::Nom => "n",
        MetaKind::Conom => "m",
        MetaKind::Any | MetaKind::Prop => "v",
    };
    Term::atom(&format!("{tag}{meta}"), d.var_kind())
}

/// Compound terms of sort `s` up to `depth`, using `relations` for modal terms and mixing in
/// the variables in `others`.
fn pool(s: Sort, relations: &BTreeSet<Rel>, others: &[Term], depth: usize, downset_safe: bool) -> Vec<Term> {
    let q = Term::atom(&format!("q{}", suffix(s)), VarKind::Prop(s));
    let r = Term::atom(&format!("r{}", suffix(s)), VarKind::Prop(s));
    let i = Term::atom(&format!("i{}", suffix(s)), VarKind::Nom(s));
    let mut out = vec![Term::Bot, Term::Top, Term::and(q.clone(), r.clone()), Term::or(q.clone(), r.clone())];
    if !downset_safe {
        out.extend([
            i.clone(),
            Term::kappa(i.clone()),
            Term::neg(q.clone()),
            Term::minus(q.clone(), r.clone()),
            Term::implies(q.clone(), r.clone()),
            Term::neg(Term::and(q.clone(), r.clone())),
            Term::and(i.clone(), Term::neg(q.clone())),
        ]);
    }
    for o in others {
        out.push(Term::and(o.clone(), q.clone()));
        out.push(Term::or(o.clone(), q.clone()));
    }
    for &rel in relations.iter().filter(|r| r.result_sort() == s) {
        let a = rel.arg_sort();
        let qa = Term::atom(&format!("q{}", suffix(a)), VarKind::Prop(a));
        let ra = Term::atom(&format!("r{}", suffix(a)), VarKind::Prop(a));
        if downset_safe && rel != Rel::XX {
            continue;
        }
        out.push(Term::dia(rel, qa.clone()));
        out.push(Term::dia(rel, Term::and(qa.clone(), ra.clone())));
        if !downset_safe {
            out.push(Term::boxed(rel, qa.clone()));
            out.push(Term::dia(rel, Term::neg(qa.clone())));
            out.push(Term::boxed(rel, Term::or(qa.clone(), ra)));
            out.push(Term::neg(Term::dia(rel, qa)));
        }
    }
    out.retain(|t| t.depth() <= depth);
    out
}

fn monotone(t: &Term) -> bool {
    t.vars().iter().all(|v| t.polarity(v).is_monotone())
}

/// Every instance checked for `rule`.
pub fn instances(rule: RuleId, bounds: &SoundnessBounds) -> Vec<Instance> {
    match rule.shape() {
        RuleShape::System => system_instances(rule, bounds),
        RuleShape::Rewrite => rewrite_instances(rule, bounds),
        RuleShape::Ackermann => ackermann_instances(rule, bounds),
        RuleShape::Sub => sub_instances(bounds),
        RuleShape::DoubleAckermann => double_ackermann_instances(bounds),
    }
}

fn schema_relations(pats: &[&Inequality]) -> BTreeSet<Rel> {
    pats.iter().flat_map(|i| i.lhs.relations().into_iter().chain(i.rhs.relations())).collect()
}

fn system_instances(rule: RuleId, bounds: &SoundnessBounds) -> Vec<Instance> {
    let mut out = Vec::new();
    let downset_safe = rule.class() == RuleClass::Ordered;
    for (vi, schema) in system_schemas(rule).iter().enumerate() {
        let metas: BTreeSet<String> = schema.premises.iter().flat_map(|i| i.lhs.metas().into_iter().chain(i.rhs.metas())).collect();
        let base: Bindings = metas.iter().map(|m| (m.clone(), generic(m, &schema.metas[m]))).collect();
        let rels = schema_relations(&schema.premises.iter().chain(&schema.conclusions).collect::<Vec<_>>());
        let mut push = |label: String, b: &Bindings, pre: &Bindings| {
            let premises = reduce(&schema.premises, pre);
            let system: Vec<Inequality> = premises.iter().map(|p| p.map(|t| t.instantiate(b))).collect();
            let targets: Vec<usize> = (0..system.len()).collect();
            let mut app = RuleApplication::forward(rule, &targets);
            app.bindings = pre.clone();
            out.push(Instance { label: format!("variant {vi} {label}"), before: QuasiInequality::closed(system), app });
        };
        push("generic".into(), &base, &Bindings::new());
        if rule == RuleId::MinCovD {
            let pre: Bindings = [("s".to_string(), Term::Bot)].into_iter().collect();
            push("s=bot".into(), &base, &pre);
        }
        for m in metas.iter().filter(|m| schema.metas[*m].kind == MetaKind::Any) {
            let d = schema.metas[m];
            let others: Vec<Term> =
                metas.iter().filter(|o| *o != m && schema.metas[*o].sort == d.sort && schema.metas[*o].kind == MetaKind::Any).map(|o| base[o].clone()).collect();
            for t in pool(d.sort, &rels, &others, bounds.depth, downset_safe) {
                let mut b = base.clone();
                b.insert(m.clone(), t.clone());
                push(format!("?{m} := {t}"), &b, &Bindings::new());
            }
        }
    }
    out
}

fn rewrite_instances(rule: RuleId, bounds: &SoundnessBounds) -> Vec<Instance> {
    let mut out = Vec::new();
    for (vi, schema) in rewrite_schemas(rule).iter().enumerate() {
        let metas: Vec<String> = schema.lhs.metas().into_iter().collect();
        let base: Bindings = metas.iter().map(|m| (m.clone(), generic(m, &schema.metas[m]))).collect();
        let rels: BTreeSet<Rel> = schema.lhs.relations().union(&schema.rhs.relations()).copied().collect();
        let ctx = Term::atom(&format!("c{}", suffix(schema.sort)), VarKind::Prop(schema.sort));
        let mut push = |label: String, b: &Bindings| {
            let phi = schema.lhs.instantiate(b);
            for side in [Side::Lhs, Side::Rhs] {
                let ineq = match side {
                    Side::Lhs => Inequality::of_sort(phi.clone(), ctx.clone(), schema.sort),
                    Side::Rhs => Inequality::of_sort(ctx.clone(), phi.clone(), schema.sort),
                };
                out.push(Instance {
                    label: format!("variant {vi} {label} on {side:?}"),
                    before: QuasiInequality::closed(vec![ineq]),
                    app: RuleApplication::forward(rule, &[0]).at_pos(side, &[]),
                });
            }
        };
        push("generic".into(), &base);
        for m in &metas {
            let d = schema.metas[m];
            let others: Vec<Term> = metas.iter().filter(|o| *o != m && schema.metas[*o].sort == d.sort).map(|o| base[o].clone()).collect();
            for t in pool(d.sort, &rels, &others, bounds.depth, false) {
                let mut b = base.clone();
                b.insert(m.clone(), t.clone());
                push(format!("?{m} := {t}"), &b);
            }
        }
    }
    out
}

fn ackermann_instances(rule: RuleId, bounds: &SoundnessBounds) -> Vec<Instance> {
    let sorts: &[Sort] = if rule == RuleId::RaCl { &[Sort::X] } else { &[Sort::X, Sort::Y] };
    let mut out = Vec::new();
    for &s in sorts {
        let sx = suffix(s);
        let var = |n: &str| Term::atom(&format!("{n}{sx}"), VarKind::Prop(s));
        let (p, a, q, g) = (var("p"), var("a"), var("q"), var("g"));
        let j = Term::atom(&format!("j{sx}"), VarKind::Nom(s));
        let mut up = vec![p.clone(), Term::and(p.clone(), q.clone()), Term::or(j.clone(), p.clone())];
        let mut down = vec![g.clone(), Term::neg(p.clone()), Term::implies(p.clone(), q.clone()), Term::kappa(j.clone())];
        if s == Sort::X && rule != RuleId::RaCl {
            up.push(Term::dia(Rel::XX, p.clone()));
            down.push(Term::boxed(Rel::XX, Term::neg(p.clone())));
        }
        if rule == RuleId::RaCl {
            up.push(Term::dia(Rel::XX, p.clone()));
            up.push(Term::cl(p.clone()));
            down.push(Term::boxed(Rel::XX, Term::neg(p.clone())));
        }
        up.retain(|t| t.depth() <= bounds.depth);
        down.retain(|t| t.depth() <= bounds.depth);
        let alphas: Vec<Vec<Term>> = vec![vec![], vec![a.clone()], vec![j.clone()], vec![a.clone(), Term::neg(q.clone())]];
        let pname = match &p {
            Term::Atom(n, _) => n.clone(),
            _ => unreachable!(),
        };
        for al in &alphas {
            for b in &up {
                for c in &down {
                    let (lo, hi) = if rule == RuleId::Lar { (c.clone(), b.clone()) } else { (b.clone(), c.clone()) };
                    let mut system: Vec<Inequality> = al
                        .iter()
                        .map(|x| {
                            if rule == RuleId::Lar {
                                Inequality::of_sort(p.clone(), x.clone(), s)
                            } else {
                                Inequality::of_sort(x.clone(), p.clone(), s)
                            }
                        })
                        .collect();
                    system.insert(system.len().min(1), Inequality::of_sort(lo, hi, s));
                    let targets: Vec<usize> = (0..system.len()).collect();
                    let app = RuleApplication::forward(rule, &targets).bind("p", Term::prop_of(&pname, s));
                    out.push(Instance { label: format!("sort {s:?}"), before: QuasiInequality::closed(system.clone()), app: app.clone() });
                    if rule == RuleId::RaCl && al.len() == 1 && al[0] == j {
                        let app = app.bind("value", Term::dia(Rel::XX, j.clone()));
                        out.push(Instance { label: format!("sort {s:?} via <XX>j"), before: QuasiInequality::closed(system), app });
                    }
                }
            }
        }
        // Two substituted inequalities at once.
        let system = vec![
            Inequality::of_sort(a.clone(), p.clone(), s),
            Inequality::of_sort(up[1].clone(), down[0].clone(), s),
            Inequality::of_sort(up[0].clone(), down[1].clone(), s),
        ];
        let system = if rule == RuleId::Lar {
            system.into_iter().map(|i| Inequality::of_sort(i.rhs, i.lhs, s)).collect()
        } else {
            system
        };
        let app = RuleApplication::forward(rule, &[0, 1, 2]).bind("p", Term::prop_of(&pname, s));
        out.push(Instance { label: format!("sort {s:?} two targets"), before: QuasiInequality::closed(system), app });
    }
    out
}

fn sub_instances(bounds: &SoundnessBounds) -> Vec<Instance> {
    let mut out = Vec::new();
    for s in [Sort::X, Sort::Y] {
        let sx = suffix(s);
        let var = |n: &str| Term::atom(&format!("{n}{sx}"), VarKind::Prop(s));
        let (b, q, c) = (var("b"), var("q"), var("c"));
        let mut lhs_pool = vec![var("a")];
        lhs_pool.extend(pool(s, &BTreeSet::new(), &[b.clone()], bounds.depth.saturating_sub(1), false));
        for a in lhs_pool {
            let system = vec![
                Inequality::of_sort(a.clone(), b.clone(), s),
                Inequality::of_sort(b.clone(), a.clone(), s),
                Inequality::of_sort(Term::and(a.clone(), q.clone()), c.clone(), s),
            ];
            let app = RuleApplication::forward(RuleId::Sub, &[0, 1, 2]).at_pos(Side::Lhs, &[0]);
            out.push(Instance { label: format!("A := {a}"), before: QuasiInequality::closed(system), app });
        }
    }
    out
}

fn double_ackermann_instances(bounds: &SoundnessBounds) -> Vec<Instance> {
    let schema = double_ackermann_schema();
    let base: Bindings = schema.metas.iter().map(|(m, d)| (m.clone(), generic(m, d))).collect();
    let (x, q, r) = (base["x"].clone(), Term::prop("q"), Term::prop("r"));
    let k = base["k"].clone();
    let mut out = Vec::new();
    let mut push = |label: String, b: &Bindings, pre: &Bindings| {
        let system: Vec<Inequality> = reduce(&schema.premises, pre).iter().map(|p| p.map(|t| t.instantiate(b))).collect();
        let targets: Vec<usize> = (0..system.len()).collect();
        let mut app = RuleApplication::forward(RuleId::DoubleAckermann, &targets);
        app.bindings = pre.clone();
        out.push(Instance { label, before: QuasiInequality::closed(system), app });
    };
    push("generic".into(), &base, &Bindings::new());
    let reduced: Bindings = [("t".to_string(), Term::Top), ("s".to_string(), Term::Bot)].into_iter().collect();
    push("t=top, s=bot".into(), &base, &reduced);
    let mut ts = vec![Term::or(q.clone(), r.clone()), Term::and(q.clone(), r.clone()), Term::dia(Rel::XX, q.clone()), k.clone()];
    let mut ss = vec![
        x.clone(),
        Term::and(x.clone(), q.clone()),
        Term::or(x.clone(), q.clone()),
        Term::dia(Rel::XX, x.clone()),
        Term::dia(Rel::XY, Term::boxed(Rel::YX, Term::or(q.clone(), Term::and(x.clone(), r.clone())))),
    ];
    ts.retain(|t| t.depth() <= bounds.depth && monotone(t));
    ss.retain(|t| t.depth() <= bounds.depth.max(4) && monotone(t));
    for t in ts {
        let mut b = base.clone();
        b.insert("t".into(), t.clone());
        push(format!("t := {t}"), &b, &Bindings::new());
    }
    for s in ss {
        let mut b = base.clone();
        b.insert("s".into(), s.clone());
        push(format!("s := {s}"), &b, &Bindings::new());
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> SoundnessBounds {
        SoundnessBounds { max_x: 2, max_y: 2, depth: 2, max_lattice: 4, budget: 1 << 22 }
    }

    #[test]
    fn split_rules_pass_small_bounds() {
        for r in [RuleId::SpAnd, RuleId::SpOr, RuleId::AtCoat1, RuleId::AjDiaXY, RuleId::ApDiaXY] {
            let rep = rule_soundness_suite(r, &quick()).unwrap();
            assert!(rep.passed(), "{r}: {:?}", rep.failure);
            assert!(rep.instances > 1);
        }
    }

    #[test]
    fn closed_rules_pass_small_lattices() {
        for r in [RuleId::MinCov2, RuleId::RaCl] {
            let rep = rule_soundness_suite(r, &quick()).unwrap();
            assert!(rep.passed(), "{r}: {:?}", rep.failure);
        }
    }

    #[test]
    fn atom_rxx_fails_without_order() {
        let j = Term::nom_x("j");
        let p = Term::prop("p");
        let before = QuasiInequality::closed(vec![Inequality::of_sort(
            Term::and(Term::dia(Rel::XX, j.clone()), p.clone()),
            Term::kappa(j.clone()),
            Sort::X,
        )]);
        let after = QuasiInequality::closed(vec![Inequality::of_sort(p, Term::kappa(j), Sort::X)]);
        let rels: BTreeSet<Rel> = [Rel::XX].into_iter().collect();
        let models = ModelClass::TwoSorted { max_x: 2, max_y: 1 }.models(&rels).unwrap();
        let v = equivalent_over(&models, &before, &after, Granularity::Local, 1 << 20).unwrap();
        assert!(!v.is_equivalent());
        let ordered = ModelClass::OrderedEnriched { max_x: 2, max_y: 1 }.models(&rels).unwrap();
        assert!(equivalent_over(&ordered, &before, &after, Granularity::Local, 1 << 20).unwrap().is_equivalent());
    }

    #[test]
    fn double_ackermann_needs_x_free_t() {
        let schema = double_ackermann_schema();
        let mut b: Bindings = Bindings::new();
        b.insert("j".into(), Term::nom_x("j"));
        b.insert("k".into(), Term::nom_x("k"));
        b.insert("C".into(), Term::nom_y("C"));
        b.insert("x".into(), Term::prop("x"));
        b.insert("y".into(), Term::prop("y"));
        b.insert("t".into(), Term::neg(Term::prop("x")));
        b.insert("s".into(), Term::prop("q"));
        let (upper, lower) = (b.clone(), b);
        let build = |ineqs: &[Inequality], m: &Bindings| {
            QuasiInequality::closed(ineqs.iter().map(|i| i.map(|t| t.instantiate(m))).collect())
        };
        let before = build(&schema.premises, &upper);
        let after = build(&schema.conclusions, &lower);
        let models = ModelClass::Lattices { max_size: 5, y_mode: YMode::Powerset }.models(&BTreeSet::new()).unwrap();
        let v = equivalent_over(&models, &before, &after, Granularity::Local, 1 << 22).unwrap();
        assert!(!v.is_equivalent());
    }
}
