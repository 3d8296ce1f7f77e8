//! Applying rules to ordered systems. Every successful application also returns the inverse
//! application, which restores the original system exactly.

use std::collections::{BTreeMap, BTreeSet};

use super::schema::{double_ackermann_schema, match_term, reduce, rewrite_schemas, sort_at, system_schemas, Bindings, MetaDecls, SystemSchema};
use super::{AlbaError, Direction, RuleApplication, RuleId, RuleShape};
use crate::lplus::{fresh_name, Inequality, QuasiInequality, Rel, Sort, Term, VarKind};

/// Applies `app` to `q`, returning the new quasi-inequality and the inverse application.
pub fn apply_rule(q: &QuasiInequality, app: &RuleApplication) -> Result<(QuasiInequality, RuleApplication), AlbaError> {
    check_targets(q, app)?;
    match app.rule.shape() {
        RuleShape::System => apply_system(q, app, system_schemas(app.rule)),
        RuleShape::Rewrite => apply_rewrite(q, app),
        RuleShape::Ackermann => apply_ackermann(q, app),
        RuleShape::Sub => apply_sub(q, app),
        RuleShape::DoubleAckermann => apply_double_ackermann(q, app),
    }
}

/// [`apply_rule`] without the inverse.
pub fn apply(q: &QuasiInequality, app: &RuleApplication) -> Result<QuasiInequality, AlbaError> {
    apply_rule(q, app).map(|(r, _)| r)
}

/// Permutes the system: the new `i`-th inequality is the old `perm[i]`-th.
pub fn reorder(q: &QuasiInequality, perm: &[usize]) -> Result<QuasiInequality, AlbaError> {
    let n = q.system.len();
    let distinct: BTreeSet<usize> = perm.iter().copied().collect();
    if perm.len() != n || distinct.len() != n || perm.iter().any(|&i| i >= n) {
        return Err(AlbaError::BadReorder(format!("{perm:?} is not a permutation of 0..{n}")));
    }
    Ok(QuasiInequality { prefix: q.prefix.clone(), system: perm.iter().map(|&i| q.system[i].clone()).collect() })
}

/// The system sorted by printed form, for comparing final outputs.
pub fn normalized(q: &QuasiInequality) -> QuasiInequality {
    let mut system = q.system.clone();
    system.sort_by_key(|i| i.to_string());
    system.dedup();
    QuasiInequality { prefix: q.prefix.clone(), system }
}

fn bad(rule: RuleId, detail: impl Into<String>) -> AlbaError {
    AlbaError::BadApplication { rule, detail: detail.into() }
}

fn side_condition(rule: RuleId, condition: impl Into<String>) -> AlbaError {
    AlbaError::SideCondition { rule, condition: condition.into() }
}

fn check_targets(q: &QuasiInequality, app: &RuleApplication) -> Result<(), AlbaError> {
    let distinct: BTreeSet<usize> = app.targets.iter().copied().collect();
    let may_be_empty = app.rule.shape() == RuleShape::Ackermann && app.direction == Direction::Backward;
    if app.targets.is_empty() && !may_be_empty {
        return Err(bad(app.rule, "no targets"));
    }
    if distinct.len() != app.targets.len() {
        return Err(bad(app.rule, "repeated target"));
    }
    if let Some(&i) = app.targets.iter().find(|&&i| i >= q.system.len()) {
        return Err(bad(app.rule, format!("target {i} out of range (system has {})", q.system.len())));
    }
    Ok(())
}

/// Replaces the targets by `concl`. Returns the new system and the final indices of `concl`.
fn place(
    rule: RuleId,
    system: &[Inequality],
    targets: &[usize],
    concl: Vec<Inequality>,
    at: Option<&[usize]>,
) -> Result<(Vec<Inequality>, Vec<usize>), AlbaError> {
    let rest: Vec<&Inequality> = system.iter().enumerate().filter(|(i, _)| !targets.contains(i)).map(|(_, x)| x).collect();
    let n = rest.len() + concl.len();
    let positions: Vec<usize> = match at {
        Some(at) => {
            let distinct: BTreeSet<usize> = at.iter().copied().collect();
            if at.len() != concl.len() || distinct.len() != at.len() || at.iter().any(|&i| i >= n) {
                return Err(bad(rule, format!("placement {at:?} invalid for {} new inequalities in a system of {n}", concl.len())));
            }
            at.to_vec()
        }
        None if concl.len() == targets.len() => targets.to_vec(),
        None => {
            let m = targets.iter().copied().min().unwrap_or(0).min(rest.len());
            (m..m + concl.len()).collect()
        }
    };
    let mut out: Vec<Option<Inequality>> = vec![None; n];
    for (p, c) in positions.iter().zip(concl) {
        out[*p] = Some(c);
    }
    let mut rest = rest.into_iter();
    for slot in out.iter_mut().filter(|s| s.is_none()) {
        *slot = rest.next().cloned();
    }
    Ok((out.into_iter().map(|s| s.expect("filled")).collect(), positions))
}

fn names_in_use(q: &QuasiInequality) -> BTreeSet<String> {
    q.prefix.keys().cloned().chain(q.used().into_keys()).collect()
}

fn check_fresh(rule: RuleId, q: &QuasiInequality, name: &str) -> Result<(), AlbaError> {
    if names_in_use(q).contains(name) {
        return Err(AlbaError::FreshClash { rule, name: name.to_string() });
    }
    Ok(())
}

fn default_base(kind: VarKind) -> &'static str {
    match kind {
        VarKind::Nom(Sort::X) => "i",
        VarKind::Nom(Sort::Y) => "C",
        VarKind::Conom(Sort::X) => "m",
        VarKind::Conom(Sort::Y) => "N",
        VarKind::Prop(_) => "p",
    }
}

fn order_of_appearance(pats: &[Inequality]) -> Vec<String> {
    let mut seen = Vec::new();
    fn walk(t: &Term, seen: &mut Vec<String>) {
        if let Term::Meta(n) = t {
            if !seen.contains(n) {
                seen.push(n.clone());
            }
        }
        for c in t.children() {
            walk(c, seen);
        }
    }
    for p in pats {
        walk(&p.lhs, &mut seen);
        walk(&p.rhs, &mut seen);
    }
    seen
}

/// Matches patterns against the targets in order.
fn match_targets(
    rule: RuleId,
    q: &QuasiInequality,
    targets: &[usize],
    pats: &[Inequality],
    metas: &MetaDecls,
    b: &mut Bindings,
) -> Result<(), (usize, AlbaError)> {
    if pats.len() != targets.len() {
        return Err((0, bad(rule, format!("expected {} targets, got {}", pats.len(), targets.len()))));
    }
    for (k, (p, &t)) in pats.iter().zip(targets).enumerate() {
        let ineq = &q.system[t];
        let no_match = |loc: String| AlbaError::NoMatch { rule, location: loc, pattern: p.to_string() };
        if p.sort != ineq.sort {
            return Err((k, no_match(format!("inequality {t} (sort)"))));
        }
        match_term(&p.lhs, &ineq.lhs, p.sort, metas, b).map_err(|path| (k, no_match(format!("inequality {t} lhs{path:?}"))))?;
        match_term(&p.rhs, &ineq.rhs, p.sort, metas, b).map_err(|path| (k, no_match(format!("inequality {t} rhs{path:?}"))))?;
    }
    Ok(())
}

fn instantiate_all(pats: &[Inequality], b: &Bindings) -> Vec<Inequality> {
    pats.iter().map(|p| p.map(|t| t.instantiate(b))).collect()
}

fn apply_system(q: &QuasiInequality, app: &RuleApplication, variants: &[SystemSchema]) -> Result<(QuasiInequality, RuleApplication), AlbaError> {
    let rule = app.rule;
    let mut best: Option<(usize, AlbaError)> = None;
    for schema in variants {
        let (from, to) = match app.direction {
            Direction::Forward => (&schema.premises, &schema.conclusions),
            Direction::Backward => (&schema.conclusions, &schema.premises),
        };
        let pre: Bindings = app.bindings.iter().filter(|(n, _)| schema.metas.contains_key(*n)).map(|(n, t)| (n.clone(), t.clone())).collect();
        let (from, to) = if rule == RuleId::MinCovD { (reduce(from, &pre), reduce(to, &pre)) } else { (from.clone(), to.clone()) };
        let mut b = pre.clone();
        if let Err((k, e)) = match_targets(rule, q, &app.targets, &from, &schema.metas, &mut b) {
            if best.as_ref().map_or(true, |(bk, _)| k > *bk) {
                best = Some((k, e));
            }
            continue;
        }
        let from_metas: BTreeSet<String> = order_of_appearance(&from).into_iter().collect();
        let to_metas = order_of_appearance(&to);
        let introduced: Vec<&String> = to_metas.iter().filter(|m| !from_metas.contains(*m)).collect();
        let eliminated: Vec<&String> = from_metas.iter().filter(|m| !to_metas.contains(m)).collect();
        let mut prefix = q.prefix.clone();
        for m in &eliminated {
            let var = match &b[*m] {
                Term::Atom(n, _) => n.clone(),
                other => return Err(side_condition(rule, format!("{other} must be a variable to be eliminated"))),
            };
            let elsewhere = q.system.iter().enumerate().any(|(i, x)| !app.targets.contains(&i) && x.mentions(&var))
                || b.iter().any(|(n, t)| n != *m && t.mentions(&var));
            if elsewhere {
                return Err(side_condition(rule, format!("{var} occurs outside the matched inequalities")));
            }
            prefix.remove(&var);
        }
        let mut fresh = app.fresh.iter();
        let mut taken = names_in_use(q);
        for m in &introduced {
            let kind = schema.metas[*m].var_kind();
            let name = match b.get(*m) {
                Some(Term::Atom(n, k)) if *k == kind => n.clone(),
                Some(other) => return Err(bad(rule, format!("?{m} must be bound to a fresh {} variable, not {other}", kind.keyword()))),
                None => match fresh.next() {
                    Some(n) => n.clone(),
                    None => fresh_name(default_base(kind), &taken),
                },
            };
            check_fresh(rule, q, &name)?;
            taken.insert(name.clone());
            prefix.insert(name.clone(), kind);
            b.insert((*m).clone(), Term::atom(&name, kind));
        }
        let concl = instantiate_all(&to, &b);
        if let Some(m) = concl.iter().flat_map(|i| i.lhs.metas().into_iter().chain(i.rhs.metas())).next() {
            return Err(bad(rule, format!("?{m} left unbound")));
        }
        let (system, positions) = place(rule, &q.system, &app.targets, concl, app.at.as_deref())?;
        let inverse = RuleApplication {
            rule,
            direction: app.direction.flip(),
            targets: positions,
            bindings: without_new_constants(b, &pre),
            fresh: vec![],
            position: None,
            at: Some(app.targets.clone()),
        };
        return Ok((QuasiInequality { prefix, system }, inverse));
    }
    Err(best.map(|(_, e)| e).unwrap_or_else(|| bad(rule, "no schema")))
}

fn apply_rewrite(q: &QuasiInequality, app: &RuleApplication) -> Result<(QuasiInequality, RuleApplication), AlbaError> {
    let rule = app.rule;
    let [target] = app.targets[..] else {
        return Err(bad(rule, "a rewrite takes exactly one target"));
    };
    let pos = app.position.clone().ok_or_else(|| bad(rule, "a rewrite needs a term position"))?;
    let ineq = &q.system[target];
    let side = ineq.side(pos.side);
    let sub = side.at(&pos.path).ok_or_else(|| bad(rule, format!("no subterm at {pos}")))?;
    let sort = sort_at(side, ineq.sort, &pos.path).expect("path exists");
    let mut first_err = None;
    for schema in rewrite_schemas(rule) {
        if schema.sort != sort {
            continue;
        }
        let (from, to) = match app.direction {
            Direction::Forward => (&schema.lhs, &schema.rhs),
            Direction::Backward => (&schema.rhs, &schema.lhs),
        };
        let mut b: Bindings = app.bindings.iter().filter(|(n, _)| schema.metas.contains_key(*n)).map(|(n, t)| (n.clone(), t.clone())).collect();
        if let Err(path) = match_term(from, sub, sort, &schema.metas, &mut b) {
            first_err.get_or_insert(AlbaError::NoMatch {
                rule,
                location: format!("inequality {target} {pos} then {path:?}"),
                pattern: from.to_string(),
            });
            continue;
        }
        let new = to.instantiate(&b);
        if let Some(m) = new.metas().into_iter().next() {
            return Err(bad(rule, format!("?{m} left unbound")));
        }
        let mut system = q.system.clone();
        *system[target].side_mut(pos.side).at_mut(&pos.path).expect("path exists") = new;
        let inverse = RuleApplication {
            rule,
            direction: app.direction.flip(),
            targets: vec![target],
            bindings: b,
            fresh: vec![],
            position: Some(pos),
            at: None,
        };
        return Ok((QuasiInequality { prefix: q.prefix.clone(), system }, inverse));
    }
    Err(first_err.unwrap_or_else(|| AlbaError::NoMatch {
        rule,
        location: format!("inequality {target} {pos}"),
        pattern: format!("a term of sort {sort:?}"),
    }))
}

/// The variable eliminated by an Ackermann rule, from binding `p`.
fn ackermann_var(app: &RuleApplication) -> Result<(String, Sort), AlbaError> {
    match app.bindings.get("p") {
        Some(Term::Atom(n, VarKind::Prop(s))) => Ok((n.clone(), *s)),
        Some(other) => Err(bad(app.rule, format!("p must be a propositional variable, not {other}"))),
        None => Err(bad(app.rule, "binding p (the eliminated variable) is required")),
    }
}

enum AckPremise {
    Alpha(Term),
    BetaGamma(Term, Term),
}

fn ackermann_value(rule: RuleId, alphas: &[Term], app: &RuleApplication) -> Result<Term, AlbaError> {
    Ok(match rule {
        RuleId::Rar => Term::join_all(alphas.iter().cloned()),
        RuleId::Lar => Term::meet_all(alphas.iter().cloned()),
        _ => {
            let default = Term::cl(Term::join_all(alphas.iter().cloned()));
            match app.bindings.get("value") {
                None => default,
                Some(v) if *v == default => default,
                Some(v) => match alphas {
                    [j @ Term::Atom(_, VarKind::Nom(Sort::X))] if *v == Term::dia(Rel::XX, j.clone()) => v.clone(),
                    _ => return Err(side_condition(rule, format!("value {v} is neither cl of the join nor <XX>j for a single nominal j"))),
                },
            }
        }
    })
}

fn check_ackermann_polarities(rule: RuleId, p: &str, premises: &[AckPremise]) -> Result<(), AlbaError> {
    for prem in premises {
        match prem {
            AckPremise::Alpha(a) => {
                if a.mentions(p) {
                    return Err(side_condition(rule, format!("{p} occurs in {a}")));
                }
            }
            AckPremise::BetaGamma(b, g) => {
                let (lo, hi) = match rule {
                    RuleId::Lar => (b.polarity(p).is_antitone(), g.polarity(p).is_monotone()),
                    _ => (b.polarity(p).is_monotone(), g.polarity(p).is_antitone()),
                };
                if !lo || !hi {
                    let want = if rule == RuleId::Lar { "negative/positive" } else { "positive/negative" };
                    return Err(side_condition(rule, format!("{b} <= {g} is not {want} in {p}")));
                }
            }
        }
    }
    Ok(())
}

fn apply_ackermann(q: &QuasiInequality, app: &RuleApplication) -> Result<(QuasiInequality, RuleApplication), AlbaError> {
    let rule = app.rule;
    let (p, sort) = ackermann_var(app)?;
    if rule == RuleId::RaCl && sort != Sort::X {
        return Err(side_condition(rule, "the eliminated variable must be X-sorted"));
    }
    let pvar = Term::atom(&p, VarKind::Prop(sort));
    let mut keep: Bindings = BTreeMap::new();
    keep.insert("p".into(), pvar.clone());
    if let Some(v) = app.bindings.get("value") {
        keep.insert("value".into(), v.clone());
    }
    match app.direction {
        Direction::Forward => {
            if let Some(i) = (0..q.system.len()).find(|i| !app.targets.contains(i) && q.system[*i].mentions(&p)) {
                return Err(side_condition(rule, format!("{p} occurs in inequality {i}, which is not a target")));
            }
            let mut premises = Vec::new();
            for &t in &app.targets {
                let ineq = &q.system[t];
                if ineq.sort != sort {
                    return Err(side_condition(rule, format!("inequality {t} has the wrong sort")));
                }
                let alpha = match rule {
                    RuleId::Lar => (ineq.lhs == pvar && !ineq.rhs.mentions(&p)).then(|| ineq.rhs.clone()),
                    _ => (ineq.rhs == pvar && !ineq.lhs.mentions(&p)).then(|| ineq.lhs.clone()),
                };
                premises.push(match alpha {
                    Some(a) => AckPremise::Alpha(a),
                    None => AckPremise::BetaGamma(ineq.lhs.clone(), ineq.rhs.clone()),
                });
            }
            check_ackermann_polarities(rule, &p, &premises)?;
            let alphas: Vec<Term> = premises.iter().filter_map(|x| if let AckPremise::Alpha(a) = x { Some(a.clone()) } else { None }).collect();
            let value = ackermann_value(rule, &alphas, app)?;
            let sub: Bindings = [(p.clone(), value)].into_iter().collect();
            let mut inv = keep;
            let mut concl = Vec::new();
            for (i, prem) in premises.iter().enumerate() {
                match prem {
                    AckPremise::Alpha(a) => {
                        inv.insert(format!("a{i}"), a.clone());
                    }
                    AckPremise::BetaGamma(b, g) => {
                        inv.insert(format!("b{i}"), b.clone());
                        inv.insert(format!("g{i}"), g.clone());
                        concl.push(Inequality::of_sort(b.subst(&sub), g.subst(&sub), sort));
                    }
                }
            }
            let (system, positions) = place(rule, &q.system, &app.targets, concl, app.at.as_deref())?;
            let mut prefix = q.prefix.clone();
            prefix.remove(&p);
            let inverse = RuleApplication {
                rule,
                direction: Direction::Backward,
                targets: positions,
                bindings: inv,
                fresh: vec![],
                position: None,
                at: Some(app.targets.clone()),
            };
            Ok((QuasiInequality { prefix, system }, inverse))
        }
        Direction::Backward => {
            check_fresh(rule, q, &p)?;
            let mut indexed: BTreeMap<usize, AckPremise> = BTreeMap::new();
            for (k, t) in &app.bindings {
                let (tag, num) = k.split_at(1);
                let Ok(i) = num.parse::<usize>() else { continue };
                match tag {
                    "a" => {
                        indexed.insert(i, AckPremise::Alpha(t.clone()));
                    }
                    "b" => {
                        let g = app.bindings.get(&format!("g{i}")).ok_or_else(|| bad(rule, format!("b{i} without g{i}")))?;
                        indexed.insert(i, AckPremise::BetaGamma(t.clone(), g.clone()));
                    }
                    _ => {}
                }
            }
            let premises: Vec<AckPremise> = indexed.into_values().collect();
            check_ackermann_polarities(rule, &p, &premises)?;
            let alphas: Vec<Term> = premises.iter().filter_map(|x| if let AckPremise::Alpha(a) = x { Some(a.clone()) } else { None }).collect();
            let value = ackermann_value(rule, &alphas, app)?;
            let sub: Bindings = [(p.clone(), value)].into_iter().collect();
            let pairs: Vec<(&Term, &Term)> = premises.iter().filter_map(|x| if let AckPremise::BetaGamma(b, g) = x { Some((b, g)) } else { None }).collect();
            if pairs.len() != app.targets.len() {
                return Err(bad(rule, format!("{} targets for {} substituted inequalities", app.targets.len(), pairs.len())));
            }
            for ((b, g), &t) in pairs.iter().zip(&app.targets) {
                let expect = Inequality::of_sort(b.subst(&sub), g.subst(&sub), sort);
                if q.system[t] != expect {
                    return Err(AlbaError::NoMatch { rule, location: format!("inequality {t}"), pattern: expect.to_string() });
                }
            }
            let out: Vec<Inequality> = premises
                .iter()
                .map(|x| match x {
                    AckPremise::Alpha(a) if rule == RuleId::Lar => Inequality::of_sort(pvar.clone(), a.clone(), sort),
                    AckPremise::Alpha(a) => Inequality::of_sort(a.clone(), pvar.clone(), sort),
                    AckPremise::BetaGamma(b, g) => Inequality::of_sort((*b).clone(), (*g).clone(), sort),
                })
                .collect();
            let (system, positions) = place_into(rule, &q.system, &app.targets, out, app.at.as_deref())?;
            let mut prefix = q.prefix.clone();
            prefix.insert(p.clone(), VarKind::Prop(sort));
            let inverse = RuleApplication {
                rule,
                direction: Direction::Forward,
                targets: positions,
                bindings: keep,
                fresh: vec![],
                position: None,
                at: Some(app.targets.clone()),
            };
            Ok((QuasiInequality { prefix, system }, inverse))
        }
    }
}

/// Like [`place`], but also accepts an empty target list (a backward Ackermann step whose
/// forward run produced nothing), inserting at `at` or at the end.
fn place_into(
    rule: RuleId,
    system: &[Inequality],
    targets: &[usize],
    concl: Vec<Inequality>,
    at: Option<&[usize]>,
) -> Result<(Vec<Inequality>, Vec<usize>), AlbaError> {
    if targets.is_empty() && at.is_none() {
        let n = system.len();
        let at: Vec<usize> = (n..n + concl.len()).collect();
        return place(rule, system, targets, concl, Some(&at));
    }
    place(rule, system, targets, concl, at)
}

fn apply_sub(q: &QuasiInequality, app: &RuleApplication) -> Result<(QuasiInequality, RuleApplication), AlbaError> {
    let rule = app.rule;
    let [ia, ib, ic] = app.targets[..] else {
        return Err(bad(rule, "Sub takes targets [A <= B, B <= A, t <= s]"));
    };
    let (a, b) = (&q.system[ia], &q.system[ib]);
    if a.lhs != b.rhs || a.rhs != b.lhs || a.sort != b.sort {
        return Err(AlbaError::NoMatch { rule, location: format!("inequality {ib}"), pattern: format!("{} <= {}", a.rhs, a.lhs) });
    }
    let (from, to) = match app.direction {
        Direction::Forward => (&a.lhs, &a.rhs),
        Direction::Backward => (&a.rhs, &a.lhs),
    };
    let pos = app.position.clone().ok_or_else(|| bad(rule, "Sub needs a term position"))?;
    let c = &q.system[ic];
    let side = c.side(pos.side);
    let sub = side.at(&pos.path).ok_or_else(|| bad(rule, format!("no subterm at {pos}")))?;
    if sub != from || sort_at(side, c.sort, &pos.path) != Some(a.sort) {
        return Err(AlbaError::NoMatch { rule, location: format!("inequality {ic} {pos}"), pattern: from.to_string() });
    }
    let mut system = q.system.clone();
    *system[ic].side_mut(pos.side).at_mut(&pos.path).expect("path exists") = to.clone();
    let mut inverse = app.clone();
    inverse.direction = app.direction.flip();
    Ok((QuasiInequality { prefix: q.prefix.clone(), system }, inverse))
}

fn apply_double_ackermann(q: &QuasiInequality, app: &RuleApplication) -> Result<(QuasiInequality, RuleApplication), AlbaError> {
    let rule = app.rule;
    let schema = double_ackermann_schema();
    let pre: Bindings = app.bindings.iter().filter(|(n, _)| schema.metas.contains_key(*n)).map(|(n, t)| (n.clone(), t.clone())).collect();
    let xk_sub = |b: &Bindings| -> Bindings {
        let Term::Atom(x, _) = &b["x"] else { unreachable!("x is a variable") };
        [(x.clone(), Term::dia(Rel::XX, b["k"].clone()))].into_iter().collect()
    };
    match app.direction {
        Direction::Forward => {
            let from = reduce(&schema.premises, &pre);
            let mut b = pre.clone();
            match_targets(rule, q, &app.targets, &from, &schema.metas, &mut b).map_err(|(_, e)| e)?;
            for m in ["t", "s"] {
                b.entry(m.into()).or_insert(if m == "t" { Term::Top } else { Term::Bot });
            }
            let var = |m: &str| match &b[m] {
                Term::Atom(n, _) => n.clone(),
                _ => unreachable!("declared as variables"),
            };
            let (x, y) = (var("x"), var("y"));
            check_double_ackermann(rule, &b, &x, &y)?;
            for v in [&x, &y] {
                if let Some(i) = (0..q.system.len()).find(|i| !app.targets.contains(i) && q.system[*i].mentions(v)) {
                    return Err(side_condition(rule, format!("{v} occurs in inequality {i}, which is not a target")));
                }
            }
            let mut lower = b.clone();
            lower.insert("s".into(), b["s"].subst(&xk_sub(&b)));
            let lower_pre: Bindings = pre.keys().map(|k| (k.clone(), lower[k].clone())).collect();
            let concl = instantiate_all(&reduce(&schema.conclusions, &lower_pre), &lower);
            let (system, positions) = place(rule, &q.system, &app.targets, concl, app.at.as_deref())?;
            let mut prefix = q.prefix.clone();
            prefix.remove(&x);
            prefix.remove(&y);
            let mut inv = pre.clone();
            for m in ["x", "y", "s"] {
                inv.insert(m.into(), b[m].clone());
            }
            let inv = without_new_constants(inv, &pre);
            let inverse = RuleApplication {
                rule,
                direction: Direction::Backward,
                targets: positions,
                bindings: inv,
                fresh: vec![],
                position: None,
                at: Some(app.targets.clone()),
            };
            Ok((QuasiInequality { prefix, system }, inverse))
        }
        Direction::Backward => {
            // `?s` in the lower system is matched as the substituted term.
            let mut lower_pre = pre.clone();
            let original_s = lower_pre.remove("s");
            if matches!(original_s, Some(Term::Bot | Term::Top)) {
                lower_pre.insert("s".into(), original_s.clone().expect("checked"));
            }
            for m in ["x", "y"] {
                lower_pre.remove(m);
            }
            let from = reduce(&schema.conclusions, &lower_pre);
            let mut b = lower_pre.clone();
            match_targets(rule, q, &app.targets, &from, &schema.metas, &mut b).map_err(|(_, e)| e)?;
            b.entry("t".into()).or_insert(Term::Top);
            let matched_s = b.get("s").cloned().unwrap_or(Term::Bot);
            let mut fresh = app.fresh.iter();
            let mut taken = names_in_use(q);
            for m in ["x", "y"] {
                let name = match pre.get(m) {
                    Some(Term::Atom(n, VarKind::Prop(Sort::X))) => n.clone(),
                    Some(other) => return Err(bad(rule, format!("?{m} must be an X-sorted propositional variable, not {other}"))),
                    None => fresh.next().cloned().unwrap_or_else(|| fresh_name(m, &taken)),
                };
                check_fresh(rule, q, &name)?;
                taken.insert(name.clone());
                b.insert(m.into(), Term::prop(&name));
            }
            let s = original_s.unwrap_or_else(|| matched_s.clone());
            if s.subst(&xk_sub(&b)) != matched_s {
                return Err(side_condition(rule, format!("s = {s} does not become {matched_s} under the substitution of <XX>k for x")));
            }
            b.insert("s".into(), s);
            let (x, y) = match (&b["x"], &b["y"]) {
                (Term::Atom(x, _), Term::Atom(y, _)) => (x.clone(), y.clone()),
                _ => unreachable!("bound above"),
            };
            check_double_ackermann(rule, &b, &x, &y)?;
            let upper_pre: Bindings = pre.keys().filter(|k| matches!(k.as_str(), "t" | "s")).map(|k| (k.clone(), b[k].clone())).collect();
            let concl = instantiate_all(&reduce(&schema.premises, &upper_pre), &b);
            let (system, positions) = place(rule, &q.system, &app.targets, concl, app.at.as_deref())?;
            let mut prefix = q.prefix.clone();
            prefix.insert(x, VarKind::Prop(Sort::X));
            prefix.insert(y, VarKind::Prop(Sort::X));
            let inverse = RuleApplication {
                rule,
                direction: Direction::Forward,
                targets: positions,
                bindings: upper_pre,
                fresh: vec![],
                position: None,
                at: Some(app.targets.clone()),
            };
            Ok((QuasiInequality { prefix, system }, inverse))
        }
    }
}

/// Drops bindings to `⊥`/`⊤` that were matched rather than supplied, so that an inverse
/// application does not reduce schemas the original application matched literally.
fn without_new_constants(mut b: Bindings, pre: &Bindings) -> Bindings {
    b.retain(|n, t| pre.contains_key(n) || !matches!(t, Term::Bot | Term::Top));
    b
}

fn check_double_ackermann(rule: RuleId, b: &Bindings, x: &str, y: &str) -> Result<(), AlbaError> {
    let (t, s) = (&b["t"], &b["s"]);
    if x == y {
        return Err(side_condition(rule, "x and y must be distinct"));
    }
    for v in [x, y] {
        if t.mentions(v) {
            return Err(side_condition(rule, format!("{v} occurs in t = {t}")));
        }
    }
    if s.mentions(y) {
        return Err(side_condition(rule, format!("{y} occurs in s = {s}")));
    }
    for (name, term) in [("t", t), ("s", s)] {
        if let Some(v) = term.vars().into_iter().find(|v| !term.polarity(v).is_monotone()) {
            return Err(side_condition(rule, format!("{name} = {term} is not monotone in {v}")));
        }
    }
    Ok(())
}
