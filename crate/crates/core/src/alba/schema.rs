//! Rule schemas written as text with `?meta` placeholders, and syntactic matching.

use std::collections::BTreeMap;
use std::sync::OnceLock;

use super::RuleId;
use crate::lplus::{parse_inequality, parse_term, Env, Inequality, Rel, Sort, Term, VarKind};

/// What a metavariable may stand for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetaKind {
    Any,
    Prop,
    Nom,
    Conom,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MetaDecl {
    pub sort: Sort,
    pub kind: MetaKind,
}

impl MetaDecl {
    /// Variable kind of a fresh variable standing for this metavariable.
    pub fn var_kind(&self) -> VarKind {
        match self.kind {
            MetaKind::Any | MetaKind::Prop => VarKind::Prop(self.sort),
            MetaKind::Nom => VarKind::Nom(self.sort),
            MetaKind::Conom => VarKind::Conom(self.sort),
        }
    }

    pub fn admits(&self, t: &Term) -> bool {
        match self.kind {
            MetaKind::Any => true,
            MetaKind::Prop => matches!(t, Term::Atom(_, VarKind::Prop(s)) if *s == self.sort),
            MetaKind::Nom => matches!(t, Term::Atom(_, VarKind::Nom(s)) if *s == self.sort),
            MetaKind::Conom => matches!(t, Term::Atom(_, VarKind::Conom(s)) if *s == self.sort),
        }
    }
}

pub type MetaDecls = BTreeMap<String, MetaDecl>;

/// Premises over conclusions; forward reads premises to conclusions.
#[derive(Debug, Clone)]
pub struct SystemSchema {
    pub metas: MetaDecls,
    pub premises: Vec<Inequality>,
    pub conclusions: Vec<Inequality>,
}

/// A term rewrite `lhs → rhs` at a subterm of sort `sort`.
#[derive(Debug, Clone)]
pub struct RewriteSchema {
    pub metas: MetaDecls,
    pub sort: Sort,
    pub lhs: Term,
    pub rhs: Term,
}

type Decl<'a> = (&'a str, Sort, MetaKind);

fn decls(ds: &[Decl]) -> MetaDecls {
    ds.iter().map(|(n, s, k)| (n.to_string(), MetaDecl { sort: *s, kind: *k })).collect()
}

/// The pattern with each metavariable replaced by a variable of its declared sort.
fn typed(t: &Term, metas: &MetaDecls) -> Term {
    let map = metas.iter().map(|(n, d)| (n.clone(), Term::atom(&format!("?{n}"), d.var_kind()))).collect();
    t.instantiate(&map)
}

fn pattern_sort(t: &Term, metas: &MetaDecls) -> Option<Sort> {
    typed(t, metas).infer_sort().expect("well-sorted schema")
}

fn pat_ineq(src: &str, metas: &MetaDecls) -> Inequality {
    let i = parse_inequality(src, &Env::new()).unwrap_or_else(|e| panic!("schema {src}: {e}"));
    let sort = pattern_sort(&i.lhs, metas).or(pattern_sort(&i.rhs, metas)).unwrap_or(Sort::X);
    for m in i.lhs.metas().iter().chain(i.rhs.metas().iter()) {
        assert!(metas.contains_key(m), "undeclared meta {m} in {src}");
    }
    Inequality::of_sort(i.lhs, i.rhs, sort)
}

fn sys(ds: &[Decl], premises: &[&str], conclusions: &[&str]) -> SystemSchema {
    let metas = decls(ds);
    SystemSchema {
        premises: premises.iter().map(|s| pat_ineq(s, &metas)).collect(),
        conclusions: conclusions.iter().map(|s| pat_ineq(s, &metas)).collect(),
        metas,
    }
}

fn rw(ds: &[Decl], lhs: &str, rhs: &str) -> RewriteSchema {
    let metas = decls(ds);
    let lhs = parse_term(lhs, &Env::new()).unwrap_or_else(|e| panic!("schema {lhs}: {e}"));
    let rhs = parse_term(rhs, &Env::new()).unwrap_or_else(|e| panic!("schema {rhs}: {e}"));
    let sort = pattern_sort(&lhs, &metas).or(pattern_sort(&rhs, &metas)).unwrap_or(Sort::X);
    RewriteSchema { metas, sort, lhs, rhs }
}

use MetaKind::{Any, Conom, Nom, Prop};
use Sort::{X, Y};

fn both_sorts(f: impl Fn(Sort) -> SystemSchema) -> Vec<SystemSchema> {
    vec![f(X), f(Y)]
}

fn both_sorts_rw(ds: &[&str], lhs: &str, rhs: &str) -> Vec<RewriteSchema> {
    [X, Y]
        .iter()
        .map(|&s| {
            let d: Vec<Decl> = ds.iter().map(|n| (*n, s, Any)).collect();
            rw(&d, lhs, rhs)
        })
        .collect()
}

fn build_system() -> BTreeMap<RuleId, Vec<SystemSchema>> {
    use RuleId::*;
    let mut m = BTreeMap::new();
    let any3 = |s| [("a", s, Any), ("b", s, Any), ("c", s, Any)];
    m.insert(RsAnd, both_sorts(|s| sys(&any3(s), &["?a /\\ ?b <= ?c"], &["?a <= ?b -> ?c"])));
    m.insert(RsOr, both_sorts(|s| sys(&any3(s), &["?a <= ?b \\/ ?c"], &["?a \\ ?b <= ?c"])));
    m.insert(AjDiaXY, vec![sys(&[("a", Y, Any), ("b", X, Any)], &["<XY>?a <= ?b"], &["?a <= [XY-1]?b"])]);
    m.insert(AjBoxXY, vec![sys(&[("a", X, Any), ("b", Y, Any)], &["?a <= [XY]?b"], &["<XY-1>?a <= ?b"])]);
    m.insert(AjDiaYX, vec![sys(&[("a", X, Any), ("b", Y, Any)], &["<YX>?a <= ?b"], &["?a <= [YX-1]?b"])]);
    m.insert(AjBoxYX, vec![sys(&[("a", Y, Any), ("b", X, Any)], &["?a <= [YX]?b"], &["<YX-1>?a <= ?b"])]);
    m.insert(
        ApDiaXY,
        vec![sys(&[("i", X, Nom), ("a", Y, Any), ("J", Y, Nom)], &["?i <= <XY>?a"], &["?i <= <XY>?J", "?J <= ?a"])],
    );
    m.insert(
        ApBoxXY,
        vec![sys(&[("m", X, Conom), ("a", Y, Any), ("N", Y, Conom)], &["[XY]?a <= ?m"], &["?a <= ?N", "[XY]?N <= ?m"])],
    );
    m.insert(
        ApDiaYX,
        vec![sys(&[("i", Y, Nom), ("a", X, Any), ("j", X, Nom)], &["?i <= <YX>?a"], &["?i <= <YX>?j", "?j <= ?a"])],
    );
    m.insert(
        ApBoxYX,
        vec![sys(&[("m", Y, Conom), ("a", X, Any), ("n", X, Conom)], &["[YX]?a <= ?m"], &["?a <= ?n", "[YX]?n <= ?m"])],
    );
    m.insert(SpAnd, both_sorts(|s| sys(&any3(s), &["?a <= ?b /\\ ?c"], &["?a <= ?b", "?a <= ?c"])));
    m.insert(SpOr, both_sorts(|s| sys(&any3(s), &["?b \\/ ?c <= ?a"], &["?b <= ?a", "?c <= ?a"])));
    let any4 = |s| [("x", s, Any), ("a", s, Any), ("b", s, Any), ("c", s, Any)];
    m.insert(TMinus, both_sorts(|s| sys(&any4(s), &["?x /\\ (?a \\ ?b) <= ?c"], &["?x /\\ ?a <= ?b \\/ ?c"])));
    let any2 = |s| [("a", s, Any), ("b", s, Any)];
    m.insert(BaAnd, both_sorts(|s| sys(&any2(s), &["?a <= ?b"], &["?a /\\ ?b <= ?a", "?a <= ?a /\\ ?b"])));
    m.insert(BaOr, both_sorts(|s| sys(&any2(s), &["?b <= ?a"], &["?a \\/ ?b <= ?a", "?a <= ?a \\/ ?b"])));
    m.insert(TAndBot, both_sorts(|s| sys(&any2(s), &["?a /\\ ?b <= bot"], &["?a <= ~?b"])));
    let js = |s| [("j", s, Nom), ("s", s, Any)];
    m.insert(AtCoat1, both_sorts(|s| sys(&js(s), &["?j /\\ ?s <= bot"], &["?s <= kappa(?j)"])));
    m.insert(AtCoat2, both_sorts(|s| sys(&js(s), &["?j /\\ ?s <= kappa(?j)"], &["?s <= kappa(?j)"])));
    m.insert(
        Mt,
        both_sorts(|s| {
            sys(
                &[("j", s, Nom), ("s", s, Any), ("t", s, Any)],
                &["?j <= ?s \\/ ?t", "?s <= kappa(?j)"],
                &["?j <= ?t", "?s <= kappa(?j)"],
            )
        }),
    );
    m.insert(Bis, both_sorts(|s| sys(&any2(s), &["?a <= ?b", "?a <= ?b"], &["?a <= ?b"])));
    m.insert(
        Tr,
        both_sorts(|s| sys(&any3(s), &["?a <= ?b", "?b <= ?c"], &["?a <= ?b", "?b <= ?c", "?a <= ?c"])),
    );
    let per_rel = |f: &dyn Fn(Rel) -> SystemSchema| Rel::ALL.iter().map(|&r| f(r)).collect::<Vec<_>>();
    m.insert(
        TrrInv,
        per_rel(&|r| {
            sys(
                &[("i", r.result_sort(), Nom), ("k", r.arg_sort(), Nom)],
                &[&format!("?i <= <{}>?k", r.text())],
                &[&format!("?k <= <{}>?i", r.inverse().text())],
            )
        }),
    );
    m.insert(
        Tnm,
        per_rel(&|r| {
            let (d, b) = (format!("<{}>", r.text()), format!("[{}]", r.text()));
            sys(
                &[("x", r.result_sort(), Any), ("a", r.arg_sort(), Any), ("b", r.arg_sort(), Any)],
                &[&format!("?x <= {d}?a"), &format!("?x <= {b}?b")],
                &[&format!("?x <= {d}(?a /\\ ?b)"), &format!("?x <= {b}?b")],
            )
        }),
    );
    m.insert(AtomRXX, vec![sys(&[("j", X, Nom), ("s", X, Any)], &["<XX>?j /\\ ?s <= kappa(?j)"], &["?s <= kappa(?j)"])]);
    let jkc = [("j", X, Nom), ("k", X, Nom), ("C", Y, Nom)];
    m.insert(
        MinCov2,
        vec![sys(
            &jkc,
            &["?j <= <XY>?C", "?k <= <YX-1>?C"],
            &["?j <= <XY>?C", "?k <= <YX-1>?C", "<XY>[YX]<XX>(<YX-1>?C \\ ?k) <= kappa(?k)"],
        )],
    );
    let mut jkcs = jkc.to_vec();
    jkcs.push(("s", X, Any));
    let s1 = [
        "?j <= <XY>?C",
        "?k <= <YX-1>?C",
        "<XX>?j /\\ <XX>?k <= kappa(?k)",
        "<XX>?k /\\ ?s <= kappa(?k)",
    ];
    let mut s2 = s1.to_vec();
    s2.push(
        "?j /\\ <XY>[YX](<XY>[YX]<XX>(<YX-1>?C \\ ?k) \\/ (<XX>?j /\\ <XX>?k) \\/ (<XX>?k /\\ ?s)) <= bot",
    );
    m.insert(MinCovD, vec![sys(&jkcs, &s1, &s2)]);
    m
}

/// The two displayed systems of the double Ackermann rule. In the lower system `?s` stands for
/// `s` with `x` replaced by `⟨XX⟩k`.
pub(crate) fn double_ackermann_schema() -> &'static SystemSchema {
    static S: OnceLock<SystemSchema> = OnceLock::new();
    S.get_or_init(|| {
        let cl = "<XY>[YX]<XX>(<YX-1>?C \\ ?k)";
        sys(
            &[
                ("j", X, Nom),
                ("k", X, Nom),
                ("C", Y, Nom),
                ("x", X, Prop),
                ("y", X, Prop),
                ("t", X, Any),
                ("s", X, Any),
            ],
            &[
                "?j <= <XY>?C",
                "?k <= <YX-1>?C",
                "<YX-1>?C <= ?y \\/ ?x",
                "<YX-1>?C <= ?y \\/ ?t",
                "?k <= ?x",
                "?k <= ?t",
                "?y <= kappa(?k)",
                "<XX>?j /\\ ?x <= kappa(?k)",
                "?x /\\ ?s <= kappa(?k)",
                "?j /\\ <XY>[YX](?y \\/ (<XX>?j /\\ ?x) \\/ (?x /\\ ?s)) <= bot",
            ],
            &[
                "?j <= <XY>?C",
                "?k <= <YX-1>?C",
                "?k <= ?t",
                &format!("{cl} <= kappa(?k)"),
                "<XX>?j /\\ <XX>?k <= kappa(?k)",
                "<XX>?k /\\ ?s <= kappa(?k)",
                &format!("?j /\\ <XY>[YX]({cl} \\/ (<XX>?j /\\ <XX>?k) \\/ (<XX>?k /\\ ?s)) <= bot"),
            ],
        )
    })
}

fn build_rewrite() -> BTreeMap<RuleId, Vec<RewriteSchema>> {
    use RuleId::*;
    let mut m = BTreeMap::new();
    m.insert(OrBot, both_sorts_rw(&["a"], "?a \\/ bot", "?a"));
    m.insert(AndTop, both_sorts_rw(&["a"], "?a /\\ top", "?a"));
    m.insert(DOrAnd, both_sorts_rw(&["a", "b", "c"], "?a \\/ (?b /\\ ?c)", "(?a \\/ ?b) /\\ (?a \\/ ?c)"));
    m.insert(DAndOr, both_sorts_rw(&["a", "b", "c"], "?a /\\ (?b \\/ ?c)", "(?a /\\ ?b) \\/ (?a /\\ ?c)"));
    m.insert(COr, both_sorts_rw(&["a", "b"], "?a \\/ ?b", "?b \\/ ?a"));
    m.insert(CAnd, both_sorts_rw(&["a", "b"], "?a /\\ ?b", "?b /\\ ?a"));
    m.insert(AAnd, both_sorts_rw(&["a", "b", "c"], "(?a /\\ ?b) /\\ ?c", "?b /\\ (?a /\\ ?c)"));
    m.insert(AOr, both_sorts_rw(&["a", "b", "c"], "(?a \\/ ?b) \\/ ?c", "?b \\/ (?a \\/ ?c)"));
    m.insert(Tnn, both_sorts_rw(&["a"], "~~?a", "?a"));
    m.insert(TOr, both_sorts_rw(&["a", "b"], "?a \\/ (?b \\ ?a)", "?a \\/ ?b"));
    m.insert(TAnd, both_sorts_rw(&["a", "b"], "?a /\\ (?a -> ?b)", "?a /\\ ?b"));
    m.insert(Dm, both_sorts_rw(&["a", "b"], "~(?a \\/ ?b)", "~?a /\\ ~?b"));
    let per_rel = |boxed_first: bool| {
        Rel::ALL
            .iter()
            .map(|&r| {
                let b = format!("[{}]?a", r.text());
                let d = format!("~<{}>~?a", r.text());
                let (l, rr) = if boxed_first { (b, d) } else { (d, b) };
                rw(&[("a", r.arg_sort(), Any)], &l, &rr)
            })
            .collect::<Vec<_>>()
    };
    m.insert(Tbd, per_rel(true));
    m.insert(Tdb, per_rel(false));
    m
}

/// Premise/conclusion schemas of a system-shaped rule (one per sort or relation variant).
pub fn system_schemas(rule: RuleId) -> &'static [SystemSchema] {
    static S: OnceLock<BTreeMap<RuleId, Vec<SystemSchema>>> = OnceLock::new();
    S.get_or_init(build_system).get(&rule).map(Vec::as_slice).unwrap_or(&[])
}

/// Rewrite schemas of a rewrite-shaped rule.
pub fn rewrite_schemas(rule: RuleId) -> &'static [RewriteSchema] {
    static S: OnceLock<BTreeMap<RuleId, Vec<RewriteSchema>>> = OnceLock::new();
    S.get_or_init(build_rewrite).get(&rule).map(Vec::as_slice).unwrap_or(&[])
}

pub(crate) type Bindings = BTreeMap<String, Term>;

/// Sort of the subterm at `path` inside a term of sort `sort`.
pub(crate) fn sort_at(t: &Term, sort: Sort, path: &[usize]) -> Option<Sort> {
    let Some((&i, rest)) = path.split_first() else {
        return Some(sort);
    };
    let child = *t.children().get(i)?;
    let s = match t {
        Term::Modal(r, _, _) => r.arg_sort(),
        _ => sort,
    };
    sort_at(child, s, rest)
}

/// Matches `pat` against `t` at sort `sort`, extending `b`. On failure returns the child path
/// inside the pattern where matching stopped.
pub(crate) fn match_term(pat: &Term, t: &Term, sort: Sort, metas: &MetaDecls, b: &mut Bindings) -> Result<(), Vec<usize>> {
    let fail = || Err(vec![]);
    match (pat, t) {
        (Term::Meta(n), _) => {
            let d = metas.get(n).ok_or_else(Vec::new)?;
            if d.sort != sort || !d.admits(t) {
                return fail();
            }
            match b.get(n) {
                Some(bound) if bound != t => fail(),
                Some(_) => Ok(()),
                None => {
                    b.insert(n.clone(), t.clone());
                    Ok(())
                }
            }
        }
        (Term::Bot, Term::Bot) | (Term::Top, Term::Top) => Ok(()),
        (Term::Atom(a, k), Term::Atom(c, l)) if a == c && k == l => Ok(()),
        (Term::Kappa(p), Term::Kappa(a)) | (Term::Neg(p), Term::Neg(a)) => {
            match_term(p, a, sort, metas, b).map_err(|e| prefixed(0, e))
        }
        (Term::And(p1, p2), Term::And(a1, a2))
        | (Term::Or(p1, p2), Term::Or(a1, a2))
        | (Term::Minus(p1, p2), Term::Minus(a1, a2))
        | (Term::Implies(p1, p2), Term::Implies(a1, a2)) => {
            match_term(p1, a1, sort, metas, b).map_err(|e| prefixed(0, e))?;
            match_term(p2, a2, sort, metas, b).map_err(|e| prefixed(1, e))
        }
        (Term::Modal(r, m, p), Term::Modal(s, n, a)) if r == s && m == n => {
            match_term(p, a, r.arg_sort(), metas, b).map_err(|e| prefixed(0, e))
        }
        _ => fail(),
    }
}

fn prefixed(i: usize, mut e: Vec<usize>) -> Vec<usize> {
    e.insert(0, i);
    e
}

/// Replaces metavariables bound to `⊥` or `⊤` in `pats`, folds constants and drops the
/// inequalities that become trivial.
pub(crate) fn reduce(pats: &[Inequality], b: &Bindings) -> Vec<Inequality> {
    let consts: Bindings = b.iter().filter(|(_, t)| matches!(t, Term::Bot | Term::Top)).map(|(n, t)| (n.clone(), t.clone())).collect();
    if consts.is_empty() {
        return pats.to_vec();
    }
    pats.iter()
        .map(|i| i.map(|t| t.instantiate(&consts).fold_constants()))
        .filter(|i| !i.is_trivial())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_rule_has_a_shape_backing() {
        use super::super::RuleShape;
        for &r in RuleId::ALL {
            match r.shape() {
                RuleShape::System => assert!(!system_schemas(r).is_empty(), "{r}"),
                RuleShape::Rewrite => assert!(!rewrite_schemas(r).is_empty(), "{r}"),
                _ => {}
            }
        }
        assert_eq!(double_ackermann_schema().premises.len(), 10);
        assert_eq!(double_ackermann_schema().conclusions.len(), 7);
    }

    #[test]
    fn schema_sorts() {
        let aj = &system_schemas(RuleId::AjDiaYX)[0];
        assert_eq!(aj.premises[0].sort, Y);
        assert_eq!(aj.conclusions[0].sort, X);
        let trr: Vec<(Sort, Sort)> =
            system_schemas(RuleId::TrrInv).iter().map(|s| (s.premises[0].sort, s.conclusions[0].sort)).collect();
        assert_eq!(trr[0], (X, Y));
        assert_eq!(rewrite_schemas(RuleId::Tbd)[1].sort, Y);
    }

    #[test]
    fn matching_binds_and_rejects() {
        let metas = decls(&[("j", X, Nom), ("s", X, Any)]);
        let pat = parse_term("?j /\\ ?s", &Env::new()).unwrap();
        let t = Term::and(Term::nom_x("j1"), Term::prop("p"));
        let mut b = Bindings::new();
        assert!(match_term(&pat, &t, X, &metas, &mut b).is_ok());
        assert_eq!(b["j"], Term::nom_x("j1"));
        let bad = Term::and(Term::prop("q"), Term::prop("p"));
        assert_eq!(match_term(&pat, &bad, X, &metas, &mut Bindings::new()), Err(vec![0]));
    }

    #[test]
    fn reduction_drops_tautologies() {
        let s = double_ackermann_schema();
        let b: Bindings = [("t".to_string(), Term::Top), ("s".to_string(), Term::Bot)].into_iter().collect();
        assert_eq!(reduce(&s.premises, &b).len(), 7);
        assert_eq!(reduce(&s.conclusions, &b).len(), 5);
    }
}
