//! Lattice terms: syntax, evaluation, brute-force validity and the `t_n`/`s_n` family.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::lattice::FiniteLattice;
use crate::syntax::{Cursor, SyntaxError, Tok};

/// Default cap on the number of assignments enumerated by validity checks.
pub const DEFAULT_BUDGET: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("variable {0} is not assigned")]
    Unbound(String),
    #[error("nominal {0} must denote a join-irreducible element")]
    NotJoinIrreducible(String),
    #[error("{required} assignments needed but the budget is {budget}")]
    BudgetExceeded { required: u128, budget: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum LatticeTerm {
    Bot,
    Top,
    Var(String),
    /// A nominal, ranging over join-irreducible elements.
    Nom(String),
    Meet(Box<LatticeTerm>, Box<LatticeTerm>),
    Join(Box<LatticeTerm>, Box<LatticeTerm>),
}

pub type Assignment = BTreeMap<String, usize>;

impl LatticeTerm {
    pub fn var(name: &str) -> Self {
        LatticeTerm::Var(name.to_string())
    }

    pub fn nom(name: &str) -> Self {
        LatticeTerm::Nom(name.to_string())
    }

    pub fn meet(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: LatticeTerm, b: LatticeTerm) -> Self {
        LatticeTerm::Join(Box::new(a), Box::new(b))
    }

    pub fn depth(&self) -> usize {
        match self {
            LatticeTerm::Meet(a, b) | LatticeTerm::Join(a, b) => 1 + a.depth().max(b.depth()),
            _ => 0,
        }
    }

    /// Propositional variables and nominals, as `(name, is_nominal)`.
    pub fn variables(&self) -> BTreeSet<(String, bool)> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<(String, bool)>) {
        match self {
            LatticeTerm::Var(v) => {
                out.insert((v.clone(), false));
            }
            LatticeTerm::Nom(v) => {
                out.insert((v.clone(), true));
            }
            LatticeTerm::Meet(a, b) | LatticeTerm::Join(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
            _ => {}
        }
    }
}

impl fmt::Display for LatticeTerm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeTerm::Bot => write!(f, "bot"),
            LatticeTerm::Top => write!(f, "top"),
            LatticeTerm::Var(v) | LatticeTerm::Nom(v) => write!(f, "{v}"),
            LatticeTerm::Meet(a, b) => write_binary(f, "/\\", a, b, |t| matches!(t, LatticeTerm::Meet(..))),
            LatticeTerm::Join(a, b) => write_binary(f, "\\/", a, b, |t| matches!(t, LatticeTerm::Join(..))),
        }
    }
}

fn write_binary(
    f: &mut fmt::Formatter<'_>,
    op: &str,
    a: &LatticeTerm,
    b: &LatticeTerm,
    same: fn(&LatticeTerm) -> bool,
) -> fmt::Result {
    let compound = |t: &LatticeTerm| matches!(t, LatticeTerm::Meet(..) | LatticeTerm::Join(..));
    if compound(a) && !same(a) {
        write!(f, "({a})")?;
    } else {
        write!(f, "{a}")?;
    }
    write!(f, " {op} ")?;
    if compound(b) {
        write!(f, "({b})")
    } else {
        write!(f, "{b}")
    }
}

/// Parses `bot top /\ \/ ( ) identifiers`, with `/\` binding tighter than `\/`.
pub fn parse_term(text: &str) -> Result<LatticeTerm, TermError> {
    parse_term_with_nominals(text, &[])
}

/// As [`parse_term`], reading the listed identifiers as nominals.
pub fn parse_term_with_nominals(text: &str, nominals: &[&str]) -> Result<LatticeTerm, TermError> {
    let mut c = Cursor::new(text)?;
    let t = parse_join(&mut c, nominals)?;
    if !c.at_end() {
        return Err(c.error("unexpected trailing input").into());
    }
    Ok(t)
}

fn parse_join(c: &mut Cursor, noms: &[&str]) -> Result<LatticeTerm, SyntaxError> {
    let mut t = parse_meet(c, noms)?;
    while c.eat(&Tok::Or) {
        t = LatticeTerm::join(t, parse_meet(c, noms)?);
    }
    Ok(t)
}

fn parse_meet(c: &mut Cursor, noms: &[&str]) -> Result<LatticeTerm, SyntaxError> {
    let mut t = parse_atom(c, noms)?;
    while c.eat(&Tok::And) {
        t = LatticeTerm::meet(t, parse_atom(c, noms)?);
    }
    Ok(t)
}

fn parse_atom(c: &mut Cursor, noms: &[&str]) -> Result<LatticeTerm, SyntaxError> {
    match c.peek().cloned() {
        Some(Tok::LParen) => {
            c.next();
            let t = parse_join(c, noms)?;
            c.expect(&Tok::RParen, "')'")?;
            Ok(t)
        }
        Some(Tok::Ident(name)) => {
            c.next();
            Ok(match name.as_str() {
                "bot" => LatticeTerm::Bot,
                "top" => LatticeTerm::Top,
                n if noms.contains(&n) => LatticeTerm::Nom(name),
                _ => LatticeTerm::Var(name),
            })
        }
        _ => Err(c.error("expected a term")),
    }
}

pub fn eval(l: &FiniteLattice, t: &LatticeTerm, v: &Assignment) -> Result<usize, TermError> {
    Ok(match t {
        LatticeTerm::Bot => l.bottom(),
        LatticeTerm::Top => l.top(),
        LatticeTerm::Var(x) => *v.get(x).ok_or_else(|| TermError::Unbound(x.clone()))?,
        LatticeTerm::Nom(x) => {
            let a = *v.get(x).ok_or_else(|| TermError::Unbound(x.clone()))?;
            if !l.join_irreducibles().contains(a) {
                return Err(TermError::NotJoinIrreducible(x.clone()));
            }
            a
        }
        LatticeTerm::Meet(a, b) => l.meet(eval(l, a, v)?, eval(l, b, v)?),
        LatticeTerm::Join(a, b) => l.join(eval(l, a, v)?, eval(l, b, v)?),
    })
}

/// All assignments of the given variables (nominals range over `J(L)`).
pub fn assignments(l: &FiniteLattice, vars: &[(String, bool)]) -> impl Iterator<Item = Assignment> {
    let js: Vec<usize> = l.join_irreducibles().iter().collect();
    let all: Vec<usize> = l.elements().collect();
    let domains: Vec<Vec<usize>> = vars.iter().map(|(_, nom)| if *nom { js.clone() } else { all.clone() }).collect();
    let names: Vec<String> = vars.iter().map(|(n, _)| n.clone()).collect();
    let total: usize = domains.iter().map(|d| d.len()).product();
    (0..total).map(move |mut k| {
        let mut a = Assignment::new();
        for (name, dom) in names.iter().zip(&domains) {
            a.insert(name.clone(), dom[k % dom.len()]);
            k /= dom.len();
        }
        a
    })
}

fn assignment_count(l: &FiniteLattice, vars: &[(String, bool)]) -> u128 {
    let j = l.join_irreducibles().len() as u128;
    vars.iter().map(|(_, nom)| if *nom { j } else { l.size() as u128 }).product()
}

/// A falsifying assignment of `s ≤ t`, if there is one.
pub fn counterexample(
    l: &FiniteLattice,
    s: &LatticeTerm,
    t: &LatticeTerm,
    budget: u64,
) -> Result<Option<Assignment>, TermError> {
    let mut vars = s.variables();
    vars.extend(t.variables());
    let vars: Vec<(String, bool)> = vars.into_iter().collect();
    let required = assignment_count(l, &vars);
    if required > budget as u128 {
        return Err(TermError::BudgetExceeded { required, budget });
    }
    for v in assignments(l, &vars) {
        if !l.leq(eval(l, s, &v)?, eval(l, t, &v)?) {
            return Ok(Some(v));
        }
    }
    Ok(None)
}

/// `L ⊨ s ≤ t`, by enumerating every assignment.
pub fn valid_inequality(l: &FiniteLattice, s: &LatticeTerm, t: &LatticeTerm, budget: u64) -> Result<bool, TermError> {
    Ok(counterexample(l, s, t, budget)?.is_none())
}

/// `t_0 = x_0`, `t_{n+1} = x_{n+1} ∧ (y_{n+1} ∨ t_n)`.
pub fn t_term(n: usize) -> LatticeTerm {
    let mut t = LatticeTerm::var("x0");
    for k in 1..=n {
        t = LatticeTerm::meet(x(k), LatticeTerm::join(y(k), t));
    }
    t
}

/// `s_0 = ⊥`, `s_{n+1} = x_{n+1} ∧ (y_{n+1} ∨ (x_{n+1} ∧ x_n) ∨ s_n)`.
pub fn s_term(n: usize) -> LatticeTerm {
    let mut s = LatticeTerm::Bot;
    for k in 1..=n {
        let inner = LatticeTerm::join(LatticeTerm::join(y(k), LatticeTerm::meet(x(k), x(k - 1))), s);
        s = LatticeTerm::meet(x(k), inner);
    }
    s
}

fn x(k: usize) -> LatticeTerm {
    LatticeTerm::var(&format!("x{k}"))
}

fn y(k: usize) -> LatticeTerm {
    LatticeTerm::var(&format!("y{k}"))
}

/// All terms of depth at most `depth` over the given atoms, with `∧`/`∨` children
/// ordered (left ≤ right) and distinct, so commuted duplicates are skipped.
pub fn terms_up_to_depth(atoms: &[LatticeTerm], depth: usize) -> Vec<LatticeTerm> {
    let mut all: Vec<LatticeTerm> = atoms.to_vec();
    let mut frontier_start = 0;
    for _ in 0..depth {
        let prev = all.clone();
        let mut next = Vec::new();
        for (i, a) in prev.iter().enumerate() {
            for (k, b) in prev.iter().enumerate().skip(i + 1) {
                if i < frontier_start && k < frontier_start {
                    continue;
                }
                next.push(LatticeTerm::meet(a.clone(), b.clone()));
                next.push(LatticeTerm::join(a.clone(), b.clone()));
            }
        }
        frontier_start = all.len();
        all.extend(next);
    }
    all
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn parse_and_print() {
        assert_eq!(parse_term("x0").unwrap(), LatticeTerm::var("x0"));
        assert_eq!(parse_term("x1 /\\ (y1 \\/ x0)").unwrap(), t_term(1));
        let t = parse_term("x /\\ y \\/ z").unwrap();
        assert_eq!(t, LatticeTerm::join(LatticeTerm::meet(LatticeTerm::var("x"), LatticeTerm::var("y")), LatticeTerm::var("z")));
        for n in 0..4 {
            for t in [t_term(n), s_term(n)] {
                assert_eq!(parse_term(&t.to_string()).unwrap(), t);
            }
        }
        assert_eq!(s_term(1).to_string(), "x1 /\\ (y1 \\/ (x1 /\\ x0) \\/ bot)");
        let err = parse_term("x /\\").unwrap_err();
        assert!(matches!(err, TermError::Syntax(SyntaxError { column: 5, .. })));
    }

    #[test]
    fn evaluation() {
        let c2 = builtin("chain_2").unwrap();
        let v: Assignment = [("x".to_string(), 0), ("y".to_string(), 1)].into();
        assert_eq!(eval(&c2, &parse_term("x \\/ y").unwrap(), &v).unwrap(), 1);
        assert_eq!(eval(&c2, &LatticeTerm::Bot, &v).unwrap(), 0);
        assert!(matches!(eval(&c2, &LatticeTerm::var("z"), &v), Err(TermError::Unbound(_))));
    }

    #[test]
    fn validity_examples() {
        let one = builtin("chain_1").unwrap();
        let c2 = builtin("chain_2").unwrap();
        assert!(valid_inequality(&one, &t_term(0), &s_term(0), DEFAULT_BUDGET).unwrap());
        assert!(!valid_inequality(&c2, &t_term(0), &s_term(0), DEFAULT_BUDGET).unwrap());
        let sq = builtin("boolean_2").unwrap();
        let lhs = parse_term("x /\\ (y \\/ z)").unwrap();
        let rhs = parse_term("(x /\\ y) \\/ (x /\\ z)").unwrap();
        assert!(valid_inequality(&sq, &lhs, &rhs, DEFAULT_BUDGET).unwrap());
        assert!(!valid_inequality(&builtin("N5").unwrap(), &lhs, &rhs, DEFAULT_BUDGET).unwrap());
        let err = valid_inequality(&c2, &t_term(3), &s_term(3), 10).unwrap_err();
        assert_eq!(err, TermError::BudgetExceeded { required: 128, budget: 10 });
    }

    #[test]
    fn term_generator_sizes() {
        let atoms = [LatticeTerm::var("x"), LatticeTerm::var("y")];
        assert_eq!(terms_up_to_depth(&atoms, 0).len(), 2);
        assert_eq!(terms_up_to_depth(&atoms, 1).len(), 4);
        assert!(terms_up_to_depth(&atoms, 3).iter().all(|t| t.depth() <= 3));
    }
}
