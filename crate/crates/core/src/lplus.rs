//! The sorted modal language over two-sorted frames: terms, inequalities and
//! quasi-inequalities, with a text syntax, sort checking, polarity and substitution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mml::MmlFormula;
use crate::syntax::{Cursor, SyntaxError, Tok};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LPlusError {
    #[error(transparent)]
    Syntax(#[from] SyntaxError),
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("sort error: {0}")]
    Sort(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Sort {
    X,
    Y,
}

impl Sort {
    pub fn other(self) -> Sort {
        match self {
            Sort::X => Sort::Y,
            Sort::Y => Sort::X,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Rel {
    XY,
    YX,
    XX,
    XYInv,
    YXInv,
    XXInv,
}

impl Rel {
    pub const ALL: [Rel; 6] = [Rel::XY, Rel::YX, Rel::XX, Rel::XYInv, Rel::YXInv, Rel::XXInv];

    /// Sort of the argument of `⟨R⟩`/`[R]`.
    pub fn arg_sort(self) -> Sort {
        match self {
            Rel::XY | Rel::YXInv => Sort::Y,
            Rel::YX | Rel::XYInv | Rel::XX | Rel::XXInv => Sort::X,
        }
    }

    /// Sort of the value of `⟨R⟩`/`[R]`.
    pub fn result_sort(self) -> Sort {
        match self {
            Rel::XY | Rel::XX | Rel::XXInv | Rel::YXInv => Sort::X,
            Rel::YX | Rel::XYInv => Sort::Y,
        }
    }

    pub fn inverse(self) -> Rel {
        match self {
            Rel::XY => Rel::XYInv,
            Rel::YX => Rel::YXInv,
            Rel::XX => Rel::XXInv,
            Rel::XYInv => Rel::XY,
            Rel::YXInv => Rel::YX,
            Rel::XXInv => Rel::XX,
        }
    }

    pub fn is_enriched(self) -> bool {
        matches!(self, Rel::XX | Rel::XXInv)
    }

    pub fn text(self) -> &'static str {
        match self {
            Rel::XY => "XY",
            Rel::YX => "YX",
            Rel::XX => "XX",
            Rel::XYInv => "XY-1",
            Rel::YXInv => "YX-1",
            Rel::XXInv => "XX-1",
        }
    }

    fn from_parts(base: &str, inverse: bool) -> Rel {
        let r = match base {
            "XY" => Rel::XY,
            "YX" => Rel::YX,
            _ => Rel::XX,
        };
        if inverse {
            r.inverse()
        } else {
            r
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Modality {
    Dia,
    Box,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum VarKind {
    Prop(Sort),
    Nom(Sort),
    Conom(Sort),
}

impl VarKind {
    pub fn sort(self) -> Sort {
        match self {
            VarKind::Prop(s) | VarKind::Nom(s) | VarKind::Conom(s) => s,
        }
    }

    pub fn keyword(self) -> &'static str {
        match self {
            VarKind::Prop(Sort::X) => "prop",
            VarKind::Prop(Sort::Y) => "propY",
            VarKind::Nom(Sort::X) => "nomX",
            VarKind::Nom(Sort::Y) => "nomY",
            VarKind::Conom(Sort::X) => "conomX",
            VarKind::Conom(Sort::Y) => "conomY",
        }
    }

    pub fn from_keyword(k: &str) -> Option<VarKind> {
        Some(match k {
            "prop" | "propX" => VarKind::Prop(Sort::X),
            "propY" => VarKind::Prop(Sort::Y),
            "nomX" => VarKind::Nom(Sort::X),
            "nomY" => VarKind::Nom(Sort::Y),
            "conomX" => VarKind::Conom(Sort::X),
            "conomY" => VarKind::Conom(Sort::Y),
            _ => return None,
        })
    }

    const ORDER: [VarKind; 6] = [
        VarKind::Prop(Sort::X),
        VarKind::Prop(Sort::Y),
        VarKind::Nom(Sort::X),
        VarKind::Nom(Sort::Y),
        VarKind::Conom(Sort::X),
        VarKind::Conom(Sort::Y),
    ];
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Term {
    Bot,
    Top,
    Atom(String, VarKind),
    /// Schema metavariable, written `?name`.
    Meta(String),
    Kappa(Box<Term>),
    Neg(Box<Term>),
    And(Box<Term>, Box<Term>),
    Or(Box<Term>, Box<Term>),
    Minus(Box<Term>, Box<Term>),
    Implies(Box<Term>, Box<Term>),
    Modal(Rel, Modality, Box<Term>),
}

impl Term {
    pub fn prop(name: &str) -> Term {
        Term::Atom(name.to_string(), VarKind::Prop(Sort::X))
    }
    pub fn prop_of(name: &str, sort: Sort) -> Term {
        Term::Atom(name.to_string(), VarKind::Prop(sort))
    }

    pub fn atom(name: &str, kind: VarKind) -> Term {
        Term::Atom(name.to_string(), kind)
    }
    pub fn nom_x(name: &str) -> Term {
        Term::Atom(name.to_string(), VarKind::Nom(Sort::X))
    }
    pub fn nom_y(name: &str) -> Term {
        Term::Atom(name.to_string(), VarKind::Nom(Sort::Y))
    }
    pub fn meta(name: &str) -> Term {
        Term::Meta(name.to_string())
    }
    pub fn kappa(a: Term) -> Term {
        Term::Kappa(Box::new(a))
    }
    pub fn neg(a: Term) -> Term {
        Term::Neg(Box::new(a))
    }
    pub fn and(a: Term, b: Term) -> Term {
        Term::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Term, b: Term) -> Term {
        Term::Or(Box::new(a), Box::new(b))
    }
    pub fn minus(a: Term, b: Term) -> Term {
        Term::Minus(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Term, b: Term) -> Term {
        Term::Implies(Box::new(a), Box::new(b))
    }
    pub fn dia(r: Rel, a: Term) -> Term {
        Term::Modal(r, Modality::Dia, Box::new(a))
    }
    pub fn boxed(r: Rel, a: Term) -> Term {
        Term::Modal(r, Modality::Box, Box::new(a))
    }
    /// `cl(a) = ⟨XY⟩[YX]⟨XX⟩a`.
    pub fn cl(a: Term) -> Term {
        Term::dia(Rel::XY, Term::boxed(Rel::YX, Term::dia(Rel::XX, a)))
    }
    /// Left-associated join; `⊥` when empty.
    pub fn join_all(items: impl IntoIterator<Item = Term>) -> Term {
        items.into_iter().reduce(Term::or).unwrap_or(Term::Bot)
    }
    /// Left-associated meet; `⊤` when empty.
    pub fn meet_all(items: impl IntoIterator<Item = Term>) -> Term {
        items.into_iter().reduce(Term::and).unwrap_or(Term::Top)
    }

    pub fn children(&self) -> Vec<&Term> {
        match self {
            Term::Bot | Term::Top | Term::Atom(..) | Term::Meta(_) => vec![],
            Term::Kappa(a) | Term::Neg(a) | Term::Modal(_, _, a) => vec![a],
            Term::And(a, b) | Term::Or(a, b) | Term::Minus(a, b) | Term::Implies(a, b) => vec![a, b],
        }
    }

    fn children_mut(&mut self) -> Vec<&mut Term> {
        match self {
            Term::Bot | Term::Top | Term::Atom(..) | Term::Meta(_) => vec![],
            Term::Kappa(a) | Term::Neg(a) | Term::Modal(_, _, a) => vec![a],
            Term::And(a, b) | Term::Or(a, b) | Term::Minus(a, b) | Term::Implies(a, b) => vec![a, b],
        }
    }

    pub fn depth(&self) -> usize {
        self.children().iter().map(|c| 1 + c.depth()).max().unwrap_or(0)
    }

    pub fn size(&self) -> usize {
        1 + self.children().iter().map(|c| c.size()).sum::<usize>()
    }

    pub fn at(&self, path: &[usize]) -> Option<&Term> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children().get(i).and_then(|c| c.at(rest)),
        }
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Term> {
        match path.split_first() {
            None => Some(self),
            Some((&i, rest)) => self.children_mut().into_iter().nth(i).and_then(|c| c.at_mut(rest)),
        }
    }

    /// Variables with their kinds.
    pub fn atoms(&self) -> BTreeMap<String, VarKind> {
        let mut out = BTreeMap::new();
        self.collect_atoms(&mut out);
        out
    }

    fn collect_atoms(&self, out: &mut BTreeMap<String, VarKind>) {
        if let Term::Atom(n, k) = self {
            out.insert(n.clone(), *k);
        }
        for c in self.children() {
            c.collect_atoms(out);
        }
    }

    pub fn vars(&self) -> BTreeSet<String> {
        self.atoms().into_keys().collect()
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Term::Atom(n, _) => n == name,
            _ => self.children().iter().any(|c| c.mentions(name)),
        }
    }

    pub fn metas(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_metas(&mut out);
        out
    }

    fn collect_metas(&self, out: &mut BTreeSet<String>) {
        if let Term::Meta(n) = self {
            out.insert(n.clone());
        }
        for c in self.children() {
            c.collect_metas(out);
        }
    }

    pub fn relations(&self) -> BTreeSet<Rel> {
        let mut out = BTreeSet::new();
        self.collect_relations(&mut out);
        out
    }

    fn collect_relations(&self, out: &mut BTreeSet<Rel>) {
        if let Term::Modal(r, _, _) = self {
            out.insert(*r);
        }
        for c in self.children() {
            c.collect_relations(out);
        }
    }

    /// Replaces variables by name.
    pub fn subst(&self, map: &BTreeMap<String, Term>) -> Term {
        self.map_leaves(&|t| match t {
            Term::Atom(n, _) => map.get(n).cloned(),
            _ => None,
        })
    }

    /// Replaces metavariables by name; unbound ones are kept.
    pub fn instantiate(&self, map: &BTreeMap<String, Term>) -> Term {
        self.map_leaves(&|t| match t {
            Term::Meta(n) => map.get(n).cloned(),
            _ => None,
        })
    }

    fn map_leaves(&self, f: &dyn Fn(&Term) -> Option<Term>) -> Term {
        if let Some(t) = f(self) {
            return t;
        }
        let mut out = self.clone();
        for c in out.children_mut() {
            *c = c.map_leaves(f);
        }
        out
    }

    /// Replaces every occurrence of `from` by `to`.
    pub fn replace(&self, from: &Term, to: &Term) -> Term {
        if self == from {
            return to.clone();
        }
        let mut out = self.clone();
        for c in out.children_mut() {
            *c = c.replace(from, to);
        }
        out
    }

    /// Simplifies `a∧⊥`, `a∨⊥`, `a∧⊤`, `a∨⊤` and their mirror images, bottom-up.
    pub fn fold_constants(&self) -> Term {
        let mut out = self.clone();
        for c in out.children_mut() {
            *c = c.fold_constants();
        }
        match out {
            Term::And(a, b) => match (*a, *b) {
                (Term::Bot, _) | (_, Term::Bot) => Term::Bot,
                (Term::Top, x) | (x, Term::Top) => x,
                (a, b) => Term::and(a, b),
            },
            Term::Or(a, b) => match (*a, *b) {
                (Term::Top, _) | (_, Term::Top) => Term::Top,
                (Term::Bot, x) | (x, Term::Bot) => x,
                (a, b) => Term::or(a, b),
            },
            other => other,
        }
    }

    /// Sort of the term, `None` when it is sort-polymorphic (built from `⊥`, `⊤` and metavariables).
    pub fn infer_sort(&self) -> Result<Option<Sort>, LPlusError> {
        Ok(match self {
            Term::Bot | Term::Top | Term::Meta(_) => None,
            Term::Atom(_, k) => Some(k.sort()),
            Term::Kappa(a) => match a.as_ref() {
                Term::Atom(_, VarKind::Nom(s) | VarKind::Conom(s)) => Some(*s),
                Term::Meta(_) => None,
                other => return Err(LPlusError::Sort(format!("kappa needs a nominal or conominal, found {other}"))),
            },
            Term::Neg(a) => a.infer_sort()?,
            Term::And(a, b) | Term::Or(a, b) | Term::Minus(a, b) | Term::Implies(a, b) => {
                unify(a.infer_sort()?, b.infer_sort()?, self)?
            }
            Term::Modal(r, _, a) => {
                a.check_sort(r.arg_sort())?;
                Some(r.result_sort())
            }
        })
    }

    pub fn check_sort(&self, s: Sort) -> Result<(), LPlusError> {
        match self.infer_sort()? {
            Some(t) if t != s => Err(LPlusError::Sort(format!("{self} has sort {t:?}, expected {s:?}"))),
            _ => Ok(()),
        }
    }

    /// Polarity of variable `p` in the term.
    pub fn polarity(&self, p: &str) -> Polarity {
        match self {
            Term::Bot | Term::Top | Term::Meta(_) => Polarity::Absent,
            Term::Atom(n, _) => {
                if n == p {
                    Polarity::Positive
                } else {
                    Polarity::Absent
                }
            }
            Term::Kappa(a) | Term::Neg(a) => a.polarity(p).flip(),
            Term::Modal(_, _, a) => a.polarity(p),
            Term::And(a, b) | Term::Or(a, b) => a.polarity(p).combine(b.polarity(p)),
            Term::Minus(a, b) => a.polarity(p).combine(b.polarity(p).flip()),
            Term::Implies(a, b) => a.polarity(p).flip().combine(b.polarity(p)),
        }
    }
}

fn unify(a: Option<Sort>, b: Option<Sort>, t: &Term) -> Result<Option<Sort>, LPlusError> {
    match (a, b) {
        (Some(x), Some(y)) if x != y => Err(LPlusError::Sort(format!("mixed sorts in {t}"))),
        (Some(x), _) | (_, Some(x)) => Ok(Some(x)),
        _ => Ok(None),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Polarity {
    Absent,
    Positive,
    Negative,
    Mixed,
}

impl Polarity {
    pub fn flip(self) -> Polarity {
        match self {
            Polarity::Positive => Polarity::Negative,
            Polarity::Negative => Polarity::Positive,
            p => p,
        }
    }

    pub fn combine(self, other: Polarity) -> Polarity {
        match (self, other) {
            (Polarity::Absent, p) | (p, Polarity::Absent) => p,
            (a, b) if a == b => a,
            _ => Polarity::Mixed,
        }
    }

    /// Positive or absent.
    pub fn is_monotone(self) -> bool {
        matches!(self, Polarity::Absent | Polarity::Positive)
    }

    /// Negative or absent.
    pub fn is_antitone(self) -> bool {
        matches!(self, Polarity::Absent | Polarity::Negative)
    }
}

impl MmlFormula {
    pub fn polarity(&self, p: &str) -> Polarity {
        match self {
            MmlFormula::Bot | MmlFormula::Top => Polarity::Absent,
            MmlFormula::Prop(q) => {
                if q == p {
                    Polarity::Positive
                } else {
                    Polarity::Absent
                }
            }
            MmlFormula::Neg(a) => a.polarity(p).flip(),
            MmlFormula::BoxEf(a) | MmlFormula::DiaFe(a) => a.polarity(p),
            MmlFormula::And(a, b) | MmlFormula::Or(a, b) => a.polarity(p).combine(b.polarity(p)),
        }
    }
}

/// `(∃∀)φ ↦ ⟨XY⟩[YX]φ`, `(∀∃)φ ↦ [XY]⟨YX⟩φ`; propositions become X-sorted variables.
pub fn mml_to_lplus(phi: &MmlFormula) -> Term {
    match phi {
        MmlFormula::Bot => Term::Bot,
        MmlFormula::Top => Term::Top,
        MmlFormula::Prop(p) => Term::prop(p),
        MmlFormula::Neg(a) => Term::neg(mml_to_lplus(a)),
        MmlFormula::And(a, b) => Term::and(mml_to_lplus(a), mml_to_lplus(b)),
        MmlFormula::Or(a, b) => Term::or(mml_to_lplus(a), mml_to_lplus(b)),
        MmlFormula::BoxEf(a) => Term::dia(Rel::XY, Term::boxed(Rel::YX, mml_to_lplus(a))),
        MmlFormula::DiaFe(a) => Term::boxed(Rel::XY, Term::dia(Rel::YX, mml_to_lplus(a))),
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binary = |t: &Term| matches!(t, Term::And(..) | Term::Or(..) | Term::Minus(..) | Term::Implies(..));
        let same_assoc = |parent: &Term, child: &Term| {
            matches!((parent, child), (Term::And(..), Term::And(..)) | (Term::Or(..), Term::Or(..)))
        };
        match self {
            Term::Bot => write!(f, "bot"),
            Term::Top => write!(f, "top"),
            Term::Atom(n, _) => write!(f, "{n}"),
            Term::Meta(n) => write!(f, "?{n}"),
            Term::Kappa(a) => write!(f, "kappa({a})"),
            Term::Neg(a) => {
                if binary(a) {
                    write!(f, "~({a})")
                } else {
                    write!(f, "~{a}")
                }
            }
            Term::Modal(r, m, a) => {
                match m {
                    Modality::Dia => write!(f, "<{}>", r.text())?,
                    Modality::Box => write!(f, "[{}]", r.text())?,
                }
                if binary(a) {
                    write!(f, "({a})")
                } else {
                    write!(f, "{a}")
                }
            }
            Term::And(a, b) | Term::Or(a, b) | Term::Minus(a, b) | Term::Implies(a, b) => {
                let op = match self {
                    Term::And(..) => "/\\",
                    Term::Or(..) => "\\/",
                    Term::Minus(..) => "\\",
                    _ => "->",
                };
                if binary(a) && !same_assoc(self, a) {
                    write!(f, "({a})")?;
                } else {
                    write!(f, "{a}")?;
                }
                write!(f, " {op} ")?;
                if binary(b) {
                    write!(f, "({b})")
                } else {
                    write!(f, "{b}")
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Inequality {
    pub lhs: Term,
    pub rhs: Term,
    pub sort: Sort,
}

impl Inequality {
    /// Builds an inequality, inferring its sort (X when both sides are polymorphic).
    pub fn new(lhs: Term, rhs: Term) -> Result<Inequality, LPlusError> {
        let sort = unify(lhs.infer_sort()?, rhs.infer_sort()?, &Term::and(lhs.clone(), rhs.clone()))?.unwrap_or(Sort::X);
        Ok(Inequality { lhs, rhs, sort })
    }

    /// Builds an inequality of a known sort without checking.
    pub fn of_sort(lhs: Term, rhs: Term, sort: Sort) -> Inequality {
        Inequality { lhs, rhs, sort }
    }

    pub fn side(&self, side: Side) -> &Term {
        match side {
            Side::Lhs => &self.lhs,
            Side::Rhs => &self.rhs,
        }
    }

    pub fn side_mut(&mut self, side: Side) -> &mut Term {
        match side {
            Side::Lhs => &mut self.lhs,
            Side::Rhs => &mut self.rhs,
        }
    }

    pub fn atoms(&self) -> BTreeMap<String, VarKind> {
        let mut a = self.lhs.atoms();
        a.extend(self.rhs.atoms());
        a
    }

    pub fn mentions(&self, name: &str) -> bool {
        self.lhs.mentions(name) || self.rhs.mentions(name)
    }

    pub fn map(&self, f: impl Fn(&Term) -> Term) -> Inequality {
        Inequality { lhs: f(&self.lhs), rhs: f(&self.rhs), sort: self.sort }
    }

    /// `⊥ ≤ φ` or `φ ≤ ⊤`.
    pub fn is_trivial(&self) -> bool {
        self.lhs == Term::Bot || self.rhs == Term::Top
    }

    /// Pure: no propositional variables.
    pub fn is_pure(&self) -> bool {
        self.atoms().values().all(|k| !matches!(k, VarKind::Prop(_)))
    }
}

impl fmt::Display for Inequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} <= {}", self.lhs, self.rhs)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Side {
    Lhs,
    Rhs,
}

/// `∀ prefix [ ⋀ system ⇒ false ]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct QuasiInequality {
    pub prefix: BTreeMap<String, VarKind>,
    pub system: Vec<Inequality>,
}

impl QuasiInequality {
    /// Builds a quasi-inequality whose prefix binds exactly the variables of the system.
    pub fn closed(system: Vec<Inequality>) -> QuasiInequality {
        let prefix = system.iter().flat_map(|i| i.atoms()).collect();
        QuasiInequality { prefix, system }
    }

    pub fn new(prefix: BTreeMap<String, VarKind>, system: Vec<Inequality>) -> Result<QuasiInequality, LPlusError> {
        let q = QuasiInequality { prefix, system };
        q.validate()?;
        Ok(q)
    }

    /// Every variable is bound with its kind, and every inequality is well sorted.
    pub fn validate(&self) -> Result<(), LPlusError> {
        for ineq in &self.system {
            for (n, k) in ineq.atoms() {
                match self.prefix.get(&n) {
                    None => return Err(LPlusError::Unbound(n)),
                    Some(bound) if *bound != k => {
                        return Err(LPlusError::Sort(format!("{n} used as {} but bound as {}", k.keyword(), bound.keyword())))
                    }
                    _ => {}
                }
            }
            ineq.lhs.check_sort(ineq.sort)?;
            ineq.rhs.check_sort(ineq.sort)?;
        }
        Ok(())
    }

    /// Variables occurring in the system.
    pub fn used(&self) -> BTreeMap<String, VarKind> {
        self.system.iter().flat_map(|i| i.atoms()).collect()
    }

    pub fn mentions_enriched(&self) -> bool {
        self.system.iter().any(|i| {
            i.lhs.relations().iter().chain(i.rhs.relations().iter()).any(|r| r.is_enriched())
        })
    }

    pub fn is_pure(&self) -> bool {
        self.system.iter().all(Inequality::is_pure)
    }
}

impl fmt::Display for QuasiInequality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "forall")?;
        let mut first = true;
        for kind in VarKind::ORDER {
            let names: Vec<&str> = self.prefix.iter().filter(|(_, k)| **k == kind).map(|(n, _)| n.as_str()).collect();
            if names.is_empty() {
                continue;
            }
            if !first {
                write!(f, " ;")?;
            }
            first = false;
            write!(f, " {} : {}", names.join(" "), kind.keyword())?;
        }
        write!(f, " .")?;
        let sys: Vec<String> = self.system.iter().map(|i| i.to_string()).collect();
        if !sys.is_empty() {
            write!(f, " {}", sys.join(" , "))?;
        }
        write!(f, " => false")
    }
}

/// Kinds assigned to identifiers while parsing.
pub type Env = BTreeMap<String, VarKind>;

struct Parser<'a> {
    cur: Cursor,
    env: &'a Env,
    default: Option<VarKind>,
}

impl Parser<'_> {
    fn term(&mut self) -> Result<Term, LPlusError> {
        let first = self.unary()?;
        let mut acc = first;
        let mut op: Option<Tok> = None;
        loop {
            let t = match self.cur.peek() {
                Some(t @ (Tok::And | Tok::Or | Tok::Minus | Tok::Implies)) => t.clone(),
                _ => break,
            };
            if let Some(prev) = &op {
                if *prev != t || matches!(t, Tok::Minus | Tok::Implies) {
                    return Err(self.cur.error("parentheses required when combining binary operators").into());
                }
            }
            self.cur.next();
            let rhs = self.unary()?;
            acc = match t {
                Tok::And => Term::and(acc, rhs),
                Tok::Or => Term::or(acc, rhs),
                Tok::Minus => Term::minus(acc, rhs),
                _ => Term::implies(acc, rhs),
            };
            op = Some(t);
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Term, LPlusError> {
        match self.cur.peek().cloned() {
            Some(Tok::Not) => {
                self.cur.next();
                Ok(Term::neg(self.unary()?))
            }
            Some(Tok::Modal(rel, is_box, inv)) => {
                self.cur.next();
                let r = Rel::from_parts(&rel, inv);
                let arg = self.unary()?;
                Ok(if is_box { Term::boxed(r, arg) } else { Term::dia(r, arg) })
            }
            Some(Tok::LParen) => {
                self.cur.next();
                let t = self.term()?;
                self.cur.expect(&Tok::RParen, "')'")?;
                Ok(t)
            }
            Some(Tok::Ident(name)) => {
                let column = self.cur.column();
                self.cur.next();
                match name.as_str() {
                    "bot" => Ok(Term::Bot),
                    "top" => Ok(Term::Top),
                    "kappa" => {
                        self.cur.expect(&Tok::LParen, "'(' after kappa")?;
                        let arg = self.unary()?;
                        self.cur.expect(&Tok::RParen, "')'")?;
                        if !matches!(arg, Term::Meta(_) | Term::Atom(_, VarKind::Nom(_) | VarKind::Conom(_))) {
                            return Err(SyntaxError::new(column, "kappa applies to nominals and conominals only").into());
                        }
                        Ok(Term::kappa(arg))
                    }
                    n if n.starts_with('?') && n.len() > 1 => Ok(Term::Meta(n[1..].to_string())),
                    n => match self.env.get(n).copied().or(self.default) {
                        Some(k) => Ok(Term::Atom(n.to_string(), k)),
                        None => Err(LPlusError::Unbound(n.to_string())),
                    },
                }
            }
            _ => Err(self.cur.error("expected a term").into()),
        }
    }

    fn inequality(&mut self) -> Result<Inequality, LPlusError> {
        let lhs = self.term()?;
        self.cur.expect(&Tok::Leq, "'<='")?;
        let rhs = self.term()?;
        Inequality::new(lhs, rhs)
    }

    fn finish(&self) -> Result<(), LPlusError> {
        if self.cur.at_end() {
            Ok(())
        } else {
            Err(self.cur.error("unexpected trailing input").into())
        }
    }
}

/// Parses a term; identifiers must be bound in `env`.
pub fn parse_term(src: &str, env: &Env) -> Result<Term, LPlusError> {
    let mut p = Parser { cur: Cursor::new(src)?, env, default: None };
    let t = p.term()?;
    p.finish()?;
    t.infer_sort()?;
    Ok(t)
}

/// Parses a term, reading unknown identifiers as X-sorted propositional variables.
pub fn parse_term_props(src: &str) -> Result<Term, LPlusError> {
    let env = Env::new();
    let mut p = Parser { cur: Cursor::new(src)?, env: &env, default: Some(VarKind::Prop(Sort::X)) };
    let t = p.term()?;
    p.finish()?;
    t.infer_sort()?;
    Ok(t)
}

pub fn parse_inequality(src: &str, env: &Env) -> Result<Inequality, LPlusError> {
    let mut p = Parser { cur: Cursor::new(src)?, env, default: None };
    let i = p.inequality()?;
    p.finish()?;
    Ok(i)
}

/// Parses `forall a b : prop ; j : nomX . lhs <= rhs , lhs <= rhs => false`.
pub fn parse_quasi(src: &str) -> Result<QuasiInequality, LPlusError> {
    let mut cur = Cursor::new(src)?;
    match cur.next() {
        Some(Tok::Ident(w)) if w == "forall" => {}
        _ => return Err(SyntaxError::new(1, "expected 'forall'").into()),
    }
    let mut prefix = Env::new();
    if !cur.eat(&Tok::Dot) {
        loop {
            let mut names = Vec::new();
            while let Some(Tok::Ident(n)) = cur.peek().cloned() {
                cur.next();
                names.push(n);
            }
            if names.is_empty() {
                return Err(cur.error("expected variable names").into());
            }
            cur.expect(&Tok::Colon, "':'")?;
            let column = cur.column();
            let kind = match cur.next() {
                Some(Tok::Ident(k)) => VarKind::from_keyword(&k)
                    .ok_or_else(|| SyntaxError::new(column, format!("unknown kind {k:?}")))?,
                _ => return Err(SyntaxError::new(column, "expected a kind").into()),
            };
            for n in names {
                prefix.insert(n, kind);
            }
            if cur.eat(&Tok::Dot) {
                break;
            }
            cur.expect(&Tok::Semi, "';' or '.'")?;
        }
    }
    let mut p = Parser { cur, env: &prefix, default: None };
    let mut system = Vec::new();
    if !p.cur.eat(&Tok::Arrow) {
        loop {
            system.push(p.inequality()?);
            if p.cur.eat(&Tok::Arrow) {
                break;
            }
            p.cur.expect(&Tok::Comma, "',' or '=>'")?;
        }
    }
    match p.cur.next() {
        Some(Tok::Ident(w)) if w == "false" => {}
        _ => return Err(p.cur.error("expected 'false'").into()),
    }
    p.finish()?;
    drop(p);
    QuasiInequality::new(prefix, system)
}

/// A name based on `base` that is not in `used`.
pub fn fresh_name(base: &str, used: &BTreeSet<String>) -> String {
    if !used.contains(base) {
        return base.to_string();
    }
    (1..).map(|i| format!("{base}_{i}")).find(|n| !used.contains(n)).expect("infinite supply")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn print_parse_round_trip() {
        let q = parse_quasi("forall x0 y1 : prop ; j1 : nomX ; C0 : nomY . j1 <= <XY>C0 , <XX>j1 /\\ x0 <= kappa(j1) => false").unwrap();
        assert_eq!(q.system[1].lhs, Term::and(Term::dia(Rel::XX, Term::nom_x("j1")), Term::prop("x0")));
        assert_eq!(q.system[0].sort, Sort::X);
        assert_eq!(parse_quasi(&q.to_string()).unwrap(), q);
        let t = parse_term_props("<XY>[YX]((y \\/ (x /\\ z)) \\/ bot)").unwrap();
        assert_eq!(t.to_string(), "<XY>[YX](y \\/ (x /\\ z) \\/ bot)");
        assert_eq!(parse_term_props(&t.to_string()).unwrap(), t);
    }

    #[test]
    fn sorts() {
        let env: Env = [("C".to_string(), VarKind::Nom(Sort::Y)), ("k".to_string(), VarKind::Nom(Sort::X))].into();
        let t = parse_term("<YX-1>C \\ k", &env).unwrap();
        assert_eq!(t.infer_sort().unwrap(), Some(Sort::X));
        assert!(parse_term("<XY>k", &env).is_err());
        assert!(parse_term("C /\\ k", &env).is_err());
        assert_eq!(parse_term("[YX]k", &env).unwrap().infer_sort().unwrap(), Some(Sort::Y));
        let i = parse_inequality("C <= <YX>k", &env).unwrap();
        assert_eq!(i.sort, Sort::Y);
    }

    #[test]
    fn mixing_requires_parentheses() {
        assert!(parse_term_props("a /\\ b \\/ c").is_err());
        assert!(parse_term_props("a /\\ b /\\ c").is_ok());
        assert!(parse_term_props("kappa(a)").is_err());
    }

    #[test]
    fn polarity_examples() {
        let p = parse_term_props("p").unwrap();
        assert_eq!(p.polarity("p"), Polarity::Positive);
        assert_eq!(parse_term_props("~p").unwrap().polarity("p"), Polarity::Negative);
        assert_eq!(parse_term_props("<XY>[YX](p \\/ ~p)").unwrap().polarity("p"), Polarity::Mixed);
        assert_eq!(parse_term_props("q \\ p").unwrap().polarity("p"), Polarity::Negative);
        assert_eq!(parse_term_props("p -> q").unwrap().polarity("p"), Polarity::Negative);
        assert_eq!(parse_term_props("q").unwrap().polarity("p"), Polarity::Absent);
    }

    #[test]
    fn folding() {
        let t = parse_term_props("(y \\/ (a /\\ x)) \\/ (x /\\ bot)").unwrap();
        assert_eq!(t.fold_constants(), parse_term_props("y \\/ (a /\\ x)").unwrap());
        assert_eq!(parse_term_props("a \\/ top").unwrap().fold_constants(), Term::Top);
    }

    #[test]
    fn empty_system_and_prefix() {
        let q = parse_quasi("forall . => false").unwrap();
        assert!(q.system.is_empty());
        assert_eq!(q.to_string(), "forall . => false");
        assert!(matches!(parse_quasi("forall . x <= bot => false"), Err(LPlusError::Unbound(_))));
    }
}
