//! Classical single-sorted correspondence on Kripke frames: validity of `◇□p → □◇p`, the
//! Church–Rosser condition, its nominal reduced form, the adjunction `⧫ ⊣ □`, and an
//! exhaustive check of the right Ackermann lemma.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::bitset::Set;
use crate::lplus::Polarity;

/// Largest state count accepted by exhaustive valuation sweeps.
pub const MAX_STATES: usize = 12;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ClassicalError {
    #[error("{states} states exceed the limit of {limit}")]
    Budget { states: usize, limit: usize },
    #[error("unbound variable {0}")]
    Unbound(String),
    #[error("Ackermann precondition violated: {0}")]
    Precondition(String),
}

/// `(W, R)` with `W = {0, .., n-1}`; `succ[w] = R[w]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KripkeFrame {
    pub succ: Vec<Set>,
}

impl KripkeFrame {
    pub fn new(n: usize, pairs: &[(usize, usize)]) -> KripkeFrame {
        let mut succ = vec![Set::EMPTY; n];
        for &(a, b) in pairs {
            succ[a].insert(b);
        }
        KripkeFrame { succ }
    }

    pub fn size(&self) -> usize {
        self.succ.len()
    }

    pub fn all(&self) -> Set {
        Set::full(self.size())
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.succ[a].contains(b)
    }

    /// `R⁻¹[w]`.
    pub fn pred(&self, w: usize) -> Set {
        (0..self.size()).filter(|&v| self.related(v, w)).collect()
    }

    /// `R[S]`, which is also `⧫S = ⟨R⁻¹⟩S`.
    pub fn image(&self, s: Set) -> Set {
        s.iter().fold(Set::EMPTY, |acc, w| acc.union(self.succ[w]))
    }

    /// `R⁻¹[S] = ◇S`.
    pub fn preimage(&self, s: Set) -> Set {
        (0..self.size()).filter(|&w| self.succ[w].intersects(s)).collect()
    }

    pub fn dia(&self, s: Set) -> Set {
        self.preimage(s)
    }

    pub fn boxed(&self, s: Set) -> Set {
        (0..self.size()).filter(|&w| self.succ[w].is_subset(s)).collect()
    }

    /// `⧫S = R[S]`, the left adjoint of `□`.
    pub fn black_dia(&self, s: Set) -> Set {
        self.image(s)
    }

    /// Every frame on `n` states, in the order of the relation's bit pattern.
    pub fn all_frames(n: usize) -> impl Iterator<Item = KripkeFrame> {
        let cells = n * n;
        (0..1u64 << cells).map(move |bits| KripkeFrame {
            succ: (0..n).map(|a| (0..n).filter(|&b| bits >> (a * n + b) & 1 == 1).collect()).collect(),
        })
    }
}

/// Modal formulas over named variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum ModalFormula {
    Bot,
    Top,
    Var(String),
    Not(Box<ModalFormula>),
    And(Box<ModalFormula>, Box<ModalFormula>),
    Or(Box<ModalFormula>, Box<ModalFormula>),
    Implies(Box<ModalFormula>, Box<ModalFormula>),
    Dia(Box<ModalFormula>),
    Box(Box<ModalFormula>),
    /// `⧫`, the diamond of `R⁻¹`.
    BlackDia(Box<ModalFormula>),
}

impl ModalFormula {
    pub fn var(p: &str) -> Self {
        ModalFormula::Var(p.to_string())
    }
    pub fn not(a: Self) -> Self {
        ModalFormula::Not(Box::new(a))
    }
    pub fn and(a: Self, b: Self) -> Self {
        ModalFormula::And(Box::new(a), Box::new(b))
    }
    pub fn or(a: Self, b: Self) -> Self {
        ModalFormula::Or(Box::new(a), Box::new(b))
    }
    pub fn implies(a: Self, b: Self) -> Self {
        ModalFormula::Implies(Box::new(a), Box::new(b))
    }
    pub fn dia(a: Self) -> Self {
        ModalFormula::Dia(Box::new(a))
    }
    pub fn boxed(a: Self) -> Self {
        ModalFormula::Box(Box::new(a))
    }
    pub fn black_dia(a: Self) -> Self {
        ModalFormula::BlackDia(Box::new(a))
    }

    /// `◇□p → □◇p`.
    pub fn church_rosser() -> Self {
        let p = Self::var("p");
        Self::implies(Self::dia(Self::boxed(p.clone())), Self::boxed(Self::dia(p)))
    }

    pub fn vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            ModalFormula::Bot | ModalFormula::Top => {}
            ModalFormula::Var(p) => {
                out.insert(p.clone());
            }
            ModalFormula::Not(a) | ModalFormula::Dia(a) | ModalFormula::Box(a) | ModalFormula::BlackDia(a) => a.collect_vars(out),
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) | ModalFormula::Implies(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }

    pub fn subst(&self, p: &str, by: &ModalFormula) -> ModalFormula {
        let go = |a: &ModalFormula| Box::new(a.subst(p, by));
        match self {
            ModalFormula::Var(q) if q == p => by.clone(),
            ModalFormula::Bot | ModalFormula::Top | ModalFormula::Var(_) => self.clone(),
            ModalFormula::Not(a) => ModalFormula::Not(go(a)),
            ModalFormula::Dia(a) => ModalFormula::Dia(go(a)),
            ModalFormula::Box(a) => ModalFormula::Box(go(a)),
            ModalFormula::BlackDia(a) => ModalFormula::BlackDia(go(a)),
            ModalFormula::And(a, b) => ModalFormula::And(go(a), go(b)),
            ModalFormula::Or(a, b) => ModalFormula::Or(go(a), go(b)),
            ModalFormula::Implies(a, b) => ModalFormula::Implies(go(a), go(b)),
        }
    }

    pub fn polarity(&self, p: &str) -> Polarity {
        match self {
            ModalFormula::Bot | ModalFormula::Top => Polarity::Absent,
            ModalFormula::Var(q) => {
                if q == p {
                    Polarity::Positive
                } else {
                    Polarity::Absent
                }
            }
            ModalFormula::Not(a) => a.polarity(p).flip(),
            ModalFormula::Dia(a) | ModalFormula::Box(a) | ModalFormula::BlackDia(a) => a.polarity(p),
            ModalFormula::And(a, b) | ModalFormula::Or(a, b) => a.polarity(p).combine(b.polarity(p)),
            ModalFormula::Implies(a, b) => a.polarity(p).flip().combine(b.polarity(p)),
        }
    }

    pub fn eval(&self, f: &KripkeFrame, v: &BTreeMap<String, Set>) -> Result<Set, ClassicalError> {
        Ok(match self {
            ModalFormula::Bot => Set::EMPTY,
            ModalFormula::Top => f.all(),
            ModalFormula::Var(p) => *v.get(p).ok_or_else(|| ClassicalError::Unbound(p.clone()))?,
            ModalFormula::Not(a) => a.eval(f, v)?.complement(f.size()),
            ModalFormula::And(a, b) => a.eval(f, v)?.inter(b.eval(f, v)?),
            ModalFormula::Or(a, b) => a.eval(f, v)?.union(b.eval(f, v)?),
            ModalFormula::Implies(a, b) => a.eval(f, v)?.complement(f.size()).union(b.eval(f, v)?),
            ModalFormula::Dia(a) => f.dia(a.eval(f, v)?),
            ModalFormula::Box(a) => f.boxed(a.eval(f, v)?),
            ModalFormula::BlackDia(a) => f.black_dia(a.eval(f, v)?),
        })
    }
}

impl fmt::Display for ModalFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModalFormula::Bot => f.write_str("⊥"),
            ModalFormula::Top => f.write_str("⊤"),
            ModalFormula::Var(p) => f.write_str(p),
            ModalFormula::Not(a) => write!(f, "¬{a}"),
            ModalFormula::And(a, b) => write!(f, "({a} ∧ {b})"),
            ModalFormula::Or(a, b) => write!(f, "({a} ∨ {b})"),
            ModalFormula::Implies(a, b) => write!(f, "({a} → {b})"),
            ModalFormula::Dia(a) => write!(f, "◇{a}"),
            ModalFormula::Box(a) => write!(f, "□{a}"),
            ModalFormula::BlackDia(a) => write!(f, "⧫{a}"),
        }
    }
}

fn check_size(f: &KripkeFrame) -> Result<(), ClassicalError> {
    if f.size() > MAX_STATES {
        return Err(ClassicalError::Budget { states: f.size(), limit: MAX_STATES });
    }
    Ok(())
}

/// Every valuation of `vars` on the frame.
fn valuations(f: &KripkeFrame, vars: &[String]) -> impl Iterator<Item = BTreeMap<String, Set>> {
    let n = f.size();
    let total = 1u64 << (n * vars.len());
    let vars = vars.to_vec();
    (0..total).map(move |bits| {
        vars.iter()
            .enumerate()
            .map(|(i, p)| (p.clone(), (0..n).filter(|&w| bits >> (i * n + w) & 1 == 1).collect()))
            .collect()
    })
}

/// `φ` is true at every world under every valuation.
pub fn modal_valid(f: &KripkeFrame, phi: &ModalFormula) -> Result<bool, ClassicalError> {
    check_size(f)?;
    let vars: Vec<String> = phi.vars().into_iter().collect();
    for v in valuations(f, &vars) {
        if phi.eval(f, &v)? != f.all() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `∀xyz (Rxy ∧ Rxz → ∃u (Ryu ∧ Rzu))`.
pub fn church_rosser(f: &KripkeFrame) -> bool {
    (0..f.size()).all(|x| {
        f.succ[x].iter().all(|y| f.succ[x].iter().all(|z| f.succ[y].intersects(f.succ[z])))
    })
}

/// `∀w  R[R⁻¹[w]] ⊆ R⁻¹[R[w]]`, the set form of `⧫◇j ≤ ◇⧫j`.
pub fn reduced_form(f: &KripkeFrame) -> bool {
    (0..f.size()).all(|w| f.image(f.pred(w)).is_subset(f.preimage(f.succ[w])))
}

/// `⧫S ⊆ T ⟺ S ⊆ □T` for all subsets.
pub fn adjunction_holds(f: &KripkeFrame) -> bool {
    let all = f.all();
    all.subsets().all(|s| all.subsets().all(|t| f.black_dia(s).is_subset(t) == s.is_subset(f.boxed(t))))
}

/// Both sides of the right Ackermann lemma at one valuation of the variables other than `p`:
/// `β(α/p) ≤ γ(α/p)`, and the existence of a `p`-variant with `α ≤ p` and `β ≤ γ`.
pub fn ackermann_check(
    f: &KripkeFrame,
    alpha: &ModalFormula,
    beta: &ModalFormula,
    gamma: &ModalFormula,
    p: &str,
    v: &BTreeMap<String, Set>,
) -> Result<(bool, bool), ClassicalError> {
    check_size(f)?;
    if alpha.vars().contains(p) {
        return Err(ClassicalError::Precondition(format!("{p} occurs in α")));
    }
    if !beta.polarity(p).is_monotone() {
        return Err(ClassicalError::Precondition(format!("β is not positive in {p}")));
    }
    if !gamma.polarity(p).is_antitone() {
        return Err(ClassicalError::Precondition(format!("γ is not negative in {p}")));
    }
    let substituted = beta.subst(p, alpha).eval(f, v)?.is_subset(gamma.subst(p, alpha).eval(f, v)?);
    let a = alpha.eval(f, v)?;
    let mut variant = v.clone();
    let exists = f.all().subsets().any(|pv| {
        variant.insert(p.to_string(), pv);
        a.is_subset(pv)
            && matches!((beta.eval(f, &variant), gamma.eval(f, &variant)), (Ok(b), Ok(g)) if b.is_subset(g))
    });
    Ok((substituted, exists))
}

/// Runs [`ackermann_check`] over every valuation of the other variables; true when both sides
/// agree everywhere.
pub fn ackermann_sweep(
    f: &KripkeFrame,
    alpha: &ModalFormula,
    beta: &ModalFormula,
    gamma: &ModalFormula,
    p: &str,
) -> Result<bool, ClassicalError> {
    let mut vars: BTreeSet<String> = alpha.vars();
    vars.extend(beta.vars());
    vars.extend(gamma.vars());
    vars.remove(p);
    let vars: Vec<String> = vars.into_iter().collect();
    for v in valuations(f, &vars) {
        let (l, r) = ackermann_check(f, alpha, beta, gamma, p, &v)?;
        if l != r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A frame where the three Church–Rosser views disagree.
#[derive(Debug, Clone, Serialize)]
pub struct Disagreement {
    pub states: usize,
    pub pairs: Vec<(usize, usize)>,
    pub modal_valid: bool,
    pub church_rosser: bool,
    pub reduced_form: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub frames: usize,
    pub church_rosser_frames: usize,
    pub disagreements: Vec<Disagreement>,
}

impl SweepReport {
    pub fn holds(&self) -> bool {
        self.disagreements.is_empty()
    }
}

/// Compares the three views on every frame with `states` worlds.
pub fn church_rosser_sweep_exact(states: usize) -> Result<SweepReport, ClassicalError> {
    if states * states > 20 {
        return Err(ClassicalError::Budget { states, limit: 4 });
    }
    let phi = ModalFormula::church_rosser();
    let frames: Vec<KripkeFrame> = KripkeFrame::all_frames(states).collect();
    let rows: Vec<(bool, Option<Disagreement>)> = frames
        .par_iter()
        .map(|f| {
            let (m, c, r) = (modal_valid(f, &phi)?, church_rosser(f), reduced_form(f));
            let bad = !(m == c && c == r);
            let pairs = (0..states).flat_map(|a| f.succ[a].iter().map(move |b| (a, b))).collect();
            Ok((c, bad.then(|| Disagreement { states, pairs, modal_valid: m, church_rosser: c, reduced_form: r })))
        })
        .collect::<Result<_, ClassicalError>>()?;
    Ok(SweepReport {
        frames: rows.len(),
        church_rosser_frames: rows.iter().filter(|r| r.0).count(),
        disagreements: rows.into_iter().filter_map(|r| r.1).collect(),
    })
}

/// The sweep over every frame with `1..=max_states` worlds.
pub fn church_rosser_sweep(max_states: usize) -> Result<SweepReport, ClassicalError> {
    let mut total = SweepReport { frames: 0, church_rosser_frames: 0, disagreements: Vec::new() };
    for n in 1..=max_states {
        let r = church_rosser_sweep_exact(n)?;
        total.frames += r.frames;
        total.church_rosser_frames += r.church_rosser_frames;
        total.disagreements.extend(r.disagreements);
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fork() -> KripkeFrame {
        KripkeFrame::new(3, &[(0, 1), (0, 2)])
    }

    #[test]
    fn endpoints_on_small_frames() {
        let phi = ModalFormula::church_rosser();
        let empty = KripkeFrame::new(3, &[]);
        assert!(modal_valid(&empty, &phi).unwrap() && church_rosser(&empty) && reduced_form(&empty));
        assert!(!modal_valid(&fork(), &phi).unwrap() && !church_rosser(&fork()) && !reduced_form(&fork()));
        let complete = KripkeFrame::new(2, &[(0, 0), (0, 1), (1, 0), (1, 1)]);
        assert!(modal_valid(&complete, &phi).unwrap());
        let order = KripkeFrame::new(3, &[(0, 0), (0, 1), (0, 2), (1, 1), (1, 2), (2, 2)]);
        assert!(church_rosser(&order));
    }

    #[test]
    fn fork_falsified_by_single_successor() {
        let p: BTreeMap<String, Set> = [("p".to_string(), Set::singleton(1))].into_iter().collect();
        let v = ModalFormula::church_rosser().eval(&fork(), &p).unwrap();
        assert!(!v.contains(0));
    }

    #[test]
    fn three_state_sweep() {
        let r = church_rosser_sweep_exact(3).unwrap();
        assert_eq!(r.frames, 512);
        assert!(r.holds());
    }

    #[test]
    fn ackermann_preconditions() {
        let p = ModalFormula::var("p");
        let f = fork();
        let v = BTreeMap::new();
        let (l, r) = ackermann_check(&f, &ModalFormula::Bot, &p, &ModalFormula::not(p.clone()), "p", &v).unwrap();
        assert_eq!(l, r);
        assert!(ackermann_check(&f, &ModalFormula::Bot, &ModalFormula::not(p.clone()), &ModalFormula::Top, "p", &v).is_err());
    }
}
