//! D and D⁺ relations on join-irreducibles, walks along them, the ALBA derivation that turns
//! `t_n ≤ s_n` into a pure ladder, and the three-way check tying lattice validity to walks.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::alba::{equivalent_on, AlbaError, DerivationTrace, Granularity, RuleApplication, RuleId};
use crate::lattice::FiniteLattice;
use crate::lplus::{Inequality, Modality, QuasiInequality, Rel, Side, Sort, Term, VarKind};
use crate::presentation::{presentation_of, JoinPresentation};
use crate::term::{s_term, t_term, valid_inequality, TermError};
use crate::two_sorted::{enriched_frame_of, holds, FrameError, Model, ValuationMode, YMode, DEFAULT_SEARCH_BUDGET};

/// Largest `n` for which the scripted derivation is built by default.
pub const MAX_SCRIPTED_N: usize = 3;

#[derive(Debug, Error)]
pub enum NationError {
    #[error("n = {n} is outside 1..={max}")]
    OutOfRange { n: usize, max: usize },
    #[error("not a ladder: {0}")]
    NotLadder(String),
    #[error("derivation step {step} failed: {source}")]
    Step { step: usize, source: AlbaError },
    #[error(transparent)]
    Frame(#[from] FrameError),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// `j ◁ C`, `k ∈ C`, `k ≠ j`.
    D,
    /// `j ◁ C`, `k ∈ C`, `k ≰ j`.
    Dplus,
}

/// The D or D⁺ relation on `J(L)`; vertices are presentation indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DGraph {
    pub labels: Vec<String>,
    pub edges: Vec<(usize, usize)>,
    pub variant: Variant,
}

/// Longest walk, when walks are bounded.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ChainBound {
    /// No vertices at all.
    Empty,
    Finite(usize),
    Cyclic,
}

impl fmt::Display for ChainBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ChainBound::Empty => f.write_str("no vertices"),
            ChainBound::Finite(n) => write!(f, "longest walk {n}"),
            ChainBound::Cyclic => f.write_str("cyclic"),
        }
    }
}

pub fn dgraph(l: &FiniteLattice, variant: Variant) -> DGraph {
    dgraph_of(&presentation_of(l), variant)
}

pub fn dgraph_of(p: &JoinPresentation, variant: Variant) -> DGraph {
    let n = p.size();
    let mut edges = Vec::new();
    for j in 0..n {
        for k in 0..n {
            let ok = |k: usize| match variant {
                Variant::D => k != j,
                Variant::Dplus => !p.leq(k, j),
            };
            if ok(k) && p.covers(j).iter().any(|c| c.contains(k)) {
                edges.push((j, k));
            }
        }
    }
    DGraph { labels: p.labels().to_vec(), edges, variant }
}

impl DGraph {
    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn successors(&self, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.edges.iter().filter(move |e| e.0 == j).map(|e| e.1)
    }

    pub fn has_edge(&self, j: usize, k: usize) -> bool {
        self.edges.contains(&(j, k))
    }

    /// Edges as `a→b` label pairs.
    pub fn edge_labels(&self) -> Vec<String> {
        self.edges.iter().map(|&(a, b)| format!("{}→{}", self.labels[a], self.labels[b])).collect()
    }

    /// A walk with `n` edges exists (vertices may repeat). For `n = 0`, the graph has a vertex.
    pub fn has_chain(&self, n: usize) -> bool {
        // starts[v]: some walk with the remaining number of edges starts at v
        let mut starts = vec![true; self.size()];
        for _ in 0..n {
            let next: Vec<bool> = (0..self.size()).map(|j| self.successors(j).any(|k| starts[k])).collect();
            if next == starts {
                break;
            }
            starts = next;
        }
        starts.iter().any(|&b| b)
    }

    /// A walk with `n` edges starting at `v` exists.
    pub fn has_chain_from(&self, v: usize, n: usize) -> bool {
        let mut at: Vec<bool> = (0..self.size()).map(|w| w == v).collect();
        for _ in 0..n {
            at = (0..self.size()).map(|k| (0..self.size()).any(|j| at[j] && self.has_edge(j, k))).collect();
        }
        at.iter().any(|&b| b)
    }

    /// A walk with `n` edges and no repeated vertex exists.
    pub fn has_simple_chain(&self, n: usize) -> bool {
        fn go(g: &DGraph, v: usize, left: usize, seen: &mut Vec<bool>) -> bool {
            if left == 0 {
                return true;
            }
            let succ: Vec<usize> = g.successors(v).collect();
            for k in succ {
                if !seen[k] {
                    seen[k] = true;
                    let found = go(g, k, left - 1, seen);
                    seen[k] = false;
                    if found {
                        return true;
                    }
                }
            }
            false
        }
        (0..self.size()).any(|v| {
            let mut seen = vec![false; self.size()];
            seen[v] = true;
            go(self, v, n, &mut seen)
        })
    }

    /// A walk witnessing `has_chain(n)`, as vertex indices.
    pub fn chain_witness(&self, n: usize) -> Option<Vec<usize>> {
        let size = self.size();
        // reach[i][v]: a walk with i edges starts at v
        let mut reach = vec![vec![true; size]];
        for i in 0..n {
            let row: Vec<bool> = (0..size).map(|j| self.successors(j).any(|k| reach[i][k])).collect();
            reach.push(row);
        }
        let mut v = (0..size).find(|&v| reach[n][v])?;
        let mut walk = vec![v];
        for i in (0..n).rev() {
            v = self.successors(v).find(|&k| reach[i][k]).expect("reachable");
            walk.push(v);
        }
        Some(walk)
    }

    pub fn max_finite_or_cyclic(&self) -> ChainBound {
        if self.size() == 0 {
            return ChainBound::Empty;
        }
        // a walk longer than |J| revisits a vertex
        let mut longest = 0;
        while longest <= self.size() && self.has_chain(longest + 1) {
            longest += 1;
        }
        if longest > self.size() {
            ChainBound::Cyclic
        } else {
            ChainBound::Finite(longest)
        }
    }
}

fn x(k: usize) -> Term {
    Term::prop(&format!("x{k}"))
}

fn y(k: usize) -> Term {
    Term::prop(&format!("y{k}"))
}

fn j(k: usize) -> Term {
    Term::nom_x(&format!("j{k}"))
}

fn c(k: usize) -> Term {
    Term::nom_y(&format!("C{k}"))
}

fn dia_box(a: Term) -> Term {
    Term::dia(Rel::XY, Term::boxed(Rel::YX, a))
}

/// `t_m` as an L⁺ term: `t_0 = x_0`, `t_m = x_m ∧ t′_m`.
pub fn t_lplus(m: usize) -> Term {
    if m == 0 {
        x(0)
    } else {
        Term::and(x(m), t_prime(m))
    }
}

/// `t′_m = ⟨XY⟩[YX](y_m ∨ t_{m-1})`.
pub fn t_prime(m: usize) -> Term {
    dia_box(Term::or(y(m), t_lplus(m - 1)))
}

/// `s_m` as an L⁺ term: `s_0 = ⊥`, `s_m = x_m ∧ s′_m`.
pub fn s_lplus(m: usize) -> Term {
    if m == 0 {
        Term::Bot
    } else {
        Term::and(x(m), s_prime(m))
    }
}

/// `s′_m = ⟨XY⟩[YX]((y_m ∨ (x_m ∧ x_{m-1})) ∨ s_{m-1})`.
pub fn s_prime(m: usize) -> Term {
    dia_box(Term::or(Term::or(y(m), Term::and(x(m), x(m - 1))), s_lplus(m - 1)))
}

/// `∀ x_0..x_n, y_1..y_n, j_n [ j_n ≤ t_n , s_n ≤ κ(j_n) ⇒ false ]`, with `t_n`, `s_n` unfolded
/// one level so that `x_n` is visible.
pub fn initial_system(n: usize) -> QuasiInequality {
    let mut prefix = BTreeMap::new();
    for k in 0..=n {
        prefix.insert(format!("x{k}"), VarKind::Prop(Sort::X));
    }
    for k in 1..=n {
        prefix.insert(format!("y{k}"), VarKind::Prop(Sort::X));
    }
    prefix.insert(format!("j{n}"), VarKind::Nom(Sort::X));
    let system = vec![
        Inequality::of_sort(j(n), t_lplus(n), Sort::X),
        Inequality::of_sort(s_lplus(n), Term::kappa(j(n)), Sort::X),
    ];
    QuasiInequality { prefix, system }
}

/// The ladder `j_{i+1} ≤ ⟨XY⟩C_i , j_i ≤ ⟨YX-1⟩C_i , ⟨XX⟩j_{i+1} ∧ j_i ≤ ⊥` for `i = n-1..0`.
pub fn pure_system(n: usize) -> QuasiInequality {
    let mut prefix = BTreeMap::new();
    for k in 0..=n {
        prefix.insert(format!("j{k}"), VarKind::Nom(Sort::X));
    }
    let mut system = Vec::new();
    for i in (0..n).rev() {
        prefix.insert(format!("C{i}"), VarKind::Nom(Sort::Y));
        system.push(Inequality::of_sort(j(i + 1), Term::dia(Rel::XY, c(i)), Sort::X));
        system.push(Inequality::of_sort(j(i), Term::dia(Rel::YXInv, c(i)), Sort::X));
        system.push(Inequality::of_sort(Term::and(Term::dia(Rel::XX, j(i + 1)), j(i)), Term::Bot, Sort::X));
    }
    QuasiInequality { prefix, system }
}

struct Script {
    trace: DerivationTrace,
}

impl Script {
    fn push(&mut self, app: RuleApplication) -> Result<(), NationError> {
        let step = self.trace.steps.len() + 1;
        self.trace.push(app).map(|_| ()).map_err(|source| NationError::Step { step, source })
    }

    fn fwd(&mut self, rule: RuleId, targets: &[usize]) -> Result<(), NationError> {
        self.push(RuleApplication::forward(rule, targets))
    }

    fn bwd(&mut self, rule: RuleId, targets: &[usize]) -> Result<(), NationError> {
        self.push(RuleApplication::backward(rule, targets))
    }

    fn rw(&mut self, rule: RuleId, target: usize, side: Side, path: &[usize]) -> Result<(), NationError> {
        self.push(RuleApplication::forward(rule, &[target]).at_pos(side, path))
    }

    /// Reduces the pair `j_m ≤ t′_m , s′_m(⟨XX⟩j_m/x_m) ≤ κ(j_m)` sitting at `o, o+1`.
    /// For `m ≥ 2` it leaves the next pair at `o+3, o+4`.
    fn level(&mut self, m: usize, o: usize) -> Result<(), NationError> {
        let base = m == 1;
        if base {
            self.rw(RuleId::OrBot, o + 1, Side::Lhs, &[0, 0])?;
        }
        self.bwd(RuleId::AtCoat1, &[o + 1])?;
        self.fwd(RuleId::TAndBot, &[o + 1])?;
        self.rw(RuleId::Tbd, o + 1, Side::Rhs, &[0, 0])?;
        self.rw(RuleId::Tdb, o + 1, Side::Rhs, &[])?;
        self.fwd(RuleId::Tnm, &[o, o + 1])?;
        let cname = format!("C{}", m - 1);
        let kname = format!("j{}", m - 1);
        self.push(RuleApplication::forward(RuleId::ApDiaXY, &[o]).with_fresh(&[&cname]))?;
        self.fwd(RuleId::SpAnd, &[o + 1])?;
        self.fwd(RuleId::AjBoxYX, &[o + 1])?;
        self.push(RuleApplication::forward(RuleId::ApDiaYX, &[o + 2]).with_fresh(&[&kname]))?;
        self.rw(RuleId::Dm, o + 3, Side::Rhs, &[])?;
        if !base {
            self.rw(RuleId::Dm, o + 3, Side::Rhs, &[0])?;
            self.fwd(RuleId::SpAnd, &[o + 3])?;
        }
        self.fwd(RuleId::SpAnd, &[o + 3])?;
        self.fwd(RuleId::TrrInv, &[o + 2])?;
        let negated = if base { 2 } else { 3 };
        for i in 0..negated {
            self.bwd(RuleId::TAndBot, &[o + 3 + i])?;
            self.fwd(RuleId::AtCoat1, &[o + 3 + i])?;
        }
        let last = o + 3 + negated;
        self.rw(RuleId::Tbd, last, Side::Rhs, &[])?;
        self.rw(RuleId::Tdb, last, Side::Rhs, &[0, 0])?;
        self.fwd(RuleId::Tr, &[o + 2, o + 1])?;
        self.bwd(RuleId::TAndBot, &[last + 1])?;
        self.fwd(RuleId::Mt, &[o + 3, o + 4])?;
        if base {
            let targets: Vec<usize> = (o..o + 7).collect();
            self.push(RuleApplication::forward(RuleId::DoubleAckermann, &targets).bind("t", Term::Top).bind("s", Term::Bot))?;
            self.bwd(RuleId::MinCov2, &[o, o + 1, o + 2])?;
            self.push(RuleApplication::backward(RuleId::MinCovD, &[o, o + 1, o + 2, o + 3]).bind("s", Term::Bot))?;
            self.rw(RuleId::CAnd, o + 2, Side::Lhs, &[])?;
            self.fwd(RuleId::AtomRXX, &[o + 2])?;
            self.bwd(RuleId::AtCoat1, &[o + 2])?;
            self.rw(RuleId::CAnd, o + 2, Side::Lhs, &[])?;
        } else {
            self.rw(RuleId::DOrAnd, o + 2, Side::Rhs, &[])?;
            self.fwd(RuleId::SpAnd, &[o + 2])?;
            self.fwd(RuleId::SpAnd, &[o + 4])?;
            let targets: Vec<usize> = (o..o + 10).collect();
            self.fwd(RuleId::DoubleAckermann, &targets)?;
            self.bwd(RuleId::MinCov2, &[o, o + 1, o + 3])?;
            self.bwd(RuleId::MinCovD, &[o, o + 1, o + 3, o + 4, o + 5])?;
            self.rw(RuleId::CAnd, o + 2, Side::Lhs, &[])?;
            self.fwd(RuleId::AtomRXX, &[o + 2])?;
            self.bwd(RuleId::AtCoat1, &[o + 2])?;
            self.rw(RuleId::CAnd, o + 2, Side::Lhs, &[])?;
            self.fwd(RuleId::AtomRXX, &[o + 3])?;
            let mut perm: Vec<usize> = (0..o + 3).collect();
            perm.extend([o + 4, o + 3]);
            let step = self.trace.steps.len() + 1;
            self.trace.push_reorder(&perm).map_err(|source| NationError::Step { step, source })?;
        }
        Ok(())
    }
}

/// The rule-by-rule reduction of `t_n ≤ s_n` to `pure_system(n)`.
///
/// Preprocessing splits `j_n ≤ x_n ∧ t′_n`, eliminates `x_n` with its closed minimal value
/// `⟨XX⟩j_n` and strips the resulting `⟨XX⟩j_n` conjunct. Each level `m` then introduces
/// `C_{m-1}` and `j_{m-1}`, eliminates `x_{m-1}` and `y_m` together, and hands the pair for
/// `m - 1` to the next level.
pub fn scripted_derivation(n: usize) -> Result<DerivationTrace, NationError> {
    scripted_derivation_up_to(n, MAX_SCRIPTED_N)
}

pub fn scripted_derivation_up_to(n: usize, max: usize) -> Result<DerivationTrace, NationError> {
    if n == 0 || n > max {
        return Err(NationError::OutOfRange { n, max });
    }
    let mut s = Script { trace: DerivationTrace::new(initial_system(n)) };
    s.fwd(RuleId::SpAnd, &[0])?;
    s.push(
        RuleApplication::forward(RuleId::RaCl, &[0, 2])
            .bind("p", x(n))
            .bind("value", Term::dia(Rel::XX, j(n)))
            .placed(&[1]),
    )?;
    s.fwd(RuleId::AtomRXX, &[1])?;
    for m in (1..=n).rev() {
        s.level(m, 3 * (n - m))?;
    }
    Ok(s.trace)
}

/// The first-order reading of a ladder: atoms `j_{i+1} ◁ C_i`, `j_i ∈ C_i`, `j_i ≰ j_{i+1}`,
/// and the condition that no assignment satisfies them all.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FoCondition {
    /// Number of rungs; the condition says "no D⁺-walk of this length".
    pub length: usize,
    /// Nominal names from the top of the ladder down.
    pub nominals: Vec<String>,
    pub covers: Vec<String>,
    pub atoms: Vec<String>,
}

impl FoCondition {
    pub fn description(&self) -> String {
        match self.length {
            0 => "J(L) is empty".to_string(),
            1 => "no D⁺ edge".to_string(),
            n => format!("no D⁺-walk of length {n}"),
        }
    }

    /// Reads the condition through the walk relation.
    pub fn holds_in_graph(&self, g: &DGraph) -> bool {
        !g.has_chain(self.length)
    }

    /// Evaluates the atoms directly by searching assignments of nominals to `J(L)` and
    /// covering nominals to minimal covers.
    pub fn holds_in(&self, p: &JoinPresentation) -> bool {
        fn extend(p: &JoinPresentation, upper: usize, left: usize) -> bool {
            if left == 0 {
                return true;
            }
            p.covers(upper)
                .iter()
                .any(|cover| cover.iter().any(|lower| !p.leq(lower, upper) && extend(p, lower, left - 1)))
        }
        !(0..p.size()).any(|top| extend(p, top, self.length))
    }
}

impl fmt::Display for FoCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "¬∃ {} ∃ {} ({})", self.nominals.join(" "), self.covers.join(" "), self.atoms.join(" ∧ "))?;
        write!(f, "  i.e. {}", self.description())
    }
}

/// Reads a ladder-shaped pure quasi-inequality as a first-order condition on `(J(L), ◁, ∈, ≤)`.
pub fn fo_translate(q: &QuasiInequality) -> Result<FoCondition, NationError> {
    let bad = |msg: String| Err(NationError::NotLadder(msg));
    if q.system.len() % 3 != 0 {
        return bad(format!("{} inequalities is not a multiple of three", q.system.len()));
    }
    let nom = |t: &Term, sort: Sort| match t {
        Term::Atom(n, VarKind::Nom(s)) if *s == sort => Some(n.clone()),
        _ => None,
    };
    let length = q.system.len() / 3;
    let mut nominals: Vec<String> = Vec::new();
    let mut covers = Vec::new();
    let mut atoms = Vec::new();
    for (r, rung) in q.system.chunks(3).enumerate() {
        let shape = || format!("rung {r} does not have the shape j ≤ <XY>C , k ≤ <YX-1>C , <XX>j /\\ k ≤ bot");
        let (upper, cname) = match (&rung[0].lhs, &rung[0].rhs) {
            (l, Term::Modal(Rel::XY, Modality::Dia, cn)) => match (nom(l, Sort::X), nom(cn, Sort::Y)) {
                (Some(a), Some(b)) => (a, b),
                _ => return bad(shape()),
            },
            _ => return bad(shape()),
        };
        let lower = match (&rung[1].lhs, &rung[1].rhs) {
            (l, Term::Modal(Rel::YXInv, Modality::Dia, cn)) if nom(cn, Sort::Y).as_deref() == Some(&cname) => {
                match nom(l, Sort::X) {
                    Some(a) => a,
                    None => return bad(shape()),
                }
            }
            _ => return bad(shape()),
        };
        let expected = Inequality::of_sort(
            Term::and(Term::dia(Rel::XX, Term::nom_x(&upper)), Term::nom_x(&lower)),
            Term::Bot,
            Sort::X,
        );
        if rung[2] != expected {
            return bad(shape());
        }
        match nominals.last() {
            None => nominals.push(upper.clone()),
            Some(prev) if *prev == upper => {}
            Some(prev) => return bad(format!("rung {r} starts at {upper} but the previous rung ended at {prev}")),
        }
        if nominals.contains(&lower) || covers.contains(&cname) {
            return bad(format!("rung {r} reuses a variable"));
        }
        nominals.push(lower.clone());
        covers.push(cname.clone());
        atoms.push(format!("{upper} ◁ {cname}"));
        atoms.push(format!("{lower} ∈ {cname}"));
        atoms.push(format!("{lower} ≰ {upper}"));
    }
    if length == 0 {
        match q.prefix.iter().find(|(_, k)| **k == VarKind::Nom(Sort::X)) {
            Some((n, _)) => nominals.push(n.clone()),
            None => return bad("an empty ladder needs one X-nominal in its prefix".into()),
        }
    }
    let bound = |n: &String| q.prefix.contains_key(n);
    if !nominals.iter().chain(&covers).all(bound) {
        return bad("unbound nominal".into());
    }
    Ok(FoCondition { length, nominals, covers, atoms })
}

/// Outcome of the three-way check for one lattice and one `n`.
#[derive(Debug, Clone, Serialize)]
pub struct PropositionReport {
    pub lattice: String,
    pub size: usize,
    pub n: usize,
    /// `L ⊨ t_n ≤ s_n`; `None` when the assignment count exceeds the budget.
    pub validity: Option<bool>,
    /// No D⁺-walk of length `n`.
    pub no_chain: bool,
    /// Derivation steps checked for equi-validity on `E_L`.
    pub steps_checked: usize,
    /// First step whose system is not equi-valid with its predecessor.
    pub step_failure: Option<StepFailure>,
    pub notice: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
pub struct StepFailure {
    pub step: usize,
    pub detail: String,
}

impl PropositionReport {
    pub fn agrees(&self) -> bool {
        self.validity.map_or(true, |v| v == self.no_chain)
    }

    pub fn passed(&self) -> bool {
        self.agrees() && self.step_failure.is_none()
    }
}

/// `E_L` with closed valuations.
pub fn lattice_model(l: &FiniteLattice, name: &str) -> Model {
    Model::new(enriched_frame_of(&presentation_of(l), YMode::Powerset), ValuationMode::Closed, name)
}

/// Compares validity of `t_n ≤ s_n` on `L`, absence of D⁺-walks of length `n`, and, for
/// `n ≥ 1`, equi-validity of consecutive systems of the derivation on `E_L`.
pub fn verify_proposition(l: &FiniteLattice, n: usize, budget: u64) -> Result<PropositionReport, NationError> {
    let trace = if n == 0 { None } else { Some(scripted_derivation_up_to(n, n.max(MAX_SCRIPTED_N))?) };
    verify_with(l, "L", n, budget, trace.as_ref())
}

fn verify_with(
    l: &FiniteLattice,
    name: &str,
    n: usize,
    budget: u64,
    trace: Option<&DerivationTrace>,
) -> Result<PropositionReport, NationError> {
    let mut notice = None;
    let validity = match valid_inequality(l, &t_term(n), &s_term(n), budget) {
        Ok(v) => Some(v),
        Err(TermError::BudgetExceeded { required, budget }) => {
            notice = Some(format!("validity skipped: {required} assignments exceed budget {budget}"));
            None
        }
        Err(e) => return Err(e.into()),
    };
    let no_chain = !dgraph(l, Variant::Dplus).has_chain(n);
    let mut steps_checked = 0;
    let mut step_failure = None;
    if let Some(trace) = trace {
        let model = lattice_model(l, name);
        let systems: Vec<&QuasiInequality> = trace.systems().collect();
        for (k, pair) in systems.windows(2).enumerate() {
            match equivalent_on(&model, pair[0], pair[1], Granularity::Validity, DEFAULT_SEARCH_BUDGET) {
                Ok(None) => steps_checked += 1,
                Ok(Some(cex)) => {
                    step_failure = Some(StepFailure { step: k + 1, detail: cex.to_string() });
                    break;
                }
                Err(e) => {
                    step_failure = Some(StepFailure { step: k + 1, detail: e.to_string() });
                    break;
                }
            }
        }
    }
    Ok(PropositionReport { lattice: name.to_string(), size: l.size(), n, validity, no_chain, steps_checked, step_failure, notice })
}

/// Runs the check for every named lattice and every `n ≤ max_n`, in input order.
pub fn verify_catalog(
    lattices: &[(String, FiniteLattice)],
    max_n: usize,
    budget: u64,
    with_steps: bool,
) -> Result<Vec<PropositionReport>, NationError> {
    let traces: Vec<Option<DerivationTrace>> = (0..=max_n)
        .map(|n| if n == 0 || !with_steps { Ok(None) } else { scripted_derivation_up_to(n, max_n.max(MAX_SCRIPTED_N)).map(Some) })
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> = (0..lattices.len()).flat_map(|i| (0..=max_n).map(move |n| (i, n))).collect();
    jobs.par_iter()
        .map(|&(i, n)| verify_with(&lattices[i].1, &lattices[i].0, n, budget, traces[n].as_ref()))
        .collect()
}

/// Whether `E_L` validates a quasi-inequality with closed assignments.
pub fn holds_on_lattice(l: &FiniteLattice, q: &QuasiInequality) -> Result<bool, NationError> {
    Ok(holds(&lattice_model(l, "L"), q, DEFAULT_SEARCH_BUDGET)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;

    #[test]
    fn n5_edges() {
        let l = builtin("N5").unwrap();
        let g = dgraph(&l, Variant::Dplus);
        let idx = |s: &str| g.labels.iter().position(|x| x == s).unwrap();
        assert!(g.has_edge(idx("c"), idx("a")));
        assert!(!g.has_edge(idx("c"), idx("b")));
    }

    #[test]
    fn walks() {
        let b = dgraph(&builtin("boolean_2").unwrap(), Variant::Dplus);
        assert!(b.edges.is_empty());
        assert!(b.has_chain(0) && !b.has_chain(1));
        assert_eq!(b.max_finite_or_cyclic(), ChainBound::Finite(0));
        let one = dgraph(&FiniteLattice::chain(1).unwrap(), Variant::Dplus);
        assert!(!one.has_chain(0));
        assert_eq!(one.max_finite_or_cyclic(), ChainBound::Empty);
    }

    #[test]
    fn base_case_ends_in_ladder() {
        let t = scripted_derivation(1).unwrap();
        assert_eq!(t.last().system, pure_system(1).system);
        assert!(t.replay().is_ok());
    }

    #[test]
    fn deeper_derivations_end_in_ladders() {
        for n in 2..=3 {
            let t = scripted_derivation(n).unwrap();
            assert_eq!(t.last(), &pure_system(n), "n = {n}");
        }
        assert!(scripted_derivation(0).is_err());
    }

    #[test]
    fn small_lattices_agree() {
        for name in ["boolean_2", "N5", "M3", "chain_3"] {
            let l = builtin(name).unwrap();
            for n in 0..=2 {
                let r = verify_proposition(&l, n, 1 << 24).unwrap();
                assert!(r.passed(), "{name} n={n}: {r:?}");
            }
        }
    }

    #[test]
    fn ladder_translation() {
        let f = fo_translate(&pure_system(1)).unwrap();
        assert_eq!(f.description(), "no D⁺ edge");
        assert_eq!(fo_translate(&pure_system(3)).unwrap().length, 3);
        assert!(fo_translate(&initial_system(1)).is_err());
    }
}
