//! Finite two-sorted frames (optionally enriched with `R_XX`), the frame of a
//! join-presentation, and evaluation of terms and quasi-inequalities.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::bitset::{Set, MAX_CARRIER};
use crate::lplus::{Inequality, LPlusError, Modality, QuasiInequality, Rel, Sort, Term, VarKind};
use crate::presentation::JoinPresentation;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FrameError {
    #[error("relation pair ({0}, {1}) outside the carriers")]
    OutOfRange(usize, usize),
    #[error("carrier larger than {MAX_CARRIER}")]
    TooLarge,
    #[error("term uses R_XX on a frame without it")]
    NotEnriched,
    #[error("unassigned variable {0}")]
    Unassigned(String),
    #[error("metavariable ?{0} cannot be evaluated")]
    Meta(String),
    #[error("enumeration budget exceeded: {0} assignments")]
    BudgetExceeded(u64),
    #[error("model family: {0}")]
    Family(String),
    #[error(transparent)]
    Term(#[from] LPlusError),
}

/// `X`, `Y`, `R_XY`, `R_YX` and optionally `R_XX`, stored as successor sets for
/// each of the six relations and their inverses.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoSortedFrame {
    nx: usize,
    ny: usize,
    succ: [Vec<Set>; 6],
    enriched: bool,
    pub x_labels: Vec<String>,
    pub y_labels: Vec<String>,
}

fn rel_index(r: Rel) -> usize {
    Rel::ALL.iter().position(|&q| q == r).expect("listed")
}

impl TwoSortedFrame {
    /// Builds a frame from relation pairs. `xx = None` gives a frame without `R_XX`.
    pub fn new(
        nx: usize,
        ny: usize,
        xy: &[(usize, usize)],
        yx: &[(usize, usize)],
        xx: Option<&[(usize, usize)]>,
    ) -> Result<TwoSortedFrame, FrameError> {
        if nx > MAX_CARRIER || ny > MAX_CARRIER {
            return Err(FrameError::TooLarge);
        }
        let mut succ: [Vec<Set>; 6] = Default::default();
        succ[0] = vec![Set::EMPTY; nx];
        succ[1] = vec![Set::EMPTY; ny];
        succ[2] = vec![Set::EMPTY; nx];
        succ[3] = vec![Set::EMPTY; ny];
        succ[4] = vec![Set::EMPTY; nx];
        succ[5] = vec![Set::EMPTY; nx];
        for &(a, b) in xy {
            if a >= nx || b >= ny {
                return Err(FrameError::OutOfRange(a, b));
            }
            succ[0][a].insert(b);
            succ[3][b].insert(a);
        }
        for &(a, b) in yx {
            if a >= ny || b >= nx {
                return Err(FrameError::OutOfRange(a, b));
            }
            succ[1][a].insert(b);
            succ[4][b].insert(a);
        }
        if let Some(xx) = xx {
            for &(a, b) in xx {
                if a >= nx || b >= nx {
                    return Err(FrameError::OutOfRange(a, b));
                }
                succ[2][a].insert(b);
                succ[5][b].insert(a);
            }
        }
        Ok(TwoSortedFrame {
            nx,
            ny,
            succ,
            enriched: xx.is_some(),
            x_labels: (0..nx).map(|i| format!("x{i}")).collect(),
            y_labels: (0..ny).map(|i| format!("y{i}")).collect(),
        })
    }

    /// Builds a frame directly from successor sets of `R_XY`, `R_YX` and optionally `R_XX`.
    pub fn from_successors(xy: Vec<Set>, yx: Vec<Set>, xx: Option<Vec<Set>>) -> TwoSortedFrame {
        let (nx, ny) = (xy.len(), yx.len());
        let inverse = |succ: &[Set], n: usize| -> Vec<Set> {
            (0..n).map(|b| (0..succ.len()).filter(|&a| succ[a].contains(b)).collect()).collect()
        };
        let enriched = xx.is_some();
        let xx = xx.unwrap_or_else(|| vec![Set::EMPTY; nx]);
        let succ = [
            xy.clone(),
            yx.clone(),
            xx.clone(),
            inverse(&xy, ny),
            inverse(&yx, nx),
            inverse(&xx, nx),
        ];
        TwoSortedFrame {
            nx,
            ny,
            succ,
            enriched,
            x_labels: (0..nx).map(|i| format!("x{i}")).collect(),
            y_labels: (0..ny).map(|i| format!("y{i}")).collect(),
        }
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn carrier(&self, s: Sort) -> usize {
        match s {
            Sort::X => self.nx,
            Sort::Y => self.ny,
        }
    }

    pub fn is_enriched(&self) -> bool {
        self.enriched
    }

    /// Successors of `a` along `r`.
    pub fn succ(&self, r: Rel, a: usize) -> Set {
        self.succ[rel_index(r)][a]
    }

    pub fn related(&self, r: Rel, a: usize, b: usize) -> bool {
        self.succ(r, a).contains(b)
    }

    /// Pairs of `r`, in lexicographic order.
    pub fn pairs(&self, r: Rel) -> Vec<(usize, usize)> {
        self.succ[rel_index(r)].iter().enumerate().flat_map(|(a, s)| s.iter().map(move |b| (a, b))).collect()
    }

    /// `⟨R⟩T = {a | succ(a) ∩ T ≠ ∅}`.
    pub fn dia(&self, r: Rel, t: Set) -> Set {
        self.succ[rel_index(r)].iter().enumerate().filter(|(_, s)| s.intersects(t)).map(|(a, _)| a).collect()
    }

    /// `[R]T = {a | succ(a) ⊆ T}`.
    pub fn boxed(&self, r: Rel, t: Set) -> Set {
        self.succ[rel_index(r)].iter().enumerate().filter(|(_, s)| s.is_subset(t)).map(|(a, _)| a).collect()
    }

    /// True if `R_XX` is reflexive, antisymmetric and transitive.
    pub fn is_ordered(&self) -> bool {
        if !self.enriched {
            return false;
        }
        let xx = &self.succ[2];
        (0..self.nx).all(|a| {
            xx[a].contains(a)
                && xx[a].iter().all(|b| (b == a || !xx[b].contains(a)) && xx[b].is_subset(xx[a]))
        })
    }

    /// Downsets of `R_XX` read as `x ≤ x'` for `x R_XX x'`.
    pub fn is_downset(&self, s: Set) -> bool {
        self.dia(Rel::XX, s).is_subset(s)
    }

    /// `cl(S) = ⟨XY⟩[YX]⟨XX⟩S`.
    pub fn cl(&self, s: Set) -> Set {
        self.dia(Rel::XY, self.boxed(Rel::YX, self.dia(Rel::XX, s)))
    }

    /// Sets fixed by `cl`.
    pub fn closed_sets(&self) -> Vec<Set> {
        Set::full(self.nx).subsets().filter(|&s| self.cl(s) == s).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// `R_XX` downsets.
    pub fn downsets(&self) -> Vec<Set> {
        Set::full(self.nx).subsets().filter(|&s| self.is_downset(s)).collect::<BTreeSet<_>>().into_iter().collect()
    }

    /// Checks the clauses of a direct enriched frame: ordered, minimal, monotone, reflexive, transitive.
    pub fn directness(&self) -> Directness {
        let ordered = self.is_ordered();
        let leq = |a: usize, b: usize| self.related(Rel::XX, a, b);
        let refines = |a: Set, b: Set| a.iter().all(|x| b.iter().any(|y| leq(x, y)));
        let members = |y: usize| self.succ(Rel::YX, y);
        let antichain = |s: Set| s.iter().all(|a| s.iter().all(|b| a == b || !leq(a, b)));
        let minimal = ordered
            && (0..self.nx).all(|x| {
                let ys: Vec<usize> = self.succ(Rel::XY, x).iter().collect();
                ys.iter().all(|&y| antichain(members(y)))
                    && ys.iter().all(|&y| {
                        ys.iter().all(|&z| y == z || members(y) == members(z) || !refines(members(y), members(z)))
                    })
            });
        let monotone = (0..self.nx).all(|x| {
            (0..self.nx).filter(|&x2| leq(x2, x)).all(|x2| {
                self.succ(Rel::XY, x)
                    .iter()
                    .all(|y| self.succ(Rel::XY, x2).iter().any(|y2| refines(members(y2), members(y))))
            })
        });
        let reflexive = (0..self.nx)
            .all(|x| self.succ(Rel::XY, x).iter().any(|y| refines(members(y), Set::singleton(x))));
        let transitive = (0..self.nx).all(|x| {
            self.succ(Rel::XY, x).iter().all(|y| {
                // every choice of one neighbourhood per member of y
                let pts: Vec<usize> = members(y).iter().collect();
                let mut ok = true;
                choose(&pts, 0, Set::EMPTY, &|x2| self.succ(Rel::XY, x2).iter().map(members).collect(), &mut |u| {
                    if !self.succ(Rel::XY, x).iter().any(|y2| refines(members(y2), u)) {
                        ok = false;
                    }
                });
                ok
            })
        });
        Directness { ordered, minimal, monotone, reflexive, transitive }
    }

    /// The relation of the neighbourhood `σ(x)` read off `R_XY` and `R_YX`: `min σ(x) = {R_YX[y] | x R_XY y}`.
    pub fn neighbourhoods(&self, x: usize) -> Vec<Set> {
        self.succ(Rel::XY, x).iter().map(|y| self.succ(Rel::YX, y)).collect()
    }

    /// Assignment of a single variable, checked against its kind.
    pub fn value_ok(&self, kind: VarKind, v: Set) -> bool {
        let n = self.carrier(kind.sort());
        match kind {
            VarKind::Prop(_) => v.is_subset(Set::full(n)),
            VarKind::Nom(_) => v.len() == 1 && v.is_subset(Set::full(n)),
            VarKind::Conom(_) => v.len() + 1 == n && v.is_subset(Set::full(n)),
        }
    }

    /// Value of a term under an assignment of its variables.
    pub fn eval(&self, v: &BTreeMap<String, Set>, t: &Term, sort: Sort) -> Result<Set, FrameError> {
        let code = compile(t, sort, &|n: &str| v.keys().position(|k| k == n))?;
        if code.needs_enriched && !self.enriched {
            return Err(FrameError::NotEnriched);
        }
        let vals: Vec<Set> = v.values().copied().collect();
        Ok(code.run(self, &vals))
    }
}

fn choose(
    pts: &[usize],
    i: usize,
    acc: Set,
    options: &dyn Fn(usize) -> Vec<Set>,
    f: &mut dyn FnMut(Set),
) {
    if i == pts.len() {
        f(acc);
        return;
    }
    for o in options(pts[i]) {
        choose(pts, i + 1, acc.union(o), options, f);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Directness {
    pub ordered: bool,
    pub minimal: bool,
    pub monotone: bool,
    pub reflexive: bool,
    pub transitive: bool,
}

impl Directness {
    pub fn direct(&self) -> bool {
        self.ordered && self.minimal && self.monotone && self.reflexive && self.transitive
    }
}

/// Which subsets of `Y` make up the second carrier of `E_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum YMode {
    #[default]
    Powerset,
    Antichains,
}

/// `E_L`: `X = J(L)`, `Y` per mode, `R_XY` = minimal covers, `R_YX = ∋`, `R_XX = ≤_J`.
pub fn enriched_frame_of(p: &JoinPresentation, mode: YMode) -> TwoSortedFrame {
    let nx = p.size();
    let ys: Vec<Set> = match mode {
        YMode::Powerset => Set::full(nx).subsets().collect::<BTreeSet<_>>().into_iter().collect(),
        YMode::Antichains => Set::full(nx)
            .subsets()
            .filter(|&s| p.is_antichain(s))
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect(),
    };
    let yi = |s: Set| ys.iter().position(|&t| t == s).expect("covers are antichains");
    let xy: Vec<Set> = (0..nx).map(|x| p.covers(x).iter().map(|&c| yi(c)).collect()).collect();
    let yx: Vec<Set> = ys.clone();
    let xx: Vec<Set> = (0..nx).map(|a| (0..nx).filter(|&b| p.leq(a, b)).collect()).collect();
    let mut f = TwoSortedFrame::from_successors(xy, yx, Some(xx));
    f.x_labels = p.labels().to_vec();
    f.y_labels = ys.iter().map(|&s| p.show_set(s)).collect();
    f
}

/// Postfix code for a term at a fixed sort.
#[derive(Debug, Clone)]
pub struct Code {
    ops: Vec<Op>,
    pub slots: Set,
    pub needs_enriched: bool,
}

#[derive(Debug, Clone, Copy)]
enum Op {
    Const(bool, Sort),
    Slot(usize),
    Complement(Sort),
    And,
    Or,
    Minus,
    Implies(Sort),
    Dia(Rel),
    Box(Rel),
}

/// Compiles a term; `slot` maps variable names to assignment slots.
pub fn compile(t: &Term, sort: Sort, slot: &dyn Fn(&str) -> Option<usize>) -> Result<Code, FrameError> {
    let mut code = Code { ops: Vec::new(), slots: Set::EMPTY, needs_enriched: false };
    emit(t, sort, slot, &mut code)?;
    Ok(code)
}

fn emit(t: &Term, sort: Sort, slot: &dyn Fn(&str) -> Option<usize>, code: &mut Code) -> Result<(), FrameError> {
    match t {
        Term::Bot => code.ops.push(Op::Const(false, sort)),
        Term::Top => code.ops.push(Op::Const(true, sort)),
        Term::Meta(n) => return Err(FrameError::Meta(n.clone())),
        Term::Atom(n, k) => {
            if k.sort() != sort {
                return Err(LPlusError::Sort(format!("{n} used at sort {sort:?}")).into());
            }
            let s = slot(n).ok_or_else(|| FrameError::Unassigned(n.clone()))?;
            code.slots.insert(s);
            code.ops.push(Op::Slot(s));
        }
        Term::Kappa(a) | Term::Neg(a) => {
            emit(a, sort, slot, code)?;
            code.ops.push(Op::Complement(sort));
        }
        Term::And(a, b) | Term::Or(a, b) | Term::Minus(a, b) | Term::Implies(a, b) => {
            emit(a, sort, slot, code)?;
            emit(b, sort, slot, code)?;
            code.ops.push(match t {
                Term::And(..) => Op::And,
                Term::Or(..) => Op::Or,
                Term::Minus(..) => Op::Minus,
                _ => Op::Implies(sort),
            });
        }
        Term::Modal(r, m, a) => {
            if r.result_sort() != sort {
                return Err(LPlusError::Sort(format!("{t} used at sort {sort:?}")).into());
            }
            if r.is_enriched() {
                code.needs_enriched = true;
            }
            emit(a, r.arg_sort(), slot, code)?;
            code.ops.push(match m {
                Modality::Dia => Op::Dia(*r),
                Modality::Box => Op::Box(*r),
            });
        }
    }
    Ok(())
}

impl Code {
    pub fn run(&self, f: &TwoSortedFrame, vals: &[Set]) -> Set {
        let mut stack: Vec<Set> = Vec::with_capacity(8);
        for op in &self.ops {
            match *op {
                Op::Const(b, s) => stack.push(if b { Set::full(f.carrier(s)) } else { Set::EMPTY }),
                Op::Slot(i) => stack.push(vals[i]),
                Op::Complement(s) => {
                    let a = stack.pop().expect("operand");
                    stack.push(a.complement(f.carrier(s)));
                }
                Op::And | Op::Or | Op::Minus | Op::Implies(_) => {
                    let b = stack.pop().expect("operand");
                    let a = stack.pop().expect("operand");
                    stack.push(match *op {
                        Op::And => a.inter(b),
                        Op::Or => a.union(b),
                        Op::Minus => a.minus(b),
                        Op::Implies(s) => a.complement(f.carrier(s)).union(b),
                        _ => unreachable!(),
                    });
                }
                Op::Dia(r) => {
                    let a = stack.pop().expect("operand");
                    stack.push(f.dia(r, a));
                }
                Op::Box(r) => {
                    let a = stack.pop().expect("operand");
                    stack.push(f.boxed(r, a));
                }
            }
        }
        stack.pop().expect("result")
    }
}

/// How propositional variables of sort X range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ValuationMode {
    /// Every subset.
    Arbitrary,
    /// Downsets of `R_XX`.
    Downset,
    /// Fixpoints of `cl`.
    Closed,
}

/// A frame with a valuation mode.
#[derive(Debug, Clone)]
pub struct Model {
    pub frame: TwoSortedFrame,
    pub mode: ValuationMode,
    pub name: String,
}

impl Model {
    pub fn new(frame: TwoSortedFrame, mode: ValuationMode, name: impl Into<String>) -> Model {
        Model { frame, mode, name: name.into() }
    }

    /// Values a variable of the given kind may take.
    pub fn domain(&self, kind: VarKind) -> Vec<Set> {
        let n = self.frame.carrier(kind.sort());
        let all = Set::full(n);
        match kind {
            VarKind::Nom(_) => (0..n).map(Set::singleton).collect(),
            VarKind::Conom(_) => (0..n).map(|i| all.without(i)).collect(),
            VarKind::Prop(Sort::Y) => all.subsets().collect::<BTreeSet<_>>().into_iter().collect(),
            VarKind::Prop(Sort::X) => match self.mode {
                ValuationMode::Arbitrary => all.subsets().collect::<BTreeSet<_>>().into_iter().collect(),
                ValuationMode::Downset => self.frame.downsets(),
                ValuationMode::Closed => self.frame.closed_sets(),
            },
        }
    }
}

/// A compiled quasi-inequality ready for repeated assignment search on one model.
pub struct Search<'a> {
    model: &'a Model,
    names: Vec<String>,
    domains: Vec<Vec<Set>>,
    order: Vec<usize>,
    /// Inequalities checkable once the first `k+1` variables of `order` are set.
    checks: Vec<Vec<(Code, Code)>>,
    budget: u64,
    vacuous: bool,
}

pub type Witness = BTreeMap<String, Set>;

impl<'a> Search<'a> {
    pub fn new(model: &'a Model, q: &QuasiInequality, budget: u64) -> Result<Search<'a>, FrameError> {
        // Variables bound but unused only matter through the emptiness of their domains.
        let used = q.used();
        let vacuous = q.prefix.iter().any(|(n, &k)| !used.contains_key(n) && model.domain(k).is_empty());
        let names: Vec<String> = q.prefix.keys().filter(|n| used.contains_key(*n)).cloned().collect();
        let domains: Vec<Vec<Set>> = names.iter().map(|n| model.domain(q.prefix[n])).collect();
        let slot = |n: &str| names.iter().position(|m| m == n);
        let mut compiled = Vec::new();
        for ineq in &q.system {
            let (l, r) = compile_ineq(ineq, &slot)?;
            if (l.needs_enriched || r.needs_enriched) && !model.frame.is_enriched() {
                return Err(FrameError::NotEnriched);
            }
            compiled.push((l, r));
        }
        // Greedy order: prefer variables that complete many inequalities, then small domains.
        let mut order: Vec<usize> = Vec::new();
        let mut placed = Set::EMPTY;
        while order.len() < names.len() {
            let best = (0..names.len())
                .filter(|&i| !placed.contains(i))
                .max_by_key(|&i| {
                    let with = placed.with(i);
                    let done = compiled
                        .iter()
                        .filter(|(l, r)| {
                            let s = l.slots.union(r.slots);
                            s.is_subset(with) && !s.is_subset(placed)
                        })
                        .count();
                    (done, std::cmp::Reverse(domains[i].len()), std::cmp::Reverse(i))
                })
                .expect("remaining variable");
            order.push(best);
            placed.insert(best);
        }
        let mut checks: Vec<Vec<(Code, Code)>> = vec![Vec::new(); names.len().max(1)];
        let position = |s: usize| order.iter().position(|&o| o == s).expect("ordered");
        for (l, r) in compiled {
            let slots = l.slots.union(r.slots);
            let level = slots.iter().map(position).max().unwrap_or(0);
            checks[level].push((l, r));
        }
        Ok(Search { model, names, domains, order, checks, budget, vacuous })
    }

    fn check_level(&self, level: usize, vals: &[Set]) -> bool {
        self.checks[level].iter().all(|(l, r)| l.run(&self.model.frame, vals).is_subset(r.run(&self.model.frame, vals)))
    }

    /// Visits every assignment satisfying the whole system; `f` returns false to stop.
    pub fn for_each(&self, f: &mut dyn FnMut(&[Set]) -> bool) -> Result<(), FrameError> {
        let mut vals = vec![Set::EMPTY; self.names.len()];
        let mut visited = 0u64;
        if self.vacuous {
            return Ok(());
        }
        if self.names.is_empty() {
            if self.check_level(0, &vals) {
                f(&vals);
            }
            return Ok(());
        }
        if self.domains.iter().any(|d| d.is_empty()) {
            return Ok(());
        }
        self.rec(0, &mut vals, &mut visited, f).map(|_| ())
    }

    fn rec(&self, depth: usize, vals: &mut Vec<Set>, visited: &mut u64, f: &mut dyn FnMut(&[Set]) -> bool) -> Result<bool, FrameError> {
        let var = self.order[depth];
        for &v in &self.domains[var] {
            *visited += 1;
            if *visited > self.budget {
                return Err(FrameError::BudgetExceeded(self.budget));
            }
            vals[var] = v;
            if !self.check_level(depth, vals) {
                continue;
            }
            if depth + 1 == self.order.len() {
                if !f(vals) {
                    return Ok(false);
                }
            } else if !self.rec(depth + 1, vals, visited, f)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// A satisfying assignment of the whole system, if any.
    pub fn witness(&self) -> Result<Option<Witness>, FrameError> {
        let mut found = None;
        self.for_each(&mut |vals| {
            found = Some(self.names.iter().cloned().zip(vals.iter().copied()).collect());
            false
        })?;
        Ok(found)
    }

    /// Names of the variables the search assigns (those occurring in the system).
    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Projections of all satisfying assignments onto the named variables, which must occur
    /// in the system.
    pub fn projections(&self, onto: &[String]) -> Result<BTreeSet<Vec<Set>>, FrameError> {
        let idx: Vec<usize> = onto.iter().map(|n| self.names.iter().position(|m| m == n).expect("shared variable")).collect();
        let mut out = BTreeSet::new();
        self.for_each(&mut |vals| {
            out.insert(idx.iter().map(|&i| vals[i]).collect());
            true
        })?;
        Ok(out)
    }
}

fn compile_ineq(ineq: &Inequality, slot: &dyn Fn(&str) -> Option<usize>) -> Result<(Code, Code), FrameError> {
    Ok((compile(&ineq.lhs, ineq.sort, slot)?, compile(&ineq.rhs, ineq.sort, slot)?))
}

/// Default budget on visited partial assignments.
pub const DEFAULT_SEARCH_BUDGET: u64 = 10_000_000;

/// `Q` holds on the model iff no assignment satisfies every inequality of its system.
pub fn holds(model: &Model, q: &QuasiInequality, budget: u64) -> Result<bool, FrameError> {
    Ok(satisfiable_assignment(model, q, budget)?.is_none())
}

/// An assignment (respecting the prefix kinds and the model's mode) satisfying the whole system.
pub fn satisfiable_assignment(model: &Model, q: &QuasiInequality, budget: u64) -> Result<Option<Witness>, FrameError> {
    Search::new(model, q, budget)?.witness()
}

/// Every two-sorted frame with the given carrier sizes. With `xx`, `R_XX` ranges over
/// the given list of relations (as successor sets).
pub fn all_frames(nx: usize, ny: usize, relations: &BTreeSet<Rel>, xx_choices: Option<&[Vec<Set>]>) -> Vec<TwoSortedFrame> {
    let uses_xy = relations.contains(&Rel::XY) || relations.contains(&Rel::XYInv);
    let uses_yx = relations.contains(&Rel::YX) || relations.contains(&Rel::YXInv);
    let rels = |n_from: usize, n_to: usize, used: bool| -> Vec<Vec<Set>> {
        if !used {
            return vec![vec![Set::EMPTY; n_from]];
        }
        let bits = n_from * n_to;
        (0u64..1 << bits)
            .map(|m| (0..n_from).map(|a| (0..n_to).filter(|&b| m >> (a * n_to + b) & 1 == 1).collect()).collect())
            .collect()
    };
    let xys = rels(nx, ny, uses_xy);
    let yxs = rels(ny, nx, uses_yx);
    let mut out = Vec::new();
    for xy in &xys {
        for yx in &yxs {
            match xx_choices {
                None => out.push(TwoSortedFrame::from_successors(xy.clone(), yx.clone(), None)),
                Some(choices) => {
                    for xx in choices {
                        out.push(TwoSortedFrame::from_successors(xy.clone(), yx.clone(), Some(xx.clone())));
                    }
                }
            }
        }
    }
    out
}

/// All relations on `n` points, as successor sets.
pub fn all_relations(n: usize) -> Vec<Vec<Set>> {
    (0u64..1 << (n * n)).map(|m| (0..n).map(|a| (0..n).filter(|&b| m >> (a * n + b) & 1 == 1).collect()).collect()).collect()
}

/// All partial orders on `n` points, as successor (up-set) sets.
pub fn all_partial_orders(n: usize) -> Vec<Vec<Set>> {
    all_relations(n)
        .into_iter()
        .filter(|r| {
            (0..n).all(|a| {
                r[a].contains(a) && r[a].iter().all(|b| (b == a || !r[b].contains(a)) && r[b].is_subset(r[a]))
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::lplus::{parse_quasi, parse_term, Env};
    use crate::presentation::presentation_of;

    fn el(name: &str) -> (JoinPresentation, TwoSortedFrame) {
        let p = presentation_of(&builtin(name).unwrap());
        let f = enriched_frame_of(&p, YMode::Powerset);
        (p, f)
    }

    #[test]
    fn n5_frame() {
        let (p, f) = el("N5");
        let pairs: Vec<(String, String)> =
            f.pairs(Rel::XY).into_iter().map(|(x, y)| (f.x_labels[x].clone(), f.y_labels[y].clone())).collect();
        let expect = [("a", "{a}"), ("b", "{b}"), ("c", "{a,b}"), ("c", "{c}")];
        assert_eq!(pairs.len(), 4);
        for (x, y) in expect {
            assert!(pairs.contains(&(x.to_string(), y.to_string())), "{x} {y} in {pairs:?}");
        }
        assert!(f.directness().direct());
        let closed: Vec<Set> = p.closed_sets();
        assert_eq!(f.closed_sets(), {
            let mut c = closed.clone();
            c.sort();
            c
        });
        for s in Set::full(p.size()).subsets() {
            assert_eq!(f.cl(s), p.cl(s));
            assert_eq!(f.dia(Rel::XX, s), p.downset(s));
        }
    }

    #[test]
    fn kappa_is_complement() {
        let f = TwoSortedFrame::new(3, 1, &[], &[], None).unwrap();
        let env: Env = [("j".to_string(), VarKind::Nom(Sort::X))].into();
        let t = parse_term("kappa(j)", &env).unwrap();
        let v: BTreeMap<String, Set> = [("j".to_string(), Set::singleton(1))].into();
        assert_eq!(f.eval(&v, &t, Sort::X).unwrap(), Set::from_indices([0, 2]));
        let xx = parse_term("<XX>j", &env).unwrap();
        assert_eq!(f.eval(&v, &xx, Sort::X), Err(FrameError::NotEnriched));
    }

    #[test]
    fn holds_examples() {
        let (_, f) = el("boolean_2");
        let m = Model::new(f, ValuationMode::Closed, "2x2");
        let q = parse_quasi("forall . top <= bot => false").unwrap();
        assert!(holds(&m, &q, 1000).unwrap());
        let q = parse_quasi("forall j : nomX . j <= bot => false").unwrap();
        assert!(holds(&m, &q, 1000).unwrap());
        let q = parse_quasi("forall j : nomX . j <= top => false").unwrap();
        assert!(!holds(&m, &q, 1000).unwrap());
    }

    #[test]
    fn directness_for_small_lattices() {
        for l in crate::catalog::enumerate_lattices(6, true).unwrap() {
            let p = presentation_of(&l);
            for mode in [YMode::Powerset, YMode::Antichains] {
                assert!(enriched_frame_of(&p, mode).directness().direct());
            }
        }
    }

    #[test]
    fn partial_orders_on_three_points() {
        assert_eq!(all_partial_orders(3).len(), 19);
        assert_eq!(all_relations(2).len(), 16);
    }
}
