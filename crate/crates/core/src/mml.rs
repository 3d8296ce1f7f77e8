//! Monotone modal logic over neighbourhood frames, and the standard translation of lattice terms.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::OnceLock;

use thiserror::Error;

use crate::bitset::Set;
use crate::lattice::FiniteLattice;
use crate::presentation::{presentation_of, JoinPresentation};
use crate::term::{assignments, eval, Assignment, LatticeTerm, TermError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MmlError {
    #[error("star is only defined on monotone frames")]
    NotMonotone,
    #[error("proposition {0} has no value")]
    Unbound(String),
    #[error("{0} is not a join-irreducible element")]
    NotJoinIrreducible(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MmlFormula {
    Bot,
    Top,
    Prop(String),
    Neg(Box<MmlFormula>),
    Or(Box<MmlFormula>, Box<MmlFormula>),
    And(Box<MmlFormula>, Box<MmlFormula>),
    /// `(∃∀)φ`: some neighbourhood lies inside `φ`.
    BoxEf(Box<MmlFormula>),
    /// `(∀∃)φ`: every neighbourhood meets `φ`.
    DiaFe(Box<MmlFormula>),
}

impl MmlFormula {
    pub fn prop(p: &str) -> Self {
        MmlFormula::Prop(p.to_string())
    }
    pub fn neg(a: MmlFormula) -> Self {
        MmlFormula::Neg(Box::new(a))
    }
    pub fn or(a: MmlFormula, b: MmlFormula) -> Self {
        MmlFormula::Or(Box::new(a), Box::new(b))
    }
    pub fn and(a: MmlFormula, b: MmlFormula) -> Self {
        MmlFormula::And(Box::new(a), Box::new(b))
    }
    pub fn box_ef(a: MmlFormula) -> Self {
        MmlFormula::BoxEf(Box::new(a))
    }
    pub fn dia_fe(a: MmlFormula) -> Self {
        MmlFormula::DiaFe(Box::new(a))
    }

    pub fn depth(&self) -> usize {
        match self {
            MmlFormula::Bot | MmlFormula::Top | MmlFormula::Prop(_) => 0,
            MmlFormula::Neg(a) | MmlFormula::BoxEf(a) | MmlFormula::DiaFe(a) => 1 + a.depth(),
            MmlFormula::Or(a, b) | MmlFormula::And(a, b) => 1 + a.depth().max(b.depth()),
        }
    }

    /// True for formulas in the image fragment `⊥ | ⊤ | p | φ∧φ | (∃∀)(φ∨φ)`.
    pub fn in_translation_fragment(&self) -> bool {
        match self {
            MmlFormula::Bot | MmlFormula::Top | MmlFormula::Prop(_) => true,
            MmlFormula::And(a, b) => a.in_translation_fragment() && b.in_translation_fragment(),
            MmlFormula::BoxEf(inner) => match inner.as_ref() {
                MmlFormula::Or(a, b) => a.in_translation_fragment() && b.in_translation_fragment(),
                _ => false,
            },
            _ => false,
        }
    }
}

impl fmt::Display for MmlFormula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wrap = |f: &mut fmt::Formatter<'_>, a: &MmlFormula| match a {
            MmlFormula::Or(..) | MmlFormula::And(..) => write!(f, "({a})"),
            _ => write!(f, "{a}"),
        };
        match self {
            MmlFormula::Bot => write!(f, "bot"),
            MmlFormula::Top => write!(f, "top"),
            MmlFormula::Prop(p) => write!(f, "{p}"),
            MmlFormula::Neg(a) => {
                write!(f, "~")?;
                wrap(f, a)
            }
            MmlFormula::BoxEf(a) => {
                write!(f, "(EA)")?;
                wrap(f, a)
            }
            MmlFormula::DiaFe(a) => {
                write!(f, "(AE)")?;
                wrap(f, a)
            }
            MmlFormula::Or(a, b) => {
                wrap(f, a)?;
                write!(f, " \\/ ")?;
                wrap(f, b)
            }
            MmlFormula::And(a, b) => {
                wrap(f, a)?;
                write!(f, " /\\ ")?;
                wrap(f, b)
            }
        }
    }
}

/// A neighbourhood frame. For monotone frames only a generating family is stored
/// and `σ(x)` is its upward closure, expanded the first time it is needed.
#[derive(Debug, Clone)]
pub struct NeighbourhoodFrame {
    size: usize,
    generators: Vec<Vec<Set>>,
    monotone: bool,
    expanded: OnceLock<Vec<Vec<Set>>>,
}

impl PartialEq for NeighbourhoodFrame {
    /// Frames are equal when their neighbourhood functions agree extensionally.
    fn eq(&self, other: &Self) -> bool {
        self.size == other.size
            && (0..self.size).all(|x| {
                let mut a = self.sigma(x).to_vec();
                let mut b = other.sigma(x).to_vec();
                a.sort_unstable();
                b.sort_unstable();
                a == b
            })
    }
}

pub type Valuation = BTreeMap<String, Set>;

impl NeighbourhoodFrame {
    /// A frame whose `σ(x)` is exactly the given family.
    pub fn plain(sigma: Vec<Vec<Set>>) -> Self {
        let size = sigma.len();
        let sigma = sigma.into_iter().map(normalize).collect();
        NeighbourhoodFrame { size, generators: sigma, monotone: false, expanded: OnceLock::new() }
    }

    /// A monotone frame whose `σ(x)` is the upward closure of the given family.
    pub fn monotone(generators: Vec<Vec<Set>>) -> Self {
        let size = generators.len();
        let generators = generators.into_iter().map(minimal_members).collect();
        NeighbourhoodFrame { size, generators, monotone: true, expanded: OnceLock::new() }
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_monotone(&self) -> bool {
        self.monotone
    }

    /// True if every `σ(x)` is upward closed, whatever the representation.
    pub fn is_upward_closed(&self) -> bool {
        let all = Set::full(self.size);
        (0..self.size).all(|x| {
            let fam = self.sigma(x);
            fam.iter().all(|&c| all.minus(c).iter().all(|y| fam.contains(&c.with(y))))
        })
    }

    /// The family `σ(x)`, extensionally.
    pub fn sigma(&self, x: usize) -> &[Set] {
        if !self.monotone {
            return &self.generators[x];
        }
        let ext = self.expanded.get_or_init(|| {
            let all = Set::full(self.size);
            self.generators
                .iter()
                .map(|gens| {
                    let mut fam: Vec<Set> = all
                        .subsets()
                        .filter(|&s| gens.iter().any(|g| g.is_subset(s)))
                        .collect();
                    fam.sort_unstable();
                    fam
                })
                .collect()
        });
        &ext[x]
    }

    /// The `⊆`-minimal members of `σ(x)`.
    pub fn minimal_sigma(&self, x: usize) -> Vec<Set> {
        if self.monotone {
            self.generators[x].clone()
        } else {
            minimal_members(self.generators[x].clone())
        }
    }

    /// Truth set of `φ` under `v`.
    pub fn extension(&self, v: &Valuation, phi: &MmlFormula) -> Result<Set, MmlError> {
        let all = Set::full(self.size);
        Ok(match phi {
            MmlFormula::Bot => Set::EMPTY,
            MmlFormula::Top => all,
            MmlFormula::Prop(p) => v.get(p).copied().ok_or_else(|| MmlError::Unbound(p.clone()))?.inter(all),
            MmlFormula::Neg(a) => self.extension(v, a)?.complement(self.size),
            MmlFormula::Or(a, b) => self.extension(v, a)?.union(self.extension(v, b)?),
            MmlFormula::And(a, b) => self.extension(v, a)?.inter(self.extension(v, b)?),
            MmlFormula::BoxEf(a) => {
                let s = self.extension(v, a)?;
                (0..self.size).filter(|&x| self.sigma(x).iter().any(|c| c.is_subset(s))).collect()
            }
            MmlFormula::DiaFe(a) => {
                let s = self.extension(v, a)?;
                (0..self.size).filter(|&x| self.sigma(x).iter().all(|c| c.intersects(s))).collect()
            }
        })
    }

    pub fn satisfies(&self, v: &Valuation, w: usize, phi: &MmlFormula) -> Result<bool, MmlError> {
        Ok(self.extension(v, phi)?.contains(w))
    }

    /// Keeps only the `⊆`-minimal neighbourhoods of a monotone frame.
    pub fn star(&self) -> Result<NeighbourhoodFrame, MmlError> {
        if !self.monotone && !self.is_upward_closed() {
            return Err(MmlError::NotMonotone);
        }
        Ok(NeighbourhoodFrame::plain((0..self.size).map(|x| self.minimal_sigma(x)).collect()))
    }

    /// Replaces every `σ(x)` by its upward closure.
    pub fn prime(&self) -> NeighbourhoodFrame {
        NeighbourhoodFrame::monotone(self.generators.clone())
    }
}

fn normalize(mut fam: Vec<Set>) -> Vec<Set> {
    fam.sort_unstable();
    fam.dedup();
    fam
}

fn minimal_members(fam: Vec<Set>) -> Vec<Set> {
    let fam = normalize(fam);
    fam.iter()
        .copied()
        .filter(|&c| !fam.iter().any(|&d| d != c && d.is_subset(c)))
        .collect()
}

/// `F_L`: the monotone frame on `J(L)` with `min σ(j) = M(j)`.
pub fn frame_of_lattice(p: &JoinPresentation) -> NeighbourhoodFrame {
    NeighbourhoodFrame::monotone((0..p.size()).map(|x| p.covers(x).to_vec()).collect())
}

/// `ST(p) = p`, `ST(⊤) = ⊤`, `ST(⊥) = ⊥`, `ST(t∧s) = ST(t)∧ST(s)`, `ST(t∨s) = (∃∀)(ST(t)∨ST(s))`.
pub fn standard_translation(t: &LatticeTerm) -> MmlFormula {
    match t {
        LatticeTerm::Bot => MmlFormula::Bot,
        LatticeTerm::Top => MmlFormula::Top,
        LatticeTerm::Var(p) | LatticeTerm::Nom(p) => MmlFormula::Prop(p.clone()),
        LatticeTerm::Meet(a, b) => MmlFormula::and(standard_translation(a), standard_translation(b)),
        LatticeTerm::Join(a, b) => MmlFormula::box_ef(MmlFormula::or(standard_translation(a), standard_translation(b))),
    }
}

/// A valuation sending every variable to a closed downset of the presentation.
pub type ClosedValuation = Valuation;

/// All closed valuations of the given variables.
pub fn closed_valuations(p: &JoinPresentation, vars: &[String]) -> Vec<ClosedValuation> {
    let closed = p.closed_sets();
    let total = closed.len().pow(vars.len() as u32);
    (0..total)
        .map(|mut k| {
            vars.iter()
                .map(|x| {
                    let s = closed[k % closed.len()];
                    k /= closed.len();
                    (x.clone(), s)
                })
                .collect()
        })
        .collect()
}

/// `v*(x) = {j ∈ J(L) | j ≤ v(x)}`, as point sets of `presentation_of(L)`.
pub fn vstar(l: &FiniteLattice, p: &JoinPresentation, v: &Assignment) -> ClosedValuation {
    let origin = p.origin().expect("presentation built from a lattice");
    v.iter()
        .map(|(x, &a)| (x.clone(), (0..p.size()).filter(|&i| l.leq(origin[i], a)).collect()))
        .collect()
}

/// `u′(x) = ⋁ u(x)`.
pub fn uprime(l: &FiniteLattice, p: &JoinPresentation, u: &ClosedValuation) -> Assignment {
    let origin = p.origin().expect("presentation built from a lattice");
    u.iter()
        .map(|(x, s)| (x.clone(), l.join_set(s.iter().map(|i| origin[i]).collect())))
        .collect()
}

/// A lattice together with its presentation and `F_L`, for repeated checks.
pub struct LatticeFrame<'a> {
    pub lattice: &'a FiniteLattice,
    pub presentation: JoinPresentation,
    pub frame: NeighbourhoodFrame,
}

impl<'a> LatticeFrame<'a> {
    pub fn new(lattice: &'a FiniteLattice) -> Self {
        let presentation = presentation_of(lattice);
        let frame = frame_of_lattice(&presentation);
        LatticeFrame { lattice, presentation, frame }
    }

    fn point_of(&self, j: usize) -> Result<usize, MmlError> {
        let origin = self.presentation.origin().expect("from lattice");
        origin
            .iter()
            .position(|&o| o == j)
            .ok_or_else(|| MmlError::NotJoinIrreducible(self.lattice.label(j).to_string()))
    }

    /// `(L,v ⊨ j ≤ t, F_L,v*,j ⊩ ST(t))`.
    pub fn local_satisfaction(&self, t: &LatticeTerm, j: usize, v: &Assignment) -> Result<(bool, bool), MmlError> {
        let point = self.point_of(j)?;
        let algebraic = self.lattice.leq(j, eval(self.lattice, t, v)?);
        let u = vstar(self.lattice, &self.presentation, v);
        let frame = self.frame.satisfies(&u, point, &standard_translation(t))?;
        Ok((algebraic, frame))
    }

    /// `(L ⊨ lhs ≤ rhs, F_L ⊩ ST(lhs) ≤ ST(rhs))`, the latter over closed valuations.
    pub fn corollary(&self, lhs: &LatticeTerm, rhs: &LatticeTerm, budget: u64) -> Result<(bool, bool), MmlError> {
        let algebraic = crate::term::valid_inequality(self.lattice, lhs, rhs, budget)?;
        let mut vars: Vec<String> = lhs.variables().into_iter().chain(rhs.variables()).map(|(v, _)| v).collect();
        vars.sort();
        vars.dedup();
        let (sl, sr) = (standard_translation(lhs), standard_translation(rhs));
        let mut frame = true;
        for u in closed_valuations(&self.presentation, &vars) {
            if !self.frame.extension(&u, &sl)?.is_subset(self.frame.extension(&u, &sr)?) {
                frame = false;
                break;
            }
        }
        Ok((algebraic, frame))
    }
}

/// Both sides of the local-satisfaction equivalence for one lattice, term, point and assignment.
pub fn check_local_satisfaction(l: &FiniteLattice, t: &LatticeTerm, j: usize, v: &Assignment) -> Result<(bool, bool), MmlError> {
    LatticeFrame::new(l).local_satisfaction(t, j, v)
}

/// Both sides of the lattice/frame validity equivalence for `lhs ≤ rhs`.
pub fn check_corollary(l: &FiniteLattice, lhs: &LatticeTerm, rhs: &LatticeTerm, budget: u64) -> Result<(bool, bool), MmlError> {
    LatticeFrame::new(l).corollary(lhs, rhs, budget)
}

/// Every assignment of the listed propositional variables.
pub fn all_assignments(l: &FiniteLattice, vars: &[String]) -> Vec<Assignment> {
    let vars: Vec<(String, bool)> = vars.iter().map(|v| (v.clone(), false)).collect();
    assignments(l, &vars).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::builtin;
    use crate::term::parse_term;

    #[test]
    fn satisfaction_clauses() {
        let phi = MmlFormula::prop("p");
        let v: Valuation = [("p".to_string(), Set::singleton(1))].into();
        let empty = NeighbourhoodFrame::plain(vec![vec![], vec![]]);
        assert!(empty.satisfies(&v, 0, &MmlFormula::dia_fe(MmlFormula::Bot)).unwrap());
        let with_empty = NeighbourhoodFrame::plain(vec![vec![Set::EMPTY], vec![]]);
        assert!(with_empty.satisfies(&v, 0, &MmlFormula::box_ef(MmlFormula::Bot)).unwrap());
        let f = NeighbourhoodFrame::plain(vec![vec![Set::singleton(1)], vec![]]);
        assert!(f.satisfies(&v, 0, &MmlFormula::box_ef(phi)).unwrap());
    }

    #[test]
    fn star_and_prime() {
        let a = Set::singleton(0);
        let m = NeighbourhoodFrame::monotone(vec![vec![a, Set::from_indices([0, 1])], vec![]]);
        assert_eq!(m.star().unwrap().sigma(0), [a]);
        assert_eq!(m.star().unwrap().prime(), m);
        let not_mono = NeighbourhoodFrame::plain(vec![vec![a], vec![]]);
        assert_eq!(not_mono.star().unwrap_err(), MmlError::NotMonotone);
    }

    #[test]
    fn frames_of_lattices() {
        let sq = builtin("boolean_2").unwrap();
        let f = frame_of_lattice(&presentation_of(&sq));
        assert_eq!(f.minimal_sigma(0), vec![Set::singleton(0)]);
        assert_eq!(f.minimal_sigma(1), vec![Set::singleton(1)]);
        let n5 = builtin("N5").unwrap();
        let p = presentation_of(&n5);
        let f = frame_of_lattice(&p);
        let c = p.index_of("c").unwrap();
        assert_eq!(f.minimal_sigma(c), vec![Set::from_indices([0, 1]), Set::singleton(c)]);
    }

    #[test]
    fn translation_examples() {
        let st = |s: &str| standard_translation(&parse_term(s).unwrap());
        assert_eq!(st("p"), MmlFormula::prop("p"));
        assert_eq!(st("p \\/ q"), MmlFormula::box_ef(MmlFormula::or(MmlFormula::prop("p"), MmlFormula::prop("q"))));
        assert_eq!(
            st("(p \\/ q) /\\ r"),
            MmlFormula::and(MmlFormula::box_ef(MmlFormula::or(MmlFormula::prop("p"), MmlFormula::prop("q"))), MmlFormula::prop("r"))
        );
        assert!(st("x1 /\\ (y1 \\/ (x1 /\\ x0) \\/ bot)").in_translation_fragment());
    }

    #[test]
    fn n5_local_satisfaction() {
        let n5 = builtin("N5").unwrap();
        let t = parse_term("a \\/ b").unwrap();
        let c = n5.index_of("c").unwrap();
        let v: Assignment = [("a".to_string(), n5.index_of("a").unwrap()), ("b".to_string(), n5.index_of("b").unwrap())].into();
        assert_eq!(check_local_satisfaction(&n5, &t, c, &v).unwrap(), (true, true));
    }

    #[test]
    fn valuation_round_trip() {
        let n5 = builtin("N5").unwrap();
        let p = presentation_of(&n5);
        let vars = vec!["x".to_string()];
        assert_eq!(closed_valuations(&p, &vars).len(), n5.size());
        for v in all_assignments(&n5, &vars) {
            let u = vstar(&n5, &p, &v);
            assert_eq!(uprime(&n5, &p, &u), v);
        }
        let bot: Assignment = [("x".to_string(), n5.bottom())].into();
        assert_eq!(vstar(&n5, &p, &bot)["x"], Set::EMPTY);
    }
}
