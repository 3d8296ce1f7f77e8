//! Finite bounded lattices given by their order matrix.

use std::fmt;

use thiserror::Error;

use crate::bitset::{Set, MAX_CARRIER};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("at most {MAX_CARRIER} elements are supported, got {0}")]
    TooLarge(usize),
    #[error("order matrix is not {0}x{0}")]
    Shape(usize),
    #[error("order is not reflexive at {0}")]
    NotReflexive(String),
    #[error("order is not antisymmetric: {0} and {1}")]
    NotAntisymmetric(String, String),
    #[error("order is not transitive: {0} <= {1} <= {2}")]
    NotTransitive(String, String, String),
    #[error("{0} and {1} have no least upper bound")]
    NoJoin(String, String),
    #[error("{0} and {1} have no greatest lower bound")]
    NoMeet(String, String),
    #[error("duplicate label {0}")]
    DuplicateLabel(String),
}

/// A finite bounded lattice with cached join and meet tables.
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteLattice {
    n: usize,
    labels: Vec<String>,
    /// `up[a]` = elements above or equal to `a`.
    up: Vec<Set>,
    /// `down[a]` = elements below or equal to `a`.
    down: Vec<Set>,
    join: Vec<usize>,
    meet: Vec<usize>,
    bottom: usize,
    top: usize,
}

/// A set of pairwise incomparable elements.
pub type Antichain = Set;

/// The minimal join-covers of one element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverFamily {
    pub owner: usize,
    pub covers: Vec<Antichain>,
}

impl FiniteLattice {
    /// Builds a lattice from a full order matrix, checking all lattice axioms.
    pub fn from_leq(leq: &[Vec<bool>], labels: Option<Vec<String>>) -> Result<Self, LatticeError> {
        let n = leq.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        if n > MAX_CARRIER {
            return Err(LatticeError::TooLarge(n));
        }
        if leq.iter().any(|r| r.len() != n) {
            return Err(LatticeError::Shape(n));
        }
        let labels = labels.unwrap_or_else(|| (0..n).map(|i| i.to_string()).collect());
        if labels.len() != n {
            return Err(LatticeError::Shape(n));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        let name = |i: usize| labels[i].clone();
        for a in 0..n {
            if !leq[a][a] {
                return Err(LatticeError::NotReflexive(name(a)));
            }
            for b in 0..n {
                if a != b && leq[a][b] && leq[b][a] {
                    return Err(LatticeError::NotAntisymmetric(name(a), name(b)));
                }
                for c in 0..n {
                    if leq[a][b] && leq[b][c] && !leq[a][c] {
                        return Err(LatticeError::NotTransitive(name(a), name(b), name(c)));
                    }
                }
            }
        }
        let mut up = vec![Set::EMPTY; n];
        let mut down = vec![Set::EMPTY; n];
        for a in 0..n {
            for b in 0..n {
                if leq[a][b] {
                    up[a].insert(b);
                    down[b].insert(a);
                }
            }
        }
        let mut join = vec![0; n * n];
        let mut meet = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let ub = up[a].inter(up[b]);
                let j = ub
                    .iter()
                    .find(|&c| ub.is_subset(up[c]))
                    .ok_or_else(|| LatticeError::NoJoin(name(a), name(b)))?;
                join[a * n + b] = j;
                let lb = down[a].inter(down[b]);
                let m = lb
                    .iter()
                    .find(|&c| lb.is_subset(down[c]))
                    .ok_or_else(|| LatticeError::NoMeet(name(a), name(b)))?;
                meet[a * n + b] = m;
            }
        }
        let bottom = (0..n).find(|&a| up[a] == Set::full(n)).expect("lattice has a bottom");
        let top = (0..n).find(|&a| down[a] == Set::full(n)).expect("lattice has a top");
        Ok(FiniteLattice { n, labels, up, down, join, meet, bottom, top })
    }

    /// Builds a lattice from Hasse pairs `(lower, upper)` by reflexive-transitive closure.
    pub fn from_covers(n: usize, covers: &[(usize, usize)], labels: Option<Vec<String>>) -> Result<Self, LatticeError> {
        let mut leq = vec![vec![false; n]; n];
        for (i, row) in leq.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(a, b) in covers {
            leq[a][b] = true;
        }
        for k in 0..n {
            for i in 0..n {
                if leq[i][k] {
                    for j in 0..n {
                        if leq[k][j] {
                            leq[i][j] = true;
                        }
                    }
                }
            }
        }
        Self::from_leq(&leq, labels)
    }

    /// The `k`-element chain `0 < 1 < ... < k-1`.
    pub fn chain(k: usize) -> Result<Self, LatticeError> {
        let covers: Vec<_> = (1..k).map(|i| (i - 1, i)).collect();
        Self::from_covers(k, &covers, None)
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.n
    }

    pub fn all(&self) -> Set {
        Set::full(self.n)
    }

    pub fn label(&self, a: usize) -> &str {
        &self.labels[a]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn relabel(mut self, labels: Vec<String>) -> Result<Self, LatticeError> {
        if labels.len() != self.n {
            return Err(LatticeError::Shape(self.n));
        }
        for (i, l) in labels.iter().enumerate() {
            if labels[..i].contains(l) {
                return Err(LatticeError::DuplicateLabel(l.clone()));
            }
        }
        self.labels = labels;
        Ok(self)
    }

    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.up[a].contains(b)
    }

    pub fn lt(&self, a: usize, b: usize) -> bool {
        a != b && self.leq(a, b)
    }

    pub fn leq_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.n).map(|a| (0..self.n).map(|b| self.leq(a, b)).collect()).collect()
    }

    pub fn up_set(&self, a: usize) -> Set {
        self.up[a]
    }

    pub fn down_set(&self, a: usize) -> Set {
        self.down[a]
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join[a * self.n + b]
    }

    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet[a * self.n + b]
    }

    /// Join of a set; the empty join is the bottom.
    pub fn join_set(&self, s: Set) -> usize {
        s.iter().fold(self.bottom, |acc, x| self.join(acc, x))
    }

    /// Meet of a set; the empty meet is the top.
    pub fn meet_set(&self, s: Set) -> usize {
        s.iter().fold(self.top, |acc, x| self.meet(acc, x))
    }

    /// `↓S`.
    pub fn downset(&self, s: Set) -> Set {
        s.iter().fold(Set::EMPTY, |acc, x| acc.union(self.down[x]))
    }

    /// `↑S`.
    pub fn upset(&self, s: Set) -> Set {
        s.iter().fold(Set::EMPTY, |acc, x| acc.union(self.up[x]))
    }

    pub fn is_downset(&self, s: Set) -> bool {
        self.downset(s) == s
    }

    pub fn is_antichain(&self, s: Set) -> bool {
        s.iter().all(|a| self.up[a].inter(s) == Set::singleton(a))
    }

    /// Elements covered by `a`.
    pub fn lower_covers(&self, a: usize) -> Set {
        let below = self.down[a].without(a);
        below.iter().filter(|&b| self.up[b].inter(below) == Set::singleton(b)).collect()
    }

    /// Elements covering `a`.
    pub fn upper_covers(&self, a: usize) -> Set {
        let above = self.up[a].without(a);
        above.iter().filter(|&b| self.down[b].inter(above) == Set::singleton(b)).collect()
    }

    /// Hasse pairs `(lower, upper)` in index order.
    pub fn hasse(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for b in 0..self.n {
            for a in self.lower_covers(b).iter() {
                out.push((a, b));
            }
        }
        out.sort_unstable();
        out
    }

    /// Elements with exactly one lower cover.
    pub fn join_irreducibles(&self) -> Set {
        (0..self.n).filter(|&a| self.lower_covers(a).len() == 1).collect()
    }

    /// Elements with exactly one upper cover.
    pub fn meet_irreducibles(&self) -> Set {
        (0..self.n).filter(|&a| self.upper_covers(a).len() == 1).collect()
    }

    /// `A ≪ B`: every member of `A` lies below some member of `B`.
    pub fn refines(&self, a: Set, b: Set) -> bool {
        a.is_subset(self.downset(b))
    }

    /// All antichains of the lattice, including the empty one.
    pub fn antichains(&self) -> Vec<Antichain> {
        let mut out = Vec::new();
        self.extend_antichains(0, Set::EMPTY, &mut out);
        out
    }

    fn extend_antichains(&self, from: usize, cur: Set, out: &mut Vec<Antichain>) {
        out.push(cur);
        for x in from..self.n {
            let comparable = self.up[x].union(self.down[x]);
            if !comparable.intersects(cur) {
                self.extend_antichains(x + 1, cur.with(x), out);
            }
        }
    }

    /// Minimal join-covers of `a`, sorted by bit pattern.
    pub fn minimal_covers(&self, a: usize) -> CoverFamily {
        let antichains = self.antichains();
        self.minimal_covers_among(a, &antichains)
    }

    pub(crate) fn minimal_covers_among(&self, a: usize, antichains: &[Antichain]) -> CoverFamily {
        let covering: Vec<Antichain> = antichains
            .iter()
            .copied()
            .filter(|&c| self.leq(a, self.join_set(c)))
            .collect();
        let mut covers: Vec<Antichain> = covering
            .iter()
            .copied()
            .filter(|&c| covering.iter().all(|&d| d == c || !self.refines(d, c)))
            .collect();
        covers.sort_unstable();
        CoverFamily { owner: a, covers }
    }

    /// The order-dual lattice, with the same labels.
    pub fn dual(&self) -> FiniteLattice {
        let leq: Vec<Vec<bool>> = (0..self.n).map(|a| (0..self.n).map(|b| self.leq(b, a)).collect()).collect();
        FiniteLattice::from_leq(&leq, Some(self.labels.clone())).expect("dual of a lattice is a lattice")
    }

    pub fn set_labels(&self, s: Set) -> Vec<&str> {
        s.iter().map(|i| self.label(i)).collect()
    }

    /// Formats a set as `{a,b}` with element labels.
    pub fn show_set(&self, s: Set) -> String {
        format!("{{{}}}", self.set_labels(s).join(","))
    }
}

impl fmt::Debug for FiniteLattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let hasse: Vec<String> = self
            .hasse()
            .into_iter()
            .map(|(a, b)| format!("{}<{}", self.label(a), self.label(b)))
            .collect();
        write!(f, "FiniteLattice[{}; {}]", self.labels.join(" "), hasse.join(" "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn n5() -> FiniteLattice {
        // bot=0 a=1 b=2 c=3 top=4 with bot<a<top, bot<b<c<top
        let labels = ["bot", "a", "b", "c", "top"].map(String::from).to_vec();
        FiniteLattice::from_covers(5, &[(0, 1), (1, 4), (0, 2), (2, 3), (3, 4)], Some(labels)).unwrap()
    }

    fn square() -> FiniteLattice {
        FiniteLattice::from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], None).unwrap()
    }

    /// Join-irreducibility straight from the definition.
    fn ji_by_definition(l: &FiniteLattice) -> Set {
        l.elements()
            .filter(|&j| {
                j != l.bottom()
                    && l.elements().all(|a| l.elements().all(|b| l.join(a, b) != j || a == j || b == j))
            })
            .collect()
    }

    #[test]
    fn joins_on_small_lattices() {
        let c2 = FiniteLattice::chain(2).unwrap();
        assert_eq!(c2.join(0, 1), 1);
        let l = n5();
        assert_eq!(l.join(1, 2), 4);
        for x in l.elements() {
            assert_eq!(l.join(x, x), x);
        }
    }

    #[test]
    fn irreducibles() {
        let one = FiniteLattice::chain(1).unwrap();
        assert!(one.join_irreducibles().is_empty());
        assert!(one.meet_irreducibles().is_empty());
        let sq = square();
        assert_eq!(sq.join_irreducibles(), Set::from_indices([1, 2]));
        assert_eq!(sq.meet_irreducibles(), Set::from_indices([1, 2]));
        let c3 = FiniteLattice::chain(3).unwrap();
        assert_eq!(c3.join_irreducibles(), Set::from_indices([1, 2]));
        assert_eq!(FiniteLattice::chain(2).unwrap().meet_irreducibles(), Set::singleton(0));
        for l in [sq, c3, n5()] {
            assert_eq!(l.join_irreducibles(), ji_by_definition(&l));
        }
    }

    #[test]
    fn refinement_on_n5() {
        let l = n5();
        let (a, b, c) = (1, 2, 3);
        assert!(l.refines(Set::EMPTY, Set::singleton(a)));
        assert!(l.refines(Set::singleton(b), Set::from_indices([a, b])));
        assert!(!l.refines(Set::singleton(c), Set::from_indices([a, b])));
    }

    #[test]
    fn minimal_covers_examples() {
        let l = n5();
        let mc = l.minimal_covers(3);
        assert_eq!(mc.covers, vec![Set::from_indices([1, 2]), Set::singleton(3)]);
        let sq = square();
        assert_eq!(sq.minimal_covers(1).covers, vec![Set::singleton(1)]);
        assert_eq!(l.minimal_covers(l.bottom()).covers, vec![Set::EMPTY]);
    }

    #[test]
    fn downsets_and_antichains() {
        let l = n5();
        assert_eq!(l.downset(Set::EMPTY), Set::EMPTY);
        assert_eq!(l.downset(Set::singleton(l.top())), l.all());
        assert_eq!(l.downset(Set::singleton(3)), Set::from_indices([0, 2, 3]));
        assert!(l.is_antichain(Set::from_indices([1, 2])));
        assert!(!l.is_antichain(Set::from_indices([2, 3])));
    }

    #[test]
    fn rejects_non_lattice() {
        // two maximal elements without a top
        let err = FiniteLattice::from_covers(3, &[(0, 1), (0, 2)], None).unwrap_err();
        assert_eq!(err, LatticeError::NoJoin("1".into(), "2".into()));
    }
}
