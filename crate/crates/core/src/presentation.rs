//! Join-presentations, their closure operators, and the lattice of closed downsets.

use thiserror::Error;

use crate::bitset::Set;
use crate::lattice::{FiniteLattice, LatticeError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PresentationError {
    #[error("{0} is not a downset")]
    NotDownset(String),
    #[error("invalid presentation: {0}")]
    Invalid(String),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

/// A poset `(X, ≤)` with a family `M(x)` of covers for every point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoinPresentation {
    labels: Vec<String>,
    /// `down[x]` = points below or equal to `x`.
    down: Vec<Set>,
    covers: Vec<Vec<Set>>,
    /// Lattice element behind each point, when built from a lattice.
    origin: Option<Vec<usize>>,
}

/// Report of the three defining clauses of a direct presentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PresentationProperties {
    pub monotone: bool,
    pub reflexive: bool,
    pub transitive: bool,
}

impl PresentationProperties {
    pub fn direct(&self) -> bool {
        self.monotone && self.reflexive && self.transitive
    }
}

/// The closed downsets of a presentation, as a lattice.
///
/// `members[i]` is the closed downset standing behind lattice element `i`.
#[derive(Debug, Clone)]
pub struct ClosedDownsets {
    pub lattice: FiniteLattice,
    pub members: Vec<Set>,
}

impl JoinPresentation {
    /// Builds a presentation from a strict order given as pairs `(lower, upper)` and cover families.
    pub fn new(labels: Vec<String>, order: &[(usize, usize)], covers: Vec<Vec<Set>>) -> Result<Self, PresentationError> {
        let n = labels.len();
        if covers.len() != n {
            return Err(PresentationError::Invalid(format!("{} points but {} cover families", n, covers.len())));
        }
        let mut down: Vec<Set> = (0..n).map(Set::singleton).collect();
        for &(a, b) in order {
            if a >= n || b >= n {
                return Err(PresentationError::Invalid(format!("order pair ({a},{b}) out of range")));
            }
            down[b].insert(a);
        }
        loop {
            let mut changed = false;
            for x in 0..n {
                let d = down[x].iter().fold(down[x], |acc, y| acc.union(down[y]));
                if d != down[x] {
                    down[x] = d;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        for x in 0..n {
            for y in down[x].iter() {
                if y != x && down[y].contains(x) {
                    return Err(PresentationError::Invalid(format!("order has a cycle through {}", labels[x])));
                }
            }
        }
        let all = Set::full(n);
        for fam in &covers {
            for c in fam {
                if !c.is_subset(all) {
                    return Err(PresentationError::Invalid("cover mentions an unknown point".into()));
                }
            }
        }
        Ok(JoinPresentation { labels, down, covers, origin: None })
    }

    pub fn size(&self) -> usize {
        self.labels.len()
    }

    pub fn all(&self) -> Set {
        Set::full(self.size())
    }

    pub fn label(&self, x: usize) -> &str {
        &self.labels[x]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Lattice elements behind the points, when the presentation came from a lattice.
    pub fn origin(&self) -> Option<&[usize]> {
        self.origin.as_deref()
    }

    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.down[y].contains(x)
    }

    pub fn down_set(&self, x: usize) -> Set {
        self.down[x]
    }

    pub fn covers(&self, x: usize) -> &[Set] {
        &self.covers[x]
    }

    pub fn downset(&self, s: Set) -> Set {
        s.iter().fold(Set::EMPTY, |acc, x| acc.union(self.down[x]))
    }

    pub fn is_downset(&self, s: Set) -> bool {
        self.downset(s) == s
    }

    pub fn refines(&self, a: Set, b: Set) -> bool {
        a.is_subset(self.downset(b))
    }

    pub fn is_antichain(&self, s: Set) -> bool {
        s.iter().all(|a| self.down[a].inter(s) == Set::singleton(a))
    }

    /// All downsets of the poset.
    pub fn downsets(&self) -> Vec<Set> {
        self.all().subsets().filter(|&s| self.is_downset(s)).collect()
    }

    /// `{x | D ⊆ S for some D ∈ M(x)}`, defined on downsets only.
    pub fn closure_bar(&self, s: Set) -> Result<Set, PresentationError> {
        if !self.is_downset(s) {
            return Err(PresentationError::NotDownset(self.show_set(s)));
        }
        Ok(self.closure_bar_unchecked(s))
    }

    pub(crate) fn closure_bar_unchecked(&self, s: Set) -> Set {
        (0..self.size())
            .filter(|&x| self.covers[x].iter().any(|d| d.is_subset(s)))
            .collect()
    }

    /// `closure_bar(↓S)`, total on arbitrary subsets.
    pub fn cl(&self, s: Set) -> Set {
        self.closure_bar_unchecked(self.downset(s))
    }

    pub fn is_closed(&self, s: Set) -> bool {
        self.is_downset(s) && self.closure_bar_unchecked(s) == s
    }

    /// The closed downsets, ordered by size and then by bit pattern.
    pub fn closed_sets(&self) -> Vec<Set> {
        let mut out: Vec<Set> = self.downsets().into_iter().filter(|&s| self.is_closed(s)).collect();
        out.sort_by_key(|s| (s.len(), s.0));
        out
    }

    /// The lattice of closed downsets ordered by inclusion.
    pub fn closed_downsets(&self) -> Result<ClosedDownsets, PresentationError> {
        let members = self.closed_sets();
        let n = members.len();
        let leq: Vec<Vec<bool>> = (0..n)
            .map(|a| (0..n).map(|b| members[a].is_subset(members[b])).collect())
            .collect();
        let labels = members.iter().map(|&s| self.show_set(s)).collect();
        let lattice = FiniteLattice::from_leq(&leq, Some(labels))?;
        Ok(ClosedDownsets { lattice, members })
    }

    /// Checks the monotone, reflexive and transitive clauses exhaustively.
    pub fn properties(&self) -> PresentationProperties {
        let n = self.size();
        let monotone = (0..n).all(|x| {
            self.down[x].iter().all(|y| {
                self.covers[x]
                    .iter()
                    .all(|&c| self.covers[y].iter().any(|&d| self.refines(d, c)))
            })
        });
        let reflexive = (0..n).all(|x| self.covers[x].iter().any(|&c| self.refines(c, Set::singleton(x))));
        let transitive = (0..n).all(|x| {
            self.covers[x].iter().all(|&c| {
                let members: Vec<usize> = c.iter().collect();
                self.all_choices_refined(x, &members, 0, Set::EMPTY)
            })
        });
        PresentationProperties { monotone, reflexive, transitive }
    }

    fn all_choices_refined(&self, x: usize, members: &[usize], i: usize, acc: Set) -> bool {
        if i == members.len() {
            return self.covers[x].iter().any(|&e| self.refines(e, acc));
        }
        self.covers[members[i]]
            .iter()
            .all(|&d| self.all_choices_refined(x, members, i + 1, acc.union(d)))
    }

    pub fn show_set(&self, s: Set) -> String {
        let names: Vec<&str> = s.iter().map(|i| self.label(i)).collect();
        format!("{{{}}}", names.join(","))
    }
}

/// The join-presentation `(J(L), ≤, M)` of a lattice.
pub fn presentation_of(l: &FiniteLattice) -> JoinPresentation {
    let js: Vec<usize> = l.join_irreducibles().iter().collect();
    let pos = |a: usize| js.iter().position(|&j| j == a);
    let antichains = l.antichains();
    let labels = js.iter().map(|&j| l.label(j).to_string()).collect();
    let down = js
        .iter()
        .map(|&j| js.iter().enumerate().filter(|&(_, &k)| l.leq(k, j)).map(|(i, _)| i).collect())
        .collect();
    let covers = js
        .iter()
        .map(|&j| {
            let mut fam: Vec<Set> = l
                .minimal_covers_among(j, &antichains)
                .covers
                .into_iter()
                .map(|c| c.iter().map(|e| pos(e).expect("minimal covers consist of join-irreducibles")).collect())
                .collect();
            fam.sort_unstable();
            fam
        })
        .collect();
    JoinPresentation { labels, down, covers, origin: Some(js) }
}

/// `a ↦ {j ∈ J(L) | j ≤ a}`, as point sets of the join-presentation.
pub fn canonical_sets(l: &FiniteLattice, p: &JoinPresentation) -> Vec<Set> {
    let origin = p.origin().expect("presentation built from a lattice");
    l.elements()
        .map(|a| (0..p.size()).filter(|&i| l.leq(origin[i], a)).collect())
        .collect()
}

/// The canonical map `L → 𝔏_L` as indices into `closed.lattice`, if it is an isomorphism.
pub fn canonical_map(l: &FiniteLattice, p: &JoinPresentation, closed: &ClosedDownsets) -> Option<Vec<usize>> {
    let sets = canonical_sets(l, p);
    let map: Vec<usize> = sets
        .iter()
        .map(|s| closed.members.iter().position(|m| m == s))
        .collect::<Option<_>>()?;
    is_isomorphism(l, &closed.lattice, &map).then_some(map)
}

/// True if `map` is a bijection preserving and reflecting the order.
pub fn is_isomorphism(l1: &FiniteLattice, l2: &FiniteLattice, map: &[usize]) -> bool {
    if l1.size() != l2.size() || map.len() != l1.size() {
        return false;
    }
    let image: Set = map.iter().copied().collect();
    if image.len() != l1.size() || map.iter().any(|&b| b >= l2.size()) {
        return false;
    }
    l1.elements()
        .all(|a| l1.elements().all(|b| l1.leq(a, b) == l2.leq(map[a], map[b])))
}

/// An order-isomorphism `L1 → L2` found by backtracking, if any.
pub fn isomorphic_to(l1: &FiniteLattice, l2: &FiniteLattice) -> Option<Vec<usize>> {
    if l1.size() != l2.size() {
        return None;
    }
    let n = l1.size();
    let sig = |l: &FiniteLattice, a: usize| (l.down_set(a).len(), l.up_set(a).len(), l.lower_covers(a).len());
    let mut map = vec![usize::MAX; n];
    let mut used = Set::EMPTY;
    fn go(
        l1: &FiniteLattice,
        l2: &FiniteLattice,
        a: usize,
        map: &mut Vec<usize>,
        used: &mut Set,
        sig: &dyn Fn(&FiniteLattice, usize) -> (usize, usize, usize),
    ) -> bool {
        let n = l1.size();
        if a == n {
            return true;
        }
        for b in 0..n {
            if used.contains(b) || sig(l1, a) != sig(l2, b) {
                continue;
            }
            let consistent = (0..a).all(|c| l1.leq(c, a) == l2.leq(map[c], b) && l1.leq(a, c) == l2.leq(b, map[c]));
            if consistent {
                map[a] = b;
                used.insert(b);
                if go(l1, l2, a + 1, map, used, sig) {
                    return true;
                }
                used.remove(b);
            }
        }
        false
    }
    go(l1, l2, 0, &mut map, &mut used, &sig).then_some(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n5() -> FiniteLattice {
        let labels = ["bot", "a", "b", "c", "top"].map(String::from).to_vec();
        FiniteLattice::from_covers(5, &[(0, 1), (1, 4), (0, 2), (2, 3), (3, 4)], Some(labels)).unwrap()
    }

    fn m3() -> FiniteLattice {
        FiniteLattice::from_covers(5, &[(0, 1), (0, 2), (0, 3), (1, 4), (2, 4), (3, 4)], None).unwrap()
    }

    #[test]
    fn n5_presentation() {
        let p = presentation_of(&n5());
        assert_eq!(p.labels(), ["a", "b", "c"]);
        let (a, b, c) = (0, 1, 2);
        assert!(p.leq(b, c) && !p.leq(a, c));
        assert_eq!(p.covers(c), [Set::from_indices([a, b]), Set::singleton(c)]);
        assert_eq!(p.closure_bar(Set::from_indices([a, b])).unwrap(), Set::from_indices([a, b, c]));
        assert_eq!(p.cl(Set::from_indices([a, b])), Set::from_indices([a, b, c]));
        assert!(p.properties().direct());
    }

    #[test]
    fn closure_bar_rejects_non_downsets() {
        let p = presentation_of(&n5());
        assert!(matches!(p.closure_bar(Set::singleton(2)), Err(PresentationError::NotDownset(_))));
        assert_eq!(p.closure_bar(Set::EMPTY).unwrap(), Set::EMPTY);
    }

    #[test]
    fn one_element_lattice() {
        let one = FiniteLattice::chain(1).unwrap();
        let p = presentation_of(&one);
        assert_eq!(p.size(), 0);
        let c = p.closed_downsets().unwrap();
        assert_eq!(c.lattice.size(), 1);
        assert_eq!(c.members, vec![Set::EMPTY]);
    }

    #[test]
    fn reconstruction_of_m3_and_n5() {
        for l in [m3(), n5()] {
            let p = presentation_of(&l);
            let c = p.closed_downsets().unwrap();
            assert!(isomorphic_to(&l, &c.lattice).is_some());
            assert!(canonical_map(&l, &p, &c).is_some());
        }
        let square = FiniteLattice::from_covers(4, &[(0, 1), (0, 2), (1, 3), (2, 3)], None).unwrap();
        assert!(isomorphic_to(&FiniteLattice::chain(2).unwrap(), &square).is_none());
        assert!(isomorphic_to(&m3(), &n5()).is_none());
    }

    #[test]
    fn property_failures() {
        let labels = vec!["x".to_string(), "y".to_string()];
        let empty = JoinPresentation::new(labels.clone(), &[], vec![vec![], vec![Set::singleton(1)]]).unwrap();
        assert!(!empty.properties().reflexive);
        // y < x and the only cover offered at y lies above y
        let bad = JoinPresentation::new(labels, &[(1, 0)], vec![vec![Set::singleton(0)], vec![Set::singleton(0)]]).unwrap();
        let props = bad.properties();
        assert!(props.monotone);
        assert!(!props.reflexive);
        let labels3 = ["x", "y", "z"].map(String::from).to_vec();
        let nonmono = JoinPresentation::new(
            labels3,
            &[(1, 0)],
            vec![vec![Set::singleton(2)], vec![Set::singleton(1)], vec![Set::singleton(2)]],
        )
        .unwrap();
        assert!(!nonmono.properties().monotone);
    }
}
