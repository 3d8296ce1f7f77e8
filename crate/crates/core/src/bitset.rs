//! Small fixed-width sets of indices, used for subsets of lattices and frames.

use std::fmt;

/// A subset of `0..128` packed into a `u128`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Set(pub u128);

/// Largest carrier a [`Set`] can index.
pub const MAX_CARRIER: usize = 128;

impl Set {
    pub const EMPTY: Set = Set(0);

    pub fn singleton(i: usize) -> Set {
        debug_assert!(i < MAX_CARRIER);
        Set(1u128 << i)
    }

    /// The set `{0, .., n-1}`.
    pub fn full(n: usize) -> Set {
        debug_assert!(n <= MAX_CARRIER);
        if n == MAX_CARRIER {
            Set(u128::MAX)
        } else {
            Set((1u128 << n) - 1)
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(it: I) -> Set {
        let mut s = Set::EMPTY;
        for i in it {
            s.insert(i);
        }
        s
    }

    pub fn contains(self, i: usize) -> bool {
        i < MAX_CARRIER && (self.0 >> i) & 1 == 1
    }

    pub fn insert(&mut self, i: usize) {
        self.0 |= 1u128 << i;
    }

    pub fn remove(&mut self, i: usize) {
        self.0 &= !(1u128 << i);
    }

    pub fn with(self, i: usize) -> Set {
        Set(self.0 | (1u128 << i))
    }

    pub fn without(self, i: usize) -> Set {
        Set(self.0 & !(1u128 << i))
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn union(self, o: Set) -> Set {
        Set(self.0 | o.0)
    }

    pub fn inter(self, o: Set) -> Set {
        Set(self.0 & o.0)
    }

    pub fn minus(self, o: Set) -> Set {
        Set(self.0 & !o.0)
    }

    /// Complement relative to a carrier of size `n`.
    pub fn complement(self, n: usize) -> Set {
        Set(!self.0 & Set::full(n).0)
    }

    pub fn is_subset(self, o: Set) -> bool {
        self.0 & !o.0 == 0
    }

    pub fn intersects(self, o: Set) -> bool {
        self.0 & o.0 != 0
    }

    pub fn first(self) -> Option<usize> {
        if self.0 == 0 {
            None
        } else {
            Some(self.0.trailing_zeros() as usize)
        }
    }

    pub fn iter(self) -> SetIter {
        SetIter(self.0)
    }

    /// All subsets of `self`, in increasing numeric order.
    pub fn subsets(self) -> Subsets {
        Subsets {
            mask: self.0,
            next: Some(0),
        }
    }
}

impl fmt::Debug for Set {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

pub struct SetIter(u128);

impl Iterator for SetIter {
    type Item = usize;
    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

impl FromIterator<usize> for Set {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Set::from_indices(iter)
    }
}

/// Iterator over the subsets of a mask (Gosper-free submask walk).
pub struct Subsets {
    mask: u128,
    next: Option<u128>,
}

impl Iterator for Subsets {
    type Item = Set;
    fn next(&mut self) -> Option<Set> {
        let cur = self.next?;
        self.next = if cur == self.mask {
            None
        } else {
            Some(((cur | !self.mask).wrapping_add(1)) & self.mask)
        };
        Some(Set(cur))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subsets_enumerates_all() {
        let m = Set::from_indices([1, 3, 4]);
        let subs: Vec<Set> = m.subsets().collect();
        assert_eq!(subs.len(), 8);
        assert!(subs.iter().all(|s| s.is_subset(m)));
        assert_eq!(subs[0], Set::EMPTY);
        assert_eq!(*subs.last().unwrap(), m);
    }

    #[test]
    fn complement_and_iter() {
        let s = Set::from_indices([0, 2]);
        assert_eq!(s.complement(4), Set::from_indices([1, 3]));
        assert_eq!(s.iter().collect::<Vec<_>>(), vec![0, 2]);
        assert_eq!(Set::full(128).len(), 128);
    }
}
