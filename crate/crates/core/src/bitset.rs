//! Fixed-capacity sets of group element indices.

use std::cmp::Ordering;
use std::fmt;

use smallvec::{smallvec, SmallVec};

/// A set of element indices `0..capacity`, stored as a bit vector.
///
/// Ordering is lexicographic on the ascending element lists, so `{0} < {0, 1}`
/// and `{0, 2} > {0, 1, 5}`. This is the order used for every canonical form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ElemSet {
    words: SmallVec<[u64; 2]>,
}

impl ElemSet {
    pub fn empty(capacity: usize) -> Self {
        let n = capacity.div_ceil(64).max(1);
        ElemSet { words: smallvec![0; n] }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::empty(capacity);
        for i in 0..capacity {
            s.insert(i);
        }
        s
    }

    pub fn from_iter_with(capacity: usize, it: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::empty(capacity);
        for i in it {
            s.insert(i);
        }
        s
    }

    #[inline]
    pub fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i >> 6, i & 63);
        let had = self.words[w] >> b & 1 == 1;
        self.words[w] |= 1 << b;
        !had
    }

    #[inline]
    pub fn remove(&mut self, i: usize) {
        self.words[i >> 6] &= !(1u64 << (i & 63));
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.words
            .get(i >> 6)
            .is_some_and(|w| w >> (i & 63) & 1 == 1)
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn iter(&self) -> Iter<'_> {
        Iter {
            words: &self.words,
            idx: 0,
            cur: self.words[0],
        }
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }

    pub fn min(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn is_subset(&self, other: &ElemSet) -> bool {
        self.words
            .iter()
            .zip(other.words.iter())
            .all(|(a, b)| a & !b == 0)
    }

    pub fn intersection(&self, other: &ElemSet) -> ElemSet {
        ElemSet {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn union_with(&mut self, other: &ElemSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    /// Image of the set under a permutation of `0..capacity`.
    pub fn map(&self, perm: &[usize]) -> ElemSet {
        let mut out = ElemSet {
            words: smallvec![0; self.words.len()],
        };
        for i in self.iter() {
            let j = perm[i];
            out.words[j >> 6] |= 1 << (j & 63);
        }
        out
    }
}

pub struct Iter<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl Iterator for Iter<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let b = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * 64 + b);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

impl<'a> IntoIterator for &'a ElemSet {
    type Item = usize;
    type IntoIter = Iter<'a>;
    fn into_iter(self) -> Iter<'a> {
        self.iter()
    }
}

impl Ord for ElemSet {
    fn cmp(&self, other: &Self) -> Ordering {
        let n = self.words.len().max(other.words.len());
        let word = |s: &ElemSet, i: usize| s.words.get(i).copied().unwrap_or(0);
        for i in 0..n {
            let (a, b) = (word(self, i), word(other, i));
            if a == b {
                continue;
            }
            // Smallest element on which the two lists disagree.
            let bit = (a ^ b).trailing_zeros();
            let above = |w: u64| if bit == 63 { 0 } else { w >> (bit + 1) };
            let rest_nonempty =
                |s: &ElemSet, w: u64| above(w) != 0 || (i + 1..n).any(|j| word(s, j) != 0);
            return if a >> bit & 1 == 1 {
                // `self` has the element; `other` either continues with a
                // larger one (self is smaller) or stops (other is a prefix).
                if rest_nonempty(other, b) {
                    Ordering::Less
                } else {
                    Ordering::Greater
                }
            } else if rest_nonempty(self, a) {
                Ordering::Greater
            } else {
                Ordering::Less
            };
        }
        Ordering::Equal
    }
}

impl PartialOrd for ElemSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for ElemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn set(v: &[usize]) -> ElemSet {
        ElemSet::from_iter_with(130, v.iter().copied())
    }

    #[test]
    fn lexicographic_order_examples() {
        assert!(set(&[0]) < set(&[0, 1]));
        assert!(set(&[0, 2]) > set(&[0, 1, 5]));
        assert!(set(&[0, 1, 5]) < set(&[0, 2]));
        assert!(set(&[0, 64]) < set(&[0, 65]));
        assert!(set(&[0, 63]) > set(&[0, 62, 100]));
        assert!(set(&[0, 63]) < set(&[0, 63, 64]));
    }

    proptest! {
        #[test]
        fn order_matches_sorted_lists(a in proptest::collection::btree_set(0usize..130, 0..12),
                                      b in proptest::collection::btree_set(0usize..130, 0..12)) {
            let va: Vec<usize> = a.iter().copied().collect();
            let vb: Vec<usize> = b.iter().copied().collect();
            let (sa, sb) = (set(&va), set(&vb));
            prop_assert_eq!(sa.cmp(&sb), va.cmp(&vb));
            prop_assert_eq!(sa.to_vec(), va);
        }
    }
}
