//! Dense bitsets over the elements of one group.

use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::group::{AbelianGroup, Element};

/// A subset of a group of order `n`, stored as a dense bitset.
///
/// Serializes as the sorted list of member indices; the group order is not
/// part of the wire format and must be supplied on the way back in
/// (see [`GroupSubset::from_indices`]).
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupSubset {
    n: usize,
    words: Vec<u64>,
    len: usize,
}

impl GroupSubset {
    pub fn empty(n: usize) -> Self {
        GroupSubset {
            n,
            words: vec![0; n.div_ceil(64)],
            len: 0,
        }
    }

    pub fn full(n: usize) -> Self {
        let mut s = GroupSubset::empty(n);
        for w in s.words.iter_mut() {
            *w = u64::MAX;
        }
        s.trim();
        s.len = n;
        s
    }

    pub fn from_elements<I: IntoIterator<Item = Element>>(n: usize, elems: I) -> Self {
        let mut s = GroupSubset::empty(n);
        for e in elems {
            s.insert(e);
        }
        s
    }

    /// Builds a subset from raw indices, rejecting any index `>= n`.
    pub fn from_indices(n: usize, indices: &[usize]) -> crate::Result<Self> {
        let mut s = GroupSubset::empty(n);
        for &i in indices {
            if i >= n {
                return Err(crate::Error::ElementOutOfRange { index: i, n });
            }
            s.insert(Element(i));
        }
        Ok(s)
    }

    /// Low 64 elements as a mask; only meaningful when `n <= 64`.
    pub fn from_mask(n: usize, mask: u64) -> Self {
        debug_assert!(n <= 64);
        let mut s = GroupSubset::empty(n);
        if n > 0 {
            s.words[0] = mask;
            s.trim();
            s.len = s.words[0].count_ones() as usize;
        }
        s
    }

    pub fn to_mask(&self) -> u64 {
        debug_assert!(self.n <= 64);
        self.words.first().copied().unwrap_or(0)
    }

    pub fn universe(&self) -> usize {
        self.n
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn contains(&self, e: Element) -> bool {
        let i = e.0;
        i < self.n && self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Returns whether the element was newly inserted.
    pub fn insert(&mut self, e: Element) -> bool {
        let i = e.0;
        assert!(i < self.n, "element {i} outside universe {}", self.n);
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.words[w] & b == 0;
        self.words[w] |= b;
        self.len += fresh as usize;
        fresh
    }

    pub fn remove(&mut self, e: Element) -> bool {
        let i = e.0;
        if i >= self.n {
            return false;
        }
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let present = self.words[w] & b != 0;
        self.words[w] &= !b;
        self.len -= present as usize;
        present
    }

    pub fn iter(&self) -> impl Iterator<Item = Element> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let tz = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(Element(wi * 64 + tz))
            })
        })
    }

    pub fn to_indices(&self) -> Vec<usize> {
        self.iter().map(|e| e.0).collect()
    }

    pub fn union(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a | b)
    }

    pub fn intersection(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a & !b)
    }

    pub fn complement(&self) -> Self {
        let mut s = GroupSubset {
            n: self.n,
            words: self.words.iter().map(|w| !w).collect(),
            len: 0,
        };
        s.trim();
        s.len = s.count();
        s
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &Self) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    /// `-S = { -x : x in S }`.
    pub fn negated(&self, g: &AbelianGroup) -> Self {
        GroupSubset::from_elements(self.n, self.iter().map(|x| g.neg(x)))
    }

    /// `S + t`.
    pub fn translated(&self, g: &AbelianGroup, t: Element) -> Self {
        GroupSubset::from_elements(self.n, self.iter().map(|x| g.add(x, t)))
    }

    fn zip_with(&self, other: &Self, f: impl Fn(u64, u64) -> u64) -> Self {
        assert_eq!(self.n, other.n, "subsets of different groups");
        let words: Vec<u64> = self
            .words
            .iter()
            .zip(&other.words)
            .map(|(&a, &b)| f(a, b))
            .collect();
        let mut s = GroupSubset {
            n: self.n,
            words,
            len: 0,
        };
        s.trim();
        s.len = s.count();
        s
    }

    fn trim(&mut self) {
        let rem = self.n % 64;
        if rem != 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= (1u64 << rem) - 1;
            }
        }
    }

    fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

impl fmt::Debug for GroupSubset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter().map(|e| e.0)).finish()
    }
}

impl Serialize for GroupSubset {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.iter().map(|e| e.0))
    }
}

impl<'de> Deserialize<'de> for GroupSubset {
    /// The universe is taken to be one past the largest index. Callers that
    /// know the group should rebuild with [`GroupSubset::from_indices`].
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let idx = Vec::<usize>::deserialize(deserializer)?;
        let n = idx.iter().max().map_or(0, |m| m + 1);
        GroupSubset::from_indices(n, &idx).map_err(serde::de::Error::custom)
    }
}
