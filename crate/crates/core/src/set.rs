//! Compact sets of item identifiers.
//!
//! Items are small contiguous integers (0..n), so a set is a bitmask split
//! into 64-bit blocks. The block vector is kept normalized (no trailing zero
//! blocks) so that `Eq`/`Hash` see a canonical form.

use std::fmt;

#[derive(Clone, Default, PartialEq, Eq, Hash)]
pub struct ItemSet {
    blocks: Vec<u64>,
}

impl ItemSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn singleton(item: usize) -> Self {
        let mut s = Self::new();
        s.insert(item);
        s
    }

    /// The full set {0, .., n-1}.
    pub fn full(n: usize) -> Self {
        let mut s = Self::new();
        for i in 0..n {
            s.insert(i);
        }
        s
    }

    /// Builds a set from the low `n` bits of `mask` (handy in exhaustive loops).
    pub fn from_bits(mask: u64, n: usize) -> Self {
        assert!(n <= 64, "from_bits covers at most 64 items");
        let mut s = Self::new();
        for i in 0..n {
            if mask >> i & 1 == 1 {
                s.insert(i);
            }
        }
        s
    }

    fn trim(&mut self) {
        while self.blocks.last() == Some(&0) {
            self.blocks.pop();
        }
    }

    pub fn insert(&mut self, item: usize) {
        let (b, o) = (item / 64, item % 64);
        if b >= self.blocks.len() {
            self.blocks.resize(b + 1, 0);
        }
        self.blocks[b] |= 1 << o;
    }

    pub fn remove(&mut self, item: usize) {
        let (b, o) = (item / 64, item % 64);
        if b < self.blocks.len() {
            self.blocks[b] &= !(1 << o);
            self.trim();
        }
    }

    pub fn contains(&self, item: usize) -> bool {
        let (b, o) = (item / 64, item % 64);
        b < self.blocks.len() && self.blocks[b] >> o & 1 == 1
    }

    pub fn len(&self) -> usize {
        self.blocks.iter().map(|b| b.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().enumerate().flat_map(|(bi, &block)| {
            (0..64).filter_map(move |o| (block >> o & 1 == 1).then_some(bi * 64 + o))
        })
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut blocks = vec![0; self.blocks.len().max(other.blocks.len())];
        for (i, slot) in blocks.iter_mut().enumerate() {
            *slot = self.blocks.get(i).copied().unwrap_or(0)
                | other.blocks.get(i).copied().unwrap_or(0);
        }
        let mut s = Self { blocks };
        s.trim();
        s
    }

    pub fn intersection(&self, other: &Self) -> Self {
        let mut blocks = vec![0; self.blocks.len().min(other.blocks.len())];
        for (i, slot) in blocks.iter_mut().enumerate() {
            *slot = self.blocks[i] & other.blocks[i];
        }
        let mut s = Self { blocks };
        s.trim();
        s
    }

    pub fn minus(&self, other: &Self) -> Self {
        let mut blocks = self.blocks.clone();
        for (i, slot) in blocks.iter_mut().enumerate() {
            *slot &= !other.blocks.get(i).copied().unwrap_or(0);
        }
        let mut s = Self { blocks };
        s.trim();
        s
    }

    /// {0, .., n-1} \ self.
    pub fn complement(&self, n: usize) -> Self {
        Self::full(n).minus(self)
    }

    pub fn is_subset_of(&self, other: &Self) -> bool {
        self.blocks
            .iter()
            .enumerate()
            .all(|(i, &b)| b & !other.blocks.get(i).copied().unwrap_or(0) == 0)
    }

    pub fn is_disjoint_from(&self, other: &Self) -> bool {
        self.intersection(other).is_empty()
    }

    pub fn insert_all(&mut self, other: &Self) {
        *self = self.union(other);
    }

    pub fn min_item(&self) -> Option<usize> {
        self.iter().next()
    }
}

impl FromIterator<usize> for ItemSet {
    fn from_iter<T: IntoIterator<Item = usize>>(iter: T) -> Self {
        let mut s = Self::new();
        for i in iter {
            s.insert(i);
        }
        s
    }
}

impl fmt::Debug for ItemSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
