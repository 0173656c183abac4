//! Leaf sets over a fixed leaf table.

use std::cmp::Ordering;
use std::fmt;

use fixedbitset::FixedBitSet;

/// A set of leaf indices, stored as a bitset sized to the leaf table.
///
/// Ordering is lexicographic on the ascending member sequence, so
/// `{0,1} < {0,1,2} < {0,2} < {1}`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cluster(FixedBitSet);

impl Cluster {
    /// Empty set over `n` leaves.
    pub fn empty(n: usize) -> Self {
        Cluster(FixedBitSet::with_capacity(n))
    }

    /// The set of all `n` leaves.
    pub fn full(n: usize) -> Self {
        let mut bits = FixedBitSet::with_capacity(n);
        bits.insert_range(..);
        Cluster(bits)
    }

    pub fn singleton(n: usize, leaf: usize) -> Self {
        let mut c = Self::empty(n);
        c.insert(leaf);
        c
    }

    /// Builds a set from leaf indices. Panics if an index is `>= n`.
    pub fn from_indices<I: IntoIterator<Item = usize>>(n: usize, indices: I) -> Self {
        let mut c = Self::empty(n);
        for i in indices {
            c.insert(i);
        }
        c
    }

    /// Size of the leaf table this set lives in.
    pub fn universe(&self) -> usize {
        self.0.len()
    }

    pub fn insert(&mut self, leaf: usize) {
        self.0.insert(leaf);
    }

    pub fn remove(&mut self, leaf: usize) {
        self.0.set(leaf, false);
    }

    pub fn contains(&self, leaf: usize) -> bool {
        self.0.contains(leaf)
    }

    pub fn len(&self) -> usize {
        self.0.count_ones(..)
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_clear()
    }

    pub fn is_full(&self) -> bool {
        self.0.is_full()
    }

    pub fn is_subset(&self, other: &Cluster) -> bool {
        self.0.is_subset(&other.0)
    }

    pub fn is_disjoint(&self, other: &Cluster) -> bool {
        self.0.is_disjoint(&other.0)
    }

    pub fn intersects(&self, other: &Cluster) -> bool {
        !self.is_disjoint(other)
    }

    pub fn union(&self, other: &Cluster) -> Cluster {
        let mut out = self.clone();
        out.0.union_with(&other.0);
        out
    }

    pub fn union_with(&mut self, other: &Cluster) {
        self.0.union_with(&other.0);
    }

    pub fn difference(&self, other: &Cluster) -> Cluster {
        let mut out = self.clone();
        out.0.difference_with(&other.0);
        out
    }

    /// Smallest member, if any.
    pub fn first(&self) -> Option<usize> {
        self.0.minimum()
    }

    /// Members in ascending order.
    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.ones()
    }

    /// Re-indexes members through `map` (old index -> new index).
    pub(crate) fn remap(&self, map: &[usize]) -> Cluster {
        Cluster::from_indices(self.universe(), self.iter().map(|i| map[i]))
    }
}

impl Ord for Cluster {
    fn cmp(&self, other: &Self) -> Ordering {
        self.iter()
            .cmp(other.iter())
            .then_with(|| self.universe().cmp(&other.universe()))
    }
}

impl PartialOrd for Cluster {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Cluster {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}
