//! Fixed-width node sets.

use std::fmt;

/// Upper bound on the number of nodes in any configuration.
pub const MAX_NODES: usize = 8;

/// Node identifiers are dense integers `0..node_count`.
pub type NodeId = usize;

/// A set of node identifiers below [`MAX_NODES`], stored as a bit set.
#[derive(Clone, Copy, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct NodeSet(u8);

impl NodeSet {
    pub const EMPTY: NodeSet = NodeSet(0);

    pub const fn from_bits(bits: u8) -> Self {
        NodeSet(bits)
    }

    pub const fn bits(self) -> u8 {
        self.0
    }

    /// All identifiers `0..n`.
    pub fn full(n: usize) -> Self {
        debug_assert!(n <= MAX_NODES);
        NodeSet(((1u16 << n) - 1) as u8)
    }

    pub fn singleton(n: NodeId) -> Self {
        debug_assert!(n < MAX_NODES);
        NodeSet(1 << n)
    }

    pub fn contains(self, n: NodeId) -> bool {
        n < MAX_NODES && self.0 & (1 << n) != 0
    }

    pub fn insert(&mut self, n: NodeId) {
        self.0 |= 1 << n;
    }

    pub fn remove(&mut self, n: NodeId) {
        self.0 &= !(1 << n);
    }

    #[must_use]
    pub fn with(self, n: NodeId) -> Self {
        NodeSet(self.0 | (1 << n))
    }

    #[must_use]
    pub fn without(self, n: NodeId) -> Self {
        NodeSet(self.0 & !(1 << n))
    }

    #[must_use]
    pub fn union(self, other: NodeSet) -> Self {
        NodeSet(self.0 | other.0)
    }

    #[must_use]
    pub fn intersection(self, other: NodeSet) -> Self {
        NodeSet(self.0 & other.0)
    }

    #[must_use]
    pub fn difference(self, other: NodeSet) -> Self {
        NodeSet(self.0 & !other.0)
    }

    pub fn is_subset(self, other: NodeSet) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    /// Members in ascending order.
    pub fn iter(self) -> Iter {
        Iter(self.0)
    }

    /// Image of the set under a node mapping.
    pub fn map(self, mapping: &[u8]) -> Self {
        let mut out = 0u8;
        for n in self.iter() {
            out |= 1 << mapping[n];
        }
        NodeSet(out)
    }
}

impl FromIterator<NodeId> for NodeSet {
    fn from_iter<I: IntoIterator<Item = NodeId>>(iter: I) -> Self {
        let mut set = NodeSet::EMPTY;
        for n in iter {
            set.insert(n);
        }
        set
    }
}

impl IntoIterator for NodeSet {
    type Item = NodeId;
    type IntoIter = Iter;

    fn into_iter(self) -> Iter {
        self.iter()
    }
}

pub struct Iter(u8);

impl Iterator for Iter {
    type Item = NodeId;

    fn next(&mut self) -> Option<NodeId> {
        if self.0 == 0 {
            return None;
        }
        let n = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(n)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = self.0.count_ones() as usize;
        (n, Some(n))
    }
}

impl ExactSizeIterator for Iter {}

impl fmt::Debug for NodeSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Letter used for a node in human-readable output (`0 -> a`, `1 -> b`, ...).
pub fn node_name(n: NodeId) -> char {
    (b'a' + n as u8) as char
}
