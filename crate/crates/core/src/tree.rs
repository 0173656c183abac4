//! Ranked phylogenetic trees in cluster representation.
//!
//! A tree on `n` leaves is the rank-ordered list of the `n - 1` clusters
//! induced by its internal nodes. Ranks are 1-based; leaves sit at rank 0
//! and never take part in interval operations.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

use crate::cluster::Cluster;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("a ranked tree needs at least 2 leaves, got {0}")]
    TooFewLeaves(usize),
    #[error("invalid leaf label {0:?}")]
    InvalidLabel(String),
    #[error("duplicate leaf label {0:?}")]
    DuplicateLeaf(String),
    #[error("cluster at rank {rank} refers to leaf index {index} outside the leaf table")]
    LeafOutOfRange { rank: usize, index: usize },
    #[error("last cluster must contain every leaf")]
    BadRoot,
    #[error("cluster at rank {rank} is not the union of two available subtrees")]
    NotBinary { rank: usize },
    #[error("cluster at rank {rank} is contained in a cluster of lower rank")]
    NotLaminar { rank: usize },
    #[error("rank {rank} outside 1..={max}")]
    RankOutOfBounds { rank: usize, max: usize },
    #[error("trees are over different leaf sets")]
    LeafMismatch,
}

/// A node reference inside one tree: a leaf index or an internal node rank.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Node {
    Leaf(usize),
    Internal(usize),
}

impl Node {
    /// Rank of the node; leaves have rank 0.
    pub fn rank(self) -> usize {
        match self {
            Node::Leaf(_) => 0,
            Node::Internal(r) => r,
        }
    }
}

/// Shared, lexicographically sorted label table.
pub type LeafTable = Arc<[String]>;

pub(crate) fn is_valid_label(s: &str) -> bool {
    !s.is_empty()
        && s
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-'))
}

/// An immutable, validated ranked tree.
///
/// Equality and hashing consider only the leaf table and the cluster list,
/// which together are canonical.
#[derive(Clone)]
pub struct RankedTree {
    leaves: LeafTable,
    clusters: Vec<Cluster>,
    // children[t - 1]: the two children of the node of rank t; the first
    // holds the smaller minimum leaf.
    children: Vec<[Node; 2]>,
    // parent rank of each leaf
    leaf_parent: Vec<usize>,
    // parent rank of each internal node by rank - 1; 0 for the root
    node_parent: Vec<usize>,
}

impl RankedTree {
    /// Validates a cluster list over `labels` and builds the tree.
    ///
    /// Labels may come in any order; they are sorted and cluster indices are
    /// remapped to the canonical leaf order.
    pub fn from_clusters(labels: Vec<String>, clusters: Vec<Cluster>) -> Result<Self, TreeError> {
        let n = labels.len();
        if n < 2 {
            return Err(TreeError::TooFewLeaves(n));
        }
        if let Some(bad) = labels.iter().find(|l| !is_valid_label(l)) {
            return Err(TreeError::InvalidLabel(bad.clone()));
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| labels[a].cmp(&labels[b]));
        for w in order.windows(2) {
            if labels[w[0]] == labels[w[1]] {
                return Err(TreeError::DuplicateLeaf(labels[w[0]].clone()));
            }
        }
        for (t, c) in clusters.iter().enumerate() {
            if c.universe() != n {
                let index = c.iter().find(|&i| i >= n).unwrap_or(c.universe());
                return Err(TreeError::LeafOutOfRange { rank: t + 1, index });
            }
        }
        let sorted = order.iter().enumerate().all(|(i, &o)| i == o);
        let (leaves, clusters): (LeafTable, Vec<Cluster>) = if sorted {
            (labels.into(), clusters)
        } else {
            let mut new_index = vec![0; n];
            for (new, &old) in order.iter().enumerate() {
                new_index[old] = new;
            }
            let leaves: Vec<String> = order.iter().map(|&o| labels[o].clone()).collect();
            let clusters = clusters.iter().map(|c| c.remap(&new_index)).collect();
            (leaves.into(), clusters)
        };
        Self::from_canonical(leaves, clusters)
    }

    /// Builds a tree over an already canonical leaf table.
    pub fn with_leaf_table(leaves: LeafTable, clusters: Vec<Cluster>) -> Result<Self, TreeError> {
        let n = leaves.len();
        if n < 2 {
            return Err(TreeError::TooFewLeaves(n));
        }
        debug_assert!(leaves.windows(2).all(|w| w[0] < w[1]));
        if let Some((t, c)) = clusters.iter().enumerate().find(|(_, c)| c.universe() != n) {
            return Err(TreeError::LeafOutOfRange { rank: t + 1, index: c.universe() });
        }
        Self::from_canonical(leaves, clusters)
    }

    // Replays the bottom-up merge process: every cluster must be the union
    // of exactly two blocks that are still available at its rank.
    fn from_canonical(leaves: LeafTable, clusters: Vec<Cluster>) -> Result<Self, TreeError> {
        let n = leaves.len();
        match clusters.last() {
            Some(root) if root.is_full() => {}
            _ => return Err(TreeError::BadRoot),
        }
        let mut top: Vec<Node> = (0..n).map(Node::Leaf).collect();
        let mut children = Vec::with_capacity(clusters.len());
        let mut leaf_parent = vec![0; n];
        let mut node_parent = vec![0; clusters.len()];

        let block_within = |node: Node, c: &Cluster, clusters: &[Cluster]| match node {
            Node::Leaf(_) => true,
            Node::Internal(r) => clusters[r - 1].is_subset(c),
        };

        for (i, c) in clusters.iter().enumerate() {
            let rank = i + 1;
            if c.len() < 2 {
                return Err(TreeError::NotBinary { rank });
            }
            let first = c.first().expect("non-empty");
            let b1 = top[first];
            if let Node::Internal(r) = b1 {
                if c.is_subset(&clusters[r - 1]) {
                    return Err(TreeError::NotLaminar { rank });
                }
            }
            if !block_within(b1, c, &clusters) {
                return Err(TreeError::NotBinary { rank });
            }
            let rest = match b1 {
                Node::Leaf(l) => {
                    let mut r = c.clone();
                    r.remove(l);
                    r
                }
                Node::Internal(r) => c.difference(&clusters[r - 1]),
            };
            let second = rest.first().expect("c is not contained in its first block");
            let b2 = top[second];
            if !block_within(b2, c, &clusters) {
                return Err(TreeError::NotBinary { rank });
            }
            let covered = match b2 {
                Node::Leaf(_) => rest.len() == 1,
                Node::Internal(r) => clusters[r - 1] == rest,
            };
            if !covered {
                return Err(TreeError::NotBinary { rank });
            }
            for b in [b1, b2] {
                match b {
                    Node::Leaf(l) => leaf_parent[l] = rank,
                    Node::Internal(r) => node_parent[r - 1] = rank,
                }
            }
            for leaf in c.iter() {
                top[leaf] = Node::Internal(rank);
            }
            children.push([b1, b2]);
        }
        debug_assert_eq!(clusters.len(), n - 1);
        Ok(RankedTree {
            leaves,
            clusters,
            children,
            leaf_parent,
            node_parent,
        })
    }

    /// Convenience constructor from label sets, e.g. `&[&["a1","a2"], &["a1","a2","a3"]]`.
    /// The leaf table is the union of all labels.
    pub fn from_label_sets<S: AsRef<str>>(sets: &[&[S]]) -> Result<Self, TreeError> {
        let mut labels: Vec<String> = sets
            .iter()
            .flat_map(|s| s.iter().map(|l| l.as_ref().to_string()))
            .collect();
        labels.sort();
        labels.dedup();
        let n = labels.len();
        let clusters = sets
            .iter()
            .map(|s| {
                Cluster::from_indices(
                    n,
                    s.iter()
                        .map(|l| labels.binary_search_by(|x| x.as_str().cmp(l.as_ref())).unwrap()),
                )
            })
            .collect();
        Self::from_clusters(labels, clusters)
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.leaves
    }

    pub fn leaf_table(&self) -> &LeafTable {
        &self.leaves
    }

    pub fn leaf_index(&self, label: &str) -> Option<usize> {
        self.leaves.binary_search_by(|l| l.as_str().cmp(label)).ok()
    }

    /// Highest rank, i.e. the root's rank `n - 1`.
    pub fn root_rank(&self) -> usize {
        self.clusters.len()
    }

    pub fn clusters(&self) -> &[Cluster] {
        &self.clusters
    }

    pub fn into_clusters(self) -> Vec<Cluster> {
        self.clusters
    }

    /// Cluster induced by the node of rank `t`.
    pub fn cluster(&self, t: usize) -> Result<&Cluster, TreeError> {
        self.check_rank(t, self.root_rank())?;
        Ok(&self.clusters[t - 1])
    }

    /// Cluster below a node reference; singletons for leaves.
    pub fn node_cluster(&self, node: Node) -> Cluster {
        match node {
            Node::Leaf(l) => Cluster::singleton(self.leaf_count(), l),
            Node::Internal(r) => self.clusters[r - 1].clone(),
        }
    }

    pub fn same_leaves(&self, other: &RankedTree) -> bool {
        Arc::ptr_eq(&self.leaves, &other.leaves) || self.leaves == other.leaves
    }

    pub(crate) fn check_rank(&self, t: usize, max: usize) -> Result<(), TreeError> {
        if t == 0 || t > max {
            Err(TreeError::RankOutOfBounds { rank: t, max })
        } else {
            Ok(())
        }
    }

    /// Rank of the most recent common ancestor of `s`: the smallest `t`
    /// with `s ⊆ C_t`.
    pub fn mrca_rank(&self, s: &Cluster) -> usize {
        if s.len() == 1 {
            return self.leaf_parent[s.first().unwrap()];
        }
        self.clusters
            .iter()
            .position(|c| s.is_subset(c))
            .map(|i| i + 1)
            .unwrap_or(self.root_rank())
    }

    /// Whether the node of rank `t + 1` is the parent of the node of rank `t`.
    pub fn is_edge_interval(&self, t: usize) -> Result<bool, TreeError> {
        self.check_rank(t, self.root_rank().saturating_sub(1))?;
        Ok(self.node_parent[t - 1] == t + 1)
    }

    /// Parent rank of a node, `None` for the root.
    pub fn parent_rank(&self, node: Node) -> Option<usize> {
        let p = match node {
            Node::Leaf(l) => self.leaf_parent[l],
            Node::Internal(r) => self.node_parent[r - 1],
        };
        (p != 0).then_some(p)
    }

    /// The two children of the node of rank `t`, each with its cluster.
    pub fn children_of(&self, t: usize) -> Result<[(Node, Cluster); 2], TreeError> {
        self.check_rank(t, self.root_rank())?;
        let [a, b] = self.children[t - 1];
        Ok([(a, self.node_cluster(a)), (b, self.node_cluster(b))])
    }

    /// Child node references of rank `t`, without materializing clusters.
    pub fn child_nodes(&self, t: usize) -> [Node; 2] {
        self.children[t - 1]
    }
}

impl PartialEq for RankedTree {
    fn eq(&self, other: &Self) -> bool {
        self.clusters == other.clusters && self.same_leaves(other)
    }
}

impl Eq for RankedTree {}

impl Hash for RankedTree {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.leaves.hash(state);
        self.clusters.hash(state);
    }
}

impl PartialOrd for RankedTree {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Lexicographic on the leaf table, then on the cluster list.
impl Ord for RankedTree {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.leaves
            .cmp(&other.leaves)
            .then_with(|| self.clusters.cmp(&other.clusters))
    }
}

impl fmt::Debug for RankedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::io::to_cluster_format(self))
    }
}

impl fmt::Display for RankedTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::io::to_cluster_format(self))
    }
}
