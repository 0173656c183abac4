//! Mutable pointer-based tree used for walking long move sequences.
//!
//! Nodes have stable ids: leaves `0..n`, internal nodes `n..2n-1`. A rank
//! swap or NNI move is O(1) here, unlike [`RankedTree::apply`] which
//! rebuilds the cluster list.

use crate::cluster::Cluster;
use crate::moves::{MoveError, MoveKind};
use crate::tree::{LeafTable, Node, RankedTree};

const NONE: usize = usize::MAX;

/// A compact move whose NNI variant is named by a node of the tree it
/// applies to, rather than by a cluster.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Step {
    RankSwap { rank: usize },
    Nni { rank: usize, stay: Node },
}

impl Step {
    pub fn rank(self) -> usize {
        match self {
            Step::RankSwap { rank } | Step::Nni { rank, .. } => rank,
        }
    }

    pub fn kind(self) -> MoveKind {
        match self {
            Step::RankSwap { .. } => MoveKind::RankSwap,
            Step::Nni { .. } => MoveKind::Nni,
        }
    }
}

#[derive(Debug, Clone)]
pub struct WorkTree {
    leaves: LeafTable,
    parent: Vec<usize>,
    children: Vec<[usize; 2]>,
    rank: Vec<usize>,
    at_rank: Vec<usize>,
}

impl WorkTree {
    pub fn new(tree: &RankedTree) -> Self {
        let n = tree.leaf_count();
        let internal = n - 1;
        let id = |node: Node| match node {
            Node::Leaf(l) => l,
            Node::Internal(r) => n + r - 1,
        };
        let mut parent = vec![NONE; n + internal];
        let mut children = Vec::with_capacity(internal);
        let mut rank = vec![0; n + internal];
        let mut at_rank = vec![NONE; internal + 1];
        for t in 1..=internal {
            let me = n + t - 1;
            let [a, b] = tree.child_nodes(t);
            let pair = [id(a), id(b)];
            parent[pair[0]] = me;
            parent[pair[1]] = me;
            children.push(pair);
            rank[me] = t;
            at_rank[t] = me;
        }
        WorkTree {
            leaves: tree.leaf_table().clone(),
            parent,
            children,
            rank,
            at_rank,
        }
    }

    pub fn leaf_count(&self) -> usize {
        self.leaves.len()
    }

    pub fn root_rank(&self) -> usize {
        self.leaves.len() - 1
    }

    pub(crate) fn node_id(&self, node: Node) -> usize {
        match node {
            Node::Leaf(l) => l,
            Node::Internal(r) => self.at_rank[r],
        }
    }

    pub(crate) fn node_ref(&self, id: usize) -> Node {
        if id < self.leaf_count() {
            Node::Leaf(id)
        } else {
            Node::Internal(self.rank[id])
        }
    }

    pub(crate) fn rank_of(&self, id: usize) -> usize {
        self.rank[id]
    }

    pub(crate) fn parent_of(&self, id: usize) -> usize {
        self.parent[id]
    }

    pub(crate) fn id_at_rank(&self, t: usize) -> usize {
        self.at_rank[t]
    }

    fn kids(&self, id: usize) -> [usize; 2] {
        self.children[id - self.leaf_count()]
    }

    /// Children of the node of rank `t` as node references.
    pub fn child_nodes(&self, t: usize) -> [Node; 2] {
        let [a, b] = self.kids(self.at_rank[t]);
        [self.node_ref(a), self.node_ref(b)]
    }

    pub fn is_edge_interval(&self, t: usize) -> bool {
        self.parent[self.at_rank[t]] == self.at_rank[t + 1]
    }

    /// Whether the node of rank `t` has the same child nodes as rank `t`
    /// of `tree`. If this holds for all ranks `1..=k`, the first `k`
    /// clusters of both trees coincide.
    pub fn same_children_as(&self, tree: &RankedTree, t: usize) -> bool {
        let [a, b] = self.child_nodes(t);
        let [x, y] = tree.child_nodes(t);
        (a == x && b == y) || (a == y && b == x)
    }

    /// Exchanges the ranks of the nodes at `t` and `t + 1`.
    pub(crate) fn swap_ranks_unchecked(&mut self, t: usize) {
        let lo = self.at_rank[t];
        let hi = self.at_rank[t + 1];
        self.at_rank.swap(t, t + 1);
        self.rank[lo] = t + 1;
        self.rank[hi] = t;
    }

    /// NNI on the edge from node `lower` (rank t) to its parent: `stay`
    /// remains under `lower`, its sibling swaps with the parent's other child.
    pub(crate) fn nni_unchecked(&mut self, lower: usize, stay: usize) {
        let n = self.leaf_count();
        let upper = self.parent[lower];
        let lk = self.kids(lower);
        let moving = if lk[0] == stay { lk[1] } else { lk[0] };
        let uk = self.kids(upper);
        let (slot, incoming) = if uk[0] == lower { (1, uk[1]) } else { (0, uk[0]) };
        self.children[lower - n] = [stay, incoming];
        self.children[upper - n][slot] = moving;
        self.parent[incoming] = lower;
        self.parent[moving] = upper;
    }

    /// Applies a step after checking it is legal on the current tree.
    pub fn apply_step(&mut self, step: Step) -> Result<(), MoveError> {
        let t = step.rank();
        if t == 0 || t >= self.root_rank() {
            return Err(MoveError::Tree(crate::tree::TreeError::RankOutOfBounds {
                rank: t,
                max: self.root_rank().saturating_sub(1),
            }));
        }
        let edge = self.is_edge_interval(t);
        match step {
            Step::RankSwap { .. } => {
                if edge {
                    return Err(MoveError::IllegalMove { kind: MoveKind::RankSwap, rank: t });
                }
                self.swap_ranks_unchecked(t);
            }
            Step::Nni { stay, .. } => {
                if !edge {
                    return Err(MoveError::IllegalMove { kind: MoveKind::Nni, rank: t });
                }
                let lower = self.at_rank[t];
                let valid = match stay {
                    Node::Leaf(l) => l < self.leaf_count(),
                    Node::Internal(r) => r >= 1 && r < t,
                };
                if !valid || !self.kids(lower).contains(&self.node_id(stay)) {
                    return Err(MoveError::BadStayChild { rank: t });
                }
                let stay = self.node_id(stay);
                self.nni_unchecked(lower, stay);
            }
        }
        Ok(())
    }

    /// Leaves below a node, O(size of subtree).
    pub fn subtree_cluster(&self, node: Node) -> Cluster {
        let n = self.leaf_count();
        let mut out = Cluster::empty(n);
        let mut stack = vec![self.node_id(node)];
        while let Some(id) = stack.pop() {
            if id < n {
                out.insert(id);
            } else {
                stack.extend(self.kids(id));
            }
        }
        out
    }

    /// All clusters in rank order.
    pub fn clusters(&self) -> Vec<Cluster> {
        let n = self.leaf_count();
        let mut by_id: Vec<Option<Cluster>> = vec![None; self.parent.len()];
        let mut out = Vec::with_capacity(n - 1);
        for t in 1..n {
            let id = self.at_rank[t];
            let mut c = Cluster::empty(n);
            for k in self.kids(id) {
                if k < n {
                    c.insert(k);
                } else {
                    c.union_with(by_id[k].as_ref().expect("children have lower rank"));
                }
            }
            by_id[id] = Some(c.clone());
            out.push(c);
        }
        out
    }

    pub fn to_tree(&self) -> RankedTree {
        RankedTree::with_leaf_table(self.leaves.clone(), self.clusters())
            .expect("working tree stays a valid ranked tree")
    }
}
