//! FindPath: shortest paths in the RNNI graph.
//!
//! For each cluster `C_k` of the target, in rank order, the common ancestor
//! of `C_k` in the working tree is pushed down one rank at a time until it
//! sits at rank `k`: by an NNI move when the node just below it is its
//! child, by a rank swap otherwise. The moves form a shortest path when
//! both move types weigh the same.

use crate::moves::{Move, MoveError, Rho};
use crate::tree::{Node, RankedTree, TreeError};
use crate::work::{Step, WorkTree};

/// A start tree plus a sequence of moves.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TreePath {
    start: RankedTree,
    steps: Vec<Step>,
}

impl TreePath {
    pub fn empty(start: RankedTree) -> Self {
        TreePath { start, steps: Vec::new() }
    }

    /// Builds a path from cluster-identified moves, checking each is legal.
    pub fn from_moves(start: RankedTree, moves: &[Move]) -> Result<Self, MoveError> {
        let mut steps = Vec::with_capacity(moves.len());
        let mut cur = start.clone();
        for mv in moves {
            let next = cur.apply(mv)?;
            steps.push(match mv {
                Move::RankSwap { rank } => Step::RankSwap { rank: *rank },
                Move::Nni { rank, stay } => {
                    let [(a, ca), (b, _)] = cur.children_of(*rank)?;
                    Step::Nni { rank: *rank, stay: if ca == *stay { a } else { b } }
                }
            });
            cur = next;
        }
        Ok(TreePath { start, steps })
    }

    /// Builds a path from compact steps, checking each is legal.
    pub fn from_steps(start: RankedTree, steps: Vec<Step>) -> Result<Self, MoveError> {
        let mut w = WorkTree::new(&start);
        for &s in &steps {
            w.apply_step(s)?;
        }
        Ok(TreePath { start, steps })
    }

    pub fn start(&self) -> &RankedTree {
        &self.start
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// Number of moves.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// Sum of move weights: 1 per NNI move, `rho` per rank swap.
    pub fn weight(&self, rho: Rho) -> f64 {
        self.steps.iter().map(|s| rho.weight(s.kind())).sum()
    }

    /// The moves with NNI variants named by their stay cluster.
    pub fn moves(&self) -> Vec<Move> {
        let mut w = WorkTree::new(&self.start);
        self.steps
            .iter()
            .map(|&s| {
                let mv = match s {
                    Step::RankSwap { rank } => Move::RankSwap { rank },
                    Step::Nni { rank, stay } => Move::Nni { rank, stay: w.subtree_cluster(stay) },
                };
                w.apply_step(s).expect("path steps are legal");
                mv
            })
            .collect()
    }

    /// Walks the path on a working tree, calling `visit(i, step, tree)`
    /// after step `i` has been applied. Returns the final working tree.
    pub fn replay<F>(&self, mut visit: F) -> Result<WorkTree, MoveError>
    where
        F: FnMut(usize, Step, &WorkTree),
    {
        let mut w = WorkTree::new(&self.start);
        for (i, &s) in self.steps.iter().enumerate() {
            w.apply_step(s)?;
            visit(i, s, &w);
        }
        Ok(w)
    }

    pub fn end(&self) -> RankedTree {
        self.replay(|_, _, _| {})
            .expect("path steps are legal")
            .to_tree()
    }

    /// Every tree along the path, start and end included.
    pub fn materialize(&self) -> Result<Vec<RankedTree>, MoveError> {
        let mut out = Vec::with_capacity(self.steps.len() + 1);
        out.push(self.start.clone());
        for &s in &self.steps {
            let cur = out.last().unwrap();
            let mv = match s {
                Step::RankSwap { rank } => Move::RankSwap { rank },
                Step::Nni { rank, stay } => {
                    if let Node::Internal(r) = stay {
                        if r == 0 || r > cur.root_rank() {
                            return Err(MoveError::BadStayChild { rank });
                        }
                    } else if let Node::Leaf(l) = stay {
                        if l >= cur.leaf_count() {
                            return Err(MoveError::BadStayChild { rank });
                        }
                    }
                    Move::Nni { rank, stay: cur.node_cluster(stay) }
                }
            };
            let next = cur.apply(&mv)?;
            out.push(next);
        }
        Ok(out)
    }
}

/// Runs FindPath from `from` to `to`.
///
/// Runs in O(n²): the common ancestor of each target cluster is tracked
/// through the two ancestor chains leading up to it, so every move costs
/// O(1) and no intermediate tree is built.
pub fn find_path(from: &RankedTree, to: &RankedTree) -> Result<TreePath, TreeError> {
    let mut steps = Vec::new();
    find_path_with(from, to, |_, s| steps.push(s))?;
    Ok(TreePath { start: from.clone(), steps })
}

/// FindPath distance: the length of the FindPath path, which is the
/// RNNI distance for unit rank-move weight.
pub fn distance(from: &RankedTree, to: &RankedTree) -> Result<usize, TreeError> {
    let mut count = 0usize;
    find_path_with(from, to, |_, _| count += 1)?;
    Ok(count)
}

/// FindPath reporting each step as `emit(k, step)`, where `k` is the rank
/// of the target cluster being built.
pub fn find_path_with<F>(from: &RankedTree, to: &RankedTree, mut emit: F) -> Result<(), TreeError>
where
    F: FnMut(usize, Step),
{
    if !from.same_leaves(to) {
        return Err(TreeError::LeafMismatch);
    }
    let n = from.leaf_count();
    let mut w = WorkTree::new(from);
    let mut x_chain: Vec<usize> = Vec::new();
    let mut y_chain: Vec<usize> = Vec::new();

    for k in 1..n.saturating_sub(1) {
        // The children of C_k in `to` are leaves or clusters of lower rank,
        // which the working tree already induces at the same ranks.
        let [cx, cy] = to.child_nodes(k);
        let mut a = w.node_id(cx);
        let mut b = w.node_id(cy);
        x_chain.clear();
        y_chain.clear();
        while a != b {
            if w.rank_of(a) < w.rank_of(b) {
                x_chain.push(a);
                a = w.parent_of(a);
            } else {
                y_chain.push(b);
                b = w.parent_of(b);
            }
        }
        // `a` is the common ancestor; chain tops are its two children.
        let mut v = a;
        while w.rank_of(v) > k {
            let r = w.rank_of(v);
            let u = w.id_at_rank(r - 1);
            if w.parent_of(u) == v {
                let (chain, other) = if x_chain.last() == Some(&u) {
                    (&mut x_chain, &y_chain)
                } else {
                    (&mut y_chain, &x_chain)
                };
                debug_assert_eq!(chain.last(), Some(&u));
                chain.pop();
                let stay = *chain.last().expect("u lies strictly above a subtree of C_k");
                debug_assert!(other.last().is_some());
                emit(k, Step::Nni { rank: r - 1, stay: w.node_ref(stay) });
                w.nni_unchecked(u, stay);
                v = u;
            } else {
                emit(k, Step::RankSwap { rank: r - 1 });
                w.swap_ranks_unchecked(r - 1);
            }
        }
    }
    Ok(())
}
