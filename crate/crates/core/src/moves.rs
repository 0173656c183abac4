//! RNNI moves: rank swaps and NNI moves on intervals of consecutive ranks.

use std::fmt;

use thiserror::Error;

use crate::cluster::Cluster;
use crate::tree::{Node, RankedTree, TreeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MoveError {
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("{kind} move is not legal on interval [{rank}, {}]", rank + 1)]
    IllegalMove { kind: MoveKind, rank: usize },
    #[error("stay cluster is not a child of the node of rank {rank}")]
    BadStayChild { rank: usize },
    #[error("no NNI move at rank {rank} lowers the common ancestor of the target")]
    NoDecreasingMove { rank: usize },
    #[error("rho must be a finite nonnegative number, got {0}")]
    BadRho(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    RankSwap,
    Nni,
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MoveKind::RankSwap => "rank",
            MoveKind::Nni => "nni",
        })
    }
}

/// One RNNI move acting on the interval `[rank, rank + 1]`.
///
/// An NNI move is identified by the child cluster of the lower node that
/// stays below it; the other child trades places with the upper node's
/// remaining child.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Move {
    RankSwap { rank: usize },
    Nni { rank: usize, stay: Cluster },
}

impl Move {
    pub fn rank(&self) -> usize {
        match *self {
            Move::RankSwap { rank } | Move::Nni { rank, .. } => rank,
        }
    }

    pub fn kind(&self) -> MoveKind {
        match self {
            Move::RankSwap { .. } => MoveKind::RankSwap,
            Move::Nni { .. } => MoveKind::Nni,
        }
    }
}

/// Weight of a rank move; NNI moves always weigh 1.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Rho(f64);

impl Rho {
    pub const ONE: Rho = Rho(1.0);
    pub const ZERO: Rho = Rho(0.0);

    pub fn new(value: f64) -> Result<Self, MoveError> {
        if value.is_finite() && value >= 0.0 {
            Ok(Rho(value))
        } else {
            Err(MoveError::BadRho(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn weight(self, kind: MoveKind) -> f64 {
        match kind {
            MoveKind::RankSwap => self.0,
            MoveKind::Nni => 1.0,
        }
    }
}

impl Default for Rho {
    fn default() -> Self {
        Rho::ONE
    }
}

impl RankedTree {
    fn check_interval(&self, rank: usize) -> Result<(), TreeError> {
        self.check_rank(rank, self.root_rank().saturating_sub(1))
    }

    /// Applies a legal move and returns the resulting tree.
    pub fn apply(&self, mv: &Move) -> Result<RankedTree, MoveError> {
        let t = mv.rank();
        self.check_interval(t)?;
        let edge = self.is_edge_interval(t)?;
        let mut clusters = self.clusters().to_vec();
        match mv {
            Move::RankSwap { .. } => {
                if edge {
                    return Err(MoveError::IllegalMove { kind: MoveKind::RankSwap, rank: t });
                }
                clusters.swap(t - 1, t);
            }
            Move::Nni { stay, .. } => {
                if !edge {
                    return Err(MoveError::IllegalMove { kind: MoveKind::Nni, rank: t });
                }
                let [(_, a), (_, b)] = self.children_of(t)?;
                if *stay != a && *stay != b {
                    return Err(MoveError::BadStayChild { rank: t });
                }
                let upper = self.child_nodes(t + 1);
                let sibling = if upper[0] == Node::Internal(t) { upper[1] } else { upper[0] };
                clusters[t - 1] = stay.union(&self.node_cluster(sibling));
            }
        }
        Ok(RankedTree::with_leaf_table(self.leaf_table().clone(), clusters)?)
    }

    /// Every move available on this tree, in interval order.
    ///
    /// Edge intervals offer two NNI variants, other intervals one rank swap.
    pub fn available_moves(&self) -> Vec<Move> {
        let mut out = Vec::new();
        for t in 1..self.root_rank() {
            if self.is_edge_interval(t).expect("rank in range") {
                for (_, c) in self.children_of(t).expect("rank in range") {
                    out.push(Move::Nni { rank: t, stay: c });
                }
            } else {
                out.push(Move::RankSwap { rank: t });
            }
        }
        out
    }

    /// All RNNI neighbours with the move that reaches each and its weight.
    pub fn neighbors(&self, rho: Rho) -> Vec<(Move, RankedTree, f64)> {
        self.available_moves()
            .into_iter()
            .map(|m| {
                let next = self.apply(&m).expect("enumerated moves are legal");
                let w = rho.weight(m.kind());
                (m, next, w)
            })
            .collect()
    }

    /// The unique NNI move on the edge `[rank, rank + 1]` that lowers the
    /// most recent common ancestor of `target` from `rank + 1` to `rank`.
    pub fn decreasing_nni(&self, rank: usize, target: &Cluster) -> Result<Move, MoveError> {
        self.check_interval(rank)?;
        let fail = || MoveError::NoDecreasingMove { rank };
        if !self.is_edge_interval(rank)? || self.mrca_rank(target) != rank + 1 {
            return Err(fail());
        }
        let [(_, a), (_, b)] = self.children_of(rank)?;
        let upper = self.child_nodes(rank + 1);
        let sibling = if upper[0] == Node::Internal(rank) { upper[1] } else { upper[0] };
        if !self.node_cluster(sibling).intersects(target) {
            return Err(fail());
        }
        let stay = match (a.intersects(target), b.intersects(target)) {
            (true, false) => a,
            (false, true) => b,
            _ => return Err(fail()),
        };
        Ok(Move::Nni { rank, stay })
    }
}
