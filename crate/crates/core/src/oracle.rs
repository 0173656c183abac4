//! Brute-force ground truth on small leaf counts.
//!
//! Enumerates every ranked tree, builds the explicit RNNI graph, and
//! answers distance queries by breadth-first or uniform-cost search. Also
//! provides the rooted NNI distance on unranked topologies.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::sync::OnceLock;

use thiserror::Error;

use crate::cluster::Cluster;
use crate::generate::default_labels;
use crate::moves::{MoveKind, Rho};
use crate::tree::{LeafTable, RankedTree};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{n} leaves exceeds the oracle cap of {cap}")]
    TooLarge { n: usize, cap: usize },
    #[error("a ranked tree needs at least 2 leaves, got {0}")]
    TooSmall(usize),
    #[error("tree is not a vertex of this graph")]
    VertexMissing,
}

/// Size limits for exhaustive computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest leaf count for ranked enumeration and graph construction.
    pub ranked: usize,
    /// Largest leaf count for unranked NNI searches.
    pub unranked: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps { ranked: 7, unranked: 6 }
    }
}

fn check_size(n: usize, cap: usize) -> Result<(), OracleError> {
    if n < 2 {
        Err(OracleError::TooSmall(n))
    } else if n > cap {
        Err(OracleError::TooLarge { n, cap })
    } else {
        Ok(())
    }
}

/// All ranked trees on leaves `a1..an`, sorted canonically.
pub fn enumerate_trees(n: usize) -> Result<Vec<RankedTree>, OracleError> {
    enumerate_trees_capped(n, Caps::default().ranked)
}

pub fn enumerate_trees_capped(n: usize, cap: usize) -> Result<Vec<RankedTree>, OracleError> {
    check_size(n, cap)?;
    let leaves = default_labels(n);
    let mut out = Vec::new();
    let blocks: Vec<Cluster> = (0..n).map(|i| Cluster::singleton(n, i)).collect();
    merge_all(&leaves, blocks, &mut Vec::with_capacity(n - 1), &mut out);
    out.sort();
    out.dedup();
    Ok(out)
}

// Every way of merging two of the current blocks, recursively.
fn merge_all(
    leaves: &LeafTable,
    blocks: Vec<Cluster>,
    clusters: &mut Vec<Cluster>,
    out: &mut Vec<RankedTree>,
) {
    if blocks.len() == 1 {
        out.push(
            RankedTree::with_leaf_table(leaves.clone(), clusters.clone())
                .expect("merge process yields valid trees"),
        );
        return;
    }
    for i in 0..blocks.len() {
        for j in i + 1..blocks.len() {
            let merged = blocks[i].union(&blocks[j]);
            let mut next: Vec<Cluster> = blocks
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != i && k != j)
                .map(|(_, b)| b.clone())
                .collect();
            next.push(merged.clone());
            clusters.push(merged);
            merge_all(leaves, next, clusters, out);
            clusters.pop();
        }
    }
}

/// The explicit RNNI graph on all ranked trees with `n` leaves.
#[derive(Debug)]
pub struct TreeSpaceGraph {
    n: usize,
    vertices: Vec<RankedTree>,
    index: HashMap<RankedTree, usize>,
    adjacency: Vec<Vec<(usize, MoveKind)>>,
    rank_classes: OnceLock<(Vec<usize>, usize)>,
}

/// A largest distance together with the lexicographically smallest pair
/// of vertex indices attaining it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diameter {
    pub value: f64,
    pub pair: (usize, usize),
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl TreeSpaceGraph {
    pub fn build(n: usize) -> Result<Self, OracleError> {
        Self::build_capped(n, Caps::default().ranked)
    }

    pub fn build_capped(n: usize, cap: usize) -> Result<Self, OracleError> {
        let vertices = enumerate_trees_capped(n, cap)?;
        let index: HashMap<RankedTree, usize> =
            vertices.iter().cloned().enumerate().map(|(i, t)| (t, i)).collect();
        let adjacency = vertices
            .iter()
            .map(|t| {
                t.neighbors(Rho::ONE)
                    .into_iter()
                    .map(|(m, nb, _)| (index[&nb], m.kind()))
                    .collect()
            })
            .collect();
        Ok(TreeSpaceGraph {
            n,
            vertices,
            index,
            adjacency,
            rank_classes: OnceLock::new(),
        })
    }

    pub fn leaf_count(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[RankedTree] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, tree: &RankedTree) -> Option<usize> {
        self.index.get(tree).copied()
    }

    pub fn adjacency(&self, v: usize) -> &[(usize, MoveKind)] {
        &self.adjacency[v]
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Undirected edges `(i, j, kind)` with `i < j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, MoveKind)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(i, adj)| {
            adj.iter()
                .filter(move |&&(j, _)| i < j)
                .map(move |&(j, k)| (i, j, k))
        })
    }

    pub fn is_symmetric(&self) -> bool {
        self.adjacency.iter().enumerate().all(|(i, adj)| {
            adj.iter()
                .all(|&(j, k)| self.adjacency[j].iter().any(|&(b, bk)| b == i && bk == k))
        })
    }

    pub fn is_connected(&self) -> bool {
        self.bfs(0).iter().all(|&d| d != usize::MAX)
    }

    /// Unit-weight hop counts from `source`; `usize::MAX` if unreachable.
    pub fn bfs(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::from([source]);
        dist[source] = 0;
        while let Some(v) = queue.pop_front() {
            for &(w, _) in &self.adjacency[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    // Classes of trees joined by rank moves, i.e. sharing a topology.
    fn rank_classes(&self) -> &(Vec<usize>, usize) {
        self.rank_classes.get_or_init(|| {
            let mut class = vec![usize::MAX; self.len()];
            let mut count = 0;
            for s in 0..self.len() {
                if class[s] != usize::MAX {
                    continue;
                }
                class[s] = count;
                let mut stack = vec![s];
                while let Some(v) = stack.pop() {
                    for &(w, k) in &self.adjacency[v] {
                        if k == MoveKind::RankSwap && class[w] == usize::MAX {
                            class[w] = count;
                            stack.push(w);
                        }
                    }
                }
                count += 1;
            }
            (class, count)
        })
    }

    /// Minimal path weights from `source` in RNNI(rho).
    pub fn distances_from(&self, source: usize, rho: Rho) -> Vec<f64> {
        let r = rho.value();
        if r == 1.0 {
            return self.bfs(source).into_iter().map(|d| d as f64).collect();
        }
        if r == 0.0 {
            // zero-weight rank moves: search the quotient by rank classes
            let (class, count) = self.rank_classes();
            let mut members: Vec<Vec<usize>> = vec![Vec::new(); *count];
            for (v, &c) in class.iter().enumerate() {
                members[c].push(v);
            }
            let mut cdist = vec![usize::MAX; *count];
            let mut queue = VecDeque::from([class[source]]);
            cdist[class[source]] = 0;
            while let Some(c) = queue.pop_front() {
                for &v in &members[c] {
                    for &(w, k) in &self.adjacency[v] {
                        let cw = class[w];
                        if k == MoveKind::Nni && cdist[cw] == usize::MAX {
                            cdist[cw] = cdist[c] + 1;
                            queue.push_back(cw);
                        }
                    }
                }
            }
            return class.iter().map(|&c| cdist[c] as f64).collect();
        }
        let mut dist = vec![f64::INFINITY; self.len()];
        let mut heap = BinaryHeap::from([Entry(0.0, source)]);
        dist[source] = 0.0;
        while let Some(Entry(d, v)) = heap.pop() {
            if d > dist[v] {
                continue;
            }
            for &(w, k) in &self.adjacency[v] {
                let nd = d + rho.weight(k);
                if nd < dist[w] {
                    dist[w] = nd;
                    heap.push(Entry(nd, w));
                }
            }
        }
        dist
    }

    /// Minimal path weight between two trees in RNNI(rho).
    pub fn graph_distance(&self, from: &RankedTree, to: &RankedTree, rho: Rho) -> Result<f64, OracleError> {
        let s = self.index_of(from).ok_or(OracleError::VertexMissing)?;
        let t = self.index_of(to).ok_or(OracleError::VertexMissing)?;
        Ok(self.distances_from(s, rho)[t])
    }

    /// Largest pairwise distance, with the smallest witnessing pair.
    pub fn diameter(&self, rho: Rho) -> Diameter {
        let mut best = Diameter { value: 0.0, pair: (0, 0) };
        for s in 0..self.len() {
            let d = self.distances_from(s, rho);
            for (t, &dt) in d.iter().enumerate().skip(s + 1) {
                if dt > best.value {
                    best = Diameter { value: dt, pair: (s, t) };
                }
            }
        }
        best
    }
}

/// Rooted topology: the set of internal clusters, ranks ignored.
type Topology = Vec<Cluster>;

fn topology(tree: &RankedTree) -> Topology {
    let mut t = tree.clusters().to_vec();
    t.sort();
    t
}

// Rooted NNI neighbours: every internal non-root edge, both variants.
fn unranked_neighbors(top: &Topology, n: usize) -> Vec<Topology> {
    let mut out = Vec::new();
    for (ci, c) in top.iter().enumerate() {
        if c.is_full() {
            continue;
        }
        let parent = top
            .iter()
            .filter(|p| c.is_subset(p) && *p != c)
            .min_by_key(|p| p.len())
            .expect("non-root cluster has a parent");
        let sibling = parent.difference(c);
        let first = c.first().unwrap();
        let child1 = top
            .iter()
            .filter(|x| x.is_subset(c) && *x != c && x.contains(first))
            .max_by_key(|x| x.len())
            .cloned()
            .unwrap_or_else(|| Cluster::singleton(n, first));
        let child2 = c.difference(&child1);
        for keep in [&child1, &child2] {
            let mut next = top.clone();
            next[ci] = keep.union(&sibling);
            next.sort();
            out.push(next);
        }
    }
    out
}

/// Rooted NNI distance between the topologies of two trees, ignoring
/// ranks. Exponential; bounded by the unranked cap.
pub fn unranked_nni_distance(from: &RankedTree, to: &RankedTree) -> Result<usize, OracleError> {
    unranked_nni_distance_capped(from, to, Caps::default().unranked)
}

pub fn unranked_nni_distance_capped(
    from: &RankedTree,
    to: &RankedTree,
    cap: usize,
) -> Result<usize, OracleError> {
    let n = from.leaf_count();
    check_size(n, cap)?;
    if !from.same_leaves(to) {
        return Err(OracleError::VertexMissing);
    }
    let start = topology(from);
    let goal = topology(to);
    let mut seen: HashMap<Topology, usize> = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        let d = seen[&t];
        if t == goal {
            return Ok(d);
        }
        for nb in unranked_neighbors(&t, n) {
            if !seen.contains_key(&nb) {
                seen.insert(nb.clone(), d + 1);
                queue.push_back(nb);
            }
        }
    }
    unreachable!("rooted NNI graph is connected")
}

/// All unranked distances from one topology, keyed by topology.
pub fn unranked_distances_from(tree: &RankedTree) -> HashMap<Vec<Cluster>, usize> {
    let n = tree.leaf_count();
    let start = topology(tree);
    let mut seen = HashMap::from([(start.clone(), 0)]);
    let mut queue = VecDeque::from([start]);
    while let Some(t) = queue.pop_front() {
        let d = seen[&t];
        for nb in unranked_neighbors(&t, n) {
            if !seen.contains_key(&nb) {
                seen.insert(nb.clone(), d + 1);
                queue.push_back(nb);
            }
        }
    }
    seen
}

/// Sorted cluster set of a tree, the key used by [`unranked_distances_from`].
pub fn topology_key(tree: &RankedTree) -> Vec<Cluster> {
    topology(tree)
}
