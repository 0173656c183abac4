//! Tree generators: uniform random ranked trees and caterpillars.

use rand::Rng;

use crate::cluster::Cluster;
use crate::tree::{LeafTable, RankedTree};

/// Labels `a1..an`, sorted into canonical order.
pub fn default_labels(n: usize) -> LeafTable {
    let mut labels: Vec<String> = (1..=n).map(|i| format!("a{i}")).collect();
    labels.sort();
    labels.into()
}

/// Number of ranked trees on `n` leaves, `(n-1)! n! / 2^(n-1)`, or `None`
/// on overflow.
pub fn tree_count(n: usize) -> Option<u128> {
    // product over k = 2..=n of k(k-1)/2
    (2..=n as u128).try_fold(1u128, |acc, k| acc.checked_mul(k * (k - 1) / 2))
}

/// Draws a ranked tree uniformly at random over `leaves`.
///
/// Starting from singletons, each stage merges a uniformly chosen pair of
/// the remaining blocks. There are `Π C(k,2)` equally likely merge
/// sequences, one per tree.
pub fn random_tree<R: Rng + ?Sized>(leaves: &LeafTable, rng: &mut R) -> RankedTree {
    let n = leaves.len();
    assert!(n >= 2, "need at least 2 leaves");
    let mut blocks: Vec<Cluster> = (0..n).map(|i| Cluster::singleton(n, i)).collect();
    let mut clusters = Vec::with_capacity(n - 1);
    while blocks.len() > 1 {
        let k = blocks.len();
        let pick = rng.gen_range(0..k * (k - 1) / 2);
        let (i, j) = unrank_pair(pick, k);
        let b = blocks.swap_remove(j);
        let a = blocks.swap_remove(i);
        let merged = a.union(&b);
        clusters.push(merged.clone());
        blocks.push(merged);
    }
    RankedTree::with_leaf_table(leaves.clone(), clusters).expect("merge process yields valid trees")
}

/// Maps `0..C(k,2)` onto pairs `i < j < k`.
fn unrank_pair(mut idx: usize, k: usize) -> (usize, usize) {
    for i in 0..k {
        let row = k - 1 - i;
        if idx < row {
            return (i, i + 1 + idx);
        }
        idx -= row;
    }
    unreachable!("index out of range")
}

/// Caterpillar joining leaves in the given order: `[{o0,o1}, {o0,o1,o2}, ...]`.
pub fn caterpillar(leaves: &LeafTable, order: &[usize]) -> RankedTree {
    let n = leaves.len();
    assert_eq!(order.len(), n);
    let mut acc = Cluster::singleton(n, order[0]);
    let clusters = order[1..]
        .iter()
        .map(|&l| {
            acc.insert(l);
            acc.clone()
        })
        .collect();
    RankedTree::with_leaf_table(leaves.clone(), clusters).expect("caterpillar is a valid tree")
}

/// The caterpillar pair realizing the quadratic lower bound on `a1..an`:
/// `T = [{a1,a2}, {a1,a2,a3}, ...]` and `R = [{a1,an}, {a1,an,a(n-1)}, ...]`.
pub fn caterpillar_reversal(n: usize) -> (RankedTree, RankedTree) {
    let leaves = default_labels(n);
    let idx = |i: usize| {
        let name = format!("a{i}");
        leaves.iter().position(|l| *l == name).unwrap()
    };
    let forward: Vec<usize> = (1..=n).map(idx).collect();
    let mut backward = vec![idx(1)];
    backward.extend((2..=n).rev().map(idx));
    (caterpillar(&leaves, &forward), caterpillar(&leaves, &backward))
}
