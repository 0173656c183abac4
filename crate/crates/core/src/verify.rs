//! Exhaustive desk-scale verification of FindPath against the oracle.

use std::thread;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::findpath::find_path_with;
use crate::generate::tree_count;
use crate::moves::{MoveKind, Rho};
use crate::oracle::{topology_key, unranked_distances_from, OracleError, TreeSpaceGraph};
use crate::tree::RankedTree;

#[derive(Debug, Clone)]
pub struct CheckConfig {
    pub n: usize,
    /// Extra rank-move weights to probe besides 1.
    pub rhos: Vec<Rho>,
    pub workers: usize,
    /// Largest leaf count accepted; the sweep is quadratic in the tree count.
    pub cap: usize,
    /// Random triples for the triangle inequality when the tree count is
    /// too large to test every triple.
    pub triple_samples: usize,
    pub seed: u64,
}

impl CheckConfig {
    pub fn new(n: usize) -> Self {
        CheckConfig {
            n,
            rhos: Vec::new(),
            workers: 1,
            cap: 6,
            triple_samples: 100_000,
            seed: 1,
        }
    }
}

/// FindPath against the exact search for one rank-move weight.
#[derive(Debug, Clone, PartialEq)]
pub struct RhoReport {
    pub rho: f64,
    pub ordered_pairs: usize,
    /// Pairs where the FindPath path is heavier than the optimum.
    pub suboptimal: usize,
    /// Heaviest excess witness: (from, to, FindPath weight, optimum).
    pub witness: Option<(usize, usize, f64, f64)>,
    /// Pairs where FindPath beats the optimum, which would be a bug.
    pub impossible: usize,
    /// For rho = 0: pairs compared with the unranked NNI distance, and mismatches.
    pub unranked_checked: usize,
    pub unranked_mismatches: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub n: usize,
    pub trees: usize,
    pub expected_trees: u128,
    pub edges: usize,
    pub connected: bool,
    pub symmetric: bool,
    pub degree_mismatches: usize,
    /// Unordered pairs compared in both directions against BFS.
    pub pairs_checked: usize,
    pub distance_mismatches: usize,
    pub identity_violations: usize,
    pub symmetry_violations: usize,
    pub triples_checked: usize,
    pub triangle_violations: usize,
    pub diameter: usize,
    pub diameter_pair: (usize, usize),
    pub caterpillar_bound: usize,
    pub rho_reports: Vec<RhoReport>,
    /// Human-readable description of every failed invariant.
    pub failures: Vec<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

// Up to this many (ordered) triples, the triangle inequality is checked on all of them.
const EXHAUSTIVE_TRIPLES: u128 = 6_000_000;

fn par_map<T, F>(count: usize, workers: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync,
{
    let workers = workers.clamp(1, count.max(1));
    if workers == 1 {
        return (0..count).map(f).collect();
    }
    let f = &f;
    let mut out: Vec<Option<T>> = (0..count).map(|_| None).collect();
    thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                scope.spawn(move || {
                    (w..count).step_by(workers).map(|i| (i, f(i))).collect::<Vec<_>>()
                })
            })
            .collect();
        for h in handles {
            for (i, v) in h.join().expect("worker panicked") {
                out[i] = Some(v);
            }
        }
    });
    out.into_iter().map(|v| v.expect("every index computed")).collect()
}

// (NNI moves, rank moves) on the FindPath path
fn path_counts(from: &RankedTree, to: &RankedTree) -> (u32, u32) {
    let (mut nni, mut rank) = (0, 0);
    find_path_with(from, to, |_, s| match s.kind() {
        MoveKind::Nni => nni += 1,
        MoveKind::RankSwap => rank += 1,
    })
    .expect("same leaf table");
    (nni, rank)
}

/// Runs every invariant on all trees with `cfg.n` leaves.
pub fn run_check(cfg: &CheckConfig) -> Result<CheckReport, OracleError> {
    let n = cfg.n;
    let graph = TreeSpaceGraph::build_capped(n, cfg.cap)?;
    let vs = graph.vertices();
    let count = vs.len();
    let mut failures = Vec::new();
    let name = |i: usize| vs[i].to_string();

    let expected_trees = tree_count(n).expect("small n");
    if count as u128 != expected_trees {
        failures.push(format!("enumerated {count} trees, expected {expected_trees}"));
    }
    let connected = graph.is_connected();
    if !connected {
        failures.push("RNNI graph is not connected".into());
    }
    let symmetric = graph.is_symmetric();
    if !symmetric {
        failures.push("adjacency is not symmetric".into());
    }
    let degree_mismatches = (0..count)
        .filter(|&v| {
            let t = &vs[v];
            let want: usize = (1..t.root_rank())
                .map(|r| if t.is_edge_interval(r).unwrap() { 2 } else { 1 })
                .sum();
            graph.adjacency(v).len() != want
        })
        .count();
    if degree_mismatches > 0 {
        failures.push(format!("{degree_mismatches} vertices with unexpected degree"));
    }

    // FindPath length and move mix for every ordered pair, checked against BFS.
    struct Row {
        counts: Vec<(u32, u32)>,
        mismatches: Vec<(usize, usize, usize)>,
        far: (usize, usize),
    }
    let rows = par_map(count, cfg.workers, |s| {
        let bfs = graph.bfs(s);
        let mut mismatches = Vec::new();
        let mut far = (0, s);
        let counts = (0..count)
            .map(|t| {
                let c = path_counts(&vs[s], &vs[t]);
                let len = (c.0 + c.1) as usize;
                if len != bfs[t] {
                    mismatches.push((t, len, bfs[t]));
                }
                if t > s && bfs[t] > far.0 {
                    far = (bfs[t], t);
                }
                c
            })
            .collect();
        Row { counts, mismatches, far }
    });
    let len_of = |s: usize, t: usize| {
        let (a, b) = rows[s].counts[t];
        (a + b) as usize
    };

    let mut distance_mismatches = 0;
    for (s, row) in rows.iter().enumerate() {
        for &(t, fp, bfs) in &row.mismatches {
            if distance_mismatches == 0 {
                failures.push(format!(
                    "FindPath length {fp} != BFS distance {bfs} for {} -> {}",
                    name(s),
                    name(t)
                ));
            }
            distance_mismatches += 1;
        }
    }
    if distance_mismatches > 1 {
        failures.push(format!("{distance_mismatches} ordered pairs disagree with BFS"));
    }

    let (mut diameter, mut diameter_pair) = (0, (0, 0));
    for (s, row) in rows.iter().enumerate() {
        if row.far.0 > diameter {
            diameter = row.far.0;
            diameter_pair = (s, row.far.1);
        }
    }
    let caterpillar_bound = (n - 1) * (n - 2) / 2;
    if diameter < caterpillar_bound {
        failures.push(format!("diameter {diameter} below caterpillar bound {caterpillar_bound}"));
    }

    let mut identity_violations = 0;
    let mut symmetry_violations = 0;
    for s in 0..count {
        for t in 0..count {
            if (len_of(s, t) == 0) != (s == t) {
                identity_violations += 1;
            }
            if len_of(s, t) != len_of(t, s) {
                symmetry_violations += 1;
            }
        }
    }
    if identity_violations > 0 {
        failures.push(format!("{identity_violations} identity violations"));
    }
    if symmetry_violations > 0 {
        failures.push(format!("{symmetry_violations} symmetry violations"));
    }

    let mut triangle_violations = 0;
    let triples_checked;
    if (count as u128).pow(3) <= EXHAUSTIVE_TRIPLES {
        triples_checked = count * count * count;
        for a in 0..count {
            for b in 0..count {
                let ab = len_of(a, b);
                for c in 0..count {
                    if len_of(a, c) > ab + len_of(b, c) {
                        triangle_violations += 1;
                    }
                }
            }
        }
    } else {
        triples_checked = cfg.triple_samples;
        let mut rng = StdRng::seed_from_u64(cfg.seed);
        for _ in 0..cfg.triple_samples {
            let (a, b, c) = (rng.gen_range(0..count), rng.gen_range(0..count), rng.gen_range(0..count));
            if len_of(a, c) > len_of(a, b) + len_of(b, c) {
                triangle_violations += 1;
            }
        }
    }
    if triangle_violations > 0 {
        failures.push(format!("{triangle_violations} triangle inequality violations"));
    }

    let mut rho_reports = Vec::new();
    for &rho in &cfg.rhos {
        let r = rho.value();
        let per_source = par_map(count, cfg.workers, |s| {
            let exact = graph.distances_from(s, rho);
            let mut suboptimal = 0;
            let mut impossible = 0;
            let mut witness: Option<(usize, usize, f64, f64)> = None;
            for t in 0..count {
                let (nni, rank) = rows[s].counts[t];
                let w = nni as f64 + r * rank as f64;
                if w < exact[t] - 1e-9 {
                    impossible += 1;
                } else if w > exact[t] + 1e-9 {
                    suboptimal += 1;
                    let better = match witness {
                        None => true,
                        Some((_, _, ow, oe)) => w - exact[t] > ow - oe,
                    };
                    if better {
                        witness = Some((s, t, w, exact[t]));
                    }
                }
            }
            let (mut unranked_checked, mut unranked_mismatches) = (0, 0);
            if r == 0.0 && n <= crate::oracle::Caps::default().unranked {
                let table = unranked_distances_from(&vs[s]);
                for t in 0..count {
                    unranked_checked += 1;
                    if table[&topology_key(&vs[t])] as f64 != exact[t] {
                        unranked_mismatches += 1;
                    }
                }
            }
            (suboptimal, impossible, witness, unranked_checked, unranked_mismatches)
        });
        let mut rep = RhoReport {
            rho: r,
            ordered_pairs: count * count,
            suboptimal: 0,
            witness: None,
            impossible: 0,
            unranked_checked: 0,
            unranked_mismatches: 0,
        };
        for (sub, imp, wit, uc, um) in per_source {
            rep.suboptimal += sub;
            rep.impossible += imp;
            rep.unranked_checked += uc;
            rep.unranked_mismatches += um;
            if let Some(w) = wit {
                let better = match rep.witness {
                    None => true,
                    Some((_, _, ow, oe)) => w.2 - w.3 > ow - oe,
                };
                if better {
                    rep.witness = Some(w);
                }
            }
        }
        if rep.impossible > 0 {
            failures.push(format!("rho={r}: {} pairs where FindPath beats the optimum", rep.impossible));
        }
        if r == 1.0 && rep.suboptimal > 0 {
            failures.push(format!("rho=1: {} suboptimal FindPath paths", rep.suboptimal));
        }
        // Rank moves only exist from four leaves on.
        if r != 1.0 && n >= 4 && rep.suboptimal == 0 {
            failures.push(format!("rho={r}: no pair where FindPath is suboptimal"));
        }
        if rep.unranked_mismatches > 0 {
            failures.push(format!(
                "rho=0: {} pairs differ from the unranked NNI distance",
                rep.unranked_mismatches
            ));
        }
        rho_reports.push(rep);
    }

    Ok(CheckReport {
        n,
        trees: count,
        expected_trees,
        edges: graph.edge_count(),
        connected,
        symmetric,
        degree_mismatches,
        pairs_checked: count * (count - 1) / 2,
        distance_mismatches,
        identity_violations,
        symmetry_violations,
        triples_checked,
        triangle_violations,
        diameter,
        diameter_pair,
        caterpillar_bound,
        rho_reports,
        failures,
    })
}
