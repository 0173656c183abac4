//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

use std::collections::HashSet;
use std::panic;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rnni::generate::{caterpillar_reversal, default_labels, random_tree, tree_count};
use rnni::io::{
    format_moves, parse_cluster_format, parse_moves, parse_newick, to_cluster_format, to_newick, NewickConfig,
};
use rnni::oracle::{enumerate_trees, topology_key, unranked_distances_from, TreeSpaceGraph};
use rnni::{distance, find_path, find_path_with, RankedTree, Rho, TreePath, WorkTree};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn tree(s: &str) -> RankedTree {
    parse_cluster_format(s).expect("valid tree literal")
}

fn bfs_equivalence() -> Outcome {
    let mut counts = Vec::new();
    for n in 3..=5 {
        let g = TreeSpaceGraph::build(n).map_err(|e| e.to_string())?;
        let vs = g.vertices();
        let mut pairs = 0;
        for s in 0..vs.len() {
            let bfs = g.bfs(s);
            for t in s + 1..vs.len() {
                let d = distance(&vs[s], &vs[t]).unwrap();
                ensure(d == bfs[t], || format!("n={n}: FindPath {d} != BFS {} for {} -> {}", bfs[t], vs[s], vs[t]))?;
                pairs += 1;
            }
        }
        counts.push(pairs);
    }
    ensure(counts == [3, 153, 16_110], || format!("pair counts {counts:?}"))?;
    Ok(format!("FindPath = BFS on {counts:?} pairs for n = 3, 4, 5"))
}

fn caterpillar_closed_form() -> Outcome {
    for n in (3..=10).chain([1000]) {
        let (t, r) = caterpillar_reversal(n);
        let d = distance(&t, &r).unwrap();
        ensure(d == (n - 1) * (n - 2) / 2, || format!("n={n}: {d} moves"))?;
    }
    // The closed form is also the true graph distance where the oracle reaches.
    for n in 3..=6 {
        let g = TreeSpaceGraph::build(n).map_err(|e| e.to_string())?;
        let (t, r) = caterpillar_reversal(n);
        let exact = g.graph_distance(&t, &r, Rho::ONE).map_err(|e| e.to_string())?;
        ensure(exact == ((n - 1) * (n - 2) / 2) as f64, || format!("n={n}: BFS {exact}"))?;
    }
    Ok("(n-1)(n-2)/2 for n = 3..10 and 498501 at n = 1000".into())
}

fn bench_moves(n: usize) -> Result<(usize, Duration), String> {
    let clock = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_rnni"))
        .args(["--json", "bench", "--n", &n.to_string(), "--mode", "caterpillar"])
        .output()
        .map_err(|e| e.to_string())?;
    let wall = clock.elapsed();
    ensure(out.status.success(), || String::from_utf8_lossy(&out.stderr).into_owned())?;
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).map_err(|e| e.to_string())?;
    let moves = v["result"]["moves"][0].as_u64().ok_or("missing move count")? as usize;
    Ok((moves, wall))
}

fn performance() -> Outcome {
    let (m1000, wall) = bench_moves(1000)?;
    ensure(wall <= Duration::from_secs(10), || format!("n=1000 took {wall:?}"))?;
    ensure(m1000 == 498_501, || format!("n=1000: {m1000} moves"))?;
    let (m2000, _) = bench_moves(2000)?;
    let ratio = m2000 as f64 / m1000 as f64;
    let formula = 1_997_001.0 / 498_501.0;
    ensure((ratio / formula - 1.0).abs() <= 0.005, || format!("ratio {ratio}"))?;
    ensure((ratio / 4.0 - 1.0).abs() <= 0.005, || format!("ratio {ratio} vs 4"))?;
    Ok(format!("n=1000 bench in {:.2} s, n=2000/n=1000 moves = {ratio:.5}", wall.as_secs_f64()))
}

fn counterexample(t: &str, r: &str, rho: f64, findpath: f64, optimum: f64) -> Outcome {
    let (t, r) = (tree(t), tree(r));
    let rho = Rho::new(rho).unwrap();
    let g = TreeSpaceGraph::build(4).map_err(|e| e.to_string())?;
    let w = find_path(&t, &r).unwrap().weight(rho);
    let exact = g.graph_distance(&t, &r, rho).map_err(|e| e.to_string())?;
    ensure(w == findpath && exact == optimum, || format!("FindPath {w}, optimum {exact}"))?;
    Ok(format!("rho={}: FindPath weight {w}, optimum {exact}", rho.value()))
}

fn unranked_premise() -> Outcome {
    let mut pairs = 0;
    for n in 2..=5 {
        let g = TreeSpaceGraph::build(n).map_err(|e| e.to_string())?;
        let vs = g.vertices();
        for s in 0..vs.len() {
            let d0 = g.distances_from(s, Rho::ZERO);
            let table = unranked_distances_from(&vs[s]);
            for t in 0..vs.len() {
                let u = table[&topology_key(&vs[t])] as f64;
                ensure(d0[t] == u, || format!("{} -> {}: RNNI(0) {} vs NNI {u}", vs[s], vs[t], d0[t]))?;
                pairs += 1;
            }
        }
    }
    Ok(format!("RNNI(0) = unranked NNI distance on {pairs} ordered pairs, n <= 5"))
}

fn counting() -> Outcome {
    let mut sizes = Vec::new();
    for n in 2..=7 {
        let trees = enumerate_trees(n).map_err(|e| e.to_string())?;
        let distinct: HashSet<&RankedTree> = trees.iter().collect();
        ensure(distinct.len() == trees.len(), || format!("n={n}: duplicates"))?;
        ensure(trees.len() as u128 == tree_count(n).unwrap(), || format!("n={n}: {}", trees.len()))?;
        sizes.push(trees.len());
    }
    ensure(sizes == [1, 3, 18, 180, 2700, 56_700], || format!("{sizes:?}"))?;
    Ok(format!("tree counts {sizes:?}"))
}

fn graph_sanity() -> Outcome {
    let mut diameters = Vec::new();
    for n in 2..=6 {
        let g = TreeSpaceGraph::build(n).map_err(|e| e.to_string())?;
        ensure(g.is_connected(), || format!("n={n}: disconnected"))?;
        ensure(g.is_symmetric(), || format!("n={n}: asymmetric"))?;
        for (v, t) in g.vertices().iter().enumerate() {
            let want: usize = (1..t.root_rank())
                .map(|r| if t.is_edge_interval(r).unwrap() { 2 } else { 1 })
                .sum();
            ensure(g.adjacency(v).len() == want, || format!("n={n}: degree of {t}"))?;
        }
        let d = g.diameter(Rho::ONE).value as usize;
        ensure(d >= (n - 1) * (n - 2) / 2, || format!("n={n}: diameter {d}"))?;
        diameters.push(d);
    }
    ensure(diameters[1] == 1, || format!("n=3 diameter {}", diameters[1]))?;
    Ok(format!("connected, degrees match; diameters n=2..6: {diameters:?}"))
}

fn metric_axioms() -> Outcome {
    let mut report = Vec::new();
    for n in 2..=5 {
        let trees = enumerate_trees(n).map_err(|e| e.to_string())?;
        let k = trees.len();
        let d: Vec<Vec<usize>> = trees
            .iter()
            .map(|a| trees.iter().map(|b| distance(a, b).unwrap()).collect())
            .collect();
        for i in 0..k {
            for j in 0..k {
                ensure((d[i][j] == 0) == (i == j), || format!("identity: {} {}", trees[i], trees[j]))?;
                ensure(d[i][j] == d[j][i], || format!("symmetry: {} {}", trees[i], trees[j]))?;
            }
        }
        let mut triples = 0usize;
        let mut check = |a: usize, b: usize, c: usize| {
            triples += 1;
            ensure(d[a][c] <= d[a][b] + d[b][c], || {
                format!("triangle: {} {} {}", trees[a], trees[b], trees[c])
            })
        };
        if n < 5 {
            for a in 0..k {
                for b in 0..k {
                    for c in 0..k {
                        check(a, b, c)?;
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(9);
            for _ in 0..100_000 {
                check(rng.gen_range(0..k), rng.gen_range(0..k), rng.gen_range(0..k))?;
            }
        }
        report.push(triples);
    }
    Ok(format!("zero violations; triples checked for n=2..5: {report:?}"))
}

// Walks one FindPath path, checking legality, the target prefix after each
// stage, and the end tree. With `full`, every intermediate tree is also
// materialized and checked to be an RNNI neighbour of its predecessor.
fn check_path(t: &RankedTree, r: &RankedTree, full: bool) -> Result<(), String> {
    let n = t.leaf_count();
    let path = find_path(t, r).map_err(|e| e.to_string())?;
    let mut stage_of = Vec::with_capacity(path.len());
    find_path_with(t, r, |k, _| stage_of.push(k)).unwrap();
    let prefix_ok = |w: &WorkTree, k: usize| (1..=k).all(|j| w.same_children_as(r, j));

    // Stage k is over once the next move belongs to a later stage.
    let mut done = 0;
    let mut ok = true;
    let mut finish = |w: &WorkTree, upto: usize| {
        while done < upto {
            done += 1;
            ok &= prefix_ok(w, done);
        }
    };
    let start = WorkTree::new(t);
    finish(&start, stage_of.first().map_or(n - 2, |&k| k - 1));
    let end = path
        .replay(|i, _, w| {
            let next = stage_of.get(i + 1).map_or(n - 2, |&k| k - 1);
            finish(w, next);
        })
        .map_err(|e| format!("illegal step: {e}"))?;
    ensure(ok, || format!("prefix mismatch on {t} -> {r}"))?;
    ensure(&end.to_tree() == r, || format!("path ends elsewhere: {t} -> {r}"))?;
    if full {
        let trees = path.materialize().map_err(|e| e.to_string())?;
        for w in trees.windows(2) {
            ensure(adjacent(&w[0], &w[1]), || format!("{} and {} are not neighbours", w[0], w[1]))?;
        }
        ensure(trees.last() == Some(r), || "materialized path ends elsewhere".into())?;
    }
    Ok(())
}

// Whether `b` arises from `a` by one rank swap or one NNI move, decided
// from the cluster lists alone.
fn adjacent(a: &RankedTree, b: &RankedTree) -> bool {
    let (ca, cb) = (a.clusters(), b.clusters());
    let diff: Vec<usize> = (0..ca.len()).filter(|&i| ca[i] != cb[i]).collect();
    match diff[..] {
        // Rank swap of two nodes not joined by an edge.
        [i, j] if j == i + 1 => ca[i] == cb[j] && ca[j] == cb[i] && !ca[i].is_subset(&ca[j]),
        // NNI: inside the unchanged parent cluster, the lower cluster keeps
        // one of its children and takes the parent's other child.
        [i] if i + 1 < ca.len() => {
            let parent = &ca[i + 1];
            if !ca[i].is_subset(parent) || !cb[i].is_subset(parent) {
                return false;
            }
            let moved_in = cb[i].difference(&ca[i]);
            let kept = cb[i].difference(&moved_in);
            let t = i + 1;
            let [(_, x), (_, y)] = a.children_of(t).unwrap();
            let [(_, p), (_, q)] = a.children_of(t + 1).unwrap();
            let sibling = if p == ca[i] { q } else { p };
            moved_in == sibling && (kept == x || kept == y)
        }
        _ => false,
    }
}

fn path_validity() -> Outcome {
    let mut summary = Vec::new();
    for (n, seed) in [(10, 10u64), (50, 50), (200, 200)] {
        let leaves = default_labels(n);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut moves = 0usize;
        for i in 0..10_000 {
            let t = random_tree(&leaves, &mut rng);
            let r = random_tree(&leaves, &mut rng);
            // Materializing every tree is cubic; do it for all small pairs
            // and a sample of the large ones.
            let full = n <= 50 || i % 500 == 0;
            check_path(&t, &r, full)?;
            moves += distance(&t, &r).unwrap();
        }
        summary.push(format!("n={n}: {moves} moves"));
    }
    Ok(format!("10^4 pairs each, zero violations ({})", summary.join(", ")))
}

fn round_trip(t: &RankedTree, next: &RankedTree) -> Result<(), String> {
    let text = to_cluster_format(t);
    let back = parse_cluster_format(&text).map_err(|e| e.to_string())?;
    ensure(&back == t && to_cluster_format(&back) == text, || format!("cluster format: {text}"))?;
    let nwk = to_newick(t, 1.0);
    let back = parse_newick(&nwk, &NewickConfig::default()).map_err(|e| e.to_string())?;
    ensure(&back == t, || format!("newick: {nwk}"))?;
    let moves = find_path(t, next).unwrap().moves();
    let listed = format_moves(&moves, t.labels());
    let parsed = parse_moves(&listed, t.labels()).map_err(|e| e.to_string())?;
    ensure(parsed == moves && format_moves(&parsed, t.labels()) == listed, || "move list".into())?;
    let end = TreePath::from_moves(t.clone(), &parsed).map_err(|e| e.to_string())?.end();
    ensure(&end == next, || "parsed moves end elsewhere".into())?;
    Ok(())
}

fn round_trips() -> Outcome {
    let mut count = 0;
    for n in 2..=5 {
        let trees = enumerate_trees(n).map_err(|e| e.to_string())?;
        for (i, t) in trees.iter().enumerate() {
            round_trip(t, &trees[(i * 7 + 3) % trees.len()])?;
            count += 1;
        }
    }
    let leaves = default_labels(50);
    let mut rng = ChaCha8Rng::seed_from_u64(50);
    let mut prev = random_tree(&leaves, &mut rng);
    for _ in 0..1000 {
        let t = random_tree(&leaves, &mut rng);
        round_trip(&prev, &t)?;
        prev = t;
        count += 1;
    }
    Ok(format!("cluster, Newick and move-list round trips on {count} trees"))
}

fn main() {
    let criteria: Vec<(&str, fn() -> Outcome)> = vec![
        ("FindPath equals BFS distance for n <= 5", bfs_equivalence),
        ("caterpillar reversal closed form", caterpillar_closed_form),
        ("performance at n = 1000 and quadratic scaling", performance),
        ("FindPath suboptimal for rho = 2", || {
            counterexample(
                "[{a1,a2},{a1,a2,a3},{a1,a2,a3,a4}]",
                "[{a3,a4},{a2,a3,a4},{a1,a2,a3,a4}]",
                2.0,
                4.0,
                3.0,
            )
        }),
        ("FindPath suboptimal for rho = 0.5", || {
            counterexample(
                "[{a1,a2},{a3,a4},{a1,a2,a3,a4}]",
                "[{a1,a3},{a1,a3,a4},{a1,a2,a3,a4}]",
                0.5,
                3.0,
                2.5,
            )
        }),
        ("RNNI(0) distance equals unranked NNI distance", unranked_premise),
        ("tree counts for n = 2..7", counting),
        ("graph connectivity, degrees and diameters", graph_sanity),
        ("metric axioms", metric_axioms),
        ("path validity on random pairs", path_validity),
        ("serialization round trips", round_trips),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let clock = Instant::now();
        let outcome = panic::catch_unwind(run).unwrap_or_else(|_| Err("panicked".into()));
        let secs = clock.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{secs:.1} s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{secs:.1} s]", i + 1);
            }
        }
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
    println!("all acceptance criteria passed");
}
