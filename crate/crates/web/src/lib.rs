//! Browser demo: random tree pairs, FindPath walks drawn as SVG, and a
//! comparison of FindPath with exact search under other rank-move weights.
//!
//! The `demo_*` functions are plain Rust and return JSON strings; the
//! `#[wasm_bindgen]` exports wrap them for JavaScript.

use std::fmt::Write as _;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rnni::generate::{default_labels, random_tree};
use rnni::io::{format_moves, parse_cluster_format, to_cluster_format};
use rnni::oracle::TreeSpaceGraph;
use rnni::{find_path, Move, MoveKind, Node, RankedTree, Rho};
use serde::Serialize;
use wasm_bindgen::prelude::*;

/// Largest leaf count for the exact comparison, which builds the whole graph.
pub const EXACT_CAP: usize = 6;
/// Largest leaf count for which every tree along a path is drawn.
pub const DRAW_CAP: usize = 40;

#[derive(Serialize)]
struct Pair {
    from: String,
    to: String,
}

#[derive(Serialize)]
struct Frame {
    tree: String,
    /// Move applied to this tree to reach the next frame.
    next: Option<String>,
    svg: String,
}

#[derive(Serialize)]
struct Walk {
    distance: usize,
    nni_moves: usize,
    rank_moves: usize,
    moves: Vec<String>,
    frames: Vec<Frame>,
}

#[derive(Serialize)]
struct Comparison {
    rho: f64,
    findpath_weight: f64,
    optimum: Option<f64>,
    note: String,
}

fn parse_pair(from: &str, to: &str) -> Result<(RankedTree, RankedTree), String> {
    let t = parse_cluster_format(from).map_err(|e| format!("start tree: {e}"))?;
    let r = parse_cluster_format(to).map_err(|e| format!("target tree: {e}"))?;
    if !t.same_leaves(&r) {
        return Err("the trees have different leaf sets".into());
    }
    Ok((t, r))
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("plain data serializes")
}

/// Two uniformly random ranked trees on `a1..an`.
pub fn demo_random_pair(n: usize, seed: u64) -> Result<String, String> {
    if !(2..=500).contains(&n) {
        return Err("leaf count must be between 2 and 500".into());
    }
    let leaves = default_labels(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let t = random_tree(&leaves, &mut rng);
    let r = random_tree(&leaves, &mut rng);
    Ok(to_json(&Pair { from: to_cluster_format(&t), to: to_cluster_format(&r) }))
}

/// The FindPath walk between two cluster-format trees, with one SVG per
/// tree when the trees are small enough to draw.
pub fn demo_find_path(from: &str, to: &str) -> Result<String, String> {
    let (t, r) = parse_pair(from, to)?;
    let path = find_path(&t, &r).map_err(|e| e.to_string())?;
    let moves = path.moves();
    let lines: Vec<String> = format_moves(&moves, t.labels()).lines().map(String::from).collect();
    let rank_moves = moves.iter().filter(|m| m.kind() == MoveKind::RankSwap).count();
    let frames = if t.leaf_count() <= DRAW_CAP {
        let trees = path.materialize().map_err(|e| e.to_string())?;
        trees
            .iter()
            .enumerate()
            .map(|(i, tree)| Frame {
                tree: to_cluster_format(tree),
                next: lines.get(i).cloned(),
                svg: render_svg(tree, moves.get(i)),
            })
            .collect()
    } else {
        Vec::new()
    };
    Ok(to_json(&Walk {
        distance: moves.len(),
        nni_moves: moves.len() - rank_moves,
        rank_moves,
        moves: lines,
        frames,
    }))
}

/// FindPath weight under `rho` against the exact optimum on small trees.
pub fn demo_compare_rho(from: &str, to: &str, rho: f64) -> Result<String, String> {
    let (t, r) = parse_pair(from, to)?;
    let rho = Rho::new(rho).map_err(|e| e.to_string())?;
    let weight = find_path(&t, &r).map_err(|e| e.to_string())?.weight(rho);
    let n = t.leaf_count();
    let optimum = if n <= EXACT_CAP {
        let g = TreeSpaceGraph::build_capped(n, EXACT_CAP).map_err(|e| e.to_string())?;
        // The oracle graph is labelled a1..an; relabel by position.
        let relabel = |x: &RankedTree| {
            RankedTree::with_leaf_table(default_labels(n), x.clusters().to_vec()).map_err(|e| e.to_string())
        };
        Some(g.graph_distance(&relabel(&t)?, &relabel(&r)?, rho).map_err(|e| e.to_string())?)
    } else {
        None
    };
    let note = match optimum {
        Some(best) if weight > best + 1e-9 => format!("FindPath is {:.3} heavier than a lightest path", weight - best),
        Some(_) => "FindPath is a lightest path".into(),
        None => format!("exact search is limited to {EXACT_CAP} leaves"),
    };
    Ok(to_json(&Comparison { rho: rho.value(), findpath_weight: weight, optimum, note }))
}

/// Draws a ranked tree with node height equal to rank. When `next` is
/// given, the two nodes of the interval it acts on are highlighted.
pub fn render_svg(tree: &RankedTree, next: Option<&Move>) -> String {
    const GAP_X: f64 = 36.0;
    const GAP_Y: f64 = 30.0;
    const PAD: f64 = 20.0;
    let n = tree.leaf_count();
    let root = tree.root_rank();

    // Leaves left to right in depth-first order, so edges never cross.
    let mut order = Vec::with_capacity(n);
    let mut stack = vec![Node::Internal(root)];
    while let Some(node) = stack.pop() {
        match node {
            Node::Leaf(l) => order.push(l),
            Node::Internal(r) => {
                let [a, b] = tree.child_nodes(r);
                stack.push(b);
                stack.push(a);
            }
        }
    }
    let mut leaf_x = vec![0.0; n];
    for (i, &l) in order.iter().enumerate() {
        leaf_x[l] = PAD + i as f64 * GAP_X;
    }
    let mut node_x = vec![0.0; root + 1];
    let x_of = |node: Node, node_x: &[f64]| match node {
        Node::Leaf(l) => leaf_x[l],
        Node::Internal(r) => node_x[r],
    };
    for r in 1..=root {
        let [a, b] = tree.child_nodes(r);
        node_x[r] = (x_of(a, &node_x) + x_of(b, &node_x)) / 2.0;
    }
    let base = PAD + root as f64 * GAP_Y;
    let y_of = |node: Node| base - node.rank() as f64 * GAP_Y;
    let width = 2.0 * PAD + (n - 1) as f64 * GAP_X;
    let height = base + 2.0 * PAD;
    let hot = |r: usize| next.is_some_and(|m| r == m.rank() || r == m.rank() + 1);

    let mut svg = String::new();
    let _ = write!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {width} {height}" width="{width}" height="{height}" class="tree">"#
    );
    for r in 1..=root {
        let (px, py) = (node_x[r], y_of(Node::Internal(r)));
        for child in tree.child_nodes(r) {
            let (cx, cy) = (x_of(child, &node_x), y_of(child));
            let _ = write!(
                svg,
                r#"<polyline points="{cx},{cy} {cx},{py} {px},{py}" fill="none" stroke="black"/>"#
            );
        }
    }
    for r in 1..=root {
        let (x, y) = (node_x[r], y_of(Node::Internal(r)));
        let class = if hot(r) { "node hot" } else { "node" };
        let _ = write!(svg, r#"<circle cx="{x}" cy="{y}" r="5" class="{class}"/>"#);
        let _ = write!(svg, r#"<text x="{}" y="{}" class="rank">{r}</text>"#, x + 7.0, y - 4.0);
    }
    for (l, label) in tree.labels().iter().enumerate() {
        let _ = write!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle" class="leaf">{label}</text>"#,
            leaf_x[l],
            base + 16.0
        );
    }
    svg.push_str("</svg>");
    svg
}

#[wasm_bindgen]
pub fn random_pair(n: usize, seed: u64) -> Result<String, JsValue> {
    demo_random_pair(n, seed).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn walk(from: &str, to: &str) -> Result<String, JsValue> {
    demo_find_path(from, to).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn compare_rho(from: &str, to: &str, rho: f64) -> Result<String, JsValue> {
    demo_compare_rho(from, to, rho).map_err(|e| JsValue::from_str(&e))
}
