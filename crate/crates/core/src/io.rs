//! Text formats: cluster lists, Newick time trees and move lists.
//!
//! Cluster format: `[{a1,a2},{a1,a2,a3}]`, whitespace insignificant, one
//! tree per line in multi-tree files. Move lists: one move per line,
//! `rank <t>` or `nni <t> {<label>,...}`.

use thiserror::Error;

use crate::cluster::Cluster;
use crate::moves::Move;
use crate::tree::{is_valid_label, Node, RankedTree, TreeError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseErrorKind {
    #[error("{0}")]
    Syntax(String),
    #[error(transparent)]
    Tree(#[from] TreeError),
    #[error("node with {0} children; only binary trees are supported")]
    NotBinaryTopology(usize),
    #[error("leaf heights differ by {deviation}, above tolerance")]
    NotUltrametric { deviation: f64 },
    #[error("internal nodes at ranks {ranks:?} have tied heights")]
    TiedHeights { ranks: Vec<usize> },
    #[error("child node lies above its parent")]
    NegativeBranch,
    #[error("unknown leaf label {0:?}")]
    UnknownLabel(String),
}

/// A parse failure with its 1-based line and column.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{line}:{column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

struct Cursor<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str) -> Self {
        Cursor { text, pos: 0 }
    }

    fn location(&self, pos: usize) -> (usize, usize) {
        let before = &self.text[..pos.min(self.text.len())];
        let line = before.matches('\n').count() + 1;
        let column = before.chars().rev().take_while(|&c| c != '\n').count() + 1;
        (line, column)
    }

    fn error_at(&self, pos: usize, kind: ParseErrorKind) -> ParseError {
        let (line, column) = self.location(pos);
        ParseError { line, column, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.error_at(self.pos, ParseErrorKind::Syntax(msg.into()))
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek() {
            if c.is_whitespace() {
                self.pos += c.len_utf8();
            } else {
                break;
            }
        }
    }

    fn peek(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn eat(&mut self, want: char) -> bool {
        self.skip_ws();
        if self.peek() == Some(want) {
            self.pos += want.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, want: char) -> Result<(), ParseError> {
        if self.eat(want) {
            Ok(())
        } else {
            Err(self.syntax(format!("expected '{want}'")))
        }
    }

    fn label(&mut self) -> Result<&'a str, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let len = rest
            .bytes()
            .take_while(|b| b.is_ascii_alphanumeric() || matches!(b, b'_' | b'.' | b'-'))
            .count();
        if len == 0 {
            return Err(self.syntax("expected a leaf label"));
        }
        self.pos += len;
        Ok(&rest[..len])
    }

    fn at_end(&mut self) -> bool {
        self.skip_ws();
        self.pos >= self.text.len()
    }
}

fn label_set(cur: &mut Cursor<'_>) -> Result<Vec<String>, ParseError> {
    cur.expect('{')?;
    let mut labels = vec![cur.label()?.to_string()];
    while cur.eat(',') {
        labels.push(cur.label()?.to_string());
    }
    cur.expect('}')?;
    Ok(labels)
}

/// Parses one tree in cluster format. The leaf table is the sorted union
/// of all labels.
pub fn parse_cluster_format(text: &str) -> Result<RankedTree, ParseError> {
    let mut cur = Cursor::new(text);
    cur.skip_ws();
    let start = cur.pos;
    cur.expect('[')?;
    let mut sets = vec![label_set(&mut cur)?];
    while cur.eat(',') {
        sets.push(label_set(&mut cur)?);
    }
    cur.expect(']')?;
    if !cur.at_end() {
        return Err(cur.syntax("trailing input after ']'"));
    }
    for set in &sets {
        let mut s = set.clone();
        s.sort();
        if let Some(w) = s.windows(2).find(|w| w[0] == w[1]) {
            return Err(cur.error_at(
                start,
                ParseErrorKind::Syntax(format!("label {:?} repeated within a cluster", w[0])),
            ));
        }
    }
    let refs: Vec<Vec<&str>> = sets.iter().map(|s| s.iter().map(String::as_str).collect()).collect();
    let slices: Vec<&[&str]> = refs.iter().map(Vec::as_slice).collect();
    RankedTree::from_label_sets(&slices).map_err(|e| cur.error_at(start, e.into()))
}

/// Parses one cluster-format tree per non-empty line.
pub fn parse_cluster_lines(text: &str) -> Result<Vec<RankedTree>, ParseError> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            parse_cluster_format(l).map_err(|mut e| {
                e.line += i;
                e
            })
        })
        .collect()
}

fn write_labels(tree: &RankedTree, c: &Cluster, out: &mut String) {
    out.push('{');
    for (i, leaf) in c.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        out.push_str(&tree.labels()[leaf]);
    }
    out.push('}');
}

pub fn to_cluster_format(tree: &RankedTree) -> String {
    let mut out = String::from("[");
    for (i, c) in tree.clusters().iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write_labels(tree, c, &mut out);
    }
    out.push(']');
    out
}

/// How to rank internal nodes whose heights coincide within tolerance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TiePolicy {
    #[default]
    Reject,
    /// Order tied nodes by post-order position.
    BreakByTraversal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NewickConfig {
    /// Absolute tolerance for height comparisons.
    pub tolerance: f64,
    pub tie_policy: TiePolicy,
}

impl Default for NewickConfig {
    fn default() -> Self {
        NewickConfig { tolerance: 1e-9, tie_policy: TiePolicy::Reject }
    }
}

struct NwNode {
    label: Option<String>,
    length: Option<f64>,
    children: Vec<usize>,
    pos: usize,
}

// Optional label and branch length following a node.
fn newick_suffix(cur: &mut Cursor<'_>) -> Result<(Option<String>, Option<f64>), ParseError> {
    cur.skip_ws();
    let label = match cur.peek() {
        Some('[') => return Err(cur.syntax("comments are not supported")),
        Some('\'') | Some('"') => return Err(cur.syntax("quoted labels are not supported")),
        Some(c) if c.is_ascii_alphanumeric() || matches!(c, '_' | '.' | '-') => {
            Some(cur.label()?.to_string())
        }
        _ => None,
    };
    let length = if cur.eat(':') {
        cur.skip_ws();
        let start = cur.pos;
        let len = cur.text[start..]
            .bytes()
            .take_while(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'))
            .count();
        let raw = &cur.text[start..start + len];
        let value: f64 = raw
            .parse()
            .map_err(|_| cur.syntax(format!("invalid branch length {raw:?}")))?;
        if !value.is_finite() {
            return Err(cur.syntax("branch length must be finite"));
        }
        cur.pos += len;
        Some(value)
    } else {
        None
    };
    Ok((label, length))
}

// Parses one subtree without recursion; nodes come out in post-order.
fn newick_tree(cur: &mut Cursor<'_>, nodes: &mut Vec<NwNode>) -> Result<usize, ParseError> {
    let mut open: Vec<(usize, Vec<usize>)> = Vec::new();
    loop {
        cur.skip_ws();
        let pos = cur.pos;
        if cur.eat('(') {
            open.push((pos, Vec::new()));
            continue;
        }
        let (label, length) = newick_suffix(cur)?;
        if label.is_none() {
            return Err(cur.syntax("leaf without a label"));
        }
        nodes.push(NwNode { label, length, children: Vec::new(), pos });
        let mut id = nodes.len() - 1;
        loop {
            let Some((_, children)) = open.last_mut() else {
                return Ok(id);
            };
            children.push(id);
            if cur.eat(',') {
                break;
            }
            cur.expect(')')?;
            let (pos, children) = open.pop().expect("non-empty");
            let (label, length) = newick_suffix(cur)?;
            nodes.push(NwNode { label, length, children, pos });
            id = nodes.len() - 1;
        }
    }
}

/// Parses a rooted binary ultrametric Newick tree and ranks its internal
/// nodes by increasing height.
pub fn parse_newick(text: &str, cfg: &NewickConfig) -> Result<RankedTree, ParseError> {
    let mut cur = Cursor::new(text);
    if let Some(p) = text.find('[') {
        return Err(cur.error_at(p, ParseErrorKind::Syntax("comments are not supported".into())));
    }
    let mut nodes = Vec::new();
    let root = newick_tree(&mut cur, &mut nodes)?;
    cur.expect(';')?;
    if !cur.at_end() {
        return Err(cur.syntax("trailing input after ';'"));
    }

    // nodes are stored in post-order: children before parents
    let mut depth = vec![0.0f64; nodes.len()];
    for id in (0..nodes.len()).rev() {
        let node = &nodes[id];
        if id != root {
            if node.children.len() == 1 || node.children.len() > 2 {
                return Err(cur.error_at(node.pos, ParseErrorKind::NotBinaryTopology(node.children.len())));
            }
        }
        for &c in &node.children {
            let len = nodes[c].length.ok_or_else(|| {
                cur.error_at(nodes[c].pos, ParseErrorKind::Syntax("missing branch length".into()))
            })?;
            if len < 0.0 {
                return Err(cur.error_at(nodes[c].pos, ParseErrorKind::NegativeBranch));
            }
            depth[c] = depth[id] + len;
        }
    }
    if nodes[root].children.len() != 2 {
        return Err(cur.error_at(
            nodes[root].pos,
            ParseErrorKind::NotBinaryTopology(nodes[root].children.len()),
        ));
    }
    let leaves: Vec<usize> = (0..nodes.len()).filter(|&i| nodes[i].children.is_empty()).collect();
    let max_depth = leaves.iter().map(|&l| depth[l]).fold(f64::NEG_INFINITY, f64::max);
    let min_depth = leaves.iter().map(|&l| depth[l]).fold(f64::INFINITY, f64::min);
    let deviation = max_depth - min_depth;
    if deviation > cfg.tolerance {
        return Err(cur.error_at(0, ParseErrorKind::NotUltrametric { deviation }));
    }

    let labels: Vec<String> = leaves
        .iter()
        .map(|&l| nodes[l].label.clone().expect("leaves are labelled"))
        .collect();
    let mut sorted = labels.clone();
    sorted.sort();
    if let Some(w) = sorted.windows(2).find(|w| w[0] == w[1]) {
        return Err(cur.error_at(0, TreeError::DuplicateLeaf(w[0].clone()).into()));
    }
    let n = labels.len();
    let leaf_index = |id: usize| sorted.binary_search(nodes[id].label.as_ref().unwrap()).unwrap();

    // internal nodes in post-order, then stable sort by height
    let internal: Vec<usize> = (0..nodes.len()).filter(|&i| !nodes[i].children.is_empty()).collect();
    let height = |id: usize| max_depth - depth[id];
    let mut order = internal.clone();
    order.sort_by(|&a, &b| height(a).total_cmp(&height(b)));
    let mut ties = Vec::new();
    for (i, w) in order.windows(2).enumerate() {
        if height(w[1]) - height(w[0]) <= cfg.tolerance {
            ties.push(i + 1);
            ties.push(i + 2);
        }
    }
    ties.dedup();
    if !ties.is_empty() {
        match cfg.tie_policy {
            TiePolicy::Reject => {
                return Err(cur.error_at(0, ParseErrorKind::TiedHeights { ranks: ties }));
            }
            TiePolicy::BreakByTraversal => {
                // chain near-equal heights into groups ordered by post-order
                let mut start = 0;
                while start < order.len() {
                    let mut end = start + 1;
                    while end < order.len()
                        && height(order[end]) - height(order[end - 1]) <= cfg.tolerance
                    {
                        end += 1;
                    }
                    order[start..end].sort_unstable();
                    start = end;
                }
            }
        }
    }
    let mut cluster_of = vec![None; nodes.len()];
    let mut clusters = Vec::with_capacity(n - 1);
    for &id in &order {
        let mut c = Cluster::empty(n);
        for &ch in &nodes[id].children {
            if nodes[ch].children.is_empty() {
                c.insert(leaf_index(ch));
            } else {
                match &cluster_of[ch] {
                    Some(cc) => c.union_with(cc),
                    None => return Err(cur.error_at(nodes[ch].pos, ParseErrorKind::NegativeBranch)),
                }
            }
        }
        cluster_of[id] = Some(c.clone());
        clusters.push(c);
    }
    RankedTree::from_clusters(sorted, clusters).map_err(|e| cur.error_at(0, e.into()))
}

fn fmt_len(x: f64) -> String {
    format!("{x}")
}

/// Newick with the node of rank `t` at height `t * unit_gap`.
///
/// Children are written in order of their smallest leaf.
pub fn to_newick(tree: &RankedTree, unit_gap: f64) -> String {
    fn write(tree: &RankedTree, node: Node, parent_height: f64, gap: f64, out: &mut String) {
        let h = node.rank() as f64 * gap;
        match node {
            Node::Leaf(l) => out.push_str(&tree.labels()[l]),
            Node::Internal(r) => {
                out.push('(');
                let [a, b] = tree.child_nodes(r);
                write(tree, a, h, gap, out);
                out.push(',');
                write(tree, b, h, gap, out);
                out.push(')');
            }
        }
        if parent_height.is_finite() {
            out.push(':');
            out.push_str(&fmt_len(parent_height - h));
        }
    }
    let mut out = String::new();
    write(tree, Node::Internal(tree.root_rank()), f64::INFINITY, unit_gap, &mut out);
    out.push(';');
    out
}

/// Parses a move list, resolving NNI stay labels against `labels`.
pub fn parse_moves(text: &str, labels: &[String]) -> Result<Vec<Move>, ParseError> {
    let n = labels.len();
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        let err = |column: usize, kind: ParseErrorKind| ParseError { line: line_no, column, kind };
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let indent = line.len() - line.trim_start().len();
        let mut cur = Cursor::new(trimmed);
        let word = cur.label().map_err(|e| err(indent + e.column, e.kind))?;
        let sync = |e: ParseError| err(indent + e.column, e.kind);
        cur.skip_ws();
        let num_start = cur.pos;
        let digits = trimmed[num_start..].bytes().take_while(u8::is_ascii_digit).count();
        let rank: usize = trimmed[num_start..num_start + digits]
            .parse()
            .map_err(|_| sync(cur.syntax("expected a rank")))?;
        cur.pos += digits;
        let mv = match word {
            "rank" => Move::RankSwap { rank },
            "nni" => {
                let set_start = cur.pos;
                let names = label_set(&mut cur).map_err(sync)?;
                let mut stay = Cluster::empty(n);
                for name in names {
                    match labels.binary_search(&name) {
                        Ok(ix) => stay.insert(ix),
                        Err(_) => {
                            return Err(err(indent + set_start + 1, ParseErrorKind::UnknownLabel(name)))
                        }
                    }
                }
                Move::Nni { rank, stay }
            }
            other => {
                return Err(err(indent + 1, ParseErrorKind::Syntax(format!("unknown move {other:?}"))))
            }
        };
        if !cur.at_end() {
            return Err(sync(cur.syntax("trailing input")));
        }
        out.push(mv);
    }
    Ok(out)
}

/// One move per line, newline-terminated.
pub fn format_moves(moves: &[Move], labels: &[String]) -> String {
    let mut out = String::new();
    for mv in moves {
        match mv {
            Move::RankSwap { rank } => out.push_str(&format!("rank {rank}\n")),
            Move::Nni { rank, stay } => {
                let names: Vec<&str> = stay.iter().map(|i| labels[i].as_str()).collect();
                out.push_str(&format!("nni {rank} {{{}}}\n", names.join(",")));
            }
        }
    }
    out
}

/// Checks a label against the leaf-label alphabet.
pub fn valid_label(s: &str) -> bool {
    is_valid_label(s)
}
