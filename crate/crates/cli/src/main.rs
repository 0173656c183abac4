mod report;

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rnni::generate::{caterpillar_reversal, default_labels, random_tree};
use rnni::io::{
    format_moves, parse_cluster_lines, parse_newick, to_cluster_format, to_newick, NewickConfig, TiePolicy,
};
use rnni::oracle::TreeSpaceGraph;
use rnni::verify::{run_check, CheckConfig};
use rnni::{find_path, MoveKind, RankedTree, Rho};
use serde_json::json;

use report::RunReport;

#[derive(Parser)]
#[command(name = "rnni", version, about = "Distances and shortest paths between ranked phylogenetic trees")]
struct Cli {
    /// Print a machine-readable JSON report instead of plain text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Newick,
    Clusters,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Emit {
    Moves,
    Trees,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchMode {
    Caterpillar,
    Random,
}

#[derive(clap::Args)]
struct TreeInputs {
    /// Start tree file.
    from: PathBuf,
    /// Target tree file.
    to: PathBuf,
    /// Input format; guessed from the file extension when omitted.
    #[arg(long, value_enum)]
    format: Option<Format>,
    /// Rank tied Newick node heights by traversal order instead of failing.
    #[arg(long)]
    break_ties: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Print the RNNI distance between two trees.
    Distance {
        #[command(flatten)]
        inputs: TreeInputs,
        /// Report the FindPath weight under this rank-move weight instead.
        #[arg(long)]
        rho: Option<f64>,
    },
    /// Print a shortest path as a move list or as the trees along it.
    Path {
        #[command(flatten)]
        inputs: TreeInputs,
        #[arg(long, value_enum, default_value = "moves")]
        emit: Emit,
    },
    /// Compare FindPath with exhaustive search on every tree pair.
    Check {
        #[arg(long)]
        n: usize,
        /// Rank-move weights to compare against (repeatable).
        #[arg(long = "rho")]
        rhos: Vec<f64>,
        /// Worker threads for the all-pairs sweep; defaults to all cores.
        #[arg(long)]
        workers: Option<usize>,
        /// Largest accepted leaf count.
        #[arg(long, default_value_t = 6)]
        cap: usize,
        /// Random triples for the triangle inequality on large trees spaces.
        #[arg(long, default_value_t = 100_000)]
        triples: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
    /// Print uniformly random ranked trees.
    Random {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1)]
        count: usize,
        #[arg(long, value_enum, default_value = "clusters")]
        format: Format,
    },
    /// Time FindPath on caterpillar reversals or random pairs.
    Bench {
        #[arg(long)]
        n: usize,
        #[arg(long, value_enum, default_value = "caterpillar")]
        mode: BenchMode,
        #[arg(long, default_value_t = 1)]
        reps: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Dump the RNNI graph on all trees with n leaves.
    Graph {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 6)]
        cap: usize,
    },
}

struct Output {
    report: RunReport,
    text: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();
    match run(cli.command) {
        Ok(mut out) => {
            out.report.wall_ms = start.elapsed().as_secs_f64() * 1e3;
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.report).expect("report serializes"));
            } else {
                print!("{}", out.text);
            }
            if out.report.failures.is_empty() {
                ExitCode::SUCCESS
            } else {
                for f in &out.report.failures {
                    eprintln!("FAIL: {f}");
                }
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn run(command: Command) -> anyhow::Result<Output> {
    match command {
        Command::Distance { inputs, rho } => cmd_distance(&inputs, rho),
        Command::Path { inputs, emit } => cmd_path(&inputs, emit),
        Command::Check { n, rhos, workers, cap, triples, seed } => {
            let workers = workers
                .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |w| w.get()));
            let mut cfg = CheckConfig::new(n);
            cfg.rhos = rhos.into_iter().map(Rho::new).collect::<Result<_, _>>()?;
            cfg.workers = workers;
            cfg.cap = cap;
            cfg.triple_samples = triples;
            cfg.seed = seed;
            cmd_check(&cfg)
        }
        Command::Random { n, seed, count, format } => cmd_random(n, seed, count, format),
        Command::Bench { n, mode, reps, seed } => cmd_bench(n, mode, reps, seed),
        Command::Graph { n, cap } => cmd_graph(n, cap),
    }
}

fn guess_format(path: &Path) -> Option<Format> {
    match path.extension()?.to_str()? {
        "nwk" | "newick" | "tre" => Some(Format::Newick),
        "trees" | "txt" => Some(Format::Clusters),
        _ => None,
    }
}

fn read_tree(path: &Path, format: Option<Format>, break_ties: bool) -> anyhow::Result<RankedTree> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let format = format.or_else(|| guess_format(path)).unwrap_or_else(|| {
        if text.trim_start().starts_with('[') {
            Format::Clusters
        } else {
            Format::Newick
        }
    });
    let parsed = match format {
        Format::Clusters => parse_cluster_lines(&text).and_then(|mut trees| match trees.len() {
            1 => Ok(trees.pop().unwrap()),
            k => Err(rnni::io::ParseError {
                line: 1,
                column: 1,
                kind: rnni::io::ParseErrorKind::Syntax(format!("expected one tree, found {k}")),
            }),
        }),
        Format::Newick => {
            let cfg = NewickConfig {
                tie_policy: if break_ties { TiePolicy::BreakByTraversal } else { TiePolicy::Reject },
                ..NewickConfig::default()
            };
            parse_newick(&text, &cfg)
        }
    };
    parsed.with_context(|| format!("parsing {}", path.display()))
}

fn read_pair(inputs: &TreeInputs) -> anyhow::Result<(RankedTree, RankedTree)> {
    let t = read_tree(&inputs.from, inputs.format, inputs.break_ties)?;
    let r = read_tree(&inputs.to, inputs.format, inputs.break_ties)?;
    if !t.same_leaves(&r) {
        bail!("{} and {} have different leaf sets", inputs.from.display(), inputs.to.display());
    }
    Ok((t, r))
}

fn pair_inputs(inputs: &TreeInputs) -> serde_json::Value {
    json!({ "from": inputs.from.display().to_string(), "to": inputs.to.display().to_string() })
}

fn cmd_distance(inputs: &TreeInputs, rho: Option<f64>) -> anyhow::Result<Output> {
    let (t, r) = read_pair(inputs)?;
    let path = find_path(&t, &r)?;
    let mut report = RunReport::new("distance");
    report.n = Some(t.leaf_count());
    report.inputs = pair_inputs(inputs);
    let text = match rho {
        None => {
            report.result = json!({ "distance": path.len() });
            format!("{}\n", path.len())
        }
        Some(v) => {
            let rho = Rho::new(v)?;
            if v != 1.0 {
                eprintln!("warning: the FindPath path need not be shortest when rho != 1");
            }
            let weight = path.weight(rho);
            report.result = json!({ "distance": path.len(), "rho": v, "weight": weight });
            format!("{weight}\n")
        }
    };
    Ok(Output { report, text })
}

fn cmd_path(inputs: &TreeInputs, emit: Emit) -> anyhow::Result<Output> {
    let (t, r) = read_pair(inputs)?;
    let path = find_path(&t, &r)?;
    let mut report = RunReport::new("path");
    report.n = Some(t.leaf_count());
    report.inputs = pair_inputs(inputs);
    let text = match emit {
        Emit::Moves => format_moves(&path.moves(), t.labels()),
        Emit::Trees => path
            .materialize()?
            .iter()
            .map(|x| to_cluster_format(x) + "\n")
            .collect(),
    };
    report.result = json!({
        "length": path.len(),
        "emit": match emit { Emit::Moves => "moves", Emit::Trees => "trees" },
        "lines": text.lines().collect::<Vec<_>>(),
    });
    Ok(Output { report, text })
}

fn cmd_check(cfg: &CheckConfig) -> anyhow::Result<Output> {
    let rep = run_check(cfg)?;
    let trees = rnni::oracle::enumerate_trees_capped(cfg.n, cfg.cap)?;
    let graph_vertex = |i: usize| -> anyhow::Result<String> { Ok(to_cluster_format(&trees[i])) };
    let mut text = String::new();
    let bfs_note = if rep.distance_mismatches == 0 {
        "all FindPath lengths = BFS".to_string()
    } else {
        format!("{} FindPath lengths differ from BFS", rep.distance_mismatches)
    };
    writeln!(text, "{} trees, {} pairs, {bfs_note}", rep.trees, rep.pairs_checked)?;
    writeln!(
        text,
        "graph: {} edges, {}, {}, {} degree mismatches",
        rep.edges,
        if rep.connected { "connected" } else { "disconnected" },
        if rep.symmetric { "symmetric" } else { "asymmetric" },
        rep.degree_mismatches
    )?;
    let (pa, pb) = rep.diameter_pair;
    let witness = if rep.trees > 1 {
        format!(" between {} and {}", graph_vertex(pa)?, graph_vertex(pb)?)
    } else {
        String::new()
    };
    writeln!(
        text,
        "diameter: {}{witness} (caterpillar bound {})",
        rep.diameter, rep.caterpillar_bound
    )?;
    writeln!(
        text,
        "metric: {} identity, {} symmetry, {} triangle violations over {} triples",
        rep.identity_violations, rep.symmetry_violations, rep.triangle_violations, rep.triples_checked
    )?;
    let mut rhos = Vec::new();
    for r in &rep.rho_reports {
        write!(
            text,
            "rho={}: FindPath heavier than optimum on {} of {} ordered pairs",
            r.rho, r.suboptimal, r.ordered_pairs
        )?;
        let witness = match r.witness {
            Some((a, b, w, opt)) => {
                write!(text, "; e.g. {} -> {}: {w} vs {opt}", graph_vertex(a)?, graph_vertex(b)?)?;
                Some(json!({ "from": graph_vertex(a)?, "to": graph_vertex(b)?, "findpath": w, "optimum": opt }))
            }
            None => None,
        };
        writeln!(text)?;
        if r.unranked_checked > 0 {
            writeln!(
                text,
                "rho={}: unranked NNI distance differs on {} of {} ordered pairs",
                r.rho, r.unranked_mismatches, r.unranked_checked
            )?;
        }
        rhos.push(json!({
            "rho": r.rho,
            "ordered_pairs": r.ordered_pairs,
            "suboptimal": r.suboptimal,
            "impossible": r.impossible,
            "witness": witness,
            "unranked_checked": r.unranked_checked,
            "unranked_mismatches": r.unranked_mismatches,
        }));
    }
    writeln!(text, "{}", if rep.passed() { "PASS" } else { "FAIL" })?;

    let mut report = RunReport::new("check");
    report.n = Some(cfg.n);
    report.pairs_checked = Some(rep.pairs_checked);
    report.seed = Some(cfg.seed);
    report.failures = rep.failures.clone();
    report.inputs = json!({
        "rhos": cfg.rhos.iter().map(|r| r.value()).collect::<Vec<_>>(),
        "workers": cfg.workers,
        "cap": cfg.cap,
        "triple_samples": cfg.triple_samples,
    });
    report.result = json!({
        "trees": rep.trees,
        "expected_trees": rep.expected_trees.to_string(),
        "edges": rep.edges,
        "connected": rep.connected,
        "symmetric": rep.symmetric,
        "degree_mismatches": rep.degree_mismatches,
        "distance_mismatches": rep.distance_mismatches,
        "identity_violations": rep.identity_violations,
        "symmetry_violations": rep.symmetry_violations,
        "triples_checked": rep.triples_checked,
        "triangle_violations": rep.triangle_violations,
        "diameter": rep.diameter,
        "caterpillar_bound": rep.caterpillar_bound,
        "rho": rhos,
    });
    Ok(Output { report, text })
}

fn render(tree: &RankedTree, format: Format) -> String {
    match format {
        Format::Clusters => to_cluster_format(tree),
        Format::Newick => to_newick(tree, 1.0),
    }
}

fn cmd_random(n: usize, seed: u64, count: usize, format: Format) -> anyhow::Result<Output> {
    if n < 2 {
        bail!("--n must be at least 2");
    }
    let leaves = default_labels(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trees: Vec<String> = (0..count)
        .map(|_| render(&random_tree(&leaves, &mut rng), format))
        .collect();
    let text = trees.iter().map(|t| format!("{t}\n")).collect();
    let mut report = RunReport::new("random");
    report.n = Some(n);
    report.seed = Some(seed);
    report.inputs = json!({ "count": count });
    report.result = json!({ "trees": trees });
    Ok(Output { report, text })
}

fn cmd_bench(n: usize, mode: BenchMode, reps: usize, seed: u64) -> anyhow::Result<Output> {
    if n < 3 {
        bail!("--n must be at least 3");
    }
    let reps = reps.max(1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let leaves = default_labels(n);
    let mut times = Vec::with_capacity(reps);
    let mut moves = Vec::with_capacity(reps);
    let mut rank_moves = Vec::with_capacity(reps);
    for _ in 0..reps {
        let (t, r) = match mode {
            BenchMode::Caterpillar => caterpillar_reversal(n),
            BenchMode::Random => (random_tree(&leaves, &mut rng), random_tree(&leaves, &mut rng)),
        };
        let clock = Instant::now();
        let path = find_path(&t, &r)?;
        times.push(clock.elapsed().as_secs_f64() * 1e3);
        moves.push(path.len());
        rank_moves.push(path.steps().iter().filter(|s| s.kind() == MoveKind::RankSwap).count());
    }
    let mut failures = Vec::new();
    let expected = (n - 1) * (n - 2) / 2;
    if mode == BenchMode::Caterpillar {
        if let Some(&m) = moves.iter().find(|&&m| m != expected) {
            failures.push(format!("caterpillar path has {m} moves, expected {expected}"));
        }
    }
    let mut sorted = times.clone();
    sorted.sort_by(f64::total_cmp);
    let median = sorted[sorted.len() / 2];
    let mode_name = match mode {
        BenchMode::Caterpillar => "caterpillar",
        BenchMode::Random => "random",
    };
    let mut text = String::new();
    for (i, (t, m)) in times.iter().zip(&moves).enumerate() {
        writeln!(text, "rep {}: {m} moves in {t:.1} ms", i + 1)?;
    }
    writeln!(text, "n={n} mode={mode_name}: median {median:.1} ms, min {:.1} ms", sorted[0])?;
    if mode == BenchMode::Caterpillar {
        writeln!(text, "expected moves (n-1)(n-2)/2 = {expected}")?;
    }
    let mut report = RunReport::new("bench");
    report.n = Some(n);
    report.seed = (mode == BenchMode::Random).then_some(seed);
    report.failures = failures;
    report.inputs = json!({ "mode": mode_name, "reps": reps });
    report.result = json!({
        "moves": moves,
        "rank_moves": rank_moves,
        "times_ms": times,
        "median_ms": median,
        "expected_moves": (mode == BenchMode::Caterpillar).then_some(expected),
    });
    Ok(Output { report, text })
}

fn cmd_graph(n: usize, cap: usize) -> anyhow::Result<Output> {
    let g = TreeSpaceGraph::build_capped(n, cap)?;
    let mut text = String::from("# vertices\n");
    let vertices: Vec<String> = g.vertices().iter().map(to_cluster_format).collect();
    for (i, v) in vertices.iter().enumerate() {
        writeln!(text, "{i} {v}")?;
    }
    text.push_str("# edges\n");
    let mut edges = Vec::new();
    for (a, b, kind) in g.edges() {
        writeln!(text, "{a} {b} {kind}")?;
        edges.push(json!([a, b, kind.to_string()]));
    }
    let mut report = RunReport::new("graph");
    report.n = Some(n);
    report.inputs = json!({ "cap": cap });
    report.result = json!({ "vertices": vertices, "edges": edges });
    Ok(Output { report, text })
}
