use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rnni::generate::{default_labels, random_tree};
use rnni::io::{
    format_moves, parse_cluster_format, parse_cluster_lines, parse_moves, parse_newick, to_cluster_format,
    to_newick, NewickConfig,
};
use rnni::oracle::{enumerate_trees, TreeSpaceGraph};
use rnni::{find_path, RankedTree, TreePath};

fn assert_round_trips(t: &RankedTree) {
    let text = to_cluster_format(t);
    let back = parse_cluster_format(&text).unwrap();
    assert_eq!(&back, t);
    assert_eq!(to_cluster_format(&back), text);
    let nwk = to_newick(t, 1.0);
    assert_eq!(&parse_newick(&nwk, &NewickConfig::default()).unwrap(), t, "{nwk}");
    assert_eq!(&parse_newick(&to_newick(t, 0.25), &NewickConfig::default()).unwrap(), t);
}

fn assert_moves_round_trip(from: &RankedTree, to: &RankedTree) {
    let moves = find_path(from, to).unwrap().moves();
    let text = format_moves(&moves, from.labels());
    let parsed = parse_moves(&text, from.labels()).unwrap();
    assert_eq!(parsed, moves);
    assert_eq!(format_moves(&parsed, from.labels()), text);
    assert_eq!(&TreePath::from_moves(from.clone(), &parsed).unwrap().end(), to);
}

#[test]
fn enumerated_trees_round_trip() {
    for n in 2..=5 {
        let trees = enumerate_trees(n).unwrap();
        for t in &trees {
            assert_round_trips(t);
        }
        let joined: String = trees.iter().map(|t| to_cluster_format(t) + "\n").collect();
        assert_eq!(parse_cluster_lines(&joined).unwrap(), trees);
    }
}

#[test]
fn oracle_paths_round_trip() {
    for n in 3..=5 {
        let g = TreeSpaceGraph::build(n).unwrap();
        let vs = g.vertices();
        for s in (0..vs.len()).step_by(3) {
            for t in (0..vs.len()).step_by(11) {
                assert_moves_round_trip(&vs[s], &vs[t]);
            }
        }
        for (a, b, _) in g.edges() {
            assert_moves_round_trip(&vs[a], &vs[b]);
        }
    }
}

#[test]
fn random_fifty_leaf_trees_round_trip() {
    let leaves = default_labels(50);
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut prev = random_tree(&leaves, &mut rng);
    for _ in 0..1000 {
        let t = random_tree(&leaves, &mut rng);
        assert_round_trips(&t);
        assert_moves_round_trip(&prev, &t);
        prev = t;
    }
}

#[test]
fn newick_with_real_heights() {
    let t = parse_newick("((a1:0.5,a2:0.5):2.25,(a3:1.5,a4:1.5):1.25);", &NewickConfig::default()).unwrap();
    assert_eq!(to_cluster_format(&t), "[{a1,a2},{a3,a4},{a1,a2,a3,a4}]");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn parsers_never_panic(bytes in proptest::collection::vec(any::<u8>(), 0..64)) {
        let text = String::from_utf8_lossy(&bytes);
        let labels = default_labels(4);
        let _ = parse_cluster_format(&text);
        let _ = parse_cluster_lines(&text);
        let _ = parse_newick(&text, &NewickConfig::default());
        let _ = parse_moves(&text, &labels);
    }

    #[test]
    fn near_miss_inputs_never_panic(s in "[\\[\\]{}(),;:a-d0-9. \n-]{0,40}") {
        let labels = default_labels(4);
        let _ = parse_cluster_format(&s);
        let _ = parse_newick(&s, &NewickConfig::default());
        let _ = parse_moves(&s, &labels);
        let _ = parse_moves(&format!("nni {s}"), &labels);
    }
}
