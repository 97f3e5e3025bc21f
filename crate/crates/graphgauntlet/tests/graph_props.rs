//! Structural invariants of the graph layer, partly via proptest.

mod common;

use common::{random_graph, rng};
use proptest::prelude::*;
use rand::Rng;

use graphgauntlet::eval::{parse_path, Classification, EvalConfig};
use graphgauntlet::graph::{NodeLabel, Path, Permutation, Presentation};

#[test]
fn relabel_preserves_structure_on_1000_random_graphs() {
    let mut r = rng(2024);
    for _ in 0..1000 {
        let n = r.gen_range(2..=10);
        let directed = r.gen_bool(0.3);
        let weighted = r.gen_bool(0.3);
        let g = random_graph(&mut r, n, 0.4, directed, weighted, 5);

        let mut mapping: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            mapping.swap(i, r.gen_range(0..=i));
        }
        let perm = Permutation::new(mapping).unwrap();
        let presentation =
            if r.gen_bool(0.5) { Presentation::Sorted } else { Presentation::Permuted };
        let relabeled = g.relabel(&perm, presentation).unwrap();

        assert_eq!(relabeled.matrix().edge_count(), g.matrix().edge_count());
        let mut degrees: Vec<usize> =
            g.degree_profile().iter().map(|d| d.total_degree).collect();
        let mut relabeled_degrees: Vec<usize> =
            relabeled.degree_profile().iter().map(|d| d.total_degree).collect();
        degrees.sort_unstable();
        relabeled_degrees.sort_unstable();
        assert_eq!(degrees, relabeled_degrees);
        assert_eq!(relabeled.is_connected(true), g.is_connected(true));
        assert!(relabeled.matrix().validate().is_empty());
    }
}

#[test]
fn degree_sum_is_twice_edge_count_undirected() {
    let mut r = rng(7);
    for _ in 0..200 {
        let n = r.gen_range(2..=10);
        let g = random_graph(&mut r, n, 0.5, false, false, 1);
        let total: usize = g.degree_profile().iter().map(|d| d.total_degree).sum();
        assert_eq!(total, 2 * g.matrix().edge_count());
    }
}

#[test]
fn paths_stay_valid_under_relabelling() {
    let mut r = rng(31);
    let mut checked = 0;
    while checked < 200 {
        let n = r.gen_range(3..=10);
        let g = random_graph(&mut r, n, 0.5, false, false, 1);
        // random walk of a few hops, if one exists
        let mut nodes = vec![0usize];
        for _ in 0..3 {
            let u = *nodes.last().unwrap();
            let neighbours: Vec<usize> =
                (0..n).filter(|&v| g.matrix().entry(u, v) > 0).collect();
            if neighbours.is_empty() {
                break;
            }
            nodes.push(neighbours[r.gen_range(0..neighbours.len())]);
        }
        if nodes.len() < 2 {
            continue;
        }
        let path: Path = nodes.iter().map(|&i| g.label_of(i)).collect();
        assert!(path.is_valid_on(&g));

        let mut mapping: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            mapping.swap(i, r.gen_range(0..=i));
        }
        let perm = Permutation::new(mapping).unwrap();
        let relabeled = g.relabel(&perm, Presentation::Sorted).unwrap();
        let mapped: Path = path
            .nodes()
            .iter()
            .map(|&l| {
                let i = g.index_of(l).unwrap();
                g.label_of(perm.apply(i))
            })
            .collect();
        assert!(mapped.is_valid_on(&relabeled), "mapped path invalid after relabel");
        checked += 1;
    }
}

proptest! {
    /// Applying a permutation and then its inverse is the identity.
    #[test]
    fn relabel_roundtrips_through_inverse(seed in 0u64..500, n in 2usize..=10) {
        let mut r = rng(seed);
        let g = random_graph(&mut r, n, 0.4, false, false, 1);
        let mut mapping: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            mapping.swap(i, r.gen_range(0..=i));
        }
        let perm = Permutation::new(mapping).unwrap();
        for presentation in [Presentation::Sorted, Presentation::Permuted] {
            let back = g
                .relabel(&perm, presentation)
                .unwrap()
                .relabel(&perm.inverse(), presentation)
                .unwrap();
            prop_assert_eq!(&back, &g);
        }
    }

    /// Prepending prose without node sequences never changes the parse.
    #[test]
    fn parse_path_ignores_leading_prose(words in proptest::collection::vec("[a-z]{2,8}", 0..12)) {
        let cfg = EvalConfig::default();
        let answer = "A -> B -> C";
        let prose = words.join(" ");
        let combined = format!("{prose} {answer}");
        let parsed = parse_path(&combined, &cfg);
        prop_assert_eq!(parsed.classification, Classification::Path);
        let expected: Vec<NodeLabel> =
            "ABC".chars().map(|c| NodeLabel::from_letter(c).unwrap()).collect();
        prop_assert_eq!(parsed.path.unwrap(), expected);
    }

    /// Partial credit is monotone in the length of the correct prefix.
    #[test]
    fn partial_credit_monotone_in_prefix(break_at in 0usize..6) {
        use graphgauntlet::eval::score;
        use graphgauntlet::generator::{generate, OrderBand, ProblemKind, Truth};

        let mut inst = generate(ProblemKind::Linear, OrderBand::O10, 1).unwrap();
        let truth: Vec<NodeLabel> =
            "ABCDEF".chars().map(|c| NodeLabel::from_letter(c).unwrap()).collect();
        inst.truth = Truth::Path { path: Path::new(truth.clone()), cost: 5 };

        // response correct up to break_at, then a wrong node
        let mut nodes: Vec<NodeLabel> = truth[..break_at.min(truth.len())].to_vec();
        nodes.push(NodeLabel::from_letter('Z').unwrap());
        let text = Path::new(nodes).arrow_string();
        let parsed = parse_path(&text, &EvalConfig::default());
        let grade = score(&inst, &parsed);
        let expected = break_at.min(truth.len()) as f64 / truth.len() as f64;
        prop_assert!((grade.partial.value() - expected).abs() < 1e-12);
        prop_assert_eq!(grade.partial.value() == 1.0, break_at >= truth.len());
    }
}
