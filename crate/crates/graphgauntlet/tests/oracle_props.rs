//! Solver properties cross-checked against the independent brute-force
//! references in `common`.

mod common;

use common::{best_path_brute, count_optima_brute, euler_trail_brute, random_graph, rng};
use rand::Rng;

use graphgauntlet::generator::{generate, jumble, OrderBand, ProblemKind, Truth};
use graphgauntlet::graph::{NodeLabel, Path, Permutation, Presentation};
use graphgauntlet::oracle::{
    checkpoint_least_cost, count_optimal_paths, has_euler_path_from, least_cost_path_dijkstra,
    shortest_path_bfs, solve,
};

fn label(i: usize) -> NodeLabel {
    NodeLabel::from_index(i).unwrap()
}

#[test]
fn solvers_match_brute_force_on_random_graphs() {
    let mut r = rng(0xC0FFEE);
    for case in 0..200 {
        let n = r.gen_range(2..=8);
        let directed = r.gen_bool(0.5);
        let weighted = r.gen_bool(0.5);
        let g = random_graph(&mut r, n, 0.4, directed, weighted, 5);
        let (s, t) = (label(0), label(n - 1));

        let solved = if weighted {
            least_cost_path_dijkstra(&g, s, t).unwrap()
        } else {
            shortest_path_bfs(&g, s, t).unwrap()
        };
        let brute = best_path_brute(&g, s, t);
        match (solved.path, brute) {
            (None, None) => {}
            (Some(path), Some((brute_nodes, brute_cost))) => {
                assert_eq!(solved.cost, Some(brute_cost), "case {case}: cost mismatch");
                assert_eq!(path.nodes(), brute_nodes, "case {case}: tie-break mismatch");
            }
            (solver, brute) => panic!("case {case}: reachability disagrees: {solver:?} vs {brute:?}"),
        }

        let counted = count_optimal_paths(&g, s, t).unwrap();
        assert_eq!(counted as usize, count_optima_brute(&g, s, t), "case {case}: count mismatch");
    }
}

#[test]
fn undirected_cost_is_symmetric() {
    let mut r = rng(17);
    for _ in 0..100 {
        let n = r.gen_range(2..=8);
        let weighted = r.gen_bool(0.5);
        let g = random_graph(&mut r, n, 0.4, false, weighted, 5);
        let (s, t) = (label(0), label(n - 1));
        let fwd = solve(&g, s, t).unwrap();
        let back = solve(&g, t, s).unwrap();
        assert_eq!(fwd.cost, back.cost);
    }
}

#[test]
fn euler_check_matches_exhaustive_trail_search() {
    let mut r = rng(99);
    for case in 0..200 {
        let n = r.gen_range(2..=7);
        let g = random_graph(&mut r, n, 0.4, false, false, 1);
        let start = label(r.gen_range(0..n));
        let fast = has_euler_path_from(&g, start).unwrap();
        let slow = euler_trail_brute(&g, start);
        assert_eq!(fast, slow, "case {case}: disagreement on n={n} start={start}");
    }
}

#[test]
fn checkpoint_cost_is_sum_of_leg_costs() {
    let mut r = rng(555);
    let mut checked = 0;
    while checked < 60 {
        let n = r.gen_range(3..=8);
        let g = random_graph(&mut r, n, 0.5, false, true, 5);
        let (s, m, t) = (label(0), label(1), label(n - 1));
        if m == t {
            continue;
        }
        let combined = checkpoint_least_cost(&g, s, m, t).unwrap();
        let first = solve(&g, s, m).unwrap();
        let second = solve(&g, m, t).unwrap();
        match (combined.cost, first.cost, second.cost) {
            (Some(c), Some(a), Some(b)) => assert_eq!(c, a + b),
            (None, a, b) => assert!(a.is_none() || b.is_none()),
            other => panic!("inconsistent legs: {other:?}"),
        }
        checked += 1;
    }
}

#[test]
fn solving_is_invariant_under_relabelling() {
    // unique-solution instances: the relabelled graph's solution is the
    // label-mapped original solution
    let mut r = rng(321);
    for seed in 0..20 {
        let inst = generate(ProblemKind::TreeMultiPath, OrderBand::O10, seed).unwrap();
        let n = inst.graph.n();
        let mut mapping: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            mapping.swap(i, r.gen_range(0..=i));
        }
        let perm = Permutation::new(mapping).unwrap();
        let relabeled = inst.graph.relabel(&perm, Presentation::Sorted).unwrap();

        let map = |l: NodeLabel| {
            let i = inst.graph.index_of(l).unwrap();
            inst.graph.label_of(perm.apply(i))
        };
        let Truth::Path { path, cost } = &inst.truth else { panic!() };
        let mapped: Path = path.nodes().iter().map(|&l| map(l)).collect();
        let solved = solve(&relabeled, map(inst.source), map(inst.target)).unwrap();
        assert_eq!(solved.cost, Some(*cost));
        assert_eq!(solved.path.unwrap(), mapped);
    }
}

#[test]
fn jumbled_instances_solve_to_their_stored_truth() {
    for seed in 0..10 {
        let base = generate(ProblemKind::WeightedTree, OrderBand::O20, seed).unwrap();
        let jumbled = jumble(&base, seed + 1000).unwrap();
        let Truth::Path { path, cost } = &jumbled.truth else { panic!() };
        let solved = solve(&jumbled.graph, jumbled.source, jumbled.target).unwrap();
        assert_eq!(solved.cost, Some(*cost));
        assert_eq!(solved.path.as_ref(), Some(path));
    }
}
