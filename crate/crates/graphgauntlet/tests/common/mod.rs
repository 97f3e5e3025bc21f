//! Brute-force reference implementations and random graph sampling shared
//! by the integration and acceptance suites.
//!
//! Everything here is deliberately independent of the library's solver
//! code: plain recursive enumeration and an exhaustive edge-trail search,
//! so oracle results can be cross-checked rather than assumed.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use graphgauntlet::graph::{AdjacencyMatrix, LabeledGraph, NodeLabel};

/// Every simple `s -> t` path with its cost, by plain recursion, sorted by
/// label sequence.
pub fn enumerate_paths_brute(
    graph: &LabeledGraph,
    source: NodeLabel,
    target: NodeLabel,
) -> Vec<(Vec<NodeLabel>, u64)> {
    let n = graph.n();
    let s = graph.index_of(source).expect("source in graph");
    let t = graph.index_of(target).expect("target in graph");
    let mut out: Vec<(Vec<NodeLabel>, u64)> = Vec::new();
    let mut visited = vec![false; n];
    let mut trail = vec![s];
    visited[s] = true;

    fn recurse(
        u: usize,
        t: usize,
        cost: u64,
        graph: &LabeledGraph,
        visited: &mut [bool],
        trail: &mut Vec<usize>,
        out: &mut Vec<(Vec<NodeLabel>, u64)>,
    ) {
        if u == t {
            out.push((trail.iter().map(|&i| graph.label_of(i)).collect(), cost));
            return;
        }
        for v in 0..graph.n() {
            let w = graph.matrix().entry(u, v);
            if w > 0 && !visited[v] {
                visited[v] = true;
                trail.push(v);
                recurse(v, t, cost + u64::from(w), graph, visited, trail, out);
                trail.pop();
                visited[v] = false;
            }
        }
    }

    recurse(s, t, 0, graph, &mut visited, &mut trail, &mut out);
    out.sort();
    out
}

/// Minimum-cost simple path by exhaustive enumeration, ties broken to the
/// lexicographically smallest label sequence.
pub fn best_path_brute(
    graph: &LabeledGraph,
    source: NodeLabel,
    target: NodeLabel,
) -> Option<(Vec<NodeLabel>, u64)> {
    enumerate_paths_brute(graph, source, target)
        .into_iter()
        .min_by(|a, b| a.1.cmp(&b.1).then_with(|| a.0.cmp(&b.0)))
}

/// Number of enumerated paths achieving the optimum cost.
pub fn count_optima_brute(graph: &LabeledGraph, source: NodeLabel, target: NodeLabel) -> usize {
    let paths = enumerate_paths_brute(graph, source, target);
    match paths.iter().map(|(_, c)| *c).min() {
        Some(best) => paths.iter().filter(|(_, c)| *c == best).count(),
        None => 0,
    }
}

/// Exhaustive edge-trail search: does a walk from `start` exist that uses
/// every edge exactly once? No degree-parity shortcuts; memoisation on
/// (node, used-edge bitmask) keeps the search tractable for n <= 7.
/// A graph with no edges has no trail, matching the library's definition.
pub fn euler_trail_brute(graph: &LabeledGraph, start: NodeLabel) -> bool {
    let n = graph.n();
    let s = graph.index_of(start).expect("start in graph");
    let mut edges: Vec<(usize, usize)> = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            if graph.matrix().entry(u, v) > 0 {
                edges.push((u, v));
            }
        }
    }
    if edges.is_empty() {
        return false;
    }
    assert!(edges.len() <= 24, "edge-trail search limited to small graphs");
    let full: u32 = (1u32 << edges.len()) - 1;
    let mut memo: HashMap<(usize, u32), bool> = HashMap::new();

    fn search(
        u: usize,
        used: u32,
        full: u32,
        edges: &[(usize, usize)],
        memo: &mut HashMap<(usize, u32), bool>,
    ) -> bool {
        if used == full {
            return true;
        }
        if let Some(&known) = memo.get(&(u, used)) {
            return known;
        }
        let mut found = false;
        for (i, &(a, b)) in edges.iter().enumerate() {
            if used & (1 << i) != 0 {
                continue;
            }
            let next = if a == u {
                b
            } else if b == u {
                a
            } else {
                continue;
            };
            if search(next, used | (1 << i), full, edges, memo) {
                found = true;
                break;
            }
        }
        memo.insert((u, used), found);
        found
    }

    search(s, 0, full, &edges, &mut memo)
}

/// Random validated graph with the given flags: no self-loops, symmetric
/// when undirected, binary entries when unweighted.
pub fn random_graph(
    rng: &mut ChaCha8Rng,
    n: usize,
    edge_prob: f64,
    directed: bool,
    weighted: bool,
    weight_max: u32,
) -> LabeledGraph {
    let mut entries = vec![vec![0u32; n]; n];
    if directed {
        for i in 0..n {
            for j in 0..n {
                if i != j && rng.gen_bool(edge_prob) {
                    entries[i][j] = if weighted { rng.gen_range(1..=weight_max) } else { 1 };
                }
            }
        }
    } else {
        for i in 0..n {
            for j in (i + 1)..n {
                if rng.gen_bool(edge_prob) {
                    let w = if weighted { rng.gen_range(1..=weight_max) } else { 1 };
                    entries[i][j] = w;
                    entries[j][i] = w;
                }
            }
        }
    }
    let matrix = AdjacencyMatrix::new(entries, directed, weighted).expect("valid shape");
    LabeledGraph::canonical(matrix).expect("canonical labels")
}

/// Seeded RNG for reproducible test sampling.
pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
