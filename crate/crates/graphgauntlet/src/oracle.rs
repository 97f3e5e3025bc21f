//! Exact solvers used to produce ground truths and re-verify generated
//! instances.
//!
//! Every solver is total and deterministic: when several optimal paths
//! exist, the lexicographically smallest label sequence is returned. The
//! benchmark generators guarantee unique optima, but the tie-break keeps
//! these functions well-defined on arbitrary inputs (and re-verification
//! honest).

use thiserror::Error;

use crate::graph::{GraphError, LabeledGraph, NodeLabel, Path};

/// Node-count cap for [`enumerate_simple_paths`]; beyond this the number of
/// simple paths can blow up exponentially.
pub const MAX_ENUMERATION_NODES: usize = 16;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OracleError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph too large for enumeration (n={n}, max {MAX_ENUMERATION_NODES})")]
    GraphTooLarge { n: usize },
    #[error("expected an unweighted graph")]
    ExpectedUnweighted,
    #[error("expected a weighted graph")]
    ExpectedWeighted,
    #[error("degenerate checkpoint: must differ from source and target")]
    DegenerateCheckpoint,
    #[error("max_paths must be >= 1")]
    ZeroMaxPaths,
}

/// Outcome of a path solve: the optimal path and its cost, or nothing when
/// the target is unreachable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveResult {
    pub path: Option<Path>,
    pub cost: Option<u64>,
}

impl SolveResult {
    pub fn found(path: Path, cost: u64) -> Self {
        SolveResult { path: Some(path), cost: Some(cost) }
    }

    pub fn unreachable() -> Self {
        SolveResult { path: None, cost: None }
    }

    pub fn is_reachable(&self) -> bool {
        self.path.is_some()
    }
}

/// Minimum cost from every node TO `target`, following edge direction.
/// Works for both metrics: unweighted graphs have all edge costs 1, so this
/// is plain BFS distance; weighted graphs get Dijkstra.
fn dist_to_target(graph: &LabeledGraph, target: usize) -> Vec<Option<u64>> {
    let n = graph.n();
    let m = graph.matrix();
    let mut dist: Vec<Option<u64>> = vec![None; n];
    dist[target] = Some(0);
    // Dijkstra over the reversed graph; n <= 26 so the O(n^2) scan is fine.
    let mut done = vec![false; n];
    loop {
        let mut best: Option<(u64, usize)> = None;
        for u in 0..n {
            if !done[u] {
                if let Some(d) = dist[u] {
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, u));
                    }
                }
            }
        }
        let Some((du, u)) = best else { break };
        done[u] = true;
        for v in 0..n {
            let w = m.entry(v, u); // reversed edge v -> u
            if w > 0 {
                let cand = du + u64::from(w);
                if dist[v].map_or(true, |d| cand < d) {
                    dist[v] = Some(cand);
                }
            }
        }
    }
    dist
}

/// Minimum cost from `source` to every node, following edge direction.
fn dist_from_source(graph: &LabeledGraph, source: usize) -> Vec<Option<u64>> {
    let n = graph.n();
    let m = graph.matrix();
    let mut dist: Vec<Option<u64>> = vec![None; n];
    dist[source] = Some(0);
    let mut done = vec![false; n];
    loop {
        let mut best: Option<(u64, usize)> = None;
        for u in 0..n {
            if !done[u] {
                if let Some(d) = dist[u] {
                    if best.map_or(true, |(bd, _)| d < bd) {
                        best = Some((d, u));
                    }
                }
            }
        }
        let Some((du, u)) = best else { break };
        done[u] = true;
        for v in 0..n {
            let w = m.entry(u, v);
            if w > 0 {
                let cand = du + u64::from(w);
                if dist[v].map_or(true, |d| cand < d) {
                    dist[v] = Some(cand);
                }
            }
        }
    }
    dist
}

/// Walks from `source` towards `target` always taking the smallest-letter
/// neighbour that stays on an optimal path. Yields the lexicographically
/// smallest optimal label sequence.
fn reconstruct_lex_min(
    graph: &LabeledGraph,
    source: usize,
    target: usize,
    dist_to: &[Option<u64>],
) -> SolveResult {
    let Some(total) = dist_to[source] else {
        return SolveResult::unreachable();
    };
    let n = graph.n();
    let m = graph.matrix();
    let mut nodes = vec![graph.label_of(source)];
    let mut u = source;
    while u != target {
        let du = dist_to[u].unwrap();
        let mut next: Option<(NodeLabel, usize)> = None;
        for v in 0..n {
            let w = m.entry(u, v);
            if w == 0 {
                continue;
            }
            if let Some(dv) = dist_to[v] {
                if u64::from(w) + dv == du {
                    let label = graph.label_of(v);
                    if next.map_or(true, |(best, _)| label < best) {
                        next = Some((label, v));
                    }
                }
            }
        }
        // some optimal edge always exists while dist is finite and u != target
        let (label, v) = next.expect("optimal successor");
        nodes.push(label);
        u = v;
    }
    SolveResult::found(Path::new(nodes), total)
}

/// Minimum-hop path on an unweighted graph, direction respected.
/// Ties break to the lexicographically smallest label sequence.
pub fn shortest_path_bfs(
    graph: &LabeledGraph,
    source: NodeLabel,
    target: NodeLabel,
) -> Result<SolveResult, OracleError> {
    if graph.matrix().weighted() {
        return Err(OracleError::ExpectedUnweighted);
    }
    let s = graph.require_index(source)?;
    let t = graph.require_index(target)?;
    let dist = dist_to_target(graph, t);
    Ok(reconstruct_lex_min(graph, s, t, &dist))
}

/// Minimum-total-weight path on a weighted graph (all nonzero entries >= 1),
/// direction respected, lexicographic tie-break.
pub fn least_cost_path_dijkstra(
    graph: &LabeledGraph,
    source: NodeLabel,
    target: NodeLabel,
) -> Result<SolveResult, OracleError> {
    if !graph.matrix().weighted() {
        return Err(OracleError::ExpectedWeighted);
    }
    let s = graph.require_index(source)?;
    let t = graph.require_index(target)?;
    let dist = dist_to_target(graph, t);
    Ok(reconstruct_lex_min(graph, s, t, &dist))
}

/// Solves with the metric matching the graph's weighted flag.
pub fn solve(
    graph: &LabeledGraph,
    source: NodeLabel,
    target: NodeLabel,
) -> Result<SolveResult, OracleError> {
    if graph.matrix().weighted() {
        least_cost_path_dijkstra(graph, source, target)
    } else {
        shortest_path_bfs(graph, source, target)
    }
}

/// Number of distinct simple paths achieving the optimal objective
/// (hop count when unweighted, total weight when weighted); 0 if
/// unreachable.
///
/// Positive edge costs make every optimal walk simple, so counting over the
/// shortest-path DAG is exact.
pub fn count_optimal_paths(
    graph: &LabeledGraph,
    source: NodeLabel,
    target: NodeLabel,
) -> Result<u64, OracleError> {
    let s = graph.require_index(source)?;
    let t = graph.require_index(target)?;
    if s == t {
        return Ok(1);
    }
    let n = graph.n();
    let m = graph.matrix();
    let from = dist_from_source(graph, s);
    let to = dist_to_target(graph, t);
    let Some(total) = from[t] else {
        return Ok(0);
    };
    // nodes on at least one optimal path, in increasing distance from source
    let mut order: Vec<usize> = (0..n)
        .filter(|&u| matches!((from[u], to[u]), (Some(a), Some(b)) if a + b == total))
        .collect();
    order.sort_by_key(|&u| from[u]);
    let mut ways = vec![0u128; n];
    ways[s] = 1;
    for &u in &order {
        for &v in &order {
            let w = m.entry(u, v);
            if w > 0 && from[u].unwrap() + u64::from(w) == from[v].unwrap() {
                ways[v] = ways[v].saturating_add(ways[u]);
            }
        }
    }
    Ok(u64::try_from(ways[t]).unwrap_or(u64::MAX))
}

/// All simple `source -> target` paths with their costs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enumeration {
    /// Paths in lexicographic order of their label sequences.
    pub paths: Vec<(Path, u64)>,
    /// True when the listing stopped at `max_paths`.
    pub truncated: bool,
}

impl Enumeration {
    /// Smallest cost over the enumerated paths.
    pub fn min_cost(&self) -> Option<u64> {
        self.paths.iter().map(|(_, c)| *c).min()
    }

    /// How many enumerated paths achieve the minimum cost.
    pub fn optimum_count(&self) -> usize {
        match self.min_cost() {
            Some(c) => self.paths.iter().filter(|(_, pc)| *pc == c).count(),
            None => 0,
        }
    }
}

/// Exhaustively lists simple paths in lexicographic order, stopping after
/// `max_paths`. Guarded to n <= 16 nodes.
pub fn enumerate_simple_paths(
    graph: &LabeledGraph,
    source: NodeLabel,
    target: NodeLabel,
    max_paths: usize,
) -> Result<Enumeration, OracleError> {
    if graph.n() > MAX_ENUMERATION_NODES {
        return Err(OracleError::GraphTooLarge { n: graph.n() });
    }
    if max_paths == 0 {
        return Err(OracleError::ZeroMaxPaths);
    }
    let s = graph.require_index(source)?;
    let t = graph.require_index(target)?;
    let n = graph.n();
    let m = graph.matrix();
    // neighbours in label order so the DFS emits lexicographically
    let mut succ: Vec<Vec<usize>> = vec![Vec::new(); n];
    for u in 0..n {
        let mut vs: Vec<usize> = (0..n).filter(|&v| m.entry(u, v) > 0).collect();
        vs.sort_by_key(|&v| graph.label_of(v));
        succ[u] = vs;
    }

    let mut out = Vec::new();
    let mut truncated = false;
    let mut visited = vec![false; n];
    let mut stack_path: Vec<usize> = vec![s];
    let mut cost = 0u64;
    visited[s] = true;

    // The flag is raised only when a (max_paths + 1)-th path turns up, so a
    // listing that finishes naturally at exactly max_paths is not truncated.
    fn dfs(
        u: usize,
        t: usize,
        graph: &LabeledGraph,
        succ: &[Vec<usize>],
        visited: &mut [bool],
        stack_path: &mut Vec<usize>,
        cost: &mut u64,
        out: &mut Vec<(Path, u64)>,
        max_paths: usize,
        truncated: &mut bool,
    ) {
        if *truncated {
            return;
        }
        if u == t {
            if out.len() == max_paths {
                *truncated = true;
            } else {
                out.push((stack_path.iter().map(|&i| graph.label_of(i)).collect(), *cost));
            }
            return;
        }
        for &v in &succ[u] {
            if visited[v] {
                continue;
            }
            let w = u64::from(graph.matrix().entry(u, v));
            visited[v] = true;
            stack_path.push(v);
            *cost += w;
            dfs(v, t, graph, succ, visited, stack_path, cost, out, max_paths, truncated);
            *cost -= w;
            stack_path.pop();
            visited[v] = false;
            if *truncated {
                return;
            }
        }
    }

    dfs(s, t, graph, &succ, &mut visited, &mut stack_path, &mut cost, &mut out, max_paths, &mut truncated);
    Ok(Enumeration { paths: out, truncated })
}

/// True iff a walk from `source` to `target` exists, following edge
/// direction when the graph is directed.
pub fn reachable(
    graph: &LabeledGraph,
    source: NodeLabel,
    target: NodeLabel,
) -> Result<bool, OracleError> {
    let s = graph.require_index(source)?;
    let t = graph.require_index(target)?;
    let n = graph.n();
    let m = graph.matrix();
    let mut seen = vec![false; n];
    let mut stack = vec![s];
    seen[s] = true;
    while let Some(u) = stack.pop() {
        if u == t {
            return Ok(true);
        }
        for v in 0..n {
            if m.entry(u, v) > 0 && !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    Ok(seen[t])
}

/// Euler-trail feasibility from a fixed start, for undirected graphs.
///
/// True iff the subgraph induced by edge-touching nodes is connected and
/// either every degree is even (start anywhere with an edge) or exactly two
/// nodes have odd degree and the start is one of them. Isolated nodes are
/// irrelevant; a graph with no edges at all has no trail.
pub fn has_euler_path_from(graph: &LabeledGraph, start: NodeLabel) -> Result<bool, OracleError> {
    let s = graph.require_index(start)?;
    let n = graph.n();
    let m = graph.matrix();
    let degrees: Vec<usize> = graph.degree_profile().iter().map(|d| d.total_degree).collect();
    let touching: Vec<usize> = (0..n).filter(|&u| degrees[u] > 0).collect();
    if touching.is_empty() {
        return Ok(false);
    }
    if degrees[s] == 0 {
        return Ok(false);
    }
    // connectivity over edge-touching nodes only
    let mut seen = vec![false; n];
    let mut stack = vec![touching[0]];
    seen[touching[0]] = true;
    let mut reached = 1;
    while let Some(u) = stack.pop() {
        for v in 0..n {
            if (m.entry(u, v) > 0 || m.entry(v, u) > 0) && !seen[v] {
                seen[v] = true;
                reached += 1;
                stack.push(v);
            }
        }
    }
    if reached != touching.len() {
        return Ok(false);
    }
    let odd: Vec<usize> = touching.iter().copied().filter(|&u| degrees[u] % 2 == 1).collect();
    Ok(match odd.len() {
        0 => true,
        2 => odd.contains(&s),
        _ => false,
    })
}

/// Least-cost path from `source` to `target` constrained through `mid`:
/// both legs solved independently and concatenated with the duplicated
/// `mid` removed. The two legs may revisit nodes where they overlap.
pub fn checkpoint_least_cost(
    graph: &LabeledGraph,
    source: NodeLabel,
    mid: NodeLabel,
    target: NodeLabel,
) -> Result<SolveResult, OracleError> {
    if mid == source || mid == target {
        return Err(OracleError::DegenerateCheckpoint);
    }
    let first = solve(graph, source, mid)?;
    let second = solve(graph, mid, target)?;
    match (first.path, second.path) {
        (Some(a), Some(b)) => {
            let mut nodes = a.nodes().to_vec();
            nodes.extend_from_slice(&b.nodes()[1..]);
            let cost = first.cost.unwrap() + second.cost.unwrap();
            Ok(SolveResult::found(Path::new(nodes), cost))
        }
        _ => Ok(SolveResult::unreachable()),
    }
}

/// True iff at least two distinct simple `source -> target` paths exist.
///
/// Uses the optimal path: a second path exists iff removing some edge of it
/// leaves the target reachable (any other simple path must avoid at least
/// one of those edges). Polynomial, so it works at any supported n.
pub fn has_alternative_path(
    graph: &LabeledGraph,
    source: NodeLabel,
    target: NodeLabel,
) -> Result<bool, OracleError> {
    let result = solve(graph, source, target)?;
    let Some(path) = result.path else {
        return Ok(false);
    };
    let s = graph.require_index(source)?;
    let t = graph.require_index(target)?;
    let n = graph.n();
    let m = graph.matrix();
    for hop in path.nodes().windows(2) {
        let a = graph.index_of(hop[0]).unwrap();
        let b = graph.index_of(hop[1]).unwrap();
        // reachability with edge (a, b) removed (both directions when the
        // graph is undirected, which `entry` symmetry already encodes)
        let mut seen = vec![false; n];
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let blocked = (u == a && v == b) || (!m.directed() && u == b && v == a);
                if !blocked && m.entry(u, v) > 0 && !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        if seen[t] {
            return Ok(true);
        }
    }
    Ok(false)
}
