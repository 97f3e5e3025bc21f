//! Adjacency-matrix graph representation with alphabetic node labels.
//!
//! Every graph in this crate is a square integer matrix over at most 26
//! nodes labelled `A`..`Z`. Entry `(i, j)` is `0` for "no edge", `1` for an
//! unweighted edge, or the edge cost for weighted graphs. Undirected graphs
//! keep the matrix symmetric; directed graphs drop that requirement.

use std::fmt;
use std::str::FromStr;

use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Hard cap on node count: labels are single letters A–Z.
pub const MAX_NODES: usize = 26;

/// Minimum node count accepted by [`AdjacencyMatrix::new`].
pub const MIN_NODES: usize = 2;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("node count {0} out of range ({MIN_NODES}..={MAX_NODES})")]
    NodeCountOutOfRange(usize),
    #[error("matrix is not square: row {row} has {len} entries, expected {n}")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("'{0}' is not an uppercase letter A-Z")]
    InvalidLabelLetter(char),
    #[error("label index {0} out of range 0..{MAX_NODES}")]
    InvalidLabelIndex(usize),
    #[error("expected {expected} distinct labels, got {got}")]
    BadLabelList { expected: usize, got: usize },
    #[error("label {0} not in graph")]
    UnknownLabel(NodeLabel),
    #[error("invalid permutation")]
    InvalidPermutation,
}

/// A single node label: an uppercase letter and its alphabet position.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeLabel(u8);

impl NodeLabel {
    pub fn from_index(index: usize) -> Result<Self, GraphError> {
        if index < MAX_NODES {
            Ok(NodeLabel(index as u8))
        } else {
            Err(GraphError::InvalidLabelIndex(index))
        }
    }

    pub fn from_letter(letter: char) -> Result<Self, GraphError> {
        if letter.is_ascii_uppercase() {
            Ok(NodeLabel(letter as u8 - b'A'))
        } else {
            Err(GraphError::InvalidLabelLetter(letter))
        }
    }

    /// Alphabet position, 0 for `A` through 25 for `Z`.
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn letter(self) -> char {
        (b'A' + self.0) as char
    }

    /// The first `n` labels in alphabetical order.
    pub fn first_n(n: usize) -> Vec<NodeLabel> {
        (0..n).map(|i| NodeLabel(i as u8)).collect()
    }
}

impl fmt::Display for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl fmt::Debug for NodeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for NodeLabel {
    type Err = GraphError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut chars = s.chars();
        match (chars.next(), chars.next()) {
            (Some(c), None) => NodeLabel::from_letter(c),
            _ => Err(GraphError::InvalidLabelLetter(s.chars().next().unwrap_or('?'))),
        }
    }
}

impl Serialize for NodeLabel {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.letter().to_string())
    }
}

impl<'de> Deserialize<'de> for NodeLabel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(|e: GraphError| D::Error::custom(e.to_string()))
    }
}

/// An invariant violation reported by [`AdjacencyMatrix::validate`].
///
/// Violations are data, not failures: an invalid matrix can be constructed
/// and inspected, it just will not be accepted by generators or solvers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    SelfLoop { node: usize, value: u32 },
    Asymmetric { i: usize, j: usize },
    NonBinaryEntry { i: usize, j: usize, value: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SelfLoop { node, value } => {
                write!(f, "self-loop at node {node} (value {value})")
            }
            Violation::Asymmetric { i, j } => write!(f, "asymmetric at ({i},{j})"),
            Violation::NonBinaryEntry { i, j, value } => {
                write!(f, "non-binary entry {value} at ({i},{j})")
            }
        }
    }
}

/// Square non-negative integer matrix plus directedness/weightedness flags.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    entries: Vec<Vec<u32>>,
    directed: bool,
    weighted: bool,
}

impl AdjacencyMatrix {
    /// Builds a matrix after checking only the shape (square, 2..=26 nodes).
    /// Invariant violations are reported separately by [`validate`](Self::validate).
    pub fn new(entries: Vec<Vec<u32>>, directed: bool, weighted: bool) -> Result<Self, GraphError> {
        let n = entries.len();
        if !(MIN_NODES..=MAX_NODES).contains(&n) {
            return Err(GraphError::NodeCountOutOfRange(n));
        }
        for (row, r) in entries.iter().enumerate() {
            if r.len() != n {
                return Err(GraphError::NotSquare { row, len: r.len(), n });
            }
        }
        Ok(AdjacencyMatrix { entries, directed, weighted })
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entry(&self, i: usize, j: usize) -> u32 {
        self.entries[i][j]
    }

    pub fn rows(&self) -> &[Vec<u32>] {
        &self.entries
    }

    pub fn directed(&self) -> bool {
        self.directed
    }

    pub fn weighted(&self) -> bool {
        self.weighted
    }

    /// Checks every matrix invariant; an empty list means the matrix is valid.
    pub fn validate(&self) -> Vec<Violation> {
        let n = self.n();
        let mut out = Vec::new();
        for i in 0..n {
            if self.entries[i][i] != 0 {
                out.push(Violation::SelfLoop { node: i, value: self.entries[i][i] });
            }
        }
        if !self.directed {
            for i in 0..n {
                for j in (i + 1)..n {
                    if self.entries[i][j] != self.entries[j][i] {
                        out.push(Violation::Asymmetric { i, j });
                    }
                }
            }
        }
        if !self.weighted {
            for i in 0..n {
                for j in 0..n {
                    if self.entries[i][j] > 1 {
                        out.push(Violation::NonBinaryEntry { i, j, value: self.entries[i][j] });
                    }
                }
            }
        }
        out
    }

    pub fn is_valid(&self) -> bool {
        self.validate().is_empty()
    }

    /// Number of edges: unordered pairs for undirected, ordered for directed.
    pub fn edge_count(&self) -> usize {
        let n = self.n();
        let mut count = 0;
        for i in 0..n {
            for j in 0..n {
                if self.entries[i][j] > 0 && (self.directed || i < j) {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Per-node degree counts. Degrees count edge existence, never weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeProfile {
    pub in_degree: usize,
    pub out_degree: usize,
    pub total_degree: usize,
}

/// How [`LabeledGraph::relabel`] presents a permuted graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Presentation {
    /// Rows/columns reordered so the header labels read alphabetically.
    #[default]
    Sorted,
    /// Original row order kept; only the header labels change.
    Permuted,
}

/// A bijection over node indices `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self, GraphError> {
        let n = mapping.len();
        let mut seen = vec![false; n];
        for &v in &mapping {
            if v >= n || seen[v] {
                return Err(GraphError::InvalidPermutation);
            }
            seen[v] = true;
        }
        Ok(Permutation(mapping))
    }

    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &v)| i == v)
    }

    /// Image of index `i`.
    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &v) in self.0.iter().enumerate() {
            inv[v] = i;
        }
        Permutation(inv)
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

/// An adjacency matrix together with the node label of each row/column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabeledGraph {
    matrix: AdjacencyMatrix,
    labels: Vec<NodeLabel>,
}

impl LabeledGraph {
    pub fn new(matrix: AdjacencyMatrix, labels: Vec<NodeLabel>) -> Result<Self, GraphError> {
        let n = matrix.n();
        if labels.len() != n {
            return Err(GraphError::BadLabelList { expected: n, got: labels.len() });
        }
        let mut seen = [false; MAX_NODES];
        for l in &labels {
            if seen[l.index()] {
                return Err(GraphError::BadLabelList { expected: n, got: labels.len() });
            }
            seen[l.index()] = true;
        }
        Ok(LabeledGraph { matrix, labels })
    }

    /// Labels the rows `A`, `B`, `C`, … in order (the non-jumbled case).
    pub fn canonical(matrix: AdjacencyMatrix) -> Result<Self, GraphError> {
        let labels = NodeLabel::first_n(matrix.n());
        LabeledGraph::new(matrix, labels)
    }

    pub fn matrix(&self) -> &AdjacencyMatrix {
        &self.matrix
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    pub fn labels(&self) -> &[NodeLabel] {
        &self.labels
    }

    pub fn label_of(&self, index: usize) -> NodeLabel {
        self.labels[index]
    }

    pub fn index_of(&self, label: NodeLabel) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub(crate) fn require_index(&self, label: NodeLabel) -> Result<usize, GraphError> {
        self.index_of(label).ok_or(GraphError::UnknownLabel(label))
    }

    /// In/out/total degree per node, counting nonzero entries (not weights).
    pub fn degree_profile(&self) -> Vec<DegreeProfile> {
        let n = self.n();
        let m = &self.matrix;
        (0..n)
            .map(|i| {
                let out_degree = (0..n).filter(|&j| m.entry(i, j) > 0).count();
                if m.directed() {
                    let in_degree = (0..n).filter(|&j| m.entry(j, i) > 0).count();
                    DegreeProfile { in_degree, out_degree, total_degree: in_degree + out_degree }
                } else {
                    DegreeProfile { in_degree: out_degree, out_degree, total_degree: out_degree }
                }
            })
            .collect()
    }

    /// True iff every node is reachable from node 0.
    ///
    /// With `ignore_direction` an edge may be crossed either way regardless
    /// of the directed flag.
    pub fn is_connected(&self, ignore_direction: bool) -> bool {
        let n = self.n();
        let m = &self.matrix;
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for v in 0..n {
                let connected = m.entry(u, v) > 0 || (ignore_direction && m.entry(v, u) > 0);
                if connected && !seen[v] {
                    seen[v] = true;
                    count += 1;
                    stack.push(v);
                }
            }
        }
        count == n
    }

    /// Renames node `labels[i]` to `labels[perm(i)]`; the edge structure is
    /// isomorphic. `Sorted` reorders rows so headers read alphabetically,
    /// `Permuted` keeps the original row order under the new headers.
    pub fn relabel(
        &self,
        perm: &Permutation,
        presentation: Presentation,
    ) -> Result<LabeledGraph, GraphError> {
        let n = self.n();
        if perm.len() != n {
            return Err(GraphError::InvalidPermutation);
        }
        let new_label_of_row: Vec<NodeLabel> = (0..n).map(|i| self.labels[perm.apply(i)]).collect();
        match presentation {
            Presentation::Permuted => {
                LabeledGraph::new(self.matrix.clone(), new_label_of_row)
            }
            Presentation::Sorted => {
                let mut sorted = self.labels.clone();
                sorted.sort();
                // position of old row i in the sorted output
                let pos: Vec<usize> = (0..n)
                    .map(|i| sorted.iter().position(|&l| l == new_label_of_row[i]).unwrap())
                    .collect();
                let mut entries = vec![vec![0u32; n]; n];
                for i in 0..n {
                    for j in 0..n {
                        entries[pos[i]][pos[j]] = self.matrix.entry(i, j);
                    }
                }
                let matrix =
                    AdjacencyMatrix::new(entries, self.matrix.directed(), self.matrix.weighted())?;
                LabeledGraph::new(matrix, sorted)
            }
        }
    }
}

impl Serialize for LabeledGraph {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        let mut s = serializer.serialize_struct("LabeledGraph", 5)?;
        s.serialize_field("n", &self.n())?;
        s.serialize_field("directed", &self.matrix.directed())?;
        s.serialize_field("weighted", &self.matrix.weighted())?;
        s.serialize_field("labels", &self.labels)?;
        s.serialize_field("matrix", self.matrix.rows())?;
        s.end()
    }
}

impl<'de> Deserialize<'de> for LabeledGraph {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            n: usize,
            directed: bool,
            weighted: bool,
            labels: Vec<NodeLabel>,
            matrix: Vec<Vec<u32>>,
        }
        let raw = Raw::deserialize(deserializer)?;
        if raw.matrix.len() != raw.n {
            return Err(D::Error::custom(format!(
                "matrix has {} rows but n is {}",
                raw.matrix.len(),
                raw.n
            )));
        }
        let matrix = AdjacencyMatrix::new(raw.matrix, raw.directed, raw.weighted)
            .map_err(|e| D::Error::custom(e.to_string()))?;
        LabeledGraph::new(matrix, raw.labels).map_err(|e| D::Error::custom(e.to_string()))
    }
}

/// An ordered node sequence. Adjacent nodes must be joined by an edge for
/// the path to be valid on a graph; repeats are allowed in general (the
/// checkpoint problem may revisit a node where its two legs overlap).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Path(Vec<NodeLabel>);

impl Path {
    pub fn new(nodes: Vec<NodeLabel>) -> Self {
        Path(nodes)
    }

    pub fn nodes(&self) -> &[NodeLabel] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<NodeLabel> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<NodeLabel> {
        self.0.last().copied()
    }

    /// Edge count along the path.
    pub fn hops(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn has_repeated_nodes(&self) -> bool {
        let mut seen = [false; MAX_NODES];
        for l in &self.0 {
            if seen[l.index()] {
                return true;
            }
            seen[l.index()] = true;
        }
        false
    }

    /// True iff consecutive nodes are joined by a nonzero entry, following
    /// edge direction when the graph is directed.
    pub fn is_valid_on(&self, graph: &LabeledGraph) -> bool {
        self.0.windows(2).all(|w| {
            match (graph.index_of(w[0]), graph.index_of(w[1])) {
                (Some(i), Some(j)) => graph.matrix().entry(i, j) > 0,
                _ => false,
            }
        })
    }

    /// Total weight of the traversed edges; `None` if some hop is missing.
    pub fn cost_on(&self, graph: &LabeledGraph) -> Option<u64> {
        let mut total = 0u64;
        for w in self.0.windows(2) {
            let i = graph.index_of(w[0])?;
            let j = graph.index_of(w[1])?;
            let e = graph.matrix().entry(i, j);
            if e == 0 {
                return None;
            }
            total += u64::from(e);
        }
        Some(total)
    }

    /// Renders as the arrow chain used in prompts and solutions.
    pub fn arrow_string(&self) -> String {
        self.0
            .iter()
            .map(|l| l.letter().to_string())
            .collect::<Vec<_>>()
            .join(" -> ")
    }
}

impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.arrow_string())
    }
}

impl FromIterator<NodeLabel> for Path {
    fn from_iter<T: IntoIterator<Item = NodeLabel>>(iter: T) -> Self {
        Path(iter.into_iter().collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(s: &str) -> Vec<NodeLabel> {
        s.chars().map(|c| NodeLabel::from_letter(c).unwrap()).collect()
    }

    /// The 10-node linear chain used as the running example throughout.
    fn linear_chain(n: usize) -> LabeledGraph {
        let mut entries = vec![vec![0u32; n]; n];
        for i in 0..n - 1 {
            entries[i][i + 1] = 1;
            entries[i + 1][i] = 1;
        }
        LabeledGraph::canonical(AdjacencyMatrix::new(entries, false, false).unwrap()).unwrap()
    }

    #[test]
    fn zero_matrix_is_valid() {
        let m = AdjacencyMatrix::new(vec![vec![0, 0], vec![0, 0]], false, false).unwrap();
        assert!(m.validate().is_empty());
    }

    #[test]
    fn asymmetric_undirected_matrix_reports_violation() {
        let m = AdjacencyMatrix::new(vec![vec![0, 1], vec![0, 0]], false, false).unwrap();
        let v = m.validate();
        assert_eq!(v, vec![Violation::Asymmetric { i: 0, j: 1 }]);
        assert_eq!(v[0].to_string(), "asymmetric at (0,1)");
    }

    #[test]
    fn non_binary_entry_in_unweighted_matrix() {
        let m = AdjacencyMatrix::new(vec![vec![0, 3], vec![3, 0]], false, false).unwrap();
        let v = m.validate();
        assert!(v.iter().any(|x| matches!(x, Violation::NonBinaryEntry { value: 3, .. })));
    }

    #[test]
    fn self_loops_are_rejected() {
        let m = AdjacencyMatrix::new(vec![vec![1, 0], vec![0, 0]], false, false).unwrap();
        assert!(m.validate().iter().any(|x| matches!(x, Violation::SelfLoop { node: 0, .. })));
    }

    #[test]
    fn node_count_bounds() {
        assert!(matches!(
            AdjacencyMatrix::new(vec![vec![0]], false, false),
            Err(GraphError::NodeCountOutOfRange(1))
        ));
        let big = vec![vec![0u32; 27]; 27];
        assert!(matches!(
            AdjacencyMatrix::new(big, false, false),
            Err(GraphError::NodeCountOutOfRange(27))
        ));
    }

    #[test]
    fn degree_profile_examples() {
        let g = linear_chain(3);
        let d: Vec<usize> = g.degree_profile().iter().map(|p| p.total_degree).collect();
        assert_eq!(d, vec![1, 2, 1]);

        let mut tri = vec![vec![0u32; 3]; 3];
        for (i, j) in [(0, 1), (1, 2), (2, 0)] {
            tri[i][j] = 1;
            tri[j][i] = 1;
        }
        let g = LabeledGraph::canonical(AdjacencyMatrix::new(tri, false, false).unwrap()).unwrap();
        let d: Vec<usize> = g.degree_profile().iter().map(|p| p.total_degree).collect();
        assert_eq!(d, vec![2, 2, 2]);

        // the 10-node base-prompt chain
        let g = linear_chain(10);
        let d: Vec<usize> = g.degree_profile().iter().map(|p| p.total_degree).collect();
        assert_eq!(d, vec![1, 2, 2, 2, 2, 2, 2, 2, 2, 1]);
    }

    #[test]
    fn degrees_count_edges_not_weights() {
        let m = AdjacencyMatrix::new(vec![vec![0, 5], vec![5, 0]], false, true).unwrap();
        let g = LabeledGraph::canonical(m).unwrap();
        assert_eq!(g.degree_profile()[0].total_degree, 1);
    }

    #[test]
    fn connectivity_examples() {
        assert!(linear_chain(10).is_connected(false));

        // two disjoint edges A-B, C-D
        let mut e = vec![vec![0u32; 4]; 4];
        e[0][1] = 1;
        e[1][0] = 1;
        e[2][3] = 1;
        e[3][2] = 1;
        let g = LabeledGraph::canonical(AdjacencyMatrix::new(e, false, false).unwrap()).unwrap();
        assert!(!g.is_connected(false));

        // single directed edge A->B: node 0 reaches everything
        let m = AdjacencyMatrix::new(vec![vec![0, 1], vec![0, 0]], true, false).unwrap();
        let g = LabeledGraph::canonical(m).unwrap();
        assert!(g.is_connected(false));
    }

    #[test]
    fn relabel_identity_is_noop() {
        let g = linear_chain(10);
        let id = Permutation::identity(10);
        assert_eq!(g.relabel(&id, Presentation::Sorted).unwrap(), g);
        assert_eq!(g.relabel(&id, Presentation::Permuted).unwrap(), g);
    }

    /// The permutation shown in the jumbling example: header H C D F I E G A J B.
    fn appendix_permutation() -> Permutation {
        let header = labels("HCDFIEGAJB");
        Permutation::new(header.iter().map(|l| l.index()).collect()).unwrap()
    }

    #[test]
    fn relabel_permuted_presentation_matches_appendix_header() {
        let g = linear_chain(10);
        let p = appendix_permutation();
        let jumbled = g.relabel(&p, Presentation::Permuted).unwrap();
        let header: String = jumbled.labels().iter().map(|l| l.letter()).collect();
        assert_eq!(header, "HCDFIEGAJB");
        // structure untouched in this presentation
        assert_eq!(jumbled.matrix(), g.matrix());
    }

    #[test]
    fn relabel_sorted_presentation_keeps_alphabetical_header() {
        let g = linear_chain(10);
        let p = appendix_permutation();
        let jumbled = g.relabel(&p, Presentation::Sorted).unwrap();
        let header: String = jumbled.labels().iter().map(|l| l.letter()).collect();
        assert_eq!(header, "ABCDEFGHIJ");
        // old node 0 (was A, now H) still has exactly one neighbour: old node 1 (now C)
        let h = jumbled.index_of(NodeLabel::from_letter('H').unwrap()).unwrap();
        let c = jumbled.index_of(NodeLabel::from_letter('C').unwrap()).unwrap();
        assert_eq!(jumbled.matrix().entry(h, c), 1);
        assert_eq!(jumbled.degree_profile()[h].total_degree, 1);
    }

    #[test]
    fn relabel_then_inverse_roundtrips() {
        let g = linear_chain(7);
        let p = Permutation::new(vec![3, 0, 6, 2, 5, 1, 4]).unwrap();
        for pres in [Presentation::Sorted, Presentation::Permuted] {
            let back = g.relabel(&p, pres).unwrap().relabel(&p.inverse(), pres).unwrap();
            assert_eq!(back, g);
        }
    }

    #[test]
    fn non_bijective_permutation_rejected() {
        assert!(Permutation::new(vec![0, 0, 1]).is_err());
        assert!(Permutation::new(vec![0, 3]).is_err());
    }

    #[test]
    fn path_validity_and_cost() {
        let g = linear_chain(4);
        let p = Path::new(labels("ABCD"));
        assert!(p.is_valid_on(&g));
        assert_eq!(p.cost_on(&g), Some(3));
        let q = Path::new(labels("ACD"));
        assert!(!q.is_valid_on(&g));
        assert_eq!(q.cost_on(&g), None);
    }

    #[test]
    fn graph_json_schema_roundtrip() {
        let g = linear_chain(3);
        let js = serde_json::to_value(&g).unwrap();
        assert_eq!(js["n"], 3);
        assert_eq!(js["directed"], false);
        assert_eq!(js["weighted"], false);
        assert_eq!(js["labels"][0], "A");
        assert_eq!(js["matrix"][0][1], 1);
        let back: LabeledGraph = serde_json::from_value(js).unwrap();
        assert_eq!(back, g);
    }
}
