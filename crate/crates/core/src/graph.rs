//! Undirected simple graphs on vertices `0..n`, their matrix views, and the
//! edge-list / JSON file formats.
//!
//! A [`Graph`] is immutable once built. Edges are stored canonically as
//! `(u, v)` with `u < v`, sorted lexicographically; that order is also the
//! column order of the [`IncidenceMatrix`] and the line order of the
//! serialized edge list.

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{GraphError, Result};

/// How [`Graph::from_edge_list`] and [`Graph::parse_edge_list`] treat
/// self-loops and repeated pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ParseMode {
    /// Reject self-loops and duplicate pairs.
    #[default]
    Strict,
    /// Drop self-loops and collapse duplicates silently.
    Lenient,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let edges = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .collect();
        Self::from_canonical(n, edges)
    }

    /// Builds a graph from vertex-index pairs. Pair orientation is ignored.
    pub fn from_edge_list(n: usize, pairs: &[(usize, usize)], mode: ParseMode) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(a, b) in pairs {
            for index in [a, b] {
                if index >= n {
                    return Err(GraphError::VertexOutOfRange { index, n });
                }
            }
            if a == b {
                match mode {
                    ParseMode::Strict => return Err(GraphError::SelfLoop(a)),
                    ParseMode::Lenient => continue,
                }
            }
            let e = (a.min(b), a.max(b));
            if !set.insert(e) && mode == ParseMode::Strict {
                return Err(GraphError::DuplicateEdge(e.0, e.1));
            }
        }
        Ok(Self::from_canonical(n, set.into_iter().collect()))
    }

    /// Assumes every pair is `(u, v)` with `u < v < n` and that pairs are
    /// distinct; sorts them.
    pub(crate) fn from_canonical(n: usize, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        debug_assert!(edges.windows(2).all(|w| w[0] != w[1]));
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            debug_assert!(u < v && v < n);
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Graph { n, edges, adj }
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Number of unordered vertex pairs, `n(n-1)/2`.
    pub fn pair_count(&self) -> usize {
        pair_count(self.n)
    }

    /// Canonical edges, `u < v`, in lexicographic order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list of `v`. Panics if `v` is out of range.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        if u >= self.n || v >= self.n || u == v {
            return false;
        }
        let (a, b) = if self.adj[u].len() <= self.adj[v].len() {
            (u, v)
        } else {
            (v, u)
        };
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        self.adj.iter().map(Vec::len).collect()
    }

    pub fn max_degree(&self) -> usize {
        self.adj.iter().map(Vec::len).max().unwrap_or(0)
    }

    /// Edge density `|E| / (n choose 2)`; zero for graphs with fewer than two vertices.
    pub fn density(&self) -> f64 {
        let pairs = self.pair_count();
        if pairs == 0 {
            0.0
        } else {
            self.edge_count() as f64 / pairs as f64
        }
    }

    /// The graph with vertex `v` renamed to `mapping[v]`.
    pub fn relabel(&self, mapping: &[usize]) -> Result<Self> {
        crate::matching::Bijection::new(mapping.to_vec())?;
        if mapping.len() != self.n {
            return Err(GraphError::SizeMismatch(mapping.len(), self.n));
        }
        let edges = self
            .edges
            .iter()
            .map(|&(u, v)| {
                let (a, b) = (mapping[u], mapping[v]);
                (a.min(b), a.max(b))
            })
            .collect();
        Ok(Self::from_canonical(self.n, edges))
    }

    pub fn complement(&self) -> Self {
        let mut edges = Vec::with_capacity(self.pair_count() - self.edge_count());
        for u in 0..self.n {
            let mut present = self.adj[u].iter().peekable();
            for v in u + 1..self.n {
                while present.next_if(|&&w| w < v).is_some() {}
                if present.next_if_eq(&&v).is_none() {
                    edges.push((u, v));
                }
            }
        }
        Self::from_canonical(self.n, edges)
    }

    pub fn adjacency_matrix(&self) -> AdjacencyMatrix {
        let n = self.n;
        let mut entries = vec![0u8; n * n];
        for &(u, v) in &self.edges {
            entries[u * n + v] = 1;
            entries[v * n + u] = 1;
        }
        AdjacencyMatrix { order: n, entries }
    }

    pub fn incidence_matrix(&self) -> IncidenceMatrix {
        let cols = self.edges.len();
        let mut entries = vec![0u8; self.n * cols];
        for (j, &(u, v)) in self.edges.iter().enumerate() {
            entries[u * cols + j] = 1;
            entries[v * cols + j] = 1;
        }
        IncidenceMatrix {
            rows: self.n,
            cols,
            entries,
        }
    }

    /// Parses the edge-list text format: an optional `n=<int>` header,
    /// `#` comments, blank lines, and one whitespace-separated pair per line.
    /// Without a header the vertex count is one more than the largest index.
    pub fn parse_edge_list(text: &str, mode: ParseMode) -> Result<Self> {
        let mut declared: Option<usize> = None;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if let Some(rest) = line.strip_prefix("n=") {
                if declared.is_some() || !pairs.is_empty() {
                    return Err(parse_err(line_no, "vertex-count header must precede all edges"));
                }
                let n = rest
                    .trim()
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad vertex count {rest:?}")))?;
                declared = Some(n);
                continue;
            }
            let mut fields = line.split_whitespace();
            let mut next_index = || -> Result<usize> {
                let field = fields
                    .next()
                    .ok_or_else(|| parse_err(line_no, "expected two vertex indices"))?;
                field
                    .parse()
                    .map_err(|_| parse_err(line_no, format!("bad vertex index {field:?}")))
            };
            let u = next_index()?;
            let v = next_index()?;
            if fields.next().is_some() {
                return Err(parse_err(line_no, "trailing fields after edge"));
            }
            pairs.push((u, v));
        }
        let n = match declared {
            Some(n) => n,
            None => pairs.iter().map(|&(u, v)| u.max(v) + 1).max().unwrap_or(0),
        };
        Self::from_edge_list(n, &pairs, mode)
    }

    /// Canonical edge-list text: `n=<count>` then one `u v` line per edge.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::with_capacity(8 + self.edges.len() * 8);
        writeln!(out, "n={}", self.n).unwrap();
        for &(u, v) in &self.edges {
            writeln!(out, "{u} {v}").unwrap();
        }
        out
    }

    pub fn to_json(&self) -> String {
        let doc = GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(u, v)| [u, v]).collect(),
        };
        serde_json::to_string(&doc).expect("graph json is always serializable")
    }

    pub fn from_json(text: &str, mode: ParseMode) -> Result<Self> {
        let doc: GraphJson = serde_json::from_str(text).map_err(|e| GraphError::Parse {
            line: e.line(),
            message: e.to_string(),
        })?;
        let pairs: Vec<_> = doc.edges.iter().map(|e| (e[0], e[1])).collect();
        Self::from_edge_list(doc.n, &pairs, mode)
    }
}

#[derive(Serialize, Deserialize)]
struct GraphJson {
    n: usize,
    edges: Vec<[usize; 2]>,
}

fn parse_err(line: usize, message: impl Into<String>) -> GraphError {
    GraphError::Parse {
        line,
        message: message.into(),
    }
}

pub(crate) fn pair_count(n: usize) -> usize {
    n * n.saturating_sub(1) / 2
}

/// Dense symmetric 0/1 matrix, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjacencyMatrix {
    order: usize,
    entries: Vec<u8>,
}

impl AdjacencyMatrix {
    pub fn order(&self) -> usize {
        self.order
    }

    pub fn get(&self, i: usize, j: usize) -> u8 {
        self.entries[i * self.order + j]
    }

    pub fn row(&self, i: usize) -> &[u8] {
        &self.entries[i * self.order..(i + 1) * self.order]
    }

    pub fn is_symmetric(&self) -> bool {
        (0..self.order).all(|i| (i + 1..self.order).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn trace(&self) -> usize {
        (0..self.order).map(|i| self.get(i, i) as usize).sum()
    }

    pub fn total(&self) -> usize {
        self.entries.iter().map(|&x| x as usize).sum()
    }
}

/// `N_v x N_e` 0/1 matrix; column `j` marks the endpoints of the `j`-th
/// canonical edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IncidenceMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<u8>,
}

impl IncidenceMatrix {
    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, vertex: usize, edge: usize) -> u8 {
        self.entries[vertex * self.cols + edge]
    }

    pub fn row_sums(&self) -> Vec<usize> {
        (0..self.rows)
            .map(|i| {
                self.entries[i * self.cols..(i + 1) * self.cols]
                    .iter()
                    .map(|&x| x as usize)
                    .sum()
            })
            .collect()
    }

    pub fn column_sums(&self) -> Vec<usize> {
        (0..self.cols)
            .map(|j| (0..self.rows).map(|i| self.get(i, j) as usize).sum())
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle() -> Graph {
        Graph::complete(3)
    }

    fn star(leaves: usize) -> Graph {
        let pairs: Vec<_> = (1..=leaves).map(|v| (0, v)).collect();
        Graph::from_edge_list(leaves + 1, &pairs, ParseMode::Strict).unwrap()
    }

    #[test]
    fn empty_edge_list() {
        let g = Graph::from_edge_list(3, &[], ParseMode::Strict).unwrap();
        assert_eq!(g.vertex_count(), 3);
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn rejects_self_loop_and_out_of_range() {
        assert_eq!(
            Graph::from_edge_list(3, &[(0, 0)], ParseMode::Strict),
            Err(GraphError::SelfLoop(0))
        );
        assert_eq!(
            Graph::from_edge_list(3, &[(0, 3)], ParseMode::Strict),
            Err(GraphError::VertexOutOfRange { index: 3, n: 3 })
        );
        assert_eq!(
            Graph::from_edge_list(3, &[(0, 1), (1, 0)], ParseMode::Strict),
            Err(GraphError::DuplicateEdge(0, 1))
        );
    }

    #[test]
    fn lenient_mode_cleans_messy_input() {
        let g = Graph::from_edge_list(3, &[(0, 0), (0, 1), (1, 0), (2, 1)], ParseMode::Lenient)
            .unwrap();
        assert_eq!(g.edges(), &[(0, 1), (1, 2)]);
        // range errors are never forgiven
        assert!(Graph::from_edge_list(2, &[(0, 5)], ParseMode::Lenient).is_err());
    }

    #[test]
    fn adjacency_of_triangle_and_path() {
        let a = triangle().adjacency_matrix();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(a.get(i, j), u8::from(i != j));
            }
        }
        let path = Graph::from_edge_list(3, &[(0, 1), (1, 2)], ParseMode::Strict).unwrap();
        assert_eq!(path.adjacency_matrix().get(0, 2), 0);
    }

    #[test]
    fn incidence_shapes() {
        let b = triangle().incidence_matrix();
        assert_eq!((b.rows(), b.cols()), (3, 3));
        assert_eq!(b.column_sums(), vec![2, 2, 2]);
        let empty = Graph::empty(5).incidence_matrix();
        assert_eq!((empty.rows(), empty.cols()), (5, 0));
        assert_eq!(empty.row_sums(), vec![0; 5]);
    }

    #[test]
    fn degree_sequences() {
        assert_eq!(triangle().degree_sequence(), vec![2, 2, 2]);
        assert_eq!(star(4).degree_sequence(), vec![4, 1, 1, 1, 1]);
    }

    #[test]
    fn serialization_is_canonical() {
        assert_eq!(Graph::empty(2).to_edge_list(), "n=2\n");
        assert_eq!(triangle().to_edge_list(), "n=3\n0 1\n0 2\n1 2\n");
    }

    #[test]
    fn parse_infers_order_and_skips_comments() {
        let g = Graph::parse_edge_list("# comment\n\n3 1\n  0 1 \n", ParseMode::Strict).unwrap();
        assert_eq!(g.vertex_count(), 4);
        assert_eq!(g.edges(), &[(0, 1), (1, 3)]);
        let iso = Graph::parse_edge_list("n=6\n0 1\n", ParseMode::Strict).unwrap();
        assert_eq!(iso.vertex_count(), 6);
    }

    #[test]
    fn parse_errors_name_the_line() {
        let err = Graph::parse_edge_list("n=3\n0 1\n0 x\n", ParseMode::Strict).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 3, .. }), "{err}");
        let err = Graph::parse_edge_list("0 1 2\n", ParseMode::Strict).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 1, .. }));
        let err = Graph::parse_edge_list("0 1\nn=4\n", ParseMode::Strict).unwrap_err();
        assert!(matches!(err, GraphError::Parse { line: 2, .. }));
    }

    #[test]
    fn json_roundtrip() {
        let g = star(3);
        assert_eq!(g.to_json(), r#"{"n":4,"edges":[[0,1],[0,2],[0,3]]}"#);
        assert_eq!(Graph::from_json(&g.to_json(), ParseMode::Strict).unwrap(), g);
    }

    #[test]
    fn complement_and_relabel() {
        let path = Graph::from_edge_list(4, &[(0, 1), (1, 2), (2, 3)], ParseMode::Strict).unwrap();
        let c = path.complement();
        assert_eq!(c.edges(), &[(0, 2), (0, 3), (1, 3)]);
        let r = path.relabel(&[3, 2, 1, 0]).unwrap();
        assert_eq!(r, path);
        assert!(path.relabel(&[0, 0, 1, 2]).is_err());
    }

    #[test]
    fn has_edge_is_symmetric() {
        let g = star(3);
        assert!(g.has_edge(0, 2) && g.has_edge(2, 0));
        assert!(!g.has_edge(1, 2));
        assert!(!g.has_edge(0, 0));
        assert!(!g.has_edge(0, 99));
    }
}
