//! Simple labeled graphs, subgraphs and the freedom-number calculus.
//!
//! Vertices are always labeled `0..n`. Edges are stored as canonical pairs
//! `(i, j)` with `i < j`, sorted lexicographically, alongside per-vertex
//! neighbor sets.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An undirected edge in canonical `(low, high)` form.
pub type Edge = (usize, usize);

/// Returns the canonical form of the pair `(a, b)`.
#[inline]
pub fn edge(a: usize, b: usize) -> Edge {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("a graph needs at least one vertex")]
    NoVertices,
    #[error("loop edge ({0}, {0})")]
    Loop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("edge ({0}, {1}) references a vertex outside 0..{2}")]
    VertexOutOfRange(usize, usize, usize),
    #[error("contraction would produce a loop or a multi-edge")]
    NotSimple,
    #[error("improper subgraph: {0}")]
    ImproperSubgraph(String),
    #[error("graph has {n} vertices, above the configured limit of {limit}")]
    SizeLimitExceeded { n: usize, limit: usize },
    #[error("parse error: {0}")]
    Parse(String),
}

/// A simple graph on vertices `0..vertex_count`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
    adj: Vec<BTreeSet<usize>>,
}

impl Graph {
    /// Builds a graph, rejecting loops, duplicates and out-of-range endpoints.
    /// Edge orientation and order in the input do not matter.
    pub fn new(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, GraphError> {
        if n == 0 {
            return Err(GraphError::NoVertices);
        }
        let mut adj = vec![BTreeSet::new(); n];
        let mut list = Vec::new();
        for (a, b) in edges {
            if a >= n || b >= n {
                return Err(GraphError::VertexOutOfRange(a, b, n));
            }
            if a == b {
                return Err(GraphError::Loop(a));
            }
            if !adj[a].insert(b) {
                return Err(GraphError::DuplicateEdge(a, b));
            }
            adj[b].insert(a);
            list.push(edge(a, b));
        }
        list.sort_unstable();
        Ok(Graph { n, edges: list, adj })
    }

    pub fn empty(n: usize) -> Result<Self, GraphError> {
        Graph::new(n, std::iter::empty())
    }

    /// The complete graph `K_n`.
    pub fn complete(n: usize) -> Self {
        let edges = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j)));
        Graph::new(n, edges).expect("complete graph is simple")
    }

    /// The path `P_n` on `n` vertices.
    pub fn path(n: usize) -> Self {
        Graph::new(n, (1..n).map(|i| (i - 1, i))).expect("path is simple")
    }

    /// The cycle `C_n`, `n >= 3`.
    pub fn cycle(n: usize) -> Self {
        assert!(n >= 3, "a simple cycle needs at least 3 vertices");
        Graph::new(n, (0..n).map(|i| (i, (i + 1) % n))).expect("cycle is simple")
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Edges in canonical sorted order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.n && b < self.n && self.adj[a].contains(&b)
    }

    pub fn degree_sequence(&self) -> Vec<usize> {
        let mut d: Vec<usize> = (0..self.n).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }

    pub fn triangle_count(&self) -> usize {
        self.edges
            .iter()
            .map(|&(a, b)| self.adj[a].intersection(&self.adj[b]).filter(|&&c| c > b).count())
            .sum()
    }

    /// `2|V| - |E|`.
    pub fn freedom_number(&self) -> i64 {
        2 * self.n as i64 - self.edges.len() as i64
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// Adds an edge, returning a new graph.
    pub fn with_edge(&self, a: usize, b: usize) -> Result<Graph, GraphError> {
        Graph::new(self.n, self.edges.iter().copied().chain(std::iter::once((a, b))))
    }

    /// Removes an edge if present, returning a new graph.
    pub fn without_edge(&self, a: usize, b: usize) -> Graph {
        let e = edge(a, b);
        Graph::new(self.n, self.edges.iter().copied().filter(|&f| f != e)).expect("subgraph of a simple graph")
    }

    /// Deletes vertex `v`; vertices above `v` shift down by one.
    ///
    /// Panics if `v` is the only vertex.
    pub fn without_vertex(&self, v: usize) -> Graph {
        assert!(self.n > 1, "cannot delete the only vertex");
        let shift = |x: usize| if x > v { x - 1 } else { x };
        let edges = self
            .edges
            .iter()
            .filter(|&&(a, b)| a != v && b != v)
            .map(|&(a, b)| (shift(a), shift(b)));
        Graph::new(self.n - 1, edges).expect("subgraph of a simple graph")
    }

    /// Applies a vertex relabeling `perm[old] = new`.
    pub fn relabel(&self, perm: &[usize]) -> Graph {
        assert_eq!(perm.len(), self.n);
        Graph::new(self.n, self.edges.iter().map(|&(a, b)| (perm[a], perm[b]))).expect("relabeling preserves simplicity")
    }

    /// Induced subgraph on `vertices`, relabeled `0..k` in increasing order
    /// of the original labels. Returns the graph and the local-to-original map.
    pub fn induced(&self, vertices: &BTreeSet<usize>) -> Result<(Graph, Vec<usize>), GraphError> {
        let local: Vec<usize> = vertices.iter().copied().collect();
        let index: BTreeMap<usize, usize> = local.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges = self
            .edges
            .iter()
            .filter_map(|&(a, b)| Some((*index.get(&a)?, *index.get(&b)?)));
        Ok((Graph::new(local.len(), edges)?, local))
    }

    pub fn to_json(&self) -> GraphJson {
        GraphJson {
            n: self.n,
            edges: self.edges.iter().map(|&(a, b)| [a, b]).collect(),
        }
    }

    /// Parses either the JSON object form or a graph6 string, deciding by
    /// the first non-blank character.
    pub fn parse_auto(text: &str) -> Result<Graph, GraphError> {
        let trimmed = text.trim_start();
        if trimmed.starts_with('{') {
            let json: GraphJson =
                serde_json::from_str(trimmed).map_err(|e| GraphError::Parse(e.to_string()))?;
            Graph::try_from(json)
        } else {
            let line = trimmed
                .lines()
                .map(str::trim)
                .find(|l| !l.is_empty())
                .ok_or_else(|| GraphError::Parse("empty input".into()))?;
            crate::graph6::parse(line)
        }
    }

    pub fn to_graph6(&self) -> String {
        crate::graph6::format(self)
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n, self.edges)
    }
}

/// Wire form `{"n": int, "edges": [[i, j], ...]}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphJson {
    pub n: usize,
    pub edges: Vec<[usize; 2]>,
}

impl TryFrom<GraphJson> for Graph {
    type Error = GraphError;

    fn try_from(value: GraphJson) -> Result<Self, Self::Error> {
        Graph::new(value.n, value.edges.into_iter().map(|[a, b]| (a, b)))
    }
}

impl Serialize for Graph {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Graph {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let json = GraphJson::deserialize(deserializer)?;
        Graph::try_from(json).map_err(serde::de::Error::custom)
    }
}

/// A subgraph given by a vertex subset and an edge subset whose edges have
/// both endpoints inside the vertex subset.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SubgraphRef {
    pub vertices: BTreeSet<usize>,
    pub edges: BTreeSet<Edge>,
}

impl SubgraphRef {
    /// Validates the edge-containment invariant (edges are canonicalized).
    pub fn new(
        vertices: impl IntoIterator<Item = usize>,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let vertices: BTreeSet<usize> = vertices.into_iter().collect();
        let mut set = BTreeSet::new();
        for (a, b) in edges {
            if !vertices.contains(&a) || !vertices.contains(&b) {
                return Err(GraphError::ImproperSubgraph(format!(
                    "edge ({a}, {b}) leaves the vertex subset"
                )));
            }
            if a == b {
                return Err(GraphError::Loop(a));
            }
            set.insert(edge(a, b));
        }
        Ok(SubgraphRef { vertices, edges: set })
    }

    /// The subgraph of `g` induced by `vertices`.
    pub fn induced(g: &Graph, vertices: impl IntoIterator<Item = usize>) -> Self {
        let vertices: BTreeSet<usize> = vertices.into_iter().collect();
        let edges = g
            .edges()
            .iter()
            .copied()
            .filter(|(a, b)| vertices.contains(a) && vertices.contains(b))
            .collect();
        SubgraphRef { vertices, edges }
    }

    pub fn whole(g: &Graph) -> Self {
        SubgraphRef {
            vertices: (0..g.vertex_count()).collect(),
            edges: g.edges().iter().copied().collect(),
        }
    }

    pub fn freedom_number(&self) -> i64 {
        2 * self.vertices.len() as i64 - self.edges.len() as i64
    }

    pub fn union(&self, other: &SubgraphRef) -> SubgraphRef {
        SubgraphRef {
            vertices: self.vertices.union(&other.vertices).copied().collect(),
            edges: self.edges.union(&other.edges).copied().collect(),
        }
    }

    pub fn intersection(&self, other: &SubgraphRef) -> SubgraphRef {
        SubgraphRef {
            vertices: self.vertices.intersection(&other.vertices).copied().collect(),
            edges: self.edges.intersection(&other.edges).copied().collect(),
        }
    }

    /// True when every listed vertex and edge belongs to `g`.
    pub fn is_subgraph_of(&self, g: &Graph) -> bool {
        self.vertices.iter().all(|&v| v < g.vertex_count())
            && self.edges.iter().all(|&(a, b)| g.has_edge(a, b))
    }

    pub fn is_vertex_induced_in(&self, g: &Graph) -> bool {
        *self == SubgraphRef::induced(g, self.vertices.iter().copied())
    }

    fn is_connected(&self) -> bool {
        let Some(&start) = self.vertices.iter().next() else {
            return false;
        };
        let mut adj: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for &(a, b) in &self.edges {
            adj.entry(a).or_default().push(b);
            adj.entry(b).or_default().push(a);
        }
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for &w in adj.get(&v).map(Vec::as_slice).unwrap_or(&[]) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == self.vertices.len()
    }
}

/// `G/H` together with the bookkeeping needed to undo it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Contraction {
    pub graph: Graph,
    /// `vertex_map[v]` is the quotient vertex carrying original vertex `v`.
    pub vertex_map: Vec<usize>,
    /// The quotient vertex `v*` replacing `H`; always the last vertex.
    pub star: usize,
}

/// Contracts the connected proper subgraph `h` of `g` to a single vertex.
///
/// Vertices outside `h` keep their relative order and `v*` is appended last.
/// Fails with [`GraphError::NotSimple`] if the quotient would carry a loop
/// (an edge of `g` between vertices of `h` that is not in `h`) or a
/// multi-edge (an outside vertex adjacent to two vertices of `h`).
pub fn contract(g: &Graph, h: &SubgraphRef) -> Result<Contraction, GraphError> {
    if h.vertices.is_empty() {
        return Err(GraphError::ImproperSubgraph("empty vertex set".into()));
    }
    if !h.is_subgraph_of(g) {
        return Err(GraphError::ImproperSubgraph("not a subgraph of G".into()));
    }
    if h.vertices.len() == g.vertex_count() && h.edges.len() == g.edge_count() {
        return Err(GraphError::ImproperSubgraph("H equals G".into()));
    }
    if !h.is_connected() {
        return Err(GraphError::ImproperSubgraph("H is not connected".into()));
    }

    let outside: Vec<usize> = (0..g.vertex_count()).filter(|v| !h.vertices.contains(v)).collect();
    let star = outside.len();
    let mut vertex_map = vec![star; g.vertex_count()];
    for (i, &v) in outside.iter().enumerate() {
        vertex_map[v] = i;
    }
    let mut edges = BTreeSet::new();
    for &(a, b) in g.edges() {
        if h.edges.contains(&(a, b)) {
            continue;
        }
        let (x, y) = (vertex_map[a], vertex_map[b]);
        if x == y || !edges.insert(edge(x, y)) {
            return Err(GraphError::NotSimple);
        }
    }
    let graph = Graph::new(star + 1, edges)?;
    Ok(Contraction { graph, vertex_map, star })
}

/// Adds a cone vertex (labeled `n`) adjacent to every vertex of `g`.
pub fn cone(g: &Graph) -> Graph {
    let n = g.vertex_count();
    Graph::new(n + 1, g.edges().iter().copied().chain((0..n).map(|v| (v, n))))
        .expect("coning preserves simplicity")
}

/// Freedom number of a graph or subgraph.
pub trait FreedomNumber {
    fn freedom_number(&self) -> i64;
}

impl FreedomNumber for Graph {
    fn freedom_number(&self) -> i64 {
        Graph::freedom_number(self)
    }
}

impl FreedomNumber for SubgraphRef {
    fn freedom_number(&self) -> i64 {
        SubgraphRef::freedom_number(self)
    }
}

pub fn freedom_number<H: FreedomNumber + ?Sized>(h: &H) -> i64 {
    h.freedom_number()
}
