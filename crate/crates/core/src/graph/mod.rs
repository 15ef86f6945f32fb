//! Simple `d`-regular graphs.
//!
//! Graphs are sampled with the configuration model: the `n * d` half-edges
//! are paired by a uniform random matching and the whole pairing is thrown
//! away whenever it produces a self-loop or a repeated edge. Conditioned on
//! simplicity the matching is uniform over simple `d`-regular graphs.

mod io;
mod local;

pub use io::{load_graph, save_graph};
pub use local::{ball, ball_union, is_ltl_vertex, is_ltle_edge, tree_excess, Subgraph};

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use thiserror::Error;

use crate::rng;

/// Restarts allowed before [`generate_regular`] gives up.
pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),
    #[error("no simple pairing found after {0} attempts")]
    AttemptsExceeded(usize),
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("line {line}: {reason}")]
    MalformedLine { line: usize, reason: String },
    #[error("vertex {vertex} has degree {found}, expected {expected}")]
    DegreeViolation { vertex: usize, expected: usize, found: usize },
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("vertex {vertex} out of range for n = {n}")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("expected {expected} edges, found {found}")]
    EdgeCount { expected: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// An immutable simple `d`-regular graph on vertices `0..n`.
///
/// Neighbour lists are sorted ascending and edges are stored once as
/// `(u, v)` with `u < v`, sorted lexicographically.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RegularGraph {
    n: usize,
    d: usize,
    adjacency: Vec<usize>,
    edges: Vec<(usize, usize)>,
    incidence: Vec<usize>,
}

impl RegularGraph {
    /// Builds a graph from an undirected edge list, validating regularity and
    /// simplicity. Edge orientation and order in the input do not matter.
    pub fn from_edges(n: usize, d: usize, edges: &[(usize, usize)]) -> Result<Self, GraphError> {
        let expected = n * d / 2;
        if !(n * d).is_multiple_of(2) {
            return Err(GraphError::InvalidParameters(format!("n*d = {} is odd", n * d)));
        }
        let mut lists: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
        let mut canon = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            for v in [a, b] {
                if v >= n {
                    return Err(GraphError::VertexOutOfRange { vertex: v, n });
                }
            }
            if a == b {
                return Err(GraphError::SelfLoop(a));
            }
            let (u, v) = if a < b { (a, b) } else { (b, a) };
            if lists[u].contains(&v) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
            lists[u].push(v);
            lists[v].push(u);
            canon.push((u, v));
        }
        if let Some((vertex, list)) = lists.iter().enumerate().find(|(_, l)| l.len() != d) {
            return Err(GraphError::DegreeViolation { vertex, expected: d, found: list.len() });
        }
        if canon.len() != expected {
            return Err(GraphError::EdgeCount { expected, found: canon.len() });
        }
        Ok(Self::assemble(n, d, lists, canon))
    }

    fn assemble(n: usize, d: usize, mut lists: Vec<Vec<usize>>, mut edges: Vec<(usize, usize)>) -> Self {
        edges.sort_unstable();
        let mut adjacency = Vec::with_capacity(n * d);
        for list in &mut lists {
            list.sort_unstable();
            adjacency.extend_from_slice(list);
        }
        let mut incidence = Vec::with_capacity(n * d);
        let mut fill = vec![0usize; n];
        incidence.resize(n * d, usize::MAX);
        for (i, &(u, v)) in edges.iter().enumerate() {
            incidence[u * d + fill[u]] = i;
            fill[u] += 1;
            incidence[v * d + fill[v]] = i;
            fill[v] += 1;
        }
        Self { n, d, adjacency, edges, incidence }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    /// Number of undirected edges, `n * d / 2`.
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adjacency[v * self.d..(v + 1) * self.d]
    }

    /// Indices into [`edges`](Self::edges) of the `d` edges containing `v`.
    #[inline]
    pub fn incident_edges(&self, v: usize) -> &[usize] {
        &self.incidence[v * self.d..(v + 1) * self.d]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, index: usize) -> (usize, usize) {
        self.edges[index]
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.neighbors(u).binary_search(&v).is_ok()
    }

    /// Breadth-first distances from `source`; `None` marks unreachable vertices.
    pub fn bfs_distances(&self, source: usize) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.n];
        let mut queue = VecDeque::new();
        dist[source] = Some(0);
        queue.push_back(source);
        while let Some(v) = queue.pop_front() {
            let dv = dist[v].unwrap_or(0);
            for &w in self.neighbors(v) {
                if dist[w].is_none() {
                    dist[w] = Some(dv + 1);
                    queue.push_back(w);
                }
            }
        }
        dist
    }
}

/// Samples a uniform simple `d`-regular graph on `n` vertices.
///
/// The result is a pure function of `(n, d, seed)`.
pub fn generate_regular(n: usize, d: usize, seed: u64) -> Result<RegularGraph, GraphError> {
    if d < 3 {
        return Err(GraphError::InvalidParameters(format!("degree {d} < 3")));
    }
    if n <= d {
        return Err(GraphError::InvalidParameters(format!("n = {n} must exceed d = {d}")));
    }
    if !(n * d).is_multiple_of(2) {
        return Err(GraphError::InvalidParameters(format!("n*d = {} is odd", n * d)));
    }
    let mut rng = rng::seeded(seed);
    let mut stubs: Vec<usize> = (0..n * d).map(|s| s / d).collect();
    let mut lists: Vec<Vec<usize>> = vec![Vec::with_capacity(d); n];
    'attempt: for _ in 0..MAX_ATTEMPTS {
        stubs.shuffle(&mut rng);
        lists.iter_mut().for_each(Vec::clear);
        for pair in stubs.chunks_exact(2) {
            let (a, b) = (pair[0], pair[1]);
            if a == b || lists[a].contains(&b) {
                continue 'attempt;
            }
            lists[a].push(b);
            lists[b].push(a);
        }
        let edges = stubs.chunks_exact(2).map(|p| (p[0].min(p[1]), p[0].max(p[1]))).collect();
        return Ok(RegularGraph::assemble(n, d, lists, edges));
    }
    Err(GraphError::AttemptsExceeded(MAX_ATTEMPTS))
}

/// True iff a breadth-first search from vertex 0 reaches every vertex.
pub fn is_connected(g: &RegularGraph) -> bool {
    g.n() == 0 || g.bfs_distances(0).iter().all(Option::is_some)
}

/// Shortest-path length between `x` and `y`, or `None` if they lie in
/// different components.
pub fn distance(g: &RegularGraph, x: usize, y: usize) -> Option<usize> {
    if x == y {
        return Some(0);
    }
    g.bfs_distances(x)[y]
}


#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;

    #[test]
    fn four_vertices_three_regular_is_k4() {
        for seed in 0..20 {
            let g = generate_regular(4, 3, seed).unwrap();
            assert_eq!(g, complete(4));
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(matches!(generate_regular(5, 3, 1), Err(GraphError::InvalidParameters(_))));
        assert!(matches!(generate_regular(3, 3, 1), Err(GraphError::InvalidParameters(_))));
        assert!(matches!(generate_regular(10, 2, 1), Err(GraphError::InvalidParameters(_))));
    }

    #[test]
    fn generated_graph_is_regular_and_simple() {
        let g = generate_regular(1000, 3, 1).unwrap();
        assert_eq!(g.m(), 1500);
        assert!(is_connected(&g));
        for v in 0..g.n() {
            let nb = g.neighbors(v);
            assert_eq!(nb.len(), 3);
            assert!(!nb.contains(&v));
            assert!(nb.windows(2).all(|w| w[0] < w[1]));
            for &w in nb {
                assert!(g.has_edge(w, v));
            }
            for &e in g.incident_edges(v) {
                let (a, b) = g.edge(e);
                assert!(a == v || b == v);
            }
        }
    }

    #[test]
    fn generation_is_deterministic() {
        assert_eq!(generate_regular(200, 4, 9).unwrap(), generate_regular(200, 4, 9).unwrap());
        assert_ne!(generate_regular(200, 4, 9).unwrap(), generate_regular(200, 4, 10).unwrap());
    }

    #[test]
    fn connectivity() {
        assert!(is_connected(&complete(4)));
        assert!(!is_connected(&two_k4()));
    }

    #[test]
    fn distances_on_small_graphs() {
        let k4 = complete(4);
        assert_eq!(distance(&k4, 0, 0), Some(0));
        assert_eq!(distance(&k4, 0, 3), Some(1));
        assert_eq!(distance(&two_k4(), 0, 5), None);
        let p = petersen();
        // Petersen has diameter 2.
        assert!((0..10).all(|y| distance(&p, 0, y).unwrap() <= 2));
    }

    #[test]
    fn from_edges_validation() {
        let err = RegularGraph::from_edges(4, 3, &[(0, 1), (0, 1)]).unwrap_err();
        assert!(matches!(err, GraphError::DuplicateEdge(0, 1)));
        let err = RegularGraph::from_edges(4, 3, &[(0, 0)]).unwrap_err();
        assert!(matches!(err, GraphError::SelfLoop(0)));
        let err = RegularGraph::from_edges(4, 3, &[(0, 1), (1, 2), (2, 3)]).unwrap_err();
        assert!(matches!(err, GraphError::DegreeViolation { .. }));
    }
}
