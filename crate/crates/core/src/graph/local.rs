//! Local structure: balls, tree excess and locally tree-like vertices/edges.

use std::collections::VecDeque;

use super::{GraphError, RegularGraph};

/// A vertex set together with a set of edges between its members.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subgraph {
    vertices: Vec<usize>,
    edges: Vec<(usize, usize)>,
}

impl Subgraph {
    pub fn new(mut vertices: Vec<usize>, edges: Vec<(usize, usize)>) -> Result<Self, GraphError> {
        vertices.sort_unstable();
        vertices.dedup();
        for &(a, b) in &edges {
            for v in [a, b] {
                if vertices.binary_search(&v).is_err() {
                    return Err(GraphError::InvalidParameters(format!("edge ({a}, {b}) leaves the vertex set")));
                }
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// The same subgraph with every copy of the undirected edge `{a, b}` removed.
    pub fn without_edge(&self, a: usize, b: usize) -> Self {
        let edges = self.edges.iter().copied().filter(|&(u, v)| !((u == a && v == b) || (u == b && v == a))).collect();
        Self { vertices: self.vertices.clone(), edges }
    }

    fn local(&self, v: usize) -> usize {
        self.vertices.binary_search(&v).expect("vertex in subgraph")
    }

    /// Union-find labels, one per vertex in `vertices()` order.
    fn component_labels(&self) -> Vec<usize> {
        let mut parent: Vec<usize> = (0..self.vertices.len()).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        for &(a, b) in &self.edges {
            let (ra, rb) = (find(&mut parent, self.local(a)), find(&mut parent, self.local(b)));
            if ra != rb {
                parent[ra] = rb;
            }
        }
        (0..parent.len()).map(|i| find(&mut parent, i)).collect()
    }

    pub fn component_count(&self) -> usize {
        let mut labels = self.component_labels();
        labels.sort_unstable();
        labels.dedup();
        labels.len()
    }

    pub fn same_component(&self, a: usize, b: usize) -> bool {
        let labels = self.component_labels();
        labels[self.local(a)] == labels[self.local(b)]
    }
}

/// Minimum number of edges to delete to leave a spanning forest:
/// `|E| - |V| + components`. For a connected subgraph this is
/// `|E| - |V| + 1`, and it vanishes exactly on forests.
pub fn tree_excess(s: &Subgraph) -> i64 {
    s.edges.len() as i64 - s.vertices.len() as i64 + s.component_count() as i64
}

/// Subgraph induced by the vertices within distance `radius` of any of `centers`.
pub fn ball_union(g: &RegularGraph, centers: &[usize], radius: usize) -> Subgraph {
    let mut depth = vec![usize::MAX; g.n()];
    let mut queue = VecDeque::new();
    let mut vertices = Vec::new();
    for &c in centers {
        if depth[c] == usize::MAX {
            depth[c] = 0;
            queue.push_back(c);
            vertices.push(c);
        }
    }
    while let Some(v) = queue.pop_front() {
        if depth[v] == radius {
            continue;
        }
        for &w in g.neighbors(v) {
            if depth[w] == usize::MAX {
                depth[w] = depth[v] + 1;
                queue.push_back(w);
                vertices.push(w);
            }
        }
    }
    let mut edges = Vec::new();
    for &v in &vertices {
        for &w in g.neighbors(v) {
            if v < w && depth[w] != usize::MAX {
                edges.push((v, w));
            }
        }
    }
    vertices.sort_unstable();
    Subgraph { vertices, edges }
}

/// The ball of radius `radius` around `x`, as an induced subgraph.
pub fn ball(g: &RegularGraph, x: usize, radius: usize) -> Subgraph {
    ball_union(g, &[x], radius)
}

/// Whether the ball of radius `radius` around `x` is a tree.
pub fn is_ltl_vertex(g: &RegularGraph, x: usize, radius: usize) -> bool {
    tree_excess(&ball(g, x, radius)) == 0
}

/// Whether removing edge `e` from the union of the radius-`radius` balls
/// around its endpoints leaves two disjoint trees, one per endpoint.
pub fn is_ltle_edge(g: &RegularGraph, e: usize, radius: usize) -> bool {
    let (x, y) = g.edge(e);
    let cut = ball_union(g, &[x, y], radius).without_edge(x, y);
    tree_excess(&cut) == 0 && cut.component_count() == 2 && !cut.same_component(x, y)
}
