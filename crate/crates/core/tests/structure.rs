//! Graph queries against brute-force references.

use proptest::prelude::*;
use voter_core::graph::{self, ball, is_ltl_vertex, is_ltle_edge, tree_excess, RegularGraph};
use voter_oracles::{excess_by_counting, floyd_warshall};

fn sizes() -> impl Strategy<Value = (usize, usize, u64)> {
    (3usize..6, 8usize..50, any::<u64>()).prop_map(|(d, n, seed)| (d, if n * d % 2 == 0 { n } else { n + 1 }, seed))
}

/// Induced subgraph on the vertices within `r` of `x`, via all-pairs distances.
fn ball_by_distances(g: &RegularGraph, dist: &[Vec<Option<usize>>], centers: &[usize], r: usize) -> (Vec<usize>, Vec<(usize, usize)>) {
    let inside = |v: usize| centers.iter().any(|&c| dist[c][v].is_some_and(|k| k <= r));
    let vertices: Vec<usize> = (0..g.n()).filter(|&v| inside(v)).collect();
    let edges = g.edges().iter().copied().filter(|&(a, b)| inside(a) && inside(b)).collect();
    (vertices, edges)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn distances_match_floyd_warshall((d, n, seed) in sizes()) {
        let g = graph::generate_regular(n, d, seed).unwrap();
        let fw = floyd_warshall(&g);
        for (x, row) in fw.iter().enumerate() {
            prop_assert_eq!(&g.bfs_distances(x), row);
        }
        prop_assert_eq!(graph::is_connected(&g), fw[0].iter().all(Option::is_some));
    }

    #[test]
    fn balls_and_excess_match_brute_force((d, n, seed) in sizes(), r in 0usize..4) {
        let g = graph::generate_regular(n, d, seed).unwrap();
        let fw = floyd_warshall(&g);
        for x in 0..n.min(10) {
            let b = ball(&g, x, r);
            let (vs, es) = ball_by_distances(&g, &fw, &[x], r);
            prop_assert_eq!(b.vertices(), &vs[..]);
            prop_assert_eq!(tree_excess(&b), excess_by_counting(&vs, &es));
            prop_assert_eq!(is_ltl_vertex(&g, x, r), excess_by_counting(&vs, &es) == 0);
        }
    }

    #[test]
    fn ltle_edges_have_tree_like_endpoints((d, n, seed) in sizes(), r in 1usize..3) {
        let g = graph::generate_regular(n, d, seed).unwrap();
        let fw = floyd_warshall(&g);
        for e in 0..g.m() {
            let (x, y) = g.edge(e);
            let (vs, mut es) = ball_by_distances(&g, &fw, &[x, y], r);
            es.retain(|&edge| edge != (x, y));
            // Two trees, one containing each endpoint.
            let expect = excess_by_counting(&vs, &es) == 0 && {
                let components = vs.len() as i64 - es.len() as i64;
                components == 2 && fw[x][y] == Some(1)
            };
            prop_assert_eq!(is_ltle_edge(&g, e, r), expect && !connected_without(&vs, &es, x, y));
            if is_ltle_edge(&g, e, r) {
                prop_assert!(is_ltl_vertex(&g, x, r) && is_ltl_vertex(&g, y, r));
            }
        }
    }
}

fn connected_without(vs: &[usize], es: &[(usize, usize)], x: usize, y: usize) -> bool {
    let mut reached = vec![x];
    let mut frontier = vec![x];
    while let Some(v) = frontier.pop() {
        for &(a, b) in es {
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if vs.contains(&w) && !reached.contains(&w) {
                reached.push(w);
                frontier.push(w);
            }
        }
    }
    reached.contains(&y)
}

#[test]
fn random_cubic_graphs_are_connected_and_mostly_tree_like() {
    let connected = (0..100u64).filter(|&s| graph::is_connected(&graph::generate_regular(1000, 3, s).unwrap())).count();
    assert!(connected >= 99, "{connected}/100");
    let g = graph::generate_regular(1000, 3, 5).unwrap();
    let good = (0..g.m()).filter(|&e| is_ltle_edge(&g, e, 1)).count();
    assert!(good as f64 >= g.m() as f64 - 0.05 * 1000.0, "{good} of {}", g.m());
}
