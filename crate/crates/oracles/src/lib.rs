//! Reference computations for tests.
//!
//! Everything here is deliberately naive: dense linear solves on explicit
//! state spaces, matrix powers, Floyd-Warshall, and direct simulation of the
//! scalar distance walk. None of it shares code paths with the simulators it
//! is used to check; only the [`RegularGraph`] container is borrowed.

use std::collections::{BTreeSet, HashMap};

use nalgebra::{DMatrix, DVector};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use voter_core::RegularGraph;

/// All-pairs shortest paths by Floyd-Warshall.
pub fn floyd_warshall(g: &RegularGraph) -> Vec<Vec<Option<usize>>> {
    let n = g.n();
    let inf = usize::MAX / 4;
    let mut dist = vec![vec![inf; n]; n];
    for (v, row) in dist.iter_mut().enumerate() {
        row[v] = 0;
    }
    for &(u, v) in g.edges() {
        dist[u][v] = 1;
        dist[v][u] = 1;
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = dist[i][k] + dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    dist.into_iter().map(|row| row.into_iter().map(|x| (x < inf).then_some(x)).collect()).collect()
}

/// `|E| - |V| + components` by depth-first search over an explicit edge list.
pub fn excess_by_counting(vertices: &[usize], edges: &[(usize, usize)]) -> i64 {
    let index: HashMap<usize, usize> = vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); vertices.len()];
    for &(a, b) in edges {
        adj[index[&a]].push(index[&b]);
        adj[index[&b]].push(index[&a]);
    }
    let mut seen = vec![false; vertices.len()];
    let mut components = 0i64;
    for s in 0..vertices.len() {
        if seen[s] {
            continue;
        }
        components += 1;
        let mut stack = vec![s];
        seen[s] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    edges.len() as i64 - vertices.len() as i64 + components
}

/// Monte Carlo probability that the rate-2 distance walk started at 1, stepping
/// up with probability `(d-1)/d`, hits 0 by time `t`. Returns `(p, se)`.
pub fn distance_walk_hit_by(d: usize, t: f64, replicas: u64, seed: u64) -> (f64, f64) {
    let mut rng = StdRng::seed_from_u64(seed);
    let up = (d as f64 - 1.0) / d as f64;
    let mut hits = 0u64;
    for _ in 0..replicas {
        let mut z = 1i64;
        let mut clock = 0.0;
        loop {
            clock += -(1.0 - rng.random::<f64>()).ln() / 2.0;
            if clock > t {
                break;
            }
            z += if rng.random::<f64>() < up { 1 } else { -1 };
            if z == 0 {
                hits += 1;
                break;
            }
        }
    }
    let p = hits as f64 / replicas as f64;
    (p, (p * (1.0 - p) / replicas as f64).sqrt())
}

/// Expected meeting times `E[tau(x, y)]` of two independent rate-1 walks,
/// from the linear system on ordered pairs. Requires a connected graph.
pub fn exact_meeting_times(g: &RegularGraph) -> Vec<Vec<f64>> {
    let n = g.n();
    let d = g.d() as f64;
    let idx = |x: usize, y: usize| x * n + y;
    let size = n * n;
    let mut a = DMatrix::<f64>::identity(size, size);
    let mut b = DVector::<f64>::zeros(size);
    for x in 0..n {
        for y in 0..n {
            if x == y {
                continue;
            }
            let row = idx(x, y);
            b[row] = 0.5;
            for &w in g.neighbors(x) {
                if w != y {
                    a[(row, idx(w, y))] -= 0.5 / d;
                }
            }
            for &w in g.neighbors(y) {
                if w != x {
                    a[(row, idx(x, w))] -= 0.5 / d;
                }
            }
        }
    }
    let sol = a.lu().solve(&b).expect("connected graph gives a non-singular system");
    (0..n).map(|x| (0..n).map(|y| sol[idx(x, y)]).collect()).collect()
}

/// `E[tau]` for two walks from independent uniform starts.
pub fn exact_stationary_meeting_mean(g: &RegularGraph) -> f64 {
    let m = exact_meeting_times(g);
    let n = g.n() as f64;
    m.iter().flatten().sum::<f64>() / (n * n)
}

/// Expected coalescence time of walks started one per vertex, from the
/// linear system on occupied-vertex sets. Practical for `n <= 12`.
pub fn exact_coalescence_mean(g: &RegularGraph) -> f64 {
    let n = g.n();
    assert!(n <= 16, "state space 2^n too large");
    let d = g.d() as f64;
    let states: Vec<u32> = (1u32..(1 << n)).filter(|s| s.count_ones() >= 2).collect();
    let pos: HashMap<u32, usize> = states.iter().enumerate().map(|(i, &s)| (s, i)).collect();
    let k = states.len();
    let mut a = DMatrix::<f64>::identity(k, k);
    let mut b = DVector::<f64>::zeros(k);
    for (row, &set) in states.iter().enumerate() {
        let size = f64::from(set.count_ones());
        b[row] = 1.0 / size;
        for x in (0..n).filter(|&x| set & (1 << x) != 0) {
            for &y in g.neighbors(x) {
                let next = (set & !(1 << x)) | (1 << y);
                if let Some(&col) = pos.get(&next) {
                    a[(row, col)] -= 1.0 / (size * d);
                }
            }
        }
    }
    let sol = a.lu().solve(&b).expect("non-singular coalescence system");
    sol[pos[&((1u32 << n) - 1)]]
}

/// `R_T = sum_{s=0}^{T} P^s(Delta, Delta)` for the pair chain with the
/// diagonal merged into one state, by explicit matrix powers.
pub fn exact_diagonal_returns(g: &RegularGraph, horizon: usize) -> f64 {
    let n = g.n();
    let d = g.d();
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|x| (0..n).filter(move |&y| y != x).map(move |y| (x, y))).collect();
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i + 1)).collect();
    let size = pairs.len() + 1;
    let mut p = DMatrix::<f64>::zeros(size, size);
    let state = |a: usize, b: usize| if a == b { 0 } else { index[&(a, b)] };
    for x in 0..n {
        for &y in g.neighbors(x) {
            p[(0, state(x, y))] += 1.0 / (n * d) as f64;
        }
    }
    for &(x, y) in &pairs {
        let row = index[&(x, y)];
        for &w in g.neighbors(y) {
            p[(row, state(x, w))] += 0.5 / d as f64;
        }
        for &v in g.neighbors(x) {
            p[(row, state(v, y))] += 0.5 / d as f64;
        }
    }
    let mut dist = DVector::<f64>::zeros(size);
    dist[0] = 1.0;
    let mut total = 1.0;
    let pt = p.transpose();
    for _ in 0..horizon {
        dist = &pt * dist;
        total += dist[0];
    }
    total
}

fn canonical_form(n: usize, edges: &[(usize, usize)]) -> Vec<(usize, usize)> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut best: Option<Vec<(usize, usize)>> = None;
    loop {
        let mut mapped: Vec<(usize, usize)> = edges
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (perm[a], perm[b]);
                (x.min(y), x.max(y))
            })
            .collect();
        mapped.sort_unstable();
        if best.as_ref().is_none_or(|b| mapped < *b) {
            best = Some(mapped);
        }
        // Next lexicographic permutation.
        let Some(i) = (0..n.saturating_sub(1)).rev().find(|&i| perm[i] < perm[i + 1]) else { break };
        let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
        perm.swap(i, j);
        perm[i + 1..].reverse();
    }
    best.unwrap_or_default()
}

/// Every connected simple `d`-regular graph with `d >= 3` on at most
/// `max_n` vertices, one representative per isomorphism class.
pub fn small_regular_graphs(max_n: usize) -> Vec<RegularGraph> {
    let mut out = Vec::new();
    for n in 4..=max_n {
        let all: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).collect();
        assert!(all.len() <= 24, "edge-subset enumeration too large");
        for d in 3..n {
            if !(n * d).is_multiple_of(2) {
                continue;
            }
            let m = n * d / 2;
            let mut classes = BTreeSet::new();
            for mask in 0u32..(1 << all.len()) {
                if mask.count_ones() as usize != m {
                    continue;
                }
                let edges: Vec<(usize, usize)> = all.iter().enumerate().filter(|(i, _)| mask & (1 << i) != 0).map(|(_, &e)| e).collect();
                let mut deg = vec![0; n];
                for &(a, b) in &edges {
                    deg[a] += 1;
                    deg[b] += 1;
                }
                if deg.iter().any(|&k| k != d) {
                    continue;
                }
                classes.insert(canonical_form(n, &edges));
            }
            for edges in classes {
                let g = RegularGraph::from_edges(n, d, &edges).expect("enumerated graph is regular");
                if floyd_warshall(&g)[0].iter().all(Option::is_some) {
                    out.push(g);
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_graph_census() {
        // K4; K5; K_{3,3} and the prism; the octahedron; K6.
        let graphs = small_regular_graphs(6);
        let shapes: Vec<(usize, usize)> = graphs.iter().map(|g| (g.n(), g.d())).collect();
        assert_eq!(shapes, vec![(4, 3), (5, 4), (6, 3), (6, 3), (6, 4), (6, 5)]);
    }

    #[test]
    fn complete_graph_meeting_time() {
        // On K_n the pair distance is 0/1; meeting rate from distinct vertices is 2/(n-1).
        for g in small_regular_graphs(6).into_iter().filter(|g| g.d() == g.n() - 1) {
            let m = exact_meeting_times(&g);
            let expect = (g.n() - 1) as f64 / 2.0;
            assert!((m[0][1] - expect).abs() < 1e-10);
        }
    }

    #[test]
    fn coalescence_on_k4() {
        // Kingman-type chain on K_4: with k walkers the rate of a merge is
        // k(k-1)/(n-1), so E = sum_{k=2}^{4} (n-1)/(k(k-1)).
        let g = small_regular_graphs(4).remove(0);
        let expect: f64 = (2..=4).map(|k| 3.0 / (k * (k - 1)) as f64).sum();
        assert!((exact_coalescence_mean(&g) - expect).abs() < 1e-10);
    }

    #[test]
    fn diagonal_returns_start_at_one() {
        let g = small_regular_graphs(4).remove(0);
        assert_eq!(exact_diagonal_returns(&g, 0), 1.0);
        assert_eq!(exact_diagonal_returns(&g, 1), 1.0);
        // On K_4 the second step hits the diagonal with probability 1/3.
        assert!((exact_diagonal_returns(&g, 2) - 4.0 / 3.0).abs() < 1e-12);
    }
}
