//! Desk-scale behaviour of the walk estimators on random cubic graphs.

use voter_core::analytic::theta;
use voter_core::dual::{self, WaitingTime};
use voter_core::graph::{self, is_ltle_edge};

const N: usize = 1000;

/// Two-sample KS distance by merging sorted samples.
fn ks(a: &[f64], b: &[f64]) -> f64 {
    let cdf = |s: &[f64], x: f64| s.partition_point(|&v| v <= x) as f64 / s.len() as f64;
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter().chain(&b).map(|&x| (cdf(&a, x) - cdf(&b, x)).abs()).fold(0.0, f64::max)
}

#[test]
fn pair_meeting_law_is_symmetric() {
    let g = graph::generate_regular(N, 3, 2).unwrap();
    let (x, y) = (0, 500);
    let fwd: Vec<f64> = (0..10_000u64).map(|s| dual::meeting_time_pair(&g, x, y, 1e6, s).value()).collect();
    let rev: Vec<f64> = (0..10_000u64).map(|s| dual::meeting_time_pair(&g, y, x, 1e6, s + 1_000_000).value()).collect();
    // Critical value of the two-sample KS test at level 0.01.
    let crit = 1.628 * (2.0f64 / 10_000.0).sqrt();
    assert!(ks(&fwd, &rev) <= crit, "{}", ks(&fwd, &rev));
}

#[test]
fn early_stationary_meetings_are_rare() {
    let g = graph::generate_regular(N, 3, 4).unwrap();
    let t = 25.0;
    let hits = (0..20_000u64).filter(|&s| dual::meeting_time_stationary(&g, t, s).observed().is_some()).count();
    let p = hits as f64 / 20_000.0;
    let scale = 2.0 * theta(3).unwrap() * t / N as f64 + 1.0 / N as f64;
    assert!(p >= 0.5 * scale && p <= 2.0 * scale, "p={p} scale={scale}");
}

#[test]
fn adjacent_tree_like_start_tracks_exponential_tail() {
    let g = graph::generate_regular(N, 3, 6).unwrap();
    let th = theta(3).unwrap();
    let edges: Vec<usize> = (0..g.m()).filter(|&e| is_ltle_edge(&g, e, 1)).collect();
    let samples: Vec<WaitingTime> = (0..4000u64)
        .map(|s| {
            let (x, y) = g.edge(edges[s as usize % edges.len()]);
            dual::meeting_time_pair(&g, x, y, N as f64, s)
        })
        .collect();
    let grid = [0.25, 0.5, 0.75, 1.0].map(|s| s * N as f64);
    for (t, surv) in dual::survival_curve(&samples, &grid).unwrap() {
        let s = t / N as f64;
        let target = th * (-2.0 * s * th).exp();
        assert!((surv - target).abs() < 0.04, "s={s}: {surv} vs {target}");
    }
}

/// `P(tau <= t)` for two walks from independent uniform starts.
fn stationary_meeting_cdf(g: &voter_core::RegularGraph, t: f64, replicas: u64) -> (f64, f64) {
    let hits = (0..replicas).filter(|&s| dual::meeting_time_stationary(g, t, 7_000_000 + s).observed().is_some()).count();
    let p = hits as f64 / replicas as f64;
    (p, (p * (1.0 - p) / replicas as f64).sqrt())
}

/// Walkers of distinct edges start from independent uniform vertices, so an
/// edge interacts with probability at most `4 (K - 1) P(tau <= t)`.
#[test]
fn edge_interactions_obey_union_bound() {
    let g = graph::generate_regular(N, 3, 8).unwrap();
    let k_log = ((N as f64).ln().powi(2)).ceil() as usize;
    for (k, t) in [(2, (N as f64).powf(0.8)), (k_log, 1.0), (k_log, 0.25)] {
        let (q, q_se) = stationary_meeting_cdf(&g, t, 200_000);
        let est = dual::interaction_fraction(&g, k, t, 400, 9).unwrap();
        let bound = 4.0 * (k - 1) as f64 * (q + 3.0 * q_se);
        eprintln!("K={k} t={t:.2}: fraction {:.4} +- {:.4}, bound {bound:.4}", est.mean, est.std_err);
        assert!(est.mean <= bound + 3.0 * est.std_err, "K={k} t={t}: {est:?} > {bound}");
    }
}

#[test]
fn edge_interactions_saturate_at_moderate_time() {
    // With 2K = 96 walkers each pair meets by n^0.8 with probability ~0.2,
    // so every sampled edge interacts at desk scale.
    let g = graph::generate_regular(N, 3, 8).unwrap();
    let k = ((N as f64).ln().powi(2)).ceil() as usize;
    let est = dual::interaction_fraction(&g, k, (N as f64).powf(0.8), 50, 9).unwrap();
    assert!(est.mean > 0.95, "{est:?}");
}
