//! Acceptance suite: one test per criterion, each printing a single
//! `[PASS]` / `[FAIL]` line before asserting.

use voter_core::analytic::{f_survival, meeting_cdf_tree, theta};
use voter_core::diffusion::moment_estimates;
use voter_core::dual;
use voter_core::graph::{self, is_ltle_edge};
use voter_core::voter::{count_discordant, VoterState};
use voter_core::Estimate;
use voter_harness::experiments::ltle_radius;
use voter_harness::{run, Check, ExperimentKind, ExperimentSpec, ExperimentSummary, Grid};
use voter_oracles::{
    distance_walk_hit_by, exact_coalescence_mean, exact_diagonal_returns, exact_meeting_times, exact_stationary_meeting_mean,
    small_regular_graphs,
};
use voter_validation::verdict;

fn summary_verdict(id: &str, title: &str, s: &ExperimentSummary) {
    let detail: Vec<String> = s.checks.iter().map(|c| format!("{}{}", c.describe(), if c.passed { "" } else { " (failed)" })).collect();
    verdict(id, title, s.passed(), &detail.join("; "));
}

fn experiment(kind: ExperimentKind) -> ExperimentSpec {
    ExperimentSpec::new(kind)
}

#[test]
fn ac01_analytic_limit() {
    let mut lines = Vec::new();
    let mut ok = true;
    let f = f_survival(3, 1e4, 1e-6).unwrap();
    ok &= (f - 0.5).abs() <= 1e-3;
    lines.push(format!("f_3(1e4)={f:.6}"));
    for d in 3..=5 {
        let f = f_survival(d, 1e4, 1e-6).unwrap();
        let th = theta(d).unwrap();
        ok &= (f - th).abs() <= 1e-3;
        lines.push(format!("d={d}: {f:.6} vs {th:.6}"));
    }
    verdict("AC-01", "analytic limit", ok, &lines.join(", "));
}

#[test]
fn ac02_series_against_distance_walk() {
    let mut ok = true;
    let mut worst = 0.0f64;
    for d in 3..=5 {
        for t in [0.5, 1.0, 2.0, 5.0] {
            let series = meeting_cdf_tree(d, t, 1e-10).unwrap();
            let (p, se) = distance_walk_hit_by(d, t, 1_000_000, 1000 * d as u64 + (10.0 * t) as u64);
            let z = (series - p).abs() / se;
            worst = worst.max(z);
            ok &= z <= 3.0;
        }
    }
    verdict("AC-02", "series vs distance-walk oracle", ok, &format!("max |z| = {worst:.3} over 12 cases (limit 3)"));
}

#[test]
fn ac03_short_time_curve() {
    let s = run(&experiment(ExperimentKind::CurveShort)).unwrap();
    summary_verdict("AC-03", "short-time curve", &s);
}

#[test]
fn ac04_plateau() {
    let mut spec = experiment(ExperimentKind::Plateau);
    spec.grid = Some(Grid::linear(30.0, 30.0, 1));
    summary_verdict("AC-04", "plateau at t=30", &run(&spec).unwrap());
}

#[test]
fn ac05_long_time_decay() {
    let s = run(&experiment(ExperimentKind::LongDecay)).unwrap();
    summary_verdict("AC-05", "long-time decay fit", &s);
}

#[test]
fn ac06_stationary_meeting_time() {
    let s = run(&experiment(ExperimentKind::MeetingTail)).unwrap();
    summary_verdict("AC-06", "stationary meeting time", &s);
}

#[test]
fn ac07_coalescence() {
    let s = run(&experiment(ExperimentKind::CoalescenceScaling)).unwrap();
    summary_verdict("AC-07", "coalescence scaling", &s);
}

#[test]
fn ac08_fvtl_returns() {
    let s = run(&experiment(ExperimentKind::FvtlReturns)).unwrap();
    let k4 = small_regular_graphs(4).remove(0);
    let mut detail: Vec<String> = s.checks.iter().map(Check::describe).collect();
    let mut ok = s.passed();
    for horizon in [1u64, 2, 3, 8, 48] {
        let exact = exact_diagonal_returns(&k4, horizon as usize);
        let est = dual::product_chain_returns(&k4, horizon, 100_000, 40 + horizon);
        let agree = est.agrees_with(exact, 3.0);
        ok &= agree;
        detail.push(format!("K4 T={horizon}: {:.4}±{:.4} vs exact {exact:.4}", est.mean, est.std_err));
    }
    verdict("AC-08", "product-chain returns", ok, &detail.join("; "));
}

#[test]
fn ac09_distributional_limit() {
    let s = run(&experiment(ExperimentKind::Distributional)).unwrap();
    summary_verdict("AC-09", "distributional limit (KS)", &s);
}

#[test]
fn ac10_concentration() {
    let mut spec = experiment(ExperimentKind::ConcentrationSweep);
    spec.compare = true;
    let s = run(&spec).unwrap();
    summary_verdict("AC-10", "concentration sweep", &s);
}

#[test]
fn ac11_exact_small_instances() {
    let mut ok = true;
    let mut notes = Vec::new();
    let mean = |xs: Vec<f64>| Estimate::from_samples(&xs);
    for (i, g) in small_regular_graphs(6).iter().enumerate() {
        let seed = 1_000_000 * i as u64;
        let y = g.neighbors(0)[0];
        let pair = mean((0..20_000).map(|s| dual::meeting_time_pair(g, 0, y, 1e6, seed + s).value()).collect());
        let stat = mean((0..20_000).map(|s| dual::meeting_time_stationary(g, 1e6, seed + s).value()).collect());
        let coal = mean((0..50_000).map(|s| dual::coalescence_time(g, 1e6, seed + s).value()).collect());
        let targets = [exact_meeting_times(g)[0][y], exact_stationary_meeting_mean(g), exact_coalescence_mean(g)];
        for (name, est, target) in [("pair", pair, targets[0]), ("stationary", stat, targets[1]), ("coalescence", coal, targets[2])] {
            let z = (est.mean - target) / est.std_err;
            ok &= z.abs() <= 3.0;
            notes.push(format!("n={} d={} {name} z={z:.2}", g.n(), g.d()));
        }
    }
    // Counter bookkeeping under randomized events.
    let mut events = 0;
    let mut seed = 0u64;
    while events < 10_000 {
        let g = graph::generate_regular(20 + 2 * (seed as usize % 15), [3, 4, 5][seed as usize % 3], seed).unwrap();
        let mut v = VoterState::init_bernoulli(&g, 0.3 + 0.05 * (seed % 8) as f64, seed).unwrap();
        while events < 10_000 && v.step().is_some() {
            events += 1;
            ok &= v.disc_count() == count_discordant(&g, v.opinions());
            ok &= v.b_count() == v.opinions().iter().filter(|&&o| o).count();
        }
        seed += 1;
    }
    notes.push(format!("{events} events recounted"));
    verdict("AC-11", "exact small-instance oracles", ok, &notes.join(", "));
}

#[test]
fn ac12_diffusion() {
    let (u, d) = (0.5, 3);
    let target = u * (1.0 - u) * (-2.0 * theta(d).unwrap()).exp();
    let mut ok = true;
    let mut notes = Vec::new();
    let mut errors = Vec::new();
    for dt in [1e-4, 4e-4] {
        for s in [0.25, 0.5, 1.0, 2.0] {
            let m = moment_estimates(u, d, s, dt, 20_000, 17).unwrap();
            let z = (m.mean.mean - u) / m.mean.std_err;
            ok &= z.abs() <= 4.0;
            notes.push(format!("dt={dt} s={s} martingale z={z:.2}"));
        }
        let m = moment_estimates(u, d, 1.0, dt, 100_000, 23).unwrap();
        let plain_ok = (m.variability.mean - target).abs() <= 4.0 * m.variability.std_err + dt;
        let cv_err = (m.variability_cv.mean - target).abs();
        let cv_ok = cv_err <= 4.0 * m.variability_cv.std_err + dt;
        ok &= plain_ok && cv_ok;
        errors.push(cv_err);
        notes.push(format!(
            "dt={dt}: E[B(1-B)] plain {:.6}±{:.6}, control-variate {:.8}±{:.8}, target {target:.8}",
            m.variability.mean, m.variability.std_err, m.variability_cv.mean, m.variability_cv.std_err
        ));
    }
    ok &= errors[0] < errors[1];
    notes.push(format!("finer error {:.2e} < coarser {:.2e}", errors[0], errors[1]));
    verdict("AC-12", "diffusion martingale and moment decay", ok, &notes.join("; "));
}

#[test]
fn ac13_structure() {
    let (n, d) = (1000, 3);
    let radius = ltle_radius(n, d);
    let mut connected = 0;
    let mut min_ltle = usize::MAX;
    let mut m = 0;
    for seed in 0..100 {
        let g = graph::generate_regular(n, d, seed).unwrap();
        connected += usize::from(graph::is_connected(&g));
        m = g.m();
        min_ltle = min_ltle.min((0..g.m()).filter(|&e| is_ltle_edge(&g, e, radius)).count());
    }
    let floor = m as f64 - 0.05 * n as f64;
    let ok = connected >= 99 && min_ltle as f64 >= floor;
    verdict("AC-13", "graph structure", ok, &format!("connected {connected}/100; min LTLE({radius}) edges {min_ltle} >= {floor} of m={m}"));
}
