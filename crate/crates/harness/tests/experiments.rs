//! Experiment-level behaviour: trivial limits, reproducibility and the
//! smaller statistical examples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voter_harness::experiments::{run_curve_short, run_plateau};
use voter_harness::stats::ks_statistic;
use voter_harness::{run, ExperimentKind, ExperimentSpec, Grid, HarnessError, MeetingMode};

fn small(kind: ExperimentKind) -> ExperimentSpec {
    let mut s = ExperimentSpec::new(kind);
    s.n = 200;
    s.replicas = 20;
    s
}

#[test]
fn consensus_starts_give_flat_zero_curves() {
    for u in [0.0, 1.0] {
        let mut spec = small(ExperimentKind::CurveShort);
        spec.u = u;
        let s = run_curve_short(&spec).unwrap();
        assert!(s.rows.iter().all(|r| r.mean == 0.0 && r.std_err == 0.0));
        assert_eq!(s.stat("sup_gap"), Some(0.0));

        let mut spec = small(ExperimentKind::ConcentrationSweep);
        spec.u = u;
        let s = run(&spec).unwrap();
        assert!(s.data.column("sup_deviation").unwrap().iter().all(|&x| x == 0.0));
        assert_eq!(s.stat("exceedance"), Some(0.0));
    }
}

#[test]
fn all_zero_means_make_the_decay_fit_degenerate() {
    let mut spec = small(ExperimentKind::LongDecay);
    spec.u = 0.0;
    assert!(matches!(run(&spec), Err(HarnessError::DegenerateFit(_))));
}

#[test]
fn plateau_targets() {
    let mut spec = small(ExperimentKind::Plateau);
    spec.replicas = 2;
    assert_eq!(run_plateau(&spec).unwrap().stat("plateau_target"), Some(0.25));
    spec.d = 4;
    let t = run_plateau(&spec).unwrap().stat("plateau_target").unwrap();
    assert!((t - 1.0 / 3.0).abs() < 1e-15);
}

#[test]
fn return_targets() {
    for (d, target) in [(3, 2.0), (4, 1.5), (5, 4.0 / 3.0)] {
        let mut spec = small(ExperimentKind::FvtlReturns);
        spec.d = d;
        spec.replicas = 10;
        let s = run(&spec).unwrap();
        assert!((s.stat("target").unwrap() - target).abs() < 1e-15);
        assert_eq!(s.stat("horizon"), Some(29.0));
    }
}

#[test]
fn summaries_do_not_depend_on_worker_count() {
    for kind in [ExperimentKind::CurveShort, ExperimentKind::MeetingTail, ExperimentKind::FvtlReturns] {
        let mut spec = small(kind);
        spec.replicas = 150;
        spec.workers = Some(1);
        let one = run(&spec).unwrap();
        spec.workers = Some(4);
        let four = run(&spec).unwrap();
        assert_eq!(one.rows, four.rows, "{kind}");
        assert_eq!(one.stats, four.stats, "{kind}");
    }
}

#[test]
fn annealed_fvtl_pools_batches() {
    let mut spec = small(ExperimentKind::FvtlReturns);
    spec.fixed_graph = false;
    spec.replicas = 1000;
    let s = run(&spec).unwrap();
    assert_eq!(s.rows[0].replicas, 1000);
    assert!(s.stat("returns_std_err").unwrap() > 0.0);
}

#[test]
fn uniform_samples_pass_the_ks_null_band() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut within = 0;
    for _ in 0..100 {
        let a: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..10_000).map(|_| rng.random()).collect();
        within += usize::from(ks_statistic(&a, &b).unwrap() <= 0.03);
    }
    assert!(within >= 99, "{within}");
}

#[test]
fn doubling_n_does_not_widen_the_short_time_gap() {
    let mut spec = ExperimentSpec::new(ExperimentKind::CurveShort);
    spec.compare = true;
    let s = run(&spec).unwrap();
    assert!(s.check("sup_gap_2n_not_larger").unwrap().passed, "{}", s.report());
}

#[test]
fn adjacent_start_survival_level() {
    let mut spec = ExperimentSpec::new(ExperimentKind::MeetingTail);
    spec.mode = MeetingMode::AdjacentLtle;
    let s = run(&spec).unwrap();
    assert!(s.passed(), "{}", s.report());
}

#[test]
fn figure_experiments() {
    let s = run(&ExperimentSpec::new(ExperimentKind::Figure1)).unwrap();
    assert!(s.passed(), "{}", s.report());
    assert_eq!(s.data.header, ["t", "b_density", "d_density", "prediction"]);

    let s = run(&ExperimentSpec::new(ExperimentKind::Figure2)).unwrap();
    assert!(s.passed(), "{}", s.report());
    let (_, reference) = &s.extra[0];
    for row in &reference.rows {
        assert_eq!(row[1], row[0] * (1.0 - row[0]));
    }
    let minority = s.data.column("minority").unwrap();
    assert!(minority.iter().all(|&x| (0.0..=0.5).contains(&x)));
}

#[test]
fn custom_grids_are_honoured() {
    let mut spec = small(ExperimentKind::CurveShort);
    spec.grid = Some("lin:0:2:5".parse::<Grid>().unwrap());
    let s = run(&spec).unwrap();
    let xs: Vec<f64> = s.rows.iter().map(|r| r.x).collect();
    assert_eq!(xs, [0.0, 0.5, 1.0, 1.5, 2.0]);
}
