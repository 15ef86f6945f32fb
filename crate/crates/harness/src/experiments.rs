//! Experiment runners. Each takes a validated [`ExperimentSpec`] and returns
//! an [`ExperimentSummary`] whose checks carry the tolerances they were
//! judged against.

use std::collections::HashMap;

use rand::Rng;
use voter_core::analytic::{self, TreeMeetingLaw};
use voter_core::diffusion;
use voter_core::dual::{self, WaitingTime};
use voter_core::graph::{self, is_ltle_edge, RegularGraph};
use voter_core::rng::{derive_seed, seeded_stream};
use voter_core::voter::VoterState;
use voter_core::Estimate;

use crate::grid::Grid;
use crate::pool;
use crate::spec::{ExperimentKind, ExperimentSpec, MeetingMode};
use crate::stats::{self, ks_statistic, proportion, weighted_linear_fit};
use crate::summary::{Check, DataTable, ExperimentSummary, GridRow};
use crate::HarnessError;

/// Truncation tolerance for the tree meeting series.
pub const SERIES_TOLERANCE: f64 = 1e-10;
/// Sup-gap allowed between the averaged short-time curve and its prediction.
pub const CURVE_TOLERANCE: f64 = 0.02;
pub const PLATEAU_TOLERANCE: f64 = 0.02;
/// Relative tolerance on the fitted decay slope.
pub const DECAY_SLOPE_REL: f64 = 0.10;
pub const DECAY_INTERCEPT_TOLERANCE: f64 = 0.05;
/// Relative tolerance on the fitted meeting rate.
pub const MEETING_RATE_REL: f64 = 0.10;
/// Relative band for mean meeting and coalescence times.
pub const MEAN_TIME_REL: f64 = 0.15;
pub const SHORT_SURVIVAL_TOLERANCE: f64 = 0.05;
pub const MIN_UNCENSORED: usize = 100;
pub const MAX_CENSORED_FRACTION: f64 = 0.5;
pub const RETURNS_TOLERANCE: f64 = 0.1;
pub const KS_TOLERANCE: f64 = 0.1;
pub const ZERO_MASS_TOLERANCE: f64 = 0.06;
pub const CONCENTRATION_EPS: f64 = 0.05;
pub const CONCENTRATION_MAX_FRACTION: f64 = 0.1;
pub const CONSENSUS_CAP: f64 = 2e4;
pub const CONSENSUS_MIN_FRACTION: f64 = 0.95;
pub const HOMOGENISATION_TOLERANCE: f64 = 0.03;
/// Graphs used by the annealed return experiment.
pub const RETURN_GRAPH_BATCHES: usize = 100;

const GRAPH_STREAM: u64 = 0x67;
const DYNAMICS_STREAM: u64 = 0x64;
const DIFFUSION_STREAM: u64 = 0x66;
const MEETING_STREAM: u64 = 0x6d;

/// Validates `spec`, runs it and returns the summary.
pub fn run(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    spec.validate()?;
    match spec.kind {
        ExperimentKind::CurveShort => run_curve_short(spec),
        ExperimentKind::Plateau => run_plateau(spec),
        ExperimentKind::LongDecay => run_long_decay(spec),
        ExperimentKind::MeetingTail => run_meeting_tail(spec),
        ExperimentKind::CoalescenceScaling => run_coalescence_scaling(spec),
        ExperimentKind::FvtlReturns => run_fvtl_returns(spec),
        ExperimentKind::Distributional => run_distributional(spec),
        ExperimentKind::ConcentrationSweep => run_concentration_sweep(spec),
        ExperimentKind::Figure1 | ExperimentKind::Figure2 => run_figure(spec),
    }
}

/// Graph supply: a fresh graph per replica, or one pinned graph per size.
struct Graphs<'s> {
    spec: &'s ExperimentSpec,
    workers: usize,
    pinned: HashMap<usize, RegularGraph>,
}

impl<'s> Graphs<'s> {
    fn new(spec: &'s ExperimentSpec, sizes: &[usize]) -> Result<Self, HarnessError> {
        let mut pinned = HashMap::new();
        if spec.fixed_graph {
            for &n in sizes {
                pinned.insert(n, generate(spec, n, 0)?);
            }
        }
        Ok(Self { spec, workers: pool::resolve_workers(spec.workers), pinned })
    }

    fn with<T>(&self, n: usize, replica: usize, f: impl FnOnce(&RegularGraph) -> T) -> Result<T, HarnessError> {
        match self.pinned.get(&n) {
            Some(g) => Ok(f(g)),
            None => Ok(f(&generate(self.spec, n, replica)?)),
        }
    }

    /// Runs `job(graph, replica, seed)` for every replica in parallel.
    fn replicas<T, F>(&self, n: usize, count: usize, stream: u64, job: F) -> Result<Vec<T>, HarnessError>
    where
        T: Send,
        F: Fn(&RegularGraph, usize, u64) -> Result<T, HarnessError> + Sync + Send,
    {
        pool::try_run_indexed(self.workers, count, |r| {
            let seed = derive_seed(self.spec.seed, stream ^ ((n as u64) << 8), r as u64);
            self.with(n, r, |g| job(g, r, seed))?
        })
    }
}

fn generate(spec: &ExperimentSpec, n: usize, replica: usize) -> Result<RegularGraph, HarnessError> {
    let seed = derive_seed(spec.seed, GRAPH_STREAM ^ ((n as u64) << 8), replica as u64);
    Ok(graph::generate_regular(n, spec.d, seed)?)
}

/// `D_t` along `times` for each replica of the voter model on size-`n` graphs.
fn discordance_paths(graphs: &Graphs, n: usize, times: &[f64]) -> Result<Vec<Vec<f64>>, HarnessError> {
    let u = graphs.spec.u;
    graphs.replicas(n, graphs.spec.replicas, DYNAMICS_STREAM, |g, _, seed| {
        let mut state = VoterState::init_bernoulli(g, u, seed)?;
        let traj = state.run_recorded(times)?;
        Ok(traj.samples.iter().map(|s| s.d_density).collect())
    })
}

/// Per-time mean and standard error across replicas.
fn column_estimates(paths: &[Vec<f64>], len: usize) -> Vec<Estimate> {
    (0..len)
        .map(|k| {
            let col: Vec<f64> = paths.iter().map(|p| p[k]).collect();
            Estimate::from_samples(&col)
        })
        .collect()
}

fn theta(spec: &ExperimentSpec) -> Result<f64, HarnessError> {
    Ok(analytic::theta(spec.d)?)
}

fn waiting_values(samples: &[WaitingTime]) -> Vec<f64> {
    samples.iter().map(|w| w.value()).collect()
}

pub fn run_curve_short(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let times = spec.grid.unwrap_or(Grid::linear(0.0, 5.0, 51)).points();
    let law = TreeMeetingLaw::new(spec.d, SERIES_TOLERANCE)?;
    let scale = 2.0 * spec.u * (1.0 - spec.u);
    let sizes: Vec<usize> = if spec.compare { vec![spec.n, 2 * spec.n] } else { vec![spec.n] };
    let graphs = Graphs::new(spec, &sizes)?;
    let mut out = ExperimentSummary::new(spec);
    out.data = DataTable::new(&["t", "mean", "std_err", "prediction"]);

    let curve_gap = |n: usize| -> Result<(Vec<Estimate>, f64, f64), HarnessError> {
        let est = column_estimates(&discordance_paths(&graphs, n, &times)?, times.len());
        let gap = times.iter().zip(&est).map(|(&t, e)| (e.mean - scale * law.survival(t)).abs()).fold(0.0, f64::max);
        let max_se = est.iter().map(|e| e.std_err).fold(0.0, f64::max);
        Ok((est, gap, max_se))
    };
    let (est, gap, max_se) = curve_gap(spec.n)?;
    for (&t, e) in times.iter().zip(&est) {
        let target = scale * law.survival(t);
        out.rows.push(GridRow { x: t, mean: e.mean, std_err: e.std_err, replicas: e.replicas, target: Some(target) });
        out.data.push(vec![t, e.mean, e.std_err, target]);
    }
    out.set_stat("sup_gap", gap);
    out.set_stat("max_std_err", max_se);
    out.checks.push(Check::at_most("sup_gap", gap, CURVE_TOLERANCE));
    if spec.compare {
        let (_, gap2, se2) = curve_gap(2 * spec.n)?;
        out.set_stat("sup_gap_2n", gap2);
        out.checks.push(Check::at_most("sup_gap_2n_not_larger", gap2, gap + 2.0 * max_se.hypot(se2)));
    }
    Ok(out)
}

pub fn run_plateau(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let times = spec.grid.map_or_else(|| vec![20.0, 30.0, 50.0], |g| g.points());
    let target = 2.0 * spec.u * (1.0 - spec.u) * theta(spec)?;
    let graphs = Graphs::new(spec, &[spec.n])?;
    let est = column_estimates(&discordance_paths(&graphs, spec.n, &times)?, times.len());
    let mut out = ExperimentSummary::new(spec);
    out.data = DataTable::new(&["t", "mean", "std_err", "plateau", "finite_n_prediction"]);
    out.set_stat("plateau_target", target);
    for (&t, e) in times.iter().zip(&est) {
        let finite = analytic::expected_discordance(spec.u, spec.d, t, spec.n, SERIES_TOLERANCE)?;
        out.rows.push(GridRow { x: t, mean: e.mean, std_err: e.std_err, replicas: e.replicas, target: Some(target) });
        out.data.push(vec![t, e.mean, e.std_err, target, finite]);
        out.checks.push(Check::around(format!("plateau_t{t}"), e.mean, target, PLATEAU_TOLERANCE));
    }
    Ok(out)
}

pub fn run_long_decay(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let scaled = spec.grid.map_or_else(|| vec![0.25, 0.5, 1.0, 1.5, 2.0], |g| g.points());
    let times: Vec<f64> = scaled.iter().map(|s| s * spec.n as f64).collect();
    let th = theta(spec)?;
    let graphs = Graphs::new(spec, &[spec.n])?;
    let est = column_estimates(&discordance_paths(&graphs, spec.n, &times)?, times.len());

    let ys: Vec<f64> = est.iter().map(|e| e.mean.ln()).collect();
    // Delta method: Var(log m) = (se / m)^2.
    let ws: Vec<f64> = est.iter().map(|e| (e.mean / e.std_err).powi(2)).collect();
    let fit = weighted_linear_fit(&scaled, &ys, &ws)?;
    let slope_target = -2.0 * th;
    let intercept_target = (2.0 * spec.u * (1.0 - spec.u) * th).ln();

    let mut out = ExperimentSummary::new(spec);
    out.data = DataTable::new(&["s", "t", "mean", "std_err", "fit", "prediction"]);
    for ((&s, &t), e) in scaled.iter().zip(&times).zip(&est) {
        let pred = (intercept_target + slope_target * s).exp();
        out.rows.push(GridRow { x: s, mean: e.mean, std_err: e.std_err, replicas: e.replicas, target: Some(pred) });
        out.data.push(vec![s, t, e.mean, e.std_err, (fit.intercept + fit.slope * s).exp(), pred]);
    }
    out.set_stat("slope", fit.slope);
    out.set_stat("slope_std_err", fit.slope_se);
    out.set_stat("intercept", fit.intercept);
    out.set_stat("intercept_std_err", fit.intercept_se);
    out.checks.push(Check::around("slope", fit.slope, slope_target, DECAY_SLOPE_REL * slope_target.abs()));
    out.checks.push(Check::around("intercept", fit.intercept, intercept_target, DECAY_INTERCEPT_TOLERANCE));
    Ok(out)
}

/// Radius used for locally tree-like edges: `max(1, floor(log_d(n) / 5))`.
pub fn ltle_radius(n: usize, d: usize) -> usize {
    // Integer floor of log_d(n), exact at powers of d.
    let mut log = 0;
    let mut power = d;
    while power <= n {
        log += 1;
        power = power.saturating_mul(d);
    }
    (log / 5).max(1)
}

/// A uniformly random locally tree-like edge in random orientation.
fn random_ltle_pair(g: &RegularGraph, radius: usize, seed: u64) -> Result<(usize, usize), HarnessError> {
    let mut rng = seeded_stream(seed, 2);
    for _ in 0..100 * g.m() {
        let e = rng.random_range(0..g.m());
        if is_ltle_edge(g, e, radius) {
            let (a, b) = g.edge(e);
            return Ok(if rng.random_bool(0.5) { (a, b) } else { (b, a) });
        }
    }
    Err(HarnessError::InvalidSpec(format!("no locally tree-like edge of radius {radius} found")))
}

/// Log-linear fit of an empirical survival curve; weights from the binomial
/// delta method `Var(log S) = (1 - S) / (R S)`.
fn survival_fit(curve: &[(f64, f64)], replicas: usize) -> Result<stats::LinearFit, HarnessError> {
    let xs: Vec<f64> = curve.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = curve.iter().map(|p| p.1.ln()).collect();
    let ws: Vec<f64> = curve.iter().map(|&(_, s)| if s > 0.0 && s < 1.0 { replicas as f64 * s / (1.0 - s) } else { 0.0 }).collect();
    weighted_linear_fit(&xs, &ys, &ws)
}

pub fn run_meeting_tail(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let n = spec.n as f64;
    let th = theta(spec)?;
    let cap = spec.t_cap.unwrap_or(20.0 * n);
    let grid = spec.grid.unwrap_or(Grid::geometric(n / 2.0, 3.0 * n, 12)).points();
    let radius = ltle_radius(spec.n, spec.d);
    let graphs = Graphs::new(spec, &[spec.n])?;
    let mode = spec.mode;
    let samples = graphs.replicas(spec.n, spec.replicas, MEETING_STREAM, |g, _, seed| match mode {
        MeetingMode::Stationary => Ok(dual::meeting_time_stationary(g, cap, seed)),
        MeetingMode::AdjacentLtle => {
            let (x, y) = random_ltle_pair(g, radius, seed)?;
            Ok(dual::meeting_time_pair(g, x, y, cap, seed))
        }
    })?;

    let mut out = ExperimentSummary::new(spec);
    let uncensored = samples.iter().filter(|w| !w.is_censored()).count();
    out.set_stat("uncensored", uncensored as f64);
    out.checks.push(Check::at_least("uncensored", uncensored as f64, MIN_UNCENSORED as f64));

    let curve = dual::survival_curve(&samples, &grid)?;
    let fit = survival_fit(&curve, samples.len())?;
    let rate = -fit.slope;
    out.set_stat("rate", rate);
    out.set_stat("rate_std_err", fit.slope_se);
    out.set_stat("rate_n_over_2", rate * n / 2.0);
    out.checks.push(Check::around("rate_n_over_2", rate * n / 2.0, th, MEETING_RATE_REL * th));

    out.data = DataTable::new(&["t", "survival", "std_err", "fit"]);
    for &(t, s) in &curve {
        let (_, se) = proportion((s * samples.len() as f64).round() as usize, samples.len());
        out.rows.push(GridRow { x: t, mean: s, std_err: se, replicas: samples.len(), target: None });
        out.data.push(vec![t, s, se, (fit.intercept + fit.slope * t).exp()]);
    }

    match mode {
        MeetingMode::Stationary => {
            let mean = Estimate::from_samples(&waiting_values(&samples));
            let target = 1.0 / (2.0 * th);
            out.set_stat("mean_over_n", mean.mean / n);
            out.set_stat("mean_over_n_std_err", mean.std_err / n);
            out.checks.push(Check::around("mean_over_n", mean.mean / n, target, MEAN_TIME_REL * target));
        }
        MeetingMode::AdjacentLtle => {
            let beyond = samples.iter().filter(|w| w.exceeds(spec.probe_time)).count();
            let (s_hat, se) = proportion(beyond, samples.len());
            out.set_stat("ltle_radius", radius as f64);
            out.set_stat("short_survival", s_hat);
            out.set_stat("short_survival_std_err", se);
            out.checks.push(Check::around("short_survival", s_hat, th, SHORT_SURVIVAL_TOLERANCE));
        }
    }
    Ok(out)
}

pub fn run_coalescence_scaling(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let n = spec.n as f64;
    let th = theta(spec)?;
    let cap = spec.t_cap.unwrap_or(50.0 * n);
    let graphs = Graphs::new(spec, &[spec.n])?;
    let coal = graphs.replicas(spec.n, spec.replicas, DYNAMICS_STREAM, |g, _, seed| Ok(dual::coalescence_time(g, cap, seed)))?;
    let meet = pool::try_run_indexed(graphs.workers, spec.meet_replicas, |r| {
        let seed = derive_seed(spec.seed, MEETING_STREAM, r as u64);
        // Meeting replicas reuse the coalescence graphs cyclically.
        graphs.with(spec.n, r % spec.replicas, |g| dual::meeting_time_stationary(g, cap, seed))
    })?;

    let mut out = ExperimentSummary::new(spec);
    let censored = coal.iter().filter(|w| w.is_censored()).count();
    let (frac, _) = proportion(censored, coal.len());
    out.checks.push(Check::at_most("coalescence_censored_fraction", frac, MAX_CENSORED_FRACTION));

    let c = Estimate::from_samples(&waiting_values(&coal));
    let m = Estimate::from_samples(&waiting_values(&meet));
    let ratio = c.mean / m.mean;
    let ratio_se = ratio * (c.std_err / c.mean).hypot(m.std_err / m.mean);
    let coal_target = 1.0 / th;
    out.set_stat("coalescence_over_n", c.mean / n);
    out.set_stat("coalescence_over_n_std_err", c.std_err / n);
    out.set_stat("meeting_over_n", m.mean / n);
    out.set_stat("meeting_over_n_std_err", m.std_err / n);
    out.set_stat("ratio", ratio);
    out.set_stat("ratio_std_err", ratio_se);
    out.checks.push(Check::around("coalescence_over_n", c.mean / n, coal_target, MEAN_TIME_REL * coal_target));
    out.checks.push(Check::around("ratio", ratio, 2.0, MEAN_TIME_REL * 2.0));

    out.data = DataTable::new(&["replica", "coalescence_time", "censored"]);
    for (r, w) in coal.iter().enumerate() {
        out.data.push(vec![r as f64, w.value(), f64::from(u8::from(w.is_censored()))]);
    }
    let mut meet_table = DataTable::new(&["replica", "meeting_time", "censored"]);
    for (r, w) in meet.iter().enumerate() {
        meet_table.push(vec![r as f64, w.value(), f64::from(u8::from(w.is_censored()))]);
    }
    out.extra.push(("meeting".into(), meet_table));
    Ok(out)
}

/// `ceil(ln(n)^2)`.
pub fn default_return_horizon(n: usize) -> u64 {
    (n as f64).ln().powi(2).ceil() as u64
}

/// Pools batch estimates into one, using within- and between-batch spread.
fn pool_estimates(parts: &[Estimate]) -> Estimate {
    let total: usize = parts.iter().map(|e| e.replicas).sum();
    if total == 0 {
        return Estimate { mean: f64::NAN, std_err: f64::NAN, replicas: 0 };
    }
    let mean = parts.iter().map(|e| e.mean * e.replicas as f64).sum::<f64>() / total as f64;
    let ss: f64 = parts
        .iter()
        .filter(|e| e.replicas > 0)
        .map(|e| {
            let k = e.replicas as f64;
            // Recover the within-batch sum of squares from the standard error.
            e.std_err.powi(2) * k * (k - 1.0) + k * (e.mean - mean).powi(2)
        })
        .sum();
    let var = if total > 1 { ss / (total - 1) as f64 } else { 0.0 };
    Estimate { mean, std_err: (var / total as f64).sqrt(), replicas: total }
}

pub fn run_fvtl_returns(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let horizon = spec.horizon.unwrap_or_else(|| default_return_horizon(spec.n));
    let target = (spec.d as f64 - 1.0) / (spec.d as f64 - 2.0);
    let graphs = Graphs::new(spec, &[spec.n])?;
    let batches = if spec.fixed_graph { 1 } else { RETURN_GRAPH_BATCHES.min(spec.replicas) };
    let parts = graphs.replicas(spec.n, batches, DYNAMICS_STREAM, |g, b, seed| {
        let share = spec.replicas / batches + usize::from(b < spec.replicas % batches);
        Ok(dual::product_chain_returns(g, horizon, share, seed))
    })?;
    let est = pool_estimates(&parts);

    let mut out = ExperimentSummary::new(spec);
    out.set_stat("horizon", horizon as f64);
    out.set_stat("returns", est.mean);
    out.set_stat("returns_std_err", est.std_err);
    out.set_stat("target", target);
    out.rows.push(GridRow { x: horizon as f64, mean: est.mean, std_err: est.std_err, replicas: est.replicas, target: Some(target) });
    out.checks.push(Check::around("returns", est.mean, target, RETURNS_TOLERANCE));
    out.data = DataTable::new(&["horizon", "returns", "std_err", "target"]);
    out.data.push(vec![horizon as f64, est.mean, est.std_err, target]);
    Ok(out)
}

pub fn run_distributional(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let th = theta(spec)?;
    let t = spec.s * spec.n as f64;
    let graphs = Graphs::new(spec, &[spec.n])?;
    let voter: Vec<f64> = discordance_paths(&graphs, spec.n, &[t])?.into_iter().map(|p| p[0]).collect();
    let endpoints = pool::try_run_indexed(graphs.workers, spec.replicas, |r| {
        let seed = derive_seed(spec.seed, DIFFUSION_STREAM, r as u64);
        Ok(diffusion::endpoint_samples(spec.u, spec.d, spec.s, spec.dt, 1, seed)?[0])
    })?;
    let limit: Vec<f64> = endpoints.iter().map(|b| 2.0 * th * b * (1.0 - b)).collect();

    let ks = ks_statistic(&voter, &limit)?;
    let (zero_voter, _) = proportion(voter.iter().filter(|&&x| x == 0.0).count(), voter.len());
    let (zero_limit, _) = proportion(limit.iter().filter(|&&x| x == 0.0).count(), limit.len());
    let mut out = ExperimentSummary::new(spec);
    out.set_stat("ks", ks);
    out.set_stat("zero_mass_voter", zero_voter);
    out.set_stat("zero_mass_diffusion", zero_limit);
    out.set_stat("mean_voter", Estimate::from_samples(&voter).mean);
    out.set_stat("mean_diffusion", Estimate::from_samples(&limit).mean);
    out.checks.push(Check::at_most("ks", ks, KS_TOLERANCE));
    out.checks.push(Check::at_most("zero_mass_gap", (zero_voter - zero_limit).abs(), ZERO_MASS_TOLERANCE));
    out.data = DataTable::new(&["replica", "voter", "diffusion"]);
    for (r, (v, l)) in voter.iter().zip(&limit).enumerate() {
        out.data.push(vec![r as f64, *v, *l]);
    }
    Ok(out)
}

/// Observation times `0, h, 2h, ...` up to `n^(1 - delta)`.
pub fn concentration_times(n: usize, delta: f64, spacing: f64) -> Vec<f64> {
    let horizon = (n as f64).powf(1.0 - delta);
    let steps = (horizon / spacing).floor() as usize;
    (0..=steps).map(|k| k as f64 * spacing).collect()
}

struct Sweep {
    times: Vec<f64>,
    mean_curve: Vec<Estimate>,
    sup_dev: Vec<f64>,
}

fn sweep(graphs: &Graphs, n: usize) -> Result<Sweep, HarnessError> {
    let spec = graphs.spec;
    let times = concentration_times(n, spec.delta, spec.spacing);
    let paths = discordance_paths(graphs, n, &times)?;
    let mean_curve = column_estimates(&paths, times.len());
    let sup_dev = paths.iter().map(|p| p.iter().zip(&mean_curve).map(|(x, m)| (x - m.mean).abs()).fold(0.0, f64::max)).collect();
    Ok(Sweep { times, mean_curve, sup_dev })
}

fn exceedance(devs: &[f64], eps: f64) -> (f64, f64) {
    proportion(devs.iter().filter(|&&x| x > eps).count(), devs.len())
}

pub fn run_concentration_sweep(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let sizes: Vec<usize> = if spec.compare { vec![spec.n, 2 * spec.n] } else { vec![spec.n] };
    let graphs = Graphs::new(spec, &sizes)?;
    let base = sweep(&graphs, spec.n)?;
    let mut out = ExperimentSummary::new(spec);
    for &eps in &spec.epsilons {
        let (p, se) = exceedance(&base.sup_dev, eps);
        out.rows.push(GridRow { x: eps, mean: p, std_err: se, replicas: base.sup_dev.len(), target: None });
        out.set_stat(format!("exceedance_eps{eps}"), p);
    }
    let (p, se) = exceedance(&base.sup_dev, CONCENTRATION_EPS);
    out.set_stat("exceedance", p);
    out.set_stat("exceedance_std_err", se);
    out.set_stat("mean_sup_deviation", Estimate::from_samples(&base.sup_dev).mean);
    out.checks.push(Check::at_most("exceedance", p, CONCENTRATION_MAX_FRACTION));

    let mut header = vec!["replica", "sup_deviation"];
    let doubled = if spec.compare {
        let big = sweep(&graphs, 2 * spec.n)?;
        let (p2, se2) = exceedance(&big.sup_dev, CONCENTRATION_EPS);
        out.set_stat("exceedance_2n", p2);
        out.set_stat("exceedance_2n_std_err", se2);
        out.set_stat("mean_sup_deviation_2n", Estimate::from_samples(&big.sup_dev).mean);
        out.checks.push(Check::at_most("exceedance_2n_not_larger", p2, p + 2.0 * se.hypot(se2)));
        header.push("sup_deviation_2n");
        Some(big)
    } else {
        None
    };
    out.data = DataTable::new(&header);
    for r in 0..base.sup_dev.len() {
        let mut row = vec![r as f64, base.sup_dev[r]];
        if let Some(big) = &doubled {
            row.push(big.sup_dev[r]);
        }
        out.data.push(row);
    }
    let mut curve = DataTable::new(&["t", "mean", "std_err"]);
    for (t, e) in base.times.iter().zip(&base.mean_curve) {
        curve.push(vec![*t, e.mean, e.std_err]);
    }
    out.extra.push(("mean_curve".into(), curve));
    Ok(out)
}

pub fn run_figure(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    match spec.kind {
        ExperimentKind::Figure1 => run_figure1(spec),
        ExperimentKind::Figure2 => run_figure2(spec),
        other => Err(HarnessError::InvalidSpec(format!("{other} is not a figure"))),
    }
}

fn run_figure1(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let cap = spec.t_cap.unwrap_or(CONSENSUS_CAP);
    let times = spec.grid.unwrap_or(Grid::linear(0.0, 5000.0_f64.min(cap), 1001)).points();
    let graphs = Graphs::new(spec, &[spec.n])?;
    let mut out = ExperimentSummary::new(spec);

    let u = spec.u;
    let runs = graphs.replicas(spec.n, spec.replicas, DYNAMICS_STREAM, |g, r, seed| {
        let mut state = VoterState::init_bernoulli(g, u, seed)?;
        // Replica 0 is the displayed trajectory.
        let traj = if r == 0 { Some(state.run_recorded(&times)?) } else { None };
        let consensus = if state.is_consensus() {
            // Recorded past consensus; rerun for the exact time.
            VoterState::init_bernoulli(g, u, seed)?.run_until_consensus(cap)
        } else {
            state.run_until_consensus(cap)
        };
        Ok((traj, consensus))
    })?;

    out.data = DataTable::new(&["t", "b_density", "d_density", "prediction"]);
    if let Some(traj) = &runs[0].0 {
        for s in &traj.samples {
            let pred = analytic::expected_discordance(u, spec.d, s.t, spec.n, SERIES_TOLERANCE)?;
            out.data.push(vec![s.t, s.b_density, s.d_density, pred]);
        }
    }
    let reached: Vec<f64> = runs.iter().filter_map(|r| r.1).collect();
    let (frac, se) = proportion(reached.len(), runs.len());
    out.set_stat("consensus_fraction", frac);
    out.set_stat("consensus_fraction_std_err", se);
    out.set_stat("first_run_consensus_time", runs[0].1.unwrap_or(f64::NAN));
    out.set_stat("mean_consensus_time", Estimate::from_samples(&reached).mean);
    out.checks.push(Check::at_least("consensus_fraction", frac, CONSENSUS_MIN_FRACTION));
    Ok(out)
}

fn run_figure2(spec: &ExperimentSpec) -> Result<ExperimentSummary, HarnessError> {
    let n = spec.n as f64;
    let th = theta(spec)?;
    let times = spec.grid.unwrap_or(Grid::linear(0.0, 4.0 * n, 81)).points();
    let graphs = Graphs::new(spec, &[spec.n])?;
    let u = spec.u;
    let trajs = graphs
        .replicas(spec.n, spec.replicas, DYNAMICS_STREAM, |g, _, seed| Ok(VoterState::init_bernoulli(g, u, seed)?.run_recorded(&times)?))?;

    let mut out = ExperimentSummary::new(spec);
    out.data = DataTable::new(&["replica", "t", "b_density", "minority", "d_density"]);
    let mut gaps = Vec::new();
    for (r, traj) in trajs.iter().enumerate() {
        for s in &traj.samples {
            let x = s.b_density;
            out.data.push(vec![r as f64, s.t, x, x.min(1.0 - x), s.d_density]);
            if s.t >= n / 4.0 {
                gaps.push((s.d_density - 2.0 * th * x * (1.0 - x)).abs());
            }
        }
    }
    let gap = Estimate::from_samples(&gaps);
    out.set_stat("mean_abs_gap", gap.mean);
    out.set_stat("mean_abs_gap_std_err", gap.std_err);
    out.checks.push(Check::at_most("mean_abs_gap", gap.mean, HOMOGENISATION_TOLERANCE));

    let mut reference = DataTable::new(&["x", "reference"]);
    for x in Grid::linear(0.0, 0.5, 51).points() {
        reference.push(vec![x, x * (1.0 - x)]);
    }
    out.extra.push(("reference".into(), reference));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pooled_estimate_matches_direct() {
        let xs: Vec<f64> = (0..30).map(|i| ((i * 7) % 11) as f64).collect();
        let parts: Vec<Estimate> = xs.chunks(7).map(Estimate::from_samples).collect();
        let pooled = pool_estimates(&parts);
        let direct = Estimate::from_samples(&xs);
        assert!((pooled.mean - direct.mean).abs() < 1e-12);
        assert!((pooled.std_err - direct.std_err).abs() < 1e-12);
        assert_eq!(pooled.replicas, 30);
    }

    #[test]
    fn radius_and_horizon_defaults() {
        assert_eq!(ltle_radius(1000, 3), 1);
        assert_eq!(ltle_radius(10, 3), 1);
        assert_eq!(ltle_radius(3usize.pow(10), 3), 2);
        assert_eq!(default_return_horizon(1000), 48);
    }

    #[test]
    fn concentration_grid() {
        let ts = concentration_times(1000, 0.2, 0.25);
        assert_eq!(ts.len(), 1005);
        assert_eq!(ts[4], 1.0);
        assert!(*ts.last().unwrap() <= 1000f64.powf(0.8));
    }
}
