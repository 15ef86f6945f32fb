//! Random walks dual to the voter model.
//!
//! Running the voter graphical construction backwards in time turns the
//! genealogy of opinions into a system of coalescing random walks. This module
//! simulates such systems (and their independent counterparts) and measures
//! meeting, coalescence and return statistics.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use thiserror::Error;

use crate::estimate::Estimate;
use crate::graph::RegularGraph;
use crate::rng::{self, SimRng};

#[derive(Debug, Error)]
pub enum DualError {
    #[error("grid point {t} lies beyond the censoring time {cap}")]
    GridBeyondCap { t: f64, cap: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Whether walkers that land on the same vertex merge.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Interaction {
    Independent,
    Coalescing,
}

/// Continuous time: every active walker jumps at rate 1. Discrete: each step
/// moves one uniformly chosen active walker and advances time by 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Clock {
    Continuous,
    Discrete,
}

const NONE: usize = usize::MAX;

/// One jump of one walker.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub walker: usize,
    pub from: usize,
    pub to: usize,
    pub time: f64,
    /// Walkers already sitting at `to` when the jumper arrived.
    pub met: usize,
    /// Set in coalescing mode when the jumper was absorbed on arrival.
    pub merged: bool,
}

/// Positions of a set of walkers plus the vertex-to-walkers index.
///
/// The index is an intrusive doubly linked list per vertex, so moving,
/// inserting and removing a walker are `O(1)`.
#[derive(Debug, Clone)]
pub struct WalkerSystem<'g> {
    graph: &'g RegularGraph,
    interaction: Interaction,
    clock: Clock,
    positions: Vec<usize>,
    active: Vec<usize>,
    slot: Vec<usize>,
    head: Vec<usize>,
    next: Vec<usize>,
    prev: Vec<usize>,
    time: f64,
    steps: u64,
    rng: SimRng,
}

impl<'g> WalkerSystem<'g> {
    /// Places walker `i` at `starts[i]`. In coalescing mode walkers sharing a
    /// start vertex merge immediately (the lowest id survives).
    pub fn new(graph: &'g RegularGraph, starts: &[usize], interaction: Interaction, clock: Clock, seed: u64) -> Self {
        let k = starts.len();
        let mut sys = Self {
            graph,
            interaction,
            clock,
            positions: starts.to_vec(),
            active: Vec::with_capacity(k),
            slot: vec![NONE; k],
            head: vec![NONE; graph.n()],
            next: vec![NONE; k],
            prev: vec![NONE; k],
            time: 0.0,
            steps: 0,
            rng: rng::seeded(seed),
        };
        for (id, &v) in starts.iter().enumerate() {
            if interaction == Interaction::Coalescing && sys.head[v] != NONE {
                continue;
            }
            sys.slot[id] = sys.active.len();
            sys.active.push(id);
            sys.link(id, v);
        }
        sys
    }

    fn link(&mut self, id: usize, v: usize) {
        let old = self.head[v];
        self.next[id] = old;
        self.prev[id] = NONE;
        if old != NONE {
            self.prev[old] = id;
        }
        self.head[v] = id;
        self.positions[id] = v;
    }

    fn unlink(&mut self, id: usize) {
        let v = self.positions[id];
        let (p, nx) = (self.prev[id], self.next[id]);
        if p == NONE {
            self.head[v] = nx;
        } else {
            self.next[p] = nx;
        }
        if nx != NONE {
            self.prev[nx] = p;
        }
        self.next[id] = NONE;
        self.prev[id] = NONE;
    }

    fn deactivate(&mut self, id: usize) {
        let i = self.slot[id];
        self.active.swap_remove(i);
        if let Some(&moved) = self.active.get(i) {
            self.slot[moved] = i;
        }
        self.slot[id] = NONE;
    }

    pub fn graph(&self) -> &'g RegularGraph {
        self.graph
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn active_count(&self) -> usize {
        self.active.len()
    }

    pub fn is_active(&self, id: usize) -> bool {
        self.slot[id] != NONE
    }

    pub fn position(&self, id: usize) -> usize {
        self.positions[id]
    }

    /// Active walkers currently at `v`.
    pub fn walkers_at(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let mut cur = self.head[v];
        std::iter::from_fn(move || {
            (cur != NONE).then(|| {
                let id = cur;
                cur = self.next[id];
                id
            })
        })
    }

    /// Moves an active walker to `v` without advancing time.
    pub fn relocate(&mut self, id: usize, v: usize) {
        assert!(self.is_active(id), "walker {id} is not active");
        self.unlink(id);
        self.link(id, v);
    }

    pub fn rng_mut(&mut self) -> &mut SimRng {
        &mut self.rng
    }

    /// Advances to the next jump. Returns `None` once no walker is active.
    pub fn step(&mut self) -> Option<Jump> {
        let k = self.active.len();
        if k == 0 {
            return None;
        }
        match self.clock {
            Clock::Continuous => {
                let e: f64 = Exp1.sample(&mut self.rng);
                self.time += e / k as f64;
            }
            Clock::Discrete => self.time += 1.0,
        }
        self.steps += 1;
        let walker = self.active[self.rng.random_range(0..k)];
        let from = self.positions[walker];
        let to = self.graph.neighbors(from)[self.rng.random_range(0..self.graph.d())];
        self.unlink(walker);
        let met = self.walkers_at(to).count();
        let merged = met > 0 && self.interaction == Interaction::Coalescing;
        if merged {
            self.positions[walker] = to;
            self.deactivate(walker);
        } else {
            self.link(walker, to);
        }
        Some(Jump { walker, from, to, time: self.time, met, merged })
    }

    /// Checks that the vertex index is exactly the inverse of the positions.
    pub fn occupancy_consistent(&self) -> bool {
        let mut seen = 0;
        for v in 0..self.graph.n() {
            for id in self.walkers_at(v) {
                if self.positions[id] != v || !self.is_active(id) {
                    return false;
                }
                seen += 1;
            }
            if self.interaction == Interaction::Coalescing && self.walkers_at(v).count() > 1 {
                return false;
            }
        }
        seen == self.active.len()
    }
}

/// A waiting time that is either observed or right-censored at a cap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WaitingTime {
    Observed(f64),
    Censored(f64),
}

impl WaitingTime {
    /// The observed time, or the censoring time.
    pub fn value(self) -> f64 {
        match self {
            Self::Observed(t) | Self::Censored(t) => t,
        }
    }

    pub fn observed(self) -> Option<f64> {
        match self {
            Self::Observed(t) => Some(t),
            Self::Censored(_) => None,
        }
    }

    pub fn is_censored(self) -> bool {
        matches!(self, Self::Censored(_))
    }

    /// Whether the waiting time is known to exceed `t`.
    pub fn exceeds(self, t: f64) -> bool {
        match self {
            Self::Observed(x) => x > t,
            Self::Censored(cap) => cap >= t,
        }
    }
}

/// Meeting time of independent rate-1 walks started at `x` and `y`.
pub fn meeting_time_pair(g: &RegularGraph, x: usize, y: usize, t_cap: f64, seed: u64) -> WaitingTime {
    if x == y {
        return WaitingTime::Observed(0.0);
    }
    let mut sys = WalkerSystem::new(g, &[x, y], Interaction::Independent, Clock::Continuous, seed);
    loop {
        let jump = sys.step().expect("two active walkers");
        if jump.time > t_cap {
            return WaitingTime::Censored(t_cap);
        }
        if jump.met > 0 {
            return WaitingTime::Observed(jump.time);
        }
    }
}

/// Meeting time of two walks started from independent uniform vertices
/// (the stationary law on a regular graph). Equal draws meet at time 0.
pub fn meeting_time_stationary(g: &RegularGraph, t_cap: f64, seed: u64) -> WaitingTime {
    let mut rng = rng::seeded_stream(seed, 1);
    let x = rng.random_range(0..g.n());
    let y = rng.random_range(0..g.n());
    meeting_time_pair(g, x, y, t_cap, seed)
}

/// Time until coalescing walks started one per vertex are reduced to one.
pub fn coalescence_time(g: &RegularGraph, t_cap: f64, seed: u64) -> WaitingTime {
    let starts: Vec<usize> = (0..g.n()).collect();
    let mut sys = WalkerSystem::new(g, &starts, Interaction::Coalescing, Clock::Continuous, seed);
    if sys.active_count() <= 1 {
        return WaitingTime::Observed(0.0);
    }
    while let Some(jump) = sys.step() {
        if jump.time > t_cap {
            return WaitingTime::Censored(t_cap);
        }
        if sys.active_count() == 1 {
            return WaitingTime::Observed(jump.time);
        }
    }
    unreachable!("walkers never all disappear")
}

/// Empirical survival `S(t) = #{samples > t} / #samples` on `grid`.
///
/// Censored samples count as exceeding every grid point up to their cap;
/// grid points beyond a cap are rejected.
pub fn survival_curve(samples: &[WaitingTime], grid: &[f64]) -> Result<Vec<(f64, f64)>, DualError> {
    if samples.is_empty() {
        return Err(DualError::InvalidParameter("no samples".into()));
    }
    let cap = samples
        .iter()
        .filter_map(|s| match s {
            WaitingTime::Censored(c) => Some(*c),
            WaitingTime::Observed(_) => None,
        })
        .fold(f64::INFINITY, f64::min);
    let mut sorted: Vec<f64> = samples.iter().filter_map(|s| s.observed()).collect();
    sorted.sort_by(f64::total_cmp);
    let total = samples.len() as f64;
    grid.iter()
        .map(|&t| {
            if t > cap {
                return Err(DualError::GridBeyondCap { t, cap });
            }
            let at_or_below = sorted.partition_point(|&x| x <= t);
            Ok((t, (samples.len() - at_or_below) as f64 / total))
        })
        .collect()
}

/// A uniformly random directed edge: uniform vertex, then uniform neighbour.
pub fn sample_edge_nu<R: Rng + ?Sized>(g: &RegularGraph, rng: &mut R) -> (usize, usize) {
    let x = rng.random_range(0..g.n());
    (x, g.neighbors(x)[rng.random_range(0..g.d())])
}

/// Expected number of visits to the diagonal within `horizon` steps of the
/// discrete-time pair chain started on the diagonal, counting the start.
///
/// From the diagonal the chain moves to a uniform directed edge `(x, y)`;
/// off the diagonal one of the two coordinates, chosen uniformly, moves to a
/// uniform neighbour, and the chain is back on the diagonal when they
/// coincide.
pub fn product_chain_returns(g: &RegularGraph, horizon: u64, replicas: usize, seed: u64) -> Estimate {
    if horizon == 0 || replicas == 0 {
        return Estimate { mean: 1.0, std_err: 0.0, replicas };
    }
    let mut sys = WalkerSystem::new(g, &[0, 0], Interaction::Independent, Clock::Discrete, seed);
    let mut visits = Vec::with_capacity(replicas);
    for _ in 0..replicas {
        let mut count = 1u64;
        let mut on_diagonal = true;
        for _ in 0..horizon {
            if on_diagonal {
                let (x, y) = sample_edge_nu(g, sys.rng_mut());
                sys.relocate(0, x);
                sys.relocate(1, y);
                on_diagonal = false;
            } else if sys.step().expect("two walkers").met > 0 {
                count += 1;
                on_diagonal = true;
            }
        }
        visits.push(count as f64);
    }
    Estimate::from_samples(&visits)
}

/// Fraction of `k` sampled directed edges whose endpoint walkers meet a
/// walker of another sampled edge before time `t`, averaged over replicas.
///
/// The `2k` walkers are independent rate-1 walks. Edges sharing a start
/// vertex interact at time 0.
pub fn interaction_fraction(g: &RegularGraph, k: usize, t: f64, replicas: usize, seed: u64) -> Result<Estimate, DualError> {
    if k < 2 {
        return Err(DualError::InvalidParameter(format!("need at least two edges, got {k}")));
    }
    if !(t >= 0.0) || replicas == 0 {
        return Err(DualError::InvalidParameter("t must be non-negative and replicas positive".into()));
    }
    let fractions: Vec<f64> = (0..replicas).map(|r| interaction_fraction_once(g, k, t, rng::derive_seed(seed, 0x1f, r as u64))).collect();
    Ok(Estimate::from_samples(&fractions))
}

fn interaction_fraction_once(g: &RegularGraph, k: usize, t: f64, seed: u64) -> f64 {
    let mut edge_rng = rng::seeded_stream(seed, 1);
    let edges: Vec<(usize, usize)> = (0..k).map(|_| sample_edge_nu(g, &mut edge_rng)).collect();
    let flags = interacting_edges(g, &edges, t, seed);
    flags.iter().filter(|&&b| b).count() as f64 / k as f64
}

fn mark_meetings(sys: &WalkerSystem, walker: usize, v: usize, interacting: &mut [bool]) {
    for other in sys.walkers_at(v) {
        if other / 2 != walker / 2 {
            interacting[other / 2] = true;
            interacting[walker / 2] = true;
        }
    }
}

/// For each edge, whether one of its endpoint walkers meets a walker of
/// another edge by time `t`. Walker `2i` starts at `edges[i].0` and walker
/// `2i + 1` at `edges[i].1`.
pub fn interacting_edges(g: &RegularGraph, edges: &[(usize, usize)], t: f64, seed: u64) -> Vec<bool> {
    let starts: Vec<usize> = edges.iter().flat_map(|&(x, y)| [x, y]).collect();
    let mut sys = WalkerSystem::new(g, &starts, Interaction::Independent, Clock::Continuous, seed);
    let mut interacting = vec![false; edges.len()];
    for (w, &v) in starts.iter().enumerate() {
        mark_meetings(&sys, w, v, &mut interacting);
    }
    while let Some(jump) = sys.step() {
        if jump.time > t {
            break;
        }
        if jump.met > 0 {
            mark_meetings(&sys, jump.walker, jump.to, &mut interacting);
            if interacting.iter().all(|&b| b) {
                break;
            }
        }
    }
    interacting
}

/// Outcome label for sample dumps.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EventKind {
    Met,
    Coalesced,
}

/// Writes `replica,outcome,time` rows; censored rows carry the cap.
pub fn write_samples_csv<W: Write>(mut out: W, samples: &[WaitingTime], kind: EventKind) -> Result<(), DualError> {
    writeln!(out, "replica,outcome,time")?;
    for (i, s) in samples.iter().enumerate() {
        let label = match (s, kind) {
            (WaitingTime::Censored(_), _) => "censored",
            (WaitingTime::Observed(_), EventKind::Met) => "met",
            (WaitingTime::Observed(_), EventKind::Coalesced) => "coalesced",
        };
        writeln!(out, "{i},{label},{:.16e}", s.value())?;
    }
    out.flush()?;
    Ok(())
}
