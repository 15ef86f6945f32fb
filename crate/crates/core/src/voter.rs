//! Continuous-time voter model with incremental discordance bookkeeping.
//!
//! Each vertex carries a rate-1 clock; on a ring it copies the opinion of a
//! uniformly chosen neighbour. The superposition of the `n` clocks is a
//! rate-`n` Poisson process whose marks pick the updating vertex uniformly,
//! which is how events are generated here. The next event time is part of
//! the state, so the sample path does not depend on when it is observed.

use std::io::Write;

use rand::Rng;
use rand_distr::{Distribution, Exp1};
use thiserror::Error;

use crate::graph::RegularGraph;
use crate::rng::{self, SimRng};

#[derive(Debug, Error)]
pub enum VoterError {
    #[error("opinion vector has length {found}, graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("initial density {0} not in [0, 1]")]
    InvalidDensity(f64),
    #[error("sample times must be strictly increasing and not before the current time {current}: {detail}")]
    InvalidSchedule { current: f64, detail: String },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// How the opinions of a run were initialised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialCondition {
    Bernoulli(f64),
    Explicit,
}

#[derive(Debug, Clone)]
pub struct VoterState<'g> {
    graph: &'g RegularGraph,
    opinions: Vec<bool>,
    t: f64,
    next_event: f64,
    b_count: usize,
    disc_count: usize,
    events: u64,
    seed: u64,
    init: InitialCondition,
    rng: SimRng,
}

impl<'g> VoterState<'g> {
    /// I.i.d. Bernoulli(`u`) opinions. Initial opinions and dynamics use
    /// separate streams of the same seed.
    pub fn init_bernoulli(graph: &'g RegularGraph, u: f64, seed: u64) -> Result<Self, VoterError> {
        if !(0.0..=1.0).contains(&u) {
            return Err(VoterError::InvalidDensity(u));
        }
        let mut init_rng = rng::seeded_stream(seed, 1);
        let opinions = (0..graph.n()).map(|_| init_rng.random_bool(u)).collect();
        let mut state = Self::build(graph, opinions, seed);
        state.init = InitialCondition::Bernoulli(u);
        Ok(state)
    }

    pub fn init_explicit(graph: &'g RegularGraph, opinions: &[bool], seed: u64) -> Result<Self, VoterError> {
        if opinions.len() != graph.n() {
            return Err(VoterError::LengthMismatch { expected: graph.n(), found: opinions.len() });
        }
        Ok(Self::build(graph, opinions.to_vec(), seed))
    }

    fn build(graph: &'g RegularGraph, opinions: Vec<bool>, seed: u64) -> Self {
        let mut rng = rng::seeded_stream(seed, 0);
        let next_event = Self::waiting_time(&mut rng, graph.n());
        let b_count = opinions.iter().filter(|&&o| o).count();
        let disc_count = count_discordant(graph, &opinions);
        Self { graph, opinions, t: 0.0, next_event, b_count, disc_count, events: 0, seed, init: InitialCondition::Explicit, rng }
    }

    fn waiting_time(rng: &mut SimRng, n: usize) -> f64 {
        let e: f64 = Exp1.sample(rng);
        e / n as f64
    }

    pub fn graph(&self) -> &'g RegularGraph {
        self.graph
    }

    pub fn opinions(&self) -> &[bool] {
        &self.opinions
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    /// Number of vertices holding opinion 1.
    pub fn b_count(&self) -> usize {
        self.b_count
    }

    /// Number of discordant edges.
    pub fn disc_count(&self) -> usize {
        self.disc_count
    }

    /// Clock rings processed so far, including ones that changed nothing.
    pub fn events(&self) -> u64 {
        self.events
    }

    pub fn b_density(&self) -> f64 {
        self.b_count as f64 / self.graph.n() as f64
    }

    pub fn d_density(&self) -> f64 {
        self.disc_count as f64 / self.graph.m() as f64
    }

    pub fn is_consensus(&self) -> bool {
        self.disc_count == 0
    }

    /// Processes the next clock ring and returns its time.
    fn fire(&mut self) -> f64 {
        let g = self.graph;
        let at = self.next_event;
        self.t = at;
        self.events += 1;
        let x = self.rng.random_range(0..g.n());
        let y = g.neighbors(x)[self.rng.random_range(0..g.d())];
        let old = self.opinions[x];
        if old != self.opinions[y] {
            let before = g.neighbors(x).iter().filter(|&&w| self.opinions[w] != old).count();
            self.opinions[x] = !old;
            // Every edge at x flips its discordance status.
            self.disc_count = self.disc_count + g.d() - 2 * before;
            if old {
                self.b_count -= 1;
            } else {
                self.b_count += 1;
            }
        }
        self.next_event = at + Self::waiting_time(&mut self.rng, g.n());
        at
    }

    /// Applies every event with time `<= t_target` and moves the clock to `t_target`.
    pub fn advance_to(&mut self, t_target: f64) {
        if t_target <= self.t {
            return;
        }
        while !self.is_consensus() && self.next_event <= t_target {
            self.fire();
        }
        // Consensus is absorbing, so pending rings no longer matter.
        self.t = t_target;
    }

    /// Processes exactly one clock ring, or returns `None` in consensus.
    pub fn step(&mut self) -> Option<f64> {
        if self.is_consensus() {
            return None;
        }
        Some(self.fire())
    }

    /// Runs until the first time with no discordant edge, or gives up at `t_cap`.
    pub fn run_until_consensus(&mut self, t_cap: f64) -> Option<f64> {
        if self.is_consensus() {
            return Some(self.t);
        }
        while self.next_event <= t_cap {
            let at = self.fire();
            if self.is_consensus() {
                return Some(at);
            }
        }
        self.t = self.t.max(t_cap);
        None
    }

    /// Advances through `sample_times`, recording densities after all events
    /// at or before each sample time.
    pub fn run_recorded(&mut self, sample_times: &[f64]) -> Result<Trajectory, VoterError> {
        validate_schedule(self.t, sample_times)?;
        let mut samples = Vec::with_capacity(sample_times.len());
        for &s in sample_times {
            self.advance_to(s);
            samples.push(Sample { t: s, b_density: self.b_density(), d_density: self.d_density() });
        }
        Ok(Trajectory { n: self.graph.n(), d: self.graph.d(), init: self.init, seed: self.seed, samples })
    }
}

fn validate_schedule(current: f64, times: &[f64]) -> Result<(), VoterError> {
    let bad = |detail: String| VoterError::InvalidSchedule { current, detail };
    if let Some(&first) = times.first() {
        if !(first >= current) {
            return Err(bad(format!("first sample {first}")));
        }
    }
    if let Some(w) = times.windows(2).find(|w| !(w[1] > w[0])) {
        return Err(bad(format!("{} followed by {}", w[0], w[1])));
    }
    Ok(())
}

/// Full recount of discordant edges.
pub fn count_discordant(g: &RegularGraph, opinions: &[bool]) -> usize {
    g.edges().iter().filter(|&&(u, v)| opinions[u] != opinions[v]).count()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub t: f64,
    pub b_density: f64,
    pub d_density: f64,
}

/// Densities observed along one voter run.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub n: usize,
    pub d: usize,
    pub init: InitialCondition,
    pub seed: u64,
    pub samples: Vec<Sample>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Writes `t,b_density,d_density` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<(), VoterError> {
        writeln!(out, "t,b_density,d_density")?;
        for s in &self.samples {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", s.t, s.b_density, s.d_density)?;
        }
        out.flush()?;
        Ok(())
    }
}
