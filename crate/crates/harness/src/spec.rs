//! Declarative experiment descriptions.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use crate::grid::Grid;
use crate::HarnessError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExperimentKind {
    CurveShort,
    Plateau,
    LongDecay,
    MeetingTail,
    CoalescenceScaling,
    FvtlReturns,
    Distributional,
    ConcentrationSweep,
    Figure1,
    Figure2,
}

impl ExperimentKind {
    pub const ALL: [ExperimentKind; 10] = [
        ExperimentKind::CurveShort,
        ExperimentKind::Plateau,
        ExperimentKind::LongDecay,
        ExperimentKind::MeetingTail,
        ExperimentKind::CoalescenceScaling,
        ExperimentKind::FvtlReturns,
        ExperimentKind::Distributional,
        ExperimentKind::ConcentrationSweep,
        ExperimentKind::Figure1,
        ExperimentKind::Figure2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::CurveShort => "curve-short",
            ExperimentKind::Plateau => "plateau",
            ExperimentKind::LongDecay => "long-decay",
            ExperimentKind::MeetingTail => "meeting-tail",
            ExperimentKind::CoalescenceScaling => "coalescence-scaling",
            ExperimentKind::FvtlReturns => "fvtl-returns",
            ExperimentKind::Distributional => "distributional",
            ExperimentKind::ConcentrationSweep => "concentration-sweep",
            ExperimentKind::Figure1 => "figure1",
            ExperimentKind::Figure2 => "figure2",
        }
    }

    /// Replica count used when none is given.
    pub fn default_replicas(self) -> usize {
        match self {
            ExperimentKind::CurveShort | ExperimentKind::Plateau | ExperimentKind::ConcentrationSweep => 200,
            ExperimentKind::LongDecay | ExperimentKind::Distributional => 500,
            ExperimentKind::MeetingTail => 2000,
            ExperimentKind::CoalescenceScaling => 300,
            ExperimentKind::FvtlReturns => 100_000,
            ExperimentKind::Figure1 => 100,
            ExperimentKind::Figure2 => 50,
        }
    }
}

impl fmt::Display for ExperimentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ExperimentKind {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL.into_iter().find(|k| k.name() == s).ok_or_else(|| HarnessError::InvalidSpec(format!("unknown experiment kind {s:?}")))
    }
}

/// Start law for the meeting-tail experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeetingMode {
    /// Both walkers from independent uniform vertices.
    Stationary,
    /// Walkers at the two ends of a uniformly chosen locally tree-like edge.
    AdjacentLtle,
}

impl fmt::Display for MeetingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MeetingMode::Stationary => "stationary",
            MeetingMode::AdjacentLtle => "adjacent-ltle",
        })
    }
}

impl FromStr for MeetingMode {
    type Err = HarnessError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "stationary" => Ok(MeetingMode::Stationary),
            "adjacent-ltle" | "adjacent" => Ok(MeetingMode::AdjacentLtle),
            _ => Err(HarnessError::InvalidSpec(format!("unknown meeting mode {s:?}"))),
        }
    }
}

/// Everything needed to rerun an experiment exactly.
///
/// `None` fields fall back to per-kind defaults at run time; the defaults
/// actually used are written to the summary.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub n: usize,
    pub d: usize,
    pub u: f64,
    pub replicas: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub out: Option<PathBuf>,
    /// One graph shared by all replicas instead of a fresh graph per replica.
    pub fixed_graph: bool,
    pub t_cap: Option<f64>,
    pub grid: Option<Grid>,
    /// Diffusion-scale time `t / n` for the distributional comparison.
    pub s: f64,
    pub dt: f64,
    pub delta: f64,
    pub epsilons: Vec<f64>,
    /// Spacing of the observation grid in the concentration sweep.
    pub spacing: f64,
    pub mode: MeetingMode,
    /// Observation time of the short-time survival level in adjacent mode.
    pub probe_time: f64,
    /// Horizon of the product chain; defaults to `ceil(ln(n)^2)`.
    pub horizon: Option<u64>,
    /// Also run at `2n` and compare.
    pub compare: bool,
    /// Independent meeting samples used for the coalescence ratio.
    pub meet_replicas: usize,
}

impl ExperimentSpec {
    /// Desk-scale defaults: `n = 1000`, `d = 3`, `u = 1/2`.
    pub fn new(kind: ExperimentKind) -> Self {
        Self {
            kind,
            n: 1000,
            d: 3,
            u: 0.5,
            replicas: kind.default_replicas(),
            seed: 1,
            workers: None,
            out: None,
            fixed_graph: kind == ExperimentKind::FvtlReturns,
            t_cap: None,
            grid: None,
            s: 1.0,
            dt: voter_core::diffusion::DEFAULT_DT,
            delta: 0.2,
            epsilons: vec![0.02, 0.05, 0.1],
            spacing: 0.25,
            mode: MeetingMode::Stationary,
            probe_time: 50.0,
            horizon: None,
            compare: false,
            meet_replicas: 2000,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        let bad = |m: String| Err(HarnessError::InvalidSpec(m));
        if self.d < 3 {
            return bad(format!("degree {} must be at least 3", self.d));
        }
        if self.n <= self.d || !(self.n * self.d).is_multiple_of(2) {
            return bad(format!("no simple {}-regular graph on {} vertices", self.d, self.n));
        }
        if !(0.0..=1.0).contains(&self.u) {
            return bad(format!("initial density {} not in [0, 1]", self.u));
        }
        if self.replicas == 0 || self.meet_replicas == 0 {
            return bad("replicas must be at least 1".into());
        }
        if self.workers == Some(0) {
            return bad("worker count must be at least 1".into());
        }
        if let Some(cap) = self.t_cap {
            if !(cap > 0.0) {
                return bad(format!("time cap {cap} must be positive"));
            }
        }
        if !(self.s > 0.0 && self.s.is_finite()) {
            return bad(format!("scaled time {} must be positive", self.s));
        }
        if !(self.dt > 0.0) {
            return bad(format!("time step {} must be positive", self.dt));
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} not in (0, 1)", self.delta));
        }
        if self.epsilons.is_empty() || self.epsilons.iter().any(|e| !(*e > 0.0)) {
            return bad("epsilon grid must be non-empty and positive".into());
        }
        if !(self.spacing > 0.0) {
            return bad(format!("grid spacing {} must be positive", self.spacing));
        }
        if !(self.probe_time >= 0.0) {
            return bad(format!("probe time {} is negative", self.probe_time));
        }
        Ok(())
    }

    /// Key-value echo written into the summary.
    pub fn echo(&self) -> Vec<(&'static str, String)> {
        let mut v = vec![
            ("kind", self.kind.to_string()),
            ("n", self.n.to_string()),
            ("d", self.d.to_string()),
            ("u", self.u.to_string()),
            ("replicas", self.replicas.to_string()),
            ("seed", self.seed.to_string()),
            ("fixed_graph", self.fixed_graph.to_string()),
            ("s", self.s.to_string()),
            ("dt", self.dt.to_string()),
            ("delta", self.delta.to_string()),
            ("epsilons", self.epsilons.iter().map(f64::to_string).collect::<Vec<_>>().join(";")),
            ("spacing", self.spacing.to_string()),
            ("mode", self.mode.to_string()),
            ("probe_time", self.probe_time.to_string()),
            ("compare", self.compare.to_string()),
            ("meet_replicas", self.meet_replicas.to_string()),
        ];
        if let Some(w) = self.workers {
            v.push(("workers", w.to_string()));
        }
        if let Some(c) = self.t_cap {
            v.push(("t_cap", c.to_string()));
        }
        if let Some(g) = self.grid {
            v.push(("grid", g.to_string()));
        }
        if let Some(h) = self.horizon {
            v.push(("horizon", h.to_string()));
        }
        v
    }
}
