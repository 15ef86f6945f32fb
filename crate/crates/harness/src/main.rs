use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use voter_core::analytic::{self, TreeMeetingLaw};
use voter_core::dual::{self, EventKind};
use voter_core::graph::{self, RegularGraph};
use voter_core::voter::VoterState;
use voter_core::Estimate;
use voter_harness::experiments::{ltle_radius, SERIES_TOLERANCE};
use voter_harness::{pool, ExperimentKind, ExperimentSpec, Grid, HarnessError, MeetingMode};

#[derive(Parser)]
#[command(name = "voterlab", version, about = "Voter model simulations on random regular graphs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a d-regular graph and write its edge list.
    GenGraph(Common),
    /// Tabulate the tree survival curve f_d(t) and the discordance prediction.
    FdCurve {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = SERIES_TOLERANCE)]
        tolerance: f64,
    },
    /// Run one voter model trajectory.
    Simulate {
        #[command(flatten)]
        common: Common,
        /// Read the graph from a file instead of sampling one.
        #[arg(long)]
        graph: Option<PathBuf>,
    },
    /// Sample meeting or coalescence times of random walks.
    Dual {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = DualMode::Stationary)]
        mode: DualMode,
    },
    /// Run a named experiment and check it against its tolerances.
    Experiment {
        /// One of the experiment kinds, e.g. plateau or figure1.
        kind: ExperimentKind,
        #[command(flatten)]
        common: Common,
        #[command(flatten)]
        extra: ExperimentArgs,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum DualMode {
    /// Two walks from independent uniform vertices.
    Stationary,
    /// Two walks from the ends of a uniform edge.
    Adjacent,
    /// Coalescing walks from every vertex.
    Coalesce,
}

#[derive(Args)]
struct Common {
    #[arg(long, default_value_t = 1000)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    d: usize,
    #[arg(long, default_value_t = 0.5)]
    u: f64,
    #[arg(long)]
    replicas: Option<usize>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; falls back to the VOTERLAB_WORKERS variable.
    #[arg(long)]
    workers: Option<usize>,
    /// Output path prefix; output goes to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Share one graph across all replicas.
    #[arg(long)]
    fixed_graph: bool,
    #[arg(long)]
    t_cap: Option<f64>,
    /// Time grid as lin:a:b:k or geo:a:b:k.
    #[arg(long)]
    grid: Option<Grid>,
}

#[derive(Args)]
struct ExperimentArgs {
    /// Scaled time t/n for the distributional comparison.
    #[arg(long)]
    s: Option<f64>,
    /// Diffusion time step.
    #[arg(long)]
    dt: Option<f64>,
    /// Concentration horizon exponent: times up to n^(1-delta).
    #[arg(long)]
    delta: Option<f64>,
    /// Comma-separated deviation thresholds.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    /// Observation spacing for the concentration sweep.
    #[arg(long)]
    spacing: Option<f64>,
    /// stationary or adjacent-ltle.
    #[arg(long)]
    mode: Option<MeetingMode>,
    /// Time at which the adjacent-start survival level is read.
    #[arg(long)]
    probe_time: Option<f64>,
    /// Product chain horizon.
    #[arg(long)]
    horizon: Option<u64>,
    /// Repeat at size 2n and compare.
    #[arg(long)]
    compare: bool,
    /// Meeting samples for the coalescence ratio.
    #[arg(long)]
    meet_replicas: Option<usize>,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

/// `Ok(false)` means the command ran but a tolerance check failed.
fn run(cli: Cli) -> Result<bool, HarnessError> {
    match cli.command {
        Command::GenGraph(c) => gen_graph(&c).map(|_| true),
        Command::FdCurve { common, tolerance } => fd_curve(&common, tolerance).map(|_| true),
        Command::Simulate { common, graph } => simulate(&common, graph.as_deref()).map(|_| true),
        Command::Dual { common, mode } => run_dual(&common, mode).map(|_| true),
        Command::Experiment { kind, common, extra } => experiment(kind, common, extra),
    }
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut s = prefix.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

/// `<prefix><suffix>` when a prefix is given, else stdout.
fn sink(prefix: Option<&Path>, suffix: &str) -> Result<Box<dyn Write>, HarnessError> {
    Ok(match prefix {
        Some(p) => Box::new(BufWriter::new(File::create(with_suffix(p, suffix))?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn gen_graph(c: &Common) -> Result<(), HarnessError> {
    let g = graph::generate_regular(c.n, c.d, c.seed)?;
    graph::save_graph(&g, sink(c.out.as_deref(), ".graph")?)?;
    if c.out.is_some() {
        let radius = ltle_radius(c.n, c.d);
        let ltle = (0..g.m()).filter(|&e| graph::is_ltle_edge(&g, e, radius)).count();
        println!("n={} d={} m={} connected={} ltle_radius={} ltle_edges={}", g.n(), g.d(), g.m(), graph::is_connected(&g), radius, ltle);
    }
    Ok(())
}

fn fd_curve(c: &Common, tolerance: f64) -> Result<(), HarnessError> {
    let law = TreeMeetingLaw::new(c.d, tolerance)?;
    let times = c.grid.unwrap_or(Grid::linear(0.0, 10.0, 101)).points();
    let mut out = sink(c.out.as_deref(), ".data.csv")?;
    writeln!(out, "t,survival,meeting_cdf,expected_discordance")?;
    for t in times {
        let pred = analytic::expected_discordance(c.u, c.d, t, c.n, tolerance)?;
        writeln!(out, "{t},{},{},{pred}", law.survival(t), law.meeting_cdf(t))?;
    }
    out.flush()?;
    Ok(())
}

fn load_or_generate(c: &Common, path: Option<&Path>) -> Result<RegularGraph, HarnessError> {
    Ok(match path {
        Some(p) => graph::load_graph(BufReader::new(File::open(p)?))?,
        None => graph::generate_regular(c.n, c.d, c.seed)?,
    })
}

fn simulate(c: &Common, graph_path: Option<&Path>) -> Result<(), HarnessError> {
    let g = load_or_generate(c, graph_path)?;
    let times = c.grid.unwrap_or(Grid::linear(0.0, 100.0, 101)).points();
    let mut state = VoterState::init_bernoulli(&g, c.u, c.seed)?;
    let traj = state.run_recorded(&times)?;
    traj.write_csv(sink(c.out.as_deref(), ".data.csv")?)?;
    if let Some(cap) = c.t_cap {
        let mut fresh = VoterState::init_bernoulli(&g, c.u, c.seed)?;
        match fresh.run_until_consensus(cap) {
            Some(t) => eprintln!("consensus at t={t}"),
            None => eprintln!("no consensus by t={cap}"),
        }
    }
    Ok(())
}

fn run_dual(c: &Common, mode: DualMode) -> Result<(), HarnessError> {
    let replicas = c.replicas.unwrap_or(1000);
    let cap = c.t_cap.unwrap_or(50.0 * c.n as f64);
    let workers = pool::resolve_workers(c.workers);
    let fixed = if c.fixed_graph { Some(graph::generate_regular(c.n, c.d, c.seed)?) } else { None };
    let samples = pool::try_run_indexed(workers, replicas, |r| {
        let seed = voter_core::rng::derive_seed(c.seed, 0x6475, r as u64);
        let owned;
        let g = match &fixed {
            Some(g) => g,
            None => {
                owned = graph::generate_regular(c.n, c.d, seed)?;
                &owned
            }
        };
        Ok(match mode {
            DualMode::Stationary => dual::meeting_time_stationary(g, cap, seed),
            DualMode::Adjacent => {
                let (x, y) = g.edge(r % g.m());
                dual::meeting_time_pair(g, x, y, cap, seed)
            }
            DualMode::Coalesce => dual::coalescence_time(g, cap, seed),
        })
    })?;
    let kind = if matches!(mode, DualMode::Coalesce) { EventKind::Coalesced } else { EventKind::Met };
    dual::write_samples_csv(sink(c.out.as_deref(), ".data.csv")?, &samples, kind)?;
    let est = Estimate::from_samples(&samples.iter().map(|w| w.value()).collect::<Vec<_>>());
    eprintln!("mean/n = {:.6} +- {:.6} over {} samples", est.mean / c.n as f64, est.std_err / c.n as f64, est.replicas);
    Ok(())
}

fn experiment(kind: ExperimentKind, c: Common, x: ExperimentArgs) -> Result<bool, HarnessError> {
    let mut spec = ExperimentSpec::new(kind);
    spec.n = c.n;
    spec.d = c.d;
    spec.u = c.u;
    spec.seed = c.seed;
    spec.workers = c.workers;
    spec.out = c.out.clone();
    spec.fixed_graph |= c.fixed_graph;
    spec.t_cap = c.t_cap;
    spec.grid = c.grid;
    spec.compare = x.compare;
    if let Some(v) = c.replicas {
        spec.replicas = v;
    }
    if let Some(v) = x.s {
        spec.s = v;
    }
    if let Some(v) = x.dt {
        spec.dt = v;
    }
    if let Some(v) = x.delta {
        spec.delta = v;
    }
    if let Some(v) = x.eps {
        spec.epsilons = v;
    }
    if let Some(v) = x.spacing {
        spec.spacing = v;
    }
    if let Some(v) = x.mode {
        spec.mode = v;
    }
    if let Some(v) = x.probe_time {
        spec.probe_time = v;
    }
    if let Some(v) = x.meet_replicas {
        spec.meet_replicas = v;
    }
    spec.horizon = x.horizon;

    let summary = voter_harness::run(&spec)?;
    print!("{}", summary.report());
    if let Some(prefix) = &spec.out {
        for path in summary.write_files(prefix)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(summary.passed())
}
