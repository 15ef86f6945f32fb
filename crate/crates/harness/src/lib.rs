//! Experiment layer for the voter model toolkit.
//!
//! An [`ExperimentSpec`] names one of the experiments in
//! [`experiments`], the graph size and degree, the replica count and a master
//! seed. Replicas run on a worker pool and are aggregated by replica index,
//! so a spec always reproduces the same [`ExperimentSummary`] and files.

// NaN must fail parameter checks, which `!(x >= 0.0)` expresses directly.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod experiments;
pub mod grid;
pub mod pool;
pub mod spec;
pub mod stats;
pub mod summary;

use thiserror::Error;
use voter_core::analytic::AnalyticError;
use voter_core::diffusion::DiffusionError;
use voter_core::dual::DualError;
use voter_core::graph::GraphError;
use voter_core::voter::VoterError;

pub use experiments::run;
pub use grid::Grid;
pub use spec::{ExperimentKind, ExperimentSpec, MeetingMode};
pub use summary::{Check, DataTable, ExperimentSummary, GridRow};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid experiment: {0}")]
    InvalidSpec(String),
    #[error("invalid grid {0}")]
    Grid(String),
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    #[error("{0}")]
    EmptySample(String),
    #[error("worker pool: {0}")]
    Pool(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Voter(#[from] VoterError),
    #[error(transparent)]
    Dual(#[from] DualError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Analytic(#[from] AnalyticError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
