//! Simulation and exact evaluation toolkit for the two-opinion voter model on
//! random `d`-regular graphs.
//!
//! The crate is organised around the duality between the voter model and
//! coalescing random walks:
//!
//! * [`graph`] samples simple `d`-regular graphs from the configuration model
//!   and answers local-structure queries (balls, tree excess, locally
//!   tree-like vertices and edges).
//! * [`analytic`] evaluates closed-form predictions: the escape probability
//!   `theta_d`, the tree meeting law `f_d(t)` and the discordance curve.
//! * [`voter`] runs the voter model forward in continuous time while keeping
//!   the number of discordant edges up to date in `O(d)` per event.
//! * [`dual`] runs independent and coalescing random walks and measures
//!   meeting, coalescence and return statistics.
//! * [`diffusion`] integrates the Fisher-Wright diffusion that describes the
//!   opinion density on the consensus time scale.

// NaN must fail parameter checks, which `!(x >= 0.0)` expresses directly.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod diffusion;
pub mod dual;
pub mod estimate;
pub mod graph;
pub mod rng;
pub mod voter;

pub use estimate::Estimate;
pub use graph::RegularGraph;
pub use rng::SimRng;
