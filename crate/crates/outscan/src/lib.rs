//! Online discrete-continuous path planning for autonomous outdoor LiDAR
//! scanning, plus a deterministic simulation harness to exercise it.
//!
//! The pipeline ingests simulated 360° LiDAR scans of a synthetic scene,
//! maintains a per-point guidance field (explorability + observability) over
//! the ground, extracts visit sites by non-maximum suppression, plans visits
//! with a greedy/exact-TSP policy over the evolving site graph, refines each
//! traverse into a quality-aware clamped cubic B-spline, and reports
//! coverage/quality/smoothness metrics.
//!
//! Entry points:
//! - [`sim::run_episode`] runs a full scan-plan-move episode on a [`sim::Scene`].
//! - [`harness::run_baseline`] runs one of the comparison policies.
//! - Individual building blocks (GHPR visibility, fractal-dimension quality,
//!   site extraction, TSP ordering, spline refinement) are exposed per module.

pub mod config;
pub mod geom;
pub mod guidance;
pub mod harness;
pub mod io;
pub mod planner;
pub mod quality;
pub mod refine;
pub mod sim;
pub mod visibility;

use thiserror::Error;

/// Errors surfaced by planning, simulation, and I/O operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("operation requires a non-empty point set")]
    EmptyInput,
    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },
    #[error("no path between the requested nodes")]
    Unreachable,
    #[error("degenerate path: start and goal coincide")]
    DegeneratePath,
    #[error("site count {0} exceeds the planner hard cap")]
    TooManySites(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("scene error: {0}")]
    Scene(String),
    #[error("malformed cloud file: {0}")]
    CloudFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

pub use config::Params;
pub use geom::{LabeledPointCloud, PathPolyline, Point3, PointLabel};
