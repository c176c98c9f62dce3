//! Deterministic synthetic world and scanner: scene geometry, 360° range-
//! limited LiDAR with Gaussian range noise, robot motion along planned
//! paths, scan integration, and full episode execution.

mod episode;
mod lidar;
mod nav;
mod robot;
mod scene;

pub use episode::{
    run_episode, Episode, EpisodeConfig, EpisodeResult, EpisodeStatus, Policy, TraceRow,
};
pub use lidar::{simulate_scan, ScanBatch};
pub use nav::NavGrid;
pub use robot::{step_robot, EnergyBudget, HaltReason, RobotState, StepEvent, StepEventKind};
pub use scene::{integrate_scan, Obstacle, Scene, StartPose};
