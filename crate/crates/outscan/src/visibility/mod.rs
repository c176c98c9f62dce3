//! Point-cloud visibility via the generalized hidden-point-removal (GHPR)
//! radial transform, and the observability-to-unknown field built from the
//! robot's recent viewpoints.

mod ghpr;
mod observability;

pub use ghpr::{ghpr_transform, visible_set, VisibilityResult};
pub use observability::{observability, smooth_observability, ViewpointHistory};
