//! Foundational geometric types and queries: points, labeled clouds, a
//! uniform-grid spatial index, 3D convex hulls, weighted-graph shortest
//! paths, and clamped cubic B-spline evaluation.

mod cloud;
mod graph;
mod grid;
mod hull;
mod point;
mod polyline;
mod spline;

pub use cloud::{LabeledPointCloud, PointAttrs, PointLabel};
pub use graph::{shortest_path, PointGraph};
pub use grid::SpatialIndex;
pub(crate) use hull::hull_structure;
pub use hull::{convex_hull_3d, ConvexHull3};
pub use point::Point3;
pub use polyline::{
    accumulated_curvature, max_turning_angle, turning_angle, turning_angles_sum, PathPolyline,
};
pub use spline::{eval_bspline, BSplineCurve};
