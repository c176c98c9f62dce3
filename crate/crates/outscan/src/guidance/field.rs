use crate::geom::{LabeledPointCloud, Point3, SpatialIndex};

/// Distance-based explorability: `1 - exp(-|p - robot|^2 / sigma^2)`.
///
/// Zero at the robot, approaching 1 monotonically with distance.
pub fn explorability_distance(p: Point3, robot: Point3, sigma: f64) -> f64 {
    assert!(sigma > 0.0);
    1.0 - (-p.dist_sq(robot) / (sigma * sigma)).exp()
}

/// Medial-based explorability: `min(1, nearest-obstacle-distance / sigma)`.
///
/// `obstacles` indexes the non-ground points of the planning area; `None`
/// (no obstacles anywhere) is maximally spacious.
pub fn explorability_medial(p: Point3, obstacles: Option<&SpatialIndex>, sigma: f64) -> f64 {
    assert!(sigma > 0.0);
    match obstacles {
        None => 1.0,
        Some(index) => match index.nearest_within(p, sigma) {
            None => 1.0,
            Some((_, d)) => (d / sigma).min(1.0),
        },
    }
}

/// Re-measures explorability for the given ground points and folds it into
/// the stored per-point value, keeping only the minimum over all scans.
pub fn update_explorability(
    cloud: &mut LabeledPointCloud,
    ground: &[u32],
    robot: Point3,
    obstacles: Option<&SpatialIndex>,
    omega: f64,
    sigma: f64,
) {
    assert!((0.0..=1.0).contains(&omega));
    for &i in ground {
        let p = cloud.point(i);
        let phi_d = explorability_distance(p, robot, sigma);
        let phi_m = explorability_medial(p, obstacles, sigma);
        let candidate = omega * phi_d + (1.0 - omega) * phi_m;
        let attrs = cloud.attrs_mut(i);
        attrs.phi = attrs.phi.min(candidate);
    }
}

/// Fuses stored explorability and smoothed observability into the guidance
/// value `tau = lambda * phi + (1 - lambda) * rho_smooth`, writing it back
/// per point and returning `(index, tau)` pairs in input order.
pub fn guidance_field(
    cloud: &mut LabeledPointCloud,
    ground: &[u32],
    lambda: f64,
) -> Vec<(u32, f64)> {
    assert!((0.0..=1.0).contains(&lambda));
    ground
        .iter()
        .map(|&i| {
            let attrs = cloud.attrs_mut(i);
            debug_assert!(attrs.phi_is_set(), "phi must be evaluated before tau");
            let tau = lambda * attrs.phi + (1.0 - lambda) * attrs.rho_smooth;
            attrs.tau = tau;
            (i, tau)
        })
        .collect()
}
