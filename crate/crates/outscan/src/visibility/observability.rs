use super::visible_set;
use crate::geom::{LabeledPointCloud, Point3, PointLabel, SpatialIndex};
use std::collections::VecDeque;

/// Ring buffer of the robot's most recent scan viewpoints.
#[derive(Debug, Clone)]
pub struct ViewpointHistory {
    capacity: usize,
    entries: VecDeque<(u32, Point3)>,
}

impl ViewpointHistory {
    pub fn new(capacity: usize) -> Self {
        assert!(capacity >= 1);
        Self { capacity, entries: VecDeque::new() }
    }

    /// Records a viewpoint; the oldest entry drops once over capacity.
    pub fn push(&mut self, scan_index: u32, position: Point3) {
        if let Some(&(last, _)) = self.entries.back() {
            assert!(scan_index > last, "history must be pushed in time order");
        }
        self.entries.push_back((scan_index, position));
        while self.entries.len() > self.capacity {
            self.entries.pop_front();
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Scan index of the oldest retained viewpoint.
    pub fn oldest_scan(&self) -> Option<u32> {
        self.entries.front().map(|&(s, _)| s)
    }

    pub fn iter(&self) -> impl Iterator<Item = (u32, Point3)> + '_ {
        self.entries.iter().copied()
    }
}

/// Binary observability-to-unknown for the ground points of `area`.
///
/// `area` lists the cloud indices forming the local visibility cloud
/// (both labels; obstacles act as occluders). A ground point scores 1 iff it
/// is visible from at least one historical viewpoint and is newly observed
/// relative to the history window (first seen after the oldest retained
/// scan); the combination is `1 - prod(1 - theta)` gated by the window.
///
/// Returns `(ground index, rho)` pairs in ascending index order; an empty
/// history yields all zeros.
pub fn observability(
    cloud: &LabeledPointCloud,
    area: &[u32],
    history: &ViewpointHistory,
    alpha: f64,
) -> crate::Result<Vec<(u32, f64)>> {
    let ground: Vec<u32> = area
        .iter()
        .copied()
        .filter(|&i| cloud.label(i) == PointLabel::Ground)
        .collect();
    if history.is_empty() || ground.is_empty() {
        return Ok(ground.into_iter().map(|i| (i, 0.0)).collect());
    }
    let positions: Vec<Point3> = area.iter().map(|&i| cloud.point(i)).collect();
    let mut seen_any = vec![false; area.len()];
    for (_, vp) in history.iter() {
        let vis = visible_set(&positions, vp, alpha)?;
        for (slot, v) in vis.visible.iter().enumerate() {
            seen_any[slot] |= *v;
        }
    }
    let oldest = history.oldest_scan().unwrap();
    let mut slot_of = std::collections::HashMap::new();
    for (slot, &i) in area.iter().enumerate() {
        slot_of.insert(i, slot);
    }
    Ok(ground
        .into_iter()
        .map(|i| {
            let fresh = cloud.first_seen(i) > oldest;
            let vis = seen_any[slot_of[&i]];
            (i, if fresh && vis { 1.0 } else { 0.0 })
        })
        .collect())
}

/// Gaussian smoothing of a binary observability field over ground points.
///
/// `rho` pairs (point index, value) define both the field and its support;
/// each output is the Gaussian-weighted average of the field over neighbors
/// within `radius`. A point always neighbors itself, so locally constant
/// input passes through unchanged.
pub fn smooth_observability(
    cloud: &LabeledPointCloud,
    rho: &[(u32, f64)],
    radius: f64,
    sigma: f64,
) -> Vec<(u32, f64)> {
    assert!(radius > 0.0 && sigma > 0.0);
    if rho.is_empty() {
        return Vec::new();
    }
    let positions: Vec<Point3> = rho.iter().map(|&(i, _)| cloud.point(i)).collect();
    let index = SpatialIndex::build_with_cell(&positions, radius.max(0.25))
        .expect("non-empty by construction");
    let inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
    rho.iter()
        .enumerate()
        .map(|(slot, &(i, _))| {
            let p = positions[slot];
            let mut num = 0.0;
            let mut den = 0.0;
            for n in index.radius_indices(p, radius) {
                let w = (-p.dist_sq(positions[n as usize]) * inv_two_sigma_sq).exp();
                num += w * rho[n as usize].1;
                den += w;
            }
            (i, (num / den).clamp(0.0, 1.0))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cloud_with(points: &[(Point3, PointLabel, u32)]) -> LabeledPointCloud {
        let mut c = LabeledPointCloud::new();
        for &(p, l, t) in points {
            c.insert(p, l, t);
        }
        c
    }

    #[test]
    fn history_caps_at_k() {
        let mut h = ViewpointHistory::new(2);
        h.push(0, Point3::ZERO);
        h.push(1, Point3::new(1.0, 0.0, 0.0));
        h.push(2, Point3::new(2.0, 0.0, 0.0));
        assert_eq!(h.len(), 2);
        assert_eq!(h.oldest_scan(), Some(1));
    }

    #[test]
    fn empty_history_gives_zeros() {
        let c = cloud_with(&[(Point3::new(1.0, 0.0, 0.0), PointLabel::Ground, 0)]);
        let h = ViewpointHistory::new(2);
        let rho = observability(&c, &[0], &h, 1.0e4).unwrap();
        assert_eq!(rho, vec![(0, 0.0)]);
    }

    #[test]
    fn visible_and_fresh_scores_one() {
        // k=1 history at scan 0; the point first appears at scan 1.
        let c = cloud_with(&[(Point3::new(2.0, 0.0, 0.0), PointLabel::Ground, 1)]);
        let mut h = ViewpointHistory::new(1);
        h.push(0, Point3::ZERO);
        let rho = observability(&c, &[0], &h, 1.0e4).unwrap();
        assert_eq!(rho, vec![(0, 1.0)]);
    }

    #[test]
    fn stale_point_scores_zero_even_if_visible() {
        // First seen at scan 0, history oldest is scan 0: not newly observed.
        let c = cloud_with(&[(Point3::new(2.0, 0.0, 0.0), PointLabel::Ground, 0)]);
        let mut h = ViewpointHistory::new(1);
        h.push(0, Point3::ZERO);
        let rho = observability(&c, &[0], &h, 1.0e4).unwrap();
        assert_eq!(rho, vec![(0, 0.0)]);
    }

    #[test]
    fn occluded_point_scores_zero() {
        let c = cloud_with(&[
            (Point3::new(1.0, 0.0, 0.0), PointLabel::Obstacle, 1),
            (Point3::new(2.0, 0.0, 0.0), PointLabel::Ground, 1),
        ]);
        let mut h = ViewpointHistory::new(2);
        h.push(0, Point3::ZERO);
        let rho = observability(&c, &[0, 1], &h, 1.0e4).unwrap();
        assert_eq!(rho, vec![(1, 0.0)]);
    }

    #[test]
    fn one_of_two_viewpoints_suffices() {
        // Occluder blocks the ray from the first viewpoint only.
        let c = cloud_with(&[
            (Point3::new(1.0, 0.0, 0.0), PointLabel::Obstacle, 1),
            (Point3::new(2.0, 0.0, 0.0), PointLabel::Ground, 2),
        ]);
        let mut h = ViewpointHistory::new(2);
        h.push(0, Point3::ZERO);
        h.push(1, Point3::new(2.0, 5.0, 0.0));
        let rho = observability(&c, &[0, 1], &h, 1.0e4).unwrap();
        assert_eq!(rho, vec![(1, 1.0)]);
    }

    #[test]
    fn adding_history_never_clears_observability() {
        use rand::rngs::StdRng;
        use rand::{Rng, SeedableRng};
        let mut rng = StdRng::seed_from_u64(3);
        let pts: Vec<(Point3, PointLabel, u32)> = (0..60)
            .map(|_| {
                let p = Point3::new(
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(-5.0..5.0),
                    rng.gen_range(0.0..2.0),
                );
                let l = if rng.gen_bool(0.3) { PointLabel::Obstacle } else { PointLabel::Ground };
                (p, l, 5)
            })
            .collect();
        let c = cloud_with(&pts);
        let area: Vec<u32> = (0..60).collect();
        let mut h = ViewpointHistory::new(3);
        h.push(4, Point3::new(0.0, 0.0, 0.8));
        let before = observability(&c, &area, &h, 1.0e4).unwrap();
        h.push(5, Point3::new(1.0, 1.0, 0.8));
        let mut h2 = ViewpointHistory::new(3);
        h2.push(4, Point3::new(0.0, 0.0, 0.8));
        h2.push(5, Point3::new(1.0, 1.0, 0.8));
        let after = observability(&c, &area, &h2, 1.0e4).unwrap();
        for (b, a) in before.iter().zip(after.iter()) {
            assert!(a.1 >= b.1, "rho must be monotone in history");
        }
    }

    #[test]
    fn smoothing_preserves_constant_fields() {
        let mut pts = Vec::new();
        for i in 0..10 {
            for j in 0..10 {
                pts.push((
                    Point3::new(i as f64 * 0.5, j as f64 * 0.5, 0.0),
                    PointLabel::Ground,
                    0,
                ));
            }
        }
        let c = cloud_with(&pts);
        let ones: Vec<(u32, f64)> = (0..100).map(|i| (i, 1.0)).collect();
        let zeros: Vec<(u32, f64)> = (0..100).map(|i| (i, 0.0)).collect();
        for (got, want) in smooth_observability(&c, &ones, 2.0, 1.0).iter().zip(&ones) {
            assert!((got.1 - want.1).abs() < 1e-12);
        }
        for (got, want) in smooth_observability(&c, &zeros, 2.0, 1.0).iter().zip(&zeros) {
            assert!((got.1 - want.1).abs() < 1e-12);
        }
    }

    #[test]
    fn interface_blends_strictly_between() {
        // Half-plane of ones against half-plane of zeros.
        let mut pts = Vec::new();
        let mut rho = Vec::new();
        let mut idx = 0u32;
        for i in 0..20 {
            for j in 0..10 {
                pts.push((
                    Point3::new(i as f64 * 0.5, j as f64 * 0.5, 0.0),
                    PointLabel::Ground,
                    0,
                ));
                rho.push((idx, if i < 10 { 1.0 } else { 0.0 }));
                idx += 1;
            }
        }
        let c = cloud_with(&pts);
        let sm = smooth_observability(&c, &rho, 2.0, 1.0);
        // A point right at the interface mixes both sides.
        let at_interface = sm
            .iter()
            .find(|&&(i, _)| {
                let p = c.point(i);
                (p.x - 5.0).abs() < 0.3 && (p.y - 2.5).abs() < 0.3
            })
            .unwrap();
        assert!(at_interface.1 > 0.0 && at_interface.1 < 1.0);
        // Everything stays in range.
        for &(_, v) in &sm {
            assert!((0.0..=1.0).contains(&v));
        }
    }
}
