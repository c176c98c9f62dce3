//! Evaluation harness: coverage metrics, baseline policies, and comparison
//! tables over (policy, seed) grids.

use crate::config::Params;
use crate::geom::{LabeledPointCloud, PointLabel};
use crate::io::fmt_f64;
use crate::sim::{run_episode, EpisodeConfig, EpisodeResult, Policy, Scene};

/// Coverage / quality / smoothness summary of one episode.
#[derive(Debug, Clone)]
pub struct MetricsReport {
    /// (meters traveled, IoU) samples, one per scan.
    pub coverage_curve: Vec<(f64, f64)>,
    pub final_iou: f64,
    pub total_travel: f64,
    pub accumulated_curvature: f64,
    /// Wall-clock seconds per planning step (not part of CSV reports, which
    /// must be byte-reproducible).
    pub per_step_seconds: Vec<f64>,
}

impl MetricsReport {
    pub fn from_episode(ep: &EpisodeResult) -> Self {
        Self {
            coverage_curve: ep.coverage_curve.clone(),
            final_iou: ep.final_iou,
            total_travel: ep.total_travel,
            accumulated_curvature: ep.accumulated_curvature,
            per_step_seconds: ep.step_seconds.clone(),
        }
    }

    /// Summary CSV (single row + header), deterministic bytes.
    pub fn summary_csv(&self) -> String {
        format!(
            "final_iou,total_travel_m,accumulated_curvature_rad,scans\n{},{},{},{}\n",
            fmt_f64(self.final_iou),
            fmt_f64(self.total_travel),
            fmt_f64(self.accumulated_curvature),
            self.coverage_curve.len()
        )
    }
}

/// Intersection-over-union between the rasterized scanned ground points and
/// the scene's ground-truth walkable mask at the given cell size.
pub fn coverage_iou(cloud: &LabeledPointCloud, scene: &Scene, cell: f64) -> f64 {
    assert!(cell > 0.0);
    let truth = scene.walkable_cells(cell);
    let mut scanned = std::collections::HashSet::new();
    for i in cloud.iter_label(PointLabel::Ground) {
        let p = cloud.point(i);
        scanned.insert(((p.x / cell).floor() as i32, (p.y / cell).floor() as i32));
    }
    if scanned.is_empty() {
        return 0.0;
    }
    let inter = scanned.iter().filter(|c| truth.contains(c)).count();
    let union = truth.len() + scanned.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Runs one policy on a scene and reports its metrics.
pub fn run_baseline(
    scene: Scene,
    policy: Policy,
    seed: u64,
    params: Params,
) -> crate::Result<(MetricsReport, EpisodeResult)> {
    let result = run_episode(scene, EpisodeConfig::new(params, seed, policy))?;
    Ok((MetricsReport::from_episode(&result), result))
}

/// One row of a comparison table.
#[derive(Debug, Clone)]
pub struct CompareRow {
    pub policy: &'static str,
    pub seed: u64,
    pub final_iou: f64,
    pub total_travel: f64,
    pub travel_to_80: Option<f64>,
    pub curvature: f64,
    pub scans: u32,
}

/// Runs every (policy, seed) combination and tabulates the results.
pub fn compare(
    scene: &Scene,
    policies: &[Policy],
    seeds: &[u64],
    params: &Params,
) -> crate::Result<Vec<CompareRow>> {
    let mut rows = Vec::new();
    for &policy in policies {
        for &seed in seeds {
            let (metrics, ep) =
                run_baseline(scene.clone(), policy, seed, params.clone())?;
            rows.push(CompareRow {
                policy: policy.name(),
                seed,
                final_iou: metrics.final_iou,
                total_travel: metrics.total_travel,
                travel_to_80: ep.travel_to_reach(0.8),
                curvature: metrics.accumulated_curvature,
                scans: ep.scan_count,
            });
        }
    }
    Ok(rows)
}

/// Comparison table as CSV, one row per (policy, seed).
pub fn compare_csv(rows: &[CompareRow]) -> String {
    let mut out =
        String::from("policy,seed,final_iou,total_travel_m,travel_to_80_m,curvature_rad,scans\n");
    for r in rows {
        out.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            r.policy,
            r.seed,
            fmt_f64(r.final_iou),
            fmt_f64(r.total_travel),
            r.travel_to_80
                .map(fmt_f64)
                .unwrap_or_else(|| "unreached".into()),
            fmt_f64(r.curvature),
            r.scans
        ));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Point3;
    use crate::sim::StartPose;

    fn square_scene() -> Scene {
        Scene::new(
            "square",
            vec![[0.0, 0.0], [20.0, 0.0], [20.0, 20.0], [0.0, 20.0]],
            vec![],
            StartPose { x: 10.0, y: 10.0, heading: 0.0 },
        )
        .unwrap()
    }

    #[test]
    fn full_cover_is_one_empty_is_zero() {
        let scene = square_scene();
        let cell = 0.5;
        let mut cloud = LabeledPointCloud::new();
        assert_eq!(coverage_iou(&cloud, &scene, cell), 0.0);
        // Drop one ground point in each walkable cell.
        for (i, j) in scene.walkable_cells(cell) {
            cloud.insert(
                Point3::new((i as f64 + 0.5) * cell, (j as f64 + 0.5) * cell, 0.0),
                PointLabel::Ground,
                0,
            );
        }
        assert!((coverage_iou(&cloud, &scene, cell) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn half_cover_is_about_half() {
        let scene = square_scene();
        let cell = 0.5;
        let mut cloud = LabeledPointCloud::new();
        for (i, j) in scene.walkable_cells(cell) {
            let x = (i as f64 + 0.5) * cell;
            if x < 10.0 {
                cloud.insert(
                    Point3::new(x, (j as f64 + 0.5) * cell, 0.0),
                    PointLabel::Ground,
                    0,
                );
            }
        }
        let iou = coverage_iou(&cloud, &scene, cell);
        assert!((iou - 0.5).abs() < 0.05, "iou {iou}");
    }

    #[test]
    fn obstacle_points_do_not_count_as_coverage() {
        let scene = square_scene();
        let mut cloud = LabeledPointCloud::new();
        cloud.insert(Point3::new(5.0, 5.0, 1.0), PointLabel::Obstacle, 0);
        assert_eq!(coverage_iou(&cloud, &scene, 0.5), 0.0);
    }
}
