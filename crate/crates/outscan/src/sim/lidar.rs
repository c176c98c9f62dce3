use super::Scene;
use crate::config::LidarParams;
use crate::geom::{Point3, PointLabel};
use rand::Rng;
use rand_distr::{Distribution, Normal};

/// One 360° scan: labeled surface points in fixed (ring-major, azimuth)
/// order, so identical seeds reproduce identical batches bit for bit.
#[derive(Debug, Clone, Default)]
pub struct ScanBatch {
    pub points: Vec<(Point3, PointLabel)>,
}

impl ScanBatch {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Simulates a full round scan from `robot_position` (sensor mounted
/// `lidar.sensor_height` above it). Each (ring, azimuth) ray reports its
/// nearest surface intersection within range, with Gaussian range noise
/// added along the ray; rays that miss produce no point.
pub fn simulate_scan(
    scene: &Scene,
    robot_position: Point3,
    lidar: &LidarParams,
    rng: &mut impl Rng,
) -> ScanBatch {
    let origin = robot_position + Point3::new(0.0, 0.0, lidar.sensor_height);
    let noise = if lidar.noise_sigma > 0.0 {
        Some(Normal::new(0.0, lidar.noise_sigma).expect("sigma is finite and positive"))
    } else {
        None
    };
    let azimuth_steps = (360.0 / lidar.azimuth_step_deg).round() as usize;
    let mut batch = ScanBatch::default();
    batch.points.reserve(lidar.rings * azimuth_steps / 2);
    for ring in 0..lidar.rings {
        let elev_deg = if lidar.rings == 1 {
            lidar.elevation_min_deg
        } else {
            lidar.elevation_min_deg
                + (lidar.elevation_max_deg - lidar.elevation_min_deg) * ring as f64
                    / (lidar.rings - 1) as f64
        };
        let elev = elev_deg.to_radians();
        let (sin_e, cos_e) = elev.sin_cos();
        for az_step in 0..azimuth_steps {
            let az = (az_step as f64 * lidar.azimuth_step_deg).to_radians();
            let dir = Point3::new(cos_e * az.cos(), cos_e * az.sin(), sin_e);
            if let Some((t, _, label)) = scene.cast_ray(origin, dir, lidar.max_range) {
                let range = match &noise {
                    Some(n) => t + n.sample(rng),
                    None => t,
                };
                batch.points.push((origin + dir * range, label));
            }
        }
    }
    batch
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::scene::Scene;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn huge_plane() -> Scene {
        Scene::new(
            "plane",
            vec![[-500.0, -500.0], [500.0, -500.0], [500.0, 500.0], [-500.0, 500.0]],
            vec![],
            crate::sim::StartPose { x: 0.0, y: 0.0, heading: 0.0 },
        )
        .unwrap()
    }

    fn quiet_lidar() -> LidarParams {
        LidarParams { noise_sigma: 0.0, ..LidarParams::default() }
    }

    #[test]
    fn ground_rings_form_the_analytic_circles() {
        let scene = huge_plane();
        let lidar = quiet_lidar();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let batch = simulate_scan(&scene, Point3::ZERO, &lidar, &mut rng);
        assert!(!batch.is_empty());
        // Collect per-ring radii: every downward ring hits the plane at
        // h / tan(|elev|) when within range.
        let h = lidar.sensor_height;
        let mut seen_radii: Vec<f64> = batch
            .points
            .iter()
            .map(|(p, _)| (p.x * p.x + p.y * p.y).sqrt())
            .collect();
        seen_radii.sort_by(|a, b| a.partial_cmp(b).unwrap());
        seen_radii.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        for r in &seen_radii {
            // Some ring's analytic circle must match this radius.
            let matched = (0..lidar.rings).any(|ring| {
                let e = (lidar.elevation_min_deg
                    + 30.0 * ring as f64 / (lidar.rings - 1) as f64)
                    .to_radians();
                e < 0.0 && {
                    let expect = h / e.abs().tan();
                    (expect - r).abs() < 1e-6
                }
            });
            assert!(matched, "unexpected ring radius {r}");
        }
        // All points exactly on the surface without noise.
        for (p, label) in &batch.points {
            assert_eq!(*label, PointLabel::Ground);
            assert!(p.z.abs() < 1e-9);
        }
    }

    #[test]
    fn wall_points_appear_only_on_the_facing_side() {
        let mut s = huge_plane();
        s.obstacles.push(crate::sim::Obstacle {
            polygon: vec![[5.0, -400.0], [6.0, -400.0], [6.0, 400.0], [5.0, 400.0]],
            height: 3.0,
        });
        s.finalize().unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let batch = simulate_scan(&s, Point3::ZERO, &quiet_lidar(), &mut rng);
        let wall_points: Vec<&Point3> = batch
            .points
            .iter()
            .filter(|(_, l)| *l == PointLabel::Obstacle)
            .map(|(p, _)| p)
            .collect();
        assert!(!wall_points.is_empty());
        for p in wall_points {
            assert!((p.x - 5.0).abs() < 1e-6, "only the facing wall plane: {p:?}");
        }
        // No ground points behind the wall at wall-shadowed heights.
        for (p, l) in &batch.points {
            if *l == PointLabel::Ground {
                assert!(p.x < 5.0 + 1e-9, "ground behind the wall is occluded: {p:?}");
            }
        }
    }

    #[test]
    fn same_seed_is_bit_identical() {
        let scene = huge_plane();
        let lidar = LidarParams::default(); // with noise
        let a = simulate_scan(&scene, Point3::ZERO, &lidar, &mut ChaCha8Rng::seed_from_u64(7));
        let b = simulate_scan(&scene, Point3::ZERO, &lidar, &mut ChaCha8Rng::seed_from_u64(7));
        assert_eq!(a.len(), b.len());
        for ((pa, la), (pb, lb)) in a.points.iter().zip(&b.points) {
            assert_eq!(la, lb);
            assert_eq!(pa.x.to_bits(), pb.x.to_bits());
            assert_eq!(pa.y.to_bits(), pb.y.to_bits());
            assert_eq!(pa.z.to_bits(), pb.z.to_bits());
        }
    }

    #[test]
    fn noisy_points_stay_near_the_surface() {
        let scene = huge_plane();
        let lidar = LidarParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let batch = simulate_scan(&scene, Point3::ZERO, &lidar, &mut rng);
        for (p, _) in &batch.points {
            // Range noise along the ray: vertical offset bounded by 4 sigma
            // (|sin elev| <= 1).
            assert!(p.z.abs() <= 4.0 * lidar.noise_sigma + 1e-9, "{p:?}");
        }
    }
}
