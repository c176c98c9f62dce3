use crate::geom::{LabeledPointCloud, Point3, PointLabel};
use serde::{Deserialize, Serialize};
use std::path::Path;

/// An extruded polygonal obstacle standing on the ground plane.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Obstacle {
    /// Footprint vertices (x, y), counter-clockwise or clockwise.
    pub polygon: Vec<[f64; 2]>,
    /// Extrusion height in meters.
    pub height: f64,
}

/// Start pose on the ground plane.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StartPose {
    pub x: f64,
    pub y: f64,
    #[serde(default)]
    pub heading: f64,
}

/// Synthetic outdoor world: a planar polygonal ground region at z = 0 plus
/// extruded obstacles. The ground-truth walkable area (ground minus
/// obstacle footprints) is computable in closed form for coverage metrics.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Scene {
    pub name: String,
    /// Ground polygon vertices (x, y).
    pub ground: Vec<[f64; 2]>,
    #[serde(default)]
    pub obstacles: Vec<Obstacle>,
    pub start: StartPose,
    /// Named parameter overrides applied on top of the defaults.
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub params: serde_json::Map<String, serde_json::Value>,
    #[serde(skip)]
    walls: Vec<WallEdge>,
}

/// One extruded wall segment, precomputed for ray casting.
#[derive(Debug, Clone, Copy)]
struct WallEdge {
    ax: f64,
    ay: f64,
    dx: f64,
    dy: f64,
    height: f64,

}

impl Scene {
    pub fn new(
        name: impl Into<String>,
        ground: Vec<[f64; 2]>,
        obstacles: Vec<Obstacle>,
        start: StartPose,
    ) -> crate::Result<Self> {
        let mut scene = Scene {
            name: name.into(),
            ground,
            obstacles,
            start,
            params: Default::default(),
            walls: Vec::new(),
        };
        scene.finalize()?;
        Ok(scene)
    }

    pub fn from_json(text: &str) -> crate::Result<Self> {
        let mut scene: Scene = serde_json::from_str(text)?;
        scene.finalize()?;
        Ok(scene)
    }

    pub fn load(path: &Path) -> crate::Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    /// Validates geometry and precomputes wall edges.
    pub fn finalize(&mut self) -> crate::Result<()> {
        if self.ground.len() < 3 {
            return Err(crate::Error::Scene("ground polygon needs 3+ vertices".into()));
        }
        for ob in &self.obstacles {
            if ob.polygon.len() < 3 {
                return Err(crate::Error::Scene("obstacle polygon needs 3+ vertices".into()));
            }
            if ob.height <= 0.0 {
                return Err(crate::Error::Scene("obstacle height must be positive".into()));
            }
        }
        self.walls.clear();
        for (oi, ob) in self.obstacles.iter().enumerate() {
            let n = ob.polygon.len();
            for i in 0..n {
                let a = ob.polygon[i];
                let b = ob.polygon[(i + 1) % n];
                self.walls.push(WallEdge {
                    ax: a[0],
                    ay: a[1],
                    dx: b[0] - a[0],
                    dy: b[1] - a[1],
                    height: ob.height,
                    obstacle: oi as u32,
                });
            }
        }
        if !self.walkable(self.start.x, self.start.y) {
            return Err(crate::Error::Scene("start pose is not on walkable ground".into()));
        }
        Ok(())
    }

    pub fn start_position(&self) -> Point3 {
        Point3::new(self.start.x, self.start.y, 0.0)
    }

    /// Axis-aligned bounds of the ground polygon.
    pub fn bounds(&self) -> (f64, f64, f64, f64) {
        let mut b = (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.ground {
            b.0 = b.0.min(v[0]);
            b.1 = b.1.min(v[1]);
            b.2 = b.2.max(v[0]);
            b.3 = b.3.max(v[1]);
        }
        b
    }

    pub fn in_ground(&self, x: f64, y: f64) -> bool {
        point_in_polygon(x, y, &self.ground)
    }

    pub fn in_footprint(&self, x: f64, y: f64) -> bool {
        self.obstacles
            .iter()
            .any(|ob| point_in_polygon(x, y, &ob.polygon))
    }

    /// On the ground and outside every obstacle footprint.
    pub fn walkable(&self, x: f64, y: f64) -> bool {
        self.in_ground(x, y) && !self.in_footprint(x, y)
    }

    /// True (footprint) clearance: XY distance to the nearest obstacle
    /// footprint boundary, 0 inside one. Infinite without obstacles.
    pub fn truth_clearance(&self, x: f64, y: f64) -> f64 {
        if self.in_footprint(x, y) {
            return 0.0;
        }
        let mut best = f64::INFINITY;
        for w in &self.walls {
            best = best.min(point_segment_dist(x, y, w));
        }
        best
    }

    /// Nearest surface hit of a ray within `max_range`: ground plane,
    /// obstacle walls, or obstacle tops.
    pub fn cast_ray(
        &self,
        origin: Point3,
        dir: Point3,
        max_range: f64,
    ) -> Option<(f64, Point3, PointLabel)> {
        let mut best: Option<(f64, Point3, PointLabel)> = None;
        // Ground plane z = 0.
        if dir.z < -1e-12 {
            let t = -origin.z / dir.z;
            if t > 1e-9 && t <= max_range {
                let p = origin + dir * t;
                if self.in_ground(p.x, p.y) && !self.in_footprint(p.x, p.y) {
                    best = Some((t, p, PointLabel::Ground));
                }
            }
        }
        // Obstacle walls.
        for w in &self.walls {
            // Solve origin.xy + t*dir.xy == a + s*e in 2D.
            let det = dir.x * (-w.dy) - dir.y * (-w.dx);
            if det.abs() < 1e-15 {
                continue;
            }
            let rx = w.ax - origin.x;
            let ry = w.ay - origin.y;
            let t = (rx * (-w.dy) - ry * (-w.dx)) / det;
            let s = (dir.x * ry - dir.y * rx) / det;
            if t <= 1e-9 || t > max_range || !(0.0..=1.0).contains(&s) {
                continue;
            }
            let z = origin.z + t * dir.z;
            if z < -1e-9 || z > w.height {
                continue;
            }
            if best.map_or(true, |(bt, _, _)| t < bt) {
                best = Some((t, origin + dir * t, PointLabel::Obstacle));
            }
        }
        // Obstacle tops.
        if dir.z.abs() > 1e-12 {
            for ob in &self.obstacles {
                let t = (ob.height - origin.z) / dir.z;
                if t <= 1e-9 || t > max_range {
                    continue;
                }
                let p = origin + dir * t;
                if point_in_polygon(p.x, p.y, &ob.polygon)
                    && best.map_or(true, |(bt, _, _)| t < bt)
                {
                    best = Some((t, p, PointLabel::Obstacle));
                }
            }
        }
        best
    }

    /// Raster of the walkable area: cells (at `cell` size, anchored at the
    /// origin) whose centers are walkable.
    pub fn walkable_cells(&self, cell: f64) -> std::collections::HashSet<(i32, i32)> {
        let (x0, y0, x1, y1) = self.bounds();
        let mut out = std::collections::HashSet::new();
        let ci0 = (x0 / cell).floor() as i32;
        let ci1 = (x1 / cell).ceil() as i32;
        let cj0 = (y0 / cell).floor() as i32;
        let cj1 = (y1 / cell).ceil() as i32;
        for i in ci0..=ci1 {
            for j in cj0..=cj1 {
                let cx = (i as f64 + 0.5) * cell;
                let cy = (j as f64 + 0.5) * cell;
                if self.walkable(cx, cy) {
                    out.insert((i, j));
                }
            }
        }
        out
    }

    /// Walkable area estimate from the raster, in square meters.
    pub fn walkable_area(&self, cell: f64) -> f64 {
        self.walkable_cells(cell).len() as f64 * cell * cell
    }
}

/// Even-odd point-in-polygon test.
pub(crate) fn point_in_polygon(x: f64, y: f64, poly: &[[f64; 2]]) -> bool {
    let mut inside = false;
    let n = poly.len();
    let mut j = n - 1;
    for i in 0..n {
        let (xi, yi) = (poly[i][0], poly[i][1]);
        let (xj, yj) = (poly[j][0], poly[j][1]);
        if ((yi > y) != (yj > y)) && (x < (xj - xi) * (y - yi) / (yj - yi) + xi) {
            inside = !inside;
        }
        j = i;
    }
    inside
}

fn point_segment_dist(x: f64, y: f64, w: &WallEdge) -> f64 {
    let len_sq = w.dx * w.dx + w.dy * w.dy;
    let t = if len_sq <= 1e-18 {
        0.0
    } else {
        (((x - w.ax) * w.dx + (y - w.ay) * w.dy) / len_sq).clamp(0.0, 1.0)
    };
    let px = w.ax + t * w.dx;
    let py = w.ay + t * w.dy;
    ((x - px) * (x - px) + (y - py) * (y - py)).sqrt()
}

/// Appends a labeled scan batch to the cloud with duplicate suppression:
/// a new point within `merge_radius` of an existing live same-label point
/// merges away (the earliest observation wins). Returns the indices of the
/// points that were actually added.
pub fn integrate_scan(
    cloud: &mut LabeledPointCloud,
    batch: &super::ScanBatch,
    scan_index: u32,
    merge_radius: f64,
) -> Vec<u32> {
    let mut added = Vec::new();
    for &(p, label) in &batch.points {
        if let Some(idx) = cloud.insert_merged(p, label, scan_index, merge_radius) {
            added.push(idx);
        }
    }
    added
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn box_scene() -> Scene {
        let mut scene = Scene {
            name: "box".into(),
            ground: vec![[0.0, 0.0], [40.0, 0.0], [40.0, 30.0], [0.0, 30.0]],
            obstacles: vec![
                // A pillar in the middle.
                Obstacle {
                    polygon: vec![[18.0, 13.0], [22.0, 13.0], [22.0, 17.0], [18.0, 17.0]],
                    height: 3.0,
                },
            ],
            start: StartPose { x: 5.0, y: 5.0, heading: 0.0 },
            params: Default::default(),
            walls: Vec::new(),
        };
        scene.finalize().unwrap();
        scene
    }

    #[test]
    fn walkability_and_clearance() {
        let s = box_scene();
        assert!(s.walkable(5.0, 5.0));
        assert!(!s.walkable(20.0, 15.0)); // inside the pillar
        assert!(!s.walkable(-1.0, 5.0)); // off the ground
        assert_eq!(s.truth_clearance(20.0, 15.0), 0.0);
        assert!((s.truth_clearance(16.0, 15.0) - 2.0).abs() < 1e-9);
    }

    #[test]
    fn ray_hits_ground_at_the_expected_circle() {
        let s = box_scene();
        let origin = Point3::new(5.0, 5.0, 0.8);
        // 45 degrees downward: ground hit at horizontal distance 0.8.
        let dir = Point3::new(1.0, 0.0, -1.0).normalized().unwrap();
        let (t, p, label) = s.cast_ray(origin, dir, 50.0).unwrap();
        assert_eq!(label, PointLabel::Ground);
        assert!(p.z.abs() < 1e-9);
        assert!((p.x - 5.8).abs() < 1e-9);
        assert!((t - 0.8 * std::f64::consts::SQRT_2).abs() < 1e-9);
    }

    #[test]
    fn ray_hits_wall_before_ground_behind_it() {
        let s = box_scene();
        let origin = Point3::new(5.0, 15.0, 0.8);
        let dir = Point3::new(1.0, 0.0, -0.01).normalized().unwrap();
        let (_, p, label) = s.cast_ray(origin, dir, 50.0).unwrap();
        assert_eq!(label, PointLabel::Obstacle);
        assert!((p.x - 18.0).abs() < 1e-6, "hit the near pillar face: {p:?}");
    }

    #[test]
    fn ray_misses_everything_off_the_edge() {
        let s = box_scene();
        let origin = Point3::new(5.0, 5.0, 0.8);
        let dir = Point3::new(-1.0, 0.0, -0.005).normalized().unwrap();
        // Downward ray pointing off the ground polygon at a shallow angle:
        // the hit lands outside the ground and beyond range.
        assert!(s.cast_ray(origin, dir, 50.0).is_none());
    }

    #[test]
    fn scene_json_round_trip() {
        let s = box_scene();
        let text = serde_json::to_string(&s).unwrap();
        let back = Scene::from_json(&text).unwrap();
        assert_eq!(back.name, "box");
        assert_eq!(back.obstacles.len(), 1);
        assert!(back.walkable(5.0, 5.0));
    }

    #[test]
    fn bad_scenes_are_rejected() {
        assert!(Scene::from_json(r#"{"name":"x","ground":[[0,0],[1,0]],"start":{"x":0,"y":0}}"#).is_err());
        // Start inside an obstacle.
        let text = r#"{
            "name": "x",
            "ground": [[0,0],[10,0],[10,10],[0,10]],
            "obstacles": [{"polygon": [[4,4],[6,4],[6,6],[4,6]], "height": 2.0}],
            "start": {"x": 5.0, "y": 5.0}
        }"#;
        assert!(Scene::from_json(text).is_err());
    }

    #[test]
    fn walkable_area_subtracts_footprints() {
        let s = box_scene();
        let area = s.walkable_area(0.5);
        // 40x30 minus the 4x4 pillar = 1184, within raster tolerance.
        assert!((area - 1184.0).abs() < 30.0, "area {area}");
    }
}
