use crate::geom::{LabeledPointCloud, PathPolyline, Point3, PointGraph, PointLabel};
use crate::planner::GroundRouter;
use std::collections::HashMap;

/// Traversability state of one XY grid cell.
#[derive(Debug, Clone, Copy, Default)]
struct NavCell {
    has_ground: bool,
    clear: bool,
}

/// Incremental ground navigation graph over scanned points.
///
/// A cell becomes a node once scanned ground lands in it and its center
/// keeps `clearance` (plus a discretization margin) from every known
/// obstacle point. Nodes connect 8-way; diagonals require both orthogonal
/// neighbors so paths cannot cut wall corners.
#[derive(Debug)]
pub struct NavGrid {
    cell: f64,
    /// Required XY distance from cell centers to known obstacle points.
    clearance_needed: f64,
    cells: HashMap<(i32, i32), NavCell>,
    graph: Option<(PointGraph, HashMap<(i32, i32), u32>)>,
}

/// Extra clearance demanded at cell centers so that interpolated path
/// points (up to half a cell diagonal away) still meet the raw clearance.
const CENTER_MARGIN: f64 = 0.4;

impl NavGrid {
    pub fn new(cell: f64, clearance: f64) -> Self {
        assert!(cell > 0.0 && clearance > 0.0);
        Self {
            cell,
            clearance_needed: clearance + CENTER_MARGIN,
            cells: HashMap::new(),
            graph: None,
        }
    }

    fn key(&self, x: f64, y: f64) -> (i32, i32) {
        ((x / self.cell).floor() as i32, (y / self.cell).floor() as i32)
    }

    fn center(&self, k: (i32, i32)) -> Point3 {
        Point3::new(
            (k.0 as f64 + 0.5) * self.cell,
            (k.1 as f64 + 0.5) * self.cell,
            0.0,
        )
    }

    fn center_clear(&self, k: (i32, i32), cloud: &LabeledPointCloud) -> bool {
        let c = self.center(k);
        cloud
            .radius_indices_xy(c, self.clearance_needed, Some(PointLabel::Obstacle))
            .is_empty()
    }

    /// Registers newly integrated points; ground points open cells, obstacle
    /// points re-check clearance in their surroundings.
    pub fn integrate_points(&mut self, cloud: &LabeledPointCloud, added: &[u32]) {
        let mut changed = false;
        for &i in added {
            let p = cloud.point(i);
            match cloud.label(i) {
                PointLabel::Ground => {
                    let k = self.key(p.x, p.y);
                    if !self.cells.get(&k).map_or(false, |c| c.has_ground) {
                        let clear = self.center_clear(k, cloud);
                        let entry = self.cells.entry(k).or_default();
                        entry.has_ground = true;
                        entry.clear = clear;
                        changed = true;
                    }
                }
                PointLabel::Obstacle => {
                    let reach = self.clearance_needed + self.cell;
                    let k0 = self.key(p.x - reach, p.y - reach);
                    let k1 = self.key(p.x + reach, p.y + reach);
                    for kx in k0.0..=k1.0 {
                        for ky in k0.1..=k1.1 {
                            if let Some(cell) = self.cells.get(&(kx, ky)) {
                                if cell.clear
                                    && self.center((kx, ky)).dist_xy(p)
                                        < self.clearance_needed
                                {
                                    self.cells.get_mut(&(kx, ky)).unwrap().clear = false;
                                    changed = true;
                                }
                            }
                        }
                    }
                }
            }
        }
        if changed {
            self.graph = None;
        }
    }

    /// Number of walkable cells currently known.
    pub fn walkable_count(&self) -> usize {
        self.cells.values().filter(|c| c.has_ground && c.clear).count()
    }

    fn ensure_graph(&mut self) -> &(PointGraph, HashMap<(i32, i32), u32>) {
        if self.graph.is_none() {
            let mut keys: Vec<(i32, i32)> = self
                .cells
                .iter()
                .filter(|(_, c)| c.has_ground && c.clear)
                .map(|(&k, _)| k)
                .collect();
            keys.sort_unstable();
            let mut graph = PointGraph::new();
            let mut ids = HashMap::new();
            for &k in &keys {
                let id = graph.add_node(self.center(k));
                ids.insert(k, id);
            }
            let ortho = [(1, 0), (0, 1)];
            let diag = [(1, 1), (1, -1)];
            for &k in &keys {
                let a = ids[&k];
                for (dx, dy) in ortho {
                    if let Some(&b) = ids.get(&(k.0 + dx, k.1 + dy)) {
                        graph.add_edge(a, b, self.cell);
                    }
                }
                for (dx, dy) in diag {
                    let corner_a = ids.contains_key(&(k.0 + dx, k.1));
                    let corner_b = ids.contains_key(&(k.0, k.1 + dy));
                    if corner_a && corner_b {
                        if let Some(&b) = ids.get(&(k.0 + dx, k.1 + dy)) {
                            graph.add_edge(a, b, self.cell * std::f64::consts::SQRT_2);
                        }
                    }
                }
            }
            self.graph = Some((graph, ids));
        }
        self.graph.as_ref().unwrap()
    }

    /// Walkable node centers within an XY radius, in deterministic (cell
    /// key) order.
    pub fn walkable_nodes_within(&mut self, center: Point3, radius: f64) -> Vec<Point3> {
        let r_cells = (radius / self.cell).ceil() as i32 + 1;
        let k = self.key(center.x, center.y);
        let mut keys: Vec<(i32, i32)> = Vec::new();
        for dx in -r_cells..=r_cells {
            for dy in -r_cells..=r_cells {
                let kk = (k.0 + dx, k.1 + dy);
                if let Some(c) = self.cells.get(&kk) {
                    if c.has_ground && c.clear && self.center(kk).dist_xy(center) <= radius {
                        keys.push(kk);
                    }
                }
            }
        }
        keys.sort_unstable();
        keys.into_iter().map(|k| self.center(k)).collect()
    }

    /// Nearest walkable node to a position, within a snap radius.
    fn snap(&mut self, p: Point3) -> Option<(u32, f64)> {
        let snap_cells = 3i32;
        let k = self.key(p.x, p.y);
        let (graph, ids) = self.ensure_graph();
        let mut best: Option<(u32, f64)> = None;
        for dx in -snap_cells..=snap_cells {
            for dy in -snap_cells..=snap_cells {
                if let Some(&id) = ids.get(&(k.0 + dx, k.1 + dy)) {
                    let d = graph.position(id).dist_xy(p);
                    match best {
                        Some((_, bd)) if d >= bd => {}
                        _ => best = Some((id, d)),
                    }
                }
            }
        }
        best
    }
}

impl GroundRouter for NavGrid {
    fn path(&mut self, from: Point3, to: Point3) -> Option<PathPolyline> {
        let (a, _) = self.snap(from)?;
        let (b, _) = self.snap(to)?;
        let (graph, _) = self.ensure_graph();
        let mut points = vec![from];
        if a == b {
            points.push(graph.position(a));
        } else {
            let (_, nodes) = graph.dijkstra_path(a, b)?;
            points.extend(nodes.into_iter().map(|n| graph.position(n)));
        }
        points.push(to);
        Some(PathPolyline::from_points(points))
    }

    fn distances(&mut self, from: Point3, to: &[Point3]) -> Vec<Option<f64>> {
        let Some((a, da)) = self.snap(from) else {
            return vec![None; to.len()];
        };
        let snapped: Vec<Option<(u32, f64)>> = to.iter().map(|&p| self.snap(p)).collect();
        let (graph, _) = self.ensure_graph();
        let dist = graph.dijkstra_all(a);
        snapped
            .into_iter()
            .map(|s| {
                s.and_then(|(b, db)| {
                    let d = dist[b as usize];
                    d.is_finite().then_some(da + d + db)
                })
            })
            .collect()
    }
}
