use super::grid::{cell_range, key};
use super::Point3;
use std::collections::HashMap;

/// Semantic label of a scanned point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointLabel {
    Ground,
    Obstacle,
}

impl PointLabel {
    pub fn as_int(self) -> u8 {
        match self {
            PointLabel::Ground => 0,
            PointLabel::Obstacle => 1,
        }
    }

    pub fn from_int(v: i64) -> Option<Self> {
        match v {
            0 => Some(PointLabel::Ground),
            1 => Some(PointLabel::Obstacle),
            _ => None,
        }
    }
}

/// Planning attributes carried per point.
///
/// `phi` is the stored explorability (minimum over all observations; starts
/// unset). `rho_smooth` and `tau` hold the latest field evaluation. `dim` is
/// the local fractal dimension, NaN while unset.
#[derive(Debug, Clone, Copy)]
pub struct PointAttrs {
    pub phi: f64,
    pub rho_smooth: f64,
    pub tau: f64,
    pub dim: f64,
}

impl Default for PointAttrs {
    fn default() -> Self {
        Self { phi: f64::INFINITY, rho_smooth: 0.0, tau: 0.0, dim: f64::NAN }
    }
}

impl PointAttrs {
    pub fn phi_is_set(&self) -> bool {
        self.phi.is_finite()
    }

    pub fn dim_is_set(&self) -> bool {
        !self.dim.is_nan()
    }
}

/// Accumulated scan points with labels, per-point planning attributes, and
/// first-seen scan indices.
///
/// Point slots are stable: removal tombstones a slot instead of shifting
/// indices, so attribute histories stay attached to the same point identity.
/// An internal 1 m hash grid serves merge and neighborhood queries.
#[derive(Debug, Clone)]
pub struct LabeledPointCloud {
    points: Vec<Point3>,
    labels: Vec<PointLabel>,
    attrs: Vec<PointAttrs>,
    first_seen: Vec<u32>,
    alive: Vec<bool>,
    alive_count: usize,
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
    zkey_lo: i64,
    zkey_hi: i64,
}

const CELL: f64 = 1.0;

impl Default for LabeledPointCloud {
    fn default() -> Self {
        Self {
            points: Vec::new(),
            labels: Vec::new(),
            attrs: Vec::new(),
            first_seen: Vec::new(),
            alive: Vec::new(),
            alive_count: 0,
            cells: HashMap::new(),
            zkey_lo: 0,
            zkey_hi: 0,
        }
    }
}

impl LabeledPointCloud {
    pub fn new() -> Self {
        Self::default()
    }

    /// Total slots including tombstones.
    pub fn slots(&self) -> usize {
        self.points.len()
    }

    /// Number of live points.
    pub fn len(&self) -> usize {
        self.alive_count
    }

    pub fn is_empty(&self) -> bool {
        self.alive_count == 0
    }

    pub fn point(&self, i: u32) -> Point3 {
        self.points[i as usize]
    }

    pub fn label(&self, i: u32) -> PointLabel {
        self.labels[i as usize]
    }

    pub fn attrs(&self, i: u32) -> &PointAttrs {
        &self.attrs[i as usize]
    }

    pub fn attrs_mut(&mut self, i: u32) -> &mut PointAttrs {
        &mut self.attrs[i as usize]
    }

    pub fn first_seen(&self, i: u32) -> u32 {
        self.first_seen[i as usize]
    }

    pub fn is_alive(&self, i: u32) -> bool {
        self.alive[i as usize]
    }

    /// Appends a point unconditionally. Coordinates must be finite.
    pub fn insert(&mut self, p: Point3, label: PointLabel, first_seen: u32) -> u32 {
        assert!(p.is_finite(), "point coordinates must be finite");
        let idx = self.points.len() as u32;
        self.points.push(p);
        self.labels.push(label);
        self.attrs.push(PointAttrs::default());
        self.first_seen.push(first_seen);
        self.alive.push(true);
        self.alive_count += 1;
        let k = key(p, CELL);
        self.zkey_lo = self.zkey_lo.min(k.2);
        self.zkey_hi = self.zkey_hi.max(k.2);
        self.cells.entry(k).or_default().push(idx);
        idx
    }

    /// Appends unless a live same-label point lies within `merge_radius`;
    /// merging keeps the existing point (earliest first-seen index wins).
    /// Returns the new index, or `None` if the point merged away.
    pub fn insert_merged(
        &mut self,
        p: Point3,
        label: PointLabel,
        first_seen: u32,
        merge_radius: f64,
    ) -> Option<u32> {
        let r2 = merge_radius * merge_radius;
        let (lo, hi) = cell_range(p, merge_radius, CELL);
        for cx in lo.0..=hi.0 {
            for cy in lo.1..=hi.1 {
                for cz in lo.2..=hi.2 {
                    if let Some(ids) = self.cells.get(&(cx, cy, cz)) {
                        for &i in ids {
                            if self.alive[i as usize]
                                && self.labels[i as usize] == label
                                && self.points[i as usize].dist_sq(p) <= r2
                            {
                                return None;
                            }
                        }
                    }
                }
            }
        }
        Some(self.insert(p, label, first_seen))
    }

    /// Tombstones a point. The slot (and its attributes) stays addressable.
    pub fn remove(&mut self, i: u32) {
        if self.alive[i as usize] {
            self.alive[i as usize] = false;
            self.alive_count -= 1;
        }
    }

    /// Indices of live points within `radius` of `center`, ascending.
    pub fn radius_indices(&self, center: Point3, radius: f64) -> Vec<u32> {
        self.radius_indices_filtered(center, radius, |_| true)
    }

    /// Radius query restricted to one label.
    pub fn radius_indices_labeled(
        &self,
        center: Point3,
        radius: f64,
        label: PointLabel,
    ) -> Vec<u32> {
        self.radius_indices_filtered(center, radius, |i| self.labels[i as usize] == label)
    }

    fn radius_indices_filtered<F: Fn(u32) -> bool>(
        &self,
        center: Point3,
        radius: f64,
        keep: F,
    ) -> Vec<u32> {
        let mut out = Vec::new();
        let r2 = radius * radius;
        let (lo, hi) = cell_range(center, radius, CELL);
        for cx in lo.0..=hi.0 {
            for cy in lo.1..=hi.1 {
                for cz in lo.2..=hi.2 {
                    if let Some(ids) = self.cells.get(&(cx, cy, cz)) {
                        for &i in ids {
                            if self.alive[i as usize]
                                && keep(i)
                                && self.points[i as usize].dist_sq(center) <= r2
                            {
                                out.push(i);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Live points whose horizontal (XY) distance to `center` is within
    /// `radius`, at any height, optionally restricted to one label.
    /// Ascending index order.
    pub fn radius_indices_xy(
        &self,
        center: Point3,
        radius: f64,
        label: Option<PointLabel>,
    ) -> Vec<u32> {
        let mut out = Vec::new();
        let r2 = radius * radius;
        let lo = key(center - Point3::new(radius, radius, 0.0), CELL);
        let hi = key(center + Point3::new(radius, radius, 0.0), CELL);
        for cx in lo.0..=hi.0 {
            for cy in lo.1..=hi.1 {
                for cz in self.zkey_lo..=self.zkey_hi {
                    if let Some(ids) = self.cells.get(&(cx, cy, cz)) {
                        for &i in ids {
                            if !self.alive[i as usize] {
                                continue;
                            }
                            if let Some(want) = label {
                                if self.labels[i as usize] != want {
                                    continue;
                                }
                            }
                            let p = self.points[i as usize];
                            let dx = p.x - center.x;
                            let dy = p.y - center.y;
                            if dx * dx + dy * dy <= r2 {
                                out.push(i);
                            }
                        }
                    }
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Nearest live point (horizontal distance) with `label` within
    /// `cutoff`, searched by expanding XY rings.
    pub fn nearest_xy_within(
        &self,
        query: Point3,
        label: PointLabel,
        cutoff: f64,
    ) -> Option<(u32, f64)> {
        let center = key(query, CELL);
        let max_ring = (cutoff / CELL).ceil() as i64 + 1;
        let mut best: Option<(f64, u32)> = None;
        for ring in 0..=max_ring {
            // XY shell at Chebyshev distance `ring`, all z layers.
            for dx in -ring..=ring {
                for dy in -ring..=ring {
                    if dx.abs().max(dy.abs()) != ring {
                        continue;
                    }
                    for cz in self.zkey_lo..=self.zkey_hi {
                        if let Some(ids) = self.cells.get(&(center.0 + dx, center.1 + dy, cz)) {
                            for &i in ids {
                                if self.alive[i as usize] && self.labels[i as usize] == label {
                                    let p = self.points[i as usize];
                                    let ddx = p.x - query.x;
                                    let ddy = p.y - query.y;
                                    let d2 = ddx * ddx + ddy * ddy;
                                    match best {
                                        Some((b, bi)) if d2 > b || (d2 == b && i >= bi) => {}
                                        _ => best = Some((d2, i)),
                                    }
                                }
                            }
                        }
                    }
                }
            }
            let safe = ring as f64 * CELL;
            if let Some((b, _)) = best {
                if b < safe * safe {
                    break;
                }
            }
        }
        best.and_then(|(d2, i)| {
            let d = d2.sqrt();
            (d <= cutoff).then_some((i, d))
        })
    }

    /// Distance to the nearest live point with `label` within `cutoff`.
    pub fn nearest_labeled_within(
        &self,
        query: Point3,
        label: PointLabel,
        cutoff: f64,
    ) -> Option<(u32, f64)> {
        let center = key(query, CELL);
        let max_ring = (cutoff / CELL).ceil() as i64 + 1;
        let mut best: Option<(f64, u32)> = None;
        for ring in 0..=max_ring {
            for (cx, cy, cz) in super::grid::shell_cells(center, ring) {
                if let Some(ids) = self.cells.get(&(cx, cy, cz)) {
                    for &i in ids {
                        if self.alive[i as usize] && self.labels[i as usize] == label {
                            let d2 = self.points[i as usize].dist_sq(query);
                            match best {
                                Some((b, bi)) if d2 > b || (d2 == b && i >= bi) => {}
                                _ => best = Some((d2, i)),
                            }
                        }
                    }
                }
            }
            let safe = ring as f64 * CELL;
            if let Some((b, _)) = best {
                if b < safe * safe {
                    break;
                }
            }
        }
        best.and_then(|(d2, i)| {
            let d = d2.sqrt();
            (d <= cutoff).then_some((i, d))
        })
    }

    /// Iterates live point indices in ascending order.
    pub fn iter_alive(&self) -> impl Iterator<Item = u32> + '_ {
        (0..self.points.len() as u32).filter(move |&i| self.alive[i as usize])
    }

    /// Live points of one label, ascending index order.
    pub fn iter_label(&self, label: PointLabel) -> impl Iterator<Item = u32> + '_ {
        self.iter_alive()
            .filter(move |&i| self.labels[i as usize] == label)
    }
}
