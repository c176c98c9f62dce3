use super::Point3;
use std::collections::HashMap;

/// Uniform hash-grid spatial index over an immutable point set.
///
/// Queries are exact: they return precisely what a linear scan over the same
/// points would. The default 1 m cell matches the scene scale; callers with
/// much denser or sparser data can pick another cell size.
#[derive(Debug, Clone)]
pub struct SpatialIndex {
    points: Vec<Point3>,
    cell: f64,
    cells: HashMap<(i64, i64, i64), Vec<u32>>,
    key_lo: (i64, i64, i64),
    key_hi: (i64, i64, i64),
}

pub const DEFAULT_CELL: f64 = 1.0;

impl SpatialIndex {
    /// Builds the index; errors on an empty cloud.
    pub fn build(points: &[Point3]) -> crate::Result<Self> {
        Self::build_with_cell(points, DEFAULT_CELL)
    }

    pub fn build_with_cell(points: &[Point3], cell: f64) -> crate::Result<Self> {
        if points.is_empty() {
            return Err(crate::Error::EmptyInput);
        }
        assert!(cell > 0.0, "grid cell must be positive");
        let mut cells: HashMap<(i64, i64, i64), Vec<u32>> = HashMap::new();
        let mut key_lo = (i64::MAX, i64::MAX, i64::MAX);
        let mut key_hi = (i64::MIN, i64::MIN, i64::MIN);
        for (i, p) in points.iter().enumerate() {
            let k = key(*p, cell);
            key_lo = (key_lo.0.min(k.0), key_lo.1.min(k.1), key_lo.2.min(k.2));
            key_hi = (key_hi.0.max(k.0), key_hi.1.max(k.1), key_hi.2.max(k.2));
            cells.entry(k).or_default().push(i as u32);
        }
        Ok(Self { points: points.to_vec(), cell, cells, key_lo, key_hi })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn point(&self, i: u32) -> Point3 {
        self.points[i as usize]
    }

    pub fn points(&self) -> &[Point3] {
        &self.points
    }

    /// Indices of all points within `radius` of `center`, ascending.
    pub fn radius_indices(&self, center: Point3, radius: f64) -> Vec<u32> {
        let mut out = Vec::new();
        let r2 = radius * radius;
        let (lo, hi) = cell_range(center, radius, self.cell);
        for cx in lo.0..=hi.0 {
            for cy in lo.1..=hi.1 {
                for cz in lo.2..=hi.2 {
                    if let Some(ids) = self.cells.get(&(cx, cy, cz)) {
                        for &i in ids {
                            if self.points[i as usize].dist_sq(center) <= r2 {
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

    /// The `k` nearest points to `query`, ordered by (distance, index).
    /// Returns all points when `k` exceeds the point count.
    pub fn knn(&self, query: Point3, k: usize) -> Vec<u32> {
        if k == 0 {
            return Vec::new();
        }
        let k = k.min(self.points.len());
        // Expand the search shell until the k-th best distance is provably
        // inside the scanned region.
        let mut best: Vec<(f64, u32)> = Vec::new();
        let mut ring = 0i64;
        let center_key = key(query, self.cell);
        loop {
            let mut any = false;
            for (cx, cy, cz) in shell_cells(center_key, ring) {
                if let Some(ids) = self.cells.get(&(cx, cy, cz)) {
                    any = true;
                    for &i in ids {
                        let d2 = self.points[i as usize].dist_sq(query);
                        best.push((d2, i));
                    }
                }
            }
            if any {
                best.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
                best.truncate(k.max(64));
            }
            // Any point outside the scanned shells is at least this far away.
            // Strict comparison so index tie-breaks still match a linear scan.
            let safe = ring as f64 * self.cell;
            if best.len() >= k && best[k - 1].0 < safe * safe {
                break;
            }
            ring += 1;
            if ring > self.max_ring(center_key) {
                break;
            }
        }
        best.truncate(k);
        best.into_iter().map(|(_, i)| i).collect()
    }

    /// Nearest point within `cutoff`, if any.
    pub fn nearest_within(&self, query: Point3, cutoff: f64) -> Option<(u32, f64)> {
        let mut best: Option<(f64, u32)> = None;
        let center_key = key(query, self.cell);
        let max_ring = (cutoff / self.cell).ceil() as i64 + 1;
        for ring in 0..=max_ring.min(self.max_ring(center_key)) {
            for (cx, cy, cz) in shell_cells(center_key, ring) {
                if let Some(ids) = self.cells.get(&(cx, cy, cz)) {
                    for &i in ids {
                        let d2 = self.points[i as usize].dist_sq(query);
                        match best {
                            Some((b, bi)) if d2 > b || (d2 == b && i >= bi) => {}
                            _ => best = Some((d2, i)),
                        }
                    }
                }
            }
            let safe = ring as f64 * self.cell;
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

    /// Largest shell that can still contain occupied cells around `center`.
    fn max_ring(&self, center: (i64, i64, i64)) -> i64 {
        let dx = (center.0 - self.key_lo.0).abs().max((self.key_hi.0 - center.0).abs());
        let dy = (center.1 - self.key_lo.1).abs().max((self.key_hi.1 - center.1).abs());
        let dz = (center.2 - self.key_lo.2).abs().max((self.key_hi.2 - center.2).abs());
        dx.max(dy).max(dz)
    }
}

pub(crate) fn key(p: Point3, cell: f64) -> (i64, i64, i64) {
    (
        (p.x / cell).floor() as i64,
        (p.y / cell).floor() as i64,
        (p.z / cell).floor() as i64,
    )
}

pub(crate) fn cell_range(
    center: Point3,
    radius: f64,
    cell: f64,
) -> ((i64, i64, i64), (i64, i64, i64)) {
    let lo = key(center - Point3::new(radius, radius, radius), cell);
    let hi = key(center + Point3::new(radius, radius, radius), cell);
    (lo, hi)
}

/// Cells on the axis-aligned shell at Chebyshev distance `ring` from `center`.
pub(crate) fn shell_cells(center: (i64, i64, i64), ring: i64) -> Vec<(i64, i64, i64)> {
    let (cx, cy, cz) = center;
    if ring == 0 {
        return vec![center];
    }
    let mut out = Vec::new();
    for dx in -ring..=ring {
        for dy in -ring..=ring {
            for dz in -ring..=ring {
                if dx.abs().max(dy.abs()).max(dz.abs()) == ring {
                    out.push((cx + dx, cy + dy, cz + dz));
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn random_cloud(n: usize, seed: u64, extent: f64) -> Vec<Point3> {
        let mut rng = StdRng::seed_from_u64(seed);
        (0..n)
            .map(|_| {
                Point3::new(
                    rng.gen_range(-extent..extent),
                    rng.gen_range(-extent..extent),
                    rng.gen_range(-extent..extent),
                )
            })
            .collect()
    }

    fn brute_radius(points: &[Point3], c: Point3, r: f64) -> Vec<u32> {
        points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.dist(c) <= r)
            .map(|(i, _)| i as u32)
            .collect()
    }

    fn brute_knn(points: &[Point3], q: Point3, k: usize) -> Vec<u32> {
        let mut v: Vec<(f64, u32)> = points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.dist_sq(q), i as u32))
            .collect();
        v.sort_unstable_by(|a, b| a.partial_cmp(b).unwrap());
        v.truncate(k.min(points.len()));
        v.into_iter().map(|(_, i)| i).collect()
    }

    #[test]
    fn single_point_identity_query() {
        let p = Point3::new(1.0, 2.0, 3.0);
        let idx = SpatialIndex::build(&[p]).unwrap();
        assert_eq!(idx.knn(p, 1), vec![0]);
    }

    #[test]
    fn empty_cloud_errors() {
        assert!(matches!(SpatialIndex::build(&[]), Err(crate::Error::EmptyInput)));
    }

    #[test]
    fn k_larger_than_count_saturates() {
        let pts = random_cloud(5, 3, 4.0);
        let idx = SpatialIndex::build(&pts).unwrap();
        let got = idx.knn(Point3::ZERO, 100);
        assert_eq!(got.len(), 5);
    }

    #[test]
    fn radius_query_matches_linear_scan() {
        let pts = random_cloud(100, 7, 10.0);
        let idx = SpatialIndex::build(&pts).unwrap();
        let c = Point3::new(0.5, -1.0, 2.0);
        for r in [0.1, 1.0, 3.5, 20.0] {
            assert_eq!(idx.radius_indices(c, r), brute_radius(&pts, c, r));
        }
    }

    #[test]
    fn queries_match_brute_force_on_large_cloud() {
        let pts = random_cloud(1000, 11, 25.0);
        let idx = SpatialIndex::build(&pts).unwrap();
        let mut rng = StdRng::seed_from_u64(99);
        for _ in 0..50 {
            let q = Point3::new(
                rng.gen_range(-30.0..30.0),
                rng.gen_range(-30.0..30.0),
                rng.gen_range(-30.0..30.0),
            );
            let r = rng.gen_range(0.5..12.0);
            assert_eq!(idx.radius_indices(q, r), brute_radius(&pts, q, r));
            let k = rng.gen_range(1..20);
            assert_eq!(idx.knn(q, k), brute_knn(&pts, q, k));
            let brute_nearest = brute_knn(&pts, q, 1)[0];
            let got = idx.nearest_within(q, 1e9).unwrap();
            assert_eq!(got.0, brute_nearest);
        }
    }

    #[test]
    fn nearest_within_respects_cutoff() {
        let pts = vec![Point3::new(5.0, 0.0, 0.0)];
        let idx = SpatialIndex::build(&pts).unwrap();
        assert!(idx.nearest_within(Point3::ZERO, 4.0).is_none());
        let (i, d) = idx.nearest_within(Point3::ZERO, 6.0).unwrap();
        assert_eq!(i, 0);
        assert!((d - 5.0).abs() < 1e-12);
    }
}
