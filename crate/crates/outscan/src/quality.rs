//! Shape-aware scan-quality assessment via box-counting fractal dimension.
//!
//! Well-scanned surfaces measure close to 2; sparse scan lines close to 1;
//! anything below 2 is treated as under-scanned and feeds the path refiner.

use crate::geom::{LabeledPointCloud, Point3};

/// (log(1/eps), log C) pairs collected over a descending cell-size ladder.
#[derive(Debug, Clone)]
pub struct BoxCountSeries {
    pub pairs: Vec<(f64, f64)>,
}

impl BoxCountSeries {
    /// Collects counts for each ladder scale; the ladder must be strictly
    /// decreasing with at least 3 entries.
    pub fn collect(points: &[Point3], ladder: &[f64]) -> crate::Result<Self> {
        if points.is_empty() {
            return Err(crate::Error::EmptyInput);
        }
        if ladder.len() < 3 {
            return Err(crate::Error::InvalidParameter(
                "box-count ladder needs at least 3 scales".into(),
            ));
        }
        if ladder.windows(2).any(|w| w[1] >= w[0]) || ladder.iter().any(|&e| e <= 0.0) {
            return Err(crate::Error::InvalidParameter(
                "box-count ladder must be positive and strictly decreasing".into(),
            ));
        }
        let mut pairs = Vec::with_capacity(ladder.len());
        let mut prev = 0usize;
        for &eps in ladder {
            let c = box_count(points, eps);
            debug_assert!(c >= prev, "counts grow as cells shrink");
            prev = c;
            pairs.push(((1.0 / eps).ln(), (c as f64).ln()));
        }
        Ok(Self { pairs })
    }

    /// Least-squares slope of log C against log(1/eps).
    pub fn slope(&self) -> f64 {
        let n = self.pairs.len() as f64;
        let sx: f64 = self.pairs.iter().map(|p| p.0).sum();
        let sy: f64 = self.pairs.iter().map(|p| p.1).sum();
        let sxx: f64 = self.pairs.iter().map(|p| p.0 * p.0).sum();
        let sxy: f64 = self.pairs.iter().map(|p| p.0 * p.1).sum();
        let den = n * sxx - sx * sx;
        if den.abs() < 1e-12 {
            return 0.0;
        }
        (n * sxy - sx * sy) / den
    }
}

/// Number of occupied axis-aligned cells of size `eps`, anchored at the
/// point set's min corner. Empty input occupies nothing.
pub fn box_count(points: &[Point3], eps: f64) -> usize {
    assert!(eps > 0.0);
    if points.is_empty() {
        return 0;
    }
    let mut min = points[0];
    for p in points {
        min.x = min.x.min(p.x);
        min.y = min.y.min(p.y);
        min.z = min.z.min(p.z);
    }
    let mut cells: Vec<(i64, i64, i64)> = points
        .iter()
        .map(|p| {
            (
                ((p.x - min.x) / eps).floor() as i64,
                ((p.y - min.y) / eps).floor() as i64,
                ((p.z - min.z) / eps).floor() as i64,
            )
        })
        .collect();
    cells.sort_unstable();
    cells.dedup();
    cells.len()
}

/// Box-counting dimension estimate: the fitted slope of the count series.
///
/// A single point (all counts 1) has slope 0.
pub fn fractal_dimension(points: &[Point3], ladder: &[f64]) -> crate::Result<f64> {
    Ok(BoxCountSeries::collect(points, ladder)?.slope())
}

/// Per-point local fractal dimension over a radius neighborhood.
///
/// Returns one entry per queried index: the dimension, or `None` when the
/// neighborhood holds fewer than `min_points` points (insufficient
/// evidence). Estimates are written back into the cloud's `dim` attribute.
pub fn local_quality_field(
    cloud: &mut LabeledPointCloud,
    queries: &[u32],
    radius: f64,
    ladder: &[f64],
    min_points: usize,
) -> crate::Result<Vec<(u32, Option<f64>)>> {
    assert!(radius > 0.0);
    let mut out = Vec::with_capacity(queries.len());
    for &i in queries {
        let neighbors = cloud.radius_indices(cloud.point(i), radius);
        let estimate = if neighbors.len() < min_points {
            None
        } else {
            let pts: Vec<Point3> = neighbors.iter().map(|&n| cloud.point(n)).collect();
            Some(fractal_dimension(&pts, ladder)?)
        };
        cloud.attrs_mut(i).dim = estimate.unwrap_or(f64::NAN);
        out.push((i, estimate));
    }
    Ok(out)
}
