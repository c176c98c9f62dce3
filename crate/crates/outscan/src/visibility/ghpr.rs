use crate::geom::{hull_structure, Point3};

/// Per-point visibility flags, parallel to the queried cloud.
#[derive(Debug, Clone)]
pub struct VisibilityResult {
    pub visible: Vec<bool>,
}

impl VisibilityResult {
    pub fn count_visible(&self) -> usize {
        self.visible.iter().filter(|v| **v).count()
    }
}

/// Radial GHPR transform of a cloud about a viewpoint.
///
/// Each point maps along its viewpoint ray to distance
/// `h(d) = alpha * max_q(|q - viewpoint|) - d`; the kernel is strictly
/// decreasing, so near points land farther out than far ones. A point
/// coincident with the viewpoint maps to itself.
pub fn ghpr_transform(
    points: &[Point3],
    viewpoint: Point3,
    alpha: f64,
) -> crate::Result<Vec<Point3>> {
    if points.is_empty() {
        return Err(crate::Error::EmptyInput);
    }
    if !(alpha > 1.0) {
        return Err(crate::Error::InvalidParameter("GHPR alpha must exceed 1".into()));
    }
    let max_dist = points
        .iter()
        .map(|p| p.dist(viewpoint))
        .fold(0.0, f64::max);
    Ok(points
        .iter()
        .map(|&p| {
            let offset = p - viewpoint;
            match offset.normalized() {
                None => p,
                Some(dir) => {
                    let d = offset.norm();
                    viewpoint + dir * (alpha * max_dist - d)
                }
            }
        })
        .collect())
}

/// Marks the points visible from `viewpoint`: those whose GHPR transform
/// lies on the convex hull of the transformed set (viewpoint appended).
pub fn visible_set(
    points: &[Point3],
    viewpoint: Point3,
    alpha: f64,
) -> crate::Result<VisibilityResult> {
    let mut transformed = ghpr_transform(points, viewpoint, alpha)?;
    transformed.push(viewpoint);
    let hull = hull_structure(&transformed)?;
    let mut visible = vec![false; points.len()];
    for &v in hull.vertices() {
        // The appended viewpoint is hull input but not a query point.
        if (v as usize) < points.len() {
            visible[v as usize] = true;
        }
    }
    Ok(VisibilityResult { visible })
}
