//! Quality-driven geometric refinement: reshapes a shortest traverse path
//! into a clamped cubic B-spline whose control points are pulled toward
//! under-scanned points, under a hard obstacle-clearance constraint.

use crate::geom::{BSplineCurve, PathPolyline, Point3};

/// Under-scanned candidate points ordered by ascending fractal dimension.
#[derive(Debug, Clone, Default)]
pub struct QualityQueue {
    entries: Vec<(f64, Point3)>,
}

impl QualityQueue {
    /// Keeps the entries with dimension below `cutoff`, sorted ascending
    /// (ties keep insertion order, so the queue is deterministic).
    pub fn from_dims(entries: impl IntoIterator<Item = (f64, Point3)>, cutoff: f64) -> Self {
        let mut v: Vec<(f64, Point3)> = entries
            .into_iter()
            .filter(|&(d, _)| d.is_finite() && d < cutoff)
            .collect();
        v.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        Self { entries: v }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn pop_head(&mut self) -> Option<(f64, Point3)> {
        if self.entries.is_empty() {
            None
        } else {
            Some(self.entries.remove(0))
        }
    }

    /// Drops queued points within `radius` of an emitted control point so a
    /// cluster of under-scanned points yields a single pull.
    pub fn suppress_within(&mut self, center: Point3, radius: f64) {
        self.entries.retain(|&(_, p)| p.dist(center) > radius);
    }
}

/// Clearance oracle: distance from a position to the nearest known obstacle
/// point, if any lies within the probe range.
pub type ClearanceFn<'a> = dyn Fn(Point3) -> Option<f64> + 'a;

/// Control points for the refined spline, ordered along the base path.
#[derive(Debug, Clone)]
pub struct ControlPointSet {
    pub points: Vec<Point3>,
    pub d_c: f64,
    pub r_c: f64,
}

/// Spacing used to flank sharp base-path corners with extra control points;
/// keeps the smoothing deviation of an unpulled spline under half a meter.
const CORNER_SPACING: f64 = 1.5;
const CORNER_TURN: f64 = 1.0; // radians, ~57 degrees

/// Selects spline control points along `base` (sampled at `sample_step`).
///
/// While the quality queue has entries: pop the worst point, move the
/// nearest surviving path sample toward it by at most `d_c` (never past the
/// point itself), emit the moved sample as a control point, and delete all
/// samples within `r_c` of it. Samples that survive queue exhaustion are
/// emitted unmoved at `r_c` spacing, densified near sharp corners, with both
/// endpoints always kept. Control points that would violate `min_clearance`
/// are pulled back along their displacement ray.
pub fn select_control_points(
    base: &PathPolyline,
    sample_step: f64,
    queue: &mut QualityQueue,
    d_c: f64,
    r_c: f64,
    clearance: &ClearanceFn<'_>,
    min_clearance: f64,
) -> ControlPointSet {
    assert!(!base.is_empty(), "base path must be non-empty");
    let samples = base.resample(sample_step);
    let n = samples.len();
    let mut alive = vec![true; n];
    // Endpoints are handled separately; quality pulls act on the interior.
    alive[0] = false;
    if n > 1 {
        alive[n - 1] = false;
    }

    let mut picked: Vec<(usize, Point3)> = Vec::new();
    while let Some((_, head)) = queue.pop_head() {
        let nearest = (0..n)
            .filter(|&i| alive[i])
            .min_by(|&a, &b| {
                samples[a]
                    .dist(head)
                    .partial_cmp(&samples[b].dist(head))
                    .unwrap()
                    .then(a.cmp(&b))
            });
        let Some(ci) = nearest else { break };
        let anchor = samples[ci];
        let pull = head - anchor;
        let control = match pull.normalized() {
            None => anchor,
            Some(dir) => {
                let step = d_c.min(pull.norm());
                clamp_to_clearance(anchor, dir, step, clearance, min_clearance)
            }
        };
        for (i, s) in samples.iter().enumerate() {
            if alive[i] && s.dist(control) <= r_c {
                alive[i] = false;
            }
        }
        alive[ci] = false;
        queue.suppress_within(control, r_c);
        picked.push((ci, control));
    }

    // Corner samples of the base path that still need representation.
    let mut corner = vec![false; n];
    for i in 1..n.saturating_sub(1) {
        let turn = crate::geom::turning_angle(samples[i - 1], samples[i], samples[i + 1]);
        if turn > CORNER_TURN {
            corner[i] = true;
        }
    }

    // Remaining samples become unmoved controls at r_c spacing (denser next
    // to sharp corners).
    let mut last_arc = f64::NEG_INFINITY;
    let arc_of = |i: usize| base.length() * i as f64 / (n.max(2) - 1) as f64;
    for i in 0..n {
        if !alive[i] {
            continue;
        }
        let near_corner = (i.saturating_sub(3)..(i + 4).min(n)).any(|j| corner[j]);
        let spacing = if near_corner { CORNER_SPACING } else { r_c };
        if corner[i] || arc_of(i) - last_arc >= spacing {
            picked.push((i, samples[i]));
            last_arc = arc_of(i);
        }
    }

    picked.sort_by(|a, b| a.0.cmp(&b.0));
    let mut points = Vec::with_capacity(picked.len() + 2);
    points.push(samples[0]);
    for (_, p) in picked {
        if points.last().map_or(true, |l| l.dist(p) > 1e-9) {
            points.push(p);
        }
    }
    if n > 1 && points.last().map_or(true, |l| l.dist(samples[n - 1]) > 1e-9) {
        points.push(samples[n - 1]);
    }
    ControlPointSet { points, d_c, r_c }
}

/// Walks back along `dir` from the farthest displacement until clearance
/// holds; the undisplaced anchor is assumed feasible.
fn clamp_to_clearance(
    anchor: Point3,
    dir: Point3,
    step: f64,
    clearance: &ClearanceFn<'_>,
    min_clearance: f64,
) -> Point3 {
    let ok = |t: f64| clearance(anchor + dir * t).map_or(true, |d| d >= min_clearance);
    if ok(step) {
        return anchor + dir * step;
    }
    let (mut lo, mut hi) = (0.0, step);
    for _ in 0..24 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    anchor + dir * lo
}

/// Result of spline refinement: either a clearance-respecting curve or a
/// fallback order to keep the unrefined shortest path.
#[derive(Debug, Clone)]
pub enum RefinedPath {
    Spline(BSplineCurve),
    Fallback,
}

const CLEARANCE_ROUNDS: usize = 5;

/// Builds the clamped cubic B-spline through `start`/`goal` shaped by the
/// control set, then iteratively projects interior control points away from
/// obstacles until every dense curve sample keeps `min_clearance` (at most
/// five rounds; persistent violation falls back).
pub fn refine_path(
    start: Point3,
    goal: Point3,
    controls: &ControlPointSet,
    clearance: &ClearanceFn<'_>,
    min_clearance: f64,
    obstacle_at: &dyn Fn(Point3) -> Option<Point3>,
) -> crate::Result<RefinedPath> {
    if start.dist(goal) < 1e-9 {
        return Err(crate::Error::DegeneratePath);
    }
    let mut pts: Vec<Point3> = Vec::with_capacity(controls.points.len() + 2);
    pts.push(start);
    for &p in &controls.points {
        if pts.last().map_or(true, |l| l.dist(p) > 1e-9) {
            pts.push(p);
        }
    }
    if pts.last().map_or(true, |l| l.dist(goal) > 1e-9) {
        pts.push(goal);
    }
    if pts.len() < 2 {
        return Err(crate::Error::InsufficientPoints { needed: 2, got: pts.len() });
    }
    // A cubic needs 4 controls; split the longest gaps until we have them.
    while pts.len() < 4 {
        let (mut widest, mut gap) = (0, -1.0);
        for i in 0..pts.len() - 1 {
            let d = pts[i].dist(pts[i + 1]);
            if d > gap {
                gap = d;
                widest = i;
            }
        }
        let mid = (pts[widest] + pts[widest + 1]) * 0.5;
        pts.insert(widest + 1, mid);
    }

    let mut curve = BSplineCurve::clamped_cubic(pts)?;
    let samples_per_span = ((start.dist(goal) * 8.0) as usize).clamp(64, 4096);
    for _ in 0..CLEARANCE_ROUNDS {
        let samples = curve.sample(samples_per_span);
        let mut pushes: Vec<Option<Point3>> = vec![None; curve.control_points().len()];
        let mut violated = false;
        for (si, s) in samples.iter().enumerate() {
            let Some(d) = clearance(*s) else { continue };
            if d >= min_clearance {
                continue;
            }
            violated = true;
            let Some(ob) = obstacle_at(*s) else { continue };
            let away = match (*s - ob).normalized() {
                Some(v) => v,
                None => continue,
            };
            let need = (min_clearance - d) + 0.05;
            // Blame the interior control nearest to this sample's parameter.
            let t = si as f64 / samples_per_span as f64;
            let ci = nearest_interior_control(&curve, t);
            let push = away * need;
            let slot = &mut pushes[ci];
            *slot = Some(match *slot {
                None => push,
                Some(prev) if push.norm_sq() > prev.norm_sq() => push,
                Some(prev) => prev,
            });
        }
        if !violated {
            return Ok(RefinedPath::Spline(curve));
        }
        let cps = curve.control_points_mut();
        for (i, push) in pushes.iter().enumerate() {
            if let Some(v) = push {
                cps[i] = cps[i] + *v;
            }
        }
    }
    // Final verdict after the last adjustment round.
    let ok = curve
        .sample(samples_per_span)
        .iter()
        .all(|s| clearance(*s).map_or(true, |d| d >= min_clearance));
    if ok {
        Ok(RefinedPath::Spline(curve))
    } else {
        Ok(RefinedPath::Fallback)
    }
}

/// Interior control index with the strongest influence at parameter `t`
/// (cubic B-spline support is local, so the nearest Greville-style slot
/// is a good stand-in).
fn nearest_interior_control(curve: &BSplineCurve, t: f64) -> usize {
    let n = curve.control_points().len();
    let raw = (t * (n - 1) as f64).round() as usize;
    raw.clamp(1, n.saturating_sub(2))
}

/// Convenience: dense polyline of a refined curve.
pub fn curve_to_polyline(curve: &BSplineCurve, step: f64, approx_len: f64) -> PathPolyline {
    let n = ((approx_len / step).ceil() as usize).clamp(8, 100_000);
    PathPolyline::from_points(curve.sample(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::{accumulated_curvature, max_turning_angle};

    fn no_obstacles() -> (Box<ClearanceFn<'static>>, Box<dyn Fn(Point3) -> Option<Point3>>) {
        (Box::new(|_| None), Box::new(|_| None))
    }

    fn straight_path(len: f64) -> PathPolyline {
        PathPolyline::from_points([Point3::ZERO, Point3::new(len, 0.0, 0.0)])
    }

    #[test]
    fn empty_queue_keeps_the_path_straight() {
        let base = straight_path(10.0);
        let mut q = QualityQueue::default();
        let (cl, _) = no_obstacles();
        let set = select_control_points(&base, 0.5, &mut q, 1.5, 2.0, cl.as_ref(), 1.0);
        // Roughly 10/2 + endpoints control points, all on the x axis.
        assert!(
            (5..=8).contains(&set.points.len()),
            "got {} controls",
            set.points.len()
        );
        for p in &set.points {
            assert!(p.y.abs() < 1e-9 && p.z.abs() < 1e-9);
        }
        assert!(set.points[0].dist(Point3::ZERO) < 1e-9);
        assert!(set.points.last().unwrap().dist(Point3::new(10.0, 0.0, 0.0)) < 1e-9);
    }

    #[test]
    fn pull_is_capped_at_dc() {
        let base = straight_path(10.0);
        // Under-scanned point 3 m beside the midpoint.
        let mut q = QualityQueue::from_dims([(1.2, Point3::new(5.0, 3.0, 0.0))], 2.0);
        let (cl, _) = no_obstacles();
        let set = select_control_points(&base, 0.5, &mut q, 1.5, 3.0, cl.as_ref(), 1.0);
        let pulled = set
            .points
            .iter()
            .find(|p| p.y > 1.0)
            .expect("one control pulled sideways");
        assert!((pulled.dist(Point3::new(5.0, 1.5, 0.0))) < 1e-9);
    }

    #[test]
    fn pull_never_overshoots_the_attractor() {
        let base = straight_path(10.0);
        let mut q = QualityQueue::from_dims([(1.0, Point3::new(5.0, 1.0, 0.0))], 2.0);
        let (cl, _) = no_obstacles();
        let set = select_control_points(&base, 0.5, &mut q, 1.5, 3.0, cl.as_ref(), 1.0);
        let pulled = set.points.iter().find(|p| p.y > 0.5).unwrap();
        assert!((pulled.y - 1.0).abs() < 1e-9, "capped at the point distance");
    }

    #[test]
    fn clearance_projects_the_control_back() {
        let base = straight_path(10.0);
        let wall = Point3::new(5.0, 2.0, 0.0);
        let mut q = QualityQueue::from_dims([(1.0, Point3::new(5.0, 1.9, 0.0))], 2.0);
        let clearance = move |p: Point3| Some(p.dist(wall));
        let set = select_control_points(&base, 0.5, &mut q, 1.5, 3.0, &clearance, 1.0);
        let pulled = set.points.iter().find(|p| p.y > 0.2).unwrap();
        assert!(pulled.dist(wall) >= 1.0 - 1e-6, "control respects clearance");
    }

    #[test]
    fn queue_orders_ascending_and_suppresses() {
        let mut q = QualityQueue::from_dims(
            [
                (1.8, Point3::new(0.0, 0.0, 0.0)),
                (0.4, Point3::new(10.0, 0.0, 0.0)),
                (1.1, Point3::new(20.0, 0.0, 0.0)),
                (2.5, Point3::new(30.0, 0.0, 0.0)), // at cutoff: excluded
            ],
            2.0,
        );
        assert_eq!(q.len(), 3);
        assert_eq!(q.pop_head().unwrap().0, 0.4);
        q.suppress_within(Point3::new(20.0, 0.0, 0.0), 3.0);
        assert_eq!(q.len(), 1);
    }

    #[test]
    fn degenerate_endpoints_error() {
        let (cl, ob) = no_obstacles();
        let set = ControlPointSet { points: vec![], d_c: 1.5, r_c: 3.0 };
        let r = refine_path(Point3::ZERO, Point3::ZERO, &set, cl.as_ref(), 1.0, ob.as_ref());
        assert!(matches!(r, Err(crate::Error::DegeneratePath)));
    }

    #[test]
    fn collinear_controls_give_zero_curvature() {
        let (cl, ob) = no_obstacles();
        let set = ControlPointSet {
            points: vec![
                Point3::new(2.0, 0.0, 0.0),
                Point3::new(5.0, 0.0, 0.0),
                Point3::new(8.0, 0.0, 0.0),
            ],
            d_c: 1.5,
            r_c: 3.0,
        };
        let refined = refine_path(
            Point3::ZERO,
            Point3::new(10.0, 0.0, 0.0),
            &set,
            cl.as_ref(),
            1.0,
            ob.as_ref(),
        )
        .unwrap();
        let RefinedPath::Spline(curve) = refined else { panic!("expected spline") };
        let poly = curve_to_polyline(&curve, 0.25, 10.0);
        assert!(accumulated_curvature(&poly) < 1e-9);
        assert!(curve.eval(0.0).dist(Point3::ZERO) < 1e-9);
        assert!(curve.eval(1.0).dist(Point3::new(10.0, 0.0, 0.0)) < 1e-9);
    }

    #[test]
    fn right_angle_corner_gets_rounded() {
        let base = PathPolyline::from_points([
            Point3::ZERO,
            Point3::new(8.0, 0.0, 0.0),
            Point3::new(8.0, 8.0, 0.0),
        ]);
        let mut q = QualityQueue::default();
        let (cl, ob) = no_obstacles();
        let set = select_control_points(&base, 0.5, &mut q, 1.5, 3.0, cl.as_ref(), 1.0);
        let refined = refine_path(
            Point3::ZERO,
            Point3::new(8.0, 8.0, 0.0),
            &set,
            cl.as_ref(),
            1.0,
            ob.as_ref(),
        )
        .unwrap();
        let RefinedPath::Spline(curve) = refined else { panic!("expected spline") };
        let samples = PathPolyline::from_points(curve.sample(64)).resample(0.5);
        let spline_max = max_turning_angle(&samples);
        let base_max = max_turning_angle(&base.resample(0.5));
        assert!(
            spline_max < base_max,
            "corner must round: spline {spline_max} vs base {base_max}"
        );
        assert!(spline_max < std::f64::consts::FRAC_PI_2 * 0.8);
    }

    #[test]
    fn empty_queue_smoothing_stays_near_base() {
        // Zigzag with 90-degree corners; pure smoothing must stay within
        // half a meter of the base polyline.
        let base = PathPolyline::from_points([
            Point3::ZERO,
            Point3::new(10.0, 0.0, 0.0),
            Point3::new(10.0, 6.0, 0.0),
            Point3::new(20.0, 6.0, 0.0),
        ]);
        let mut q = QualityQueue::default();
        let (cl, ob) = no_obstacles();
        let set = select_control_points(&base, 0.5, &mut q, 1.5, 3.0, cl.as_ref(), 1.0);
        let refined = refine_path(
            Point3::ZERO,
            Point3::new(20.0, 6.0, 0.0),
            &set,
            cl.as_ref(),
            1.0,
            ob.as_ref(),
        )
        .unwrap();
        let RefinedPath::Spline(curve) = refined else { panic!("expected spline") };
        let base_samples = base.resample(0.1);
        for s in curve.sample(400) {
            let min_d = base_samples
                .iter()
                .map(|b| b.dist(s))
                .fold(f64::INFINITY, f64::min);
            assert!(min_d <= 0.5 + 1e-6, "deviation {min_d} exceeds smoothing bound");
        }
    }

    #[test]
    fn blocked_corridor_falls_back() {
        // Obstacle sits right on the straight line; clearance can never be
        // met anywhere near the path, so refinement must fall back.
        let clearance = |p: Point3| {
            // A dense field of obstacles blankets the whole strip.
            let _ = p;
            Some(0.2)
        };
        let obstacle_at = |p: Point3| Some(p + Point3::new(0.0, 0.2, 0.0));
        let set = ControlPointSet {
            points: vec![Point3::new(5.0, 0.0, 0.0)],
            d_c: 1.5,
            r_c: 3.0,
        };
        let r = refine_path(
            Point3::ZERO,
            Point3::new(10.0, 0.0, 0.0),
            &set,
            &clearance,
            1.0,
            &obstacle_at,
        )
        .unwrap();
        assert!(matches!(r, RefinedPath::Fallback));
    }
}
