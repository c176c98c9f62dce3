use super::Point3;

/// An ordered waypoint path with cached cumulative length.
///
/// Consecutive waypoints are kept distinct on construction; pushing a point
/// closer than `MIN_SEGMENT` to the tail is a no-op.
#[derive(Debug, Clone, Default)]
pub struct PathPolyline {
    waypoints: Vec<Point3>,
    cumulative: Vec<f64>,
}

const MIN_SEGMENT: f64 = 1e-9;

impl PathPolyline {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_points<I: IntoIterator<Item = Point3>>(points: I) -> Self {
        let mut p = Self::new();
        for pt in points {
            p.push(pt);
        }
        p
    }

    pub fn push(&mut self, p: Point3) {
        if let Some(&last) = self.waypoints.last() {
            if last.dist(p) < MIN_SEGMENT {
                return;
            }
            let len = self.length() + last.dist(p);
            self.cumulative.push(len);
        } else {
            self.cumulative.push(0.0);
        }
        self.waypoints.push(p);
    }

    pub fn waypoints(&self) -> &[Point3] {
        &self.waypoints
    }

    pub fn len(&self) -> usize {
        self.waypoints.len()
    }

    pub fn is_empty(&self) -> bool {
        self.waypoints.is_empty()
    }

    /// Total arc length in meters.
    pub fn length(&self) -> f64 {
        self.cumulative.last().copied().unwrap_or(0.0)
    }

    /// Arc-length position of waypoint `i` from the start.
    pub fn arc_at(&self, i: usize) -> f64 {
        self.cumulative[i]
    }

    /// Point at arc-length `s` from the start, clamped to the path range.
    pub fn point_at_arc(&self, s: f64) -> Point3 {
        assert!(!self.is_empty(), "point_at_arc on empty path");
        if self.waypoints.len() == 1 || s <= 0.0 {
            return self.waypoints[0];
        }
        let total = self.length();
        if s >= total {
            return *self.waypoints.last().unwrap();
        }
        let idx = match self
            .cumulative
            .binary_search_by(|c| c.partial_cmp(&s).unwrap())
        {
            Ok(i) => return self.waypoints[i],
            Err(i) => i,
        };
        let a = self.waypoints[idx - 1];
        let b = self.waypoints[idx];
        let seg = self.cumulative[idx] - self.cumulative[idx - 1];
        let t = (s - self.cumulative[idx - 1]) / seg;
        a + (b - a) * t
    }

    /// Resamples the path at (approximately) equal arc spacing, always
    /// including both endpoints.
    pub fn resample(&self, step: f64) -> Vec<Point3> {
        assert!(step > 0.0);
        if self.is_empty() {
            return Vec::new();
        }
        let total = self.length();
        if total <= MIN_SEGMENT {
            return vec![self.waypoints[0]];
        }
        let n = (total / step).ceil().max(1.0) as usize;
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..=n {
            out.push(self.point_at_arc(total * i as f64 / n as f64));
        }
        out
    }
}

/// Sum of absolute turning angles (radians) at interior waypoints.
///
/// Fewer than 3 waypoints turn nowhere, so the total is 0.
pub fn accumulated_curvature(path: &PathPolyline) -> f64 {
    turning_angles_sum(path.waypoints())
}

/// Same as [`accumulated_curvature`] but over a raw waypoint slice.
pub fn turning_angles_sum(points: &[Point3]) -> f64 {
    let mut total = 0.0;
    for w in points.windows(3) {
        total += turning_angle(w[0], w[1], w[2]);
    }
    total
}

/// Absolute turning angle at `b` between segments `a->b` and `b->c`.
pub fn turning_angle(a: Point3, b: Point3, c: Point3) -> f64 {
    let u = match (b - a).normalized() {
        Some(v) => v,
        None => return 0.0,
    };
    let v = match (c - b).normalized() {
        Some(v) => v,
        None => return 0.0,
    };
    u.dot(v).clamp(-1.0, 1.0).acos()
}

/// Maximum absolute turning angle over a sampled path.
pub fn max_turning_angle(points: &[Point3]) -> f64 {
    points
        .windows(3)
        .map(|w| turning_angle(w[0], w[1], w[2]))
        .fold(0.0, f64::max)
}
