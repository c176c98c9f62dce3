use super::Point3;

/// Clamped cubic B-spline with a uniform interior knot vector.
///
/// The curve interpolates its first and last control points and is C²
/// in the interior (all interior knots are simple).
#[derive(Debug, Clone)]
pub struct BSplineCurve {
    control_points: Vec<Point3>,
    knots: Vec<f64>,
}

pub const DEGREE: usize = 3;

impl BSplineCurve {
    /// Builds a clamped cubic curve; requires at least 4 control points.
    pub fn clamped_cubic(control_points: Vec<Point3>) -> crate::Result<Self> {
        let n = control_points.len();
        if n < DEGREE + 1 {
            return Err(crate::Error::InsufficientPoints { needed: DEGREE + 1, got: n });
        }
        let spans = n - DEGREE;
        let mut knots = Vec::with_capacity(n + DEGREE + 1);
        knots.extend(std::iter::repeat(0.0).take(DEGREE + 1));
        for i in 1..spans {
            knots.push(i as f64 / spans as f64);
        }
        knots.extend(std::iter::repeat(1.0).take(DEGREE + 1));
        Ok(Self { control_points, knots })
    }

    pub fn control_points(&self) -> &[Point3] {
        &self.control_points
    }

    pub fn control_points_mut(&mut self) -> &mut [Point3] {
        &mut self.control_points
    }

    pub fn degree(&self) -> usize {
        DEGREE
    }

    pub fn knots(&self) -> &[f64] {
        &self.knots
    }

    /// Knot span index for parameter `t` in [0,1].
    fn span(&self, t: f64) -> usize {
        let n = self.control_points.len();
        if t >= 1.0 {
            return n - 1;
        }
        // Spans run from knots[DEGREE] to knots[n]; binary search the slot.
        let mut lo = DEGREE;
        let mut hi = n;
        while lo + 1 < hi {
            let mid = (lo + hi) / 2;
            if t < self.knots[mid] {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    /// Curve point at `t`, de Boor recursion; `t` outside [0,1] is clamped.
    pub fn eval(&self, t: f64) -> Point3 {
        let t = t.clamp(0.0, 1.0);
        let k = self.span(t);
        let mut d: Vec<Point3> = (0..=DEGREE)
            .map(|j| self.control_points[j + k - DEGREE])
            .collect();
        for r in 1..=DEGREE {
            for j in (r..=DEGREE).rev() {
                let i = j + k - DEGREE;
                let den = self.knots[i + DEGREE + 1 - r] - self.knots[i];
                let alpha = if den.abs() < f64::EPSILON {
                    0.0
                } else {
                    (t - self.knots[i]) / den
                };
                d[j] = d[j - 1] * (1.0 - alpha) + d[j] * alpha;
            }
        }
        d[DEGREE]
    }

    /// Dense uniform-parameter sampling with `n` segments (n+1 points).
    pub fn sample(&self, n: usize) -> Vec<Point3> {
        assert!(n >= 1);
        (0..=n).map(|i| self.eval(i as f64 / n as f64)).collect()
    }
}

/// Point on the curve at parameter `t` (clamped to [0,1]).
pub fn eval_bspline(curve: &BSplineCurve, t: f64) -> Point3 {
    curve.eval(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn curve(points: &[(f64, f64, f64)]) -> BSplineCurve {
        BSplineCurve::clamped_cubic(
            points.iter().map(|&(x, y, z)| Point3::new(x, y, z)).collect(),
        )
        .unwrap()
    }

    #[test]
    fn clamped_endpoints() {
        let c = curve(&[
            (0.0, 0.0, 0.0),
            (1.0, 2.0, 0.0),
            (3.0, -1.0, 1.0),
            (4.0, 0.0, 0.0),
            (6.0, 1.0, 2.0),
        ]);
        assert!(c.eval(0.0).dist(Point3::ZERO) < 1e-12);
        assert!(c.eval(1.0).dist(Point3::new(6.0, 1.0, 2.0)) < 1e-12);
        // Out-of-range parameters clamp to the endpoints.
        assert!(c.eval(-0.5).dist(Point3::ZERO) < 1e-12);
        assert!(c.eval(1.5).dist(Point3::new(6.0, 1.0, 2.0)) < 1e-12);
    }

    #[test]
    fn straight_controls_stay_on_line() {
        let c = curve(&[
            (0.0, 0.0, 0.0),
            (1.0, 1.0, 1.0),
            (2.5, 2.5, 2.5),
            (4.0, 4.0, 4.0),
            (5.0, 5.0, 5.0),
            (7.0, 7.0, 7.0),
        ]);
        let dir = Point3::new(1.0, 1.0, 1.0).normalized().unwrap();
        for i in 0..=100 {
            let p = c.eval(i as f64 / 100.0);
            let along = p.dot(dir);
            let off = (p - dir * along).norm();
            assert!(off < 1e-9, "point {p:?} strays {off} from the line");
        }
    }

    #[test]
    fn too_few_controls_is_an_error() {
        let r = BSplineCurve::clamped_cubic(vec![Point3::ZERO; 3]);
        assert!(matches!(r, Err(crate::Error::InsufficientPoints { .. })));
    }

    #[test]
    fn continuity_of_dense_samples() {
        // C² curve: discrete turning between adjacent dense samples stays tiny.
        let c = curve(&[
            (0.0, 0.0, 0.0),
            (2.0, 0.0, 0.0),
            (4.0, 0.0, 0.0),
            (4.0, 2.0, 0.0),
            (4.0, 4.0, 0.0),
            (6.0, 4.0, 0.0),
        ]);
        let pts = c.sample(2000);
        let max_turn = super::super::polyline::max_turning_angle(&pts);
        assert!(max_turn < 0.01, "turn {max_turn} too sharp for dense samples");
    }
}
