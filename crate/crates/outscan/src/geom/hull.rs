use super::Point3;
use std::collections::HashMap;

/// Convex hull of a 3D point set.
///
/// For full-dimensional input this is a triangulated hull with outward unit
/// normals. Affinely degenerate input falls back to the lower-dimensional
/// hull: a planar set yields its 2D hull loop, a collinear set its two
/// endpoints, a coincident set all points.
#[derive(Debug, Clone)]
pub struct ConvexHull3 {
    vertices: Vec<u32>,
    faces: Vec<HullFace>,
    /// Ordered vertex loop for the planar (dimension 2) case.
    loop2d: Vec<u32>,
    dimension: usize,
}

/// One triangular hull facet with an outward unit normal.
#[derive(Debug, Clone, Copy)]
pub struct HullFace {
    pub verts: [u32; 3],
    pub normal: Point3,
    pub offset: f64,
}

impl HullFace {
    pub fn signed_dist(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }
}

impl ConvexHull3 {
    /// Hull vertex indices into the input slice, ascending.
    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    pub fn faces(&self) -> &[HullFace] {
        &self.faces
    }

    /// 0 (point), 1 (segment), 2 (polygon), or 3 (polytope).
    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Ordered boundary loop when `dimension() == 2`.
    pub fn loop2d(&self) -> &[u32] {
        &self.loop2d
    }

    /// Map from hull vertex to the faces incident to it.
    pub fn vertex_incidence(&self) -> HashMap<u32, Vec<usize>> {
        let mut map: HashMap<u32, Vec<usize>> = HashMap::new();
        for (fi, f) in self.faces.iter().enumerate() {
            for &v in &f.verts {
                map.entry(v).or_default().push(fi);
            }
        }
        map
    }
}

/// Indices of the extreme points of `points`.
///
/// Degenerate (coplanar/collinear/coincident) sets fall back to the
/// lower-dimensional hull; sets of fewer than 4 points report every point.
pub fn convex_hull_3d(points: &[Point3]) -> crate::Result<ConvexHull3> {
    let hull = hull_structure(points)?;
    Ok(hull)
}

/// Full hull computation; exposed within the crate for visibility queries.
pub(crate) fn hull_structure(points: &[Point3]) -> crate::Result<ConvexHull3> {
    if points.is_empty() {
        return Err(crate::Error::EmptyInput);
    }
    if points.len() < 4 {
        return Ok(ConvexHull3 {
            vertices: (0..points.len() as u32).collect(),
            faces: Vec::new(),
            loop2d: Vec::new(),
            dimension: points.len() - 1,
        });
    }

    let scale: f64 = points
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()).max(p.z.abs()))
        .fold(0.0, f64::max);
    // Distance tolerance for "on plane": coplanar within 1e-9 m is treated
    // as exactly coplanar; larger inputs scale with coordinate magnitude.
    let eps = (scale * 1e-12).max(1e-9);

    match initial_simplex(points, eps) {
        Simplex::Point => Ok(ConvexHull3 {
            vertices: coincident_vertices(points, eps),
            faces: Vec::new(),
            loop2d: Vec::new(),
            dimension: 0,
        }),
        Simplex::Segment(a, b) => {
            let dir = (points[b as usize] - points[a as usize]).normalized().unwrap();
            let (mut lo, mut hi) = (a, b);
            for (i, p) in points.iter().enumerate() {
                let t = p.dot(dir);
                if t < points[lo as usize].dot(dir) {
                    lo = i as u32;
                }
                if t > points[hi as usize].dot(dir) {
                    hi = i as u32;
                }
            }
            let mut vertices = vec![lo, hi];
            vertices.sort_unstable();
            vertices.dedup();
            Ok(ConvexHull3 {
                vertices,
                faces: Vec::new(),
                loop2d: Vec::new(),
                dimension: 1,
            })
        }
        Simplex::Triangle(a, b, c) => {
            let loop2d = planar_hull(points, a, b, c);
            let mut vertices = loop2d.clone();
            vertices.sort_unstable();
            Ok(ConvexHull3 {
                vertices,
                faces: Vec::new(),
                loop2d,
                dimension: 2,
            })
        }
        Simplex::Tetrahedron(a, b, c, d) => quickhull(points, [a, b, c, d], eps),
    }
}

enum Simplex {
    Point,
    Segment(u32, u32),
    Triangle(u32, u32, u32),
    Tetrahedron(u32, u32, u32, u32),
}

fn coincident_vertices(points: &[Point3], _eps: f64) -> Vec<u32> {
    (0..points.len() as u32).collect()
}

/// Picks a maximal affinely independent seed set, dimension by dimension.
fn initial_simplex(points: &[Point3], eps: f64) -> Simplex {
    // Extreme points along the coordinate axes.
    let mut extremes = [0u32; 6];
    for (i, p) in points.iter().enumerate() {
        let e = &mut extremes;
        if p.x < points[e[0] as usize].x {
            e[0] = i as u32;
        }
        if p.x > points[e[1] as usize].x {
            e[1] = i as u32;
        }
        if p.y < points[e[2] as usize].y {
            e[2] = i as u32;
        }
        if p.y > points[e[3] as usize].y {
            e[3] = i as u32;
        }
        if p.z < points[e[4] as usize].z {
            e[4] = i as u32;
        }
        if p.z > points[e[5] as usize].z {
            e[5] = i as u32;
        }
    }
    let (mut i0, mut i1, mut best) = (extremes[0], extremes[1], -1.0);
    for a in 0..6 {
        for b in (a + 1)..6 {
            let d = points[extremes[a] as usize].dist(points[extremes[b] as usize]);
            if d > best {
                best = d;
                i0 = extremes[a];
                i1 = extremes[b];
            }
        }
    }
    if best <= eps {
        return Simplex::Point;
    }

    let pa = points[i0 as usize];
    let dir = (points[i1 as usize] - pa).normalized().unwrap();
    let (mut i2, mut best) = (i0, -1.0);
    for (i, p) in points.iter().enumerate() {
        let v = *p - pa;
        let off = (v - dir * v.dot(dir)).norm();
        if off > best {
            best = off;
            i2 = i as u32;
        }
    }
    if best <= eps {
        return Simplex::Segment(i0, i1);
    }

    let n = (points[i1 as usize] - pa)
        .cross(points[i2 as usize] - pa)
        .normalized()
        .unwrap();
    let (mut i3, mut best) = (i0, -1.0);
    for (i, p) in points.iter().enumerate() {
        let off = (*p - pa).dot(n).abs();
        if off > best {
            best = off;
            i3 = i as u32;
        }
    }
    if best <= eps {
        return Simplex::Triangle(i0, i1, i2);
    }
    Simplex::Tetrahedron(i0, i1, i2, i3)
}

/// 2D hull (monotone chain) of a coplanar set, as an ordered index loop.
/// Strictly collinear mid-edge points are not vertices.
fn planar_hull(points: &[Point3], a: u32, b: u32, c: u32) -> Vec<u32> {
    let pa = points[a as usize];
    let n = (points[b as usize] - pa)
        .cross(points[c as usize] - pa)
        .normalized()
        .unwrap();
    let u = (points[b as usize] - pa).normalized().unwrap();
    let v = n.cross(u);
    let coords: Vec<(f64, f64)> = points
        .iter()
        .map(|p| ((*p - pa).dot(u), (*p - pa).dot(v)))
        .collect();

    let mut order: Vec<u32> = (0..points.len() as u32).collect();
    order.sort_by(|&i, &j| {
        coords[i as usize]
            .partial_cmp(&coords[j as usize])
            .unwrap()
            .then(i.cmp(&j))
    });
    order.dedup_by(|a, b| coords[*a as usize] == coords[*b as usize]);

    if order.len() == 1 {
        return order;
    }
    let cross = |o: u32, p: u32, q: u32| -> f64 {
        let (ox, oy) = coords[o as usize];
        let (px, py) = coords[p as usize];
        let (qx, qy) = coords[q as usize];
        (px - ox) * (qy - oy) - (py - oy) * (qx - ox)
    };
    let span: f64 = order
        .iter()
        .map(|&i| {
            let (x, y) = coords[i as usize];
            x.abs().max(y.abs())
        })
        .fold(0.0, f64::max);
    let turn_eps = (span * span * 1e-14).max(1e-18);

    let mut hull: Vec<u32> = Vec::new();
    for &i in order.iter() {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= turn_eps {
            hull.pop();
        }
        hull.push(i);
    }
    let lower_len = hull.len() + 1;
    for &i in order.iter().rev() {
        while hull.len() >= lower_len
            && cross(hull[hull.len() - 2], hull[hull.len() - 1], i) <= turn_eps
        {
            hull.pop();
        }
        hull.push(i);
    }
    hull.pop();
    hull
}

#[derive(Debug, Clone)]
struct Face {
    verts: [u32; 3],
    normal: Point3,
    offset: f64,
    /// Neighbor face across edge (verts[i], verts[(i+1)%3]).
    adj: [u32; 3],
    outside: Vec<u32>,
    furthest: u32,
    furthest_dist: f64,
    alive: bool,
}

impl Face {
    fn signed_dist(&self, p: Point3) -> f64 {
        self.normal.dot(p) - self.offset
    }

    fn push_outside(&mut self, idx: u32, dist: f64) {
        if self.outside.is_empty() || dist > self.furthest_dist {
            self.furthest = idx;
            self.furthest_dist = dist;
        }
        self.outside.push(idx);
    }
}

/// Builds a face wound counter-clockwise seen from outside (the `interior`
/// point sits on the negative side). Returns `None` when the triangle is too
/// thin for a trustworthy normal.
fn make_face(
    points: &[Point3],
    a: u32,
    b: u32,
    c: u32,
    interior: Point3,
    cross_floor: f64,
) -> Option<Face> {
    let (a, mut b, mut c) = (a, b, c);
    let pa = points[a as usize];
    let mut normal = (points[b as usize] - pa).cross(points[c as usize] - pa);
    if normal.norm_sq() <= cross_floor * cross_floor {
        return None;
    }
    if normal.dot(interior) - normal.dot(pa) > 0.0 {
        std::mem::swap(&mut b, &mut c);
        normal = -normal;
    }
    let normal = normal.normalized()?;
    let offset = normal.dot(pa);
    Some(Face {
        verts: [a, b, c],
        normal,
        offset,
        adj: [u32::MAX; 3],
        outside: Vec::new(),
        furthest: u32::MAX,
        furthest_dist: 0.0,
        alive: true,
    })
}

/// Links faces to each other by shared undirected edges.
fn link_adjacency(faces: &mut [Face]) {
    let mut edges: HashMap<(u32, u32), (u32, u8)> = HashMap::new();
    for fi in 0..faces.len() {
        if !faces[fi].alive {
            continue;
        }
        for s in 0..3u8 {
            let a = faces[fi].verts[s as usize];
            let b = faces[fi].verts[((s + 1) % 3) as usize];
            let k = (a.min(b), a.max(b));
            if let Some(&(other, os)) = edges.get(&k) {
                faces[fi].adj[s as usize] = other;
                faces[other as usize].adj[os as usize] = fi as u32;
            } else {
                edges.insert(k, (fi as u32, s));
            }
        }
    }
}

fn quickhull(points: &[Point3], seed: [u32; 4], eps: f64) -> crate::Result<ConvexHull3> {
    let interior = (points[seed[0] as usize]
        + points[seed[1] as usize]
        + points[seed[2] as usize]
        + points[seed[3] as usize])
        / 4.0;
    let scale: f64 = points
        .iter()
        .map(|p| p.x.abs().max(p.y.abs()).max(p.z.abs()))
        .fold(0.0, f64::max);
    let cross_floor = (scale * scale * 1e-14).max(1e-28);

    let seed_tris = [
        (seed[0], seed[1], seed[2]),
        (seed[0], seed[1], seed[3]),
        (seed[0], seed[2], seed[3]),
        (seed[1], seed[2], seed[3]),
    ];
    let mut faces: Vec<Face> = Vec::with_capacity(256);
    for (a, b, c) in seed_tris {
        faces.push(
            make_face(points, a, b, c, interior, cross_floor)
                .expect("seed tetrahedron is non-degenerate by construction"),
        );
    }
    link_adjacency(&mut faces);

    // Assign every point to the first face that sees it.
    for (i, p) in points.iter().enumerate() {
        let i = i as u32;
        if seed.contains(&i) {
            continue;
        }
        for fid in 0..4 {
            let d = faces[fid].signed_dist(*p);
            if d > eps {
                faces[fid].push_outside(i, d);
                break;
            }
        }
    }

    let mut pending: Vec<u32> = (0..4).rev().collect();
    let mut visible: Vec<u32> = Vec::new();
    let mut horizon: Vec<(u32, u32, u32)> = Vec::new(); // (edge a, edge b, outer face)
    let mut stack: Vec<u32> = Vec::new();
    let mut mark: Vec<u32> = vec![0; faces.len()];
    let mut round: u32 = 0;

    while let Some(fid) = pending.pop() {
        let fid = fid as usize;
        if !faces[fid].alive || faces[fid].outside.is_empty() {
            continue;
        }
        round += 1;
        let apex_idx = faces[fid].furthest;
        let apex = points[apex_idx as usize];

        // Collect the connected region of faces visible from the apex and
        // the horizon loop separating it from the rest of the hull.
        visible.clear();
        horizon.clear();
        stack.clear();
        stack.push(fid as u32);
        mark[fid] = round;
        while let Some(cur) = stack.pop() {
            visible.push(cur);
            let verts = faces[cur as usize].verts;
            let adj = faces[cur as usize].adj;
            for s in 0..3 {
                let nb = adj[s];
                debug_assert!(nb != u32::MAX, "hull adjacency must be complete");
                if mark[nb as usize] == round {
                    continue;
                }
                if faces[nb as usize].signed_dist(apex) > eps {
                    mark[nb as usize] = round;
                    stack.push(nb);
                } else {
                    // Edge (a, b) separates visible from hidden.
                    horizon.push((verts[s], verts[(s + 1) % 3], nb));
                }
            }
        }

        // Replace the visible region with a fan of faces around the apex.
        let first_new = faces.len();
        for &(a, b, outer) in &horizon {
            let f = match make_face(points, a, b, apex_idx, interior, cross_floor) {
                Some(f) => f,
                None => {
                    // Sliver triangle: borrow the hidden neighbor's plane so
                    // the fan stays closed with a sane outward orientation.
                    let outer_face = &faces[outer as usize];
                    let normal = outer_face.normal;
                    Face {
                        verts: [a, b, apex_idx],
                        normal,
                        offset: normal.dot(apex),
                        adj: [u32::MAX; 3],
                        outside: Vec::new(),
                        furthest: u32::MAX,
                        furthest_dist: 0.0,
                        alive: true,
                    }
                }
            };
            faces.push(f);
        }
        mark.resize(faces.len(), 0);

        // Stitch adjacency: horizon edges attach to their outer faces, apex
        // edges pair up among the new fan faces.
        let mut apex_edges: HashMap<u32, (u32, u8)> = HashMap::new();
        for (k, &(a, b, outer)) in horizon.iter().enumerate() {
            let nf = (first_new + k) as u32;
            let verts = faces[nf as usize].verts;
            for s in 0..3u8 {
                let va = verts[s as usize];
                let vb = verts[((s + 1) % 3) as usize];
                if (va == a && vb == b) || (va == b && vb == a) {
                    faces[nf as usize].adj[s as usize] = outer;
                    let of = &mut faces[outer as usize];
                    for os in 0..3 {
                        let oa = of.verts[os];
                        let ob = of.verts[(os + 1) % 3];
                        if (oa == a && ob == b) || (oa == b && ob == a) {
                            of.adj[os] = nf;
                        }
                    }
                } else {
                    let other = if va == apex_idx { vb } else { va };
                    match apex_edges.remove(&other) {
                        Some((f0, s0)) => {
                            faces[f0 as usize].adj[s0 as usize] = nf;
                            faces[nf as usize].adj[s as usize] = f0;
                        }
                        None => {
                            apex_edges.insert(other, (nf, s));
                        }
                    }
                }
            }
        }
        debug_assert!(apex_edges.is_empty(), "apex fan must close");

        // Drop the visible faces and re-home their conflict points.
        let mut orphans: Vec<u32> = Vec::new();
        for &vf in &visible {
            let f = &mut faces[vf as usize];
            f.alive = false;
            orphans.append(&mut f.outside);
        }
        for idx in orphans {
            if idx == apex_idx {
                continue;
            }
            let p = points[idx as usize];
            for nf in first_new..faces.len() {
                let d = faces[nf].signed_dist(p);
                if d > eps {
                    faces[nf].push_outside(idx, d);
                    break;
                }
            }
        }
        for nf in first_new..faces.len() {
            if !faces[nf].outside.is_empty() {
                pending.push(nf as u32);
            }
        }
    }

    let mut vertices: Vec<u32> = Vec::new();
    let mut out_faces: Vec<HullFace> = Vec::new();
    for f in faces.iter().filter(|f| f.alive) {
        vertices.extend_from_slice(&f.verts);
        out_faces.push(HullFace { verts: f.verts, normal: f.normal, offset: f.offset });
    }
    vertices.sort_unstable();
    vertices.dedup();
    Ok(ConvexHull3 {
        vertices,
        faces: out_faces,
        loop2d: Vec::new(),
        dimension: 3,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    #[test]
    fn cube_corners_exclude_center() {
        let mut pts: Vec<Point3> = Vec::new();
        for x in [0.0, 1.0] {
            for y in [0.0, 1.0] {
                for z in [0.0, 1.0] {
                    pts.push(Point3::new(x, y, z));
                }
            }
        }
        pts.push(Point3::new(0.5, 0.5, 0.5));
        let hull = convex_hull_3d(&pts).unwrap();
        assert_eq!(hull.dimension(), 3);
        assert_eq!(hull.vertices(), (0..8).collect::<Vec<u32>>());
    }

    #[test]
    fn tetrahedron_is_its_own_hull() {
        let pts = vec![
            Point3::new(0.0, 0.0, 0.0),
            Point3::new(1.0, 0.0, 0.0),
            Point3::new(0.0, 1.0, 0.0),
            Point3::new(0.0, 0.0, 1.0),
        ];
        let hull = convex_hull_3d(&pts).unwrap();
        assert_eq!(hull.vertices(), &[0, 1, 2, 3]);
    }

    #[test]
    fn fewer_than_four_points_report_all() {
        let pts = vec![Point3::ZERO, Point3::new(1.0, 0.0, 0.0)];
        let hull = convex_hull_3d(&pts).unwrap();
        assert_eq!(hull.vertices(), &[0, 1]);
        assert_eq!(hull.dimension(), 1);
    }

    #[test]
    fn collinear_points_fall_back_to_endpoints() {
        let pts: Vec<Point3> = (0..10)
            .map(|i| Point3::new(i as f64, 2.0 * i as f64, -i as f64))
            .collect();
        let hull = convex_hull_3d(&pts).unwrap();
        assert_eq!(hull.dimension(), 1);
        assert_eq!(hull.vertices(), &[0, 9]);
    }

    #[test]
    fn coplanar_points_fall_back_to_2d_hull() {
        // Unit square corners plus interior and mid-edge points, in a
        // tilted plane.
        let u = Point3::new(1.0, 0.0, 1.0).normalized().unwrap();
        let v = Point3::new(0.0, 1.0, 0.0);
        let emb = |x: f64, y: f64| u * x + v * y;
        let pts = vec![
            emb(0.0, 0.0),
            emb(1.0, 0.0),
            emb(1.0, 1.0),
            emb(0.0, 1.0),
            emb(0.5, 0.5),
            emb(0.5, 0.0),
        ];
        let hull = convex_hull_3d(&pts).unwrap();
        assert_eq!(hull.dimension(), 2);
        assert_eq!(hull.vertices(), &[0, 1, 2, 3]);
    }

    #[test]
    fn all_input_points_lie_inside_or_on_hull() {
        let mut rng = StdRng::seed_from_u64(21);
        for trial in 0..10 {
            let pts: Vec<Point3> = (0..300)
                .map(|_| {
                    Point3::new(
                        rng.gen_range(-5.0..5.0),
                        rng.gen_range(-5.0..5.0),
                        rng.gen_range(-5.0..5.0),
                    )
                })
                .collect();
            let hull = convex_hull_3d(&pts).unwrap();
            for p in &pts {
                for f in hull.faces() {
                    assert!(
                        f.signed_dist(*p) <= 1e-7,
                        "trial {trial}: point {p:?} above face by {}",
                        f.signed_dist(*p)
                    );
                }
            }
        }
    }

    #[test]
    fn sphere_boundary_points_are_the_hull() {
        // 50 well-spread boundary points (Fibonacci sphere) plus 1000
        // interior points with a comfortable margin.
        let mut pts = Vec::new();
        let n_sphere = 50;
        let golden = std::f64::consts::PI * (3.0 - 5.0_f64.sqrt());
        for i in 0..n_sphere {
            let y = 1.0 - 2.0 * (i as f64 + 0.5) / n_sphere as f64;
            let r = (1.0 - y * y).sqrt();
            let th = golden * i as f64;
            pts.push(Point3::new(r * th.cos(), y, r * th.sin()));
        }
        let mut rng = StdRng::seed_from_u64(8);
        for _ in 0..1000 {
            loop {
                let p = Point3::new(
                    rng.gen_range(-0.7..0.7),
                    rng.gen_range(-0.7..0.7),
                    rng.gen_range(-0.7..0.7),
                );
                if p.norm() <= 0.7 {
                    pts.push(p);
                    break;
                }
            }
        }
        let hull = convex_hull_3d(&pts).unwrap();
        assert_eq!(hull.vertices(), (0..n_sphere as u32).collect::<Vec<u32>>());
    }
}
