//! Exact point-to-triangle distance and a bounding-volume hierarchy over
//! mesh triangles for nearest-surface queries.

use crate::mesh::{Point, TriangleMesh, Vector};

fn closest_on_segment(p: &Point, a: &Point, b: &Point) -> Point {
    let ab = b - a;
    let len2 = ab.norm_squared();
    if len2 == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&ab) / len2).clamp(0.0, 1.0);
    a + ab * t
}

/// Closest vertex or edge point of triangle `abc` to `p`, or `None` when
/// the closest point is interior to a non-degenerate triangle.
fn closest_boundary_feature(p: &Point, a: &Point, b: &Point, c: &Point) -> Option<Point> {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(&ap);
    let d2 = ac.dot(&ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return Some(*a);
    }
    let bp = p - b;
    let d3 = ab.dot(&bp);
    let d4 = ac.dot(&bp);
    if d3 >= 0.0 && d4 <= d3 {
        return Some(*b);
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let denom = d1 - d3;
        if denom > 0.0 {
            return Some(a + ab * (d1 / denom));
        }
    }
    let cp = p - c;
    let d5 = ab.dot(&cp);
    let d6 = ac.dot(&cp);
    if d6 >= 0.0 && d5 <= d6 {
        return Some(*c);
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let denom = d2 - d6;
        if denom > 0.0 {
            return Some(a + ac * (d2 / denom));
        }
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let denom = (d4 - d3) + (d5 - d6);
        if denom > 0.0 {
            return Some(b + (c - b) * ((d4 - d3) / denom));
        }
    }
    if va + vb + vc > 0.0 && ab.cross(&ac).norm_squared() > 0.0 {
        return None;
    }
    // degenerate: nearest of the three edges
    [
        closest_on_segment(p, a, b),
        closest_on_segment(p, b, c),
        closest_on_segment(p, c, a),
    ]
    .into_iter()
    .min_by(|x, y| (p - x).norm_squared().total_cmp(&(p - y).norm_squared()))
}

/// Closest point of triangle `abc` to `p`, by Voronoi region tests.
/// Degenerate triangles fall back to their edges.
pub fn closest_point_on_triangle(p: &Point, a: &Point, b: &Point, c: &Point) -> Point {
    closest_boundary_feature(p, a, b, c).unwrap_or_else(|| {
        let n = (b - a).cross(&(c - a));
        p - n * ((p - a).dot(&n) / n.norm_squared())
    })
}

/// Interior points use the plane distance directly, so a point lying in
/// the triangle's plane gets exactly zero.
pub fn point_triangle_distance_squared(p: &Point, a: &Point, b: &Point, c: &Point) -> f64 {
    match closest_boundary_feature(p, a, b, c) {
        Some(q) => (p - q).norm_squared(),
        None => {
            let n = (b - a).cross(&(c - a));
            let h = (p - a).dot(&n);
            h * h / n.norm_squared()
        }
    }
}

pub fn point_triangle_distance(p: &Point, a: &Point, b: &Point, c: &Point) -> f64 {
    point_triangle_distance_squared(p, a, b, c).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Aabb {
    lo: Vector,
    hi: Vector,
}

impl Aabb {
    fn empty() -> Self {
        Aabb {
            lo: Vector::repeat(f64::INFINITY),
            hi: Vector::repeat(f64::NEG_INFINITY),
        }
    }

    fn grow(&mut self, p: &Vector) {
        self.lo = self.lo.inf(p);
        self.hi = self.hi.sup(p);
    }

    fn merge(&mut self, o: &Aabb) {
        self.lo = self.lo.inf(&o.lo);
        self.hi = self.hi.sup(&o.hi);
    }

    fn distance_squared(&self, p: &Point) -> f64 {
        let mut d = 0.0;
        for k in 0..3 {
            let e = (self.lo[k] - p[k]).max(0.0).max(p[k] - self.hi[k]);
            d += e * e;
        }
        d
    }
}

#[derive(Debug, Clone)]
enum Node {
    Leaf { bounds: Aabb, start: usize, end: usize },
    Inner { bounds: Aabb, left: usize, right: usize },
}

impl Node {
    fn bounds(&self) -> &Aabb {
        match self {
            Node::Leaf { bounds, .. } | Node::Inner { bounds, .. } => bounds,
        }
    }
}

const LEAF_SIZE: usize = 4;

/// Same three corners, in any order.
pub fn same_triangle(s: &[Point; 3], t: &[Point; 3]) -> bool {
    s.iter().all(|p| t.contains(p)) && t.iter().all(|p| s.contains(p))
}

/// Median-split hierarchy over the triangles of one mesh.
///
/// Queries return exactly the minimum over all triangles: a subtree is only
/// skipped when its box is farther than the best triangle by a relative
/// margin well above rounding error.
#[derive(Debug, Clone)]
pub struct Bvh {
    triangles: Vec<[Point; 3]>,
    order: Vec<usize>,
    nodes: Vec<Node>,
    slack: f64,
}

impl Bvh {
    pub fn new(mesh: &TriangleMesh) -> Self {
        let triangles: Vec<[Point; 3]> = mesh
            .faces()
            .iter()
            .map(|f| [mesh.vertex(f[0]), mesh.vertex(f[1]), mesh.vertex(f[2])])
            .collect();
        let diag = mesh.bbox_diagonal();
        let mut bvh = Bvh {
            order: (0..triangles.len()).collect(),
            triangles,
            nodes: Vec::new(),
            slack: 1e-12 * diag * diag,
        };
        if !bvh.triangles.is_empty() {
            let n = bvh.triangles.len();
            bvh.build(0, n);
        }
        bvh
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    fn tri_bounds(&self, t: usize) -> Aabb {
        let mut b = Aabb::empty();
        for p in &self.triangles[t] {
            b.grow(&p.coords);
        }
        b
    }

    fn build(&mut self, start: usize, end: usize) -> usize {
        let mut bounds = Aabb::empty();
        let mut centres = Aabb::empty();
        for &t in &self.order[start..end] {
            bounds.merge(&self.tri_bounds(t));
            let [a, b, c] = &self.triangles[t];
            centres.grow(&((a.coords + b.coords + c.coords) / 3.0));
        }
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { bounds, start, end });
            return id;
        }
        self.nodes.push(Node::Leaf { bounds, start, end });
        let extent = centres.hi - centres.lo;
        let axis = extent.imax();
        let mid = (start + end) / 2;
        let tris = &self.triangles;
        let key = |t: &usize| {
            let [a, b, c] = &tris[*t];
            a[axis] + b[axis] + c[axis]
        };
        self.order[start..end].select_nth_unstable_by(mid - start, |x, y| key(x).total_cmp(&key(y)).then(x.cmp(y)));
        let left = self.build(start, mid);
        let right = self.build(mid, end);
        self.nodes[id] = Node::Inner { bounds, left, right };
        id
    }

    /// Squared distance from `p` to the nearest triangle, with its index.
    pub fn nearest_squared(&self, p: &Point) -> Option<(f64, usize)> {
        self.nearest_squared_from(p, None)
    }

    /// As [`Bvh::nearest_squared`] for a point sampled on triangle `source`:
    /// a triangle with exactly the same corners is at distance zero, since
    /// the sample lies on it up to the rounding of its coordinates.
    pub fn nearest_squared_from(&self, p: &Point, source: Option<&[Point; 3]>) -> Option<(f64, usize)> {
        if self.nodes.is_empty() {
            return None;
        }
        let mut best = (f64::INFINITY, usize::MAX);
        let mut stack = vec![0usize];
        while let Some(id) = stack.pop() {
            let node = &self.nodes[id];
            if node.bounds().distance_squared(p) > best.0 * (1.0 + 1e-9) + self.slack {
                continue;
            }
            match node {
                Node::Leaf { start, end, .. } => {
                    for &t in &self.order[*start..*end] {
                        let [a, b, c] = &self.triangles[t];
                        let d = match source {
                            Some(s) if same_triangle(s, &self.triangles[t]) => 0.0,
                            _ => point_triangle_distance_squared(p, a, b, c),
                        };
                        if d < best.0 || (d == best.0 && t < best.1) {
                            best = (d, t);
                        }
                    }
                }
                Node::Inner { left, right, .. } => {
                    let dl = self.nodes[*left].bounds().distance_squared(p);
                    let dr = self.nodes[*right].bounds().distance_squared(p);
                    // visit the nearer child first
                    if dl <= dr {
                        stack.push(*right);
                        stack.push(*left);
                    } else {
                        stack.push(*left);
                        stack.push(*right);
                    }
                }
            }
        }
        Some(best)
    }

    pub fn nearest_distance(&self, p: &Point) -> Option<f64> {
        self.nearest_squared(p).map(|(d, _)| d.sqrt())
    }
}

/// Exhaustive nearest-triangle distance, the reference for [`Bvh`].
pub fn brute_force_distance(mesh: &TriangleMesh, p: &Point) -> Option<f64> {
    mesh.faces()
        .iter()
        .map(|f| point_triangle_distance_squared(p, &mesh.vertex(f[0]), &mesh.vertex(f[1]), &mesh.vertex(f[2])))
        .min_by(f64::total_cmp)
        .map(f64::sqrt)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tri() -> [Point; 3] {
        [
            Point::new(0.0, 0.0, 0.0),
            Point::new(1.0, 0.0, 0.0),
            Point::new(0.0, 1.0, 0.0),
        ]
    }

    #[test]
    fn distances_in_each_region() {
        let [a, b, c] = tri();
        let d = |x: f64, y: f64, z: f64| point_triangle_distance(&Point::new(x, y, z), &a, &b, &c);
        assert_eq!(d(0.25, 0.25, 2.0), 2.0);
        assert_eq!(d(-1.0, -1.0, 0.0), 2f64.sqrt());
        assert_eq!(d(2.0, 0.0, 0.0), 1.0);
        assert_eq!(d(0.5, -3.0, 4.0), 5.0);
        assert!((d(1.0, 1.0, 0.0) - 0.5f64.sqrt()).abs() < 1e-15);
        assert_eq!(d(0.2, 0.2, 0.0), 0.0);
    }

    #[test]
    fn degenerate_triangle_uses_edges() {
        let a = Point::new(0.0, 0.0, 0.0);
        let b = Point::new(2.0, 0.0, 0.0);
        let c = Point::new(1.0, 0.0, 0.0);
        assert_eq!(point_triangle_distance(&Point::new(1.0, 3.0, 0.0), &a, &b, &c), 3.0);
        assert_eq!(point_triangle_distance(&Point::new(1.0, 3.0, 0.0), &a, &a, &a), 10f64.sqrt());
    }

    #[test]
    fn bvh_matches_brute_force_on_a_grid() {
        let n = 12;
        let mut v = Vec::new();
        for j in 0..=n {
            for i in 0..=n {
                let (x, y) = (i as f64 / n as f64, j as f64 / n as f64);
                v.push(Point::new(x, y, (3.0 * x).sin() * (2.0 * y).cos() * 0.3));
            }
        }
        let mut f = Vec::new();
        for j in 0..n {
            for i in 0..n {
                let id = |i: usize, j: usize| j * (n + 1) + i;
                f.push([id(i, j), id(i + 1, j), id(i + 1, j + 1)]);
                f.push([id(i, j), id(i + 1, j + 1), id(i, j + 1)]);
            }
        }
        let mesh = TriangleMesh::new(v, f).unwrap();
        let bvh = Bvh::new(&mesh);
        for k in 0..200 {
            let t = k as f64 * 0.37;
            let p = Point::new(t.sin() * 1.5, (1.3 * t).cos() * 1.5, (0.7 * t).sin());
            let fast = bvh.nearest_distance(&p).unwrap();
            let slow = brute_force_distance(&mesh, &p).unwrap();
            assert_eq!(fast.to_bits(), slow.to_bits());
        }
    }
}
