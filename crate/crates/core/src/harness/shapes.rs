//! Procedural test surfaces with known analytic form.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::mesh::{Point, TriangleMesh, Vector};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SyntheticShape {
    /// Geodesic icosphere, `20 f^2` faces.
    Sphere { radius: f64, target_faces: usize },
    /// Ring torus around the z axis.
    Torus { major: f64, minor: f64, target_faces: usize },
    /// Flat grid over `[-1, 1]^2`.
    Plane { target_faces: usize },
    /// `z = k (x^2 - y^2)` over `[-1, 1]^2`.
    Saddle { curvature: f64, target_faces: usize },
    /// `z = -t |x|`, where the two halves' normals differ by `bend_degrees`.
    Crease { bend_degrees: f64, target_faces: usize },
    /// `z = -t (|x| + |y|)`: two creases crossing at the origin.
    TwoCrease { bend_degrees: f64, target_faces: usize },
}

impl SyntheticShape {
    pub const NAMES: [&'static str; 6] = ["sphere", "torus", "plane", "saddle", "crease", "two-crease"];

    /// Shape by name with default parameters.
    pub fn named(name: &str, target_faces: usize) -> Option<Self> {
        Some(match name {
            "sphere" => SyntheticShape::Sphere {
                radius: 1.0,
                target_faces,
            },
            "torus" => SyntheticShape::Torus {
                major: 1.0,
                minor: 0.35,
                target_faces,
            },
            "plane" => SyntheticShape::Plane { target_faces },
            "saddle" => SyntheticShape::Saddle {
                curvature: 0.3,
                target_faces,
            },
            "crease" => SyntheticShape::Crease {
                bend_degrees: 90.0,
                target_faces,
            },
            "two-crease" => SyntheticShape::TwoCrease {
                bend_degrees: 90.0,
                target_faces,
            },
            _ => return None,
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            SyntheticShape::Sphere { .. } => "sphere",
            SyntheticShape::Torus { .. } => "torus",
            SyntheticShape::Plane { .. } => "plane",
            SyntheticShape::Saddle { .. } => "saddle",
            SyntheticShape::Crease { .. } => "crease",
            SyntheticShape::TwoCrease { .. } => "two-crease",
        }
    }

    pub fn target_faces(&self) -> usize {
        match *self {
            SyntheticShape::Sphere { target_faces, .. }
            | SyntheticShape::Torus { target_faces, .. }
            | SyntheticShape::Plane { target_faces }
            | SyntheticShape::Saddle { target_faces, .. }
            | SyntheticShape::Crease { target_faces, .. }
            | SyntheticShape::TwoCrease { target_faces, .. } => target_faces,
        }
    }

    pub fn is_closed(&self) -> bool {
        matches!(self, SyntheticShape::Sphere { .. } | SyntheticShape::Torus { .. })
    }

    /// Height function of the open shapes.
    pub fn height(&self, x: f64, y: f64) -> Option<f64> {
        match *self {
            SyntheticShape::Plane { .. } => Some(0.0),
            SyntheticShape::Saddle { curvature, .. } => Some(curvature * (x * x - y * y)),
            SyntheticShape::Crease { bend_degrees, .. } => Some(-slope(bend_degrees) * x.abs()),
            SyntheticShape::TwoCrease { bend_degrees, .. } => Some(-slope(bend_degrees) * (x.abs() + y.abs())),
            SyntheticShape::Sphere { .. } | SyntheticShape::Torus { .. } => None,
        }
    }

    /// Signed offset of `p` from the exact surface: radial for the closed
    /// shapes, vertical for the height fields.
    pub fn analytic_offset(&self, p: &Point) -> f64 {
        match *self {
            SyntheticShape::Sphere { radius, .. } => p.coords.norm() - radius,
            SyntheticShape::Torus { major, minor, .. } => {
                let rho = (p.x * p.x + p.y * p.y).sqrt() - major;
                (rho * rho + p.z * p.z).sqrt() - minor
            }
            _ => p.z - self.height(p.x, p.y).expect("height field"),
        }
    }

    pub fn generate(&self) -> TriangleMesh {
        match *self {
            SyntheticShape::Sphere { radius, target_faces } => {
                let f = ((target_faces as f64 / 20.0).sqrt().round() as usize).max(1);
                icosphere(radius, f)
            }
            SyntheticShape::Torus {
                major,
                minor,
                target_faces,
            } => {
                let nv = ((target_faces as f64 / 4.0).sqrt().round() as usize).max(3);
                torus(major, minor, 2 * nv, nv)
            }
            _ => {
                let n = grid_resolution(self.target_faces());
                let shape = *self;
                grid(n, move |x, y| shape.height(x, y).expect("height field"))
            }
        }
    }
}

/// Slope giving a normal deviation of `bend_degrees` between the halves.
pub fn slope(bend_degrees: f64) -> f64 {
    (bend_degrees.to_radians() / 2.0).tan()
}

/// Even cell count per side with `2 n^2` close to `target_faces`.
fn grid_resolution(target_faces: usize) -> usize {
    let n = (target_faces as f64 / 2.0).sqrt();
    (((n / 2.0).round() as usize) * 2).max(2)
}

/// `n x n` cells over `[-1, 1]^2`, each split along the diagonal that
/// points away from the origin, so the mesh is symmetric under `x -> -x`
/// and `y -> -y`.
fn grid(n: usize, height: impl Fn(f64, f64) -> f64) -> TriangleMesh {
    let coord = |i: usize| -1.0 + 2.0 * i as f64 / n as f64;
    let mut v = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            let (x, y) = (coord(i), coord(j));
            v.push(Point::new(x, y, height(x, y)));
        }
    }
    let id = |i: usize, j: usize| j * (n + 1) + i;
    let mut f = Vec::with_capacity(2 * n * n);
    for j in 0..n {
        for i in 0..n {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            let same_side = (2 * i + 1 < n) == (2 * j + 1 < n);
            if same_side {
                f.push([a, b, c]);
                f.push([a, c, d]);
            } else {
                f.push([a, b, d]);
                f.push([b, c, d]);
            }
        }
    }
    TriangleMesh::new(v, f).expect("grid is a valid mesh")
}

fn icosahedron() -> (Vec<Vector>, Vec<[usize; 3]>) {
    let p = (1.0 + 5f64.sqrt()) / 2.0;
    let v: Vec<Vector> = [
        (-1.0, p, 0.0),
        (1.0, p, 0.0),
        (-1.0, -p, 0.0),
        (1.0, -p, 0.0),
        (0.0, -1.0, p),
        (0.0, 1.0, p),
        (0.0, -1.0, -p),
        (0.0, 1.0, -p),
        (p, 0.0, -1.0),
        (p, 0.0, 1.0),
        (-p, 0.0, -1.0),
        (-p, 0.0, 1.0),
    ]
    .iter()
    .map(|&(x, y, z)| Vector::new(x, y, z).normalize())
    .collect();
    let f = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];
    (v, f)
}

/// Subdivides each icosahedron face into `f^2` triangles and projects the
/// points onto the sphere. Points on shared edges are keyed by their
/// icosahedron-vertex weights, so each is created once.
fn icosphere(radius: f64, f: usize) -> TriangleMesh {
    let (base, faces) = icosahedron();
    let mut index: HashMap<Vec<(usize, usize)>, usize> = HashMap::new();
    let mut verts: Vec<Point> = Vec::new();
    let mut out = Vec::with_capacity(20 * f * f);
    for face in &faces {
        let mut vid = |i: usize, j: usize| -> usize {
            let mut key: Vec<(usize, usize)> = [(face[0], f - i - j), (face[1], i), (face[2], j)]
                .into_iter()
                .filter(|&(_, w)| w > 0)
                .collect();
            key.sort_unstable();
            *index.entry(key.clone()).or_insert_with(|| {
                let p: Vector = key.iter().map(|&(c, w)| base[c] * w as f64).sum();
                verts.push(Point::from(p.normalize() * radius));
                verts.len() - 1
            })
        };
        for i in 0..f {
            for j in 0..(f - i) {
                let a = vid(i, j);
                let b = vid(i + 1, j);
                let c = vid(i, j + 1);
                out.push([a, b, c]);
                if i + j + 1 < f {
                    let d = vid(i + 1, j + 1);
                    out.push([b, d, c]);
                }
            }
        }
    }
    TriangleMesh::new(verts, out).expect("icosphere is a valid mesh")
}

fn torus(major: f64, minor: f64, nu: usize, nv: usize) -> TriangleMesh {
    let mut v = Vec::with_capacity(nu * nv);
    for i in 0..nu {
        let u = std::f64::consts::TAU * i as f64 / nu as f64;
        for j in 0..nv {
            let w = std::f64::consts::TAU * j as f64 / nv as f64;
            let r = major + minor * w.cos();
            v.push(Point::new(r * u.cos(), r * u.sin(), minor * w.sin()));
        }
    }
    let id = |i: usize, j: usize| (i % nu) * nv + (j % nv);
    let mut f = Vec::with_capacity(2 * nu * nv);
    for i in 0..nu {
        for j in 0..nv {
            let (a, b, c, d) = (id(i, j), id(i + 1, j), id(i + 1, j + 1), id(i, j + 1));
            f.push([a, b, c]);
            f.push([a, c, d]);
        }
    }
    TriangleMesh::new(v, f).expect("torus is a valid mesh")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sphere_is_closed_and_round() {
        let shape = SyntheticShape::named("sphere", 2000).unwrap();
        let m = shape.generate();
        assert_eq!(m.face_count(), 20 * 100);
        assert!(m.is_watertight());
        assert_eq!(m.euler_characteristic(), 2);
        assert!(m.is_consistently_oriented());
        assert!(m.vertices().iter().all(|p| shape.analytic_offset(p).abs() < 1e-12));
        // outward orientation: positive signed volume
        let vol: f64 = m
            .faces()
            .iter()
            .map(|f| m.vertex(f[0]).coords.dot(&m.vertex(f[1]).coords.cross(&m.vertex(f[2]).coords)))
            .sum();
        assert!(vol > 0.0);
    }

    #[test]
    fn torus_has_genus_one() {
        let m = SyntheticShape::named("torus", 3000).unwrap().generate();
        assert!(m.is_watertight());
        assert_eq!(m.euler_characteristic(), 0);
        assert!(m.is_consistently_oriented());
        assert!((m.face_count() as f64 / 3000.0 - 1.0).abs() < 0.05);
    }

    #[test]
    fn open_shapes_have_one_rim() {
        for name in ["plane", "saddle", "crease", "two-crease"] {
            let m = SyntheticShape::named(name, 3200).unwrap().generate();
            assert_eq!(m.face_count(), 3200, "{name}");
            assert_eq!(m.boundary_loops().unwrap().len(), 1, "{name}");
            assert_eq!(m.euler_characteristic(), 1);
            assert!(m.is_consistently_oriented());
        }
    }

    #[test]
    fn crease_has_one_sharp_polyline() {
        let m = SyntheticShape::named("crease", 800).unwrap().generate();
        let mut sharp = Vec::new();
        for (e, count) in m.edges() {
            if count != 2 {
                continue;
            }
            let fs = m.incident_faces(e.0, e.1);
            let c = m.face_normal(fs[0]).unwrap().dot(&m.face_normal(fs[1]).unwrap());
            if c < 0.99 {
                assert!(c.abs() < 1e-12, "dihedral cosine {c}");
                sharp.push(e);
            }
        }
        // all on x = 0, forming the full column of 20 edges
        assert_eq!(sharp.len(), 20);
        assert!(sharp.iter().all(|e| m.vertex(e.0).x == 0.0 && m.vertex(e.1).x == 0.0));
    }
}
