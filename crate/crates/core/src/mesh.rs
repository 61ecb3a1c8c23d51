//! Indexed triangle mesh with derived edge and vertex adjacency.
//!
//! The mesh is a 2-manifold with boundary: every undirected edge has one or
//! two incident faces. Construction rejects anything else. Faces may be
//! appended after construction (hole filling does this), and a snapshot can
//! be rolled back when a fill attempt fails halfway.

use std::collections::HashMap;

use nalgebra::{Point3, Vector3};
use thiserror::Error;

pub type Point = Point3<f64>;
pub type Vector = Vector3<f64>;

/// Relative tolerance for degenerate faces, scaled by the squared bbox diagonal.
pub const DEGENERATE_REL_TOL: f64 = 1e-15;

/// Undirected edge, smaller vertex index first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(pub usize, pub usize);

impl Edge {
    pub fn new(a: usize, b: usize) -> Self {
        if a < b {
            Edge(a, b)
        } else {
            Edge(b, a)
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("face {face} references vertex {index}, but the mesh has {vertex_count} vertices")]
    IndexOutOfRange {
        face: usize,
        index: usize,
        vertex_count: usize,
    },
    #[error("face {face} references vertex {vertex} more than once")]
    RepeatedVertex { face: usize, vertex: usize },
    #[error("face {second} duplicates face {first}")]
    DuplicateFace { first: usize, second: usize },
    #[error("edge ({}, {}) would have {count} incident faces", edge.0, edge.1)]
    NonManifoldEdge { edge: Edge, count: usize },
    #[error("vertex {0} has a non-finite coordinate")]
    NonFiniteCoordinate(usize),
    #[error("face {0} is degenerate")]
    DegenerateFace(usize),
    #[error("vertex {0} has no incident faces")]
    IsolatedVertex(usize),
    #[error("boundary vertex {vertex} has {count} incident boundary edges")]
    DegenerateBoundary { vertex: usize, count: usize },
}

#[derive(Debug, Clone, Copy, Default)]
struct IncidentFaces {
    faces: [usize; 2],
    count: u8,
}

impl IncidentFaces {
    fn as_slice(&self) -> &[usize] {
        &self.faces[..self.count as usize]
    }
}

/// Closed, simple ring of boundary vertices around one hole.
///
/// Traversal runs opposite to the half-edges of the adjacent faces, so a
/// triangle `(v[i], v[i+1], x)` placed inside the hole is oriented
/// consistently with its neighbours.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryLoop {
    vertices: Vec<usize>,
}

impl BoundaryLoop {
    pub fn new(vertices: Vec<usize>) -> Self {
        BoundaryLoop { vertices }
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Consecutive directed pairs, including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

/// Marker for [`TriangleMesh::rollback`].
#[derive(Debug, Clone, Copy)]
pub struct MeshSnapshot {
    vertex_count: usize,
    face_count: usize,
}

#[derive(Debug, Clone)]
pub struct TriangleMesh {
    vertices: Vec<Point>,
    faces: Vec<[usize; 3]>,
    edge_faces: HashMap<Edge, IncidentFaces>,
    vertex_faces: Vec<Vec<usize>>,
    degenerate: Vec<usize>,
    bbox: Option<(Point, Point)>,
}

impl Default for TriangleMesh {
    fn default() -> Self {
        TriangleMesh::empty()
    }
}

impl TriangleMesh {
    pub fn empty() -> Self {
        TriangleMesh {
            vertices: Vec::new(),
            faces: Vec::new(),
            edge_faces: HashMap::new(),
            vertex_faces: Vec::new(),
            degenerate: Vec::new(),
            bbox: None,
        }
    }

    /// Builds a mesh and derives its adjacency.
    ///
    /// Zero-area faces are kept and listed in [`degenerate_faces`](Self::degenerate_faces).
    pub fn new(vertices: Vec<Point>, faces: Vec<[usize; 3]>) -> Result<Self, MeshError> {
        let mut mesh = TriangleMesh::empty();
        mesh.vertices.reserve(vertices.len());
        for p in vertices {
            mesh.add_vertex(p)?;
        }
        mesh.faces.reserve(faces.len());
        mesh.edge_faces.reserve(faces.len() * 3 / 2 + 3);
        for f in faces {
            mesh.add_face(f)?;
        }
        Ok(mesh)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn faces(&self) -> &[[usize; 3]] {
        &self.faces
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn face(&self, f: usize) -> [usize; 3] {
        self.faces[f]
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_faces.len()
    }

    pub fn is_empty(&self) -> bool {
        self.faces.is_empty()
    }

    /// Faces flagged as zero-area when they were added.
    pub fn degenerate_faces(&self) -> &[usize] {
        &self.degenerate
    }

    /// All undirected edges with their incident-face count, sorted.
    pub fn edges(&self) -> Vec<(Edge, usize)> {
        let mut out: Vec<_> = self
            .edge_faces
            .iter()
            .map(|(e, inc)| (*e, inc.count as usize))
            .collect();
        out.sort_unstable();
        out
    }

    pub fn incident_faces(&self, a: usize, b: usize) -> &[usize] {
        self.edge_faces
            .get(&Edge::new(a, b))
            .map(IncidentFaces::as_slice)
            .unwrap_or(&[])
    }

    pub fn vertex_faces(&self, v: usize) -> &[usize] {
        &self.vertex_faces[v]
    }

    /// Vertices sharing an edge with `v`, sorted.
    pub fn vertex_neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::with_capacity(8);
        for &f in &self.vertex_faces[v] {
            for &w in &self.faces[f] {
                if w != v {
                    out.push(w);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    pub fn add_vertex(&mut self, p: Point) -> Result<usize, MeshError> {
        let index = self.vertices.len();
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(MeshError::NonFiniteCoordinate(index));
        }
        self.expand_bbox(&p);
        self.vertices.push(p);
        self.vertex_faces.push(Vec::new());
        Ok(index)
    }

    /// Moves a vertex. Adjacency is unchanged.
    pub fn set_vertex(&mut self, v: usize, p: Point) -> Result<(), MeshError> {
        if !(p.x.is_finite() && p.y.is_finite() && p.z.is_finite()) {
            return Err(MeshError::NonFiniteCoordinate(v));
        }
        self.expand_bbox(&p);
        self.vertices[v] = p;
        Ok(())
    }

    pub fn add_face(&mut self, face: [usize; 3]) -> Result<usize, MeshError> {
        let index = self.faces.len();
        let n = self.vertices.len();
        for &v in &face {
            if v >= n {
                return Err(MeshError::IndexOutOfRange {
                    face: index,
                    index: v,
                    vertex_count: n,
                });
            }
        }
        let [a, b, c] = face;
        if a == b || a == c {
            return Err(MeshError::RepeatedVertex { face: index, vertex: a });
        }
        if b == c {
            return Err(MeshError::RepeatedVertex { face: index, vertex: b });
        }
        let mut key = face;
        key.sort_unstable();
        for &other in self.incident_faces(a, b) {
            let mut k = self.faces[other];
            k.sort_unstable();
            if k == key {
                return Err(MeshError::DuplicateFace {
                    first: other,
                    second: index,
                });
            }
        }
        for (p, q) in [(a, b), (b, c), (c, a)] {
            let count = self.incident_faces(p, q).len();
            if count >= 2 {
                return Err(MeshError::NonManifoldEdge {
                    edge: Edge::new(p, q),
                    count: count + 1,
                });
            }
        }
        for (p, q) in [(a, b), (b, c), (c, a)] {
            let inc = self.edge_faces.entry(Edge::new(p, q)).or_default();
            inc.faces[inc.count as usize] = index;
            inc.count += 1;
        }
        for &v in &face {
            self.vertex_faces[v].push(index);
        }
        self.faces.push(face);
        if self.face_area_vector(index).norm() < self.degenerate_threshold() {
            self.degenerate.push(index);
        }
        Ok(index)
    }

    pub fn snapshot(&self) -> MeshSnapshot {
        MeshSnapshot {
            vertex_count: self.vertices.len(),
            face_count: self.faces.len(),
        }
    }

    /// Removes every face and vertex added after `snap`.
    pub fn rollback(&mut self, snap: MeshSnapshot) {
        while self.faces.len() > snap.face_count {
            let index = self.faces.len() - 1;
            let [a, b, c] = self.faces.pop().expect("non-empty");
            for (p, q) in [(a, b), (b, c), (c, a)] {
                let e = Edge::new(p, q);
                let inc = self.edge_faces.get_mut(&e).expect("edge of existing face");
                let slots = inc.count as usize;
                if let Some(pos) = inc.faces[..slots].iter().position(|&f| f == index) {
                    inc.faces[pos] = inc.faces[slots - 1];
                    inc.count -= 1;
                }
                if inc.count == 0 {
                    self.edge_faces.remove(&e);
                }
            }
            for v in [a, b, c] {
                self.vertex_faces[v].retain(|&f| f != index);
            }
            if self.degenerate.last() == Some(&index) {
                self.degenerate.pop();
            }
        }
        self.vertices.truncate(snap.vertex_count);
        self.vertex_faces.truncate(snap.vertex_count);
    }

    /// Axis-aligned bounding box of the current vertex positions.
    pub fn bbox(&self) -> Option<(Point, Point)> {
        let first = *self.vertices.first()?;
        let mut lo = first;
        let mut hi = first;
        for p in &self.vertices {
            for k in 0..3 {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        Some((lo, hi))
    }

    pub fn bbox_diagonal(&self) -> f64 {
        self.bbox().map(|(lo, hi)| (hi - lo).norm()).unwrap_or(0.0)
    }

    fn expand_bbox(&mut self, p: &Point) {
        match &mut self.bbox {
            None => self.bbox = Some((*p, *p)),
            Some((lo, hi)) => {
                for k in 0..3 {
                    lo[k] = lo[k].min(p[k]);
                    hi[k] = hi[k].max(p[k]);
                }
            }
        }
    }

    fn degenerate_threshold(&self) -> f64 {
        let diag2 = self
            .bbox
            .map(|(lo, hi)| (hi - lo).norm_squared())
            .unwrap_or(0.0);
        DEGENERATE_REL_TOL * diag2
    }

    /// Cross product of two face edges; its norm is twice the face area.
    pub fn face_area_vector(&self, f: usize) -> Vector {
        let [a, b, c] = self.faces[f];
        let (pa, pb, pc) = (self.vertices[a], self.vertices[b], self.vertices[c]);
        (pb - pa).cross(&(pc - pa))
    }

    pub fn face_area(&self, f: usize) -> f64 {
        0.5 * self.face_area_vector(f).norm()
    }

    pub fn face_normal(&self, f: usize) -> Result<Vector, MeshError> {
        let n = self.face_area_vector(f);
        let len = n.norm();
        if len < self.degenerate_threshold() || len == 0.0 {
            return Err(MeshError::DegenerateFace(f));
        }
        Ok(n / len)
    }

    /// Area-weighted average of the incident face normals, normalized.
    pub fn vertex_normal(&self, v: usize) -> Result<Vector, MeshError> {
        let incident = &self.vertex_faces[v];
        if incident.is_empty() {
            return Err(MeshError::IsolatedVertex(v));
        }
        let sum: Vector = incident.iter().map(|&f| self.face_area_vector(f)).sum();
        let len = sum.norm();
        if len == 0.0 || !len.is_finite() {
            return Err(MeshError::DegenerateFace(incident[0]));
        }
        Ok(sum / len)
    }

    /// Edges with exactly one incident face, sorted.
    pub fn boundary_edges(&self) -> Vec<Edge> {
        let mut out: Vec<Edge> = self
            .edge_faces
            .iter()
            .filter(|(_, inc)| inc.count == 1)
            .map(|(e, _)| *e)
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_watertight(&self) -> bool {
        self.edge_faces.values().all(|inc| inc.count == 2)
    }

    /// Traces every boundary loop. Loops start at their smallest vertex and
    /// are returned in order of that vertex.
    pub fn boundary_loops(&self) -> Result<Vec<BoundaryLoop>, MeshError> {
        // hole direction: reverse of the face's own half-edge
        let mut next: HashMap<usize, usize> = HashMap::new();
        let mut degree: HashMap<usize, usize> = HashMap::new();
        for e in self.boundary_edges() {
            let f = self.edge_faces[&e].faces[0];
            let (from, to) = if face_has_half_edge(&self.faces[f], e.0, e.1) {
                (e.1, e.0)
            } else {
                (e.0, e.1)
            };
            *degree.entry(e.0).or_default() += 1;
            *degree.entry(e.1).or_default() += 1;
            if next.insert(from, to).is_some() {
                return Err(MeshError::DegenerateBoundary {
                    vertex: from,
                    count: degree[&from].max(3),
                });
            }
        }
        let mut starts: Vec<usize> = degree.keys().copied().collect();
        starts.sort_unstable();
        for &v in &starts {
            if degree[&v] != 2 {
                return Err(MeshError::DegenerateBoundary {
                    vertex: v,
                    count: degree[&v],
                });
            }
        }
        let mut visited: HashMap<usize, bool> = HashMap::new();
        let mut loops = Vec::new();
        for &start in &starts {
            if visited.contains_key(&start) {
                continue;
            }
            let mut ring = vec![start];
            visited.insert(start, true);
            let mut cur = start;
            loop {
                let Some(&nx) = next.get(&cur) else {
                    return Err(MeshError::DegenerateBoundary {
                        vertex: cur,
                        count: degree[&cur],
                    });
                };
                if nx == start {
                    break;
                }
                if visited.insert(nx, true).is_some() {
                    return Err(MeshError::DegenerateBoundary {
                        vertex: nx,
                        count: degree[&nx],
                    });
                }
                ring.push(nx);
                cur = nx;
            }
            loops.push(BoundaryLoop::new(ring));
        }
        Ok(loops)
    }

    /// V - E + F.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edge_faces.len() as i64 + self.faces.len() as i64
    }

    /// True when every interior edge is traversed in opposite directions by
    /// its two faces.
    pub fn is_consistently_oriented(&self) -> bool {
        self.edge_faces.iter().all(|(e, inc)| {
            if inc.count != 2 {
                return true;
            }
            let f0 = &self.faces[inc.faces[0]];
            let f1 = &self.faces[inc.faces[1]];
            face_has_half_edge(f0, e.0, e.1) != face_has_half_edge(f1, e.0, e.1)
        })
    }

    /// Mesh with every face winding reversed.
    pub fn flipped(&self) -> TriangleMesh {
        let faces = self.faces.iter().map(|&[a, b, c]| [a, c, b]).collect();
        TriangleMesh::new(self.vertices.clone(), faces).expect("flipping preserves validity")
    }

    /// Total surface area.
    pub fn area(&self) -> f64 {
        (0..self.faces.len()).map(|f| self.face_area(f)).sum()
    }
}

/// Whether `face` contains the directed half-edge `a -> b`.
pub fn face_has_half_edge(face: &[usize; 3], a: usize, b: usize) -> bool {
    (0..3).any(|i| face[i] == a && face[(i + 1) % 3] == b)
}
