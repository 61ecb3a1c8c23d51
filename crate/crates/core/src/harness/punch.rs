//! Cutting holes: remove every face whose centroid lies in a ball.

use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::mesh::{Point, TriangleMesh};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PunchMode {
    /// Balls must be pairwise disjoint; each makes its own hole.
    SingleLobe,
    /// Balls may overlap and merge into one irregular hole.
    MultiLobe,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PunchSpec {
    pub centers: Vec<Point>,
    pub radii: Vec<f64>,
    pub mode: PunchMode,
}

impl PunchSpec {
    pub fn single(center: Point, radius: f64) -> Self {
        PunchSpec {
            centers: vec![center],
            radii: vec![radius],
            mode: PunchMode::SingleLobe,
        }
    }

    pub fn validate(&self) -> Result<(), HarnessError> {
        if self.centers.len() != self.radii.len() || self.centers.is_empty() {
            return Err(HarnessError::InvalidPunch("need one radius per center".into()));
        }
        if let Some(r) = self.radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
            return Err(HarnessError::InvalidPunch(format!("radius {r} is not positive")));
        }
        if self.mode == PunchMode::SingleLobe {
            for i in 0..self.centers.len() {
                for j in (i + 1)..self.centers.len() {
                    if (self.centers[i] - self.centers[j]).norm() < self.radii[i] + self.radii[j] {
                        return Err(HarnessError::InvalidPunch(format!("balls {i} and {j} overlap")));
                    }
                }
            }
        }
        Ok(())
    }

    fn contains(&self, p: &Point) -> bool {
        self.centers.iter().zip(&self.radii).any(|(c, r)| (p - c).norm() < *r)
    }
}

/// What [`punch`] took out, in terms of the original mesh.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PunchRecord {
    /// Faces with their centroid inside a ball.
    pub removed_faces: Vec<usize>,
    /// Extra faces removed to undo pinched vertices.
    pub cleanup_faces: Vec<usize>,
    /// Vertices left without faces and dropped.
    pub dropped_vertices: Vec<usize>,
    /// New index of every original vertex that was kept.
    pub vertex_map: Vec<Option<usize>>,
}

/// Removes the punched faces, then any face around a vertex where two
/// hole boundaries would meet, then unreferenced vertices. Kept vertices
/// keep their exact coordinates and relative order.
pub fn punch(mesh: &TriangleMesh, spec: &PunchSpec) -> Result<(TriangleMesh, PunchRecord), HarnessError> {
    spec.validate()?;
    let rim: HashSet<usize> = mesh.boundary_edges().iter().flat_map(|e| [e.0, e.1]).collect();
    let mut removed = vec![false; mesh.face_count()];
    let mut record = PunchRecord::default();
    for f in 0..mesh.face_count() {
        let [a, b, c] = mesh.face(f);
        let centroid = Point::from((mesh.vertex(a).coords + mesh.vertex(b).coords + mesh.vertex(c).coords) / 3.0);
        if spec.contains(&centroid) {
            removed[f] = true;
            record.removed_faces.push(f);
        }
    }
    if record.removed_faces.is_empty() {
        return Err(HarnessError::InvalidPunch("no face centroid inside the punch".into()));
    }
    loop {
        // boundary degree of each vertex among the remaining faces
        let mut boundary_degree = vec![0usize; mesh.vertex_count()];
        for (e, _) in mesh.edges() {
            let live = mesh.incident_faces(e.0, e.1).iter().filter(|&&f| !removed[f]).count();
            if live == 1 {
                boundary_degree[e.0] += 1;
                boundary_degree[e.1] += 1;
            }
        }
        let pinched: BTreeSet<usize> = (0..mesh.vertex_count()).filter(|&v| boundary_degree[v] > 2).collect();
        if pinched.is_empty() {
            break;
        }
        let mut changed = false;
        for &v in &pinched {
            for &f in mesh.vertex_faces(v) {
                if !removed[f] {
                    removed[f] = true;
                    record.cleanup_faces.push(f);
                    changed = true;
                }
            }
        }
        if !changed {
            return Err(HarnessError::PunchBreaksManifold);
        }
    }
    record.cleanup_faces.sort_unstable();
    let touched: HashSet<usize> = record
        .removed_faces
        .iter()
        .chain(&record.cleanup_faces)
        .flat_map(|&f| mesh.face(f))
        .collect();
    if touched.iter().any(|v| rim.contains(v)) {
        return Err(HarnessError::TouchesRim);
    }
    let mut used = vec![false; mesh.vertex_count()];
    for f in (0..mesh.face_count()).filter(|&f| !removed[f]) {
        for v in mesh.face(f) {
            used[v] = true;
        }
    }
    let mut vertices = Vec::new();
    record.vertex_map = vec![None; mesh.vertex_count()];
    for v in 0..mesh.vertex_count() {
        if used[v] {
            record.vertex_map[v] = Some(vertices.len());
            vertices.push(mesh.vertex(v));
        } else {
            record.dropped_vertices.push(v);
        }
    }
    if vertices.is_empty() {
        return Err(HarnessError::PunchBreaksManifold);
    }
    let faces: Vec<[usize; 3]> = (0..mesh.face_count())
        .filter(|&f| !removed[f])
        .map(|f| mesh.face(f).map(|v| record.vertex_map[v].expect("used vertex")))
        .collect();
    let out = TriangleMesh::new(vertices, faces)?;
    Ok((out, record))
}

/// Boundary loops of `mesh` minus the outer rim of an open shape, which is
/// the loop containing the most edges.
pub fn hole_count(mesh: &TriangleMesh, open: bool) -> Result<usize, HarnessError> {
    let loops = mesh.boundary_loops()?;
    Ok(if open { loops.len().saturating_sub(1) } else { loops.len() })
}
