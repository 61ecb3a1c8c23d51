//! Umbrella smoothing of patch heights along a frame normal.

use super::height::HeightField;
use crate::analysis::LocalFrame;
use crate::mesh::{MeshError, TriangleMesh};

/// Jacobi umbrella iterations on the frame-normal component of `new_vertices`.
///
/// Each listed vertex takes the mean height of its 1-ring; tangential
/// coordinates and every unlisted vertex stay fixed. With a `reference`
/// field, the quantity averaged is the height above that field instead, so
/// the field's curvature survives the smoothing.
pub fn smooth_patch_heights(
    mesh: &mut TriangleMesh,
    new_vertices: &[usize],
    frame: &LocalFrame,
    iterations: usize,
    reference: Option<&HeightField>,
) -> Result<(), MeshError> {
    let offset = |mesh: &TriangleMesh, v: usize| {
        let (xy, h) = frame.to_local(&mesh.vertex(v));
        h - reference.map_or(0.0, |f| f.eval(xy))
    };
    let neighbors: Vec<Vec<usize>> = new_vertices.iter().map(|&v| mesh.vertex_neighbors(v)).collect();
    for _ in 0..iterations {
        let mut moves = Vec::with_capacity(new_vertices.len());
        for (&v, ring) in new_vertices.iter().zip(&neighbors) {
            if ring.is_empty() {
                continue;
            }
            let target = ring.iter().map(|&w| offset(mesh, w)).sum::<f64>() / ring.len() as f64;
            let delta = target - offset(mesh, v);
            if delta != 0.0 {
                moves.push((v, delta));
            }
        }
        for (v, delta) in moves {
            let p = mesh.vertex(v) + frame.n * delta;
            mesh.set_vertex(v, p)?;
        }
    }
    Ok(())
}
