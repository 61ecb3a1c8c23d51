//! Surface distances between two meshes.
//!
//! Each surface is sampled at its vertices plus random area-uniform face
//! points; every sample carries a share of its face's area. `delta_max` is
//! the symmetric Hausdorff distance over the samples and `delta_avg` the
//! area-weighted mean distance over both sample sets.

pub mod distance;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::mesh::{Point, TriangleMesh};
pub use distance::{brute_force_distance, point_triangle_distance, Bvh};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricsError {
    #[error("mesh has no faces")]
    EmptyMesh,
    #[error("mesh has zero surface area")]
    ZeroArea,
    #[error("face sampling needs a positive sample budget")]
    NoSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    VerticesOnly,
    #[default]
    VerticesPlusFaceSamples,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SamplingSpec {
    pub mode: SamplingMode,
    /// Face samples per average face area, so about `density * faces` in total.
    pub density: f64,
    pub max_face_samples: usize,
    pub seed: u64,
}

impl Default for SamplingSpec {
    fn default() -> Self {
        SamplingSpec {
            mode: SamplingMode::VerticesPlusFaceSamples,
            density: 10.0,
            max_face_samples: 2_000_000,
            seed: 0,
        }
    }
}

/// A point on a surface with the area it stands for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    pub point: Point,
    pub weight: f64,
    /// Corners of the face a face sample was drawn from.
    pub source: Option<[Point; 3]>,
}

/// Vertex and random face samples of `mesh`; weights sum to its area.
pub fn sample_surface(mesh: &TriangleMesh, spec: &SamplingSpec) -> Result<Vec<Sample>, MetricsError> {
    if mesh.face_count() == 0 {
        return Err(MetricsError::EmptyMesh);
    }
    let areas: Vec<f64> = (0..mesh.face_count()).map(|f| mesh.face_area(f)).collect();
    let total: f64 = areas.iter().sum();
    if !(total > 0.0) {
        return Err(MetricsError::ZeroArea);
    }
    let target = match spec.mode {
        SamplingMode::VerticesOnly => 0.0,
        SamplingMode::VerticesPlusFaceSamples => {
            if !(spec.density > 0.0) || spec.max_face_samples == 0 {
                return Err(MetricsError::NoSamples);
            }
            (spec.density * mesh.face_count() as f64).min(spec.max_face_samples as f64)
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut vertex_weight = vec![0.0; mesh.vertex_count()];
    let mut used = vec![false; mesh.vertex_count()];
    let mut face_samples = Vec::new();
    for (f, &area) in areas.iter().enumerate() {
        let expected = target * area / total;
        let mut k = expected.floor() as usize;
        if target > 0.0 && rng.gen::<f64>() < expected - expected.floor() {
            k += 1;
        }
        let share = area / (k + 3) as f64;
        let [a, b, c] = mesh.face(f);
        for v in [a, b, c] {
            vertex_weight[v] += share;
            used[v] = true;
        }
        let (pa, pb, pc) = (mesh.vertex(a), mesh.vertex(b), mesh.vertex(c));
        for _ in 0..k {
            let (mut r1, mut r2): (f64, f64) = (rng.gen(), rng.gen());
            if r1 + r2 > 1.0 {
                r1 = 1.0 - r1;
                r2 = 1.0 - r2;
            }
            face_samples.push(Sample {
                point: pa + (pb - pa) * r1 + (pc - pa) * r2,
                weight: share,
                source: Some([pa, pb, pc]),
            });
        }
    }
    let mut out: Vec<Sample> = (0..mesh.vertex_count())
        .filter(|&v| used[v])
        .map(|v| Sample {
            point: mesh.vertex(v),
            weight: vertex_weight[v],
            source: None,
        })
        .collect();
    out.extend(face_samples);
    Ok(out)
}

/// Distances from samples of one surface to another surface.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OneSided {
    pub max: f64,
    pub weighted_sum: f64,
    pub weight: f64,
    pub samples: usize,
}

impl OneSided {
    pub fn mean(&self) -> f64 {
        self.weighted_sum / self.weight
    }
}

/// Distances are computed in parallel into an ordered buffer and reduced
/// sequentially, so the result does not depend on the thread count.
pub fn one_sided_distance(samples: &[Sample], target: &Bvh) -> Result<OneSided, MetricsError> {
    if target.is_empty() {
        return Err(MetricsError::EmptyMesh);
    }
    let d: Vec<f64> = samples
        .par_iter()
        .map(|s| {
            let (d2, _) = target.nearest_squared_from(&s.point, s.source.as_ref()).expect("non-empty target");
            d2.sqrt()
        })
        .collect();
    let mut out = OneSided {
        max: 0.0,
        weighted_sum: 0.0,
        weight: 0.0,
        samples: samples.len(),
    };
    for (s, &di) in samples.iter().zip(&d) {
        out.max = out.max.max(di);
        out.weighted_sum += s.weight * di;
        out.weight += s.weight;
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub delta_max: f64,
    pub delta_avg: f64,
    /// Both divided by the bounding-box diagonal of the reference surface.
    pub delta_max_normalized: f64,
    pub delta_avg_normalized: f64,
    pub forward: OneSided,
    pub backward: OneSided,
    pub reference_diagonal: f64,
}

/// Distances between a `reference` surface and a `candidate` surface.
/// `forward` samples the reference, `backward` the candidate.
pub fn hausdorff_report(
    reference: &TriangleMesh,
    candidate: &TriangleMesh,
    spec: &SamplingSpec,
) -> Result<DistanceReport, MetricsError> {
    let fwd_samples = sample_surface(reference, spec)?;
    let back_spec = SamplingSpec {
        seed: spec.seed.wrapping_add(0x9E37_79B9_7F4A_7C15),
        ..*spec
    };
    let back_samples = sample_surface(candidate, &back_spec)?;
    let forward = one_sided_distance(&fwd_samples, &Bvh::new(candidate))?;
    let backward = one_sided_distance(&back_samples, &Bvh::new(reference))?;
    let delta_max = forward.max.max(backward.max);
    let delta_avg = (forward.weighted_sum + backward.weighted_sum) / (forward.weight + backward.weight);
    let diag = reference.bbox_diagonal();
    Ok(DistanceReport {
        delta_max,
        delta_avg,
        delta_max_normalized: delta_max / diag,
        delta_avg_normalized: delta_avg / diag,
        forward,
        backward,
        reference_diagonal: diag,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(z: f64, scale: f64) -> TriangleMesh {
        let v = vec![
            Point::new(0.0, 0.0, z),
            Point::new(scale, 0.0, z),
            Point::new(scale, scale, z),
            Point::new(0.0, scale, z),
        ];
        TriangleMesh::new(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap()
    }

    #[test]
    fn weights_sum_to_area() {
        let m = square(0.0, 2.0);
        let s = sample_surface(&m, &SamplingSpec::default()).unwrap();
        let w: f64 = s.iter().map(|s| s.weight).sum();
        assert!((w - 4.0).abs() < 1e-12);
        assert!(s.len() >= 4 + 18);
        assert!(s.iter().all(|s| (0.0..=2.0).contains(&s.point.x) && (0.0..=2.0).contains(&s.point.y)));
    }

    #[test]
    fn parallel_planes_are_offset_apart() {
        let r = hausdorff_report(&square(0.0, 1.0), &square(0.25, 1.0), &SamplingSpec::default()).unwrap();
        assert!((r.delta_max - 0.25).abs() < 1e-15);
        assert!((r.delta_avg - 0.25).abs() < 1e-15);
        assert!((r.delta_max_normalized - 0.25 / 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn sampling_is_seeded() {
        let m = square(0.0, 1.0);
        let spec = SamplingSpec {
            seed: 7,
            ..SamplingSpec::default()
        };
        assert_eq!(sample_surface(&m, &spec).unwrap(), sample_surface(&m, &spec).unwrap());
        assert!(sample_surface(&TriangleMesh::empty(), &spec).is_err());
        let none = SamplingSpec {
            density: 0.0,
            ..spec
        };
        assert_eq!(sample_surface(&m, &none), Err(MetricsError::NoSamples));
    }

    #[test]
    fn vertices_only_mode_keeps_area_weights() {
        let m = square(0.0, 1.0);
        let spec = SamplingSpec {
            mode: SamplingMode::VerticesOnly,
            ..SamplingSpec::default()
        };
        let s = sample_surface(&m, &spec).unwrap();
        assert_eq!(s.len(), 4);
        assert!((s.iter().map(|s| s.weight).sum::<f64>() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn identical_curved_surfaces_are_exactly_zero_apart() {
        let v: Vec<Point> = (0..4)
            .map(|i| {
                let a = i as f64 * 1.3;
                Point::new(a.cos(), a.sin(), 0.1 * i as f64 + 0.37)
            })
            .collect();
        let m = TriangleMesh::new(v, vec![[0, 1, 2], [0, 2, 3]]).unwrap();
        let r = hausdorff_report(&m, &m, &SamplingSpec::default()).unwrap();
        assert_eq!((r.delta_max, r.delta_avg), (0.0, 0.0));
    }
}
