//! Synthetic ground truth: generate a shape, punch holes, fill them with
//! each method and measure the result against the untouched original.

pub mod punch;
pub mod shapes;

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::fill::{fill_all_holes, FillConfig, FillMethod};
use crate::mesh::{MeshError, Point, TriangleMesh, Vector};
use crate::metrics::{hausdorff_report, DistanceReport, SamplingSpec};
pub use punch::{hole_count, punch, PunchMode, PunchRecord, PunchSpec};
pub use shapes::SyntheticShape;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HarnessError {
    #[error("invalid punch: {0}")]
    InvalidPunch(String),
    #[error("punch reaches the outer rim of an open shape")]
    TouchesRim,
    #[error("punch leaves a non-manifold surface")]
    PunchBreaksManifold,
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

pub fn mean_edge_length(mesh: &TriangleMesh) -> f64 {
    let edges = mesh.edges();
    if edges.is_empty() {
        return 0.0;
    }
    edges.iter().map(|(e, _)| (mesh.vertex(e.0) - mesh.vertex(e.1)).norm()).sum::<f64>() / edges.len() as f64
}

/// One ball on the shape surface, sized for a hole about `span` mean edge
/// lengths across. With `on_crease`, crease shapes are punched at the
/// origin where the creases run; otherwise away from them.
pub fn standard_punch(shape: &SyntheticShape, mesh: &TriangleMesh, span: f64, on_crease: bool) -> PunchSpec {
    let radius = 0.5 * span * mean_edge_length(mesh);
    let center = match *shape {
        SyntheticShape::Sphere { radius: r, .. } => Point::from(Vector::new(0.3, 0.2, 1.0).normalize() * r),
        SyntheticShape::Torus { major, minor, .. } => Point::new(major + minor, 0.0, 0.0),
        _ => {
            let (x, y) = if on_crease { (0.0, 0.0) } else { (0.5, 0.0) };
            Point::new(x, y, shape.height(x, y).expect("height field"))
        }
    };
    PunchSpec::single(center, radius)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BenchConfig {
    pub fill: FillConfig,
    pub sampling: SamplingSpec,
    /// Record wall-clock runtimes; off keeps the output reproducible.
    pub timing: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            fill: FillConfig::default(),
            sampling: SamplingSpec::default(),
            timing: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRow {
    pub shape: String,
    pub faces: usize,
    pub holes: usize,
    pub method: FillMethod,
    pub report: Option<DistanceReport>,
    pub new_vertices: usize,
    pub new_faces: usize,
    pub runtime_ms: Option<f64>,
    pub seed: u64,
    /// `ok`, `partial (k failed)` or the metrics error.
    pub status: String,
}

/// Fills a copy of `punched` with each method and compares it with `original`.
pub fn run_benchmark(
    shape_name: &str,
    original: &TriangleMesh,
    punched: &TriangleMesh,
    methods: &[FillMethod],
    config: &BenchConfig,
) -> Result<Vec<BenchRow>, HarnessError> {
    let holes = hole_count(punched, config.fill.open_surface)?;
    let rows = methods
        .par_iter()
        .map(|&method| {
            let mut mesh = punched.clone();
            let fill = FillConfig { method, ..config.fill };
            let started = Instant::now();
            let filled = fill_all_holes(&mut mesh, &fill);
            let elapsed = started.elapsed().as_secs_f64() * 1e3;
            let (new_vertices, new_faces, mut status) = match &filled {
                Ok(r) if r.all_filled() => (r.new_vertices(), r.new_faces(), "ok".to_string()),
                Ok(r) => (r.new_vertices(), r.new_faces(), format!("partial ({} failed)", r.failures())),
                Err(e) => (0, 0, format!("error: {e}")),
            };
            let report = match hausdorff_report(original, &mesh, &config.sampling) {
                Ok(r) => Some(r),
                Err(e) => {
                    status = format!("error: {e}");
                    None
                }
            };
            BenchRow {
                shape: shape_name.to_string(),
                faces: original.face_count(),
                holes,
                method,
                report,
                new_vertices,
                new_faces,
                runtime_ms: config.timing.then_some(elapsed),
                seed: config.sampling.seed,
                status,
            }
        })
        .collect();
    Ok(rows)
}

/// Generates `shape`, punches it and runs [`run_benchmark`]. Open shapes
/// keep their rim open regardless of `config`.
pub fn bench_shape(
    shape: &SyntheticShape,
    spec: &PunchSpec,
    methods: &[FillMethod],
    config: &BenchConfig,
) -> Result<Vec<BenchRow>, HarnessError> {
    let original = shape.generate();
    let (punched, _) = punch(&original, spec)?;
    let config = BenchConfig {
        fill: FillConfig {
            open_surface: !shape.is_closed(),
            ..config.fill
        },
        ..*config
    };
    run_benchmark(shape.name(), &original, &punched, methods, &config)
}

pub const CSV_HEADER: &str = "shape,faces,holes,method,delta_max,delta_max_normalized,delta_avg,delta_avg_normalized,\
                              new_vertices,new_faces,runtime_ms,seed";

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_csv<W: Write>(mut w: W, rows: &[BenchRow]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        let rep = r.report.as_ref();
        writeln!(
            w,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            r.shape,
            r.faces,
            r.holes,
            r.method,
            opt(rep.map(|d| d.delta_max)),
            opt(rep.map(|d| d.delta_max_normalized)),
            opt(rep.map(|d| d.delta_avg)),
            opt(rep.map(|d| d.delta_avg_normalized)),
            r.new_vertices,
            r.new_faces,
            opt(r.runtime_ms),
            r.seed
        )?;
    }
    w.flush()
}

/// Aligned human-readable table.
pub fn write_table<W: Write>(mut w: W, rows: &[BenchRow]) -> std::io::Result<()> {
    writeln!(
        w,
        "{:<11} {:>7} {:>5} {:<15} {:>12} {:>12} {:>12} {:>12} {:>8}  status",
        "shape", "faces", "holes", "method", "dmax", "dmax/diag", "davg", "davg/diag", "new_v"
    )?;
    for r in rows {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6e}")).unwrap_or_else(|| "-".into());
        let rep = r.report.as_ref();
        writeln!(
            w,
            "{:<11} {:>7} {:>5} {:<15} {:>12} {:>12} {:>12} {:>12} {:>8}  {}",
            r.shape,
            r.faces,
            r.holes,
            r.method.name(),
            f(rep.map(|d| d.delta_max)),
            f(rep.map(|d| d.delta_max_normalized)),
            f(rep.map(|d| d.delta_avg)),
            f(rep.map(|d| d.delta_avg_normalized)),
            r.new_vertices,
            r.status
        )?;
    }
    w.flush()
}
