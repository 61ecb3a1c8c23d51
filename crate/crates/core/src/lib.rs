//! Hole detection and filling for triangle meshes, with distance metrics,
//! synthetic benchmark shapes and mesh file IO.

pub mod analysis;
pub mod bezier;
pub mod cli;
pub mod fill;
pub mod geom2d;
pub mod harness;
pub mod io;
pub mod mesh;
pub mod metrics;

pub use analysis::{Hole, HoleClass, LocalFrame};
pub use fill::{fill_all_holes, FillConfig, FillMethod, FillReport};
pub use mesh::{BoundaryLoop, MeshError, Point, TriangleMesh, Vector};
