//! Mesh files: OBJ and PLY readers and writers.
//!
//! Writers print floats with 17 significant digits (or raw little-endian
//! doubles), so a write-read cycle returns identical coordinates.

pub mod obj;
pub mod ply;

use std::fs::File;
use std::io::{BufReader, BufWriter};
use std::path::Path;

use thiserror::Error;

use crate::mesh::{MeshError, Point, TriangleMesh};
pub use ply::PlyFormat;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("byte {offset} of binary data: {reason}")]
    Binary { offset: usize, reason: String },
    #[error("unsupported PLY element '{0}'")]
    UnsupportedElement(String),
    #[error("unsupported PLY format '{0}'")]
    UnsupportedFormat(String),
    #[error("unknown mesh file extension for '{0}'")]
    UnknownExtension(String),
    #[error("vertex index {0} does not fit a 32-bit PLY index")]
    IndexTooLarge(usize),
    #[error("invalid mesh: {0}")]
    Mesh(#[from] MeshError),
}

impl IoError {
    pub(crate) fn parse(line: usize, reason: impl Into<String>) -> Self {
        IoError::Parse {
            line,
            reason: reason.into(),
        }
    }
}

/// Vertices and triangles as read, before any validation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RawMesh {
    pub vertices: Vec<Point>,
    pub faces: Vec<[usize; 3]>,
}

impl RawMesh {
    pub fn into_mesh(self) -> Result<TriangleMesh, IoError> {
        Ok(TriangleMesh::new(self.vertices, self.faces)?)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MeshFormat {
    Obj,
    Ply(PlyFormat),
}

impl MeshFormat {
    /// Format implied by the file extension; PLY output defaults to binary.
    pub fn from_path(path: &Path) -> Result<Self, IoError> {
        let ext = path
            .extension()
            .and_then(|e| e.to_str())
            .map(str::to_ascii_lowercase)
            .unwrap_or_default();
        match ext.as_str() {
            "obj" => Ok(MeshFormat::Obj),
            "ply" => Ok(MeshFormat::Ply(PlyFormat::BinaryLittleEndian)),
            _ => Err(IoError::UnknownExtension(path.display().to_string())),
        }
    }
}

pub fn read_raw(path: &Path) -> Result<RawMesh, IoError> {
    let format = MeshFormat::from_path(path)?;
    let reader = BufReader::new(File::open(path)?);
    match format {
        MeshFormat::Obj => obj::read_obj(reader),
        MeshFormat::Ply(_) => ply::read_ply(reader),
    }
}

pub fn read_mesh(path: &Path) -> Result<TriangleMesh, IoError> {
    read_raw(path)?.into_mesh()
}

pub fn write_mesh(path: &Path, mesh: &TriangleMesh, format: MeshFormat) -> Result<(), IoError> {
    let w = BufWriter::new(File::create(path)?);
    match format {
        MeshFormat::Obj => obj::write_obj(w, mesh.vertices(), mesh.faces()),
        MeshFormat::Ply(f) => ply::write_ply(w, mesh.vertices(), mesh.faces(), f),
    }
}
