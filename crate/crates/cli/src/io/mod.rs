//! Dataset, model and mesh serialization shared by the library surface and
//! the command-line tool.

pub mod dataset;
pub mod manifest;
pub mod mesh;
pub mod model;

use std::path::PathBuf;

/// Errors from reading or writing the on-disk formats.
#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}:{row}:{col}: parse error: {message}")]
    Parse { path: PathBuf, row: usize, col: usize, message: String },
    #[error("{path}: empty dataset")]
    EmptyDataset { path: PathBuf },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("OFF export supports feature dimension 1 or 2, got {0}")]
    UnsupportedDimension(usize),
    #[error("{path}: unsupported model format version {found} (expected {expected})")]
    FormatVersion { path: PathBuf, found: u32, expected: u32 },
    #[error("{path}: {message}")]
    Malformed { path: PathBuf, message: String },
    #[error(transparent)]
    Core(#[from] dtl_core::Error),
}

pub type Result<T> = std::result::Result<T, IoError>;

pub(crate) fn io_err(path: &std::path::Path, source: std::io::Error) -> IoError {
    IoError::Io { path: path.to_path_buf(), source }
}
