//! Error types shared across the crate.

use alloc::string::String;

/// Errors produced by triangulation, interpolation and fitting.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Input violates a documented precondition.
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// Point dimensions disagree with the ambient dimension.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    /// The simplex is affinely degenerate (zero volume, decided exactly).
    #[error("degenerate simplex")]
    DegenerateSimplex,
    /// Two input points share identical coordinates.
    #[error("duplicate points at indices {0} and {1}")]
    DuplicatePoints(usize, usize),
    /// All input points lie in a lower-dimensional affine subspace.
    #[error("degenerate input: points do not span the ambient dimension")]
    DegenerateInput,
    /// The query lies outside the convex hull where the requested quantity
    /// is undefined.
    #[error("query outside the convex hull")]
    OutsideHull,
    /// The query lies exactly on a simplex facet where the gradient is
    /// ambiguous.
    #[error("query lies on a simplex facet")]
    OnFacet,
    /// The objective or its gradient stopped being finite during a fit.
    #[error("non-finite objective at iteration {0}")]
    NonFiniteObjective(usize),
    /// The requested operation is not available for this configuration.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = core::result::Result<T, Error>;
