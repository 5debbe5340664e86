#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod error;
pub mod evaluation;
pub mod interpolation;
mod linalg;
mod math;
pub mod model;
pub mod optimizer;
pub mod point;
pub mod predicates;
pub mod regularizer;
pub mod triangulation;

pub use error::{Error, Result};
pub use model::DtlModel;
pub use optimizer::{fit, FitConfig, FitState, LossKind};
pub use point::PointSet;
pub use regularizer::CurvatureReport;
pub use triangulation::{
    build_delaunay, random_triangulation, LocateResult, Simplex, Triangulation,
};
