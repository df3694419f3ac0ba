//! Model geometries in dimension three: Lie-algebraic classification,
//! second cohomology and central extensions, a catalog of homogeneous models,
//! numerical differential geometry on charts, and a classifier driven by
//! isotropy, curvature and connection data.

pub mod catalog;
pub mod classify;
pub mod cli;
pub mod cohomology;
pub mod diffgeo;
pub mod error;
pub mod lie;
pub mod linalg;
pub mod rep;

pub use error::{Error, Result};
