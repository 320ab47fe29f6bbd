//! Completely positive semidefinite matrices: explicit constructions, Gram
//! factorizations by Hermitian PSD matrices, extremality certificates for
//! bipartite correlations, and a seesaw search for small factorizations.

pub mod constructions;
pub mod error;
pub mod linalg;
pub mod sdp;
pub mod seesaw;
pub mod types;
pub mod verify;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, Field, Tolerances};
