//! Ext algebras, periodicity and Hochschild cohomology for graded quotients of path algebras.

pub mod algebra;
pub mod error;
pub mod extalg;
pub mod field;
pub mod gmodule;
pub mod hochschild;
pub mod linalg;
pub mod periodicity;
pub mod presentation;
pub mod resolution;

pub use field::{Field, Scalar};
pub use linalg::{Matrix, SparseVec, Subspace};
pub use algebra::{EnvelopingAlgebra, GradedAlgebra};
pub use error::{Error, Result};
