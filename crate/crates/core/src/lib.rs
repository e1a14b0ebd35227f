//! Arbitrary-precision numerics for non-Hermitian lattice models.
//!
//! Every computation runs on MPFR floats at a user-chosen number of decimal
//! digits, so the same code path can emulate double precision (53-bit
//! significand) or run at 50+ digits.

pub mod audit;
pub mod error;
pub mod gaussdyn;
pub mod linalg;
pub mod manybody;
pub mod models;
pub mod mp;
pub mod pseudospec;
pub mod table;

pub use error::{Error, Result};
pub use mp::{ComplexMatrix, ComplexScalar, Precision};
