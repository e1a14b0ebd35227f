//! Multiple-precision scalar and dense matrix layer.

pub mod expm;
pub mod lu;
pub mod matrix;
pub mod precision;
pub mod qr;
pub mod random;
pub mod scalar;

pub use expm::matrix_exp;
pub use lu::{lu_solve, LuFactors};
pub use matrix::{normalize, vec_dot, vec_norm, ComplexMatrix};
pub use precision::Precision;
pub use qr::{householder_qr, QrFactors};
pub use scalar::ComplexScalar;
