//! Eigenvalue problems, Schur forms, singular values and conditioning.

pub mod eig;
pub mod hermitian;
pub mod hessenberg;
pub mod perturb;
pub mod qrlab;
pub mod schur;
pub mod svd;

pub use eig::{eig, fix_phase, SpectrumResult};
pub use hermitian::{eig_hermitian, eigvals_hermitian};
pub use hessenberg::{balance, hessenberg, Hessenberg};
pub use perturb::{first_order_eigenshift, EigenShift};
pub use qrlab::{householder_denominator_trace, qr_rq_lab, LabReport};
pub use schur::{eigenvalues, schur_qr, SchurForm, SchurMode};
pub use svd::{condition_number, extreme_singular_values, largest_singular_value, log10_condition_number, smallest_singular_value};

use crate::mp::ComplexScalar;

/// Sorts by real part, then imaginary part.
pub fn sort_spectrum(values: &mut [ComplexScalar]) {
    values.sort_by(eig::compare_eigen);
}
