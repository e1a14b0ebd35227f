use rug::Float;

use super::eig::eig;
use crate::error::{Error, Result};
use crate::mp::{vec_dot, ComplexMatrix, ComplexScalar};

/// First-order eigenvalue correction and its sensitivity diagnostic.
#[derive(Debug, Clone)]
pub struct EigenShift {
    pub eigenvalue: ComplexScalar,
    /// `<L|Δ|R> / <L|R>`.
    pub shift: ComplexScalar,
    /// `|<L|R>|` for unit left and right vectors (`1/kappa_j`).
    pub overlap: Float,
}

/// `E_j^(1)` for the `j`-th eigenvalue (in sorted order) of `h`. The left
/// vector is the eigenvector of `h†` whose eigenvalue is closest to
/// `conj(lambda_j)`.
pub fn first_order_eigenshift(h: &ComplexMatrix, delta: &ComplexMatrix, j: usize) -> Result<EigenShift> {
    if !h.is_square() || delta.rows() != h.rows() || delta.cols() != h.cols() {
        return Err(Error::DimensionMismatch("perturbation must match the Hamiltonian".into()));
    }
    let right = eig(h)?;
    if j >= right.eigenvalues.len() {
        return Err(Error::InvalidArgument(format!("eigenvalue index {j} out of range")));
    }
    let lambda = right.eigenvalues[j].clone();
    let left = eig(&h.adjoint())?;
    let target = lambda.conj();
    let k = (0..left.eigenvalues.len())
        .min_by(|&a, &b| {
            let da = (&left.eigenvalues[a] - &target).norm_sqr();
            let db = (&left.eigenvalues[b] - &target).norm_sqr();
            da.partial_cmp(&db).unwrap()
        })
        .expect("non-empty spectrum");
    let r = right.right_vectors.column(j);
    let l = left.right_vectors.column(k);
    let overlap = vec_dot(&l, &r);
    let ctx = h.ctx();
    let overlap_abs = overlap.abs();
    if overlap_abs < ctx.pow10(-2 * ctx.digits() as i32) {
        return Err(Error::VanishingOverlap { index: j });
    }
    let num = vec_dot(&l, &delta.matvec(&r));
    Ok(EigenShift { eigenvalue: lambda, shift: &num / &overlap, overlap: overlap_abs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::random::{random_hermitian, random_matrix};
    use crate::mp::Precision;

    #[test]
    fn identity_perturbation_shifts_by_one() {
        let ctx = Precision::new(30).unwrap();
        let h = random_hermitian(5, ctx, 13);
        let id = ComplexMatrix::identity(5, ctx);
        for j in 0..5 {
            let s = first_order_eigenshift(&h, &id, j).unwrap();
            let (re, im) = s.shift.to_f64_pair();
            assert!((re - 1.0).abs() < 1e-24 && im.abs() < 1e-24);
        }
    }

    #[test]
    fn hermitian_shift_is_expectation() {
        let ctx = Precision::new(30).unwrap();
        let h = random_hermitian(5, ctx, 14);
        let d = random_matrix(5, 5, ctx, 15);
        let spec = eig(&h).unwrap();
        for j in 0..5 {
            let s = first_order_eigenshift(&h, &d, j).unwrap();
            let v = spec.right_vectors.column(j);
            let expect = vec_dot(&v, &d.matvec(&v));
            assert!((&s.shift - &expect).abs().to_f64() < 1e-22);
            assert!((s.overlap.to_f64() - 1.0).abs() < 1e-22);
        }
    }
}
