use rug::Float;

use super::hermitian::eigvals_hermitian;
use crate::error::{Error, Result};
use crate::mp::random::seeded_rng;
use crate::mp::{normalize, vec_dot, ComplexMatrix, ComplexScalar, LuFactors};

const MAX_INVERSE_STEPS: usize = 300;
const START_SEED: u64 = 0x5eed_5eed;

fn start_vector(a: &ComplexMatrix) -> Vec<ComplexScalar> {
    let mut rng = seeded_rng(START_SEED);
    let mut v = crate::mp::random::ginibre(a.cols(), 1, a.ctx(), &mut rng).column(0);
    normalize(&mut v);
    v
}

/// Largest singular value: square root of the top eigenvalue of `A†A`.
pub fn largest_singular_value(a: &ComplexMatrix) -> Float {
    let bits = a.bits();
    if a.data().iter().all(|z| z.is_zero()) {
        return Float::new(bits);
    }
    let top = eigvals_hermitian(&a.adjoint_matmul(a)).ok().and_then(|v| v.into_iter().last());
    match top {
        Some(v) if v.is_sign_positive() => v.sqrt(),
        _ => Float::new(bits),
    }
}

/// Smallest singular value by inverse iteration on `A†A`, solving with the LU
/// factors of `A` and `A†`. Iteration stops once the extrapolated error of
/// the Rayleigh quotient is within a few ulps; when the two smallest singular
/// values are too close for that within the step budget, or `A` is singular,
/// the value comes from the augmented Hermitian matrix instead.
pub fn smallest_singular_value(a: &ComplexMatrix) -> Float {
    assert!(a.is_square(), "smallest_singular_value needs a square matrix");
    match LuFactors::new(a) {
        Ok(lu) => inverse_iteration(&lu, a),
        Err(_) => augmented_smallest(a),
    }
}

fn inverse_iteration(lu: &LuFactors, a: &ComplexMatrix) -> Float {
    let bits = a.bits();
    let ulp = a.ctx().epsilon();
    let noise = Float::with_val(bits, &ulp * 8u32);
    let target = Float::with_val(bits, &ulp * 64u32);
    let mut x = start_vector(a);
    let mut prev: Option<Float> = None;
    let mut prev_step: Option<Float> = None;
    for _ in 0..MAX_INVERSE_STEPS {
        // y = (A†A)^{-1} x
        let w = lu.solve_adjoint_vec(&x);
        let y = lu.solve_vec(&w);
        let mu = vec_dot(&x, &y).re;
        x = y;
        let nrm = normalize(&mut x);
        if !nrm.is_finite() || nrm.is_zero() || !mu.is_finite() || mu <= 0 {
            return augmented_smallest(a);
        }
        if let Some(p) = prev.take() {
            let step = Float::with_val(bits, &mu - &p).abs();
            let scale = mu.clone().abs();
            if step <= Float::with_val(bits, &noise * &scale) {
                return mu.recip().sqrt();
            }
            if let Some(ps) = prev_step.take() {
                // geometric tail step * rho / (1 - rho)
                let rho = Float::with_val(bits, &step / &ps);
                if rho < 1 {
                    let tail = Float::with_val(bits, &step * &rho) / Float::with_val(bits, 1 - &rho);
                    if tail <= Float::with_val(bits, &target * &scale) {
                        return mu.recip().sqrt();
                    }
                }
            }
            prev_step = Some(step);
        }
        prev = Some(mu);
    }
    augmented_smallest(a)
}

/// `smin` from the spectrum `±sigma_i` of `[[0, A], [A†, 0]]`, accurate to
/// `u ||A||` without squaring the conditioning.
fn augmented_smallest(a: &ComplexMatrix) -> Float {
    let n = a.rows();
    let ctx = a.ctx();
    let adj = a.adjoint();
    let m = ComplexMatrix::from_fn(2 * n, 2 * n, ctx, |i, j| match (i < n, j < n) {
        (true, false) => a[(i, j - n)].clone(),
        (false, true) => adj[(i - n, j)].clone(),
        _ => ComplexScalar::zero(ctx.bits()),
    });
    match eigvals_hermitian(&m) {
        Ok(vals) => {
            let s = Float::with_val(ctx.bits(), &vals[n] - &vals[n - 1]) / 2u32;
            if s.is_sign_negative() {
                ctx.zero()
            } else {
                s
            }
        }
        Err(_) => ctx.zero(),
    }
}

/// `(smax, smin)`.
pub fn extreme_singular_values(a: &ComplexMatrix) -> (Float, Float) {
    assert!(a.is_square(), "extreme_singular_values needs a square matrix");
    (largest_singular_value(a), smallest_singular_value(a))
}

/// `cond(V) = smax / smin`. A matrix that is singular at working precision
/// has infinite condition.
pub fn condition_number(v: &ComplexMatrix) -> Result<Float> {
    assert!(v.is_square(), "condition_number needs a square matrix");
    let lu = LuFactors::new(v).map_err(|_| Error::InfiniteCondition)?;
    let smin = inverse_iteration(&lu, v);
    let smax = largest_singular_value(v);
    let ctx = v.ctx();
    let floor = Float::with_val(ctx.bits(), &smax * &ctx.pow10(-2 * ctx.digits() as i32));
    if smin.is_zero() || smin <= floor {
        return Err(Error::InfiniteCondition);
    }
    // the two extremes come from different iterations; keep the ratio at its bound
    Ok((smax / smin).max(&Float::with_val(ctx.bits(), 1)))
}

/// `log10 cond(V)` as a double.
pub fn log10_condition_number(v: &ComplexMatrix) -> Result<f64> {
    Ok(condition_number(v)?.log10().to_f64())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::random::random_matrix;
    use crate::mp::{householder_qr, Precision};

    #[test]
    fn identity_and_diagonal() {
        let ctx = Precision::new(30).unwrap();
        let (smax, smin) = extreme_singular_values(&ComplexMatrix::identity(4, ctx));
        assert!((smax.to_f64() - 1.0).abs() < 1e-12 && (smin.to_f64() - 1.0).abs() < 1e-12);
        let d = ComplexMatrix::from_f64(2, 2, ctx, &[5., 0., 0., 0.2], &[]);
        let (smax, smin) = extreme_singular_values(&d);
        assert!((smax.to_f64() - 5.0).abs() < 1e-10);
        assert!((smin.to_f64() - 0.2).abs() < 1e-12);
    }

    #[test]
    fn unitary_is_perfectly_conditioned() {
        let ctx = Precision::new(30).unwrap();
        let q = householder_qr(&random_matrix(8, 8, ctx, 61)).unwrap().q;
        let c = condition_number(&q).unwrap().to_f64();
        assert!((c - 1.0).abs() < 1e-10);
    }

    #[test]
    fn singular_matrix_uses_fallback() {
        let ctx = Precision::new(20).unwrap();
        let a = ComplexMatrix::from_f64(2, 2, ctx, &[1., 2., 2., 4.], &[]);
        assert!(smallest_singular_value(&a).to_f64() < 1e-8);
        assert!(matches!(condition_number(&a), Err(Error::InfiniteCondition)));
    }

    #[test]
    fn both_paths_agree() {
        let ctx = Precision::new(30).unwrap();
        let a = random_matrix(10, 10, ctx, 62);
        let smin = smallest_singular_value(&a);
        let other = augmented_smallest(&a);
        let gap = Float::with_val(ctx.bits(), &smin - &other).abs();
        assert!(gap < ctx.tol(3), "{smin} vs {other}");
    }

    #[test]
    fn shifted_hermitian_is_distance_to_spectrum() {
        let ctx = Precision::new(40).unwrap();
        let h = crate::mp::random::random_hermitian(7, ctx, 63);
        let vals = eigvals_hermitian(&h).unwrap();
        // midway between two eigenvalues the two smallest singular values tie
        let mid = Float::with_val(ctx.bits(), &vals[2] + &vals[3]) / 2u32;
        let s = smallest_singular_value(&h.shift_diagonal(&ComplexScalar::from_real(mid.clone())));
        let dist = Float::with_val(ctx.bits(), &vals[3] - &mid);
        assert!(Float::with_val(ctx.bits(), &s - &dist).abs() < ctx.tol(4), "{s} vs {dist}");
    }
}
