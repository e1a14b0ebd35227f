use rug::Float;

use super::matrix::ComplexMatrix;
use super::scalar::ComplexScalar;

/// Cheap upper bound on the spectral norm: `min(||A||_F, sqrt(||A||_1 ||A||_inf))`.
pub fn norm2_upper_bound(a: &ComplexMatrix) -> f64 {
    let f = a.frobenius_norm().to_f64();
    let mixed = (a.norm_one().to_f64() * a.norm_inf().to_f64()).sqrt();
    f.min(mixed)
}

/// Scaling-and-squaring parameters for `exp(A)`: the number of squarings `s`
/// (so that `||A|| / 2^s <= 1/2`) and the Taylor degree whose last term is
/// below `10^-(P+10)`.
pub fn taylor_plan(norm: f64, digits: u32) -> (u32, usize) {
    let mut s = 0u32;
    let mut theta = norm;
    while theta > 0.5 {
        theta /= 2.0;
        s += 1;
    }
    if theta == 0.0 {
        return (s, 0);
    }
    let target = -((digits as f64) + 10.0) * std::f64::consts::LN_10;
    let ln_theta = theta.ln();
    let mut log_term = 0.0;
    let mut k = 0usize;
    // bound on the k-th term: theta^k / k!
    loop {
        k += 1;
        log_term += ln_theta - (k as f64).ln();
        if log_term < target {
            return (s, k);
        }
    }
}

/// `e^A` by scaling and squaring around a Taylor polynomial, evaluated with
/// the Paterson-Stockmeyer scheme (about `2 sqrt(degree)` products).
pub fn matrix_exp(a: &ComplexMatrix) -> ComplexMatrix {
    assert!(a.is_square(), "matrix_exp needs a square matrix");
    let n = a.rows();
    let ctx = a.ctx();
    let bits = ctx.bits();
    let (s, degree) = taylor_plan(norm2_upper_bound(a), ctx.digits());
    if degree == 0 {
        return ComplexMatrix::identity(n, ctx);
    }
    let mut scale = Float::with_val(bits, 1);
    scale >>= s;
    let b = a.scale_real(&scale);

    let coeffs: Vec<Float> = {
        let mut c = Vec::with_capacity(degree + 1);
        let mut f = Float::with_val(bits, 1);
        c.push(f.clone());
        for k in 1..=degree {
            f /= k as u32;
            c.push(f.clone());
        }
        c
    };

    let q = ((degree as f64).sqrt().ceil() as usize).max(1);
    let mut powers = Vec::with_capacity(q + 1);
    powers.push(ComplexMatrix::identity(n, ctx));
    powers.push(b);
    for j in 2..=q {
        let next = powers[j - 1].matmul(&powers[1]);
        powers.push(next);
    }
    let blocks = degree / q + 1;
    let block_poly = |i: usize| -> ComplexMatrix {
        let mut acc = ComplexMatrix::zeros(n, n, ctx);
        let top = ((i + 1) * q).min(degree + 1);
        for (j, c) in coeffs[i * q..top].iter().enumerate() {
            let cz = ComplexScalar::from_real(c.clone());
            for r in 0..n {
                for col in 0..n {
                    let p = &powers[j][(r, col)];
                    if !p.is_zero() {
                        acc[(r, col)].mul_add_assign(&cz, p);
                    }
                }
            }
        }
        acc
    };
    let mut result = block_poly(blocks - 1);
    for i in (0..blocks - 1).rev() {
        result = result.matmul(&powers[q]).add(&block_poly(i));
    }
    for _ in 0..s {
        result = result.matmul(&result);
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::precision::Precision;
    use crate::mp::random::random_matrix;

    #[test]
    fn exp_of_zero_is_identity() {
        let ctx = Precision::new(30).unwrap();
        let e = matrix_exp(&ComplexMatrix::zeros(4, 4, ctx));
        assert_eq!(e, ComplexMatrix::identity(4, ctx));
    }

    #[test]
    fn diagonal_i_pi() {
        let ctx = Precision::new(40).unwrap();
        let mut a = ComplexMatrix::zeros(2, 2, ctx);
        a[(0, 0)] = ComplexScalar::new(ctx.zero(), ctx.pi());
        let e = matrix_exp(&a);
        let expect = ComplexMatrix::from_f64(2, 2, ctx, &[-1., 0., 0., 1.], &[]);
        assert!(e.max_abs_diff(&expect) < ctx.tol(2));
    }

    #[test]
    fn inverse_pair_multiplies_to_identity() {
        let ctx = Precision::new(30).unwrap();
        let a = random_matrix(5, 5, ctx, 99).scale_real(&ctx.real(1.5));
        let e = matrix_exp(&a);
        let f = matrix_exp(&a.scale_real(&ctx.real(-1.0)));
        let prod = e.matmul(&f);
        let bound = Float::with_val(ctx.bits(), ctx.tol(6) * e.frobenius_norm()) * f.frobenius_norm();
        assert!(prod.max_abs_diff(&ComplexMatrix::identity(5, ctx)) < bound);
    }

    #[test]
    fn plan_degree_grows_with_precision() {
        let (s, d16) = taylor_plan(3.0, 16);
        let (_, d50) = taylor_plan(3.0, 50);
        assert_eq!(s, 3);
        assert!(d50 > d16);
    }
}
