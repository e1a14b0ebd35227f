//! Unshifted real QR-RQ iteration, kept deliberately naive: this is the
//! instability lab, not an eigensolver.

use rug::{Assign, Float};

use super::schur::SchurForm;
use crate::error::{Error, Result};
use crate::mp::{ComplexMatrix, ComplexScalar, Precision};

/// Dense real square matrix, row-major.
#[derive(Clone)]
struct Real {
    n: usize,
    data: Vec<Float>,
}

impl Real {
    fn identity(n: usize, bits: u32) -> Self {
        let mut data = vec![Float::new(bits); n * n];
        for i in 0..n {
            data[i * n + i] = Float::with_val(bits, 1);
        }
        Real { n, data }
    }

    fn at(&self, i: usize, j: usize) -> &Float {
        &self.data[i * self.n + j]
    }

    fn at_mut(&mut self, i: usize, j: usize) -> &mut Float {
        &mut self.data[i * self.n + j]
    }

    fn matmul(&self, other: &Real, bits: u32) -> Real {
        let n = self.n;
        let mut out = vec![Float::new(bits); n * n];
        for i in 0..n {
            for k in 0..n {
                let a = self.at(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = other.at(k, j);
                    if !b.is_zero() {
                        out[i * n + j] += a * b;
                    }
                }
            }
        }
        Real { n, data: out }
    }
}

/// One Householder QR of a real square matrix. Reflectors use
/// `v = x - alpha e1`, `alpha = -sign(x0) ||x||`, no sign normalization of
/// `R`. Returns `(Q, R, min v^T v)`.
fn real_householder_qr(a: &Real, bits: u32) -> (Real, Real, Option<Float>) {
    let n = a.n;
    let mut r = a.clone();
    let mut q = Real::identity(n, bits);
    let mut dmin: Option<Float> = None;
    let mut v: Vec<Float> = Vec::with_capacity(n);
    let mut w: Vec<Float> = vec![Float::new(bits); n];
    for k in 0..n.saturating_sub(1) {
        let mut tail = Float::new(bits);
        for i in k + 1..n {
            let x = r.at(i, k);
            if !x.is_zero() {
                tail += x * x;
            }
        }
        if tail.is_zero() {
            continue;
        }
        let x0 = r.at(k, k).clone();
        let norm = Float::with_val(bits, &x0 * &x0 + &tail).sqrt();
        let alpha = if x0.is_sign_negative() { norm } else { -norm };
        v.clear();
        v.push(Float::with_val(bits, &x0 - &alpha));
        for i in k + 1..n {
            v.push(r.at(i, k).clone());
        }
        let vtv = Float::with_val(bits, &v[0] * &v[0] + &tail);
        let two_over = Float::with_val(bits, 2u32 / &vtv);
        match &dmin {
            Some(d) if *d <= vtv => {}
            _ => dmin = Some(vtv),
        }
        // R <- (I - t v v^T) R on rows k.., columns k+1..
        for j in k + 1..n {
            let mut s = Float::new(bits);
            for (idx, vi) in v.iter().enumerate() {
                let x = r.at(k + idx, j);
                if !x.is_zero() && !vi.is_zero() {
                    s += vi * x;
                }
            }
            if s.is_zero() {
                continue;
            }
            s *= &two_over;
            for (idx, vi) in v.iter().enumerate() {
                if !vi.is_zero() {
                    *r.at_mut(k + idx, j) -= vi * &s;
                }
            }
        }
        *r.at_mut(k, k) = alpha;
        for i in k + 1..n {
            r.at_mut(i, k).assign(0);
        }
        // Q <- Q (I - t v v^T) on columns k..
        for i in 0..n {
            let mut s = Float::new(bits);
            for (idx, vi) in v.iter().enumerate() {
                let x = q.at(i, k + idx);
                if !x.is_zero() && !vi.is_zero() {
                    s += x * vi;
                }
            }
            w[i] = s;
        }
        for (i, wi) in w.iter_mut().enumerate() {
            if wi.is_zero() {
                continue;
            }
            *wi *= &two_over;
            for (idx, vi) in v.iter().enumerate() {
                if !vi.is_zero() {
                    *q.at_mut(i, k + idx) -= &*wi * vi;
                }
            }
        }
    }
    (q, r, dmin)
}

/// Result of the QR-RQ lab.
#[derive(Debug, Clone)]
pub struct LabReport {
    pub schur: SchurForm,
    /// Number of 2x2 blocks with a complex-conjugate eigenvalue pair.
    pub complex_blocks: usize,
    /// Smallest denominator over the whole run.
    pub min_denominator: f64,
    /// How many QR calls produced a denominator below `threshold`.
    pub small_denominator_calls: usize,
}

fn to_real(a: &ComplexMatrix) -> Result<Real> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("QR-RQ lab needs a square matrix".into()));
    }
    if a.data().iter().any(|z| !z.im.is_zero()) {
        return Err(Error::InvalidArgument("real_unshifted mode needs a real matrix".into()));
    }
    Ok(Real { n: a.rows(), data: a.data().iter().map(|z| z.re.clone()).collect() })
}

fn to_complex(a: &Real, ctx: Precision) -> ComplexMatrix {
    ComplexMatrix::from_fn(a.n, a.n, ctx, |i, j| ComplexScalar::from_real(a.at(i, j).clone()))
}

/// Runs exactly `iters` steps `A <- R Q` with `A = Q R`, then classifies the
/// diagonal blocks of the final iterate.
pub fn qr_rq_schur(a: &ComplexMatrix, iters: usize) -> Result<SchurForm> {
    let ctx = a.ctx();
    let bits = ctx.bits();
    let mut t = to_real(a)?;
    let mut z = Real::identity(t.n, bits);
    let mut denominators = Vec::with_capacity(iters);
    for _ in 0..iters {
        let (q, r, dmin) = real_householder_qr(&t, bits);
        // a call with every reflection skipped reports +inf
        denominators.push(dmin.map(|d| d.to_f64()).unwrap_or(f64::INFINITY));
        t = r.matmul(&q, bits);
        z = z.matmul(&q, bits);
    }
    let block_sizes = classify_blocks(&t, &ctx.epsilon());
    Ok(SchurForm {
        t: to_complex(&t, ctx),
        z: to_complex(&z, ctx),
        block_sizes: Some(block_sizes),
        denominators,
        iterations: iters,
    })
}

/// Scans the subdiagonal: an entry above `u (|T_ii| + |T_i+1,i+1|)` couples a
/// 2x2 block, which counts as size 2 only when its eigenvalues are a
/// complex-conjugate pair; a coupled block with real eigenvalues is reported
/// as two 1x1 blocks.
fn classify_blocks(t: &Real, u: &Float) -> Vec<u8> {
    let n = t.n;
    let bits = u.prec();
    let mut out = Vec::with_capacity(n);
    let mut i = 0;
    while i < n {
        if i + 1 < n {
            let sub = Float::with_val(bits, t.at(i + 1, i).abs_ref());
            let mut tst = Float::with_val(bits, t.at(i, i).abs_ref());
            tst += Float::with_val(bits, t.at(i + 1, i + 1).abs_ref());
            tst *= u;
            if sub > tst {
                let diff = Float::with_val(bits, t.at(i, i) - t.at(i + 1, i + 1));
                let mut disc = Float::with_val(bits, &diff * &diff);
                let bc = Float::with_val(bits, t.at(i, i + 1) * t.at(i + 1, i));
                disc += bc * 4u32;
                if disc.is_sign_negative() && !disc.is_zero() {
                    out.push(2);
                } else {
                    out.push(1);
                    out.push(1);
                }
                i += 2;
                continue;
            }
        }
        out.push(1);
        i += 1;
    }
    out
}

/// Per-call minimum Householder denominators over `iters` QR-RQ steps.
pub fn householder_denominator_trace(a: &ComplexMatrix, iters: usize) -> Result<Vec<f64>> {
    Ok(qr_rq_schur(a, iters)?.denominators)
}

/// Runs the lab and summarizes it against a denominator threshold.
pub fn qr_rq_lab(a: &ComplexMatrix, iters: usize, threshold: f64) -> Result<LabReport> {
    let schur = qr_rq_schur(a, iters)?;
    let sizes = schur.block_sizes.as_deref().unwrap_or(&[]);
    let complex_blocks = sizes.iter().filter(|&&s| s == 2).count();
    let min_denominator = schur.denominators.iter().copied().fold(f64::INFINITY, f64::min);
    let small_denominator_calls = schur.denominators.iter().filter(|&&d| d < threshold).count();
    Ok(LabReport { schur, complex_blocks, min_denominator, small_denominator_calls })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_denominators_are_skipped() {
        let ctx = Precision::double();
        let trace = householder_denominator_trace(&ComplexMatrix::identity(5, ctx), 3).unwrap();
        assert!(trace.iter().all(|&d| d >= 1.0));
    }

    #[test]
    fn rotation_block_is_complex() {
        let ctx = Precision::double();
        let a = ComplexMatrix::from_f64(2, 2, ctx, &[0., -1., 1., 0.], &[]);
        let f = qr_rq_schur(&a, 10).unwrap();
        assert_eq!(f.block_sizes, Some(vec![2]));
    }

    #[test]
    fn real_pair_counts_as_two_scalars() {
        let ctx = Precision::double();
        let t = to_real(&ComplexMatrix::from_f64(2, 2, ctx, &[1., 1., 1., 1.], &[])).unwrap();
        assert_eq!(classify_blocks(&t, &ctx.epsilon()), vec![1, 1]);
    }

    #[test]
    fn unshifted_iteration_is_orthogonal_similarity() {
        let ctx = Precision::new(30).unwrap();
        let a = ComplexMatrix::from_f64(3, 3, ctx, &[4., 1., 0., 2., 3., 1., 0., 1., 1.], &[]);
        let f = qr_rq_schur(&a, 50).unwrap();
        let recon = f.z.matmul(&f.t).matmul(&f.z.adjoint());
        assert!(recon.max_abs_diff(&a) < ctx.tol(4) * a.frobenius_norm());
        assert_eq!(f.denominators.len(), 50);
    }

    #[test]
    fn complex_input_rejected() {
        let ctx = Precision::double();
        let a = ComplexMatrix::from_f64(2, 2, ctx, &[1., 0., 0., 1.], &[0., 1., 0., 0.]);
        assert!(qr_rq_schur(&a, 1).is_err());
    }
}
