use rug::Float;

use super::hessenberg::hessenberg;
use crate::error::{Error, Result};
use crate::mp::{ComplexMatrix, ComplexScalar, Precision};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SchurMode {
    /// Complex single-shift (Wilkinson) QR with deflation.
    ComplexShifted,
    /// Plain real QR-RQ iteration for a fixed number of steps (no shifts,
    /// no deflation), as used by the instability lab.
    RealUnshifted,
}

/// `A = Z T Z†`.
#[derive(Debug, Clone)]
pub struct SchurForm {
    pub t: ComplexMatrix,
    pub z: ComplexMatrix,
    /// Diagonal block sizes (1 or 2), real mode only.
    pub block_sizes: Option<Vec<u8>>,
    /// Smallest Householder denominator of every QR call, real mode only.
    pub denominators: Vec<f64>,
    pub iterations: usize,
}

pub fn schur_qr(a: &ComplexMatrix, mode: SchurMode, max_iters: Option<usize>) -> Result<SchurForm> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("schur_qr needs a square matrix".into()));
    }
    match mode {
        SchurMode::ComplexShifted => {
            let hess = hessenberg(a, false);
            let mut t = hess.h;
            let mut z = hess.q;
            let iterations = shifted_qr(&mut t, Some(&mut z), max_iters)?;
            Ok(SchurForm { t, z, block_sizes: None, denominators: Vec::new(), iterations })
        }
        SchurMode::RealUnshifted => {
            let iters = max_iters.ok_or_else(|| Error::InvalidArgument("real_unshifted needs an iteration count".into()))?;
            super::qrlab::qr_rq_schur(a, iters)
        }
    }
}

/// Default sweep budget: `30 n max(1, P/16)`.
pub fn default_max_sweeps(n: usize, ctx: Precision) -> usize {
    30 * n.max(1) * (ctx.digits() as usize / 16).max(1)
}

/// A plane rotation `[[c, s], [-conj(s), c]]` with real `c`.
struct Givens {
    c: Float,
    s: ComplexScalar,
}

impl Givens {
    /// Rotation mapping `(a, b)` to `(r, 0)`.
    fn zeroing(a: &ComplexScalar, b: &ComplexScalar) -> Self {
        let bits = a.prec();
        if b.is_zero() {
            return Givens { c: Float::with_val(bits, 1), s: ComplexScalar::zero(bits) };
        }
        if a.is_zero() {
            return Givens { c: Float::new(bits), s: ComplexScalar::one(bits) };
        }
        let abs_a = a.abs();
        let r = Float::with_val(bits, abs_a.hypot_ref(&b.abs()));
        let c = Float::with_val(bits, &abs_a / &r);
        let mut s = &a.phase() * &b.conj();
        s.scale_assign(&Float::with_val(bits, 1u32 / &r));
        Givens { c, s }
    }

    /// Rows `(x, y) <- (c x + s y, -conj(s) x + c y)`.
    fn apply_left(&self, x: &mut ComplexScalar, y: &mut ComplexScalar, sc: &ComplexScalar) {
        let mut nx = x.scaled(&self.c);
        nx.mul_add_assign(&self.s, y);
        let mut ny = y.scaled(&self.c);
        ny.mul_sub_assign(sc, x);
        *x = nx;
        *y = ny;
    }

    /// Columns `(p, q) <- (c p + conj(s) q, -s p + c q)`, i.e. right product with the adjoint.
    fn apply_right(&self, p: &mut ComplexScalar, q: &mut ComplexScalar, sc: &ComplexScalar) {
        let mut np = p.scaled(&self.c);
        np.mul_add_assign(q, sc);
        let mut nq = q.scaled(&self.c);
        nq.mul_sub_assign(p, &self.s);
        *p = np;
        *q = nq;
    }
}

fn negligible(sub: &ComplexScalar, d0: &ComplexScalar, d1: &ComplexScalar, u: &Float, fallback: &Float) -> bool {
    if sub.is_zero() {
        return true;
    }
    let mut tst = Float::with_val(u.prec(), d0.abs() + d1.abs());
    if tst.is_zero() {
        tst.clone_from(fallback);
    }
    tst *= u;
    sub.abs() <= tst
}

fn wilkinson_shift(h: &ComplexMatrix, k: usize) -> ComplexScalar {
    let a = &h[(k - 1, k - 1)];
    let b = &h[(k - 1, k)];
    let c = &h[(k, k - 1)];
    let d = &h[(k, k)];
    let bits = a.prec();
    let half = Float::with_val(bits, 0.5);
    let p = (a - d).scaled(&half);
    let bc = b * c;
    let disc = crate::mp::scalar::csqrt(&(&(&p * &p) + &bc));
    let plus = &p + &disc;
    let minus = &p - &disc;
    let denom = if plus.norm_sqr() >= minus.norm_sqr() { plus } else { minus };
    if denom.is_zero() {
        return d.clone();
    }
    d - &(&bc / &denom)
}

/// Drives an upper Hessenberg `h` to upper triangular form in place,
/// accumulating the rotations into `z` when given. Returns the number of
/// sweeps used.
pub(crate) fn shifted_qr(h: &mut ComplexMatrix, mut z: Option<&mut ComplexMatrix>, max_iters: Option<usize>) -> Result<usize> {
    let n = h.rows();
    let ctx = h.ctx();
    let bits = ctx.bits();
    let u = ctx.epsilon();
    let fallback = h.frobenius_norm();
    let budget = max_iters.unwrap_or_else(|| default_max_sweeps(n, ctx));
    let want_full = z.is_some();
    let mut total = 0usize;
    let mut since_deflation = 0usize;
    let mut hi = n.saturating_sub(1);
    while hi > 0 {
        let mut lo = hi;
        while lo > 0 {
            if negligible(&h[(lo, lo - 1)], &h[(lo - 1, lo - 1)], &h[(lo, lo)], &u, &fallback) {
                h[(lo, lo - 1)].set_zero();
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            hi -= 1;
            since_deflation = 0;
            continue;
        }
        if total >= budget {
            return Err(Error::NoConvergence {
                mode: "complex_shifted",
                iterations: total,
                context: format!("n={n}, unreduced block {lo}..={hi}"),
            });
        }
        total += 1;
        since_deflation += 1;

        let mu = if since_deflation % 11 == 10 {
            // exceptional shift
            let mut m = h[(hi, hi)].clone();
            let kick = Float::with_val(bits, h[(hi, hi - 1)].abs() * 0.75f64);
            m.re += &kick;
            m
        } else {
            wilkinson_shift(h, hi)
        };

        for k in lo..=hi {
            h[(k, k)].sub_assign_ref(&mu);
        }
        let col_end = if want_full { n } else { hi + 1 };
        let row_start = if want_full { 0 } else { lo };
        let mut rots = Vec::with_capacity(hi - lo);
        for k in lo..hi {
            let g = Givens::zeroing(&h[(k, k)], &h[(k + 1, k)]);
            let sc = g.s.conj();
            let (rk, rk1) = h.two_rows_mut(k, k + 1);
            for j in k..col_end {
                g.apply_left(&mut rk[j], &mut rk1[j], &sc);
            }
            rk1[k].set_zero();
            rots.push((g, sc));
        }
        for (idx, (g, sc)) in rots.iter().enumerate() {
            let k = lo + idx;
            let last = (k + 1).min(hi);
            for i in row_start..=last {
                let row = h.row_mut(i);
                let (left, right) = row.split_at_mut(k + 1);
                g.apply_right(&mut left[k], &mut right[0], sc);
            }
            if let Some(zm) = z.as_deref_mut() {
                for i in 0..n {
                    let row = zm.row_mut(i);
                    let (left, right) = row.split_at_mut(k + 1);
                    g.apply_right(&mut left[k], &mut right[0], sc);
                }
            }
        }
        for k in lo..=hi {
            h[(k, k)].add_assign_ref(&mu);
        }
    }
    if want_full {
        for i in 1..n {
            for j in 0..i {
                h[(i, j)].set_zero();
            }
        }
    }
    Ok(total)
}

/// Eigenvalues only (no Schur vectors), from a Hessenberg reduction with
/// balancing.
pub fn eigenvalues(a: &ComplexMatrix) -> Result<Vec<ComplexScalar>> {
    let hess = hessenberg(a, true);
    let mut t = hess.h;
    shifted_qr(&mut t, None, None)?;
    let mut vals: Vec<ComplexScalar> = (0..t.rows()).map(|i| t[(i, i)].clone()).collect();
    super::sort_spectrum(&mut vals);
    Ok(vals)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::random::random_matrix;

    fn check_schur(a: &ComplexMatrix, f: &SchurForm, slack: i32) {
        let ctx = a.ctx();
        let n = a.rows();
        let zz = f.z.adjoint_matmul(&f.z);
        assert!(zz.max_abs_diff(&ComplexMatrix::identity(n, ctx)) < ctx.tol(slack));
        let recon = f.z.matmul(&f.t).matmul(&f.z.adjoint());
        let tol = Float::with_val(ctx.bits(), ctx.tol(slack) * a.frobenius_norm());
        assert!(recon.max_abs_diff(a) < tol);
    }

    #[test]
    fn diagonal_is_already_triangular() {
        let ctx = Precision::new(30).unwrap();
        let a = ComplexMatrix::from_f64(3, 3, ctx, &[3., 0., 0., 0., 1., 0., 0., 0., 2.], &[]);
        let f = schur_qr(&a, SchurMode::ComplexShifted, None).unwrap();
        assert_eq!(f.t, a);
        assert_eq!(f.iterations, 0);
    }

    #[test]
    fn random_complex_schur() {
        for digits in [16, 40] {
            let ctx = Precision::new(digits).unwrap();
            let a = random_matrix(9, 9, ctx, 31);
            let f = schur_qr(&a, SchurMode::ComplexShifted, None).unwrap();
            check_schur(&a, &f, 4);
            for i in 1..9 {
                for j in 0..i {
                    assert!(f.t[(i, j)].is_zero());
                }
            }
        }
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let ctx = Precision::new(20).unwrap();
        let a = random_matrix(6, 6, ctx, 2);
        let err = schur_qr(&a, SchurMode::ComplexShifted, Some(1)).unwrap_err();
        assert!(matches!(err, Error::NoConvergence { mode: "complex_shifted", .. }));
    }

    #[test]
    fn givens_zeroes_second_entry() {
        let bits = 100;
        let a = ComplexScalar::from_f64(0.3, -1.2, bits);
        let b = ComplexScalar::from_f64(-2.0, 0.7, bits);
        let g = Givens::zeroing(&a, &b);
        let sc = g.s.conj();
        let (mut x, mut y) = (a.clone(), b.clone());
        g.apply_left(&mut x, &mut y, &sc);
        assert!(y.abs().to_f64() < 1e-28);
        let expect = (a.norm_sqr() + b.norm_sqr()).sqrt().to_f64();
        assert!((x.abs().to_f64() - expect).abs() < 1e-28);
    }
}
