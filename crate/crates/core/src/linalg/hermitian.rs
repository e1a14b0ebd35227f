use rug::Float;

use crate::error::{Error, Result};
use crate::mp::{ComplexMatrix, ComplexScalar};

const MAX_SWEEPS: usize = 60;

/// Checks hermiticity and returns the matrix with real diagonal and
/// lower triangle exactly `conj` of the upper one.
fn symmetrized(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch("eig_hermitian needs a square matrix".into()));
    }
    let n = a.rows();
    let ctx = a.ctx();
    let bits = ctx.bits();
    let norm = a.frobenius_norm();
    let defect = a.hermitian_defect();
    if defect > Float::with_val(bits, ctx.tol(6) * &norm) {
        let rel = if norm.is_zero() { f64::INFINITY } else { (defect / &norm).to_f64() };
        return Err(Error::NotHermitian(rel));
    }
    let mut m = a.clone();
    let half = Float::with_val(bits, 0.5);
    for i in 0..n {
        m[(i, i)].im = Float::new(bits);
        for j in i + 1..n {
            let mut avg = &a[(i, j)] + &a[(j, i)].conj();
            avg.scale_assign(&half);
            m[(j, i)] = avg.conj();
            m[(i, j)] = avg;
        }
    }
    Ok(m)
}

/// Eigenvalues only, ascending: Householder reduction to a real symmetric
/// tridiagonal matrix followed by implicit QL.
pub fn eigvals_hermitian(a: &ComplexMatrix) -> Result<Vec<Float>> {
    let mut m = symmetrized(a)?;
    let n = m.rows();
    let bits = m.bits();
    for k in 0..n.saturating_sub(2) {
        householder_step(&mut m, k);
    }
    let mut d: Vec<Float> = (0..n).map(|i| m[(i, i)].re.clone()).collect();
    let mut e: Vec<Float> = (0..n).map(|i| if i + 1 < n { m[(i + 1, i)].abs() } else { Float::new(bits) }).collect();
    tridiagonal_ql(&mut d, &mut e, m.ctx().epsilon())?;
    d.sort_by(|x, y| x.partial_cmp(y).unwrap());
    Ok(d)
}

/// Zeroes column `k` below the subdiagonal with `P = I - beta v v^H`
/// applied from both sides.
fn householder_step(m: &mut ComplexMatrix, k: usize) {
    let n = m.rows();
    let bits = m.bits();
    let mut v: Vec<ComplexScalar> = (k + 1..n).map(|i| m[(i, k)].clone()).collect();
    let tail = v[1..].iter().fold(Float::new(bits), |acc, z| acc + z.norm_sqr());
    if tail.is_zero() {
        return;
    }
    let x0abs = v[0].abs();
    let alpha = Float::with_val(bits, Float::with_val(bits, &tail + v[0].norm_sqr()).sqrt_ref());
    let phase = if x0abs.is_zero() { ComplexScalar::one(bits) } else { v[0].phase() };
    v[0].add_assign_ref(&phase.scaled(&alpha));
    let beta = Float::with_val(bits, &alpha + &x0abs) * &alpha;
    let beta = beta.recip();
    let sub = n - k - 1;
    // p = beta A v over the trailing block
    let mut p: Vec<ComplexScalar> = (0..sub)
        .map(|i| {
            let row = &m.row(k + 1 + i)[k + 1..];
            let mut acc = ComplexScalar::zero(bits);
            for (aij, vj) in row.iter().zip(&v) {
                acc.mul_add_assign(aij, vj);
            }
            acc.scaled(&beta)
        })
        .collect();
    let mut vp = ComplexScalar::zero(bits);
    for (vi, pi) in v.iter().zip(&p) {
        vp.conj_mul_add_assign(vi, pi);
    }
    let kk = Float::with_val(bits, &vp.re * &beta) / 2u32;
    for (pi, vi) in p.iter_mut().zip(&v) {
        pi.sub_assign_ref(&vi.scaled(&kk));
    }
    // A <- A - v w^H - w v^H
    for i in 0..sub {
        let row = &mut m.row_mut(k + 1 + i)[k + 1..];
        for j in 0..sub {
            row[j].mul_sub_assign(&v[i], &p[j].conj());
            row[j].mul_sub_assign(&p[i], &v[j].conj());
        }
    }
    let new = -&phase.scaled(&alpha);
    for i in k + 1..n {
        let val = if i == k + 1 { new.clone() } else { ComplexScalar::zero(bits) };
        m[(k, i)] = val.conj();
        m[(i, k)] = val;
    }
}

const MAX_QL_ITERS: usize = 60;

/// Implicit QL with Wilkinson shifts on diagonal `d` and subdiagonal `e`
/// (`e[i]` couples `i` and `i + 1`). Eigenvalues overwrite `d`.
fn tridiagonal_ql(d: &mut [Float], e: &mut [Float], eps: Float) -> Result<()> {
    let n = d.len();
    let bits = eps.prec();
    for l in 0..n {
        let mut iters = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = Float::with_val(bits, d[m].abs_ref()) + Float::with_val(bits, d[m + 1].abs_ref());
                if Float::with_val(bits, e[m].abs_ref()) <= Float::with_val(bits, &dd * &eps) {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iters += 1;
            if iters > MAX_QL_ITERS {
                return Err(Error::NoConvergence {
                    mode: "tridiagonal_ql",
                    iterations: iters,
                    context: format!("n={n}, eigenvalue {l}"),
                });
            }
            let mut g = Float::with_val(bits, &d[l + 1] - &d[l]) / Float::with_val(bits, &e[l] * 2u32);
            let mut r = Float::with_val(bits, g.hypot_ref(&Float::with_val(bits, 1u32)));
            let denom = if g.is_sign_negative() { Float::with_val(bits, &g - &r) } else { Float::with_val(bits, &g + &r) };
            g = Float::with_val(bits, &d[m] - &d[l]) + Float::with_val(bits, &e[l] / &denom);
            let mut s = Float::with_val(bits, 1u32);
            let mut c = Float::with_val(bits, 1u32);
            let mut p = Float::new(bits);
            let mut underflow = false;
            for i in (l..m).rev() {
                let f = Float::with_val(bits, &s * &e[i]);
                let b = Float::with_val(bits, &c * &e[i]);
                r = Float::with_val(bits, f.hypot_ref(&g));
                e[i + 1].clone_from(&r);
                if r.is_zero() {
                    d[i + 1] -= &p;
                    e[m] = Float::new(bits);
                    underflow = true;
                    break;
                }
                s = Float::with_val(bits, &f / &r);
                c = Float::with_val(bits, &g / &r);
                g = Float::with_val(bits, &d[i + 1] - &p);
                r = Float::with_val(bits, &d[i] - &g) * &s + Float::with_val(bits, &c * &b) * 2u32;
                p = Float::with_val(bits, &s * &r);
                d[i + 1] = Float::with_val(bits, &g + &p);
                g = Float::with_val(bits, &c * &r) - &b;
            }
            if underflow {
                continue;
            }
            d[l] -= &p;
            e[l] = g;
            e[m] = Float::new(bits);
        }
    }
    Ok(())
}

/// Cyclic Jacobi for Hermitian matrices. Values ascending, vectors as
/// columns of a unitary matrix in the same order.
pub fn eig_hermitian(a: &ComplexMatrix) -> Result<(Vec<Float>, ComplexMatrix)> {
    let mut m = symmetrized(a)?;
    let n = a.rows();
    let ctx = a.ctx();
    let bits = ctx.bits();
    let norm = a.frobenius_norm();
    let mut v = ComplexMatrix::identity(n, ctx);
    let mut threshold = norm.clone();
    threshold *= ctx.epsilon();
    threshold *= n.max(1) as u32;
    threshold.square_mut();

    let mut sweeps = 0;
    loop {
        let mut off = Float::new(bits);
        for i in 0..n {
            for j in i + 1..n {
                off += m[(i, j)].norm_sqr();
            }
        }
        if off <= threshold || off.is_zero() {
            break;
        }
        if sweeps >= MAX_SWEEPS {
            return Err(Error::NoConvergence {
                mode: "jacobi",
                iterations: sweeps,
                context: format!("n={n}, off-diagonal {:.3e}", off.sqrt().to_f64()),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                rotate(&mut m, &mut v, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(i, i)].re.partial_cmp(&m[(j, j)].re).unwrap());
    let values = order.iter().map(|&i| m[(i, i)].re.clone()).collect();
    let vectors = ComplexMatrix::from_fn(n, n, ctx, |i, j| v[(i, order[j])].clone());
    Ok((values, vectors))
}

/// Annihilates `m[p][q]` with `G = [[c, s], [-s e^{-i phi}, c e^{-i phi}]]`,
/// `m <- G† m G`, `v <- v G`.
fn rotate(m: &mut ComplexMatrix, v: &mut ComplexMatrix, p: usize, q: usize) {
    let b = m[(p, q)].clone();
    if b.is_zero() {
        return;
    }
    let bits = b.prec();
    let n = m.rows();
    let babs = b.abs();
    // e^{-i phi}
    let ph = b.phase().conj();
    let app = m[(p, p)].re.clone();
    let aqq = m[(q, q)].re.clone();
    let mut theta = Float::with_val(bits, &aqq - &app);
    theta /= Float::with_val(bits, &babs * 2u32);
    let t = {
        let mut root = Float::with_val(bits, theta.square_ref());
        root += 1u32;
        root.sqrt_mut();
        let mut den = Float::with_val(bits, theta.abs_ref());
        den += root;
        let mut t = Float::with_val(bits, 1u32 / den);
        if theta.is_sign_negative() {
            t = -t;
        }
        t
    };
    let mut c = Float::with_val(bits, t.square_ref());
    c += 1u32;
    c.sqrt_mut();
    c.recip_mut();
    let s = Float::with_val(bits, &t * &c);

    // columns: p' = c a_p - s e^{-i phi} a_q ; q' = s a_p + c e^{-i phi} a_q
    let sph = ph.scaled(&s);
    let cph = ph.scaled(&c);
    let rot_cols = |mat: &mut ComplexMatrix| {
        for i in 0..mat.rows() {
            let row = mat.row_mut(i);
            let ap = row[p].clone();
            let aq = row[q].clone();
            let mut np = ap.scaled(&c);
            np.mul_sub_assign(&sph, &aq);
            let mut nq = ap.scaled(&s);
            nq.mul_add_assign(&cph, &aq);
            row[p] = np;
            row[q] = nq;
        }
    };
    rot_cols(m);
    rot_cols(v);
    // rows with G†: p' = c r_p - s e^{i phi} r_q ; q' = s r_p + c e^{i phi} r_q
    let sphc = sph.conj();
    let cphc = cph.conj();
    for j in 0..n {
        let rp = m[(p, j)].clone();
        let rq = m[(q, j)].clone();
        let mut np = rp.scaled(&c);
        np.mul_sub_assign(&sphc, &rq);
        let mut nq = rp.scaled(&s);
        nq.mul_add_assign(&cphc, &rq);
        m[(p, j)] = np;
        m[(q, j)] = nq;
    }
    m[(p, q)] = ComplexScalar::zero(bits);
    m[(q, p)] = ComplexScalar::zero(bits);
    m[(p, p)].im = Float::new(bits);
    m[(q, q)].im = Float::new(bits);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mp::random::random_hermitian;
    use crate::mp::Precision;

    #[test]
    fn diagonal_values() {
        let ctx = Precision::new(20).unwrap();
        let a = ComplexMatrix::from_f64(2, 2, ctx, &[0.7, 0., 0., 0.3], &[]);
        let (vals, _) = eig_hermitian(&a).unwrap();
        assert_eq!(vals[0], ctx.real(0.3));
        assert_eq!(vals[1], ctx.real(0.7));
    }

    #[test]
    fn random_reconstruction() {
        let ctx = Precision::new(30).unwrap();
        let a = random_hermitian(20, ctx, 5);
        let (vals, v) = eig_hermitian(&a).unwrap();
        let lam: Vec<ComplexScalar> = vals.iter().map(|x| ComplexScalar::from_real(x.clone())).collect();
        let recon = v.matmul(&ComplexMatrix::diagonal(&lam, ctx)).matmul(&v.adjoint());
        assert!(recon.max_abs_diff(&a) < ctx.tol(4) * a.frobenius_norm());
        let g = v.adjoint_matmul(&v);
        assert!(g.max_abs_diff(&ComplexMatrix::identity(20, ctx)) < ctx.tol(4));
        for w in vals.windows(2) {
            assert!(w[0] <= w[1]);
        }
    }

    #[test]
    fn projector_has_binary_spectrum() {
        let ctx = Precision::new(25).unwrap();
        let mut v = ComplexMatrix::zeros(4, 1, ctx);
        for i in 0..4 {
            v[(i, 0)] = ComplexScalar::from_f64(0.5, 0.0, ctx.bits());
        }
        let p = v.matmul(&v.adjoint());
        let (vals, _) = eig_hermitian(&p).unwrap();
        for (k, x) in vals.iter().enumerate() {
            let target = if k == 3 { 1.0 } else { 0.0 };
            assert!((x.to_f64() - target).abs() < 1e-21);
        }
    }

    #[test]
    fn values_only_matches_jacobi() {
        let ctx = Precision::new(40).unwrap();
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (25, 4)] {
            let a = random_hermitian(n, ctx, seed);
            let (full, _) = eig_hermitian(&a).unwrap();
            let vals = eigvals_hermitian(&a).unwrap();
            for (x, y) in full.iter().zip(&vals) {
                assert!(Float::with_val(ctx.bits(), x - y).abs() < ctx.tol(5), "n={n}");
            }
        }
    }

    #[test]
    fn values_only_on_projector() {
        let ctx = Precision::new(30).unwrap();
        let mut v = ComplexMatrix::zeros(6, 2, ctx);
        for i in 0..6 {
            v[(i, i % 2)] = ComplexScalar::from_f64(1.0 / 3f64.sqrt(), 0.0, ctx.bits());
        }
        let vals = eigvals_hermitian(&v.matmul(&v.adjoint())).unwrap();
        for (k, x) in vals.iter().enumerate() {
            let target = if k >= 4 { 1.0 } else { 0.0 };
            assert!((x.to_f64() - target).abs() < 1e-15, "{k}: {x}");
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let ctx = Precision::new(20).unwrap();
        let a = ComplexMatrix::from_f64(2, 2, ctx, &[0., 1., 0., 0.], &[]);
        assert!(matches!(eig_hermitian(&a), Err(Error::NotHermitian(_))));
    }
}
