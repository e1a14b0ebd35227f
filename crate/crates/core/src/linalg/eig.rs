use std::cmp::Ordering;

use rug::Float;

use super::hessenberg::hessenberg;
use super::schur::shifted_qr;
use crate::error::Result;
use crate::mp::{householder_qr, normalize, vec_norm, ComplexMatrix, ComplexScalar};

/// Eigenpairs of a general square matrix.
#[derive(Debug, Clone)]
pub struct SpectrumResult {
    /// Sorted by real part, ties by imaginary part.
    pub eigenvalues: Vec<ComplexScalar>,
    /// Unit columns; the largest-modulus entry of each is real positive.
    pub right_vectors: ComplexMatrix,
    /// `||A v - lambda v||` for every pair.
    pub residuals: Vec<f64>,
}

impl SpectrumResult {
    pub fn max_residual(&self) -> f64 {
        self.residuals.iter().copied().fold(0.0, f64::max)
    }

    pub fn max_abs_imag(&self) -> f64 {
        self.eigenvalues.iter().map(|z| z.im.to_f64().abs()).fold(0.0, f64::max)
    }
}

pub(crate) fn compare_eigen(a: &ComplexScalar, b: &ComplexScalar) -> Ordering {
    a.re.partial_cmp(&b.re).unwrap_or(Ordering::Equal).then_with(|| a.im.partial_cmp(&b.im).unwrap_or(Ordering::Equal))
}

/// Eigen-decomposition through balancing, Hessenberg reduction and complex
/// shifted QR; eigenvectors by back-substitution on the Schur factor.
///
/// Eigenvalues closer than `sqrt(u) ||A||_F` are treated as one cluster and
/// their vectors are orthonormalized within the cluster, which picks a
/// well-conditioned basis of a (numerically) degenerate eigenspace.
pub fn eig(a: &ComplexMatrix) -> Result<SpectrumResult> {
    assert!(a.is_square(), "eig needs a square matrix");
    let n = a.rows();
    let ctx = a.ctx();
    let bits = ctx.bits();
    let hess = hessenberg(a, true);
    let mut t = hess.h;
    let mut z = hess.q;
    shifted_qr(&mut t, Some(&mut z), None)?;

    let values: Vec<ComplexScalar> = (0..n).map(|i| t[(i, i)].clone()).collect();
    let mut tiny = t.frobenius_norm();
    tiny *= ctx.epsilon();
    if tiny.is_zero() {
        tiny = ctx.epsilon();
    }

    // Triangular eigenvectors: (T - lambda_k) x = 0 with x_k = 1.
    let mut x = ComplexMatrix::zeros(n, n, ctx);
    let mut col: Vec<ComplexScalar> = vec![ComplexScalar::zero(bits); n];
    for k in 0..n {
        for c in col.iter_mut() {
            c.set_zero();
        }
        col[k] = ComplexScalar::one(bits);
        for i in (0..k).rev() {
            let mut s = ComplexScalar::zero(bits);
            for j in i + 1..=k {
                if !t[(i, j)].is_zero() && !col[j].is_zero() {
                    s.mul_add_assign(&t[(i, j)], &col[j]);
                }
            }
            if s.is_zero() {
                continue;
            }
            let mut d = &t[(i, i)] - &values[k];
            if d.abs() < tiny {
                d = ComplexScalar::from_real(tiny.clone());
            }
            col[i] = -&(&s / &d);
        }
        x.set_column(k, &col);
    }
    let mut v = z.matmul(&x);
    for i in 0..n {
        let s = &hess.scale[i];
        if *s != 1 {
            for z in v.row_mut(i) {
                z.scale_assign(s);
            }
        }
    }
    for k in 0..n {
        let mut c = v.column(k);
        normalize(&mut c);
        v.set_column(k, &c);
    }

    orthonormalize_clusters(&mut v, &values, a)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| compare_eigen(&values[i], &values[j]));
    let eigenvalues: Vec<ComplexScalar> = order.iter().map(|&i| values[i].clone()).collect();
    let mut right_vectors = ComplexMatrix::zeros(n, n, ctx);
    for (dst, &src) in order.iter().enumerate() {
        let mut c = v.column(src);
        fix_phase(&mut c);
        right_vectors.set_column(dst, &c);
    }
    let residuals = residuals(a, &eigenvalues, &right_vectors);
    Ok(SpectrumResult { eigenvalues, right_vectors, residuals })
}

fn orthonormalize_clusters(v: &mut ComplexMatrix, values: &[ComplexScalar], a: &ComplexMatrix) -> Result<()> {
    let n = values.len();
    let ctx = a.ctx();
    let tol = ctx.epsilon().sqrt().to_f64() * a.frobenius_norm().to_f64().max(1.0);
    let pts: Vec<(f64, f64)> = values.iter().map(|z| z.to_f64_pair()).collect();
    // union-find over close pairs
    let mut parent: Vec<usize> = (0..n).collect();
    fn root(p: &mut [usize], mut i: usize) -> usize {
        while p[i] != i {
            p[i] = p[p[i]];
            i = p[i];
        }
        i
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1);
            if d <= tol {
                let (ri, rj) = (root(&mut parent, i), root(&mut parent, j));
                if ri != rj {
                    parent[rj] = ri;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = root(&mut parent, i);
        groups.entry(r).or_default().push(i);
    }
    for members in groups.values().filter(|m| m.len() > 1) {
        let sub = ComplexMatrix::from_fn(n, members.len(), ctx, |i, j| v[(i, members[j])].clone());
        let q = householder_qr(&sub)?.q;
        // keep the new basis only if it still spans an invariant subspace
        // (a defective cluster fails this)
        let worst = |cols: &dyn Fn(usize) -> Vec<ComplexScalar>| {
            members.iter().enumerate().map(|(j, &m)| residual(a, &values[m], &cols(j))).fold(0.0, f64::max)
        };
        let before = worst(&|j| v.column(members[j]));
        let after = worst(&|j| q.column(j));
        let floor = ctx.epsilon().to_f64() * a.frobenius_norm().to_f64() * n as f64;
        if after <= (10.0 * before).max(floor) {
            for (j, &m) in members.iter().enumerate() {
                v.set_column(m, &q.column(j));
            }
        }
    }
    Ok(())
}

/// Rotates `c` so its largest-modulus entry is real positive.
pub fn fix_phase(c: &mut [ComplexScalar]) {
    let mut best: Option<(usize, Float)> = None;
    for (i, z) in c.iter().enumerate() {
        let m = z.norm_sqr();
        match &best {
            Some((_, b)) if *b >= m => {}
            _ => best = Some((i, m)),
        }
    }
    if let Some((i, m)) = best {
        if m.is_zero() {
            return;
        }
        let p = c[i].phase().conj();
        for z in c.iter_mut() {
            z.mul_assign_ref(&p);
        }
        c[i].im = Float::new(c[i].prec());
    }
}

fn residual(a: &ComplexMatrix, lambda: &ComplexScalar, c: &[ComplexScalar]) -> f64 {
    let mut r = a.matvec(c);
    for (ri, ci) in r.iter_mut().zip(c) {
        ri.mul_sub_assign(lambda, ci);
    }
    vec_norm(&r).to_f64()
}

fn residuals(a: &ComplexMatrix, values: &[ComplexScalar], v: &ComplexMatrix) -> Vec<f64> {
    (0..values.len()).map(|k| residual(a, &values[k], &v.column(k))).collect()
}
