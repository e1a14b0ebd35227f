use rug::{Assign, Float};

use super::matrix::ComplexMatrix;
use super::scalar::ComplexScalar;
use crate::error::{Error, Result};

/// Thin QR factors with `R` carrying a real non-negative diagonal.
#[derive(Debug, Clone)]
pub struct QrFactors {
    pub q: ComplexMatrix,
    pub r: ComplexMatrix,
    /// Smallest `v†v` among the reflectors that were applied (`None` when
    /// every column was already reduced).
    pub min_denominator: Option<Float>,
}

/// Householder QR of a tall matrix (`rows >= cols`).
///
/// Reflectors are `I - 2 v v† / (v† v)` with the unnormalized
/// `v = x - alpha e1`, `alpha = -e^{i arg x0} ||x||`. Columns whose
/// sub-diagonal part is already zero are left untouched, so a zero column
/// yields `R[k][k] = 0` and the `k`-th column of `Q` stays the accumulated
/// image of `e_k`.
pub fn householder_qr(a: &ComplexMatrix) -> Result<QrFactors> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::DimensionMismatch(format!("householder_qr needs rows >= cols, got {m}x{n}")));
    }
    let bits = a.bits();
    let mut r = a.clone();
    let mut reflectors: Vec<Option<(Vec<ComplexScalar>, Float)>> = Vec::with_capacity(n);
    let mut min_denominator: Option<Float> = None;

    for k in 0..n {
        let mut tail = Float::new(bits);
        for i in k + 1..m {
            tail += r[(i, k)].norm_sqr();
        }
        if tail.is_zero() {
            reflectors.push(None);
            continue;
        }
        let x0 = r[(k, k)].clone();
        let x0_abs = x0.abs();
        let norm = Float::with_val(bits, x0.norm_sqr() + &tail).sqrt();
        let phase = x0.phase();
        // v0 = x0 - alpha = e^{i phi} (|x0| + ||x||): no cancellation
        let v0 = phase.scaled(&Float::with_val(bits, &x0_abs + &norm));
        let mut v = Vec::with_capacity(m - k);
        v.push(v0);
        for i in k + 1..m {
            v.push(r[(i, k)].clone());
        }
        let vtv = Float::with_val(bits, v[0].norm_sqr() + &tail);
        match &min_denominator {
            Some(d) if *d <= vtv => {}
            _ => min_denominator = Some(vtv.clone()),
        }
        let two_over = Float::with_val(bits, 2u32 / &vtv);
        apply_reflector_left(&mut r, &v, &two_over, k, k);
        // the reduced column is exactly (alpha, 0, ..., 0)
        let alpha = -&phase.scaled(&norm);
        r[(k, k)] = alpha;
        for i in k + 1..m {
            r[(i, k)].set_zero();
        }
        reflectors.push(Some((v, two_over)));
    }

    // Q = H_0 H_1 ... H_{n-1} [I; 0], accumulated backwards.
    let mut q = ComplexMatrix::zeros(m, n, a.ctx());
    for i in 0..n {
        q[(i, i)] = ComplexScalar::one(bits);
    }
    for k in (0..n).rev() {
        if let Some((v, two_over)) = &reflectors[k] {
            apply_reflector_left(&mut q, v, two_over, k, k);
        }
    }

    // Phase-fix: R[k][k] real non-negative.
    for k in 0..n {
        let d = r[(k, k)].clone();
        if d.is_zero() {
            continue;
        }
        let p = d.phase();
        let pc = p.conj();
        for j in k..n {
            let v = &r[(k, j)] * &pc;
            r[(k, j)] = v;
        }
        r[(k, k)].im.assign(0);
        for i in 0..m {
            let v = &q[(i, k)] * &p;
            q[(i, k)] = v;
        }
    }

    // Return an n x n R.
    let r = r.submatrix(0..n, 0..n);
    Ok(QrFactors { q, r, min_denominator })
}

/// Applies `I - t v v†` (v acting on rows `row0..`) to columns `col0..`.
fn apply_reflector_left(a: &mut ComplexMatrix, v: &[ComplexScalar], t: &Float, row0: usize, col0: usize) {
    let bits = a.bits();
    let cols = a.cols();
    let mut s = ComplexScalar::zero(bits);
    for j in col0..cols {
        s.set_zero();
        for (idx, vi) in v.iter().enumerate() {
            let aij = &a[(row0 + idx, j)];
            if !aij.is_zero() {
                s.conj_mul_add_assign(vi, aij);
            }
        }
        if s.is_zero() {
            continue;
        }
        s.scale_assign(t);
        for (idx, vi) in v.iter().enumerate() {
            a[(row0 + idx, j)].mul_sub_assign(vi, &s);
        }
    }
}
