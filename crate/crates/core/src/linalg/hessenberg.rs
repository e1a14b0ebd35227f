use rug::Float;

use crate::mp::{ComplexMatrix, ComplexScalar};

/// `A = D Q H Q† D^{-1}` with `H` upper Hessenberg, `Q` unitary and `D` a
/// positive diagonal (powers of two).
#[derive(Debug, Clone)]
pub struct Hessenberg {
    pub h: ComplexMatrix,
    pub q: ComplexMatrix,
    pub scale: Vec<Float>,
}

impl Hessenberg {
    pub fn d(&self) -> ComplexMatrix {
        let diag: Vec<ComplexScalar> = self.scale.iter().map(|s| ComplexScalar::from_real(s.clone())).collect();
        ComplexMatrix::diagonal(&diag, self.h.ctx())
    }
}

/// Radix-2 row/column balancing (Parlett-Reinsch, 1-norms, 0.95 acceptance).
/// Returns `B = D^{-1} A D` and the diagonal of `D`. Scalings are exact.
pub fn balance(a: &ComplexMatrix) -> (ComplexMatrix, Vec<Float>) {
    let n = a.rows();
    let bits = a.bits();
    let mut b = a.clone();
    let mut scale = vec![Float::with_val(bits, 1); n];
    let mag = |z: &ComplexScalar| z.abs().to_f64();
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += mag(&b[(j, i)]);
                    r += mag(&b[(i, j)]);
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let s = c + r;
            let mut f = 1.0f64;
            let g = r / 2.0;
            while c < g {
                f *= 2.0;
                c *= 4.0;
            }
            let g = r * 2.0;
            while c > g {
                f /= 2.0;
                c /= 4.0;
            }
            if (c + r) / f < 0.95 * s {
                converged = false;
                let f_mp = Float::with_val(bits, f);
                let g_mp = Float::with_val(bits, 1.0 / f);
                scale[i] *= &f_mp;
                for z in b.row_mut(i) {
                    z.scale_assign(&g_mp);
                }
                for j in 0..n {
                    b[(j, i)].scale_assign(&f_mp);
                }
            }
        }
    }
    (b, scale)
}

/// Householder reduction to upper Hessenberg form, optionally after
/// balancing. Columns whose part below the subdiagonal is already zero are
/// skipped, so a Hessenberg input comes back unchanged with `Q = I`.
pub fn hessenberg(a: &ComplexMatrix, balance_first: bool) -> Hessenberg {
    assert!(a.is_square(), "hessenberg needs a square matrix");
    let n = a.rows();
    let bits = a.bits();
    let (mut h, scale) = if balance_first {
        balance(a)
    } else {
        (a.clone(), vec![Float::with_val(bits, 1); n])
    };
    let mut q = ComplexMatrix::identity(n, a.ctx());
    for k in 0..n.saturating_sub(2) {
        let mut tail = Float::new(bits);
        for i in k + 2..n {
            tail += h[(i, k)].norm_sqr();
        }
        if tail.is_zero() {
            continue;
        }
        let x0 = h[(k + 1, k)].clone();
        let norm = Float::with_val(bits, x0.norm_sqr() + &tail).sqrt();
        let phase = x0.phase();
        let v0 = phase.scaled(&Float::with_val(bits, x0.abs() + &norm));
        let mut v = Vec::with_capacity(n - k - 1);
        v.push(v0);
        for i in k + 2..n {
            v.push(h[(i, k)].clone());
        }
        let vtv = Float::with_val(bits, v[0].norm_sqr() + &tail);
        let t = Float::with_val(bits, 2u32 / &vtv);
        reflect_rows(&mut h, &v, &t, k + 1, k);
        reflect_cols(&mut h, &v, &t, k + 1);
        reflect_cols(&mut q, &v, &t, k + 1);
        h[(k + 1, k)] = -&phase.scaled(&norm);
        for i in k + 2..n {
            h[(i, k)].set_zero();
        }
    }
    Hessenberg { h, q, scale }
}

/// `A <- (I - t v v†) A` on rows `row0..`, columns `col0..`.
pub(crate) fn reflect_rows(a: &mut ComplexMatrix, v: &[ComplexScalar], t: &Float, row0: usize, col0: usize) {
    let bits = a.bits();
    let mut s = ComplexScalar::zero(bits);
    for j in col0..a.cols() {
        s.set_zero();
        for (idx, vi) in v.iter().enumerate() {
            let x = &a[(row0 + idx, j)];
            if !x.is_zero() {
                s.conj_mul_add_assign(vi, x);
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

/// `A <- A (I - t v v†)` on columns `col0..col0+len(v)`, all rows.
pub(crate) fn reflect_cols(a: &mut ComplexMatrix, v: &[ComplexScalar], t: &Float, col0: usize) {
    let bits = a.bits();
    let vc: Vec<ComplexScalar> = v.iter().map(|z| z.conj()).collect();
    let mut s = ComplexScalar::zero(bits);
    for i in 0..a.rows() {
        s.set_zero();
        let row = a.row_mut(i);
        for (idx, vi) in v.iter().enumerate() {
            let x = &row[col0 + idx];
            if !x.is_zero() {
                s.mul_add_assign(x, vi);
            }
        }
        if s.is_zero() {
            continue;
        }
        s.scale_assign(t);
        for (idx, vci) in vc.iter().enumerate() {
            row[col0 + idx].mul_sub_assign(&s, vci);
        }
    }
}
