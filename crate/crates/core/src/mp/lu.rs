use rug::Float;

use super::matrix::ComplexMatrix;
use super::scalar::ComplexScalar;
use crate::error::{Error, Result};

/// `PA = LU` with partial pivoting; unit-diagonal `L` and `U` share storage.
#[derive(Debug, Clone)]
pub struct LuFactors {
    lu: ComplexMatrix,
    perm: Vec<usize>,
}

impl LuFactors {
    /// Factors a square matrix. Pivots are chosen by largest modulus; a pivot
    /// below `10^{-2P} ||A||_F` is reported as singular.
    pub fn new(a: &ComplexMatrix) -> Result<Self> {
        if !a.is_square() {
            return Err(Error::DimensionMismatch(format!("LU needs a square matrix, got {}x{}", a.rows(), a.cols())));
        }
        let n = a.rows();
        let ctx = a.ctx();
        let bits = ctx.bits();
        let threshold = {
            let mut t = a.frobenius_norm();
            t *= ctx.pow10(-2 * ctx.digits() as i32);
            t.square()
        };
        let mut lu = a.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let mut best = k;
            let mut best_mag = lu[(k, k)].norm_sqr();
            for i in k + 1..n {
                let mag = lu[(i, k)].norm_sqr();
                if mag > best_mag {
                    best = i;
                    best_mag = mag;
                }
            }
            if best_mag <= threshold || best_mag.is_zero() {
                return Err(Error::SingularMatrix { step: k, pivot: best_mag.sqrt().to_f64() });
            }
            if best != k {
                let (x, y) = lu.two_rows_mut(k, best);
                x.swap_with_slice(y);
                perm.swap(k, best);
            }
            let pivot_inv = &ComplexScalar::one(bits) / &lu[(k, k)];
            for i in k + 1..n {
                if lu[(i, k)].is_zero() {
                    continue;
                }
                let factor = &lu[(i, k)] * &pivot_inv;
                let (row_k, row_i) = lu.two_rows_mut(k, i);
                for j in k + 1..n {
                    if !row_k[j].is_zero() {
                        row_i[j].mul_sub_assign(&factor, &row_k[j]);
                    }
                }
                row_i[k] = factor;
            }
        }
        Ok(Self { lu, perm })
    }

    pub fn dim(&self) -> usize {
        self.lu.rows()
    }

    /// Solves `A x = b`.
    pub fn solve_vec(&self, b: &[ComplexScalar]) -> Vec<ComplexScalar> {
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut x: Vec<ComplexScalar> = self.perm.iter().map(|&p| b[p].clone()).collect();
        for i in 0..n {
            let row = self.lu.row(i);
            let (head, tail) = x.split_at_mut(i);
            for (l, xj) in row[..i].iter().zip(head.iter()) {
                if !l.is_zero() {
                    tail[0].mul_sub_assign(l, xj);
                }
            }
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let (head, tail) = x.split_at_mut(i + 1);
            let xi = &mut head[i];
            for (u, xj) in row[i + 1..].iter().zip(tail.iter()) {
                if !u.is_zero() {
                    xi.mul_sub_assign(u, xj);
                }
            }
            *xi = &*xi / &row[i];
        }
        x
    }

    /// Solves `A† x = b`.
    pub fn solve_adjoint_vec(&self, b: &[ComplexScalar]) -> Vec<ComplexScalar> {
        // A = P^T L U  =>  A† = U† L† P
        let n = self.dim();
        assert_eq!(b.len(), n);
        let mut y: Vec<ComplexScalar> = b.to_vec();
        // U† y' = b (lower triangular, forward)
        for i in 0..n {
            for j in 0..i {
                let u = &self.lu[(j, i)];
                if !u.is_zero() {
                    let prev = y[j].clone();
                    let t = &u.conj() * &prev;
                    y[i].sub_assign_ref(&t);
                }
            }
            y[i] = &y[i] / &self.lu[(i, i)].conj();
        }
        // L† z = y' (upper triangular, unit diagonal, backward)
        for i in (0..n).rev() {
            for j in i + 1..n {
                let l = &self.lu[(j, i)];
                if !l.is_zero() {
                    let prev = y[j].clone();
                    let t = &l.conj() * &prev;
                    y[i].sub_assign_ref(&t);
                }
            }
        }
        // x = P^T z
        let bits = self.lu.bits();
        let mut x: Vec<ComplexScalar> = (0..n).map(|_| ComplexScalar::zero(bits)).collect();
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k].clone();
        }
        x
    }

    pub fn solve(&self, b: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(b.rows(), self.dim());
        let mut out = ComplexMatrix::zeros(b.rows(), b.cols(), b.ctx());
        for j in 0..b.cols() {
            out.set_column(j, &self.solve_vec(&b.column(j)));
        }
        out
    }

    /// Product of the pivots' moduli (|det A|).
    pub fn abs_det(&self) -> Float {
        let mut d = Float::with_val(self.lu.bits(), 1);
        for i in 0..self.dim() {
            d *= self.lu[(i, i)].abs();
        }
        d
    }
}

/// Solves `A X = B` by partial-pivoting LU.
pub fn lu_solve(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    if b.rows() != a.rows() {
        return Err(Error::DimensionMismatch(format!("rhs has {} rows, matrix {}", b.rows(), a.rows())));
    }
    Ok(LuFactors::new(a)?.solve(b))
}
