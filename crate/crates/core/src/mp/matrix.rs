use std::fmt;
use std::ops::{Index, IndexMut};

use rug::Float;

use super::precision::Precision;
use super::scalar::ComplexScalar;

/// Dense row-major complex matrix; every entry carries the context's width.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    ctx: Precision,
    data: Vec<ComplexScalar>,
}

impl ComplexMatrix {
    pub fn zeros(rows: usize, cols: usize, ctx: Precision) -> Self {
        let data = (0..rows * cols).map(|_| ComplexScalar::zero(ctx.bits())).collect();
        Self { rows, cols, ctx, data }
    }

    pub fn identity(n: usize, ctx: Precision) -> Self {
        let mut m = Self::zeros(n, n, ctx);
        for i in 0..n {
            m[(i, i)] = ComplexScalar::one(ctx.bits());
        }
        m
    }

    pub fn from_fn(
        rows: usize,
        cols: usize,
        ctx: Precision,
        mut f: impl FnMut(usize, usize) -> ComplexScalar,
    ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                let z = f(i, j);
                data.push(if z.prec() == ctx.bits() { z } else { z.with_prec(ctx.bits()) });
            }
        }
        Self { rows, cols, ctx, data }
    }

    /// Builds from binary doubles (exact conversion).
    pub fn from_f64(rows: usize, cols: usize, ctx: Precision, re: &[f64], im: &[f64]) -> Self {
        assert_eq!(re.len(), rows * cols);
        assert!(im.is_empty() || im.len() == rows * cols);
        Self::from_fn(rows, cols, ctx, |i, j| {
            let k = i * cols + j;
            ComplexScalar::from_f64(re[k], if im.is_empty() { 0.0 } else { im[k] }, ctx.bits())
        })
    }

    pub fn diagonal(values: &[ComplexScalar], ctx: Precision) -> Self {
        let n = values.len();
        let mut m = Self::zeros(n, n, ctx);
        for (i, v) in values.iter().enumerate() {
            m[(i, i)] = v.with_prec(ctx.bits());
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn ctx(&self) -> Precision {
        self.ctx
    }

    pub fn bits(&self) -> u32 {
        self.ctx.bits()
    }

    pub fn data(&self) -> &[ComplexScalar] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[ComplexScalar] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [ComplexScalar] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<ComplexScalar> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn set_column(&mut self, j: usize, values: &[ComplexScalar]) {
        assert_eq!(values.len(), self.rows);
        for (i, v) in values.iter().enumerate() {
            self[(i, j)] = v.clone();
        }
    }

    /// Mutable references to two distinct rows.
    pub fn two_rows_mut(&mut self, a: usize, b: usize) -> (&mut [ComplexScalar], &mut [ComplexScalar]) {
        assert_ne!(a, b);
        let cols = self.cols;
        if a < b {
            let (lo, hi) = self.data.split_at_mut(b * cols);
            (&mut lo[a * cols..(a + 1) * cols], &mut hi[..cols])
        } else {
            let (lo, hi) = self.data.split_at_mut(a * cols);
            (&mut hi[..cols], &mut lo[b * cols..(b + 1) * cols])
        }
    }

    /// Rounds every entry into a new context.
    pub fn with_ctx(&self, ctx: Precision) -> Self {
        Self::from_fn(self.rows, self.cols, ctx, |i, j| self[(i, j)].with_prec(ctx.bits()))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.ctx, |i, j| self[(j, i)].conj())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, self.ctx, |i, j| self[(j, i)].clone())
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
        let c0 = cols.start;
        let r0 = rows.start;
        Self::from_fn(rows.len(), cols.len(), self.ctx, |i, j| self[(r0 + i, c0 + j)].clone())
    }

    /// `self * other`. Zero entries are skipped, which makes products with
    /// banded lattice Hamiltonians cheap.
    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let (m, p, n) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(m, n, self.ctx);
        for i in 0..m {
            let out_row = &mut out.data[i * n..(i + 1) * n];
            for k in 0..p {
                let a = &self.data[i * p + k];
                if a.is_zero() {
                    continue;
                }
                let b_row = &other.data[k * n..(k + 1) * n];
                for (o, b) in out_row.iter_mut().zip(b_row) {
                    if !b.is_zero() {
                        o.mul_add_assign(a, b);
                    }
                }
            }
        }
        out
    }

    /// `self† * other` without forming the adjoint.
    pub fn adjoint_matmul(&self, other: &Self) -> Self {
        assert_eq!(self.rows, other.rows, "adjoint_matmul dimension mismatch");
        let (p, m, n) = (self.rows, self.cols, other.cols);
        let mut out = Self::zeros(m, n, self.ctx);
        for k in 0..p {
            for i in 0..m {
                let a = &self.data[k * m + i];
                if a.is_zero() {
                    continue;
                }
                let out_row = &mut out.data[i * n..(i + 1) * n];
                for (o, b) in out_row.iter_mut().zip(&other.data[k * n..(k + 1) * n]) {
                    o.conj_mul_add_assign(a, b);
                }
            }
        }
        out
    }

    pub fn matvec(&self, x: &[ComplexScalar]) -> Vec<ComplexScalar> {
        assert_eq!(self.cols, x.len());
        (0..self.rows)
            .map(|i| {
                let mut acc = ComplexScalar::zero(self.bits());
                for (a, b) in self.row(i).iter().zip(x) {
                    if !a.is_zero() {
                        acc.mul_add_assign(a, b);
                    }
                }
                acc
            })
            .collect()
    }

    /// `self† x`
    pub fn adjoint_matvec(&self, x: &[ComplexScalar]) -> Vec<ComplexScalar> {
        assert_eq!(self.rows, x.len());
        let mut out: Vec<ComplexScalar> = (0..self.cols).map(|_| ComplexScalar::zero(self.bits())).collect();
        for (i, xi) in x.iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                if !a.is_zero() {
                    o.conj_mul_add_assign(a, xi);
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { rows: self.rows, cols: self.cols, ctx: self.ctx, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { rows: self.rows, cols: self.cols, ctx: self.ctx, data }
    }

    pub fn scale(&self, s: &ComplexScalar) -> Self {
        let data = self.data.iter().map(|a| a * s).collect();
        Self { rows: self.rows, cols: self.cols, ctx: self.ctx, data }
    }

    pub fn scale_real(&self, s: &Float) -> Self {
        let data = self.data.iter().map(|a| a.scaled(s)).collect();
        Self { rows: self.rows, cols: self.cols, ctx: self.ctx, data }
    }

    /// `self - z I`
    pub fn shift_diagonal(&self, z: &ComplexScalar) -> Self {
        let mut out = self.clone();
        for i in 0..self.rows.min(self.cols) {
            out[(i, i)].sub_assign_ref(z);
        }
        out
    }

    pub fn frobenius_norm(&self) -> Float {
        let mut acc = Float::new(self.bits());
        for z in &self.data {
            acc += &z.re * &z.re;
            acc += &z.im * &z.im;
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> Float {
        let mut best = Float::new(self.bits());
        for z in &self.data {
            let a = z.abs();
            if a > best {
                best = a;
            }
        }
        best
    }

    /// Largest row sum of moduli (matrix infinity norm).
    pub fn norm_inf(&self) -> Float {
        let mut best = Float::new(self.bits());
        for i in 0..self.rows {
            let mut s = Float::new(self.bits());
            for z in self.row(i) {
                s += z.abs();
            }
            if s > best {
                best = s;
            }
        }
        best
    }

    /// Largest column sum of moduli (matrix one norm).
    pub fn norm_one(&self) -> Float {
        self.adjoint().norm_inf()
    }

    /// `max |a_ij - b_ij|`
    pub fn max_abs_diff(&self, other: &Self) -> Float {
        self.sub(other).max_abs()
    }

    /// `|| self - self† ||_F`
    pub fn hermitian_defect(&self) -> Float {
        self.sub(&self.adjoint()).frobenius_norm()
    }

    pub fn trace(&self) -> ComplexScalar {
        let mut t = ComplexScalar::zero(self.bits());
        for i in 0..self.rows.min(self.cols) {
            t.add_assign_ref(&self[(i, i)]);
        }
        t
    }

    pub fn to_f64_pairs(&self) -> Vec<(f64, f64)> {
        self.data.iter().map(|z| z.to_f64_pair()).collect()
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = ComplexScalar;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &ComplexScalar {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut ComplexScalar {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [{}]", self.rows, self.cols, self.ctx)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(|z| format!("{z:?}")).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        Ok(())
    }
}

/// Euclidean norm of a vector.
pub fn vec_norm(v: &[ComplexScalar]) -> Float {
    let bits = v.first().map(|z| z.prec()).unwrap_or(53);
    let mut acc = Float::new(bits);
    for z in v {
        acc += &z.re * &z.re;
        acc += &z.im * &z.im;
    }
    acc.sqrt()
}

/// `<a, b> = sum conj(a_i) b_i`
pub fn vec_dot(a: &[ComplexScalar], b: &[ComplexScalar]) -> ComplexScalar {
    let bits = a.first().map(|z| z.prec()).unwrap_or(53);
    let mut acc = ComplexScalar::zero(bits);
    for (x, y) in a.iter().zip(b) {
        acc.conj_mul_add_assign(x, y);
    }
    acc
}

/// Scales `v` to unit norm in place; returns the original norm.
pub fn normalize(v: &mut [ComplexScalar]) -> Float {
    let n = vec_norm(v);
    if !n.is_zero() {
        let inv = Float::with_val(n.prec(), 1u32 / &n);
        for z in v.iter_mut() {
            z.scale_assign(&inv);
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn matmul_and_adjoint_products_agree() {
        let ctx = Precision::new(30).unwrap();
        let a = ComplexMatrix::from_f64(2, 3, ctx, &[1., 2., 3., 4., 5., 6.], &[0., 1., 0., -1., 0., 2.]);
        let b = ComplexMatrix::from_f64(2, 2, ctx, &[1., 0., 2., 1.], &[1., 0., 0., 0.]);
        let direct = a.adjoint().matmul(&b);
        let fused = a.adjoint_matmul(&b);
        assert!(direct.max_abs_diff(&fused).is_zero());
        let v = b.column(0);
        let mv = a.adjoint_matvec(&v);
        let reference = a.adjoint().matvec(&v);
        for (x, y) in mv.iter().zip(&reference) {
            assert!((x - y).abs().is_zero());
        }
    }

    #[test]
    fn identity_is_neutral() {
        let ctx = Precision::new(20).unwrap();
        let a = ComplexMatrix::from_f64(3, 3, ctx, &[1., 2., 3., 4., 5., 6., 7., 8., 9.5], &[]);
        let i = ComplexMatrix::identity(3, ctx);
        assert_eq!(a.matmul(&i), a);
        assert_eq!(i.matmul(&a), a);
        assert_eq!(a.trace().to_f64_pair(), (15.5, 0.0));
    }

    #[test]
    fn two_rows_mut_orders() {
        let ctx = Precision::double();
        let mut a = ComplexMatrix::from_f64(3, 1, ctx, &[1., 2., 3.], &[]);
        {
            let (x, y) = a.two_rows_mut(2, 0);
            std::mem::swap(&mut x[0], &mut y[0]);
        }
        assert_eq!(a[(0, 0)].re.to_f64(), 3.0);
        assert_eq!(a[(2, 0)].re.to_f64(), 1.0);
    }
}
