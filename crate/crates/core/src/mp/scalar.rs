use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::{Assign, Float};

/// Complex number with both components at one MPFR precision.
#[derive(Clone, PartialEq)]
pub struct ComplexScalar {
    pub re: Float,
    pub im: Float,
}

impl ComplexScalar {
    pub fn zero(bits: u32) -> Self {
        Self { re: Float::new(bits), im: Float::new(bits) }
    }

    pub fn one(bits: u32) -> Self {
        Self { re: Float::with_val(bits, 1), im: Float::new(bits) }
    }

    pub fn i(bits: u32) -> Self {
        Self { re: Float::new(bits), im: Float::with_val(bits, 1) }
    }

    pub fn from_f64(re: f64, im: f64, bits: u32) -> Self {
        Self { re: Float::with_val(bits, re), im: Float::with_val(bits, im) }
    }

    pub fn from_real(re: Float) -> Self {
        let bits = re.prec();
        Self { re, im: Float::new(bits) }
    }

    pub fn new(re: Float, im: Float) -> Self {
        debug_assert_eq!(re.prec(), im.prec());
        Self { re, im }
    }

    /// Polar form `modulus * e^{i angle}`.
    pub fn from_polar(modulus: &Float, angle: &Float) -> Self {
        let bits = modulus.prec();
        let (s, c) = angle.clone().sin_cos(Float::new(bits));
        Self { re: Float::with_val(bits, modulus * &c), im: Float::with_val(bits, modulus * &s) }
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn set_zero(&mut self) {
        self.re.assign(0);
        self.im.assign(0);
    }

    pub fn norm_sqr(&self) -> Float {
        let mut out = Float::with_val(self.prec(), self.re.square_ref());
        out += &self.im * &self.im;
        out
    }

    /// Modulus, via `hypot` so it never overflows or underflows spuriously.
    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn conj(&self) -> Self {
        Self { re: self.re.clone(), im: Float::with_val(self.prec(), -&self.im) }
    }

    /// Unit-modulus phase `z / |z|`; `1` for zero.
    pub fn phase(&self) -> Self {
        let bits = self.prec();
        if self.is_zero() {
            return Self::one(bits);
        }
        let m = self.abs();
        Self { re: Float::with_val(bits, &self.re / &m), im: Float::with_val(bits, &self.im / &m) }
    }

    /// `self += a * b`
    #[inline]
    pub fn mul_add_assign(&mut self, a: &Self, b: &Self) {
        let a_real = a.im.is_zero();
        let b_real = b.im.is_zero();
        if a_real && b_real {
            self.re += &a.re * &b.re;
        } else if a_real {
            self.re += &a.re * &b.re;
            self.im += &a.re * &b.im;
        } else if b_real {
            self.re += &a.re * &b.re;
            self.im += &a.im * &b.re;
        } else {
            self.re += &a.re * &b.re;
            self.re -= &a.im * &b.im;
            self.im += &a.re * &b.im;
            self.im += &a.im * &b.re;
        }
    }

    /// `self -= a * b`
    #[inline]
    pub fn mul_sub_assign(&mut self, a: &Self, b: &Self) {
        let a_real = a.im.is_zero();
        let b_real = b.im.is_zero();
        if a_real && b_real {
            self.re -= &a.re * &b.re;
        } else if a_real {
            self.re -= &a.re * &b.re;
            self.im -= &a.re * &b.im;
        } else if b_real {
            self.re -= &a.re * &b.re;
            self.im -= &a.im * &b.re;
        } else {
            self.re -= &a.re * &b.re;
            self.re += &a.im * &b.im;
            self.im -= &a.re * &b.im;
            self.im -= &a.im * &b.re;
        }
    }

    /// `self += conj(a) * b`
    #[inline]
    pub fn conj_mul_add_assign(&mut self, a: &Self, b: &Self) {
        self.re += &a.re * &b.re;
        self.re += &a.im * &b.im;
        self.im += &a.re * &b.im;
        self.im -= &a.im * &b.re;
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn sub_assign_ref(&mut self, other: &Self) {
        self.re -= &other.re;
        self.im -= &other.im;
    }

    pub fn scale_assign(&mut self, s: &Float) {
        self.re *= s;
        self.im *= s;
    }

    pub fn mul_assign_ref(&mut self, other: &Self) {
        let product = &*self * other;
        *self = product;
    }

    pub fn scaled(&self, s: &Float) -> Self {
        let mut out = self.clone();
        out.scale_assign(s);
        out
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    /// Rounds into another precision.
    pub fn with_prec(&self, bits: u32) -> Self {
        Self { re: Float::with_val(bits, &self.re), im: Float::with_val(bits, &self.im) }
    }
}

impl fmt::Debug for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({:e} {:+e}i)", self.re.to_f64(), self.im.to_f64())
    }
}

impl fmt::Display for ComplexScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Add for &ComplexScalar {
    type Output = ComplexScalar;
    fn add(self, rhs: Self) -> ComplexScalar {
        let bits = self.prec();
        ComplexScalar {
            re: Float::with_val(bits, &self.re + &rhs.re),
            im: Float::with_val(bits, &self.im + &rhs.im),
        }
    }
}

impl Sub for &ComplexScalar {
    type Output = ComplexScalar;
    fn sub(self, rhs: Self) -> ComplexScalar {
        let bits = self.prec();
        ComplexScalar {
            re: Float::with_val(bits, &self.re - &rhs.re),
            im: Float::with_val(bits, &self.im - &rhs.im),
        }
    }
}

impl Mul for &ComplexScalar {
    type Output = ComplexScalar;
    fn mul(self, rhs: Self) -> ComplexScalar {
        let mut out = ComplexScalar::zero(self.prec());
        out.mul_add_assign(self, rhs);
        out
    }
}

impl Div for &ComplexScalar {
    type Output = ComplexScalar;
    fn div(self, rhs: Self) -> ComplexScalar {
        let bits = self.prec();
        let denom = rhs.norm_sqr();
        let mut out = ComplexScalar::zero(bits);
        out.conj_mul_add_assign(rhs, self);
        out.re /= &denom;
        out.im /= &denom;
        out
    }
}

impl Neg for &ComplexScalar {
    type Output = ComplexScalar;
    fn neg(self) -> ComplexScalar {
        let bits = self.prec();
        ComplexScalar { re: Float::with_val(bits, -&self.re), im: Float::with_val(bits, -&self.im) }
    }
}

/// Complex square root, principal branch.
pub fn csqrt(z: &ComplexScalar) -> ComplexScalar {
    let bits = z.prec();
    if z.is_zero() {
        return ComplexScalar::zero(bits);
    }
    let m = z.abs();
    // sqrt((|z| + |re|)/2) is cancellation-free
    let mut t = Float::with_val(bits, z.re.abs_ref());
    t += &m;
    t /= 2u32;
    t.sqrt_mut();
    let half_im_over_t = {
        let mut q = Float::with_val(bits, &z.im / &t);
        q /= 2u32;
        q
    };
    if z.re.is_sign_positive() {
        ComplexScalar { re: t, im: half_im_over_t }
    } else {
        let re = half_im_over_t.abs();
        let im = if z.im.is_sign_negative() { -t } else { t };
        ComplexScalar { re, im }
    }
}

/// Complex exponential.
pub fn cexp(z: &ComplexScalar) -> ComplexScalar {
    let bits = z.prec();
    let m = Float::with_val(bits, z.re.exp_ref());
    ComplexScalar::from_polar(&m, &z.im)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_roundtrip() {
        let a = ComplexScalar::from_f64(1.5, -2.0, 100);
        let b = ComplexScalar::from_f64(0.25, 3.0, 100);
        let q = &(&a * &b) / &b;
        assert!((&q - &a).abs() < 1e-28);
        let s = csqrt(&a);
        assert!((&(&s * &s) - &a).abs() < 1e-28);
    }

    #[test]
    fn csqrt_negative_real_axis() {
        let z = ComplexScalar::from_f64(-4.0, 0.0, 64);
        let s = csqrt(&z);
        assert_eq!(s.to_f64_pair(), (0.0, 2.0));
    }

    #[test]
    fn cexp_i_pi() {
        let bits = 200;
        let pi = Float::with_val(bits, rug::float::Constant::Pi);
        let z = ComplexScalar::new(Float::new(bits), pi);
        let e = cexp(&z);
        assert!((&e - &ComplexScalar::from_f64(-1.0, 0.0, bits)).abs() < 1e-55);
    }
}
