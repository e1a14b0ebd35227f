use std::fmt;

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Working precision: decimal significant digits and the derived binary
/// significand width. Every value built from a context rounds to nearest at
/// `bits`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Precision {
    digits: u32,
    bits: u32,
}

impl Precision {
    /// `bits = max(53, ceil(digits * log2 10))`.
    pub fn new(digits: u32) -> Result<Self> {
        if digits == 0 {
            return Err(Error::InvalidPrecision);
        }
        let bits = ((digits as f64) * LOG2_10).ceil() as u32;
        Ok(Self { digits, bits: bits.max(53) })
    }

    /// The double-equivalent context: 16 digits on a 53-bit significand.
    pub fn double() -> Self {
        Self { digits: 16, bits: 53 }
    }

    /// `new(digits)`, except that 16 digits maps onto the 53-bit
    /// double-equivalent context when `double_emulation` is set.
    pub fn from_digits(digits: u32, double_emulation: bool) -> Result<Self> {
        if double_emulation && digits == 16 {
            Ok(Self::double())
        } else {
            Self::new(digits)
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn is_double_equivalent(&self) -> bool {
        self.bits == 53
    }

    /// Zero at this precision.
    pub fn zero(&self) -> Float {
        Float::new(self.bits)
    }

    /// Exact conversion of a binary double.
    pub fn real(&self, x: f64) -> Float {
        Float::with_val(self.bits, x)
    }

    /// Converts a user-facing parameter through its shortest decimal
    /// representation, so `0.8` means 8/10 to the full working precision
    /// rather than the nearest double.
    pub fn param(&self, x: f64) -> Float {
        if !x.is_finite() {
            return self.real(x);
        }
        let text = format!("{x:e}");
        match Float::parse(&text) {
            Ok(parsed) => Float::with_val(self.bits, parsed),
            Err(_) => self.real(x),
        }
    }

    pub fn int(&self, n: i64) -> Float {
        Float::with_val(self.bits, n)
    }

    /// `10^exp` rounded to this precision.
    pub fn pow10(&self, exp: i32) -> Float {
        let ten = Float::with_val(self.bits, 10);
        Float::with_val(self.bits, rug::ops::Pow::pow(&ten, exp))
    }

    /// Relative tolerance `10^-(digits - slack)`.
    pub fn tol(&self, slack: i32) -> Float {
        self.pow10(-(self.digits as i32 - slack))
    }

    /// Unit roundoff `2^(1 - bits)`.
    pub fn epsilon(&self) -> Float {
        let mut u = Float::with_val(self.bits, 1);
        u >>= self.bits - 1;
        u
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, rug::float::Constant::Pi)
    }
}

impl fmt::Display for Precision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P={} ({} bits)", self.digits, self.bits)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bit_widths() {
        assert_eq!(Precision::new(16).unwrap().bits(), 54);
        assert_eq!(Precision::new(50).unwrap().bits(), 167);
        assert_eq!(Precision::new(30).unwrap().bits(), 100);
        assert_eq!(Precision::new(5).unwrap().bits(), 53);
        assert_eq!(Precision::double().bits(), 53);
        assert_eq!(Precision::from_digits(16, true).unwrap(), Precision::double());
        assert_eq!(Precision::from_digits(16, false).unwrap().bits(), 54);
    }

    #[test]
    fn rejects_zero_digits() {
        assert_eq!(Precision::new(0), Err(Error::InvalidPrecision));
    }

    #[test]
    fn decimal_parameters_are_exact_to_working_precision() {
        let ctx = Precision::new(50).unwrap();
        let g = ctx.param(0.8);
        let diff = Float::with_val(ctx.bits(), &g * 10u32) - 8u32;
        assert!(diff.abs() < ctx.tol(1));
        // the nearest double to 0.8 is off by ~4e-17
        let d = Float::with_val(ctx.bits(), ctx.real(0.8) * 10u32) - 8u32;
        assert!(d.abs() > ctx.pow10(-18));
    }

    #[test]
    fn epsilon_matches_double() {
        assert_eq!(Precision::double().epsilon().to_f64(), f64::EPSILON);
    }
}
