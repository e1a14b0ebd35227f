//! Plain CSV tables with precision-aware number formatting.

use std::fmt::Write as _;

use rug::Float;

use crate::mp::{ComplexScalar, Precision};

/// Significant digits written for a value computed at `ctx`.
pub fn csv_digits(ctx: Precision) -> usize {
    ctx.digits() as usize + 2
}

/// Scientific notation with `digits + 2` significant digits.
pub fn fmt_float(x: &Float, ctx: Precision) -> String {
    if x.is_zero() {
        return "0".into();
    }
    format!("{:.*e}", csv_digits(ctx), x)
}

/// A double widened exactly, then formatted like [`fmt_float`].
pub fn fmt_f64(x: f64, ctx: Precision) -> String {
    fmt_float(&ctx.real(x), ctx)
}

pub fn fmt_complex(z: &ComplexScalar, ctx: Precision) -> [String; 2] {
    [fmt_float(&z.re, ctx), fmt_float(&z.im, ctx)]
}

/// Header plus rows of preformatted cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&self.header.join(","));
        out.push('\n');
        for r in &self.rows {
            let _ = writeln!(out, "{}", r.join(","));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digits_plus_two() {
        let ctx = Precision::new(20).unwrap();
        let third = Float::with_val(ctx.bits(), 1) / 3u32;
        let s = fmt_float(&third, ctx);
        let mantissa = s.split('e').next().unwrap().replace(['.', '-'], "");
        assert_eq!(mantissa.len(), 22);
        assert_eq!(fmt_float(&ctx.zero(), ctx), "0");
        let back = Float::with_val(ctx.bits(), Float::parse(&s).unwrap());
        assert!((back - third).abs() < 1e-21);
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(["a", "b"]);
        t.push(vec!["1".into(), "2".into()]);
        assert_eq!(t.to_csv(), "a,b\n1,2\n");
    }
}
