//! Pseudospectra: resolvent-norm grids and perturbed-eigenvalue clouds.

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{eigenvalues, largest_singular_value, smallest_singular_value};
use crate::mp::random::{derive_seed, ginibre, seeded_rng, unit_uniform};
use crate::mp::{ComplexMatrix, ComplexScalar, Precision};
use crate::table::{fmt_float, Table};

/// Stored in place of `log10 0` at exact eigenvalues.
pub const LOG10_ZERO_SENTINEL: f64 = -1e6;

/// Rectangular grid over the complex plane; `nx` points along the real axis,
/// `ny` along the imaginary axis, both ends included.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub nx: usize,
    pub ny: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { re_min: -2.5, re_max: 2.5, im_min: -1.5, im_max: 1.5, nx: 201, ny: 201 }
    }
}

fn axis(lo: f64, hi: f64, n: usize, i: usize) -> f64 {
    if n == 1 {
        lo
    } else {
        lo + (hi - lo) * i as f64 / (n - 1) as f64
    }
}

impl GridSpec {
    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|x| x.is_finite());
        if !finite || !(self.re_min < self.re_max) || !(self.im_min < self.im_max) {
            return Err(Error::InvalidArgument("grid bounds must be finite with min < max".into()));
        }
        if self.nx == 0 || self.ny == 0 {
            return Err(Error::InvalidArgument("grid needs at least one point per axis".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.nx * self.ny
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid point `(re, im)` as doubles; row `iy`, column `ix`.
    pub fn point(&self, ix: usize, iy: usize) -> (f64, f64) {
        (axis(self.re_min, self.re_max, self.nx, ix), axis(self.im_min, self.im_max, self.ny, iy))
    }

    pub fn point_mp(&self, ix: usize, iy: usize, ctx: Precision) -> ComplexScalar {
        let (re, im) = self.point(ix, iy);
        ComplexScalar::new(ctx.real(re), ctx.real(im))
    }
}

#[derive(Debug, Clone)]
pub struct PseudospectrumGrid {
    pub grid: GridSpec,
    /// Row-major, `ny` rows of `nx` values.
    pub log10_smin: Vec<Float>,
    /// Computed eigenvalues of the matrix.
    pub spectrum: Vec<ComplexScalar>,
}

impl PseudospectrumGrid {
    pub fn value(&self, ix: usize, iy: usize) -> &Float {
        &self.log10_smin[iy * self.grid.nx + ix]
    }

    /// `smin` at a grid point, zero at the sentinel.
    pub fn smin(&self, ix: usize, iy: usize) -> Float {
        let v = self.value(ix, iy);
        if *v <= LOG10_ZERO_SENTINEL {
            return Float::new(v.prec());
        }
        let ten = Float::with_val(v.prec(), 10);
        Float::with_val(v.prec(), rug::ops::Pow::pow(&ten, v))
    }

    /// Grid points inside the `eps`-pseudospectrum.
    pub fn level_set(&self, eps: f64) -> Vec<bool> {
        let l = eps.log10();
        self.log10_smin.iter().map(|v| v.to_f64() < l).collect()
    }

    pub fn to_table(&self, ctx: Precision) -> Table {
        let mut t = Table::new(["re", "im", "log10_smin"]);
        for iy in 0..self.grid.ny {
            for ix in 0..self.grid.nx {
                let z = self.grid.point_mp(ix, iy, ctx);
                t.push(vec![fmt_float(&z.re, ctx), fmt_float(&z.im, ctx), fmt_float(self.value(ix, iy), ctx)]);
            }
        }
        t
    }
}

/// `log10 smin(zI - H)` on every grid point; points run in parallel and are
/// stored in row-major order.
pub fn resolvent_norm_grid(h: &ComplexMatrix, grid: &GridSpec, ctx: Precision) -> Result<PseudospectrumGrid> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("resolvent grid needs a square matrix".into()));
    }
    grid.validate()?;
    let h = if h.bits() == ctx.bits() { h.clone() } else { h.with_ctx(ctx) };
    let spectrum = eigenvalues(&h)?;
    let log10_smin = (0..grid.len())
        .into_par_iter()
        .map(|idx| {
            let z = grid.point_mp(idx % grid.nx, idx / grid.nx, ctx);
            let a = h.shift_diagonal(&z).scale_real(&ctx.int(-1));
            let s = smallest_singular_value(&a);
            if s.is_zero() {
                ctx.real(LOG10_ZERO_SENTINEL)
            } else {
                s.log10()
            }
        })
        .collect();
    Ok(PseudospectrumGrid { grid: *grid, log10_smin, spectrum })
}

/// Distance from `z` to the nearest point of `spectrum`.
pub fn spectral_distance(z: &ComplexScalar, spectrum: &[ComplexScalar]) -> Float {
    spectrum.iter().map(|l| (z - l).abs()).min_by(|a, b| a.partial_cmp(b).unwrap()).expect("non-empty spectrum")
}

/// Result of checking `dist/cond - tol <= smin <= dist + tol` on a grid.
#[derive(Debug, Clone)]
pub struct SandwichReport {
    pub points: usize,
    /// `(ix, iy)` of every point outside the bounds.
    pub violations: Vec<(usize, usize)>,
    /// Smallest `smin / (dist/cond)` over the grid (1 or more means the lower
    /// bound holds with room).
    pub lower_margin: f64,
    /// Largest `smin / dist`.
    pub upper_ratio: f64,
}

impl SandwichReport {
    pub fn holds(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the resolvent sandwich against `exact` eigenvalues and the
/// closed-form eigenvector condition number, with additive slack
/// `10^-(P-6)`. All comparisons run at working precision.
pub fn check_sandwich(
    grid: &PseudospectrumGrid,
    exact: &[ComplexScalar],
    cond: &Float,
    ctx: Precision,
) -> SandwichReport {
    let tol = ctx.tol(6);
    let mut violations = Vec::new();
    let mut lower_margin = f64::INFINITY;
    let mut upper_ratio = 0.0f64;
    for iy in 0..grid.grid.ny {
        for ix in 0..grid.grid.nx {
            let z = grid.grid.point_mp(ix, iy, ctx);
            let dist = spectral_distance(&z, exact);
            let smin = grid.smin(ix, iy);
            let lower = Float::with_val(ctx.bits(), &dist / cond);
            let ok_lo = Float::with_val(ctx.bits(), &lower - &tol) <= smin;
            let ok_hi = smin <= Float::with_val(ctx.bits(), &dist + &tol);
            if !(ok_lo && ok_hi) {
                violations.push((ix, iy));
            }
            if !lower.is_zero() {
                lower_margin = lower_margin.min(Float::with_val(ctx.bits(), &smin / &lower).to_f64());
            }
            if !dist.is_zero() {
                upper_ratio = upper_ratio.max(Float::with_val(ctx.bits(), &smin / &dist).to_f64());
            }
        }
    }
    SandwichReport { points: grid.grid.len(), violations, lower_margin, upper_ratio }
}

/// Eigenvalues of `H + Delta` for random perturbations.
#[derive(Debug, Clone)]
pub struct EigenCloud {
    pub seed: u64,
    pub epsilon: f64,
    /// `||Delta||_2` per sample (uniform in `(0, epsilon)`).
    pub norms: Vec<Float>,
    /// All eigenvalues of each perturbed matrix, sorted.
    pub samples: Vec<Vec<ComplexScalar>>,
}

impl EigenCloud {
    pub fn points(&self) -> impl Iterator<Item = &ComplexScalar> {
        self.samples.iter().flatten()
    }

    pub fn to_table(&self, ctx: Precision) -> Table {
        let mut t = Table::new(["sample", "re", "im"]);
        for (s, vals) in self.samples.iter().enumerate() {
            for z in vals {
                t.push(vec![s.to_string(), fmt_float(&z.re, ctx), fmt_float(&z.im, ctx)]);
            }
        }
        t
    }
}

/// Draws a complex Ginibre matrix per sample, rescales it so its largest
/// singular value is `epsilon * u` with `u` uniform in `(0, 1)`, and
/// diagonalizes `H + Delta`. Sample `k` uses seed `derive_seed(seed, [k])`.
pub fn perturbed_eigencloud(
    h: &ComplexMatrix,
    epsilon: f64,
    n_samples: usize,
    seed: u64,
    ctx: Precision,
) -> Result<EigenCloud> {
    if !h.is_square() {
        return Err(Error::DimensionMismatch("eigencloud needs a square matrix".into()));
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(Error::InvalidArgument("epsilon must be positive".into()));
    }
    let h = if h.bits() == ctx.bits() { h.clone() } else { h.with_ctx(ctx) };
    let n = h.rows();
    let eps = ctx.param(epsilon);
    let results: Vec<Result<(Float, Vec<ComplexScalar>)>> = (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let mut rng = seeded_rng(derive_seed(seed, &[k as u64]));
            let g = ginibre(n, n, ctx, &mut rng);
            let mut u = 0.0;
            while u == 0.0 {
                u = unit_uniform(&mut rng);
            }
            let mut norm = Float::with_val(ctx.bits(), &eps * &ctx.real(u));
            let gmax = largest_singular_value(&g);
            let delta = g.scale_real(&Float::with_val(ctx.bits(), &norm / &gmax));
            // report the norm actually realised
            norm = largest_singular_value(&delta);
            let vals = eigenvalues(&h.add(&delta)).map_err(|e| match e {
                Error::NoConvergence { mode, iterations, context } => {
                    Error::NoConvergence { mode, iterations, context: format!("sample {k}: {context}") }
                }
                other => other,
            })?;
            Ok((norm, vals))
        })
        .collect();
    let mut norms = Vec::with_capacity(n_samples);
    let mut samples = Vec::with_capacity(n_samples);
    for r in results {
        let (nm, vals) = r?;
        norms.push(nm);
        samples.push(vals);
    }
    Ok(EigenCloud { seed, epsilon, norms, samples })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_points_hit_both_ends() {
        let g = GridSpec { re_min: -1.0, re_max: 1.0, im_min: 0.0, im_max: 2.0, nx: 3, ny: 5 };
        assert_eq!(g.point(0, 0), (-1.0, 0.0));
        assert_eq!(g.point(2, 4), (1.0, 2.0));
        assert_eq!(g.point(1, 2), (0.0, 1.0));
        assert!(GridSpec { nx: 0, ..g }.validate().is_err());
        assert!(GridSpec { re_max: -2.0, ..g }.validate().is_err());
    }

    #[test]
    fn diagonal_matrix_smin_is_distance() {
        let ctx = Precision::new(30).unwrap();
        let h = ComplexMatrix::from_f64(2, 2, ctx, &[0., 0., 0., 1.], &[]);
        let g = GridSpec { re_min: 0.0, re_max: 1.0, im_min: -0.5, im_max: 0.5, nx: 3, ny: 3 };
        let p = resolvent_norm_grid(&h, &g, ctx).unwrap();
        assert!((p.value(1, 1).to_f64() - 0.5f64.log10()).abs() < 1e-12);
        assert_eq!(p.value(0, 1).to_f64(), LOG10_ZERO_SENTINEL);
        assert_eq!(p.to_table(ctx).rows.len(), 9);
    }

    #[test]
    fn cloud_is_reproducible_and_bounded() {
        let ctx = Precision::new(25).unwrap();
        let h = ComplexMatrix::from_f64(3, 3, ctx, &[1., 0., 0., 0., 2., 0., 0., 0., 3.], &[]);
        let a = perturbed_eigencloud(&h, 1e-3, 4, 9, ctx).unwrap();
        let b = perturbed_eigencloud(&h, 1e-3, 4, 9, ctx).unwrap();
        assert_eq!(a.samples, b.samples);
        for n in &a.norms {
            assert!(n.to_f64() < 1e-3 && n.to_f64() > 0.0);
        }
        // normal matrix: eigenvalues move by at most the perturbation norm
        let exact: Vec<_> = (1..=3).map(|k| ComplexScalar::from_f64(k as f64, 0.0, ctx.bits())).collect();
        for (vals, n) in a.samples.iter().zip(&a.norms) {
            for z in vals {
                assert!(spectral_distance(z, &exact) <= *n);
            }
        }
    }
}
