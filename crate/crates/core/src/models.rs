//! Lattice model builders and their closed-form references.

use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::fix_phase;
use crate::mp::random::{seeded_rng, unit_uniform};
use crate::mp::scalar::csqrt;
use crate::mp::{normalize, ComplexMatrix, ComplexScalar, Precision};

/// Working precision for closed-form scalars that are returned as doubles.
const REFERENCE_BITS: u32 = 256;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    #[default]
    Obc,
    Pbc,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "lowercase")]
pub enum Variant {
    Hn {
        #[serde(rename = "J")]
        j: f64,
        gamma: f64,
        #[serde(rename = "L")]
        l: usize,
    },
    Shn {
        #[serde(rename = "J")]
        j: f64,
        gamma: f64,
        delta: f64,
        #[serde(rename = "L")]
        l: usize,
    },
    Disordered {
        #[serde(rename = "J")]
        j: f64,
        gamma: f64,
        #[serde(rename = "W")]
        w: f64,
        #[serde(rename = "L")]
        l: usize,
        seed: u64,
    },
}

/// A single-particle lattice model. JSON form:
/// `{"model": "hn", "J": 1.0, "gamma": 0.8, "L": 20, "bc": "obc"}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    #[serde(flatten)]
    pub variant: Variant,
    #[serde(default)]
    pub bc: Boundary,
}

impl ModelSpec {
    pub fn hn(j: f64, gamma: f64, l: usize, bc: Boundary) -> Self {
        ModelSpec { variant: Variant::Hn { j, gamma, l }, bc }
    }

    pub fn shn(j: f64, gamma: f64, delta: f64, l: usize, bc: Boundary) -> Self {
        ModelSpec { variant: Variant::Shn { j, gamma, delta, l }, bc }
    }

    pub fn disordered(j: f64, gamma: f64, w: f64, l: usize, seed: u64, bc: Boundary) -> Self {
        ModelSpec { variant: Variant::Disordered { j, gamma, w, l, seed }, bc }
    }

    /// Number of lattice sites (per chain).
    pub fn sites(&self) -> usize {
        match self.variant {
            Variant::Hn { l, .. } | Variant::Shn { l, .. } | Variant::Disordered { l, .. } => l,
        }
    }

    /// Single-particle dimension (`2L` for the two-chain model).
    pub fn dim(&self) -> usize {
        match self.variant {
            Variant::Shn { l, .. } => 2 * l,
            _ => self.sites(),
        }
    }

    pub fn is_two_chain(&self) -> bool {
        matches!(self.variant, Variant::Shn { .. })
    }

    pub fn hopping(&self) -> f64 {
        match self.variant {
            Variant::Hn { j, .. } | Variant::Shn { j, .. } | Variant::Disordered { j, .. } => j,
        }
    }

    pub fn gamma(&self) -> f64 {
        match self.variant {
            Variant::Hn { gamma, .. } | Variant::Shn { gamma, .. } | Variant::Disordered { gamma, .. } => gamma,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.sites() < 2 {
            return Err(Error::InvalidModel(format!("need at least 2 sites, got L={}", self.sites())));
        }
        let finite = match self.variant {
            Variant::Hn { j, gamma, .. } => j.is_finite() && gamma.is_finite(),
            Variant::Shn { j, gamma, delta, .. } => j.is_finite() && gamma.is_finite() && delta.is_finite(),
            Variant::Disordered { j, gamma, w, .. } => j.is_finite() && gamma.is_finite() && w.is_finite() && w >= 0.0,
        };
        if !finite {
            return Err(Error::InvalidModel("parameters must be finite (and W >= 0)".into()));
        }
        Ok(())
    }

    /// Copy with a different number of sites.
    pub fn with_sites(&self, sites: usize) -> Self {
        let mut out = self.clone();
        match &mut out.variant {
            Variant::Hn { l, .. } | Variant::Shn { l, .. } | Variant::Disordered { l, .. } => *l = sites,
        }
        out
    }
}

/// On-site energies `W (2u - 1)` from the seeded generator.
pub fn disorder_potential(w: f64, l: usize, seed: u64, ctx: Precision) -> Vec<Float> {
    let mut rng = seeded_rng(seed);
    let wp = ctx.param(w);
    (0..l)
        .map(|_| {
            let u = unit_uniform(&mut rng);
            let mut x = Float::with_val(ctx.bits(), u);
            x *= 2u32;
            x -= 1u32;
            x * &wp
        })
        .collect()
}

/// Dense single-particle Hamiltonian. Hopping `j -> j+1` (subdiagonal) has
/// amplitude `J + gamma`, hopping `j+1 -> j` has `J - gamma`; the two-chain
/// model uses 2x2 blocks `T_R = J + gamma sz - i delta sx` (below the block
/// diagonal) and `T_L = J - gamma sz + i delta sx` (above).
pub fn build(spec: &ModelSpec, ctx: Precision) -> Result<ComplexMatrix> {
    spec.validate()?;
    let bits = ctx.bits();
    let l = spec.sites();
    let pbc = spec.bc == Boundary::Pbc;
    match spec.variant {
        Variant::Hn { j, gamma, .. } | Variant::Disordered { j, gamma, .. } => {
            let jp = ctx.param(j);
            let g = ctx.param(gamma);
            let right = ComplexScalar::from_real(Float::with_val(bits, &jp + &g));
            let left = ComplexScalar::from_real(Float::with_val(bits, &jp - &g));
            let mut h = ComplexMatrix::zeros(l, l, ctx);
            for s in 0..l - 1 {
                h[(s + 1, s)] = right.clone();
                h[(s, s + 1)] = left.clone();
            }
            if pbc {
                if l == 2 {
                    h[(0, 1)].add_assign_ref(&right);
                    h[(1, 0)].add_assign_ref(&left);
                } else {
                    h[(0, l - 1)] = right;
                    h[(l - 1, 0)] = left;
                }
            }
            if let Variant::Disordered { w, seed, .. } = spec.variant {
                if w != 0.0 {
                    for (s, omega) in disorder_potential(w, l, seed, ctx).into_iter().enumerate() {
                        h[(s, s)] = ComplexScalar::from_real(omega);
                    }
                }
            }
            Ok(h)
        }
        Variant::Shn { j, gamma, delta, .. } => {
            let (tr, tl) = shn_blocks(ctx.param(j), ctx.param(gamma), ctx.param(delta));
            let mut h = ComplexMatrix::zeros(2 * l, 2 * l, ctx);
            let put = |h: &mut ComplexMatrix, bi: usize, bj: usize, t: &[[ComplexScalar; 2]; 2]| {
                for a in 0..2 {
                    for b in 0..2 {
                        h[(2 * bi + a, 2 * bj + b)].add_assign_ref(&t[a][b]);
                    }
                }
            };
            for s in 0..l - 1 {
                put(&mut h, s + 1, s, &tr);
                put(&mut h, s, s + 1, &tl);
            }
            if pbc {
                put(&mut h, 0, l - 1, &tr);
                put(&mut h, l - 1, 0, &tl);
            }
            Ok(h)
        }
    }
}

type Block = [[ComplexScalar; 2]; 2];

fn shn_blocks(j: Float, gamma: Float, delta: Float) -> (Block, Block) {
    let bits = j.prec();
    let re = |x: Float| ComplexScalar::from_real(x);
    let im = |x: Float| ComplexScalar::new(Float::new(bits), x);
    let tr = [
        [re(Float::with_val(bits, &j + &gamma)), im(Float::with_val(bits, -&delta))],
        [im(Float::with_val(bits, -&delta)), re(Float::with_val(bits, &j - &gamma))],
    ];
    let tl = [
        [re(Float::with_val(bits, &j - &gamma)), im(delta.clone())],
        [im(delta), re(Float::with_val(bits, &j + &gamma))],
    ];
    (tr, tl)
}

fn theta(m: usize, l: usize, ctx: Precision) -> Float {
    let mut t = ctx.pi();
    t *= m as u32;
    t /= (l + 1) as u32;
    t
}

/// `2 sqrt(x)` as a complex number (imaginary when `x < 0`).
fn two_sqrt(x: Float) -> ComplexScalar {
    let mut s = csqrt(&ComplexScalar::from_real(x));
    s.scale_assign(&Float::with_val(s.prec(), 2));
    s
}

/// Closed-form eigenvalues, in the order `m = 1..L` (each value twice for the
/// two-chain model under open boundaries). Periodic chains use
/// `k_m = 2 pi m / L`.
pub fn exact_spectrum(spec: &ModelSpec, ctx: Precision) -> Result<Vec<ComplexScalar>> {
    spec.validate()?;
    let bits = ctx.bits();
    let l = spec.sites();
    match (spec.variant.clone(), spec.bc) {
        (Variant::Disordered { .. }, _) => Err(Error::NoClosedForm("disordered chain has no closed-form spectrum".into())),
        (Variant::Hn { j, gamma, .. }, Boundary::Obc) => {
            let (jp, g) = (ctx.param(j), ctx.param(gamma));
            let pref = two_sqrt(Float::with_val(bits, jp.square_ref()) - Float::with_val(bits, g.square_ref()));
            Ok((1..=l).map(|m| pref.scaled(&theta(m, l, ctx).cos())).collect())
        }
        (Variant::Hn { j, gamma, .. }, Boundary::Pbc) => {
            let (jp, g) = (ctx.param(j), ctx.param(gamma));
            Ok((1..=l)
                .map(|m| {
                    let mut k = ctx.pi();
                    k *= (2 * m) as u32;
                    k /= l as u32;
                    let (s, c) = k.sin_cos(Float::new(bits));
                    let mut re = Float::with_val(bits, &jp * &c);
                    re *= 2u32;
                    let mut im = Float::with_val(bits, &g * &s);
                    im *= -2i32;
                    ComplexScalar::new(re, im)
                })
                .collect())
        }
        (Variant::Shn { j, gamma, delta, .. }, Boundary::Obc) => {
            let (jp, g, d) = (ctx.param(j), ctx.param(gamma), ctx.param(delta));
            let mut x = Float::with_val(bits, jp.square_ref());
            x -= Float::with_val(bits, g.square_ref());
            x += Float::with_val(bits, d.square_ref());
            let pref = two_sqrt(x);
            let mut out = Vec::with_capacity(2 * l);
            for m in 1..=l {
                let e = pref.scaled(&theta(m, l, ctx).cos());
                out.push(e.clone());
                out.push(e);
            }
            Ok(out)
        }
        (Variant::Shn { j, gamma, delta, .. }, Boundary::Pbc) => {
            // E(k) = 2J cos k +- 2 sqrt(delta^2 - gamma^2) sin k
            let (jp, g, d) = (ctx.param(j), ctx.param(gamma), ctx.param(delta));
            let mut x = Float::with_val(bits, d.square_ref());
            x -= Float::with_val(bits, g.square_ref());
            let root = two_sqrt(x);
            let mut out = Vec::with_capacity(2 * l);
            for m in 1..=l {
                let mut k = ctx.pi();
                k *= (2 * m) as u32;
                k /= l as u32;
                let (s, c) = k.sin_cos(Float::new(bits));
                let mut base = Float::with_val(bits, &jp * &c);
                base *= 2u32;
                let base = ComplexScalar::from_real(base);
                let off = root.scaled(&s);
                out.push(&base + &off);
                out.push(&base - &off);
            }
            Ok(out)
        }
    }
}

/// `sqrt(J_+ / J_-)` with `J_pm = J pm sqrt(gamma^2 - delta^2)` and the
/// mixing coefficient `c' = -i delta / (gamma + sqrt(gamma^2 - delta^2))`.
fn shn_constants(j: &Float, gamma: &Float, delta: &Float) -> Result<(ComplexScalar, ComplexScalar)> {
    let bits = j.prec();
    if gamma == delta {
        return Err(Error::ExceptionalBoundary);
    }
    let mut x = Float::with_val(bits, gamma.square_ref());
    x -= Float::with_val(bits, delta.square_ref());
    let s = csqrt(&ComplexScalar::from_real(x));
    let jc = ComplexScalar::from_real(j.clone());
    let jp = &jc + &s;
    let jm = &jc - &s;
    let r = csqrt(&(&jp / &jm));
    let g = ComplexScalar::from_real(gamma.clone());
    let num = ComplexScalar::new(Float::new(bits), Float::with_val(bits, -delta));
    let c = &num / &(&g + &s);
    Ok((r, c))
}

/// Closed-form right eigenvectors for open chains, unit columns with the
/// same phase convention as [`crate::linalg::eig`]. Column order follows
/// [`exact_spectrum`]; for the two-chain model the right-localized member of
/// each degenerate pair comes first.
pub fn exact_wavefunctions(spec: &ModelSpec, ctx: Precision) -> Result<ComplexMatrix> {
    spec.validate()?;
    if spec.bc == Boundary::Pbc {
        return Err(Error::NoClosedForm("closed-form wavefunctions need open boundaries".into()));
    }
    let bits = ctx.bits();
    let l = spec.sites();
    match spec.variant {
        Variant::Disordered { .. } => Err(Error::NoClosedForm("disordered chain has no closed-form wavefunctions".into())),
        Variant::Hn { j, gamma, .. } => {
            let (jp, g) = (ctx.param(j), ctx.param(gamma));
            let ratio = &ComplexScalar::from_real(Float::with_val(bits, &jp + &g)) / &ComplexScalar::from_real(Float::with_val(bits, &jp - &g));
            let r = csqrt(&ratio);
            let mut out = ComplexMatrix::zeros(l, l, ctx);
            for m in 1..=l {
                let th = theta(m, l, ctx);
                let mut col = Vec::with_capacity(l);
                let mut rp = ComplexScalar::one(bits);
                for site in 1..=l {
                    rp.mul_assign_ref(&r);
                    let mut a = th.clone();
                    a *= site as u32;
                    col.push(rp.scaled(&a.sin()));
                }
                normalize(&mut col);
                fix_phase(&mut col);
                out.set_column(m - 1, &col);
            }
            Ok(out)
        }
        Variant::Shn { j, gamma, delta, .. } => {
            let (r, c) = shn_constants(&ctx.param(j), &ctx.param(gamma), &ctx.param(delta))?;
            let rinv = &ComplexScalar::one(bits) / &r;
            let mut out = ComplexMatrix::zeros(2 * l, 2 * l, ctx);
            for m in 1..=l {
                let th = theta(m, l, ctx);
                let mut first = Vec::with_capacity(2 * l);
                let mut second = Vec::with_capacity(2 * l);
                let mut rp = ComplexScalar::one(bits);
                let mut rm = ComplexScalar::one(bits);
                for site in 1..=l {
                    rp.mul_assign_ref(&r);
                    rm.mul_assign_ref(&rinv);
                    let mut a = th.clone();
                    a *= site as u32;
                    let s = a.sin();
                    let up = rp.scaled(&s);
                    let down = rm.scaled(&s);
                    first.push(up.clone());
                    first.push(&c * &up);
                    second.push(-&(&c * &down));
                    second.push(down);
                }
                for (k, mut col) in [(2 * m - 2, first), (2 * m - 1, second)] {
                    normalize(&mut col);
                    fix_phase(&mut col);
                    out.set_column(k, &col);
                }
            }
            Ok(out)
        }
    }
}

/// Localization length `xi = 1 / ln r` of the open single chain.
pub fn localization_length(spec: &ModelSpec) -> Result<f64> {
    match spec.variant {
        Variant::Hn { j, gamma, .. } => {
            let r = ((j + gamma) / (j - gamma)).abs().sqrt();
            Ok(1.0 / r.ln())
        }
        Variant::Shn { j, gamma, delta, .. } => {
            let ctx = Precision::from_digits(30, false)?;
            let (r, _) = shn_constants(&ctx.param(j), &ctx.param(gamma), &ctx.param(delta))?;
            Ok(1.0 / r.abs().to_f64().ln())
        }
        Variant::Disordered { .. } => Err(Error::NoClosedForm("disordered chain".into())),
    }
}

/// Closed-form condition number of the eigenvector matrix.
///
/// Open single chain: `r^(L-1)` with `r` or `1/r`, whichever exceeds 1; periodic single chain: 1. Two-chain model,
/// open: for `gamma > delta` the exact expression
/// `(R + sqrt(R^2 - 4a)) / (2 sqrt a)` with `R = r'^(2L) + r'^(-2L)` and
/// `a = 1 - (delta/gamma)^2` (see [`shn_condition_asymptote`] for `r'^(L-1)`),
/// for `gamma < delta` the size-independent `sqrt((delta+gamma)/(delta-gamma))`.
pub fn exact_condition_number(spec: &ModelSpec) -> Result<f64> {
    Ok(10f64.powf(exact_log10_condition_number(spec)?))
}

/// `log10` of [`exact_condition_number`], safe for very large values.
pub fn exact_log10_condition_number(spec: &ModelSpec) -> Result<f64> {
    spec.validate()?;
    let l = spec.sites();
    let prec = Precision::from_digits(70, false)?;
    let bits = REFERENCE_BITS.max(prec.bits());
    match (spec.variant.clone(), spec.bc) {
        (Variant::Disordered { .. }, _) => Err(Error::NoClosedForm("disordered chain has no closed-form condition number".into())),
        (Variant::Hn { .. }, Boundary::Pbc) => Ok(0.0),
        (Variant::Hn { j, gamma, .. }, Boundary::Obc) => {
            let r = ((j + gamma) / (j - gamma)).abs().sqrt();
            Ok((l as f64 - 1.0) * r.log10().abs())
        }
        (Variant::Shn { .. }, Boundary::Pbc) => Err(Error::NoClosedForm("periodic two-chain condition number".into())),
        (Variant::Shn { gamma, delta, .. }, Boundary::Obc) if gamma == delta => Err(Error::ExceptionalBoundary),
        (Variant::Shn { gamma, delta, .. }, Boundary::Obc) if gamma.abs() < delta.abs() => {
            let (g, d) = (prec.param(gamma), prec.param(delta));
            let ratio = Float::with_val(bits, &d + &g) / Float::with_val(bits, &d - &g);
            Ok(ratio.abs().sqrt().log10().to_f64().abs())
        }
        (Variant::Shn { j, gamma, delta, .. }, Boundary::Obc) => {
            let (jp, g, d) = (prec.param(j), prec.param(gamma), prec.param(delta));
            let (r, _) = shn_constants(&jp, &g, &d)?;
            let r = r.abs();
            // R = r^(2L) + r^(-2L)
            let x = Float::with_val(bits, rug::ops::Pow::pow(&r, (2 * l) as u32));
            let mut rr = Float::with_val(bits, x.recip_ref());
            rr += &x;
            let ratio = Float::with_val(bits, &d / &g);
            let mut a = Float::with_val(bits, ratio.square_ref());
            a = 1u32 - a;
            let disc = Float::with_val(bits, rr.square_ref()) - Float::with_val(bits, &a * 4u32);
            let num = Float::with_val(bits, &rr + disc.sqrt());
            let den = Float::with_val(bits, a.sqrt() * 2u32);
            Ok((num / den).log10().to_f64())
        }
    }
}

/// `r'^(L-1)` for the open two-chain model in the skin regime.
pub fn shn_condition_asymptote(spec: &ModelSpec) -> Result<f64> {
    match spec.variant {
        Variant::Shn { j, gamma, delta, l } => {
            let ctx = Precision::from_digits(30, false)?;
            let (r, _) = shn_constants(&ctx.param(j), &ctx.param(gamma), &ctx.param(delta))?;
            Ok(r.abs().to_f64().powi(l as i32 - 1))
        }
        _ => Err(Error::InvalidModel("asymptote defined for the two-chain model only".into())),
    }
}

/// Least-squares slope of `ln |psi_j|` against `j`, skipping exact zeros.
///
/// For the open chain `|sin(j theta_m)|` is mirror symmetric about the chain
/// centre, so it drops out of the fit and the slope is `ln r = 1/xi`.
pub fn envelope_slope(psi: &[ComplexScalar]) -> f64 {
    let pts: Vec<(f64, f64)> = psi
        .iter()
        .enumerate()
        .filter(|(_, z)| !z.is_zero())
        .map(|(j, z)| (j as f64, z.abs().ln().to_f64()))
        .collect();
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return 0.0;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

/// Longest run of consecutive sites with `lo <= |psi_j| <= hi`.
pub fn longest_run_between(psi: &[ComplexScalar], lo: f64, hi: f64) -> usize {
    let mut best = 0;
    let mut run = 0;
    for z in psi {
        let a = z.abs().to_f64();
        if a >= lo && a <= hi {
            run += 1;
            best = best.max(run);
        } else {
            run = 0;
        }
    }
    best
}

/// Bundle of every closed form available for a model.
#[derive(Debug, Clone)]
pub struct AnalyticalReference {
    pub spectrum: Vec<ComplexScalar>,
    pub wavefunctions: Option<ComplexMatrix>,
    pub localization_length: Option<f64>,
    pub condition_number: Option<f64>,
}

pub fn analytical_reference(spec: &ModelSpec, ctx: Precision) -> Result<AnalyticalReference> {
    let spectrum = exact_spectrum(spec, ctx)?;
    Ok(AnalyticalReference {
        spectrum,
        wavefunctions: exact_wavefunctions(spec, ctx).ok(),
        localization_length: if spec.bc == Boundary::Obc { localization_length(spec).ok() } else { None },
        condition_number: exact_condition_number(spec).ok(),
    })
}
