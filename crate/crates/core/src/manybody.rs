//! Fixed-particle-number exact diagonalization of the interacting chain and
//! condition-number sweeps of the disordered chain.

use rayon::prelude::*;
use rug::Float;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gaussdyn::propagator_norm_series;
use crate::linalg::{eig, log10_condition_number};
use crate::models::{build, Boundary, ModelSpec};
use crate::mp::random::derive_seed;
use crate::mp::{ComplexMatrix, ComplexScalar, Precision};
use crate::table::Table;

/// Largest chain handled by [`fock_basis`].
pub const MAX_SITES: usize = 16;

/// Occupation patterns with `n` of `l` sites filled. Bit `j` is site `j+1`;
/// patterns ascend as integers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FockBasis {
    pub sites: usize,
    pub particles: usize,
    pub states: Vec<u32>,
}

impl FockBasis {
    pub fn dim(&self) -> usize {
        self.states.len()
    }

    pub fn index_of(&self, state: u32) -> Option<usize> {
        self.states.binary_search(&state).ok()
    }

    /// Pattern as a string, site `L` first.
    pub fn pattern(&self, k: usize) -> String {
        (0..self.sites).rev().map(|j| if self.states[k] >> j & 1 == 1 { '1' } else { '0' }).collect()
    }

    /// `sum_j j n_j` (1-based sites) of state `k`.
    pub fn position_sum(&self, k: usize) -> usize {
        (0..self.sites).filter(|&j| self.states[k] >> j & 1 == 1).map(|j| j + 1).sum()
    }
}

pub fn fock_basis(l: usize, n: usize) -> Result<FockBasis> {
    if l > MAX_SITES {
        return Err(Error::DimensionTooLarge { sites: l, max: MAX_SITES });
    }
    if n > l {
        return Err(Error::InvalidArgument(format!("{n} particles do not fit on {l} sites")));
    }
    let states = (0u32..1 << l).filter(|s| s.count_ones() as usize == n).collect();
    Ok(FockBasis { sites: l, particles: n, states })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManyBodySpec {
    #[serde(rename = "J")]
    pub j: f64,
    pub gamma: f64,
    pub u_int: f64,
    #[serde(rename = "L")]
    pub l: usize,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(default)]
    pub bc: Boundary,
}

impl ManyBodySpec {
    pub fn new(j: f64, gamma: f64, u_int: f64, l: usize, n: usize, bc: Boundary) -> Self {
        Self { j, gamma, u_int, l, n, bc }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n > self.l {
            return Err(Error::InvalidModel(format!("N = {} exceeds L = {}", self.n, self.l)));
        }
        if ![self.j, self.gamma, self.u_int].iter().all(|x| x.is_finite()) {
            return Err(Error::InvalidModel("parameters must be finite".into()));
        }
        self.single_particle().validate()
    }

    /// The hopping part as a one-body model.
    pub fn single_particle(&self) -> ModelSpec {
        ModelSpec::hn(self.j, self.gamma, self.l, self.bc)
    }
}

/// Sign of `c_a† c_b` acting on `state` (site `b` filled, `a` empty) with
/// the Jordan-Wigner string ordered by ascending site.
fn hop_sign(state: u32, a: usize, b: usize) -> bool {
    let below = |s: u32, k: usize| (s & ((1u32 << k) - 1)).count_ones();
    let after = state & !(1 << b);
    (below(state, b) + below(after, a)) % 2 == 1
}

/// Dense many-body Hamiltonian `sum h_ab c_a† c_b + U sum n_j n_{j+1}` in the
/// `N`-particle sector, with `h` the one-body matrix of
/// [`ManyBodySpec::single_particle`].
pub fn build_interacting(spec: &ManyBodySpec, ctx: Precision) -> Result<ComplexMatrix> {
    spec.validate()?;
    let basis = fock_basis(spec.l, spec.n)?;
    let h1 = build(&spec.single_particle(), ctx)?;
    let l = spec.l;
    let mut hops = Vec::new();
    for a in 0..l {
        for b in 0..l {
            if a != b && !h1[(a, b)].is_zero() {
                hops.push((a, b, h1[(a, b)].clone()));
            }
        }
    }
    let u = ctx.param(spec.u_int);
    let mut bonds: Vec<(usize, usize)> = (0..l - 1).map(|j| (j, j + 1)).collect();
    if spec.bc == Boundary::Pbc && l > 2 {
        bonds.push((l - 1, 0));
    }
    let dim = basis.dim();
    let mut h = ComplexMatrix::zeros(dim, dim, ctx);
    for (col, &s) in basis.states.iter().enumerate() {
        let pairs = bonds.iter().filter(|&&(x, y)| s >> x & 1 == 1 && s >> y & 1 == 1).count();
        if pairs > 0 && !u.is_zero() {
            h[(col, col)] = ComplexScalar::from_real(Float::with_val(ctx.bits(), &u * pairs as u32));
        }
        for (a, b, amp) in &hops {
            if s >> b & 1 == 1 && s >> a & 1 == 0 {
                let t = (s & !(1 << b)) | 1 << a;
                let row = basis.index_of(t).expect("hop stays in the sector");
                let v = if hop_sign(s, *a, *b) { -amp } else { amp.clone() };
                h[(row, col)].add_assign_ref(&v);
            }
        }
    }
    Ok(h)
}

/// `max - min` of `sum_j j n_j` over the sector, by enumeration.
pub fn position_sum_span(basis: &FockBasis) -> usize {
    let sums: Vec<usize> = (0..basis.dim()).map(|k| basis.position_sum(k)).collect();
    sums.iter().max().unwrap_or(&0) - sums.iter().min().unwrap_or(&0)
}

/// `N (L - N)`.
pub fn closed_form_span(l: usize, n: usize) -> usize {
    n * (l - n)
}

/// `log10 r^Delta` for the diagonal similarity `Q = diag(r^{sum j n_j})`
/// that makes the open chain Hermitian.
pub fn interacting_log10_condition(spec: &ManyBodySpec) -> Result<f64> {
    spec.validate()?;
    if spec.gamma.abs() >= spec.j.abs() {
        return Err(Error::NoClosedForm("needs |gamma| < J".into()));
    }
    let basis = fock_basis(spec.l, spec.n)?;
    let delta = position_sum_span(&basis);
    let r2 = (spec.j + spec.gamma) / (spec.j - spec.gamma);
    Ok(delta as f64 * 0.5 * r2.log10())
}

pub fn interacting_condition_closed_form(spec: &ManyBodySpec) -> Result<f64> {
    Ok(10f64.powf(interacting_log10_condition(spec)?))
}

/// Diagonal of `Q_int`: `r^{sum j n_j}` per basis state, computed exactly at
/// working precision.
pub fn similarity_weights(spec: &ManyBodySpec, ctx: Precision) -> Result<Vec<Float>> {
    let basis = fock_basis(spec.l, spec.n)?;
    let jp = ctx.param(spec.j);
    let g = ctx.param(spec.gamma);
    let r = Float::with_val(ctx.bits(), Float::with_val(ctx.bits(), &jp + &g) / Float::with_val(ctx.bits(), &jp - &g))
        .sqrt();
    Ok((0..basis.dim()).map(|k| Float::with_val(ctx.bits(), rug::ops::Pow::pow(&r, basis.position_sum(k) as u32))).collect())
}

/// `(t, ln ||e^{-i H t}||)` for the many-body Hamiltonian.
pub fn mb_propagator_norm(spec: &ManyBodySpec, dt: f64, t_max: f64, ctx: Precision) -> Result<Vec<(f64, Float)>> {
    propagator_norm_series(&build_interacting(spec, ctx)?, dt, t_max, ctx)
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderSample {
    pub w: f64,
    pub l: usize,
    pub sample: usize,
    pub seed: u64,
    pub log10_cond: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderCell {
    pub w: f64,
    pub l: usize,
    pub mean_log10_cond: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DisorderSweep {
    pub samples: Vec<DisorderSample>,
    pub cells: Vec<DisorderCell>,
}

impl DisorderSweep {
    pub fn cell(&self, w: f64, l: usize) -> Option<&DisorderCell> {
        self.cells.iter().find(|c| c.w == w && c.l == l)
    }

    pub fn sample_table(&self) -> Table {
        let mut t = Table::new(["W", "L", "sample", "log10_cond"]);
        for s in &self.samples {
            t.push(vec![s.w.to_string(), s.l.to_string(), s.sample.to_string(), format!("{:.17e}", s.log10_cond)]);
        }
        t
    }

    pub fn cell_table(&self) -> Table {
        let mut t = Table::new(["W", "L", "mean_log10_cond", "stderr"]);
        for c in &self.cells {
            t.push(vec![c.w.to_string(), c.l.to_string(), format!("{:.17e}", c.mean_log10_cond), format!("{:.17e}", c.stderr)]);
        }
        t
    }
}

/// Seed of one disorder realization.
pub fn cell_seed(seed: u64, w: f64, l: usize, sample: usize) -> u64 {
    derive_seed(seed, &[w.to_bits(), l as u64, sample as u64])
}

/// Mean `log10 cond(V)` of the eigenvector matrix over `n_samples`
/// realizations per `(W, L)` cell. Cells and samples run in parallel.
pub fn disorder_condition_sweep(
    j: f64,
    gamma: f64,
    w_list: &[f64],
    l_list: &[usize],
    n_samples: usize,
    seed: u64,
    ctx: Precision,
) -> Result<DisorderSweep> {
    if n_samples == 0 {
        return Err(Error::InvalidArgument("need at least one sample".into()));
    }
    let tasks: Vec<(f64, usize, usize)> = w_list
        .iter()
        .flat_map(|&w| l_list.iter().flat_map(move |&l| (0..n_samples).map(move |s| (w, l, s))))
        .collect();
    let results: Vec<Result<DisorderSample>> = tasks
        .par_iter()
        .map(|&(w, l, sample)| {
            let seed = cell_seed(seed, w, l, sample);
            let spec = ModelSpec::disordered(j, gamma, w, l, seed, Boundary::Obc);
            let h = build(&spec, ctx)?;
            let spectrum = eig(&h).map_err(|e| match e {
                Error::NoConvergence { mode, iterations, context } => Error::NoConvergence {
                    mode,
                    iterations,
                    context: format!("W={w} L={l} sample {sample}: {context}"),
                },
                other => other,
            })?;
            let log10_cond = match log10_condition_number(&spectrum.right_vectors) {
                Ok(c) => c,
                Err(Error::InfiniteCondition) => f64::INFINITY,
                Err(e) => return Err(e),
            };
            Ok(DisorderSample { w, l, sample, seed, log10_cond })
        })
        .collect();
    let samples = results.into_iter().collect::<Result<Vec<_>>>()?;
    let cells = samples
        .chunks(n_samples)
        .map(|chunk| {
            let m = chunk.len() as f64;
            let mean = chunk.iter().map(|s| s.log10_cond).sum::<f64>() / m;
            let stderr = if chunk.len() > 1 {
                let var = chunk.iter().map(|s| (s.log10_cond - mean).powi(2)).sum::<f64>() / (m - 1.0);
                (var / m).sqrt()
            } else {
                0.0
            };
            DisorderCell { w: chunk[0].w, l: chunk[0].l, mean_log10_cond: mean, stderr }
        })
        .collect();
    Ok(DisorderSweep { samples, cells })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basis_order_and_size() {
        assert_eq!(fock_basis(10, 5).unwrap().dim(), 252);
        let b = fock_basis(4, 0).unwrap();
        assert_eq!(b.states, vec![0]);
        let b = fock_basis(4, 2).unwrap();
        assert_eq!(b.dim(), 6);
        assert_eq!(b.pattern(0), "0011");
        assert_eq!(b.pattern(5), "1100");
        assert!(matches!(fock_basis(17, 1), Err(Error::DimensionTooLarge { .. })));
    }

    #[test]
    fn span_closed_form_small() {
        assert_eq!(closed_form_span(4, 0), 0);
        assert_eq!(position_sum_span(&fock_basis(4, 4).unwrap()), 0);
        assert_eq!(position_sum_span(&fock_basis(6, 2).unwrap()), 8);
    }

    #[test]
    fn one_particle_sector_is_single_particle_matrix() {
        let ctx = Precision::new(30).unwrap();
        for bc in [Boundary::Obc, Boundary::Pbc] {
            let mb = ManyBodySpec::new(1.0, 0.8, 2.5, 5, 1, bc);
            let h = build_interacting(&mb, ctx).unwrap();
            assert_eq!(h, build(&mb.single_particle(), ctx).unwrap());
        }
    }

    #[test]
    fn reciprocal_limit_is_hermitian() {
        let ctx = Precision::new(30).unwrap();
        let h = build_interacting(&ManyBodySpec::new(1.0, 0.0, 1.0, 6, 3, Boundary::Pbc), ctx).unwrap();
        assert!(h.hermitian_defect().is_zero());
    }

    #[test]
    fn jordan_wigner_sign_on_wrap() {
        // c_1† c_3 on |site3, site2 filled> passes the particle on site 2
        assert!(hop_sign(0b110, 0, 2));
        assert!(!hop_sign(0b011, 2, 1));
    }

    #[test]
    fn closed_form_example() {
        let spec = ManyBodySpec::new(1.0, 0.99, 1.0, 10, 5, Boundary::Obc);
        let l = interacting_log10_condition(&spec).unwrap();
        assert!((l - 25.0 * 0.5 * 199f64.log10()).abs() < 1e-12);
    }
}
