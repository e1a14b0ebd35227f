//! Gaussian-state (Slater determinant) evolution under a non-Hermitian
//! single-particle Hamiltonian.
//!
//! The state is an orbital matrix `U` whose columns span the occupied
//! subspace. Each step applies `e^{-i h dt}` and re-orthonormalizes by QR;
//! the discarded `R` diagonal is accumulated in `log_norm`.

use rug::Float;

use crate::error::{Error, Result};
use crate::linalg::{eigvals_hermitian, largest_singular_value};
use crate::models::{build, ModelSpec};
use crate::mp::{householder_qr, matrix_exp, ComplexMatrix, ComplexScalar, Precision};
use crate::table::{fmt_f64, fmt_float, Table};

pub const DEFAULT_DT: f64 = 0.05;
/// Fraction of the run averaged by [`steady_state_metrics`] by default.
pub const DEFAULT_WINDOW_FRACTION: f64 = 0.25;

/// How single-particle indices map onto chains and sites. The two-chain
/// model interleaves `(A_j, B_j)` at indices `2j, 2j+1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub sites: usize,
    pub chains: usize,
    pub hopping: f64,
}

impl Lattice {
    pub fn of(spec: &ModelSpec) -> Self {
        Self { sites: spec.sites(), chains: if spec.is_two_chain() { 2 } else { 1 }, hopping: spec.hopping() }
    }

    pub fn dim(&self) -> usize {
        self.sites * self.chains
    }

    /// Single-particle index of `site` (0-based) on `chain`.
    pub fn index(&self, chain: usize, site: usize) -> usize {
        site * self.chains + chain
    }

    /// Indices of the left half of the chain(s), which are contiguous.
    pub fn left_half(&self) -> std::ops::Range<usize> {
        0..self.sites / 2 * self.chains
    }
}

#[derive(Debug, Clone)]
pub struct GaussianState {
    pub u: ComplexMatrix,
    pub t: f64,
    /// `sum log R_kk` over all steps so far.
    pub log_norm: Float,
}

impl GaussianState {
    pub fn particles(&self) -> usize {
        self.u.cols()
    }
}

/// Neel start. Single chain: even sites (1-based) filled, `N = L/2`. Two
/// chains: odd sites of A and even sites of B, `N = L`.
pub fn neel_init(spec: &ModelSpec, ctx: Precision) -> Result<GaussianState> {
    spec.validate()?;
    let lat = Lattice::of(spec);
    if lat.sites % 2 != 0 {
        return Err(Error::InvalidModel(format!("Neel state needs even L, got {}", lat.sites)));
    }
    let mut occupied = Vec::new();
    for j in 0..lat.sites {
        if lat.chains == 1 {
            if j % 2 == 1 {
                occupied.push(j);
            }
        } else if j % 2 == 0 {
            occupied.push(lat.index(0, j));
        } else {
            occupied.push(lat.index(1, j));
        }
    }
    let mut u = ComplexMatrix::zeros(lat.dim(), occupied.len(), ctx);
    for (k, &i) in occupied.iter().enumerate() {
        u[(i, k)] = ComplexScalar::one(ctx.bits());
    }
    Ok(GaussianState { u, t: 0.0, log_norm: ctx.zero() })
}

/// `e^{-i h dt}` at working precision.
pub fn step_propagator(h: &ComplexMatrix, dt: f64, ctx: Precision) -> ComplexMatrix {
    let minus_i_dt = ComplexScalar::new(ctx.zero(), -ctx.param(dt));
    matrix_exp(&h.with_ctx(ctx).scale(&minus_i_dt))
}

/// One step with a precomputed propagator: `U <- Q` where `QR = E U`.
pub fn apply_step(state: &GaussianState, prop: &ComplexMatrix, dt: f64) -> Result<GaussianState> {
    if prop.cols() != state.u.rows() {
        return Err(Error::DimensionMismatch("propagator does not match the orbital matrix".into()));
    }
    let ctx = state.u.ctx();
    let t = state.t + dt;
    let qr = householder_qr(&prop.matmul(&state.u))?;
    let floor = ctx.pow10(-2 * ctx.digits() as i32);
    let mut log_norm = state.log_norm.clone();
    for k in 0..qr.r.cols() {
        let d = &qr.r[(k, k)].re;
        if *d < floor {
            return Err(Error::DegenerateOrbitals { t, column: k });
        }
        log_norm += Float::with_val(ctx.bits(), d.ln_ref());
    }
    Ok(GaussianState { u: qr.q, t, log_norm })
}

pub fn evolve_step(state: &GaussianState, h: &ComplexMatrix, dt: f64, ctx: Precision) -> Result<GaussianState> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument("dt must be positive".into()));
    }
    apply_step(state, &step_propagator(h, dt, ctx), dt)
}

/// `C_ij = <c_i† c_j> = [U U†]_ji`.
pub fn correlation_matrix(state: &GaussianState) -> ComplexMatrix {
    let u = &state.u;
    let ctx = u.ctx();
    let d = u.rows();
    let mut c = ComplexMatrix::zeros(d, d, ctx);
    for i in 0..d {
        for j in i..d {
            let mut s = ComplexScalar::zero(ctx.bits());
            for k in 0..u.cols() {
                // U_jk conj(U_ik)
                s.conj_mul_add_assign(&u[(i, k)], &u[(j, k)]);
            }
            if i != j {
                c[(j, i)] = s.conj();
            }
            c[(i, j)] = s;
        }
    }
    c
}

/// Observables of one snapshot.
#[derive(Debug, Clone)]
pub struct Snapshot {
    pub density: Vec<Float>,
    /// Bond currents `I_j`, one list of `L-1` bonds per chain.
    pub local_current: Vec<Vec<Float>>,
    /// `sum_j I_j` per chain.
    pub total_current: Vec<Float>,
    /// Half-chain von Neumann entropy.
    pub entropy: Float,
}

/// `S = -sum [l ln l + (1-l) ln(1-l)]` over block eigenvalues clamped to
/// `[10^-P, 1-10^-P]`; eigenvalues within `10^-(P-6)` of 0 or 1 contribute 0.
pub fn entanglement_entropy(block: &ComplexMatrix) -> Result<Float> {
    let ctx = block.ctx();
    let bits = ctx.bits();
    let vals = eigvals_hermitian(block)?;
    let floor = ctx.pow10(-(ctx.digits() as i32));
    let tol = ctx.tol(6);
    let one = ctx.int(1);
    let mut s = ctx.zero();
    for mut l in vals {
        if l < floor {
            l.clone_from(&floor);
        }
        let top = Float::with_val(bits, &one - &floor);
        if l > top {
            l = top;
        }
        let m = Float::with_val(bits, &one - &l);
        if l <= tol || m <= tol {
            continue;
        }
        s -= Float::with_val(bits, l.ln_ref()) * &l;
        s -= Float::with_val(bits, m.ln_ref()) * &m;
    }
    Ok(s)
}

pub fn measure(state: &GaussianState, lat: &Lattice) -> Result<Snapshot> {
    let c = correlation_matrix(state);
    let ctx = c.ctx();
    let bits = ctx.bits();
    let density = (0..c.rows()).map(|i| c[(i, i)].re.clone()).collect();
    let jhop = ctx.param(lat.hopping);
    let mut local_current = Vec::with_capacity(lat.chains);
    let mut total_current = Vec::with_capacity(lat.chains);
    for chain in 0..lat.chains {
        let mut bonds = Vec::with_capacity(lat.sites - 1);
        let mut total = ctx.zero();
        for j in 0..lat.sites - 1 {
            // (iJ/2)(C_{j,j+1} - C_{j+1,j}) = -J Im C_{j,j+1}
            let cij = &c[(lat.index(chain, j), lat.index(chain, j + 1))];
            let ij = -Float::with_val(bits, &cij.im * &jhop);
            total += &ij;
            bonds.push(ij);
        }
        local_current.push(bonds);
        total_current.push(total);
    }
    let half = lat.left_half();
    let entropy = entanglement_entropy(&c.submatrix(half.clone(), half))?;
    Ok(Snapshot { density, local_current, total_current, entropy })
}

#[derive(Debug, Clone, Default)]
pub struct ObservableSeries {
    pub chains: usize,
    pub times: Vec<f64>,
    pub density: Vec<Vec<Float>>,
    pub local_current: Vec<Vec<Vec<Float>>>,
    pub total_current: Vec<Vec<Float>>,
    pub entropy: Vec<Float>,
    /// Accumulated `log_norm` of the state at each record.
    pub log_norm: Vec<Float>,
    pub log_propagator_norm: Option<Vec<Float>>,
}

impl ObservableSeries {
    fn push(&mut self, state: &GaussianState, snap: Snapshot) {
        self.times.push(state.t);
        self.density.push(snap.density);
        self.local_current.push(snap.local_current);
        self.total_current.push(snap.total_current);
        self.entropy.push(snap.entropy);
        self.log_norm.push(state.log_norm.clone());
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Total current summed over chains.
    pub fn current(&self, k: usize) -> Float {
        let mut s = Float::new(self.total_current[k][0].prec());
        for c in &self.total_current[k] {
            s += c;
        }
        s
    }

    /// `t,n_1..n_D,I_total[,I_A,I_B],S,log_norm`.
    pub fn to_table(&self, ctx: Precision) -> Table {
        let d = self.density.first().map_or(0, Vec::len);
        let mut header = vec!["t".to_string()];
        header.extend((1..=d).map(|i| format!("n_{i}")));
        header.push("I_total".into());
        if self.chains == 2 {
            header.push("I_A".into());
            header.push("I_B".into());
        }
        header.push("S".into());
        header.push("log_norm".into());
        let mut t = Table::new(header);
        for k in 0..self.len() {
            let mut row = vec![fmt_f64(self.times[k], ctx)];
            row.extend(self.density[k].iter().map(|x| fmt_float(x, ctx)));
            row.push(fmt_float(&self.current(k), ctx));
            if self.chains == 2 {
                row.extend(self.total_current[k].iter().map(|x| fmt_float(x, ctx)));
            }
            row.push(fmt_float(&self.entropy[k], ctx));
            row.push(fmt_float(&self.log_norm[k], ctx));
            t.push(row);
        }
        t
    }
}

/// Runs `steps` steps from `state`, recording every `record_every` steps
/// (and at the start). Returns the series and the final state.
pub fn evolve(
    mut state: GaussianState,
    h: &ComplexMatrix,
    lat: &Lattice,
    dt: f64,
    steps: usize,
    record_every: usize,
) -> Result<(ObservableSeries, GaussianState)> {
    if !(dt > 0.0) || record_every == 0 {
        return Err(Error::InvalidArgument("dt must be positive and record_every at least 1".into()));
    }
    let ctx = state.u.ctx();
    let prop = step_propagator(h, dt, ctx);
    let mut series = ObservableSeries { chains: lat.chains, ..Default::default() };
    series.push(&state, measure(&state, lat)?);
    for s in 1..=steps {
        state = apply_step(&state, &prop, dt)?;
        // keep t on the grid k*dt rather than accumulating round-off
        state.t = s as f64 * dt;
        if s % record_every == 0 {
            series.push(&state, measure(&state, lat)?);
        }
    }
    Ok((series, state))
}

/// Number of steps covering `t_max`.
pub fn step_count(dt: f64, t_max: f64) -> usize {
    (t_max / dt).round() as usize
}

/// Evolution of the Neel state of `spec` up to `t_max`.
pub fn run_evolution(
    spec: &ModelSpec,
    dt: f64,
    t_max: f64,
    ctx: Precision,
    record_every: usize,
) -> Result<(ObservableSeries, GaussianState)> {
    if !(t_max > 0.0) {
        return Err(Error::InvalidArgument("t_max must be positive".into()));
    }
    let h = build(spec, ctx)?;
    let state = neel_init(spec, ctx)?;
    evolve(state, &h, &Lattice::of(spec), dt, step_count(dt, t_max), record_every)
}

/// `(t, ln ||e^{-iht}||)` from `t = 0`. The propagator is renormalized by its
/// largest singular value after every step and the factor is accumulated.
pub fn propagator_norm_series(h: &ComplexMatrix, dt: f64, t_max: f64, ctx: Precision) -> Result<Vec<(f64, Float)>> {
    if !(dt > 0.0 && t_max > 0.0) {
        return Err(Error::InvalidArgument("dt and t_max must be positive".into()));
    }
    let prop = step_propagator(h, dt, ctx);
    let mut m = ComplexMatrix::identity(h.rows(), ctx);
    let mut acc = ctx.zero();
    let mut out = vec![(0.0, ctx.zero())];
    for s in 1..=step_count(dt, t_max) {
        m = prop.matmul(&m);
        let smax = largest_singular_value(&m);
        acc += Float::with_val(ctx.bits(), smax.ln_ref());
        m = m.scale_real(&smax.recip());
        out.push((s as f64 * dt, acc.clone()));
    }
    Ok(out)
}

/// Least-squares slope of `y` against `x`.
pub fn fit_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

/// Time averages over the final window.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub samples: usize,
    pub mean_density: Vec<f64>,
    /// Sites with `0.05 < n < 0.95`.
    pub middle_width: usize,
    /// `(n_1, n_L)` per chain.
    pub edge_densities: Vec<(f64, f64)>,
    /// Time average of the signed total current.
    pub mean_current: f64,
    /// Time average of the signed current per chain.
    pub mean_chain_current: Vec<f64>,
    /// Mean of `|I(t)|` for the total current.
    pub mean_abs_current: f64,
    /// Mean of `|I_c(t)|` per chain.
    pub mean_abs_chain_current: Vec<f64>,
    /// Largest `|sum_c I_c(t)|` in the window.
    pub max_abs_current_sum: f64,
    pub mean_entropy: f64,
}

/// Window-averaged steady-state indicators; the window is the final
/// `window` time units of the series.
pub fn steady_state_metrics(series: &ObservableSeries, window: f64) -> Result<SteadyState> {
    let (Some(&t0), Some(&t1)) = (series.times.first(), series.times.last()) else {
        return Err(Error::InsufficientWindow { available: 0.0, required: window });
    };
    if t1 - t0 < window - 1e-9 || !(window > 0.0) {
        return Err(Error::InsufficientWindow { available: t1 - t0, required: window });
    }
    let idx: Vec<usize> = (0..series.len()).filter(|&k| series.times[k] >= t1 - window - 1e-9).collect();
    let m = idx.len() as f64;
    let d = series.density[0].len();
    let mut mean_density = vec![0.0; d];
    for &k in &idx {
        for (acc, x) in mean_density.iter_mut().zip(&series.density[k]) {
            *acc += x.to_f64();
        }
    }
    mean_density.iter_mut().for_each(|x| *x /= m);
    let middle_width = mean_density.iter().filter(|&&n| n > 0.05 && n < 0.95).count();
    let chains = series.chains.max(1);
    let sites = d / chains;
    let edge_densities =
        (0..chains).map(|c| (mean_density[c], mean_density[(sites - 1) * chains + c])).collect();
    let mean_current = idx.iter().map(|&k| series.current(k).to_f64()).sum::<f64>() / m;
    let mean_chain_current =
        (0..chains).map(|c| idx.iter().map(|&k| series.total_current[k][c].to_f64()).sum::<f64>() / m).collect();
    let mean_abs_current = idx.iter().map(|&k| series.current(k).to_f64().abs()).sum::<f64>() / m;
    let mean_abs_chain_current = (0..chains)
        .map(|c| idx.iter().map(|&k| series.total_current[k][c].to_f64().abs()).sum::<f64>() / m)
        .collect();
    let max_abs_current_sum = idx.iter().map(|&k| series.current(k).to_f64().abs()).fold(0.0, f64::max);
    let mean_entropy = idx.iter().map(|&k| series.entropy[k].to_f64()).sum::<f64>() / m;
    Ok(SteadyState {
        samples: idx.len(),
        mean_density,
        middle_width,
        edge_densities,
        mean_current,
        mean_chain_current,
        mean_abs_current,
        mean_abs_chain_current,
        max_abs_current_sum,
        mean_entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::Boundary;
    use crate::mp::random::{random_hermitian, random_matrix};

    fn ctx() -> Precision {
        Precision::new(30).unwrap()
    }

    #[test]
    fn neel_patterns() {
        let s = neel_init(&ModelSpec::hn(1.0, 0.8, 4, Boundary::Obc), ctx()).unwrap();
        let c = correlation_matrix(&s);
        let diag: Vec<f64> = (0..4).map(|i| c[(i, i)].re.to_f64()).collect();
        assert_eq!(diag, vec![0.0, 1.0, 0.0, 1.0]);
        let shn = ModelSpec::shn(1.0, 1.0, 0.4, 4, Boundary::Obc);
        let s = neel_init(&shn, ctx()).unwrap();
        assert_eq!(s.particles(), 4);
        let c = correlation_matrix(&s);
        // A: 1010, B: 0101 interleaved as A1 B1 A2 B2 ...
        let diag: Vec<f64> = (0..8).map(|i| c[(i, i)].re.to_f64()).collect();
        assert_eq!(diag, vec![1., 0., 0., 1., 1., 0., 0., 1.]);
        assert!(neel_init(&ModelSpec::hn(1.0, 0.8, 5, Boundary::Obc), ctx()).is_err());
    }

    #[test]
    fn product_state_has_no_entropy_or_current() {
        let spec = ModelSpec::hn(1.0, 0.8, 6, Boundary::Obc);
        let s = neel_init(&spec, ctx()).unwrap();
        let m = measure(&s, &Lattice::of(&spec)).unwrap();
        assert!(m.entropy.is_zero());
        assert!(m.total_current[0].is_zero());
    }

    #[test]
    fn spread_particle_correlations() {
        let c = ctx();
        let h = c.real(std::f64::consts::FRAC_1_SQRT_2);
        let u = ComplexMatrix::from_fn(2, 1, c, |_, _| ComplexScalar::from_real(h.clone()));
        let s = GaussianState { u, t: 0.0, log_norm: c.zero() };
        let cm = correlation_matrix(&s);
        for z in cm.data() {
            assert!((z.re.to_f64() - 0.5).abs() < 1e-15 && z.im.is_zero());
        }
    }

    #[test]
    fn zero_hamiltonian_leaves_state() {
        let c = ctx();
        let spec = ModelSpec::hn(1.0, 0.8, 4, Boundary::Obc);
        let s = neel_init(&spec, c).unwrap();
        let next = evolve_step(&s, &ComplexMatrix::zeros(4, 4, c), 0.05, c).unwrap();
        assert_eq!(next.u, s.u);
        assert_eq!(next.t, 0.05);
        assert!(next.log_norm.is_zero());
    }

    #[test]
    fn hermitian_evolution_keeps_norm() {
        let c = ctx();
        let h = random_hermitian(6, c, 3);
        let u = householder_qr(&random_matrix(6, 3, c, 4)).unwrap().q;
        let mut s = GaussianState { u, t: 0.0, log_norm: c.zero() };
        for _ in 0..5 {
            s = evolve_step(&s, &h, 0.05, c).unwrap();
        }
        assert!(s.log_norm.to_f64().abs() < 1e-24);
        let g = s.u.adjoint_matmul(&s.u);
        assert!(g.max_abs_diff(&ComplexMatrix::identity(3, c)) < c.tol(4));
    }

    #[test]
    fn entropy_clamps_pure_values() {
        let c = ctx();
        let half = c.real(0.5);
        let block = ComplexMatrix::diagonal(
            &[ComplexScalar::from_real(half), ComplexScalar::one(c.bits()), ComplexScalar::zero(c.bits())],
            c,
        );
        let s = entanglement_entropy(&block).unwrap().to_f64();
        assert!((s - std::f64::consts::LN_2).abs() < 1e-15);
    }

    #[test]
    fn window_metrics() {
        let c = ctx();
        let f = |x: f64| c.real(x);
        let mut series = ObservableSeries { chains: 1, ..Default::default() };
        for k in 0..5 {
            series.times.push(k as f64);
            series.density.push(vec![f(0.0), f(0.5), f(1.0)]);
            series.total_current.push(vec![f(if k % 2 == 0 { 0.1 } else { -0.1 })]);
            series.local_current.push(vec![]);
            series.entropy.push(f(0.0));
            series.log_norm.push(f(0.0));
        }
        let m = steady_state_metrics(&series, 2.0).unwrap();
        assert_eq!(m.samples, 3);
        assert_eq!(m.middle_width, 1);
        assert_eq!(m.edge_densities, vec![(0.0, 1.0)]);
        assert!((m.mean_abs_current - 0.1).abs() < 1e-15);
        assert!(matches!(steady_state_metrics(&series, 10.0), Err(Error::InsufficientWindow { .. })));
        assert_eq!(series.to_table(c).header.len(), 7);
    }

    #[test]
    fn slope_of_line() {
        let x = [0.0, 1.0, 2.0];
        assert!((fit_slope(&x, &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-14);
    }
}
