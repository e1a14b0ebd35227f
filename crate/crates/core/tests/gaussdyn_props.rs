use proptest::prelude::*;
use rug::Float;
use skinbench::gaussdyn::{
    apply_step, fit_slope, measure, neel_init, propagator_norm_series, run_evolution, step_propagator, GaussianState, Lattice,
};
use skinbench::models::{build, exact_condition_number, Boundary, ModelSpec};
use skinbench::mp::householder_qr;
use skinbench::mp::random::random_matrix;
use skinbench::{ComplexMatrix, Precision};

fn max_gap(a: &[Float], b: &[Float]) -> f64 {
    a.iter().zip(b).map(|(x, y)| Float::with_val(x.prec(), x - y).abs().to_f64()).fold(0.0, f64::max)
}

fn orthonormal_defect(u: &ComplexMatrix) -> Float {
    u.adjoint_matmul(u).max_abs_diff(&ComplexMatrix::identity(u.cols(), u.ctx()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn observables_ignore_orbital_gauge(seed in any::<u64>(), half in 2usize..=8, two_chain in any::<bool>(), digits in 20u32..=60) {
        let ctx = Precision::new(digits).unwrap();
        let spec = if two_chain {
            ModelSpec::shn(1.0, 0.7, 0.3, 2 * half, Boundary::Obc)
        } else {
            ModelSpec::hn(1.0, 0.6, 2 * half, Boundary::Obc)
        };
        let lat = Lattice::of(&spec);
        let n = if two_chain { 2 * half } else { half };
        let u = householder_qr(&random_matrix(lat.dim(), n, ctx, seed)).unwrap().q;
        let w = householder_qr(&random_matrix(n, n, ctx, seed ^ 0xabc)).unwrap().q;
        let a = measure(&GaussianState { u: u.clone(), t: 0.0, log_norm: ctx.zero() }, &lat).unwrap();
        let b = measure(&GaussianState { u: u.matmul(&w), t: 0.0, log_norm: ctx.zero() }, &lat).unwrap();
        let tol = ctx.tol(6).to_f64();
        prop_assert!(max_gap(&a.density, &b.density) < tol);
        prop_assert!(max_gap(&a.total_current, &b.total_current) < tol);
        for (x, y) in a.local_current.iter().zip(&b.local_current) {
            prop_assert!(max_gap(x, y) < tol);
        }
        prop_assert!(max_gap(&[a.entropy], &[b.entropy]) < tol);
    }

    #[test]
    fn orbitals_stay_orthonormal(half in 1usize..=6, gamma in -0.9f64..0.9, steps in 1usize..30, digits in 20u32..=60) {
        let ctx = Precision::new(digits).unwrap();
        let spec = ModelSpec::hn(1.0, gamma, 2 * half, Boundary::Obc);
        let prop = step_propagator(&build(&spec, ctx).unwrap(), 0.1, ctx);
        let mut state = neel_init(&spec, ctx).unwrap();
        for _ in 0..steps {
            state = apply_step(&state, &prop, 0.1).unwrap();
            prop_assert_eq!(state.particles(), half);
            prop_assert!(orthonormal_defect(&state.u) < ctx.tol(4));
        }
    }

    #[test]
    fn propagator_norm_is_bounded_by_condition(l in 2usize..=12, gamma in -0.9f64..0.9) {
        let ctx = Precision::new(40).unwrap();
        let spec = ModelSpec::hn(1.0, gamma, l, Boundary::Obc);
        let bound = exact_condition_number(&spec).unwrap().ln() + 1e-3;
        let series = propagator_norm_series(&build(&spec, ctx).unwrap(), 0.1, 8.0, ctx).unwrap();
        for (t, ln) in &series {
            prop_assert!(ln.to_f64() <= bound, "t={t}: {} > {bound}", ln.to_f64());
        }
        // a Slater determinant of N orbitals grows at most by cond^N
        let (obs, state) = run_evolution(&spec.with_sites(l + l % 2), 0.1, 4.0, ctx, 10).unwrap();
        let cond = exact_condition_number(&spec.with_sites(l + l % 2)).unwrap();
        let state_bound = state.particles() as f64 * cond.ln() + 1e-3;
        prop_assert!(obs.log_norm.iter().all(|x| x.to_f64() <= state_bound));
    }

    #[test]
    fn two_chain_without_skin_stays_bounded(gamma in 0.05f64..0.8, gap in 0.1f64..0.5) {
        let delta = gamma + gap;
        let ctx = Precision::new(30).unwrap();
        let spec = ModelSpec::shn(1.0, gamma, delta, 12, Boundary::Obc);
        let series = propagator_norm_series(&build(&spec, ctx).unwrap(), 0.1, 10.0, ctx).unwrap();
        let bound = exact_condition_number(&spec).unwrap().ln() + 1e-3;
        prop_assert!(series.iter().all(|p| p.1.to_f64() <= bound));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn two_chain_growth_rate(gamma in 0.6f64..1.0, ratio in 0.1f64..0.7) {
        let delta = gamma * ratio;
        let ctx = Precision::new(30).unwrap();
        let spec = ModelSpec::shn(1.0, gamma, delta, 14, Boundary::Obc);
        let series = propagator_norm_series(&build(&spec, ctx).unwrap(), 0.05, 3.0, ctx).unwrap();
        // past the initial transient, before saturation
        let (x, y): (Vec<f64>, Vec<f64>) = series.iter().filter(|p| p.0 >= 1.0 - 1e-9).map(|p| (p.0, p.1.to_f64())).unzip();
        let expected = 2.0 * (gamma * gamma - delta * delta).sqrt();
        let slope = fit_slope(&x, &y);
        prop_assert!((slope - expected).abs() <= 0.1 * expected, "slope {slope} expected {expected}");
    }
}

#[test]
fn halving_the_step_keeps_the_density() {
    let ctx = Precision::new(50).unwrap();
    let spec = ModelSpec::hn(1.0, 0.8, 10, Boundary::Obc);
    let (a, _) = run_evolution(&spec, 0.1, 3.0, ctx, 1).unwrap();
    let (b, _) = run_evolution(&spec, 0.05, 3.0, ctx, 1).unwrap();
    let gap = max_gap(a.density.last().unwrap(), b.density.last().unwrap());
    assert!(gap < 1e-4, "{gap}");
}

/// Column `j` of the steady-state orbitals peaks near site `L - j + 1`.
#[test]
fn steady_orbitals_stack_from_the_right() {
    let ctx = Precision::new(50).unwrap();
    let l = 20;
    let (_, state) = run_evolution(&ModelSpec::hn(1.0, 0.8, l, Boundary::Obc), 0.05, 40.0, ctx, 100).unwrap();
    for j in 0..state.particles() {
        let col = state.u.column(j);
        let peak = (0..l).max_by(|&a, &b| col[a].abs().partial_cmp(&col[b].abs()).unwrap()).unwrap() + 1;
        let expected = l - j;
        assert!(peak.abs_diff(expected) <= 3, "column {}: peak at {peak}, expected near {expected}", j + 1);
    }
}
