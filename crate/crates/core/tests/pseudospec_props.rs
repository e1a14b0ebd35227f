use proptest::prelude::*;
use rug::Float;
use skinbench::linalg::smallest_singular_value;
use skinbench::models::{build, exact_condition_number, exact_spectrum, Boundary, ModelSpec};
use skinbench::pseudospec::{check_sandwich, perturbed_eigencloud, resolvent_norm_grid, GridSpec};
use skinbench::Precision;

fn small_grid(nx: usize, ny: usize) -> GridSpec {
    GridSpec { re_min: -2.3, re_max: 2.1, im_min: -1.2, im_max: 1.4, nx, ny }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn resolvent_is_sandwiched(l in 2usize..=10, gamma in -0.85f64..0.85, digits in 25u32..=45) {
        let ctx = Precision::new(digits).unwrap();
        let spec = ModelSpec::hn(1.0, gamma, l, Boundary::Obc);
        let grid = resolvent_norm_grid(&build(&spec, ctx).unwrap(), &small_grid(13, 9), ctx).unwrap();
        let cond = ctx.param(exact_condition_number(&spec).unwrap());
        let r = check_sandwich(&grid, &exact_spectrum(&spec, ctx).unwrap(), &cond, ctx);
        prop_assert!(r.holds(), "violations at {:?}", r.violations);
        prop_assert!(r.upper_ratio <= 1.0 + 1e-12);
    }

    #[test]
    fn level_sets_nest(l in 2usize..=10, gamma in -0.85f64..0.85, e1 in -12.0f64..0.0, e2 in -12.0f64..0.0) {
        let ctx = Precision::new(30).unwrap();
        let grid = resolvent_norm_grid(&build(&ModelSpec::hn(1.0, gamma, l, Boundary::Obc), ctx).unwrap(), &small_grid(11, 7), ctx).unwrap();
        let (lo, hi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
        let inner = grid.level_set(10f64.powf(lo));
        let outer = grid.level_set(10f64.powf(hi));
        prop_assert!(inner.iter().zip(&outer).all(|(a, b)| !a || *b));
    }

    #[test]
    fn cloud_points_lie_in_the_pseudospectrum(l in 2usize..=8, gamma in -0.85f64..0.85, eps in -8.0f64..-1.0, seed in any::<u64>()) {
        let ctx = Precision::new(30).unwrap();
        let h = build(&ModelSpec::hn(1.0, gamma, l, Boundary::Obc), ctx).unwrap();
        let epsilon = 10f64.powf(eps);
        let cloud = perturbed_eigencloud(&h, epsilon, 3, seed, ctx).unwrap();
        let slack = ctx.real(1.0 + 1e-6);
        for (norm, values) in cloud.norms.iter().zip(&cloud.samples) {
            prop_assert!(norm.to_f64() < epsilon * (1.0 + 1e-12));
            let bound = Float::with_val(ctx.bits(), norm * &slack);
            for z in values {
                let smin = smallest_singular_value(&h.shift_diagonal(z));
                prop_assert!(smin <= bound, "smin {smin} above {bound}");
            }
        }
    }
}
