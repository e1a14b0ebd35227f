//! Seeded random matrices.
//!
//! All randomness flows through [`XorShiftRng`] (Marsaglia's xorshift128,
//! seeded from a `u64` via the PCG32 expansion in `rand_core`), so a seed
//! fully determines every draw on every platform.

use rand::{Rng, RngCore, SeedableRng};
use rand_distr::StandardNormal;
use rand_xorshift::XorShiftRng;

use super::matrix::ComplexMatrix;
use super::precision::Precision;
use super::scalar::ComplexScalar;

pub fn seeded_rng(seed: u64) -> XorShiftRng {
    XorShiftRng::seed_from_u64(seed)
}

/// Uniform double in `[0, 1)` from the top 53 bits of one 64-bit draw.
pub fn unit_uniform(rng: &mut impl RngCore) -> f64 {
    (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Mixes a seed with a list of words (splitmix64 finalizer per word); used to
/// derive independent per-task seeds from one master seed.
pub fn derive_seed(seed: u64, words: &[u64]) -> u64 {
    let mut h = seed;
    for &w in words {
        let mut z = h ^ w.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        h = z ^ (z >> 31);
    }
    h
}

/// Complex Ginibre matrix: i.i.d. entries `(x + iy)/sqrt(2)` with standard
/// normal `x, y`. Entries are drawn as doubles and widened exactly.
pub fn ginibre(rows: usize, cols: usize, ctx: Precision, rng: &mut impl Rng) -> ComplexMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    ComplexMatrix::from_fn(rows, cols, ctx, |_, _| {
        let x: f64 = rng.sample(StandardNormal);
        let y: f64 = rng.sample(StandardNormal);
        ComplexScalar::from_f64(x * s, y * s, ctx.bits())
    })
}

/// Ginibre matrix from a seed.
pub fn random_matrix(rows: usize, cols: usize, ctx: Precision, seed: u64) -> ComplexMatrix {
    let mut rng = seeded_rng(seed);
    ginibre(rows, cols, ctx, &mut rng)
}

/// Random Hermitian matrix `(G + G†)/2`.
pub fn random_hermitian(n: usize, ctx: Precision, seed: u64) -> ComplexMatrix {
    let g = random_matrix(n, n, ctx, seed);
    let half = ctx.real(0.5);
    g.add(&g.adjoint()).scale_real(&half)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeds_are_reproducible() {
        let ctx = Precision::new(20).unwrap();
        assert_eq!(random_matrix(3, 3, ctx, 11), random_matrix(3, 3, ctx, 11));
        assert_ne!(random_matrix(3, 3, ctx, 11), random_matrix(3, 3, ctx, 12));
    }

    #[test]
    fn uniform_in_unit_interval() {
        let mut rng = seeded_rng(5);
        for _ in 0..1000 {
            let u = unit_uniform(&mut rng);
            assert!((0.0..1.0).contains(&u));
        }
    }

    #[test]
    fn derived_seeds_differ() {
        assert_ne!(derive_seed(1, &[0, 1]), derive_seed(1, &[1, 0]));
        assert_eq!(derive_seed(9, &[3]), derive_seed(9, &[3]));
    }
}
