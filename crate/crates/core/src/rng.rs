//! Seeded randomness for the random-draw fixtures.

use rand::{Rng, SeedableRng};
pub use rand_xoshiro::SplitMix64;

use crate::scalar::Real;

pub const DEFAULT_SEED: u64 = 42;

pub fn seeded(seed: u64) -> SplitMix64 {
    SplitMix64::seed_from_u64(seed)
}

/// Uniform draw from `[lo, hi)`.
pub fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> T {
    T::lit(rng.random_range(lo..hi))
}

/// Four positive metric coefficients drawn log-uniformly from `[lo, hi)`.
pub fn metric_coeffs<T: Real, R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> [T; 4] {
    let (a, b) = (lo.ln(), hi.ln());
    std::array::from_fn(|_| T::lit(rng.random_range(a..b).exp()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reproducible() {
        let mut a = seeded(DEFAULT_SEED);
        let mut b = seeded(DEFAULT_SEED);
        let x: [f64; 4] = metric_coeffs(&mut a, 0.5, 2.0);
        let y: [f64; 4] = metric_coeffs(&mut b, 0.5, 2.0);
        assert_eq!(x, y);
        assert!(x.iter().all(|v| (0.5..2.0).contains(v)));
        let u: f64 = uniform(&mut a, -1.0, 1.0);
        assert!((-1.0..1.0).contains(&u));
    }
}
