//! Inverse-CDF samplers for the fitted laws, and sub-seed derivation.

use rand::Rng;
use rand_distr::{Distribution, Gamma};
use statrs::distribution::{ContinuousCDF, Normal};

use super::expprofile::exp_profile_cdf;
use super::lognormal::lognormal_z;

/// splitmix64 finalizer over `seed` and a stream index.
pub fn sub_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Uniform on (0, 1].
pub fn open_unit<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Quantile of the log-normal truncated to (0, 1]: exp(μ + σ Φ⁻¹(u z)).
pub fn truncated_lognormal_quantile(u: f64, mu: f64, sigma: f64) -> f64 {
    let std = Normal::new(0.0, 1.0).expect("standard normal");
    let q = std.inverse_cdf(u * lognormal_z(mu, sigma));
    (mu + sigma * q).exp().clamp(f64::MIN_POSITIVE, 1.0)
}

/// Quantile of the exponential profile, by bisection on its CDF.
pub fn exp_profile_quantile(u: f64, beta: f64) -> f64 {
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if exp_profile_cdf(mid, beta) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

pub fn sample_truncated_lognormal<R: Rng + ?Sized>(rng: &mut R, mu: f64, sigma: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| truncated_lognormal_quantile(open_unit(rng), mu, sigma))
        .collect()
}

pub fn sample_exp_profile<R: Rng + ?Sized>(rng: &mut R, beta: f64, n: usize) -> Vec<f64> {
    (0..n).map(|_| exp_profile_quantile(open_unit(rng), beta)).collect()
}

/// Pareto with density ∝ x^{-α} on [x_min, ∞).
pub fn sample_pareto<R: Rng + ?Sized>(rng: &mut R, alpha: f64, x_min: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|_| x_min * open_unit(rng).powf(-1.0 / (alpha - 1.0)))
        .collect()
}

/// Gamma(shape, scale) restricted to (0, 1] by rejection.
pub fn sample_truncated_gamma<R: Rng + ?Sized>(rng: &mut R, shape: f64, scale: f64, n: usize) -> Vec<f64> {
    let g = Gamma::new(shape, scale).expect("positive gamma parameters");
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: f64 = g.sample(rng);
        if x > 0.0 && x <= 1.0 {
            out.push(x);
        }
    }
    out
}
