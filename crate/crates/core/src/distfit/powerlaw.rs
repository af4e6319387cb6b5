//! Power-law tail: threshold by minimum KS distance, exponent by maximum
//! likelihood, standard error `(α - 1)/√m`.

use serde::{Deserialize, Serialize};

use super::FitError;
use crate::json::f17;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawConfig {
    pub min_samples: usize,
    pub min_tail: usize,
    /// Candidate thresholds scanned at most; evenly thinned by rank beyond.
    pub max_candidates: usize,
}

impl Default for PowerLawConfig {
    fn default() -> Self {
        PowerLawConfig {
            min_samples: 100,
            min_tail: 50,
            max_candidates: 500,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    #[serde(serialize_with = "f17")]
    pub alpha: f64,
    #[serde(serialize_with = "f17")]
    pub x_min: f64,
    /// Tail size: samples strictly above `x_min`.
    pub m: usize,
    #[serde(serialize_with = "f17")]
    pub sigma_hat: f64,
    #[serde(serialize_with = "f17")]
    pub ks: f64,
    pub n: usize,
    pub candidates: usize,
}

/// α = 1 + m / Σ ln(x / x_min) over the tail.
pub fn mle_alpha(tail: &[f64], x_min: f64) -> f64 {
    let s: f64 = tail.iter().map(|x| (x / x_min).ln()).sum();
    1.0 + tail.len() as f64 / s
}

pub fn powerlaw_cdf(x: f64, x_min: f64, alpha: f64) -> f64 {
    if x <= x_min {
        0.0
    } else {
        1.0 - (x / x_min).powf(1.0 - alpha)
    }
}

/// max |P - F| over the (ascending) tail points, where P(v) is the fraction
/// of tail points <= v.
pub fn ks_distance(tail_sorted: &[f64], x_min: f64, alpha: f64) -> f64 {
    let m = tail_sorted.len() as f64;
    let mut ks: f64 = 0.0;
    let mut i = 0;
    while i < tail_sorted.len() {
        let v = tail_sorted[i];
        let mut j = i;
        while j + 1 < tail_sorted.len() && tail_sorted[j + 1] == v {
            j += 1;
        }
        let p = (j + 1) as f64 / m;
        ks = ks.max((p - powerlaw_cdf(v, x_min, alpha)).abs());
        i = j + 1;
    }
    ks
}

pub fn fit_powerlaw_tail(samples: &[f64]) -> Result<PowerLawFit, FitError> {
    fit_powerlaw_tail_with(samples, &PowerLawConfig::default())
}

pub fn fit_powerlaw_tail_with(samples: &[f64], cfg: &PowerLawConfig) -> Result<PowerLawFit, FitError> {
    if samples.len() < cfg.min_samples {
        return Err(FitError::TooFewSamples {
            found: samples.len(),
            required: cfg.min_samples,
        });
    }
    if let Some(&bad) = samples.iter().find(|v| !(v.is_finite() && **v > 0.0)) {
        return Err(FitError::InvalidSample(bad));
    }
    let mut xs = samples.to_vec();
    xs.sort_by(f64::total_cmp);
    let n = xs.len();

    // suffix sums of ln x, so each candidate's α is O(1)
    let mut suffix_ln = vec![0.0; n + 1];
    for i in (0..n).rev() {
        suffix_ln[i] = suffix_ln[i + 1] + xs[i].ln();
    }

    // candidate = (value, index of first sample strictly above it)
    let mut candidates: Vec<(f64, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && xs[j + 1] == xs[i] {
            j += 1;
        }
        if n - (j + 1) >= cfg.min_tail {
            candidates.push((xs[i], j + 1));
        }
        i = j + 1;
    }
    if candidates.is_empty() {
        let best_tail = n - xs.iter().take_while(|&&v| v == xs[0]).count();
        return Err(FitError::TailTooSmall {
            found: best_tail,
            required: cfg.min_tail,
        });
    }
    if candidates.len() > cfg.max_candidates {
        let c = candidates.len();
        let k = cfg.max_candidates;
        let mut thinned: Vec<(f64, usize)> = (0..k)
            .map(|r| candidates[((r as f64) * (c - 1) as f64 / (k - 1) as f64).round() as usize])
            .collect();
        thinned.dedup_by(|a, b| a.1 == b.1);
        candidates = thinned;
    }

    let mut best: Option<PowerLawFit> = None;
    for &(x_min, start) in &candidates {
        let tail = &xs[start..];
        let m = tail.len();
        let log_sum = suffix_ln[start] - m as f64 * x_min.ln();
        if log_sum <= 0.0 {
            continue;
        }
        let alpha = 1.0 + m as f64 / log_sum;
        let ks = ks_distance(tail, x_min, alpha);
        if best.as_ref().is_none_or(|b| ks < b.ks) {
            best = Some(PowerLawFit {
                alpha,
                x_min,
                m,
                sigma_hat: (alpha - 1.0) / (m as f64).sqrt(),
                ks,
                n,
                candidates: candidates.len(),
            });
        }
    }
    let best = best.ok_or(FitError::TailTooSmall {
        found: 0,
        required: cfg.min_tail,
    })?;
    if best.m < cfg.min_tail {
        return Err(FitError::TailTooSmall {
            found: best.m,
            required: cfg.min_tail,
        });
    }
    Ok(best)
}
