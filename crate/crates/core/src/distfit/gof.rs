//! Monte Carlo goodness of fit for the truncated log-normal: refit on
//! samples drawn from the fitted model and compare r.m.s. residuals.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::lognormal::{fit_lognormal_lsq, LogNormalFit};
use super::sample::{sample_truncated_lognormal, sub_seed};
use super::FitError;
use crate::json::f17;
use crate::profiles::EmpiricalPdf;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofResult {
    #[serde(serialize_with = "f17")]
    pub p_value: f64,
    pub repeats: usize,
    /// Synthetic replicates with rms at least the empirical one.
    pub exceed: usize,
    /// Replicates whose refit failed; these count as exceedances.
    pub failed_refits: usize,
    #[serde(serialize_with = "f17")]
    pub empirical_rms: f64,
}

/// Replicate `r` uses its own generator seeded from `sub_seed(seed, r)`, so
/// the result does not depend on how work is scheduled.
pub fn gof_pvalue_mc(
    pdf: &EmpiricalPdf,
    fit: &LogNormalFit,
    repeats: usize,
    seed: u64,
) -> Result<GofResult, FitError> {
    if repeats == 0 {
        return Err(FitError::InvalidArgument("repeats must be at least 1"));
    }
    if pdf.count == 0 {
        return Err(FitError::InvalidArgument("pdf has no samples"));
    }
    let n = pdf.count as usize;
    let outcomes: Vec<Option<f64>> = (0..repeats as u64)
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(seed, r));
            let xs = sample_truncated_lognormal(&mut rng, fit.mu, fit.sigma, n);
            let synth = pdf.rebin_like(&xs).ok()?;
            fit_lognormal_lsq(&synth).ok().map(|f| f.rms)
        })
        .collect();
    let failed_refits = outcomes.iter().filter(|o| o.is_none()).count();
    let exceed = outcomes
        .iter()
        .filter(|o| o.is_none_or(|rms| rms >= fit.rms))
        .count();
    Ok(GofResult {
        p_value: exceed as f64 / repeats as f64,
        repeats,
        exceed,
        failed_refits,
        empirical_rms: fit.rms,
    })
}
