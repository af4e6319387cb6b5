//! Parametric fits of the cancellation profiles.
//!
//! * truncated log-normal on (0, 1] for relative price levels, fitted by
//!   least squares on binned densities, with a Monte Carlo p-value;
//! * power-law tail for normalized levels, threshold chosen by a KS scan and
//!   exponent by maximum likelihood;
//! * saturating exponential `(1 - e^{βy}) / z` for relative queue positions;
//! * truncated gamma as a comparison model for the relative levels.

pub mod expprofile;
pub mod gamma;
pub mod gof;
pub mod lognormal;
pub mod optimize;
pub mod powerlaw;
pub mod sample;

use thiserror::Error;

use crate::profiles::{Domain, EmpiricalPdf};

pub use expprofile::{exp_profile_pdf, exp_profile_z, fit_exp_profile, ExpProfileFit};
pub use gamma::{fit_gamma_lsq, GammaFit};
pub use gof::{gof_pvalue_mc, GofResult};
pub use lognormal::{fit_lognormal_lsq, lognormal_z, truncated_lognormal_pdf, LogNormalFit};
pub use powerlaw::{fit_powerlaw_tail, PowerLawConfig, PowerLawFit};

/// Minimum number of occupied bins for any binned fit.
pub const MIN_NONEMPTY_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FitError {
    #[error("only {found} non-empty bins, need {required}")]
    TooFewBins { found: usize, required: usize },
    #[error("optimizer did not converge after {iterations} iterations")]
    OptimizerDidNotConverge { iterations: usize },
    #[error("only {found} samples, need {required}")]
    TooFewSamples { found: usize, required: usize },
    #[error("best threshold leaves {found} tail points, need {required}")]
    TailTooSmall { found: usize, required: usize },
    #[error("pdf must be on {expected:?}")]
    WrongDomain { expected: Domain },
    #[error("invalid sample {0}")]
    InvalidSample(f64),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub(crate) fn check_unit_pdf(pdf: &EmpiricalPdf) -> Result<(), FitError> {
    if pdf.domain != Domain::UnitInterval {
        return Err(FitError::WrongDomain {
            expected: Domain::UnitInterval,
        });
    }
    let found = pdf.non_empty_bins();
    if found < MIN_NONEMPTY_BINS {
        return Err(FitError::TooFewBins {
            found,
            required: MIN_NONEMPTY_BINS,
        });
    }
    Ok(())
}

/// Sum of squared residuals and r.m.s. residual of a model evaluated at bin
/// centers.
pub(crate) fn residuals(model: &[f64], density: &[f64]) -> (f64, f64) {
    let sse: f64 = model
        .iter()
        .zip(density)
        .map(|(m, d)| (m - d) * (m - d))
        .sum();
    (sse, (sse / density.len() as f64).sqrt())
}

pub(crate) fn near(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}
