//! Log-normal truncated to (0, 1], fitted by least squares to a binned
//! density.

use serde::{Deserialize, Serialize};
use libm::erfc;

use super::optimize::nelder_mead;
use super::{check_unit_pdf, near, residuals, FitError};
use crate::json::{f17, f17_opt};
use crate::profiles::EmpiricalPdf;

pub const MU_BOUNDS: (f64, f64) = (-6.0, 2.0);
pub const SIGMA_BOUNDS: (f64, f64) = (0.05, 4.0);
const XTOL: f64 = 1e-7;
const MAX_ITER: usize = 5_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogNormalFit {
    #[serde(serialize_with = "f17")]
    pub mu: f64,
    #[serde(serialize_with = "f17")]
    pub sigma: f64,
    /// Mass of the untruncated log-normal on (0, 1].
    #[serde(serialize_with = "f17")]
    pub z: f64,
    #[serde(serialize_with = "f17")]
    pub rms: f64,
    #[serde(serialize_with = "f17")]
    pub sse: f64,
    pub at_bound: bool,
    pub iterations: usize,
    #[serde(serialize_with = "f17_opt")]
    pub p_value: Option<f64>,
}

/// z = P(ln X <= 0) = Φ(-μ/σ).
pub fn lognormal_z(mu: f64, sigma: f64) -> f64 {
    0.5 * erfc(mu / (sigma * std::f64::consts::SQRT_2))
}

pub fn truncated_lognormal_pdf(x: f64, mu: f64, sigma: f64) -> f64 {
    if !(x > 0.0 && x <= 1.0) {
        return 0.0;
    }
    lognormal_density(x.ln(), x, mu, sigma) / lognormal_z(mu, sigma)
}

fn lognormal_density(ln_x: f64, x: f64, mu: f64, sigma: f64) -> f64 {
    let u = (ln_x - mu) / sigma;
    (-0.5 * u * u).exp() / ((2.0 * std::f64::consts::PI).sqrt() * sigma * x)
}

/// Binned least-squares objective with precomputed bin centers.
pub(crate) struct LogNormalObjective<'a> {
    centers: Vec<f64>,
    ln_centers: Vec<f64>,
    density: &'a [f64],
}

impl<'a> LogNormalObjective<'a> {
    pub(crate) fn new(pdf: &'a EmpiricalPdf) -> Self {
        let centers = pdf.centers();
        let ln_centers = centers.iter().map(|c| c.ln()).collect();
        LogNormalObjective {
            centers,
            ln_centers,
            density: &pdf.density,
        }
    }

    fn model(&self, mu: f64, sigma: f64) -> Vec<f64> {
        let z = lognormal_z(mu, sigma);
        self.centers
            .iter()
            .zip(&self.ln_centers)
            .map(|(&c, &lc)| lognormal_density(lc, c, mu, sigma) / z)
            .collect()
    }

    pub(crate) fn sse(&self, mu: f64, sigma: f64) -> f64 {
        let z = lognormal_z(mu, sigma);
        let k = 1.0 / ((2.0 * std::f64::consts::PI).sqrt() * sigma * z);
        let inv2s2 = 0.5 / (sigma * sigma);
        let mut sse = 0.0;
        for ((&c, &lc), &d) in self.centers.iter().zip(&self.ln_centers).zip(self.density) {
            let u = lc - mu;
            let m = k * (-u * u * inv2s2).exp() / c;
            sse += (m - d) * (m - d);
        }
        sse
    }
}

pub fn fit_lognormal_lsq(pdf: &EmpiricalPdf) -> Result<LogNormalFit, FitError> {
    check_unit_pdf(pdf)?;
    let obj = LogNormalObjective::new(pdf);

    // coarse grid, then a bounded simplex refinement
    let mut best = (f64::INFINITY, -2.0, 1.0);
    let sigma_steps = 24;
    for i in 0..=32 {
        let mu = MU_BOUNDS.0 + (MU_BOUNDS.1 - MU_BOUNDS.0) * i as f64 / 32.0;
        for j in 0..=sigma_steps {
            let sigma = SIGMA_BOUNDS.0
                * (SIGMA_BOUNDS.1 / SIGMA_BOUNDS.0).powf(j as f64 / sigma_steps as f64);
            let v = obj.sse(mu, sigma);
            if v < best.0 {
                best = (v, mu, sigma);
            }
        }
    }
    let lower = [MU_BOUNDS.0, SIGMA_BOUNDS.0];
    let upper = [MU_BOUNDS.1, SIGMA_BOUNDS.1];
    let f = |p: &[f64]| obj.sse(p[0], p[1]);
    let first = nelder_mead(f, &[best.1, best.2], &[0.25, 0.2 * best.2], &lower, &upper, XTOL, MAX_ITER);
    if !first.converged {
        return Err(FitError::OptimizerDidNotConverge { iterations: first.iterations });
    }
    // restart from the optimum in case the simplex collapsed early
    let again = nelder_mead(f, &first.x, &[0.05, 0.05 * first.x[1]], &lower, &upper, XTOL, MAX_ITER);
    let iterations = first.iterations + again.iterations;
    if !again.converged {
        return Err(FitError::OptimizerDidNotConverge { iterations });
    }
    let m = if again.f <= first.f { again } else { first };
    let (mu, sigma) = (m.x[0], m.x[1]);
    let (sse, rms) = residuals(&obj.model(mu, sigma), &pdf.density);
    let at_bound = near(mu, MU_BOUNDS.0, 1e-4)
        || near(mu, MU_BOUNDS.1, 1e-4)
        || near(sigma, SIGMA_BOUNDS.0, 1e-4)
        || near(sigma, SIGMA_BOUNDS.1, 1e-4);
    Ok(LogNormalFit {
        mu,
        sigma,
        z: lognormal_z(mu, sigma),
        rms,
        sse,
        at_bound,
        iterations,
        p_value: None,
    })
}
