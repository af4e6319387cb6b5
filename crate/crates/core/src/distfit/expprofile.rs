//! Saturating exponential queue profile `f(y) = (1 - e^{βy}) / z` on (0, 1].

use serde::{Deserialize, Serialize};

use super::optimize::golden_section;
use super::{check_unit_pdf, near, residuals, FitError};
use crate::json::f17;
use crate::profiles::EmpiricalPdf;

pub const BETA_BOUNDS: (f64, f64) = (-100.0, -0.01);
const GRID: usize = 200;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpProfileFit {
    #[serde(serialize_with = "f17")]
    pub beta: f64,
    #[serde(serialize_with = "f17")]
    pub z: f64,
    #[serde(serialize_with = "f17")]
    pub rms: f64,
    #[serde(serialize_with = "f17")]
    pub sse: f64,
    pub at_bound: bool,
}

/// z = ∫₀¹ (1 - e^{βy}) dy = 1 - (e^β - 1)/β, with a series near zero.
pub fn exp_profile_z(beta: f64) -> f64 {
    if beta.abs() < 1e-4 {
        -beta * (0.5 + beta * (1.0 / 6.0 + beta / 24.0))
    } else {
        1.0 - beta.exp_m1() / beta
    }
}

pub fn exp_profile_pdf(y: f64, beta: f64) -> f64 {
    if !(y > 0.0 && y <= 1.0) {
        return 0.0;
    }
    -(beta * y).exp_m1() / exp_profile_z(beta)
}

/// CDF of the profile on [0, 1].
pub fn exp_profile_cdf(y: f64, beta: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    (y - (beta * y).exp_m1() / beta) / exp_profile_z(beta)
}

fn model(centers: &[f64], beta: f64) -> Vec<f64> {
    centers.iter().map(|&c| exp_profile_pdf(c, beta)).collect()
}

pub fn fit_exp_profile(pdf: &EmpiricalPdf) -> Result<ExpProfileFit, FitError> {
    check_unit_pdf(pdf)?;
    let centers = pdf.centers();
    let sse = |beta: f64| residuals(&model(&centers, beta), &pdf.density).0;

    // log-spaced grid over |β|, then golden section between the neighbours
    let (lo, hi) = (-BETA_BOUNDS.1, -BETA_BOUNDS.0);
    let grid: Vec<f64> = (0..GRID)
        .map(|i| -(lo * (hi / lo).powf(i as f64 / (GRID - 1) as f64)))
        .collect();
    let (mut arg, mut best) = (0, f64::INFINITY);
    for (i, &b) in grid.iter().enumerate() {
        let v = sse(b);
        if v < best {
            best = v;
            arg = i;
        }
    }
    let a = grid[(arg + 1).min(GRID - 1)];
    let b = grid[arg.saturating_sub(1)];
    let (beta, fb) = golden_section(sse, a, b, 1e-8);
    if !fb.is_finite() {
        return Err(FitError::OptimizerDidNotConverge { iterations: GRID });
    }
    let beta = if fb <= best { beta } else { grid[arg] };
    let (sse, rms) = residuals(&model(&centers, beta), &pdf.density);
    Ok(ExpProfileFit {
        beta,
        z: exp_profile_z(beta),
        rms,
        sse,
        at_bound: near(beta, BETA_BOUNDS.0, 1e-4) || near(beta, BETA_BOUNDS.1, 1e-4),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::profiles::Domain;

    #[test]
    fn z_closed_form() {
        let z = exp_profile_z(-30.34);
        assert!((z - (1.0 - 1.0 / 30.34 + (-30.34f64).exp() / 30.34)).abs() < 1e-15);
        assert!((z - 0.96704).abs() < 1e-5);
        // series and closed form agree where both are accurate
        let b = -2e-4;
        assert!((exp_profile_z(b) - (1.0 - b.exp_m1() / b)).abs() < 1e-12);
        assert!(exp_profile_z(-1e-9) > 0.0);
    }

    #[test]
    fn cdf_endpoints() {
        assert_eq!(exp_profile_cdf(0.0, -25.0), 0.0);
        assert!((exp_profile_cdf(1.0, -25.0) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_bin_masses() {
        let beta = -25.0;
        let bins = 50;
        let edges: Vec<f64> = (0..=bins).map(|i| i as f64 / bins as f64).collect();
        let counts = edges
            .windows(2)
            .map(|w| ((exp_profile_cdf(w[1], beta) - exp_profile_cdf(w[0], beta)) * 1e9).round() as u64)
            .collect();
        let pdf = EmpiricalPdf::from_counts(Domain::UnitInterval, edges, counts);
        let fit = fit_exp_profile(&pdf).unwrap();
        assert!((fit.beta - beta).abs() < 1.0, "{fit:?}");
        assert!(fit.beta <= BETA_BOUNDS.1);
    }

    #[test]
    fn flat_density_pins_upper_bound() {
        let edges: Vec<f64> = (0..=50).map(|i| i as f64 / 50.0).collect();
        let pdf = EmpiricalPdf::from_counts(Domain::UnitInterval, edges, vec![100; 50]);
        let fit = fit_exp_profile(&pdf).unwrap();
        assert!(fit.beta <= BETA_BOUNDS.1 && fit.beta >= BETA_BOUNDS.0);
        assert!(fit.beta < -1.0 || fit.at_bound);
    }
}
