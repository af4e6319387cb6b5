//! Gamma law truncated to (0, 1], a comparison model for the relative
//! price levels fitted with the same least-squares objective.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::{checked_gamma_lr, ln_gamma};

use super::optimize::nelder_mead;
use super::{check_unit_pdf, near, residuals, FitError};
use crate::json::f17;
use crate::profiles::EmpiricalPdf;

/// Regularized lower incomplete gamma; NaN where statrs rejects the input.
fn lower_reg(shape: f64, x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    checked_gamma_lr(shape, x).unwrap_or(f64::NAN)
}

/// Bounds on ln(shape) and ln(scale).
const LN_SHAPE: (f64, f64) = (-3.0, 4.0);
const LN_SCALE: (f64, f64) = (-7.0, 4.0);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaFit {
    #[serde(serialize_with = "f17")]
    pub shape: f64,
    #[serde(serialize_with = "f17")]
    pub scale: f64,
    /// Mass of the untruncated gamma on (0, 1].
    #[serde(serialize_with = "f17")]
    pub z: f64,
    #[serde(serialize_with = "f17")]
    pub rms: f64,
    #[serde(serialize_with = "f17")]
    pub sse: f64,
    pub at_bound: bool,
    pub iterations: usize,
}

pub fn truncated_gamma_pdf(x: f64, shape: f64, scale: f64) -> f64 {
    if !(x > 0.0 && x <= 1.0) {
        return 0.0;
    }
    let z = lower_reg(shape, 1.0 / scale);
    let ln = (shape - 1.0) * x.ln() - x / scale - ln_gamma(shape) - shape * scale.ln();
    ln.exp() / z
}

fn model(centers: &[f64], shape: f64, scale: f64) -> Vec<f64> {
    centers.iter().map(|&c| truncated_gamma_pdf(c, shape, scale)).collect()
}

pub fn fit_gamma_lsq(pdf: &EmpiricalPdf) -> Result<GammaFit, FitError> {
    check_unit_pdf(pdf)?;
    let centers = pdf.centers();
    let sse = |p: &[f64]| {
        let v = residuals(&model(&centers, p[0].exp(), p[1].exp()), &pdf.density).0;
        if v.is_finite() {
            v
        } else {
            f64::INFINITY
        }
    };

    let mut best = (f64::INFINITY, 0.0, -1.0);
    for i in 0..=28 {
        let a = LN_SHAPE.0 + (LN_SHAPE.1 - LN_SHAPE.0) * i as f64 / 28.0;
        for j in 0..=44 {
            let b = LN_SCALE.0 + (LN_SCALE.1 - LN_SCALE.0) * j as f64 / 44.0;
            let v = sse(&[a, b]);
            if v < best.0 {
                best = (v, a, b);
            }
        }
    }
    let lower = [LN_SHAPE.0, LN_SCALE.0];
    let upper = [LN_SHAPE.1, LN_SCALE.1];
    let m = nelder_mead(sse, &[best.1, best.2], &[0.2, 0.2], &lower, &upper, 1e-8, 5_000);
    if !m.converged || !m.f.is_finite() {
        return Err(FitError::OptimizerDidNotConverge { iterations: m.iterations });
    }
    let (shape, scale) = (m.x[0].exp(), m.x[1].exp());
    let (sse, rms) = residuals(&model(&centers, shape, scale), &pdf.density);
    let at_bound = near(m.x[0], LN_SHAPE.0, 1e-4)
        || near(m.x[0], LN_SHAPE.1, 1e-4)
        || near(m.x[1], LN_SCALE.0, 1e-4)
        || near(m.x[1], LN_SCALE.1, 1e-4);
    Ok(GammaFit {
        shape,
        scale,
        z: lower_reg(shape, 1.0 / scale),
        rms,
        sse,
        at_bound,
        iterations: m.iterations,
    })
}
