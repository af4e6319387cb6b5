//! Binned empirical densities.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::json::f17_vec;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PdfError {
    #[error("no samples")]
    EmptySample,
    #[error("sample {value} outside the {domain:?} domain")]
    SampleOutsideDomain { value: f64, domain: Domain },
    #[error("invalid bin specification: {0}")]
    BadBins(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Domain {
    /// (0, 1]
    UnitInterval,
    /// (0, inf)
    PositiveRay,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BinSpec {
    /// `bins` equal-width bins on (0, 1].
    Uniform { bins: usize },
    /// `bins` log-spaced bins on [lo, hi]. `None` bounds are taken from the
    /// sample minimum and maximum.
    LogUniform {
        bins: usize,
        lo: Option<f64>,
        hi: Option<f64>,
    },
}

impl BinSpec {
    pub fn uniform(bins: usize) -> Self {
        BinSpec::Uniform { bins }
    }

    pub fn log_auto(bins: usize) -> Self {
        BinSpec::LogUniform { bins, lo: None, hi: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalPdf {
    pub domain: Domain,
    #[serde(serialize_with = "f17_vec")]
    pub edges: Vec<f64>,
    #[serde(serialize_with = "f17_vec")]
    pub density: Vec<f64>,
    pub counts: Vec<u64>,
    pub count: u64,
}

/// Bin index for a sample on the uniform (0,1] grid. Bins are (a, b]; values
/// that sit on an edge up to rounding go to the lower bin, so exact rationals
/// like 3/10 land where they belong.
fn uniform_bin(v: f64, bins: usize) -> usize {
    let scaled = v * bins as f64;
    let nearest = scaled.round();
    let c = if (scaled - nearest).abs() < 1e-9 * bins as f64 {
        nearest
    } else {
        scaled.ceil()
    };
    (c as usize).clamp(1, bins) - 1
}

impl EmpiricalPdf {
    pub fn accumulate(samples: &[f64], spec: BinSpec) -> Result<Self, PdfError> {
        if samples.is_empty() {
            return Err(PdfError::EmptySample);
        }
        match spec {
            BinSpec::Uniform { bins } => {
                if bins == 0 {
                    return Err(PdfError::BadBins("zero bins"));
                }
                let mut counts = vec![0u64; bins];
                for &v in samples {
                    if !(v > 0.0 && v <= 1.0) {
                        return Err(PdfError::SampleOutsideDomain {
                            value: v,
                            domain: Domain::UnitInterval,
                        });
                    }
                    counts[uniform_bin(v, bins)] += 1;
                }
                let edges = (0..=bins).map(|i| i as f64 / bins as f64).collect();
                Ok(Self::from_counts(Domain::UnitInterval, edges, counts))
            }
            BinSpec::LogUniform { bins, lo, hi } => {
                if bins == 0 {
                    return Err(PdfError::BadBins("zero bins"));
                }
                for &v in samples {
                    if !(v > 0.0 && v.is_finite()) {
                        return Err(PdfError::SampleOutsideDomain {
                            value: v,
                            domain: Domain::PositiveRay,
                        });
                    }
                }
                let min = samples.iter().copied().fold(f64::INFINITY, f64::min);
                let max = samples.iter().copied().fold(0.0, f64::max);
                let mut lo = lo.unwrap_or(min);
                let mut hi = hi.unwrap_or(max);
                if !(lo > 0.0) || hi < lo {
                    return Err(PdfError::BadBins("log bins need 0 < lo <= hi"));
                }
                if hi == lo {
                    lo /= 2.0;
                    hi *= 2.0;
                }
                let ratio = (hi / lo).ln();
                let mut edges: Vec<f64> = (0..=bins)
                    .map(|i| lo * (ratio * i as f64 / bins as f64).exp())
                    .collect();
                edges[0] = lo;
                edges[bins] = hi;
                let mut counts = vec![0u64; bins];
                for &v in samples {
                    if v < lo || v > hi {
                        return Err(PdfError::SampleOutsideDomain {
                            value: v,
                            domain: Domain::PositiveRay,
                        });
                    }
                    let mut i = ((v / lo).ln() / ratio * bins as f64).floor() as usize;
                    i = i.min(bins - 1);
                    // ln/exp rounding can put a value one bin off
                    while i > 0 && v < edges[i] {
                        i -= 1;
                    }
                    while i + 1 < bins && v >= edges[i + 1] {
                        i += 1;
                    }
                    counts[i] += 1;
                }
                Ok(Self::from_counts(Domain::PositiveRay, edges, counts))
            }
        }
    }

    /// Bins samples using an existing set of uniform (0,1] edges.
    pub fn rebin_like(&self, samples: &[f64]) -> Result<Self, PdfError> {
        let bins = self.bins();
        match self.domain {
            Domain::UnitInterval => Self::accumulate(samples, BinSpec::Uniform { bins }),
            Domain::PositiveRay => Self::accumulate(
                samples,
                BinSpec::LogUniform {
                    bins,
                    lo: self.edges.first().copied(),
                    hi: self.edges.last().copied(),
                },
            ),
        }
    }

    pub fn from_counts(domain: Domain, edges: Vec<f64>, counts: Vec<u64>) -> Self {
        let count: u64 = counts.iter().sum();
        let density = counts
            .iter()
            .zip(edges.windows(2))
            .map(|(&c, w)| {
                if count == 0 {
                    0.0
                } else {
                    c as f64 / (count as f64 * (w[1] - w[0]))
                }
            })
            .collect();
        EmpiricalPdf {
            domain,
            edges,
            density,
            counts,
            count,
        }
    }

    pub fn bins(&self) -> usize {
        self.density.len()
    }

    pub fn centers(&self) -> Vec<f64> {
        self.edges
            .windows(2)
            .map(|w| match self.domain {
                Domain::UnitInterval => 0.5 * (w[0] + w[1]),
                Domain::PositiveRay => (w[0] * w[1]).sqrt(),
            })
            .collect()
    }

    pub fn widths(&self) -> Vec<f64> {
        self.edges.windows(2).map(|w| w[1] - w[0]).collect()
    }

    pub fn non_empty_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// Σ density·width; 1 up to rounding whenever `count > 0`.
    pub fn integral(&self) -> f64 {
        self.density
            .iter()
            .zip(self.widths())
            .map(|(d, w)| d * w)
            .sum()
    }

    /// Adds the counts of another pdf with identical edges.
    pub fn merge(&self, other: &EmpiricalPdf) -> Result<Self, PdfError> {
        if self.domain != other.domain || self.edges != other.edges {
            return Err(PdfError::BadBins("cannot merge pdfs with different edges"));
        }
        let counts = self
            .counts
            .iter()
            .zip(&other.counts)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self::from_counts(self.domain, self.edges.clone(), counts))
    }
}
