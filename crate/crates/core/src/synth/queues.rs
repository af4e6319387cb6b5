use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::json::{f17, SCHEMA_VERSION};
use crate::profiles::{BinSpec, EmpiricalPdf};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct QueueSimConfig {
    pub n_queues: u64,
    /// Queue lengths are uniform on 1..=max_len.
    pub max_len: u32,
    pub seed: u64,
    pub bins: usize,
}

impl Default for QueueSimConfig {
    fn default() -> Self {
        QueueSimConfig {
            n_queues: 1_000_000,
            max_len: 100,
            seed: 0,
            bins: 50,
        }
    }
}

/// Mass at the reduced fraction `num/den`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointMass {
    pub num: u32,
    pub den: u32,
    #[serde(serialize_with = "f17")]
    pub y: f64,
    pub count: u64,
    #[serde(serialize_with = "f17")]
    pub probability: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QueueSimResult {
    pub schema_version: u32,
    pub config: QueueSimConfig,
    /// Sorted by y.
    pub point_masses: Vec<PointMass>,
    pub pdf: EmpiricalPdf,
}

impl QueueSimResult {
    pub fn mass_at(&self, num: u32, den: u32) -> f64 {
        let g = gcd(num, den);
        self.point_masses
            .iter()
            .find(|p| p.num == num / g && p.den == den / g)
            .map_or(0.0, |p| p.probability)
    }

    /// Point masses ordered by decreasing probability; ties by y.
    pub fn largest(&self, k: usize) -> Vec<&PointMass> {
        let mut v: Vec<&PointMass> = self.point_masses.iter().collect();
        v.sort_by(|a, b| b.count.cmp(&a.count).then(a.y.total_cmp(&b.y)));
        v.truncate(k);
        v
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("queue result serializes")
    }
}

fn gcd(mut a: u32, mut b: u32) -> u32 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Draws a length n uniformly on 1..=max_len and a position uniformly on
/// 1..=n for every queue, and tabulates Y = y/n.
pub fn simulate_uniform_queues(cfg: &QueueSimConfig) -> Result<QueueSimResult, SynthError> {
    if cfg.n_queues == 0 {
        return Err(SynthError::ConfigInvalid("n_queues must be at least 1".into()));
    }
    if cfg.max_len == 0 {
        return Err(SynthError::ConfigInvalid("max_len must be at least 1".into()));
    }
    if cfg.bins == 0 {
        return Err(SynthError::ConfigInvalid("bins must be at least 1".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut table: BTreeMap<(u32, u32), u64> = BTreeMap::new();
    let mut ys = Vec::with_capacity(cfg.n_queues as usize);
    for _ in 0..cfg.n_queues {
        let n = rng.random_range(1..=cfg.max_len);
        let y = rng.random_range(1..=n);
        let g = gcd(y, n);
        *table.entry((y / g, n / g)).or_default() += 1;
        ys.push(y as f64 / n as f64);
    }
    let pdf = EmpiricalPdf::accumulate(&ys, BinSpec::uniform(cfg.bins))
        .map_err(|e| SynthError::ConfigInvalid(e.to_string()))?;
    let total = cfg.n_queues as f64;
    let mut point_masses: Vec<PointMass> = table
        .into_iter()
        .map(|((num, den), count)| PointMass {
            num,
            den,
            y: num as f64 / den as f64,
            count,
            probability: count as f64 / total,
        })
        .collect();
    point_masses.sort_by(|a, b| a.y.total_cmp(&b.y));
    Ok(QueueSimResult {
        schema_version: SCHEMA_VERSION,
        config: cfg.clone(),
        point_masses,
        pdf,
    })
}
