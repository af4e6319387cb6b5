//! Profile accumulation and the `profiles.json` / `cancels.csv` artifacts.

use std::collections::BTreeMap;
use std::io::{self, Write};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::pdf::{BinSpec, EmpiricalPdf};
use super::replay::{DayReplay, ReplayDiagnostics};
use super::{ratio_counts, side_slot, SideRatioCounts, SideRatios};
use crate::json::{f17_vec, format17, SCHEMA_VERSION};
use crate::lobengine::CancellationRecord;
use crate::orderflow::Side;

pub const ENSEMBLE: &str = "ENSEMBLE";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProfilesConfig {
    pub unit_bins: usize,
    pub log_bins: usize,
}

impl Default for ProfilesConfig {
    fn default() -> Self {
        ProfilesConfig {
            unit_bins: 50,
            log_bins: 60,
        }
    }
}

#[derive(Debug, Clone, Default)]
struct SideSamples {
    rel_level: Vec<f64>,
    norm_level: Vec<f64>,
    rel_queue: Vec<f64>,
    ratios: SideRatioCounts,
}

/// Per-instrument (or pooled) accumulator. Merging is plain concatenation of
/// samples and addition of counters, so any merge order gives the same
/// profiles.
#[derive(Debug, Clone, Default)]
pub struct ProfileAccumulator {
    sides: [SideSamples; 2],
    pub days: u64,
    pub diagnostics: ReplayDiagnostics,
}

impl ProfileAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_records(&mut self, records: &[CancellationRecord]) {
        for rec in records {
            let s = &mut self.sides[side_slot(rec.side)];
            s.rel_level.push(rec.rel_level);
            s.norm_level.push(rec.norm_level);
            s.rel_queue.push(rec.rel_queue_pos);
        }
    }

    pub fn add_day(&mut self, day: &DayReplay) {
        self.add_records(&day.records);
        let counts = ratio_counts(&day.lifecycles, day.diagnostics.dangling());
        for (s, c) in self.sides.iter_mut().zip(counts.iter()) {
            s.ratios.merge(c);
        }
        self.diagnostics.merge(&day.diagnostics);
        self.days += 1;
    }

    pub fn merge(&mut self, other: &ProfileAccumulator) {
        for (a, b) in self.sides.iter_mut().zip(&other.sides) {
            a.rel_level.extend_from_slice(&b.rel_level);
            a.norm_level.extend_from_slice(&b.norm_level);
            a.rel_queue.extend_from_slice(&b.rel_queue);
            a.ratios.merge(&b.ratios);
        }
        self.days += other.days;
        self.diagnostics.merge(&other.diagnostics);
    }

    pub fn rel_levels(&self, side: Side) -> &[f64] {
        &self.sides[side_slot(side)].rel_level
    }

    pub fn norm_levels(&self, side: Side) -> &[f64] {
        &self.sides[side_slot(side)].norm_level
    }

    pub fn rel_queue_positions(&self, side: Side) -> &[f64] {
        &self.sides[side_slot(side)].rel_queue
    }

    pub fn ratios(&self, side: Side) -> SideRatios {
        SideRatios::from_counts(side, &self.sides[side_slot(side)].ratios)
    }

    pub fn entry(&self, instrument: &str, side: Side, cfg: &ProfilesConfig) -> ProfileEntry {
        let s = &self.sides[side_slot(side)];
        let unit = BinSpec::uniform(cfg.unit_bins);
        let pdf = |v: &[f64], spec| EmpiricalPdf::accumulate(v, spec).ok();
        let mut xhat = s.norm_level.clone();
        xhat.sort_by(f64::total_cmp);
        ProfileEntry {
            instrument: instrument.to_string(),
            side,
            counts: ProfileCounts {
                cancellations: s.rel_level.len() as u64,
                orders: s.ratios.all.orders,
                days: self.days,
            },
            class_ratios: self.ratios(side),
            pdf_x: pdf(&s.rel_level, unit),
            pdf_xhat: pdf(&s.norm_level, BinSpec::log_auto(cfg.log_bins)),
            pdf_y: pdf(&s.rel_queue, unit),
            xhat_samples: xhat,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileCounts {
    pub cancellations: u64,
    pub orders: u64,
    pub days: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileEntry {
    pub instrument: String,
    pub side: Side,
    pub counts: ProfileCounts,
    pub class_ratios: SideRatios,
    #[serde(rename = "pdf_X")]
    pub pdf_x: Option<EmpiricalPdf>,
    #[serde(rename = "pdf_Xhat")]
    pub pdf_xhat: Option<EmpiricalPdf>,
    #[serde(rename = "pdf_Y")]
    pub pdf_y: Option<EmpiricalPdf>,
    /// Raw X̂ values, ascending; the tail fit works on these.
    #[serde(rename = "samples_Xhat", serialize_with = "f17_vec")]
    pub xhat_samples: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DayDiagnostics {
    pub instrument: String,
    pub date: NaiveDate,
    #[serde(flatten)]
    pub diagnostics: ReplayDiagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfilesMeta {
    pub unit_bins: usize,
    pub log_bins: usize,
    /// How the ensemble pools instruments.
    pub pooling: String,
    pub call_phase: String,
}

/// Contents of `profiles.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProfileSet {
    pub schema_version: u32,
    pub config: ProfilesMeta,
    pub profiles: Vec<ProfileEntry>,
    pub diagnostics: Vec<DayDiagnostics>,
}

impl ProfileSet {
    /// Builds entries for every instrument (sorted by code) and, when there
    /// is more than one instrument, a pooled ensemble entry per side.
    pub fn build(days: &[DayReplay], cfg: &ProfilesConfig) -> ProfileSet {
        let mut per_inst: BTreeMap<&str, ProfileAccumulator> = BTreeMap::new();
        let mut diagnostics = Vec::new();
        for d in days {
            per_inst.entry(d.day.instrument.as_str()).or_default().add_day(d);
            diagnostics.push(DayDiagnostics {
                instrument: d.day.instrument.clone(),
                date: d.day.date,
                diagnostics: d.diagnostics.clone(),
            });
        }
        diagnostics.sort_by(|a, b| (&a.instrument, a.date).cmp(&(&b.instrument, b.date)));
        Self::from_accumulators(&per_inst, diagnostics, cfg)
    }

    pub fn from_accumulators(
        per_inst: &BTreeMap<&str, ProfileAccumulator>,
        diagnostics: Vec<DayDiagnostics>,
        cfg: &ProfilesConfig,
    ) -> ProfileSet {
        let mut profiles = Vec::new();
        for (inst, acc) in per_inst {
            for side in Side::BOTH {
                profiles.push(acc.entry(inst, side, cfg));
            }
        }
        if per_inst.len() > 1 {
            let mut pooled = ProfileAccumulator::new();
            for acc in per_inst.values() {
                pooled.merge(acc);
            }
            for side in Side::BOTH {
                profiles.push(pooled.entry(ENSEMBLE, side, cfg));
            }
        }
        ProfileSet {
            schema_version: SCHEMA_VERSION,
            config: ProfilesMeta {
                unit_bins: cfg.unit_bins,
                log_bins: cfg.log_bins,
                pooling: "by_sample".into(),
                call_phase: "held_then_flushed_at_open".into(),
            },
            profiles,
            diagnostics,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("profile set serializes")
    }

    pub fn entry(&self, instrument: &str, side: Side) -> Option<&ProfileEntry> {
        self.profiles
            .iter()
            .find(|e| e.instrument == instrument && e.side == side)
    }
}

pub const CANCELS_HEADER: &str =
    "instrument,date,t,seq,order_id,side,x,L,n_x,N_total,y,X,X_hat,Y,cancelled_size";

/// Writes cancellation records of several instrument-days as flat CSV.
pub fn write_cancels_csv<W: Write>(days: &[DayReplay], mut out: W) -> io::Result<()> {
    writeln!(out, "{CANCELS_HEADER}")?;
    for d in days {
        for r in &d.records {
            writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                d.day.instrument,
                d.day.date,
                r.t,
                r.seq,
                r.order_id,
                r.side,
                r.level,
                r.book_levels,
                r.level_orders,
                r.side_orders,
                r.queue_pos,
                format17(r.rel_level),
                format17(r.norm_level),
                format17(r.rel_queue_pos),
                r.cancelled_size
            )?;
        }
    }
    Ok(())
}
