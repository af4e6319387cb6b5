//! Replays one instrument-day through the book and collects cancellation
//! records and order lifecycles.
//!
//! Orders that arrive during the opening call or the cool period are held
//! and flushed into the book, in arrival order, just before the first
//! continuous-auction event. Whatever they do during the flush (fills,
//! cancels) is not profiled. Events at lunch or outside the session are
//! skipped and only counted.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{classify_order, side_slot, OrderLifecycle, SubmissionContext};
use crate::lobengine::{CancellationRecord, EngineError, LimitOrderBook};
use crate::orderflow::{DayKey, EventKind, OrderEvent};

#[derive(Debug, Error)]
pub enum ReplayError {
    #[error("event seq {seq}: {source}")]
    Engine { seq: u64, source: EngineError },
    #[error("event seq {seq} belongs to {found:?}, replay is for {expected:?}")]
    MixedDays {
        seq: u64,
        expected: DayKey,
        found: DayKey,
    },
    #[error("empty event sequence")]
    Empty,
}

impl ReplayError {
    /// True for failures that point at a bug rather than at the input.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            ReplayError::Engine {
                source: EngineError::CrossedBookInvariantViolation { .. } | EngineError::BadRecord(_),
                ..
            }
        )
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReplayDiagnostics {
    pub events: u64,
    pub call_phase_events: u64,
    /// Cancels applied while flushing the call-phase queue.
    pub call_phase_cancels: u64,
    pub out_of_session_events: u64,
    pub trades: u64,
    pub dangling_cancels_buy: u64,
    pub dangling_cancels_sell: u64,
    /// Dangling cancels whose order had existed but was already filled.
    pub dangling_after_fill: u64,
    /// Cancels asking for more than the order's remaining size.
    pub rejected_cancels: u64,
    /// Continuous-auction cancels of orders entered during the call phase.
    pub cancels_of_call_phase_orders: u64,
}

impl ReplayDiagnostics {
    pub fn merge(&mut self, o: &ReplayDiagnostics) {
        self.events += o.events;
        self.call_phase_events += o.call_phase_events;
        self.call_phase_cancels += o.call_phase_cancels;
        self.out_of_session_events += o.out_of_session_events;
        self.trades += o.trades;
        self.dangling_cancels_buy += o.dangling_cancels_buy;
        self.dangling_cancels_sell += o.dangling_cancels_sell;
        self.dangling_after_fill += o.dangling_after_fill;
        self.rejected_cancels += o.rejected_cancels;
        self.cancels_of_call_phase_orders += o.cancels_of_call_phase_orders;
    }

    pub fn dangling(&self) -> [u64; 2] {
        [self.dangling_cancels_buy, self.dangling_cancels_sell]
    }
}

#[derive(Debug, Clone)]
pub struct DayReplay {
    pub day: DayKey,
    /// Continuous-auction cancellations, in event order.
    pub records: Vec<CancellationRecord>,
    pub lifecycles: Vec<OrderLifecycle>,
    pub diagnostics: ReplayDiagnostics,
    pub book: LimitOrderBook,
}

struct Replayer {
    book: LimitOrderBook,
    records: Vec<CancellationRecord>,
    lifecycles: Vec<OrderLifecycle>,
    by_id: HashMap<u64, usize>,
    diag: ReplayDiagnostics,
}

impl Replayer {
    fn step(&mut self, ev: &OrderEvent, continuous: bool) -> Result<(), ReplayError> {
        let wrap = |source| ReplayError::Engine { seq: ev.seq, source };
        match ev.kind {
            EventKind::SubmitLimit | EventKind::SubmitMarketable => {
                let same_best = self.book.best(ev.side);
                let opposite_best = self.book.best(ev.side.opposite());
                let out = self.book.apply_event(ev).map_err(wrap)?;
                self.diag.trades += out.trades.len() as u64;
                let ctx = SubmissionContext {
                    side: ev.side,
                    price_ticks: ev.price_ticks,
                    same_best,
                    opposite_best,
                    filled_on_arrival: out.filled(),
                    rested: out.rested.is_some(),
                };
                self.by_id.insert(ev.order_id, self.lifecycles.len());
                self.lifecycles.push(OrderLifecycle {
                    order_id: ev.order_id,
                    side: ev.side,
                    class: classify_order(&ctx),
                    continuous,
                    marketable: ev.kind == EventKind::SubmitMarketable,
                    cancelled: false,
                    cancels: 0,
                });
            }
            EventKind::Cancel => match self.book.apply_event(ev) {
                Ok(out) => {
                    let rec = out.cancellation.expect("cancels yield a record");
                    if let Some(&i) = self.by_id.get(&ev.order_id) {
                        let lc = &mut self.lifecycles[i];
                        lc.cancelled = true;
                        lc.cancels += 1;
                        if continuous && !lc.continuous {
                            self.diag.cancels_of_call_phase_orders += 1;
                        }
                    }
                    if continuous {
                        self.records.push(rec);
                    } else {
                        self.diag.call_phase_cancels += 1;
                    }
                }
                Err(EngineError::DanglingCancel(id)) => {
                    if self.by_id.contains_key(&id) {
                        self.diag.dangling_after_fill += 1;
                    }
                    match side_slot(ev.side) {
                        0 => self.diag.dangling_cancels_buy += 1,
                        _ => self.diag.dangling_cancels_sell += 1,
                    }
                }
                Err(EngineError::CancelExceedsRemaining { .. }) => self.diag.rejected_cancels += 1,
                Err(e) => return Err(wrap(e)),
            },
        }
        Ok(())
    }
}

/// Replays a single instrument-day. All events must share one `DayKey`.
pub fn replay_day(events: &[OrderEvent]) -> Result<DayReplay, ReplayError> {
    let first = events.first().ok_or(ReplayError::Empty)?;
    let day = first.day();
    let mut r = Replayer {
        book: LimitOrderBook::new(),
        records: Vec::new(),
        lifecycles: Vec::new(),
        by_id: HashMap::new(),
        diag: ReplayDiagnostics::default(),
    };
    let mut held: Vec<&OrderEvent> = Vec::new();
    let mut flushed = false;

    for ev in events {
        if ev.instrument != day.instrument || ev.timestamp.date() != day.date {
            return Err(ReplayError::MixedDays {
                seq: ev.seq,
                expected: day,
                found: ev.day(),
            });
        }
        r.diag.events += 1;
        let phase = ev.phase();
        if phase.is_call() && !flushed {
            r.diag.call_phase_events += 1;
            held.push(ev);
            continue;
        }
        if !phase.is_continuous() {
            r.diag.out_of_session_events += 1;
            continue;
        }
        if !flushed {
            for h in held.drain(..) {
                r.step(h, false)?;
            }
            flushed = true;
        }
        r.step(ev, true)?;
    }
    for h in held.drain(..) {
        r.step(h, false)?;
    }

    Ok(DayReplay {
        day,
        records: r.records,
        lifecycles: r.lifecycles,
        diagnostics: r.diag,
        book: r.book,
    })
}
