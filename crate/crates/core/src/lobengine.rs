//! Price-time priority limit-order book.
//!
//! The buy ladder is kept best-first (descending price), the sell ladder
//! best-first (ascending price). Each level is a FIFO queue. Cancellations
//! are measured before the cancelled quantity is removed, so the cancelled
//! order is still counted in its level.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::ops::Bound;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::orderflow::{EventKind, OrderEvent, Side};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EngineError {
    #[error("cancel of unknown or already removed order {0}")]
    DanglingCancel(u64),
    #[error("cancel of {requested} exceeds remaining {remaining} on order {order_id}")]
    CancelExceedsRemaining {
        order_id: u64,
        requested: u64,
        remaining: u64,
    },
    #[error("order {0} is already resting")]
    DuplicateOrderId(u64),
    #[error("invalid submission: {0}")]
    InvalidEvent(&'static str),
    #[error("no {side} level at price {price_ticks}")]
    UnknownLevel { side: Side, price_ticks: u64 },
    #[error("order {0} is not resting")]
    UnknownOrder(u64),
    #[error("book crossed at rest: bid {bid} >= ask {ask}")]
    CrossedBookInvariantViolation { bid: u64, ask: u64 },
    #[error("invalid cancellation record: {0}")]
    BadRecord(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RestingOrder {
    pub order_id: u64,
    pub side: Side,
    pub price_ticks: u64,
    pub remaining_size: u64,
    pub arrival_seq: u64,
}

#[derive(Debug, Clone)]
pub struct PriceLevel {
    pub price_ticks: u64,
    pub queue: VecDeque<RestingOrder>,
}

impl PriceLevel {
    pub fn len(&self) -> usize {
        self.queue.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queue.is_empty()
    }

    pub fn volume(&self) -> u64 {
        self.queue.iter().map(|o| o.remaining_size).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trade {
    pub maker_id: u64,
    pub taker_id: u64,
    pub price_ticks: u64,
    pub size: u64,
}

/// Position coordinates of one cancellation, captured before removal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CancellationRecord {
    /// Event-time index: 1 for the first cancellation of the book, +1 each.
    pub t: u64,
    pub seq: u64,
    pub order_id: u64,
    pub side: Side,
    /// Price-level rank, 1 = best.
    pub level: usize,
    /// Number of occupied levels on that side.
    pub book_levels: usize,
    /// Orders queued at the level, the cancelled one included.
    pub level_orders: usize,
    /// Orders resting on the whole side.
    pub side_orders: usize,
    /// FIFO position within the level, 1 = front.
    pub queue_pos: usize,
    pub rel_level: f64,
    pub norm_level: f64,
    pub rel_queue_pos: f64,
    pub cancelled_size: u64,
}

impl CancellationRecord {
    /// Builds a record and derives X = x/L, X̂ = X·N/n and Y = y/n.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        t: u64,
        seq: u64,
        order_id: u64,
        side: Side,
        level: usize,
        book_levels: usize,
        level_orders: usize,
        side_orders: usize,
        queue_pos: usize,
        cancelled_size: u64,
    ) -> Result<Self, EngineError> {
        if level == 0 || level > book_levels {
            return Err(EngineError::BadRecord("level outside 1..=L"));
        }
        if queue_pos == 0 || queue_pos > level_orders {
            return Err(EngineError::BadRecord("queue position outside 1..=n"));
        }
        if side_orders < level_orders {
            return Err(EngineError::BadRecord("side total below level count"));
        }
        let rel_level = level as f64 / book_levels as f64;
        Ok(CancellationRecord {
            t,
            seq,
            order_id,
            side,
            level,
            book_levels,
            level_orders,
            side_orders,
            queue_pos,
            rel_level,
            norm_level: relative_to_normalized(rel_level, level_orders, side_orders),
            rel_queue_pos: queue_pos as f64 / level_orders as f64,
            cancelled_size,
        })
    }
}

/// X̂ = X / (n / N).
pub fn relative_to_normalized(rel_level: f64, level_orders: usize, side_orders: usize) -> f64 {
    rel_level * side_orders as f64 / level_orders as f64
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ApplyOutcome {
    pub trades: Vec<Trade>,
    pub cancellation: Option<CancellationRecord>,
    /// Set when (part of) a submission was left resting.
    pub rested: Option<u64>,
    /// Quantity that rested, zero for cancels and fully filled submissions.
    pub rested_size: u64,
}

impl ApplyOutcome {
    pub fn filled(&self) -> u64 {
        self.trades.iter().map(|t| t.size).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DepthSnapshot {
    pub levels: usize,
    pub total_orders: usize,
    pub queue_lengths: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QueueEntryDump {
    pub order_id: u64,
    pub remaining_size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelDump {
    pub price_ticks: u64,
    pub queue: Vec<QueueEntryDump>,
}

/// JSON-friendly view of the book, best level first on each side.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct BookDump {
    pub buy: Vec<LevelDump>,
    pub sell: Vec<LevelDump>,
}

#[derive(Debug, Clone, Default)]
pub struct LimitOrderBook {
    bids: BTreeMap<u64, PriceLevel>,
    asks: BTreeMap<u64, PriceLevel>,
    index: HashMap<u64, (Side, u64)>,
    order_counts: [usize; 2],
    arrivals: u64,
    cancellations: u64,
}

fn side_idx(side: Side) -> usize {
    match side {
        Side::Buy => 0,
        Side::Sell => 1,
    }
}

impl LimitOrderBook {
    pub fn new() -> Self {
        Self::default()
    }

    fn ladder(&self, side: Side) -> &BTreeMap<u64, PriceLevel> {
        match side {
            Side::Buy => &self.bids,
            Side::Sell => &self.asks,
        }
    }

    fn ladder_mut(&mut self, side: Side) -> &mut BTreeMap<u64, PriceLevel> {
        match side {
            Side::Buy => &mut self.bids,
            Side::Sell => &mut self.asks,
        }
    }

    pub fn best_bid(&self) -> Option<u64> {
        self.bids.keys().next_back().copied()
    }

    pub fn best_ask(&self) -> Option<u64> {
        self.asks.keys().next().copied()
    }

    pub fn best(&self, side: Side) -> Option<u64> {
        match side {
            Side::Buy => self.best_bid(),
            Side::Sell => self.best_ask(),
        }
    }

    /// Worst (deepest) occupied price on a side.
    pub fn worst(&self, side: Side) -> Option<u64> {
        match side {
            Side::Buy => self.bids.keys().next().copied(),
            Side::Sell => self.asks.keys().next_back().copied(),
        }
    }

    /// Levels of one side in priority order.
    pub fn levels(&self, side: Side) -> Box<dyn Iterator<Item = &PriceLevel> + '_> {
        match side {
            Side::Buy => Box::new(self.bids.values().rev()),
            Side::Sell => Box::new(self.asks.values()),
        }
    }

    /// The level at 1-based rank `x`.
    pub fn level_at(&self, side: Side, x: usize) -> Option<&PriceLevel> {
        if x == 0 {
            return None;
        }
        self.levels(side).nth(x - 1)
    }

    pub fn level_count(&self, side: Side) -> usize {
        self.ladder(side).len()
    }

    pub fn order_count(&self, side: Side) -> usize {
        self.order_counts[side_idx(side)]
    }

    pub fn resting_volume(&self, side: Side) -> u64 {
        self.ladder(side).values().map(PriceLevel::volume).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.index.is_empty()
    }

    pub fn contains(&self, order_id: u64) -> bool {
        self.index.contains_key(&order_id)
    }

    pub fn order(&self, order_id: u64) -> Option<&RestingOrder> {
        let (side, price) = self.index.get(&order_id)?;
        self.ladder(*side)
            .get(price)?
            .queue
            .iter()
            .find(|o| o.order_id == order_id)
    }

    /// Event-time index of the most recent cancellation (0 before any).
    pub fn cancellations(&self) -> u64 {
        self.cancellations
    }

    pub fn level_rank(&self, side: Side, price_ticks: u64) -> Result<usize, EngineError> {
        let ladder = self.ladder(side);
        if !ladder.contains_key(&price_ticks) {
            return Err(EngineError::UnknownLevel { side, price_ticks });
        }
        let ahead = match side {
            Side::Buy => ladder
                .range((Bound::Excluded(price_ticks), Bound::Unbounded))
                .count(),
            Side::Sell => ladder.range(..price_ticks).count(),
        };
        Ok(ahead + 1)
    }

    pub fn queue_position(&self, order_id: u64) -> Result<usize, EngineError> {
        let (side, price) = self
            .index
            .get(&order_id)
            .ok_or(EngineError::UnknownOrder(order_id))?;
        self.ladder(*side)
            .get(price)
            .and_then(|lvl| lvl.queue.iter().position(|o| o.order_id == order_id))
            .map(|p| p + 1)
            .ok_or(EngineError::UnknownOrder(order_id))
    }

    pub fn snapshot_depth(&self, side: Side) -> DepthSnapshot {
        let queue_lengths: Vec<usize> = self.levels(side).map(PriceLevel::len).collect();
        DepthSnapshot {
            levels: queue_lengths.len(),
            total_orders: queue_lengths.iter().sum(),
            queue_lengths,
        }
    }

    pub fn dump(&self) -> BookDump {
        let side_dump = |side| {
            self.levels(side)
                .map(|lvl| LevelDump {
                    price_ticks: lvl.price_ticks,
                    queue: lvl
                        .queue
                        .iter()
                        .map(|o| QueueEntryDump {
                            order_id: o.order_id,
                            remaining_size: o.remaining_size,
                        })
                        .collect(),
                })
                .collect()
        };
        BookDump {
            buy: side_dump(Side::Buy),
            sell: side_dump(Side::Sell),
        }
    }

    pub fn apply_event(&mut self, event: &OrderEvent) -> Result<ApplyOutcome, EngineError> {
        match event.kind {
            EventKind::SubmitLimit | EventKind::SubmitMarketable => self.submit(event),
            EventKind::Cancel => self.cancel(event),
        }
    }

    fn crosses(side: Side, price: u64, opposite_best: u64) -> bool {
        match side {
            Side::Buy => opposite_best <= price,
            Side::Sell => opposite_best >= price,
        }
    }

    fn submit(&mut self, event: &OrderEvent) -> Result<ApplyOutcome, EngineError> {
        if event.size == 0 {
            return Err(EngineError::InvalidEvent("zero size"));
        }
        if event.price_ticks == 0 {
            return Err(EngineError::InvalidEvent("zero price"));
        }
        if self.index.contains_key(&event.order_id) {
            return Err(EngineError::DuplicateOrderId(event.order_id));
        }
        let side = event.side;
        let opposite = side.opposite();
        let mut remaining = event.size;
        let mut outcome = ApplyOutcome::default();

        while remaining > 0 {
            let Some(best) = self.best(opposite) else { break };
            if !Self::crosses(side, event.price_ticks, best) {
                break;
            }
            let ladder = self.ladder_mut(opposite);
            let level = ladder.get_mut(&best).expect("best level exists");
            let maker = level.queue.front_mut().expect("levels are never empty");
            let qty = remaining.min(maker.remaining_size);
            maker.remaining_size -= qty;
            remaining -= qty;
            outcome.trades.push(Trade {
                maker_id: maker.order_id,
                taker_id: event.order_id,
                price_ticks: best,
                size: qty,
            });
            if maker.remaining_size == 0 {
                let done = level.queue.pop_front().expect("front exists");
                if level.queue.is_empty() {
                    ladder.remove(&best);
                }
                self.index.remove(&done.order_id);
                self.order_counts[side_idx(opposite)] -= 1;
            }
        }

        if remaining > 0 {
            self.arrivals += 1;
            let order = RestingOrder {
                order_id: event.order_id,
                side,
                price_ticks: event.price_ticks,
                remaining_size: remaining,
                arrival_seq: self.arrivals,
            };
            self.ladder_mut(side)
                .entry(event.price_ticks)
                .or_insert_with(|| PriceLevel {
                    price_ticks: event.price_ticks,
                    queue: VecDeque::new(),
                })
                .queue
                .push_back(order);
            self.index.insert(event.order_id, (side, event.price_ticks));
            self.order_counts[side_idx(side)] += 1;
            outcome.rested = Some(event.order_id);
            outcome.rested_size = remaining;
        }

        if let (Some(bid), Some(ask)) = (self.best_bid(), self.best_ask()) {
            if bid >= ask {
                return Err(EngineError::CrossedBookInvariantViolation { bid, ask });
            }
        }
        Ok(outcome)
    }

    fn cancel(&mut self, event: &OrderEvent) -> Result<ApplyOutcome, EngineError> {
        let &(side, price) = self
            .index
            .get(&event.order_id)
            .ok_or(EngineError::DanglingCancel(event.order_id))?;
        let level_rank = self.level_rank(side, price)?;
        let book_levels = self.level_count(side);
        let side_orders = self.order_count(side);
        let level = self.ladder(side).get(&price).expect("indexed level exists");
        let pos = level
            .queue
            .iter()
            .position(|o| o.order_id == event.order_id)
            .expect("indexed order is queued");
        let level_orders = level.queue.len();
        let remaining = level.queue[pos].remaining_size;
        let cancel_size = if event.size == 0 { remaining } else { event.size };
        if cancel_size > remaining {
            return Err(EngineError::CancelExceedsRemaining {
                order_id: event.order_id,
                requested: cancel_size,
                remaining,
            });
        }
        let record = CancellationRecord::new(
            self.cancellations + 1,
            event.seq,
            event.order_id,
            side,
            level_rank,
            book_levels,
            level_orders,
            side_orders,
            pos + 1,
            cancel_size,
        )?;
        self.cancellations += 1;

        let ladder = self.ladder_mut(side);
        let level = ladder.get_mut(&price).expect("indexed level exists");
        if cancel_size == remaining {
            level.queue.remove(pos);
            if level.queue.is_empty() {
                ladder.remove(&price);
            }
            self.index.remove(&event.order_id);
            self.order_counts[side_idx(side)] -= 1;
        } else {
            // partial cancel keeps time priority
            level.queue[pos].remaining_size -= cancel_size;
        }
        Ok(ApplyOutcome {
            cancellation: Some(record),
            ..Default::default()
        })
    }

    /// Full structural check; O(book size). Used by tests and sampled
    /// invariant checks.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen = 0usize;
        for side in Side::BOTH {
            let mut count = 0;
            for (price, lvl) in self.ladder(side) {
                if lvl.queue.is_empty() {
                    return Err(format!("empty {side} level {price}"));
                }
                if lvl.price_ticks != *price {
                    return Err(format!("level key {price} != {}", lvl.price_ticks));
                }
                let mut last = 0;
                for o in &lvl.queue {
                    if o.remaining_size == 0 {
                        return Err(format!("order {} rests with zero size", o.order_id));
                    }
                    if o.arrival_seq <= last {
                        return Err(format!("queue at {price} not in arrival order"));
                    }
                    last = o.arrival_seq;
                    if self.index.get(&o.order_id) != Some(&(side, *price)) {
                        return Err(format!("index mismatch for order {}", o.order_id));
                    }
                    count += 1;
                }
            }
            if count != self.order_count(side) {
                return Err(format!("{side} order counter {} != {count}", self.order_count(side)));
            }
            seen += count;
        }
        if seen != self.index.len() {
            return Err(format!("index has {} entries, book {seen}", self.index.len()));
        }
        if let (Some(b), Some(a)) = (self.best_bid(), self.best_ask()) {
            if b >= a {
                return Err(format!("crossed book {b} >= {a}"));
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDateTime;

    fn ev(seq: u64, id: u64, kind: EventKind, side: Side, price: u64, size: u64) -> OrderEvent {
        OrderEvent {
            seq,
            timestamp: NaiveDateTime::parse_from_str("2003-01-02T10:00:00.000", "%Y-%m-%dT%H:%M:%S%.f")
                .unwrap(),
            instrument: "000001".into(),
            order_id: id,
            kind,
            side,
            price_ticks: price,
            size,
        }
    }

    fn limit(seq: u64, id: u64, side: Side, price: u64, size: u64) -> OrderEvent {
        ev(seq, id, EventKind::SubmitLimit, side, price, size)
    }

    #[test]
    fn lone_limit_rests() {
        let mut book = LimitOrderBook::new();
        let out = book.apply_event(&limit(1, 1, Side::Buy, 1000, 100)).unwrap();
        assert!(out.trades.is_empty());
        assert_eq!(out.rested, Some(1));
        let dump = book.dump();
        assert_eq!(dump.buy.len(), 1);
        assert_eq!(dump.buy[0].price_ticks, 1000);
        assert_eq!(dump.buy[0].queue, vec![QueueEntryDump { order_id: 1, remaining_size: 100 }]);
        assert!(dump.sell.is_empty());
    }

    #[test]
    fn marketable_partial_fill_at_one_level() {
        let mut book = LimitOrderBook::new();
        book.apply_event(&limit(1, 100, Side::Sell, 1001, 200)).unwrap();
        let out = book
            .apply_event(&ev(2, 7, EventKind::SubmitMarketable, Side::Buy, 1001, 150))
            .unwrap();
        assert_eq!(
            out.trades,
            vec![Trade { maker_id: 100, taker_id: 7, price_ticks: 1001, size: 150 }]
        );
        assert_eq!(out.rested, None);
        assert_eq!(book.order(100).unwrap().remaining_size, 50);
    }

    #[test]
    fn sweep_fills_best_first_then_fifo_and_rests_remainder() {
        let mut book = LimitOrderBook::new();
        book.apply_event(&limit(1, 1, Side::Sell, 1002, 100)).unwrap();
        book.apply_event(&limit(2, 2, Side::Sell, 1001, 100)).unwrap();
        book.apply_event(&limit(3, 3, Side::Sell, 1001, 100)).unwrap();
        let out = book.apply_event(&limit(4, 4, Side::Buy, 1002, 350)).unwrap();
        let makers: Vec<_> = out.trades.iter().map(|t| (t.maker_id, t.price_ticks, t.size)).collect();
        assert_eq!(makers, vec![(2, 1001, 100), (3, 1001, 100), (1, 1002, 100)]);
        assert_eq!(out.rested_size, 50);
        assert_eq!(book.best_bid(), Some(1002));
        assert_eq!(book.best_ask(), None);
        book.check_invariants().unwrap();
    }

    #[test]
    fn level_ranks() {
        let mut book = LimitOrderBook::new();
        for (i, p) in [1000, 1005, 1003].into_iter().enumerate() {
            book.apply_event(&limit(i as u64 + 1, i as u64 + 1, Side::Buy, p, 10)).unwrap();
        }
        book.apply_event(&limit(10, 10, Side::Sell, 1008, 10)).unwrap();
        book.apply_event(&limit(11, 11, Side::Sell, 1006, 10)).unwrap();
        assert_eq!(book.level_rank(Side::Buy, 1003), Ok(2));
        assert_eq!(book.level_rank(Side::Buy, 1005), Ok(1));
        assert_eq!(book.level_rank(Side::Buy, 1000), Ok(3));
        assert_eq!(book.level_rank(Side::Sell, 1006), Ok(1));
        assert_eq!(book.level_rank(Side::Sell, 1008), Ok(2));
        assert_eq!(
            book.level_rank(Side::Sell, 1007),
            Err(EngineError::UnknownLevel { side: Side::Sell, price_ticks: 1007 })
        );
    }

    /// The gray order of the book-structure illustration: second order at the
    /// second buy level.
    #[test]
    fn second_in_queue_at_second_level() {
        let mut book = LimitOrderBook::new();
        book.apply_event(&limit(1, 1, Side::Buy, 1010, 10)).unwrap();
        book.apply_event(&limit(2, 2, Side::Buy, 1009, 10)).unwrap();
        book.apply_event(&limit(3, 3, Side::Buy, 1009, 10)).unwrap();
        book.apply_event(&limit(4, 4, Side::Buy, 1008, 10)).unwrap();
        assert_eq!(book.queue_position(1), Ok(1));
        assert_eq!(book.queue_position(3), Ok(2));
        let out = book.apply_event(&ev(5, 3, EventKind::Cancel, Side::Buy, 1009, 0)).unwrap();
        let rec = out.cancellation.unwrap();
        assert_eq!((rec.level, rec.queue_pos, rec.level_orders), (2, 2, 2));
        assert_eq!(rec.rel_queue_pos, 1.0);
        assert_eq!(rec.book_levels, 3);
        assert_eq!(rec.side_orders, 4);
        assert_eq!(rec.t, 1);
        assert_eq!(book.queue_position(3), Err(EngineError::UnknownOrder(3)));
    }

    #[test]
    fn depth_snapshots() {
        let mut book = LimitOrderBook::new();
        assert_eq!(
            book.snapshot_depth(Side::Sell),
            DepthSnapshot { levels: 0, total_orders: 0, queue_lengths: vec![] }
        );
        let mut id = 0;
        for (price, n) in [(1001, 3), (1002, 1), (1003, 2)] {
            for _ in 0..n {
                id += 1;
                book.apply_event(&limit(id, id, Side::Sell, price, 5)).unwrap();
            }
        }
        assert_eq!(
            book.snapshot_depth(Side::Sell),
            DepthSnapshot { levels: 3, total_orders: 6, queue_lengths: vec![3, 1, 2] }
        );
    }

    #[test]
    fn cancel_paths() {
        let mut book = LimitOrderBook::new();
        book.apply_event(&limit(1, 1, Side::Sell, 1001, 100)).unwrap();
        book.apply_event(&limit(2, 2, Side::Sell, 1001, 100)).unwrap();
        // partial cancel keeps priority
        let out = book.apply_event(&ev(3, 1, EventKind::Cancel, Side::Sell, 1001, 40)).unwrap();
        assert_eq!(out.cancellation.unwrap().cancelled_size, 40);
        assert_eq!(book.queue_position(1), Ok(1));
        assert_eq!(book.order(1).unwrap().remaining_size, 60);
        assert_eq!(
            book.apply_event(&ev(4, 1, EventKind::Cancel, Side::Sell, 1001, 61)),
            Err(EngineError::CancelExceedsRemaining { order_id: 1, requested: 61, remaining: 60 })
        );
        assert_eq!(
            book.apply_event(&ev(5, 9, EventKind::Cancel, Side::Sell, 1001, 0)),
            Err(EngineError::DanglingCancel(9))
        );
        assert_eq!(book.cancellations(), 1);
        let out = book.apply_event(&ev(6, 1, EventKind::Cancel, Side::Sell, 1001, 60)).unwrap();
        assert_eq!(out.cancellation.unwrap().t, 2);
        assert!(!book.contains(1));
        book.apply_event(&ev(7, 2, EventKind::Cancel, Side::Sell, 1001, 0)).unwrap();
        assert!(book.is_empty());
        assert_eq!(book.level_count(Side::Sell), 0);
        // filled orders cannot be cancelled
        book.apply_event(&limit(8, 3, Side::Sell, 1001, 10)).unwrap();
        book.apply_event(&limit(9, 4, Side::Buy, 1001, 10)).unwrap();
        assert_eq!(
            book.apply_event(&ev(10, 3, EventKind::Cancel, Side::Sell, 1001, 0)),
            Err(EngineError::DanglingCancel(3))
        );
        book.check_invariants().unwrap();
    }

    #[test]
    fn rejects_bad_submissions() {
        let mut book = LimitOrderBook::new();
        book.apply_event(&limit(1, 1, Side::Buy, 1000, 10)).unwrap();
        assert_eq!(
            book.apply_event(&limit(2, 1, Side::Buy, 999, 10)),
            Err(EngineError::DuplicateOrderId(1))
        );
        assert!(matches!(
            book.apply_event(&limit(3, 2, Side::Buy, 999, 0)),
            Err(EngineError::InvalidEvent(_))
        ));
    }

    #[test]
    fn record_constructor_checks_ranges() {
        assert!(CancellationRecord::new(1, 1, 1, Side::Buy, 3, 2, 1, 1, 1, 1).is_err());
        assert!(CancellationRecord::new(1, 1, 1, Side::Buy, 1, 2, 1, 1, 2, 1).is_err());
        assert!(CancellationRecord::new(1, 1, 1, Side::Buy, 1, 2, 3, 2, 1, 1).is_err());
        let r = CancellationRecord::new(1, 1, 1, Side::Buy, 2, 5, 3, 30, 1, 1).unwrap();
        assert!((r.rel_level - 0.4).abs() < 1e-15);
        assert!((r.norm_level - 4.0).abs() < 1e-12);
    }
}
