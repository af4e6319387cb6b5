//! Shared test helpers: a brute-force reference matcher and random streams.
#![allow(dead_code)]

use chrono::{NaiveDate, NaiveDateTime, TimeDelta};
use lobcancel_core::lobengine::{BookDump, EngineError, LevelDump, LimitOrderBook, QueueEntryDump, Trade};
use lobcancel_core::orderflow::{EventKind, OrderEvent, Side};
use lobcancel_core::profiles::{AggressivenessClass, ProfileSet};
use rand::Rng;

pub fn at(ms: i64) -> NaiveDateTime {
    NaiveDate::from_ymd_opt(2003, 7, 1)
        .unwrap()
        .and_hms_opt(10, 0, 0)
        .unwrap()
        + TimeDelta::milliseconds(ms)
}

pub fn ev(seq: u64, kind: EventKind, side: Side, id: u64, price: u64, size: u64) -> OrderEvent {
    OrderEvent {
        seq,
        timestamp: at(seq as i64),
        instrument: "TST".into(),
        order_id: id,
        kind,
        side,
        price_ticks: price,
        size,
    }
}

#[derive(Debug, Clone)]
struct RefOrder {
    id: u64,
    side: Side,
    price: u64,
    size: u64,
    arrival: u64,
}

/// Coordinates of a cancel as the reference sees them:
/// (x, L, n_x, N_total, y, cancelled size).
pub type RefCoords = (usize, usize, usize, usize, usize, u64);

#[derive(Debug, Clone, PartialEq)]
pub enum RefOutcome {
    Trades(Vec<Trade>),
    Cancelled(RefCoords),
    Rejected,
}

/// Orders kept in one flat list; every query is a linear scan.
#[derive(Debug, Default)]
pub struct RefBook {
    orders: Vec<RefOrder>,
    clock: u64,
}

fn better(side: Side, a: u64, b: u64) -> bool {
    match side {
        Side::Buy => a > b,
        Side::Sell => a < b,
    }
}

impl RefBook {
    pub fn apply(&mut self, e: &OrderEvent) -> RefOutcome {
        match e.kind {
            EventKind::Cancel => self.cancel(e),
            _ => self.submit(e),
        }
    }

    fn submit(&mut self, e: &OrderEvent) -> RefOutcome {
        if e.size == 0 || e.price_ticks == 0 || self.orders.iter().any(|o| o.id == e.order_id) {
            return RefOutcome::Rejected;
        }
        let mut left = e.size;
        let mut trades = Vec::new();
        while left > 0 {
            // best crossing maker: best price, then earliest arrival
            let mut pick: Option<usize> = None;
            for (i, o) in self.orders.iter().enumerate() {
                if o.side == e.side {
                    continue;
                }
                let crosses = match e.side {
                    Side::Buy => o.price <= e.price_ticks,
                    Side::Sell => o.price >= e.price_ticks,
                };
                if !crosses {
                    continue;
                }
                pick = match pick {
                    None => Some(i),
                    Some(j) => {
                        let p = &self.orders[j];
                        if better(o.side, o.price, p.price) || (o.price == p.price && o.arrival < p.arrival) {
                            Some(i)
                        } else {
                            Some(j)
                        }
                    }
                };
            }
            let Some(i) = pick else { break };
            let q = left.min(self.orders[i].size);
            trades.push(Trade {
                maker_id: self.orders[i].id,
                taker_id: e.order_id,
                price_ticks: self.orders[i].price,
                size: q,
            });
            left -= q;
            self.orders[i].size -= q;
            if self.orders[i].size == 0 {
                self.orders.remove(i);
            }
        }
        if left > 0 {
            self.clock += 1;
            self.orders.push(RefOrder {
                id: e.order_id,
                side: e.side,
                price: e.price_ticks,
                size: left,
                arrival: self.clock,
            });
        }
        RefOutcome::Trades(trades)
    }

    fn cancel(&mut self, e: &OrderEvent) -> RefOutcome {
        let Some(i) = self.orders.iter().position(|o| o.id == e.order_id) else {
            return RefOutcome::Rejected;
        };
        let o = self.orders[i].clone();
        let want = if e.size == 0 { o.size } else { e.size };
        if want > o.size {
            return RefOutcome::Rejected;
        }
        let mut prices: Vec<u64> = self.orders.iter().filter(|p| p.side == o.side).map(|p| p.price).collect();
        prices.sort_unstable();
        prices.dedup();
        let levels = prices.len();
        let x = prices.iter().filter(|&&p| p == o.price || better(o.side, p, o.price)).count();
        let same: Vec<&RefOrder> = self.orders.iter().filter(|p| p.side == o.side && p.price == o.price).collect();
        let n = same.len();
        let y = same.iter().filter(|p| p.arrival <= o.arrival).count();
        let total = self.orders.iter().filter(|p| p.side == o.side).count();
        if want == o.size {
            self.orders.remove(i);
        } else {
            self.orders[i].size -= want;
        }
        RefOutcome::Cancelled((x, levels, n, total, y, want))
    }

    pub fn dump(&self) -> BookDump {
        let side_dump = |side: Side| {
            let mut prices: Vec<u64> = self.orders.iter().filter(|o| o.side == side).map(|o| o.price).collect();
            prices.sort_unstable();
            prices.dedup();
            if side == Side::Buy {
                prices.reverse();
            }
            prices
                .into_iter()
                .map(|p| {
                    let mut q: Vec<&RefOrder> = self.orders.iter().filter(|o| o.side == side && o.price == p).collect();
                    q.sort_by_key(|o| o.arrival);
                    LevelDump {
                        price_ticks: p,
                        queue: q
                            .into_iter()
                            .map(|o| QueueEntryDump {
                                order_id: o.id,
                                remaining_size: o.size,
                            })
                            .collect(),
                    }
                })
                .collect()
        };
        BookDump {
            buy: side_dump(Side::Buy),
            sell: side_dump(Side::Sell),
        }
    }
}

/// Replays `events` through both books, comparing every outcome.
pub fn compare(events: &[OrderEvent]) -> Result<(), String> {
    let mut book = LimitOrderBook::new();
    let mut reference = RefBook::default();
    for e in events {
        let got = book.apply_event(e);
        let want = reference.apply(e);
        match (&got, &want) {
            (Ok(out), RefOutcome::Trades(trades)) if e.kind != EventKind::Cancel => {
                if &out.trades != trades {
                    return Err(format!("seq {}: trades {:?} != {:?}", e.seq, out.trades, trades));
                }
            }
            (Ok(out), RefOutcome::Cancelled((x, l, n, total, y, size))) => {
                let r = out.cancellation.as_ref().ok_or("cancel without record")?;
                let got = (r.level, r.book_levels, r.level_orders, r.side_orders, r.queue_pos, r.cancelled_size);
                if got != (*x, *l, *n, *total, *y, *size) {
                    return Err(format!("seq {}: coords {got:?} != {:?}", e.seq, (x, l, n, total, y, size)));
                }
            }
            (
                Err(EngineError::DanglingCancel(_))
                | Err(EngineError::CancelExceedsRemaining { .. })
                | Err(EngineError::DuplicateOrderId(_)),
                RefOutcome::Rejected,
            ) => {}
            _ => return Err(format!("seq {}: engine {got:?} vs reference {want:?}", e.seq)),
        }
    }
    if book.dump() != reference.dump() {
        return Err(format!("final books differ:\n{:?}\n{:?}", book.dump(), reference.dump()));
    }
    book.check_invariants()
}

/// Random stream over a narrow price band so that crossing, partial fills,
/// partial cancels, dangling cancels and oversized cancels all occur.
pub fn random_stream<R: Rng>(rng: &mut R, len: usize) -> Vec<OrderEvent> {
    let mut out = Vec::with_capacity(len);
    let mut next_id = 1u64;
    for seq in 1..=len as u64 {
        let side = if rng.random_bool(0.5) { Side::Buy } else { Side::Sell };
        let roll: f64 = rng.random();
        let e = if roll < 0.55 || next_id == 1 {
            let id = next_id;
            next_id += 1;
            let kind = if rng.random_bool(0.2) { EventKind::SubmitMarketable } else { EventKind::SubmitLimit };
            ev(seq, kind, side, id, rng.random_range(95..=105), rng.random_range(1..=6))
        } else if roll < 0.57 {
            // resubmission of an id that may still rest
            ev(seq, EventKind::SubmitLimit, side, rng.random_range(1..next_id), 100, 1)
        } else {
            let id = if rng.random_bool(0.05) { next_id + 1000 } else { rng.random_range(1..next_id) };
            let size = match rng.random_range(0..4) {
                0 | 1 => 0,
                2 => rng.random_range(1..=3),
                _ => rng.random_range(4..=9),
            };
            ev(seq, EventKind::Cancel, side, id, 100, size)
        };
        out.push(e);
    }
    out
}

/// Adaptive Simpson quadrature.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    #[allow(clippy::too_many_arguments)]
    fn step<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
        let m = 0.5 * (a + b);
        let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
        let (flm, frm) = (f(lm), f(rm));
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            left + right + delta / 15.0
        } else {
            step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
        }
    }
    let (fa, fb, fm) = (f(a), f(b), f(0.5 * (a + b)));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Adaptive Simpson over `panels` equal pieces of [a, b], so narrow mass in a
/// wide range is not skipped.
pub fn panel_quadrature<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, panels: usize, tol: f64) -> f64 {
    let w = (b - a) / panels as f64;
    (0..panels)
        .map(|k| adaptive_simpson(f, a + w * k as f64, a + w * (k + 1) as f64, tol / panels as f64))
        .sum()
}

/// ∫₀¹ of the untruncated log-normal density, integrated in log space.
pub fn lognormal_mass_quadrature(mu: f64, sigma: f64) -> f64 {
    let phi = |u: f64| {
        let s = (u - mu) / sigma;
        (-0.5 * s * s).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt())
    };
    panel_quadrature(&phi, mu - 40.0 * sigma, 0.0, 80, 1e-14)
}

/// ∫₀¹ (1 - e^{βy}) dy by quadrature.
pub fn exp_profile_mass_quadrature(beta: f64) -> f64 {
    adaptive_simpson(&|y: f64| -(beta * y).exp_m1(), 0.0, 1.0, 1e-14)
}

/// Minimizes a unimodal function on [a, b] by ternary search.
pub fn ternary_min<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> f64 {
    for _ in 0..300 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) < f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    0.5 * (a + b)
}

/// Rejection sampler for the log-normal restricted to (0, 1].
pub fn lognormal_by_rejection<R: Rng>(rng: &mut R, mu: f64, sigma: f64, n: usize) -> Vec<f64> {
    use rand_distr::{Distribution, LogNormal};
    let law = LogNormal::new(mu, sigma).unwrap();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let x: f64 = law.sample(rng);
        if x > 0.0 && x <= 1.0 {
            out.push(x);
        }
    }
    out
}

/// Rejection sampler for the density ∝ 1 - e^{βy} on (0, 1], β < 0.
pub fn exp_profile_by_rejection<R: Rng>(rng: &mut R, beta: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let y = 1.0 - rng.random::<f64>();
        if rng.random::<f64>() < -(beta * y).exp_m1() {
            out.push(y);
        }
    }
    out
}

/// Pareto samples by inversion of the survival function.
pub fn pareto<R: Rng>(rng: &mut R, alpha: f64, x_min: f64, n: usize) -> Vec<f64> {
    (0..n).map(|_| x_min / (1.0 - rng.random::<f64>()).powf(1.0 / (alpha - 1.0))).collect()
}

/// Hand-derived class table of `fixtures/classification_20.csv`, per side:
/// (orders, cancelled, [(class, orders, cancelled); 4] in r1..r4 order, fully filled).
pub fn fixture_expectations(side: Side) -> (u64, u64, [(AggressivenessClass, u64, u64); 4], u64) {
    use AggressivenessClass::*;
    match side {
        Side::Buy => (10, 3, [(PartiallyFilled, 2, 1), (InsideSpread, 1, 0), (AtBest, 2, 1), (InsideBook, 4, 1)], 1),
        Side::Sell => (10, 3, [(PartiallyFilled, 1, 0), (InsideSpread, 2, 1), (AtBest, 2, 0), (InsideBook, 3, 2)], 2),
    }
}

/// Every difference between the fixture's profile ratios and the hand table.
pub fn fixture_mismatches(set: &ProfileSet) -> Vec<String> {
    let mut bad = Vec::new();
    for side in Side::BOTH {
        let Some(entry) = set.entry("TST", side) else {
            bad.push(format!("{side}: missing entry"));
            continue;
        };
        let r = &entry.class_ratios;
        let (orders, cancelled, classes, fully) = fixture_expectations(side);
        if (r.orders, r.cancellations, r.fully_filled) != (orders, cancelled, fully) {
            bad.push(format!("{side}: totals {:?}", (r.orders, r.cancellations, r.fully_filled)));
        }
        if r.r != Some(cancelled as f64 / orders as f64) {
            bad.push(format!("{side}: r = {:?}", r.r));
        }
        for (got, (class, n, c)) in r.classes.iter().zip(classes) {
            if got.class != class || (got.orders, got.cancelled) != (n, c) || got.ratio != Some(c as f64 / n as f64) {
                bad.push(format!("{side} {class:?}: {got:?}"));
            }
        }
    }
    bad
}
