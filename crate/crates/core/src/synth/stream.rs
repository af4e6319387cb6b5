use chrono::{NaiveDate, NaiveDateTime, NaiveTime, TimeDelta};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::SynthError;
use crate::distfit::sample::{exp_profile_quantile, open_unit, truncated_lognormal_quantile};
use crate::lobengine::LimitOrderBook;
use crate::orderflow::{EventKind, OrderEvent, Side};

/// Law of the relative price level X of each cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum PriceLevelLaw {
    TruncatedLognormal { mu: f64, sigma: f64 },
    Uniform,
}

/// Law of the relative queue position Y of each cancellation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum QueuePositionLaw {
    ExpProfile { beta: f64 },
    Uniform,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ArrivalMix {
    pub limit: f64,
    pub marketable: f64,
    pub cancel: f64,
}

impl Default for ArrivalMix {
    fn default() -> Self {
        ArrivalMix {
            limit: 0.6,
            marketable: 0.2,
            cancel: 0.2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenConfig {
    pub seed: u64,
    /// Events after the initial book is laid down.
    pub n_events: usize,
    pub instrument: String,
    pub date: NaiveDate,
    pub price_level_law: PriceLevelLaw,
    pub queue_position_law: QueuePositionLaw,
    pub mix: ArrivalMix,
    /// Price levels per side in the initial book, and the level count the
    /// generator tries to hold.
    pub depth_levels: usize,
    /// Orders per level in the initial book.
    pub queue_len: usize,
    pub mid_price_ticks: u64,
    /// Share of cancels that only remove half of the remaining size.
    pub partial_cancel: f64,
    pub max_order_lots: u64,
    pub lot_size: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        GenConfig {
            seed: 0,
            n_events: 100_000,
            instrument: "SYN001".into(),
            date: NaiveDate::from_ymd_opt(2003, 7, 1).unwrap(),
            price_level_law: PriceLevelLaw::TruncatedLognormal { mu: -2.14, sigma: 1.11 },
            queue_position_law: QueuePositionLaw::ExpProfile { beta: -25.0 },
            mix: ArrivalMix::default(),
            depth_levels: 200,
            queue_len: 100,
            mid_price_ticks: 100_000,
            partial_cancel: 0.1,
            max_order_lots: 10,
            lot_size: 100,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<(), SynthError> {
        let bad = |m: &str| Err(SynthError::ConfigInvalid(m.into()));
        let ArrivalMix { limit, marketable, cancel } = self.mix;
        if [limit, marketable, cancel].iter().any(|p| !(p.is_finite() && *p >= 0.0)) {
            return bad("arrival probabilities must be finite and non-negative");
        }
        if ((limit + marketable + cancel) - 1.0).abs() > 1e-9 {
            return bad("arrival probabilities must sum to 1");
        }
        if limit == 0.0 {
            return bad("limit probability must be positive");
        }
        if self.depth_levels == 0 || self.queue_len == 0 {
            return bad("initial book needs at least one level and one order per level");
        }
        if self.mid_price_ticks <= 4 * self.depth_levels as u64 {
            return bad("mid price too low for the requested depth");
        }
        if !(0.0..=1.0).contains(&self.partial_cancel) {
            return bad("partial_cancel must lie in [0, 1]");
        }
        if self.max_order_lots == 0 || self.lot_size == 0 {
            return bad("order sizes must be positive");
        }
        if self.instrument.is_empty() || self.instrument.contains(',') {
            return bad("instrument code must be non-empty and without commas");
        }
        match self.price_level_law {
            PriceLevelLaw::TruncatedLognormal { mu, sigma } if !(mu.is_finite() && sigma > 0.0 && sigma.is_finite()) => {
                return bad("log-normal law needs finite mu and positive sigma");
            }
            _ => {}
        }
        match self.queue_position_law {
            QueuePositionLaw::ExpProfile { beta } if !(beta < 0.0 && beta.is_finite()) => {
                return bad("exponential profile needs a finite negative beta");
            }
            _ => {}
        }
        Ok(())
    }
}

const SESSION_MS: i64 = 4 * 3600 * 1000;
const MORNING_MS: i64 = 2 * 3600 * 1000;

struct Generator<'a> {
    cfg: &'a GenConfig,
    rng: ChaCha8Rng,
    book: LimitOrderBook,
    events: Vec<OrderEvent>,
    next_id: u64,
    at: NaiveDateTime,
}

impl Generator<'_> {
    fn push(&mut self, kind: EventKind, side: Side, order_id: u64, price_ticks: u64, size: u64) -> Result<(), SynthError> {
        let event = OrderEvent {
            seq: self.events.len() as u64 + 1,
            timestamp: self.at,
            instrument: self.cfg.instrument.clone(),
            order_id,
            kind,
            side,
            price_ticks,
            size,
        };
        self.book.apply_event(&event)?;
        self.events.push(event);
        Ok(())
    }

    fn new_id(&mut self) -> u64 {
        self.next_id += 1;
        self.next_id
    }

    fn lot(&mut self) -> u64 {
        self.cfg.lot_size * self.rng.random_range(1..=self.cfg.max_order_lots)
    }

    fn limit(&mut self) -> Result<(), SynthError> {
        let (nb, ns) = (self.book.order_count(Side::Buy), self.book.order_count(Side::Sell));
        let side = if nb < ns {
            Side::Buy
        } else if ns < nb {
            Side::Sell
        } else if self.rng.random_bool(0.5) {
            Side::Buy
        } else {
            Side::Sell
        };
        let levels = self.book.level_count(side);
        let price = if levels < self.cfg.depth_levels {
            self.new_level_price(side)
        } else {
            // join the shortest of three random levels and the three best;
            // the best levels are drained by marketable flow and would
            // otherwise stay thin
            let mut pick: Option<(usize, u64)> = None;
            let draws: [usize; 3] = std::array::from_fn(|_| self.rng.random_range(1..=levels));
            for x in draws.into_iter().chain(1..=levels.min(3)) {
                let lvl = self.book.level_at(side, x).expect("rank within depth");
                if pick.is_none_or(|(len, _)| lvl.len() < len) {
                    pick = Some((lvl.len(), lvl.price_ticks));
                }
            }
            pick.expect("three draws").1
        };
        let id = self.new_id();
        let size = self.lot();
        self.push(EventKind::SubmitLimit, side, id, price, size)
    }

    /// A fresh level inside the spread if there is room, else behind the
    /// worst level.
    fn new_level_price(&self, side: Side) -> u64 {
        let own = self.book.best(side);
        let other = self.book.best(side.opposite());
        match (side, own, other) {
            (Side::Buy, Some(b), Some(a)) if a > b + 1 => b + 1,
            (Side::Sell, Some(a), Some(b)) if a > b + 1 => a - 1,
            (Side::Buy, Some(_), _) => self.book.worst(side).unwrap() - 1,
            (Side::Sell, Some(_), _) => self.book.worst(side).unwrap() + 1,
            (Side::Buy, None, Some(a)) => a - 1,
            (Side::Sell, None, Some(b)) => b + 1,
            (Side::Buy, None, None) => self.cfg.mid_price_ticks - 1,
            (Side::Sell, None, None) => self.cfg.mid_price_ticks + 1,
        }
    }

    /// Takes the front `k` orders of the opposite best level, exactly.
    fn marketable(&mut self) -> Result<(), SynthError> {
        let side = if self.rng.random_bool(0.5) { Side::Buy } else { Side::Sell };
        let side = if self.book.order_count(side.opposite()) == 0 { side.opposite() } else { side };
        if self.book.order_count(side.opposite()) == 0 {
            return self.limit();
        }
        let target = 2 * self.cfg.depth_levels * self.cfg.queue_len;
        let m = self.cfg.mix;
        let k_star = ((m.limit - m.cancel) / m.marketable).clamp(1.0, 10.0);
        let k = if self.book.order_count(Side::Buy) + self.book.order_count(Side::Sell) > target {
            k_star.ceil()
        } else {
            k_star.floor()
        } as usize;
        let lvl = self.book.level_at(side.opposite(), 1).expect("non-empty side");
        let price = lvl.price_ticks;
        let size: u64 = lvl.queue.iter().take(k.max(1)).map(|o| o.remaining_size).sum();
        let id = self.new_id();
        self.push(EventKind::SubmitMarketable, side, id, price, size)
    }

    fn cancel(&mut self) -> Result<(), SynthError> {
        let side = if self.rng.random_bool(0.5) { Side::Buy } else { Side::Sell };
        let side = if self.book.order_count(side) == 0 { side.opposite() } else { side };
        if self.book.order_count(side) == 0 {
            return self.limit();
        }
        let rel_level = match self.cfg.price_level_law {
            PriceLevelLaw::TruncatedLognormal { mu, sigma } => {
                truncated_lognormal_quantile(open_unit(&mut self.rng), mu, sigma)
            }
            PriceLevelLaw::Uniform => open_unit(&mut self.rng),
        };
        let rel_pos = match self.cfg.queue_position_law {
            QueuePositionLaw::ExpProfile { beta } => exp_profile_quantile(open_unit(&mut self.rng), beta),
            QueuePositionLaw::Uniform => open_unit(&mut self.rng),
        };
        // The depth sits at a multiple of the bin count, where ceil keeps
        // bin membership exact. Queue lengths wander, so positions round to
        // nearest, which does not shift mass towards the back of the queue.
        let levels = self.book.level_count(side);
        let x = ((rel_level * levels as f64).ceil() as usize).clamp(1, levels);
        let lvl = self.book.level_at(side, x).expect("rank within depth");
        let n = lvl.len();
        let y = ((rel_pos * n as f64).round() as usize).clamp(1, n);
        let order = &lvl.queue[y - 1];
        let (id, price, remaining) = (order.order_id, order.price_ticks, order.remaining_size);
        let size = if remaining >= 2 && self.rng.random_bool(self.cfg.partial_cancel) {
            remaining / 2
        } else {
            remaining
        };
        self.push(EventKind::Cancel, side, id, price, size)
    }
}

fn session_time(date: NaiveDate, offset_ms: i64) -> NaiveDateTime {
    let (start, off) = if offset_ms < MORNING_MS {
        (NaiveTime::from_hms_opt(9, 30, 0).unwrap(), offset_ms)
    } else {
        (NaiveTime::from_hms_opt(13, 0, 0).unwrap(), offset_ms - MORNING_MS)
    };
    date.and_time(start) + TimeDelta::milliseconds(off)
}

/// Lays down a symmetric initial book at the open, then draws `n_events`
/// arrivals spread evenly over the continuous sessions. Cancels pick their
/// target by drawing X and Y from the configured laws and mapping them onto
/// the current book, so they always hit a resting order.
pub fn generate_stream(cfg: &GenConfig) -> Result<Vec<OrderEvent>, SynthError> {
    cfg.validate()?;
    let mut g = Generator {
        cfg,
        rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        book: LimitOrderBook::new(),
        events: Vec::with_capacity(cfg.n_events + 2 * cfg.depth_levels * cfg.queue_len),
        next_id: 0,
        at: session_time(cfg.date, 0),
    };
    for level in 1..=cfg.depth_levels as u64 {
        for side in Side::BOTH {
            let price = match side {
                Side::Buy => cfg.mid_price_ticks - level,
                Side::Sell => cfg.mid_price_ticks + level,
            };
            for _ in 0..cfg.queue_len {
                let id = g.new_id();
                let size = g.lot();
                g.push(EventKind::SubmitLimit, side, id, price, size)?;
            }
        }
    }
    let m = cfg.mix;
    for i in 0..cfg.n_events {
        g.at = session_time(cfg.date, (i as i64 * SESSION_MS) / cfg.n_events as i64);
        let u: f64 = g.rng.random();
        if u < m.limit {
            g.limit()?;
        } else if u < m.limit + m.marketable {
            g.marketable()?;
        } else if m.cancel > 0.0 {
            g.cancel()?;
        } else {
            g.limit()?;
        }
    }
    Ok(g.events)
}
