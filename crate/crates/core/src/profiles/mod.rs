//! Cancellation position profiles and the order-aggressiveness ratios.

pub mod pdf;
pub mod replay;
pub mod report;

use serde::{Deserialize, Serialize};

use crate::json::f17_opt;
use crate::lobengine::CancellationRecord;
use crate::orderflow::Side;

pub use pdf::{BinSpec, Domain, EmpiricalPdf, PdfError};
pub use replay::{replay_day, DayReplay, ReplayDiagnostics, ReplayError};
pub use report::{write_cancels_csv, ProfileAccumulator, ProfileEntry, ProfileSet, ProfilesConfig, CANCELS_HEADER, ENSEMBLE};

/// Submission aggressiveness, most aggressive first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AggressivenessClass {
    FullyFilled,
    PartiallyFilled,
    InsideSpread,
    AtBest,
    InsideBook,
}

impl AggressivenessClass {
    pub const ALL: [AggressivenessClass; 5] = [
        AggressivenessClass::FullyFilled,
        AggressivenessClass::PartiallyFilled,
        AggressivenessClass::InsideSpread,
        AggressivenessClass::AtBest,
        AggressivenessClass::InsideBook,
    ];

    /// The four classes that can be cancelled, in r1..r4 order.
    pub const CANCELLABLE: [AggressivenessClass; 4] = [
        AggressivenessClass::PartiallyFilled,
        AggressivenessClass::InsideSpread,
        AggressivenessClass::AtBest,
        AggressivenessClass::InsideBook,
    ];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// What the book looked like when an order arrived, and what happened to it
/// on arrival.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SubmissionContext {
    pub side: Side,
    pub price_ticks: u64,
    pub same_best: Option<u64>,
    pub opposite_best: Option<u64>,
    pub filled_on_arrival: u64,
    pub rested: bool,
}

pub fn classify_order(ctx: &SubmissionContext) -> AggressivenessClass {
    use AggressivenessClass::*;
    if ctx.filled_on_arrival > 0 {
        return if ctx.rested { PartiallyFilled } else { FullyFilled };
    }
    match ctx.same_best {
        Some(best) => {
            let better = match ctx.side {
                Side::Buy => ctx.price_ticks > best,
                Side::Sell => ctx.price_ticks < best,
            };
            if better {
                InsideSpread
            } else if ctx.price_ticks == best {
                AtBest
            } else {
                InsideBook
            }
        }
        // Nothing on our side: a non-crossing price is inside the spread when
        // there is an opposite quote to be inside of.
        None if ctx.opposite_best.is_some() => InsideSpread,
        None => InsideBook,
    }
}

/// One submitted order, from arrival to end of day.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderLifecycle {
    pub order_id: u64,
    pub side: Side,
    pub class: AggressivenessClass,
    /// Submitted during the continuous auction.
    pub continuous: bool,
    pub marketable: bool,
    /// At least one successful cancel hit this order.
    pub cancelled: bool,
    pub cancels: u32,
}

pub fn relative_level(rec: &CancellationRecord) -> f64 {
    rec.level as f64 / rec.book_levels as f64
}

pub fn normalized_level(rec: &CancellationRecord) -> f64 {
    relative_level(rec) / (rec.level_orders as f64 / rec.side_orders as f64)
}

pub fn relative_queue_position(rec: &CancellationRecord) -> f64 {
    rec.queue_pos as f64 / rec.level_orders as f64
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioCounts {
    pub orders: u64,
    pub cancelled: u64,
}

impl RatioCounts {
    pub fn ratio(&self) -> Option<f64> {
        (self.orders > 0).then(|| self.cancelled as f64 / self.orders as f64)
    }

    fn add(&mut self, other: &RatioCounts) {
        self.orders += other.orders;
        self.cancelled += other.cancelled;
    }
}

/// Per-side cancellation ratio counters.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SideRatioCounts {
    pub all: RatioCounts,
    /// Indexed by `AggressivenessClass::index()`.
    pub by_class: [RatioCounts; 5],
    /// Cancel events (partial cancels counted individually).
    pub cancel_events: u64,
    pub dangling_cancels: u64,
}

impl SideRatioCounts {
    pub fn merge(&mut self, other: &SideRatioCounts) {
        self.all.add(&other.all);
        for (a, b) in self.by_class.iter_mut().zip(&other.by_class) {
            a.add(b);
        }
        self.cancel_events += other.cancel_events;
        self.dangling_cancels += other.dangling_cancels;
    }

    pub fn class(&self, class: AggressivenessClass) -> RatioCounts {
        self.by_class[class.index()]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ClassRatio {
    pub class: AggressivenessClass,
    pub orders: u64,
    pub cancelled: u64,
    #[serde(serialize_with = "f17_opt")]
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct SideRatios {
    pub side: Side,
    /// Cancelled orders.
    pub cancellations: u64,
    pub cancel_events: u64,
    pub orders: u64,
    #[serde(serialize_with = "f17_opt")]
    pub r: Option<f64>,
    /// r1..r4: partially filled, inside spread, at best, inside book.
    pub classes: Vec<ClassRatio>,
    pub dangling_cancels: u64,
    pub fully_filled: u64,
}

impl SideRatios {
    pub fn from_counts(side: Side, c: &SideRatioCounts) -> Self {
        SideRatios {
            side,
            cancellations: c.all.cancelled,
            cancel_events: c.cancel_events,
            orders: c.all.orders,
            r: c.all.ratio(),
            classes: AggressivenessClass::CANCELLABLE
                .iter()
                .map(|&class| {
                    let k = c.class(class);
                    ClassRatio {
                        class,
                        orders: k.orders,
                        cancelled: k.cancelled,
                        ratio: k.ratio(),
                    }
                })
                .collect(),
            dangling_cancels: c.dangling_cancels,
            fully_filled: c.class(AggressivenessClass::FullyFilled).orders,
        }
    }

    pub fn class_ratio(&self, class: AggressivenessClass) -> Option<&ClassRatio> {
        self.classes.iter().find(|c| c.class == class)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RatioReport {
    pub buy: SideRatios,
    pub sell: SideRatios,
}

impl RatioReport {
    pub fn side(&self, side: Side) -> &SideRatios {
        match side {
            Side::Buy => &self.buy,
            Side::Sell => &self.sell,
        }
    }
}

/// Counts continuous-auction orders per side and class. Dangling cancels are
/// passed separately since they belong to no lifecycle.
pub fn ratio_counts(lifecycles: &[OrderLifecycle], dangling: [u64; 2]) -> [SideRatioCounts; 2] {
    let mut out: [SideRatioCounts; 2] = Default::default();
    for lc in lifecycles.iter().filter(|lc| lc.continuous) {
        let side = &mut out[side_slot(lc.side)];
        side.all.orders += 1;
        let class = &mut side.by_class[lc.class.index()];
        class.orders += 1;
        if lc.cancelled {
            side.all.cancelled += 1;
            class.cancelled += 1;
            side.cancel_events += lc.cancels as u64;
        }
    }
    out[0].dangling_cancels = dangling[0];
    out[1].dangling_cancels = dangling[1];
    out
}

pub fn ratio_report(lifecycles: &[OrderLifecycle], dangling: [u64; 2]) -> RatioReport {
    let [buy, sell] = ratio_counts(lifecycles, dangling);
    RatioReport {
        buy: SideRatios::from_counts(Side::Buy, &buy),
        sell: SideRatios::from_counts(Side::Sell, &sell),
    }
}

pub(crate) fn side_slot(side: Side) -> usize {
    match side {
        Side::Buy => 0,
        Side::Sell => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use AggressivenessClass::*;

    fn ctx(side: Side, price: u64, same: Option<u64>, opp: Option<u64>) -> SubmissionContext {
        SubmissionContext {
            side,
            price_ticks: price,
            same_best: same,
            opposite_best: opp,
            filled_on_arrival: 0,
            rested: true,
        }
    }

    #[test]
    fn classes_by_placement() {
        assert_eq!(classify_order(&ctx(Side::Buy, 1000, Some(1000), Some(1005))), AtBest);
        assert_eq!(classify_order(&ctx(Side::Buy, 1002, Some(1000), Some(1005))), InsideSpread);
        assert_eq!(classify_order(&ctx(Side::Buy, 998, Some(1000), Some(1005))), InsideBook);
        assert_eq!(classify_order(&ctx(Side::Sell, 1004, Some(1005), Some(1000))), InsideSpread);
        assert_eq!(classify_order(&ctx(Side::Sell, 1007, Some(1005), Some(1000))), InsideBook);
        assert_eq!(classify_order(&ctx(Side::Sell, 1005, Some(1005), None)), AtBest);
        assert_eq!(classify_order(&ctx(Side::Buy, 1000, None, Some(1005))), InsideSpread);
        assert_eq!(classify_order(&ctx(Side::Buy, 1000, None, None)), InsideBook);
    }

    #[test]
    fn classes_by_fill() {
        let mut c = ctx(Side::Buy, 1005, Some(1000), Some(1005));
        c.filled_on_arrival = 100;
        c.rested = false;
        assert_eq!(classify_order(&c), FullyFilled);
        c.rested = true;
        assert_eq!(classify_order(&c), PartiallyFilled);
    }

    fn rec(level: usize, book_levels: usize, level_orders: usize, side_orders: usize, pos: usize) -> CancellationRecord {
        CancellationRecord::new(1, 1, 1, Side::Buy, level, book_levels, level_orders, side_orders, pos, 1).unwrap()
    }

    #[test]
    fn position_coordinates() {
        assert!((relative_level(&rec(2, 5, 1, 5, 1)) - 0.4).abs() < 1e-15);
        assert_eq!(relative_level(&rec(5, 5, 1, 5, 1)), 1.0);
        assert_eq!(relative_level(&rec(1, 1, 1, 1, 1)), 1.0);
        assert!((normalized_level(&rec(2, 5, 3, 30, 1)) - 4.0).abs() < 1e-12);
        // flat book: X̂ = x
        assert!((normalized_level(&rec(2, 4, 5, 20, 1)) - 2.0).abs() < 1e-12);
        assert_eq!(relative_queue_position(&rec(1, 1, 2, 2, 2)), 1.0);
        assert_eq!(relative_queue_position(&rec(1, 1, 1, 1, 1)), 1.0);
        assert!((relative_queue_position(&rec(1, 1, 10, 10, 1)) - 0.1).abs() < 1e-15);
        let r = rec(3, 7, 4, 21, 2);
        assert_eq!(r.rel_level, relative_level(&r));
        assert_eq!(r.rel_queue_pos, relative_queue_position(&r));
        assert!((r.norm_level - normalized_level(&r)).abs() < 1e-12);
    }

    #[test]
    fn simple_ratio() {
        let lcs: Vec<_> = (0..10)
            .map(|i| OrderLifecycle {
                order_id: i,
                side: Side::Buy,
                class: AtBest,
                continuous: true,
                marketable: false,
                cancelled: i < 2,
                cancels: (i < 2) as u32,
            })
            .collect();
        let rep = ratio_report(&lcs, [0, 0]);
        assert_eq!(rep.buy.r, Some(0.2));
        assert_eq!(rep.buy.cancellations, 2);
        assert_eq!(rep.sell.r, None);
        assert_eq!(rep.buy.class_ratio(AtBest).unwrap().ratio, Some(0.2));
        assert_eq!(rep.buy.class_ratio(InsideBook).unwrap().ratio, None);
    }
}
