mod common;

use common::{compare, random_stream};
use lobcancel_core::lobengine::LimitOrderBook;
use lobcancel_core::orderflow::{EventKind, Side};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn matches_reference_on_random_streams() {
    for seed in 0..300u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let events = random_stream(&mut rng, 200);
        if let Err(msg) = compare(&events) {
            panic!("seed {seed}: {msg}");
        }
    }
}

#[test]
fn cancel_coordinates_on_a_known_book() {
    // bids: 101 [a], 100 [b, c, d], 99 [e]
    let evs = [
        common::ev(1, EventKind::SubmitLimit, Side::Buy, 1, 101, 5),
        common::ev(2, EventKind::SubmitLimit, Side::Buy, 2, 100, 5),
        common::ev(3, EventKind::SubmitLimit, Side::Buy, 3, 100, 5),
        common::ev(4, EventKind::SubmitLimit, Side::Buy, 4, 100, 5),
        common::ev(5, EventKind::SubmitLimit, Side::Buy, 5, 99, 5),
    ];
    let mut book = LimitOrderBook::new();
    for e in &evs {
        book.apply_event(e).unwrap();
    }
    let out = book
        .apply_event(&common::ev(6, EventKind::Cancel, Side::Buy, 3, 100, 0))
        .unwrap();
    let r = out.cancellation.unwrap();
    assert_eq!((r.level, r.book_levels, r.level_orders, r.side_orders, r.queue_pos), (2, 3, 3, 5, 2));
    assert!((r.rel_level - 2.0 / 3.0).abs() < 1e-15);
    assert!((r.norm_level - (2.0 / 3.0) * 5.0 / 3.0).abs() < 1e-15);
    assert!((r.rel_queue_pos - 2.0 / 3.0).abs() < 1e-15);
    assert_eq!(r.t, 1);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn conservation_holds_at_every_step(seed in any::<u64>(), len in 1usize..200) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let events = random_stream(&mut rng, len);
        let mut book = LimitOrderBook::new();
        let (mut submitted, mut traded, mut cancelled) = (0u64, 0u64, 0u64);
        let mut last_t = 0;
        for e in &events {
            if let Ok(out) = book.apply_event(e) {
                if e.kind.is_submit() {
                    submitted += e.size;
                    traded += out.filled();
                    prop_assert_eq!(out.filled() + out.rested_size, e.size);
                }
                if let Some(rec) = out.cancellation {
                    cancelled += rec.cancelled_size;
                    prop_assert_eq!(rec.t, last_t + 1);
                    last_t = rec.t;
                    prop_assert!(rec.rel_level > 0.0 && rec.rel_level <= 1.0);
                    prop_assert!(rec.rel_queue_pos > 0.0 && rec.rel_queue_pos <= 1.0);
                    prop_assert!(rec.norm_level > 0.0);
                }
            }
            // every traded unit leaves both the taker and a maker
            let resting = book.resting_volume(Side::Buy) + book.resting_volume(Side::Sell);
            prop_assert_eq!(resting, submitted - 2 * traded - cancelled);
            if let (Some(b), Some(a)) = (book.best_bid(), book.best_ask()) {
                prop_assert!(b < a);
            }
            prop_assert!(book.check_invariants().is_ok());
        }
        prop_assert_eq!(book.cancellations(), last_t);
    }

    #[test]
    fn failed_cancels_leave_the_book_alone(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let events = random_stream(&mut rng, 120);
        let mut book = LimitOrderBook::new();
        for e in &events {
            let before = book.dump();
            if book.apply_event(e).is_err() {
                prop_assert_eq!(book.dump(), before);
            }
        }
    }
}
