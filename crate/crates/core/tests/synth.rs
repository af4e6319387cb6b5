use lobcancel_core::orderflow::{parse_str, to_csv_string, EventKind};
use lobcancel_core::profiles::replay_day;
use lobcancel_core::synth::{generate_stream, simulate_uniform_queues, GenConfig, QueueSimConfig};

/// P(Y = p/q) for q in lowest terms: Σ over multiples k of q up to `max_len` of 1/(max_len·k).
fn exact_mass(q: u32, max_len: u32) -> f64 {
    (1..=max_len).filter(|k| k % q == 0).map(|k| 1.0 / (max_len as f64 * k as f64)).sum()
}

#[test]
fn point_masses_match_the_exact_law() {
    let cfg = QueueSimConfig {
        n_queues: 200_000,
        max_len: 100,
        seed: 11,
        bins: 50,
    };
    let res = simulate_uniform_queues(&cfg).unwrap();
    let total: f64 = res.point_masses.iter().map(|p| p.probability).sum();
    assert!((total - 1.0).abs() < 1e-12);
    for (num, den) in [(1, 1), (1, 2), (1, 3), (2, 3), (1, 4), (3, 7), (1, 100)] {
        let want = exact_mass(den, 100);
        let sd = (want * (1.0 - want) / cfg.n_queues as f64).sqrt();
        let got = res.mass_at(num, den);
        assert!((got - want).abs() < 5.0 * sd, "{num}/{den}: {got} vs {want}");
    }
    let top = res.largest(2);
    assert_eq!((top[0].num, top[0].den), (1, 1));
    assert_eq!((top[1].num, top[1].den), (1, 2));
}

#[test]
fn same_seed_same_queues() {
    let cfg = QueueSimConfig {
        n_queues: 5000,
        ..QueueSimConfig::default()
    };
    assert_eq!(
        simulate_uniform_queues(&cfg).unwrap().to_json(),
        simulate_uniform_queues(&cfg).unwrap().to_json()
    );
}

#[test]
fn generated_stream_is_clean() {
    let cfg = GenConfig {
        seed: 21,
        n_events: 30_000,
        ..GenConfig::default()
    };
    let events = generate_stream(&cfg).unwrap();
    for e in &events {
        e.validate().unwrap();
    }
    assert!(events.windows(2).all(|w| w[0].seq < w[1].seq && w[0].timestamp <= w[1].timestamp));
    assert_eq!(parse_str(&to_csv_string(&events)).unwrap(), events);

    let day = replay_day(&events).unwrap();
    let d = &day.diagnostics;
    assert_eq!(d.dangling_cancels_buy + d.dangling_cancels_sell, 0);
    assert_eq!(d.rejected_cancels, 0);
    assert_eq!(d.out_of_session_events, 0);
    let cancels = events.iter().filter(|e| e.kind == EventKind::Cancel).count();
    assert_eq!(day.records.len(), cancels);
    assert!(cancels > 4000);
    day.book.check_invariants().unwrap();
}
