"""Quick check of the compiled bindings. Build first:

    maturin build --release -m crates/python/Cargo.toml
    pip install target/wheels/lobcancel-*.whl
"""

import json
import math
import random

import lobcancel


def book_roundtrip():
    book = lobcancel.OrderBook()
    book.limit(1, "buy", 100, 5)
    book.limit(2, "buy", 100, 5)
    book.limit(3, "buy", 99, 5)
    assert book.best_bid() == 100 and book.best_ask() is None
    trades = book.marketable(4, "sell", 100, 7)
    assert trades == [(1, 4, 100, 5), (2, 4, 100, 2)], trades
    coords = book.cancel(3)
    assert (coords["level"], coords["book_levels"], coords["queue_pos"]) == (2, 2, 1), coords
    book.check_invariants()
    try:
        book.cancel(99)
    except ValueError:
        pass
    else:
        raise AssertionError("dangling cancel accepted")


def fits():
    assert abs(lobcancel.lognormal_z(-2.14, 1.11) - 0.5 * math.erfc(-2.14 / (1.11 * math.sqrt(2)))) < 1e-12
    assert abs(lobcancel.exp_profile_z(-30.34) - 0.96704) < 1e-5
    rng = random.Random(1)
    xs = []
    while len(xs) < 20000:
        x = rng.lognormvariate(-2.14, 1.11)
        if x <= 1.0:
            xs.append(x)
    fit = lobcancel.fit_lognormal(xs)
    assert abs(fit["mu"] + 2.14) < 0.15 and abs(fit["sigma"] - 1.11) < 0.15, fit
    p = lobcancel.lognormal_pvalue(xs, repeats=20, seed=3)
    assert 0.0 <= p <= 1.0
    tail = [1.0 / (1.0 - rng.random()) ** (1 / 1.5) for _ in range(5000)]
    pl = lobcancel.fit_powerlaw(tail)
    assert abs(pl["alpha"] - 2.5) < 0.2, pl


def pipeline():
    csv = lobcancel.generate_csv(seed=4, n_events=20000)
    n, errors = lobcancel.validate_csv(csv)
    assert errors == [] and n > 20000
    profiles = json.loads(lobcancel.profile_csv(csv))
    assert profiles["schema_version"] == 1
    buy = next(p for p in profiles["profiles"] if p["side"] == "buy")
    assert buy["counts"]["cancellations"] > 1000
    queues = json.loads(lobcancel.simulate_queues(n_queues=100000))
    top = max(queues["point_masses"], key=lambda m: m["probability"])
    assert (top["num"], top["den"]) == (1, 1)


if __name__ == "__main__":
    book_roundtrip()
    fits()
    pipeline()
    print("smoke test passed")
