use chrono::NaiveDateTime;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use lobcancel_core::distfit::{self, FitError};
use lobcancel_core::lobengine::{ApplyOutcome, LimitOrderBook};
use lobcancel_core::orderflow::{self, EventKind, OrderEvent, Side};
use lobcancel_core::profiles::{replay_day, BinSpec, EmpiricalPdf, ProfileSet, ProfilesConfig};
use lobcancel_core::synth::{self, GenConfig, PriceLevelLaw, QueuePositionLaw, QueueSimConfig};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse_side(side: &str) -> PyResult<Side> {
    match side {
        "B" | "b" | "buy" => Ok(Side::Buy),
        "S" | "s" | "sell" => Ok(Side::Sell),
        other => Err(PyValueError::new_err(format!("unknown side {other:?}"))),
    }
}

fn binned(samples: Vec<f64>, bins: usize) -> PyResult<EmpiricalPdf> {
    EmpiricalPdf::accumulate(&samples, BinSpec::uniform(bins)).map_err(value_err)
}

fn fit_err(e: FitError) -> PyErr {
    value_err(e)
}

/// `(price_ticks, [(order_id, remaining), ...])`
type Level = (u64, Vec<(u64, u64)>);

/// Price-time priority book. Trades come back as
/// `(maker_id, taker_id, price_ticks, size)` tuples.
#[pyclass(name = "OrderBook")]
struct PyOrderBook {
    book: LimitOrderBook,
    seq: u64,
}

impl PyOrderBook {
    fn apply(&mut self, kind: EventKind, side: Side, order_id: u64, price_ticks: u64, size: u64) -> PyResult<ApplyOutcome> {
        self.seq += 1;
        let event = OrderEvent {
            seq: self.seq,
            timestamp: NaiveDateTime::default(),
            instrument: String::new(),
            order_id,
            kind,
            side,
            price_ticks,
            size,
        };
        self.book.apply_event(&event).map_err(value_err)
    }
}

#[pymethods]
impl PyOrderBook {
    #[new]
    fn new() -> Self {
        PyOrderBook {
            book: LimitOrderBook::new(),
            seq: 0,
        }
    }

    fn limit(&mut self, order_id: u64, side: &str, price_ticks: u64, size: u64) -> PyResult<Vec<(u64, u64, u64, u64)>> {
        let out = self.apply(EventKind::SubmitLimit, parse_side(side)?, order_id, price_ticks, size)?;
        Ok(out.trades.iter().map(|t| (t.maker_id, t.taker_id, t.price_ticks, t.size)).collect())
    }

    fn marketable(&mut self, order_id: u64, side: &str, price_ticks: u64, size: u64) -> PyResult<Vec<(u64, u64, u64, u64)>> {
        let out = self.apply(EventKind::SubmitMarketable, parse_side(side)?, order_id, price_ticks, size)?;
        Ok(out.trades.iter().map(|t| (t.maker_id, t.taker_id, t.price_ticks, t.size)).collect())
    }

    /// Cancels `size` units (0 = all) and returns the order's position
    /// coordinates just before removal.
    #[pyo3(signature = (order_id, size = 0))]
    fn cancel<'py>(&mut self, py: Python<'py>, order_id: u64, size: u64) -> PyResult<Bound<'py, PyDict>> {
        let (side, price) = self
            .book
            .order(order_id)
            .map(|o| (o.side, o.price_ticks))
            .unwrap_or((Side::Buy, 1));
        let out = self.apply(EventKind::Cancel, side, order_id, price, size)?;
        let r = out.cancellation.expect("successful cancel carries a record");
        let d = PyDict::new(py);
        d.set_item("t", r.t)?;
        d.set_item("side", r.side.as_str())?;
        d.set_item("level", r.level)?;
        d.set_item("book_levels", r.book_levels)?;
        d.set_item("level_orders", r.level_orders)?;
        d.set_item("side_orders", r.side_orders)?;
        d.set_item("queue_pos", r.queue_pos)?;
        d.set_item("rel_level", r.rel_level)?;
        d.set_item("norm_level", r.norm_level)?;
        d.set_item("rel_queue_pos", r.rel_queue_pos)?;
        d.set_item("cancelled_size", r.cancelled_size)?;
        Ok(d)
    }

    fn best_bid(&self) -> Option<u64> {
        self.book.best_bid()
    }

    fn best_ask(&self) -> Option<u64> {
        self.book.best_ask()
    }

    fn level_count(&self, side: &str) -> PyResult<usize> {
        Ok(self.book.level_count(parse_side(side)?))
    }

    fn order_count(&self, side: &str) -> PyResult<usize> {
        Ok(self.book.order_count(parse_side(side)?))
    }

    /// Levels best first, each as `(price_ticks, [(order_id, remaining), ...])`.
    fn levels(&self, side: &str) -> PyResult<Vec<Level>> {
        Ok(self
            .book
            .levels(parse_side(side)?)
            .map(|l| (l.price_ticks, l.queue.iter().map(|o| (o.order_id, o.remaining_size)).collect()))
            .collect())
    }

    fn check_invariants(&self) -> PyResult<()> {
        self.book.check_invariants().map_err(value_err)
    }
}

/// Parses order-flow CSV text; returns `(event_count, error_messages)`.
#[pyfunction]
fn validate_csv(text: &str) -> PyResult<(usize, Vec<String>)> {
    let report = orderflow::parse_stream_lenient(text.as_bytes()).map_err(value_err)?;
    Ok((report.events.len(), report.errors.iter().map(|e| e.to_string()).collect()))
}

/// Replays CSV text and returns the profiles document as JSON.
#[pyfunction]
#[pyo3(signature = (text, bins = 50, log_bins = 60))]
fn profile_csv(py: Python<'_>, text: &str, bins: usize, log_bins: usize) -> PyResult<String> {
    let events = orderflow::parse_str(text).map_err(value_err)?;
    py.detach(|| {
        let mut days = Vec::new();
        for (_, day_events) in orderflow::partition_by_day(events) {
            days.push(replay_day(&day_events).map_err(value_err)?);
        }
        let cfg = ProfilesConfig {
            unit_bins: bins,
            log_bins,
        };
        Ok(ProfileSet::build(&days, &cfg).to_json())
    })
}

#[pyfunction]
fn lognormal_z(mu: f64, sigma: f64) -> f64 {
    distfit::lognormal_z(mu, sigma)
}

#[pyfunction]
fn exp_profile_z(beta: f64) -> f64 {
    distfit::exp_profile_z(beta)
}

#[pyfunction]
#[pyo3(signature = (samples, bins = 50))]
fn fit_lognormal<'py>(py: Python<'py>, samples: Vec<f64>, bins: usize) -> PyResult<Bound<'py, PyDict>> {
    let fit = distfit::fit_lognormal_lsq(&binned(samples, bins)?).map_err(fit_err)?;
    let d = PyDict::new(py);
    d.set_item("mu", fit.mu)?;
    d.set_item("sigma", fit.sigma)?;
    d.set_item("z", fit.z)?;
    d.set_item("rms", fit.rms)?;
    d.set_item("at_bound", fit.at_bound)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (samples, repeats = 100, seed = 0, bins = 50))]
fn lognormal_pvalue(py: Python<'_>, samples: Vec<f64>, repeats: usize, seed: u64, bins: usize) -> PyResult<f64> {
    let pdf = binned(samples, bins)?;
    py.detach(|| {
        let fit = distfit::fit_lognormal_lsq(&pdf).map_err(fit_err)?;
        Ok(distfit::gof_pvalue_mc(&pdf, &fit, repeats, seed).map_err(fit_err)?.p_value)
    })
}

#[pyfunction]
#[pyo3(signature = (samples, bins = 50))]
fn fit_exp_profile<'py>(py: Python<'py>, samples: Vec<f64>, bins: usize) -> PyResult<Bound<'py, PyDict>> {
    let fit = distfit::fit_exp_profile(&binned(samples, bins)?).map_err(fit_err)?;
    let d = PyDict::new(py);
    d.set_item("beta", fit.beta)?;
    d.set_item("z", fit.z)?;
    d.set_item("rms", fit.rms)?;
    d.set_item("at_bound", fit.at_bound)?;
    Ok(d)
}

#[pyfunction]
fn fit_powerlaw<'py>(py: Python<'py>, samples: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let fit = distfit::fit_powerlaw_tail(&samples).map_err(fit_err)?;
    let d = PyDict::new(py);
    d.set_item("alpha", fit.alpha)?;
    d.set_item("x_min", fit.x_min)?;
    d.set_item("m", fit.m)?;
    d.set_item("sigma_hat", fit.sigma_hat)?;
    d.set_item("ks", fit.ks)?;
    Ok(d)
}

/// Uniform-queue experiment; returns the result document as JSON.
#[pyfunction]
#[pyo3(signature = (n_queues = 1_000_000, max_len = 100, seed = 0, bins = 50))]
fn simulate_queues(py: Python<'_>, n_queues: u64, max_len: u32, seed: u64, bins: usize) -> PyResult<String> {
    let cfg = QueueSimConfig {
        n_queues,
        max_len,
        seed,
        bins,
    };
    py.detach(|| synth::simulate_uniform_queues(&cfg).map(|r| r.to_json()).map_err(value_err))
}

/// Synthetic order flow as CSV text. `mu`/`sigma` and `beta` set the
/// cancellation laws; omitted ones keep the defaults.
#[pyfunction]
#[pyo3(signature = (seed = 0, n_events = 100_000, mu = None, sigma = None, beta = None))]
fn generate_csv(
    py: Python<'_>,
    seed: u64,
    n_events: usize,
    mu: Option<f64>,
    sigma: Option<f64>,
    beta: Option<f64>,
) -> PyResult<String> {
    let mut cfg = GenConfig {
        seed,
        n_events,
        ..GenConfig::default()
    };
    if let PriceLevelLaw::TruncatedLognormal { mu: m, sigma: s } = &mut cfg.price_level_law {
        *m = mu.unwrap_or(*m);
        *s = sigma.unwrap_or(*s);
    }
    if let (Some(b), QueuePositionLaw::ExpProfile { beta: current }) = (beta, &mut cfg.queue_position_law) {
        *current = b;
    }
    py.detach(|| {
        synth::generate_stream(&cfg)
            .map(|events| orderflow::to_csv_string(&events))
            .map_err(value_err)
    })
}

#[pymodule]
fn lobcancel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOrderBook>()?;
    m.add_function(wrap_pyfunction!(validate_csv, m)?)?;
    m.add_function(wrap_pyfunction!(profile_csv, m)?)?;
    m.add_function(wrap_pyfunction!(lognormal_z, m)?)?;
    m.add_function(wrap_pyfunction!(exp_profile_z, m)?)?;
    m.add_function(wrap_pyfunction!(fit_lognormal, m)?)?;
    m.add_function(wrap_pyfunction!(lognormal_pvalue, m)?)?;
    m.add_function(wrap_pyfunction!(fit_exp_profile, m)?)?;
    m.add_function(wrap_pyfunction!(fit_powerlaw, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_queues, m)?)?;
    m.add_function(wrap_pyfunction!(generate_csv, m)?)?;
    Ok(())
}
