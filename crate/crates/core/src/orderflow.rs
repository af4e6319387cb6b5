//! Order-flow event model and the CSV stream format.
//!
//! A stream file is UTF-8 CSV with the header
//! `seq,timestamp,instrument,order_id,kind,side,price_ticks,size`.
//! `kind` is one of `L` (limit), `M` (marketable) or `C` (cancel), `side` is
//! `B` or `S`, and timestamps are ISO-8601 with millisecond precision, e.g.
//! `2003-01-02T09:31:05.120`. Prices are integer ticks of 0.01 CNY.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::io::{self, BufRead, Write};

use chrono::{NaiveDate, NaiveDateTime, NaiveTime, Timelike};
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const HEADER: &str = "seq,timestamp,instrument,order_id,kind,side,price_ticks,size";
const TIMESTAMP_FMT: &str = "%Y-%m-%dT%H:%M:%S%.3f";
const COLUMNS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Buy,
    Sell,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::Buy => Side::Sell,
            Side::Sell => Side::Buy,
        }
    }

    pub fn code(self) -> char {
        match self {
            Side::Buy => 'B',
            Side::Sell => 'S',
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Side::Buy => "buy",
            Side::Sell => "sell",
        }
    }

    pub const BOTH: [Side; 2] = [Side::Buy, Side::Sell];
}

impl fmt::Display for Side {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EventKind {
    SubmitLimit,
    SubmitMarketable,
    Cancel,
}

impl EventKind {
    pub fn code(self) -> char {
        match self {
            EventKind::SubmitLimit => 'L',
            EventKind::SubmitMarketable => 'M',
            EventKind::Cancel => 'C',
        }
    }

    pub fn is_submit(self) -> bool {
        !matches!(self, EventKind::Cancel)
    }
}

/// One record of the order-flow stream.
///
/// For cancels, `size == 0` means "cancel the whole remainder"; `side` and
/// `price_ticks` are carried along but routing is by `order_id`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderEvent {
    pub seq: u64,
    pub timestamp: NaiveDateTime,
    pub instrument: String,
    pub order_id: u64,
    pub kind: EventKind,
    pub side: Side,
    pub price_ticks: u64,
    pub size: u64,
}

impl OrderEvent {
    pub fn phase(&self) -> SessionPhase {
        SessionPhase::of(self.timestamp.time())
    }

    pub fn day(&self) -> DayKey {
        DayKey {
            instrument: self.instrument.clone(),
            date: self.timestamp.date(),
        }
    }

    /// Checks the per-record invariants that do not depend on other records.
    pub fn validate(&self) -> Result<(), ParseErrorKind> {
        if self.kind.is_submit() {
            if self.size == 0 {
                return Err(ParseErrorKind::InvalidValue("submission size must be positive".into()));
            }
            if self.price_ticks == 0 {
                return Err(ParseErrorKind::InvalidValue("submission price must be positive".into()));
            }
        }
        if self.instrument.is_empty() {
            return Err(ParseErrorKind::InvalidValue("empty instrument code".into()));
        }
        if !self.timestamp.nanosecond().is_multiple_of(1_000_000) {
            return Err(ParseErrorKind::InvalidValue(
                "timestamp finer than milliseconds".into(),
            ));
        }
        Ok(())
    }

    /// Formats the event as one CSV row (no trailing newline).
    pub fn to_csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.seq,
            self.timestamp.format(TIMESTAMP_FMT),
            self.instrument,
            self.order_id,
            self.kind.code(),
            self.side.code(),
            self.price_ticks,
            self.size
        )
    }
}

/// Instrument-day partition key.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DayKey {
    pub instrument: String,
    pub date: NaiveDate,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SessionPhase {
    OpeningCall,
    Cool,
    ContinuousAM,
    Lunch,
    ContinuousPM,
    Closed,
}

impl SessionPhase {
    /// Maps a wall-clock time onto the trading session. Windows are half-open.
    pub fn of(time: NaiveTime) -> SessionPhase {
        let hm = |h, m| NaiveTime::from_hms_opt(h, m, 0).unwrap();
        if time < hm(9, 15) {
            SessionPhase::Closed
        } else if time < hm(9, 25) {
            SessionPhase::OpeningCall
        } else if time < hm(9, 30) {
            SessionPhase::Cool
        } else if time < hm(11, 30) {
            SessionPhase::ContinuousAM
        } else if time < hm(13, 0) {
            SessionPhase::Lunch
        } else if time < hm(15, 0) {
            SessionPhase::ContinuousPM
        } else {
            SessionPhase::Closed
        }
    }

    pub fn is_continuous(self) -> bool {
        matches!(self, SessionPhase::ContinuousAM | SessionPhase::ContinuousPM)
    }

    /// Opening call and cool period: orders are accepted but held.
    pub fn is_call(self) -> bool {
        matches!(self, SessionPhase::OpeningCall | SessionPhase::Cool)
    }
}

pub fn phase_of(timestamp: &NaiveDateTime) -> SessionPhase {
    SessionPhase::of(timestamp.time())
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("bad header, expected `{HEADER}`")]
    BadHeader,
    #[error("malformed row: expected {expected} columns, found {found}")]
    MalformedRow { expected: usize, found: usize },
    #[error("unknown {field} `{value}`")]
    BadEnum { field: &'static str, value: String },
    #[error("cannot parse {field} `{value}`")]
    BadField { field: &'static str, value: String },
    #[error("invalid value: {0}")]
    InvalidValue(String),
    #[error("sequence number {found} does not increase (previous {previous})")]
    NonMonotoneSeq { previous: u64, found: u64 },
    #[error("timestamp goes backwards within {instrument} on {date}")]
    NonMonotoneTimestamp { instrument: String, date: NaiveDate },
    #[error("order id {order_id} submitted twice for {instrument}")]
    DuplicateOrderId { instrument: String, order_id: u64 },
}

/// A rejected record, with its 1-based line number in the source.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Error)]
pub enum StreamError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("{} invalid record(s); first: {}", .0.len(), .0[0])]
    Invalid(Vec<ParseError>),
}

/// Everything a lenient pass over a stream found.
#[derive(Debug, Default)]
pub struct ParseReport {
    pub events: Vec<OrderEvent>,
    pub errors: Vec<ParseError>,
    pub lines: usize,
}

impl ParseReport {
    pub fn is_ok(&self) -> bool {
        self.errors.is_empty()
    }
}

fn parse_fields(row: &str) -> Result<OrderEvent, ParseErrorKind> {
    let cols: Vec<&str> = row.split(',').collect();
    if cols.len() != COLUMNS {
        return Err(ParseErrorKind::MalformedRow {
            expected: COLUMNS,
            found: cols.len(),
        });
    }
    let int = |field: &'static str, s: &str| {
        s.trim().parse::<u64>().map_err(|_| ParseErrorKind::BadField {
            field,
            value: s.to_string(),
        })
    };
    let seq = int("seq", cols[0])?;
    let timestamp = NaiveDateTime::parse_from_str(cols[1].trim(), "%Y-%m-%dT%H:%M:%S%.f")
        .map_err(|_| ParseErrorKind::BadField {
            field: "timestamp",
            value: cols[1].to_string(),
        })?;
    let instrument = cols[2].trim().to_string();
    let order_id = int("order_id", cols[3])?;
    let kind = match cols[4].trim() {
        "L" => EventKind::SubmitLimit,
        "M" => EventKind::SubmitMarketable,
        "C" => EventKind::Cancel,
        other => {
            return Err(ParseErrorKind::BadEnum {
                field: "kind",
                value: other.to_string(),
            })
        }
    };
    let side = match cols[5].trim() {
        "B" => Side::Buy,
        "S" => Side::Sell,
        other => {
            return Err(ParseErrorKind::BadEnum {
                field: "side",
                value: other.to_string(),
            })
        }
    };
    let price_ticks = int("price_ticks", cols[6])?;
    let size = int("size", cols[7])?;
    let event = OrderEvent {
        seq,
        timestamp,
        instrument,
        order_id,
        kind,
        side,
        price_ticks,
        size,
    };
    event.validate()?;
    Ok(event)
}

/// Parses a single data row. Cross-record checks are not applied.
pub fn parse_row(row: &str) -> Result<OrderEvent, ParseErrorKind> {
    parse_fields(row)
}

/// Parses the whole stream, collecting every error instead of stopping at the
/// first one. Rows that fail are skipped; later rows are still checked.
pub fn parse_stream_lenient<R: BufRead>(source: R) -> io::Result<ParseReport> {
    let mut report = ParseReport::default();
    let mut header_seen = false;
    let mut last_seq: Option<u64> = None;
    let mut last_time: BTreeMap<DayKey, NaiveDateTime> = BTreeMap::new();
    let mut submitted: HashSet<(DayKey, u64)> = HashSet::new();

    for (idx, line) in source.lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        report.lines = lineno;
        let row = line.trim_end();
        if row.is_empty() {
            continue;
        }
        if !header_seen {
            header_seen = true;
            if row.trim_start_matches('\u{feff}') != HEADER {
                report.errors.push(ParseError {
                    line: lineno,
                    kind: ParseErrorKind::BadHeader,
                });
            }
            continue;
        }
        let push = |report: &mut ParseReport, kind| {
            report.errors.push(ParseError { line: lineno, kind });
        };
        let event = match parse_fields(row) {
            Ok(ev) => ev,
            Err(kind) => {
                push(&mut report, kind);
                continue;
            }
        };
        if let Some(prev) = last_seq {
            if event.seq <= prev {
                push(
                    &mut report,
                    ParseErrorKind::NonMonotoneSeq {
                        previous: prev,
                        found: event.seq,
                    },
                );
                continue;
            }
        }
        let day = event.day();
        if let Some(prev) = last_time.get(&day) {
            if event.timestamp < *prev {
                push(
                    &mut report,
                    ParseErrorKind::NonMonotoneTimestamp {
                        instrument: day.instrument.clone(),
                        date: day.date,
                    },
                );
                continue;
            }
        }
        if event.kind.is_submit() && !submitted.insert((day.clone(), event.order_id)) {
            push(
                &mut report,
                ParseErrorKind::DuplicateOrderId {
                    instrument: day.instrument.clone(),
                    order_id: event.order_id,
                },
            );
            continue;
        }
        last_seq = Some(event.seq);
        last_time.insert(day, event.timestamp);
        report.events.push(event);
    }
    if !header_seen {
        report.errors.push(ParseError {
            line: 1,
            kind: ParseErrorKind::BadHeader,
        });
    }
    Ok(report)
}

/// Strict parse: returns the events in file order, or every error found.
pub fn parse_stream<R: BufRead>(source: R) -> Result<Vec<OrderEvent>, StreamError> {
    let report = parse_stream_lenient(source)?;
    if report.errors.is_empty() {
        Ok(report.events)
    } else {
        Err(StreamError::Invalid(report.errors))
    }
}

pub fn parse_str(text: &str) -> Result<Vec<OrderEvent>, StreamError> {
    parse_stream(text.as_bytes())
}

/// Writes events in the canonical CSV layout, header included.
pub fn write_stream<W: Write>(events: &[OrderEvent], mut out: W) -> io::Result<()> {
    writeln!(out, "{HEADER}")?;
    for ev in events {
        writeln!(out, "{}", ev.to_csv_row())?;
    }
    Ok(())
}

pub fn to_csv_string(events: &[OrderEvent]) -> String {
    let mut buf = Vec::with_capacity(64 * (events.len() + 1));
    write_stream(events, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV output is ASCII")
}

/// Splits a stream into instrument-days, keeping file order within each.
pub fn partition_by_day(events: Vec<OrderEvent>) -> BTreeMap<DayKey, Vec<OrderEvent>> {
    let mut out: BTreeMap<DayKey, Vec<OrderEvent>> = BTreeMap::new();
    for ev in events {
        out.entry(ev.day()).or_default().push(ev);
    }
    out
}
