//! Float formatting for JSON artifacts: every finite value is written with 17
//! significant digits, non-finite values as `null`.

use serde::ser::{SerializeSeq, Serializer};
use serde_json::value::RawValue;

pub const SCHEMA_VERSION: u32 = 1;

pub fn format17(v: f64) -> String {
    format!("{v:.16e}")
}

fn raw(v: f64) -> Box<RawValue> {
    RawValue::from_string(format17(v)).expect("exponent notation is valid JSON")
}

pub fn f17<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_some(&raw(*v))
    } else {
        s.serialize_none()
    }
}

pub fn f17_opt<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match v {
        Some(v) => f17(v, s),
        None => s.serialize_none(),
    }
}

pub fn f17_vec<S: Serializer, V: AsRef<[f64]>>(v: &V, s: S) -> Result<S::Ok, S::Error> {
    let v = v.as_ref();
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        if x.is_finite() {
            seq.serialize_element(&raw(*x))?;
        } else {
            seq.serialize_element(&Option::<f64>::None)?;
        }
    }
    seq.end()
}
