//! Fixed-precision number formatting for the JSON and CSV writers.
//!
//! JSON numbers carry 17 significant digits (round-trip safe); CSV numbers
//! carry 12. Non-finite values become `null` in JSON and `nan`/`inf` in CSV.

use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

/// `x` with `digits` significant digits in scientific notation.
pub fn sig(x: f64, digits: usize) -> String {
    if x.is_nan() {
        return "nan".to_string();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf" } else { "-inf" }.to_string();
    }
    format!("{:.*e}", digits.saturating_sub(1), x)
}

pub fn csv(x: f64) -> String {
    sig(x, 12)
}

pub fn json_text(x: f64) -> String {
    if x.is_finite() {
        sig(x, 17)
    } else {
        "null".to_string()
    }
}

fn raw(x: f64) -> Box<RawValue> {
    RawValue::from_string(json_text(x)).expect("formatted float is valid JSON")
}

pub fn json_f64<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    raw(*x).serialize(s)
}

pub fn json_opt_f64<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => raw(*v).serialize(s),
        None => s.serialize_none(),
    }
}

pub fn json_vec_f64<S: Serializer>(xs: &[f64], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(xs.len()))?;
    for x in xs {
        seq.serialize_element(&raw(*x))?;
    }
    seq.end()
}
