//! Text parsers for the config file, scalar-or-range values, vectors and the
//! nonlinearity registry. These are the fuzzed entry points.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

/// Keys accepted in a config file. They match the long flag names.
pub const CONFIG_KEYS: &[&str] = &[
    "n",
    "R",
    "a",
    "x0",
    "beta",
    "h",
    "order",
    "richardson",
    "samples",
    "seed",
    "out",
    "format",
    "f",
    "seed-value",
    "tol",
    "radius",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("config line {line}: expected `key = value`")]
    MissingEquals { line: usize },
    #[error("config line {line}: empty key")]
    EmptyKey { line: usize },
    #[error("config line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("config line {line}: duplicate key `{key}`")]
    DuplicateKey { line: usize, key: String },
    #[error("invalid number `{0}`")]
    Number(String),
    #[error("invalid count `{0}`: expected a positive integer")]
    Count(String),
    #[error("invalid range `{0}`: expected `value` or `lo:hi:count`")]
    RangeShape(String),
    #[error("invalid range `{0}`: a single-point range needs lo == hi")]
    DegenerateRange(String),
    #[error("empty vector")]
    EmptyVector,
    #[error("unknown nonlinearity `{0}`: expected const:c, power:k or paper-n1")]
    UnknownF(String),
    #[error("invalid boolean `{0}`")]
    Bool(String),
}

/// Parses a flat `key = value` document. `#` starts a comment; blank lines
/// are ignored. Unknown and repeated keys are errors.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>, ParseError> {
    let mut out = BTreeMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or(ParseError::MissingEquals { line })?;
        let key = key.trim();
        if key.is_empty() {
            return Err(ParseError::EmptyKey { line });
        }
        if !CONFIG_KEYS.contains(&key) {
            return Err(ParseError::UnknownKey {
                line,
                key: key.to_string(),
            });
        }
        if out.insert(key.to_string(), value.trim().to_string()).is_some() {
            return Err(ParseError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
    }
    Ok(out)
}

/// A finite scalar, rejecting `nan`/`inf`.
pub fn parse_f64(s: &str) -> Result<f64, ParseError> {
    match s.trim().parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(ParseError::Number(s.to_string())),
    }
}

pub fn parse_count(s: &str) -> Result<usize, ParseError> {
    match s.trim().parse::<usize>() {
        Ok(v) if v > 0 => Ok(v),
        _ => Err(ParseError::Count(s.to_string())),
    }
}

pub fn parse_bool(s: &str) -> Result<bool, ParseError> {
    match s.trim() {
        "true" | "1" | "yes" => Ok(true),
        "false" | "0" | "no" => Ok(false),
        other => Err(ParseError::Bool(other.to_string())),
    }
}

/// `count` evenly spaced values from `lo` to `hi` inclusive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Range {
    pub fn single(v: f64) -> Self {
        Self { lo: v, hi: v, count: 1 }
    }

    pub fn is_single(&self) -> bool {
        self.count == 1
    }

    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let last = (self.count - 1) as f64;
        (0..self.count)
            .map(|i| {
                if i + 1 == self.count {
                    self.hi
                } else {
                    self.lo + (self.hi - self.lo) * (i as f64 / last)
                }
            })
            .collect()
    }
}

impl fmt::Display for Range {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.count == 1 {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "{}:{}:{}", self.lo, self.hi, self.count)
        }
    }
}

/// `value` or `lo:hi:count`.
pub fn parse_range(s: &str) -> Result<Range, ParseError> {
    let parts: Vec<&str> = s.split(':').collect();
    match parts.as_slice() {
        [v] => Ok(Range::single(parse_f64(v)?)),
        [lo, hi, count] => {
            let lo = parse_f64(lo)?;
            let hi = parse_f64(hi)?;
            let count = parse_count(count)?;
            if count == 1 && lo != hi {
                return Err(ParseError::DegenerateRange(s.to_string()));
            }
            Ok(Range { lo, hi, count })
        }
        _ => Err(ParseError::RangeShape(s.to_string())),
    }
}

/// Comma-separated finite components.
pub fn parse_vector(s: &str) -> Result<Vec<f64>, ParseError> {
    if s.trim().is_empty() {
        return Err(ParseError::EmptyVector);
    }
    s.split(',').map(parse_f64).collect()
}

/// Nonlinearities available to `solve1d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FSpec {
    /// `f(u) = c`.
    Const(f64),
    /// `f(u) = max(u, 0)^k`.
    Power(f64),
    /// The one-dimensional member of the closed-form family, built from the
    /// run's `R`, `a` and `β`, extended by `0` for `u ≤ 0`.
    PaperN1,
}

impl fmt::Display for FSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FSpec::Const(c) => write!(f, "const:{c}"),
            FSpec::Power(k) => write!(f, "power:{k}"),
            FSpec::PaperN1 => write!(f, "paper-n1"),
        }
    }
}

pub fn parse_f_spec(s: &str) -> Result<FSpec, ParseError> {
    let s = s.trim();
    if s == "paper-n1" {
        return Ok(FSpec::PaperN1);
    }
    match s.split_once(':') {
        Some(("const", v)) => Ok(FSpec::Const(parse_f64(v)?)),
        Some(("power", v)) => {
            let k = parse_f64(v)?;
            if k < 0.0 {
                return Err(ParseError::Number(v.to_string()));
            }
            Ok(FSpec::Power(k))
        }
        _ => Err(ParseError::UnknownF(s.to_string())),
    }
}
