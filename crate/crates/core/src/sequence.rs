//! Serializable integer count sequences.

use std::str::FromStr;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::ensemble::{EnsembleId, EnsembleTag};
use crate::error::{Error, Result};

/// Current file format version.
pub const FORMAT_VERSION: u32 = 1;

/// How the counts of a sequence were obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    Transfer,
    UpDown,
    ClosedForm,
    /// Transcribed from reference tables.
    External,
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "transfer" => Ok(Method::Transfer),
            "updown" => Ok(Method::UpDown),
            "closedform" | "closed-form" => Ok(Method::ClosedForm),
            "external" => Ok(Method::External),
            other => Err(Error::Parse(format!("unknown method {other:?}"))),
        }
    }
}

/// Record that every term was computed by two engines and compared.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub against: Method,
    pub agreed_through_n: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub n: usize,
    pub count: String,
}

#[derive(Serialize, Deserialize)]
struct RawSequence {
    format: u32,
    ensemble: String,
    colored: bool,
    method: Method,
    tool_version: String,
    #[serde(default)]
    timestamp: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    crosscheck: Option<CrossCheck>,
    entries: Vec<Entry>,
}

/// Counts `t_N` for consecutive `N` of one ensemble, with provenance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountSequence {
    pub id: EnsembleId,
    pub method: Method,
    pub tool_version: String,
    /// Seconds since the Unix epoch at creation.
    pub timestamp: u64,
    pub crosscheck: Option<CrossCheck>,
    start: usize,
    counts: Vec<BigUint>,
}

impl CountSequence {
    pub fn new(id: EnsembleId, method: Method) -> Self {
        CountSequence {
            id,
            method,
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
            crosscheck: None,
            start: 0,
            counts: Vec::new(),
        }
    }

    pub fn from_counts(id: EnsembleId, method: Method, start: usize, counts: Vec<BigUint>) -> Result<Self> {
        let mut s = CountSequence::new(id, method);
        s.start = start;
        for c in counts {
            s.push_next(c)?;
        }
        Ok(s)
    }

    /// Appends `t_n`; `n` must follow the last index.
    pub fn push(&mut self, n: usize, count: BigUint) -> Result<()> {
        if self.counts.is_empty() {
            self.start = n;
        } else if n != self.end() {
            return Err(Error::Parse(format!("entry N = {n} does not follow N = {}", self.end() - 1)));
        }
        self.push_next(count)
    }

    fn push_next(&mut self, count: BigUint) -> Result<()> {
        if count.is_zero() {
            return Err(Error::ZeroTerm { n: (self.start + self.counts.len()) as i64 });
        }
        self.counts.push(count);
        Ok(())
    }

    /// First index `N`.
    pub fn start(&self) -> usize {
        self.start
    }

    /// One past the last index.
    pub fn end(&self) -> usize {
        self.start + self.counts.len()
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn get(&self, n: usize) -> Option<&BigUint> {
        n.checked_sub(self.start).and_then(|i| self.counts.get(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &BigUint)> {
        self.counts.iter().enumerate().map(move |(i, c)| (self.start + i, c))
    }

    /// Keeps only the terms with `N < end`.
    pub fn truncated(&self, end: usize) -> CountSequence {
        let mut s = self.clone();
        s.counts.truncate(end.saturating_sub(self.start));
        s
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = RawSequence {
            format: FORMAT_VERSION,
            ensemble: self.id.tag.to_string(),
            colored: self.id.colored,
            method: self.method,
            tool_version: self.tool_version.clone(),
            timestamp: self.timestamp,
            crosscheck: self.crosscheck.clone(),
            entries: self.iter().map(|(n, c)| Entry { n, count: c.to_string() }).collect(),
        };
        serde_json::to_string_pretty(&raw).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawSequence = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        if raw.format != FORMAT_VERSION {
            return Err(Error::Parse(format!("unsupported format version {}", raw.format)));
        }
        let tag: EnsembleTag = raw.ensemble.parse()?;
        let id = EnsembleId { tag, colored: raw.colored };
        let mut seq = CountSequence::new(id, raw.method);
        seq.tool_version = raw.tool_version;
        seq.timestamp = raw.timestamp;
        seq.crosscheck = raw.crosscheck;
        for e in raw.entries {
            let count: BigUint = e.count.trim().parse().map_err(|_| {
                Error::Parse(format!("count at N = {} is not a nonnegative integer: {:?}", e.n, e.count))
            })?;
            seq.push(e.n, count)?;
        }
        Ok(seq)
    }
}
