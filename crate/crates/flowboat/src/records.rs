//! Line-delimited log formats and per-line validation.

use std::fmt;
use std::str::FromStr;

use flowboat_core::model::{GlanceEvent, InteractionEvent, RecordError, SignalSample};
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecordKind {
    Interactions,
    Glances,
    Signals,
}

impl RecordKind {
    pub const ALL: [RecordKind; 3] = [RecordKind::Interactions, RecordKind::Glances, RecordKind::Signals];

    pub fn as_str(self) -> &'static str {
        match self {
            RecordKind::Interactions => "interactions",
            RecordKind::Glances => "glances",
            RecordKind::Signals => "signals",
        }
    }

    pub fn required_fields(self) -> &'static [&'static str] {
        match self {
            RecordKind::Interactions => &[
                "vehicle_id",
                "session_id",
                "timestamp_ms",
                "element_id",
                "action",
                "software_version",
                "car_model",
            ],
            RecordKind::Glances => &["vehicle_id", "session_id", "aoi", "start_ms", "end_ms"],
            RecordKind::Signals => &[
                "vehicle_id",
                "session_id",
                "timestamp_ms",
                "speed_mps",
                "steering_angle_deg",
            ],
        }
    }

    /// Segment file name used by the store and the generator.
    pub fn file_name(self) -> &'static str {
        match self {
            RecordKind::Interactions => "interactions.jsonl",
            RecordKind::Glances => "glances.jsonl",
            RecordKind::Signals => "signals.jsonl",
        }
    }
}

impl fmt::Display for RecordKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RecordKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown record kind {s:?}"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RejectReason {
    EmptyLine,
    Malformed,
    MissingField,
    InvalidValue,
    InvalidTimestamp,
    InvalidInterval,
    OutOfRange,
    Duplicate,
    OverlappingGlance,
    InconsistentSession,
}

impl From<RecordError> for RejectReason {
    fn from(e: RecordError) -> Self {
        match e {
            RecordError::InvalidTimestamp => RejectReason::InvalidTimestamp,
            RecordError::InvalidInterval => RejectReason::InvalidInterval,
            RecordError::OutOfRange => RejectReason::OutOfRange,
            RecordError::EmptyIdentifier => RejectReason::InvalidValue,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Rejection {
    /// 1-based line number within the ingested input.
    pub line: usize,
    pub reason: RejectReason,
    pub detail: String,
}

#[derive(Debug, Clone)]
pub enum Record {
    Interaction(InteractionEvent),
    Glance(GlanceEvent),
    Signal(SignalSample),
}

fn decode<T: DeserializeOwned>(value: Value) -> Result<T, (RejectReason, String)> {
    serde_json::from_value(value).map_err(|e| (RejectReason::InvalidValue, e.to_string()))
}

/// Parses and validates one line in isolation. Cross-record checks
/// (duplicates, overlaps) are the store's job.
pub fn parse_line(kind: RecordKind, line: &str) -> Result<Record, (RejectReason, String)> {
    if line.trim().is_empty() {
        return Err((RejectReason::EmptyLine, String::new()));
    }
    let value: Value = serde_json::from_str(line).map_err(|e| (RejectReason::Malformed, e.to_string()))?;
    let Value::Object(map) = &value else {
        return Err((RejectReason::Malformed, "not an object".into()));
    };
    if let Some(missing) = kind
        .required_fields()
        .iter()
        .find(|f| map.get(**f).is_none_or(Value::is_null))
    {
        return Err((RejectReason::MissingField, (*missing).into()));
    }
    let record = match kind {
        RecordKind::Interactions => {
            let e: InteractionEvent = decode(value)?;
            e.validate().map_err(|err| (err.into(), err.to_string()))?;
            Record::Interaction(e)
        }
        RecordKind::Glances => {
            let g: GlanceEvent = decode(value)?;
            g.validate().map_err(|err| (err.into(), err.to_string()))?;
            Record::Glance(g)
        }
        RecordKind::Signals => {
            let s: SignalSample = decode(value)?;
            s.validate().map_err(|err| (err.into(), err.to_string()))?;
            Record::Signal(s)
        }
    };
    Ok(record)
}

/// Splits raw input into lines on `\n`, dropping one trailing `\r` per line.
/// A final newline does not start an extra line. Lines that are not UTF-8
/// come back as `Err`.
pub fn split_lines(bytes: &[u8]) -> impl Iterator<Item = Result<&str, std::str::Utf8Error>> {
    let body = bytes.strip_suffix(b"\n").unwrap_or(bytes);
    body.split(|b| *b == b'\n')
        .take(if bytes.is_empty() { 0 } else { usize::MAX })
        .map(|l| std::str::from_utf8(l.strip_suffix(b"\r").unwrap_or(l)))
}
