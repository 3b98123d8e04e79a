//! Telemetry record types shared by the store, the extractor and the API.

use alloc::string::String;
use core::fmt;
use serde::{Deserialize, Serialize};

/// Touchscreen gesture kind.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    Tap,
    LongPress,
    Drag,
    Scroll,
}

/// Area of interest a glance is directed at.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Aoi {
    Road,
    CenterStack,
    Other,
}

impl Aoi {
    pub fn as_str(self) -> &'static str {
        match self {
            Aoi::Road => "road",
            Aoi::CenterStack => "center_stack",
            Aoi::Other => "other",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "road" => Some(Aoi::Road),
            "center_stack" => Some(Aoi::CenterStack),
            "other" => Some(Aoi::Other),
            _ => None,
        }
    }
}

impl fmt::Display for Aoi {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One drive session of one vehicle.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SessionKey {
    pub vehicle_id: String,
    pub session_id: String,
}

impl SessionKey {
    pub fn new(vehicle_id: impl Into<String>, session_id: impl Into<String>) -> Self {
        Self {
            vehicle_id: vehicle_id.into(),
            session_id: session_id.into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InteractionEvent {
    pub vehicle_id: String,
    pub session_id: String,
    pub timestamp_ms: i64,
    pub element_id: String,
    pub action: Action,
    pub software_version: String,
    pub car_model: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GlanceEvent {
    pub vehicle_id: String,
    pub session_id: String,
    pub aoi: Aoi,
    pub start_ms: i64,
    pub end_ms: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SignalSample {
    pub vehicle_id: String,
    pub session_id: String,
    pub timestamp_ms: i64,
    pub speed_mps: f64,
    pub steering_angle_deg: f64,
}

/// Largest accepted steering wheel angle magnitude in degrees.
pub const MAX_STEERING_DEG: f64 = 720.0;

/// Value-level validation failure of a single record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum RecordError {
    #[error("timestamp must be positive")]
    InvalidTimestamp,
    #[error("interval end must be after its start")]
    InvalidInterval,
    #[error("value out of range")]
    OutOfRange,
    #[error("identifier must not be empty")]
    EmptyIdentifier,
}

fn non_empty(values: &[&str]) -> Result<(), RecordError> {
    if values.iter().any(|v| v.is_empty()) {
        Err(RecordError::EmptyIdentifier)
    } else {
        Ok(())
    }
}

impl InteractionEvent {
    pub fn key(&self) -> SessionKey {
        SessionKey::new(self.vehicle_id.clone(), self.session_id.clone())
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        non_empty(&[&self.vehicle_id, &self.session_id, &self.element_id])?;
        if self.timestamp_ms <= 0 {
            return Err(RecordError::InvalidTimestamp);
        }
        Ok(())
    }
}

impl GlanceEvent {
    pub fn key(&self) -> SessionKey {
        SessionKey::new(self.vehicle_id.clone(), self.session_id.clone())
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        non_empty(&[&self.vehicle_id, &self.session_id])?;
        if self.start_ms <= 0 {
            return Err(RecordError::InvalidTimestamp);
        }
        if self.end_ms <= self.start_ms {
            return Err(RecordError::InvalidInterval);
        }
        Ok(())
    }

    pub fn duration_ms(&self) -> i64 {
        self.end_ms - self.start_ms
    }

    /// Closed-interval overlap with `[from, to]`.
    pub fn overlaps(&self, from: i64, to: i64) -> bool {
        self.start_ms <= to && self.end_ms >= from
    }

    /// Copy restricted to `[from, to]`; the result may have zero length.
    pub fn clipped(&self, from: i64, to: i64) -> GlanceEvent {
        GlanceEvent {
            start_ms: self.start_ms.max(from),
            end_ms: self.end_ms.min(to),
            ..self.clone()
        }
    }
}

impl SignalSample {
    pub fn key(&self) -> SessionKey {
        SessionKey::new(self.vehicle_id.clone(), self.session_id.clone())
    }

    pub fn validate(&self) -> Result<(), RecordError> {
        non_empty(&[&self.vehicle_id, &self.session_id])?;
        if self.timestamp_ms <= 0 {
            return Err(RecordError::InvalidTimestamp);
        }
        // NaN fails both comparisons
        let speed_ok = self.speed_mps >= 0.0 && self.speed_mps.is_finite();
        let steer_ok = self.steering_angle_deg >= -MAX_STEERING_DEG && self.steering_angle_deg <= MAX_STEERING_DEG;
        if !speed_ok || !steer_ok {
            return Err(RecordError::OutOfRange);
        }
        Ok(())
    }
}
