//! Single-sequence timeline: interaction markers, glance intervals and
//! vehicle signals on one time axis that starts at the first event.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use serde::Serialize;

use crate::catalog::Catalog;
use crate::extract::{InteractionSequence, SequenceStatus};
use crate::metrics::summary_metrics;
use crate::model::{Action, Aoi};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventMarker {
    pub t_ms: i64,
    pub element_id: String,
    /// `None` when the element is missing from the catalog.
    pub label: Option<String>,
    pub action: Action,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GlanceSpan {
    pub aoi: Aoi,
    pub start_ms: i64,
    pub end_ms: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TracePoint {
    pub t_ms: i64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SequenceDetail {
    pub sequence_id: String,
    pub task_id: String,
    pub vehicle_id: String,
    pub session_id: String,
    pub software_version: String,
    pub car_model: String,
    pub status: SequenceStatus,
    /// Absolute timestamp of the first event; all tracks are relative to it.
    pub origin_ms: i64,
    pub markers: Vec<EventMarker>,
    pub glances: Vec<GlanceSpan>,
    pub speed: Vec<TracePoint>,
    pub steering: Vec<TracePoint>,
    pub metrics: BTreeMap<&'static str, f64>,
}

pub fn sequence_detail(seq: &InteractionSequence, catalog: &Catalog, aoi: Aoi) -> SequenceDetail {
    let origin = seq.first_ms();
    SequenceDetail {
        sequence_id: seq.sequence_id.clone(),
        task_id: seq.task_id.clone(),
        vehicle_id: seq.vehicle_id.clone(),
        session_id: seq.session_id.clone(),
        software_version: seq.software_version.clone(),
        car_model: seq.car_model.clone(),
        status: seq.status,
        origin_ms: origin,
        markers: seq
            .events
            .iter()
            .map(|e| EventMarker {
                t_ms: e.timestamp_ms - origin,
                element_id: e.element_id.clone(),
                label: catalog.get(&e.element_id).map(|el| el.label.clone()),
                action: e.action,
            })
            .collect(),
        glances: seq
            .glances
            .iter()
            .map(|g| GlanceSpan {
                aoi: g.aoi,
                start_ms: g.start_ms - origin,
                end_ms: g.end_ms - origin,
            })
            .collect(),
        speed: seq
            .signals
            .iter()
            .map(|s| TracePoint {
                t_ms: s.timestamp_ms - origin,
                value: s.speed_mps,
            })
            .collect(),
        steering: seq
            .signals
            .iter()
            .map(|s| TracePoint {
                t_ms: s.timestamp_ms - origin,
                value: s.steering_angle_deg,
            })
            .collect(),
        metrics: summary_metrics(seq, aoi),
    }
}
