//! Extraction of task attempts from per-session interaction streams.
//!
//! A session is scanned once in timestamp order. An occurrence of the task's
//! start element always opens a new attempt; an open attempt is closed by
//! the end element (completed), by another start element (restart), by a
//! pause longer than `max_gap_ms` (gap) or by the end of the session.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use serde::{Deserialize, Serialize};

use crate::hash::short_id;
use crate::model::{Aoi, GlanceEvent, InteractionEvent, SessionKey, SignalSample};
use crate::task::TaskDefinition;

/// Signals are attached for this long before the first and after the last
/// event of a sequence.
pub const SIGNAL_PADDING_MS: i64 = 5_000;

pub const DEFAULT_MAX_GAP_MS: i64 = 30_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionConfig {
    pub max_gap_ms: i64,
    pub include_aborted: bool,
    pub glance_aoi_for_metrics: Aoi,
}

impl Default for ExtractionConfig {
    fn default() -> Self {
        Self {
            max_gap_ms: DEFAULT_MAX_GAP_MS,
            include_aborted: true,
            glance_aoi_for_metrics: Aoi::CenterStack,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SequenceStatus {
    Completed,
    AbortedGap,
    AbortedSessionEnd,
    AbortedRestart,
}

impl SequenceStatus {
    pub const ALL: [SequenceStatus; 4] = [
        SequenceStatus::Completed,
        SequenceStatus::AbortedGap,
        SequenceStatus::AbortedSessionEnd,
        SequenceStatus::AbortedRestart,
    ];

    pub fn is_completed(self) -> bool {
        self == SequenceStatus::Completed
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SequenceStatus::Completed => "completed",
            SequenceStatus::AbortedGap => "aborted_gap",
            SequenceStatus::AbortedSessionEnd => "aborted_session_end",
            SequenceStatus::AbortedRestart => "aborted_restart",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|st| st.as_str() == s)
    }
}

/// All records of one session, each kind sorted by time.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct SessionData {
    pub events: Vec<InteractionEvent>,
    pub glances: Vec<GlanceEvent>,
    pub signals: Vec<SignalSample>,
}

impl SessionData {
    pub fn new(
        mut events: Vec<InteractionEvent>,
        mut glances: Vec<GlanceEvent>,
        mut signals: Vec<SignalSample>,
    ) -> Self {
        events.sort_by(|a, b| {
            a.timestamp_ms
                .cmp(&b.timestamp_ms)
                .then_with(|| a.element_id.cmp(&b.element_id))
        });
        glances.sort_by_key(|g| (g.start_ms, g.end_ms));
        signals.sort_by_key(|s| s.timestamp_ms);
        Self {
            events,
            glances,
            signals,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty() && self.glances.is_empty() && self.signals.is_empty()
    }
}

/// Inclusive event index range of one attempt within its session.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Window {
    pub first: usize,
    pub last: usize,
    pub status: SequenceStatus,
}

/// Single-pass scan over time-ordered element ids with their timestamps.
pub fn scan_windows<'a, I>(events: I, start: &str, end: &str, max_gap_ms: i64) -> Vec<Window>
where
    I: IntoIterator<Item = (i64, &'a str)>,
{
    let mut out = Vec::new();
    let mut open: Option<usize> = None;
    let mut prev_ts = 0;
    let mut count = 0;
    for (idx, (ts, element)) in events.into_iter().enumerate() {
        count = idx + 1;
        if let Some(first) = open {
            if ts - prev_ts > max_gap_ms {
                out.push(Window {
                    first,
                    last: idx - 1,
                    status: SequenceStatus::AbortedGap,
                });
                open = None;
            } else if element == start {
                out.push(Window {
                    first,
                    last: idx - 1,
                    status: SequenceStatus::AbortedRestart,
                });
                open = Some(idx);
            } else if element == end {
                out.push(Window {
                    first,
                    last: idx,
                    status: SequenceStatus::Completed,
                });
                open = None;
            }
        }
        if open.is_none() && element == start {
            open = Some(idx);
        }
        prev_ts = ts;
    }
    if let Some(first) = open {
        out.push(Window {
            first,
            last: count - 1,
            status: SequenceStatus::AbortedSessionEnd,
        });
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InteractionSequence {
    pub sequence_id: String,
    pub task_id: String,
    pub vehicle_id: String,
    pub session_id: String,
    pub software_version: String,
    pub car_model: String,
    pub status: SequenceStatus,
    pub events: Vec<InteractionEvent>,
    /// Unclipped glances overlapping the event span.
    pub glances: Vec<GlanceEvent>,
    /// Samples within the event span widened by [`SIGNAL_PADDING_MS`].
    pub signals: Vec<SignalSample>,
}

impl InteractionSequence {
    pub fn first_ms(&self) -> i64 {
        self.events[0].timestamp_ms
    }

    pub fn last_ms(&self) -> i64 {
        self.events[self.events.len() - 1].timestamp_ms
    }

    pub fn path(&self) -> Vec<&str> {
        self.events.iter().map(|e| e.element_id.as_str()).collect()
    }

    /// Glances restricted to the event span, for metric computation.
    pub fn clipped_glances(&self) -> Vec<GlanceEvent> {
        let (from, to) = (self.first_ms(), self.last_ms());
        self.glances
            .iter()
            .filter(|g| g.overlaps(from, to))
            .map(|g| g.clipped(from, to))
            .collect()
    }

    pub fn session_key(&self) -> SessionKey {
        SessionKey::new(self.vehicle_id.clone(), self.session_id.clone())
    }
}

pub fn sequence_id(task_id: &str, key: &SessionKey, first_ms: i64) -> String {
    let ts = format!("{first_ms}");
    short_id("s", &[task_id, &key.vehicle_id, &key.session_id, &ts])
}

/// Fills in the glance and signal context of `sequence` from its session.
pub fn attach_context(mut sequence: InteractionSequence, session: &SessionData) -> InteractionSequence {
    let (from, to) = (sequence.first_ms(), sequence.last_ms());
    sequence.glances = session
        .glances
        .iter()
        .filter(|g| g.overlaps(from, to))
        .cloned()
        .collect();
    let (lo, hi) = (from - SIGNAL_PADDING_MS, to + SIGNAL_PADDING_MS);
    sequence.signals = session
        .signals
        .iter()
        .filter(|s| s.timestamp_ms >= lo && s.timestamp_ms <= hi)
        .cloned()
        .collect();
    sequence
}

/// Attempts of `task` in one session, with context attached.
pub fn extract_session(
    task: &TaskDefinition,
    key: &SessionKey,
    session: &SessionData,
    config: &ExtractionConfig,
) -> Vec<InteractionSequence> {
    let windows = scan_windows(
        session.events.iter().map(|e| (e.timestamp_ms, e.element_id.as_str())),
        &task.start_element,
        &task.end_element,
        config.max_gap_ms,
    );
    windows
        .into_iter()
        .filter(|w| config.include_aborted || w.status.is_completed())
        .map(|w| {
            let events = session.events[w.first..=w.last].to_vec();
            let head = &events[0];
            let seq = InteractionSequence {
                sequence_id: sequence_id(&task.task_id, key, head.timestamp_ms),
                task_id: task.task_id.clone(),
                vehicle_id: key.vehicle_id.clone(),
                session_id: key.session_id.clone(),
                software_version: head.software_version.clone(),
                car_model: head.car_model.clone(),
                status: w.status,
                events,
                glances: Vec::new(),
                signals: Vec::new(),
            };
            attach_context(seq, session)
        })
        .collect()
}

/// Attempts of `task` across all sessions, ordered by
/// (vehicle_id, session_id, first timestamp).
pub fn extract_sequences<'a, I>(
    task: &TaskDefinition,
    sessions: I,
    config: &ExtractionConfig,
) -> Vec<InteractionSequence>
where
    I: IntoIterator<Item = (&'a SessionKey, &'a SessionData)>,
{
    let mut out: Vec<InteractionSequence> = sessions
        .into_iter()
        .flat_map(|(key, data)| extract_session(task, key, data, config))
        .collect();
    out.sort_by(|a, b| (&a.vehicle_id, &a.session_id, a.first_ms()).cmp(&(&b.vehicle_id, &b.session_id, b.first_ms())));
    out
}
