//! Append-only telemetry store with immutable published snapshots.
//!
//! Accepted records are appended to one segment file per record kind. A
//! snapshot is a prefix of every segment; publishing records the prefix
//! lengths in `snapshots.jsonl` and builds a per-session index that
//! shares unchanged sessions with the previous snapshot.
//!
//! One writer at a time (guarded by a mutex); readers clone an `Arc` of a
//! published snapshot and never wait on the writer.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, OpenOptions};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex, RwLock};

use flowboat_core::model::{GlanceEvent, InteractionEvent, SessionKey, SignalSample};
use flowboat_core::SessionData;
use serde::{Deserialize, Serialize};

use crate::records::{parse_line, split_lines, Record, RecordKind, RejectReason, Rejection};

pub type SnapshotId = u64;

const SNAPSHOT_LOG: &str = "snapshots.jsonl";

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: io::Error },
    #[error("storage I/O failed: {0}")]
    Io(#[from] io::Error),
    #[error("unknown snapshot {0}")]
    UnknownSnapshot(SnapshotId),
    #[error("corrupt data directory: {0}")]
    Corrupt(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IngestReport {
    pub kind: RecordKind,
    pub accepted: usize,
    pub rejected: usize,
    pub reject_reasons: Vec<Rejection>,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RecordCounts {
    pub interactions: usize,
    pub glances: usize,
    pub signals: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
struct SnapshotEntry {
    snapshot_id: SnapshotId,
    #[serde(flatten)]
    counts: RecordCounts,
}

type SessionRecords = (Vec<InteractionEvent>, Vec<GlanceEvent>, Vec<SignalSample>);

/// Immutable, queryable version of the dataset.
#[derive(Debug)]
pub struct Snapshot {
    pub id: SnapshotId,
    pub counts: RecordCounts,
    sessions: BTreeMap<SessionKey, Arc<SessionData>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SnapshotInfo {
    pub snapshot_id: SnapshotId,
    pub counts: RecordCounts,
    pub sessions: usize,
}

impl Snapshot {
    fn empty() -> Self {
        Self {
            id: 0,
            counts: RecordCounts::default(),
            sessions: BTreeMap::new(),
        }
    }

    pub fn info(&self) -> SnapshotInfo {
        SnapshotInfo {
            snapshot_id: self.id,
            counts: self.counts,
            sessions: self.sessions.len(),
        }
    }

    /// Records of one session; unknown sessions yield empty lists.
    pub fn session(&self, key: &SessionKey) -> Arc<SessionData> {
        self.sessions.get(key).cloned().unwrap_or_default()
    }

    pub fn sessions(&self) -> impl Iterator<Item = (&SessionKey, &SessionData)> {
        self.sessions.iter().map(|(k, v)| (k, v.as_ref()))
    }
}

/// Cross-record state used to reject duplicates and invariant violations.
#[derive(Default)]
struct Validator {
    interaction_keys: HashSet<(SessionKey, i64, String)>,
    session_attrs: HashMap<SessionKey, (String, String)>,
    glances: HashMap<SessionKey, BTreeMap<i64, (i64, flowboat_core::Aoi)>>,
    signal_keys: HashSet<(SessionKey, i64)>,
}

impl Validator {
    fn admit(&mut self, record: &Record) -> Result<(), (RejectReason, String)> {
        match record {
            Record::Interaction(e) => {
                let key = e.key();
                let unique = (key.clone(), e.timestamp_ms, e.element_id.clone());
                if self.interaction_keys.contains(&unique) {
                    return Err((
                        RejectReason::Duplicate,
                        format!("{} at {}", e.element_id, e.timestamp_ms),
                    ));
                }
                match self.session_attrs.get(&key) {
                    Some((sw, model)) if *sw != e.software_version || *model != e.car_model => {
                        return Err((
                            RejectReason::InconsistentSession,
                            format!("session already recorded as {sw}/{model}"),
                        ))
                    }
                    Some(_) => {}
                    None => {
                        self.session_attrs
                            .insert(key, (e.software_version.clone(), e.car_model.clone()));
                    }
                }
                self.interaction_keys.insert(unique);
            }
            Record::Glance(g) => {
                let spans = self.glances.entry(g.key()).or_default();
                if spans.get(&g.start_ms) == Some(&(g.end_ms, g.aoi)) {
                    return Err((RejectReason::Duplicate, format!("glance at {}", g.start_ms)));
                }
                // half-open: touching glances do not overlap
                let before = spans.range(..g.end_ms).next_back();
                if let Some((start, (end, _))) = before {
                    if *end > g.start_ms {
                        return Err((
                            RejectReason::OverlappingGlance,
                            format!("overlaps glance [{start}, {end}]"),
                        ));
                    }
                }
                spans.insert(g.start_ms, (g.end_ms, g.aoi));
            }
            Record::Signal(s) => {
                if !self.signal_keys.insert((s.key(), s.timestamp_ms)) {
                    return Err((RejectReason::Duplicate, format!("sample at {}", s.timestamp_ms)));
                }
            }
        }
        Ok(())
    }
}

struct Writer {
    dir: Option<PathBuf>,
    interactions: Vec<InteractionEvent>,
    glances: Vec<GlanceEvent>,
    signals: Vec<SignalSample>,
    validator: Validator,
}

impl Writer {
    fn counts(&self) -> RecordCounts {
        RecordCounts {
            interactions: self.interactions.len(),
            glances: self.glances.len(),
            signals: self.signals.len(),
        }
    }

    fn ingest(&mut self, kind: RecordKind, bytes: &[u8]) -> Result<IngestReport, StoreError> {
        let mut report = IngestReport {
            kind,
            accepted: 0,
            rejected: 0,
            reject_reasons: Vec::new(),
        };
        let mut accepted = Vec::new();
        for (idx, line) in split_lines(bytes).enumerate() {
            let outcome = match line {
                Err(e) => Err((RejectReason::Malformed, e.to_string())),
                Ok(line) => parse_line(kind, line).and_then(|rec| self.validator.admit(&rec).map(|_| rec)),
            };
            match outcome {
                Ok(rec) => accepted.push(rec),
                Err((reason, detail)) => report.reject_reasons.push(Rejection {
                    line: idx + 1,
                    reason,
                    detail,
                }),
            }
        }
        report.accepted = accepted.len();
        report.rejected = report.reject_reasons.len();
        self.append(kind, accepted)?;
        Ok(report)
    }

    fn append(&mut self, kind: RecordKind, records: Vec<Record>) -> Result<(), StoreError> {
        let mut out = match &self.dir {
            Some(dir) => Some(BufWriter::new(
                OpenOptions::new()
                    .create(true)
                    .append(true)
                    .open(dir.join(kind.file_name()))?,
            )),
            None => None,
        };
        for rec in records {
            if let Some(out) = out.as_mut() {
                match &rec {
                    Record::Interaction(e) => serde_json::to_writer(&mut *out, e),
                    Record::Glance(g) => serde_json::to_writer(&mut *out, g),
                    Record::Signal(s) => serde_json::to_writer(&mut *out, s),
                }
                .map_err(io::Error::from)?;
                out.write_all(b"\n")?;
            }
            match rec {
                Record::Interaction(e) => self.interactions.push(e),
                Record::Glance(g) => self.glances.push(g),
                Record::Signal(s) => self.signals.push(s),
            }
        }
        if let Some(out) = out {
            out.into_inner().map_err(|e| e.into_error())?.sync_data()?;
        }
        Ok(())
    }

    /// Builds the snapshot holding the first `counts` records of each kind
    /// on top of `prev`, which must hold a prefix of them.
    fn build(&self, id: SnapshotId, counts: RecordCounts, prev: &Snapshot) -> Snapshot {
        let mut touched: BTreeMap<SessionKey, SessionRecords> = BTreeMap::new();
        for e in &self.interactions[prev.counts.interactions..counts.interactions] {
            touched.entry(e.key()).or_default().0.push(e.clone());
        }
        for g in &self.glances[prev.counts.glances..counts.glances] {
            touched.entry(g.key()).or_default().1.push(g.clone());
        }
        for s in &self.signals[prev.counts.signals..counts.signals] {
            touched.entry(s.key()).or_default().2.push(s.clone());
        }
        let mut sessions = prev.sessions.clone();
        for (key, (mut events, mut glances, mut signals)) in touched {
            if let Some(old) = prev.sessions.get(&key) {
                events.extend(old.events.iter().cloned());
                glances.extend(old.glances.iter().cloned());
                signals.extend(old.signals.iter().cloned());
            }
            sessions.insert(key, Arc::new(SessionData::new(events, glances, signals)));
        }
        Snapshot { id, counts, sessions }
    }
}

pub struct Store {
    writer: Mutex<Writer>,
    published: RwLock<Vec<Arc<Snapshot>>>,
}

impl Store {
    /// Store without persistence.
    pub fn in_memory() -> Self {
        Self::with_writer(None)
    }

    fn with_writer(dir: Option<PathBuf>) -> Self {
        Self {
            writer: Mutex::new(Writer {
                dir,
                interactions: Vec::new(),
                glances: Vec::new(),
                signals: Vec::new(),
                validator: Validator::default(),
            }),
            published: RwLock::new(Vec::new()),
        }
    }

    /// Opens (or creates) a data directory and replays its segments and
    /// snapshot log.
    pub fn open(dir: impl AsRef<Path>) -> Result<Self, StoreError> {
        let dir = dir.as_ref().to_path_buf();
        fs::create_dir_all(&dir)?;
        let store = Self::with_writer(None);
        {
            let mut w = store.writer.lock().unwrap();
            for kind in RecordKind::ALL {
                let path = dir.join(kind.file_name());
                if !path.exists() {
                    continue;
                }
                let bytes = fs::read(&path).map_err(|source| StoreError::Read {
                    path: path.clone(),
                    source,
                })?;
                let report = w.ingest(kind, &bytes)?;
                if let Some(bad) = report.reject_reasons.first() {
                    return Err(StoreError::Corrupt(format!(
                        "{}: line {} rejected ({:?})",
                        kind.file_name(),
                        bad.line,
                        bad.reason
                    )));
                }
            }
            let log = dir.join(SNAPSHOT_LOG);
            if log.exists() {
                let text = fs::read_to_string(&log)?;
                let mut published = store.published.write().unwrap();
                let mut prev = Arc::new(Snapshot::empty());
                for line in text.lines().filter(|l| !l.trim().is_empty()) {
                    let entry: SnapshotEntry =
                        serde_json::from_str(line).map_err(|e| StoreError::Corrupt(e.to_string()))?;
                    let c = entry.counts;
                    let total = w.counts();
                    let grows = c.interactions >= prev.counts.interactions
                        && c.glances >= prev.counts.glances
                        && c.signals >= prev.counts.signals;
                    let fits = c.interactions <= total.interactions
                        && c.glances <= total.glances
                        && c.signals <= total.signals;
                    if !grows || !fits || entry.snapshot_id <= prev.id {
                        return Err(StoreError::Corrupt(format!("bad snapshot entry {line}")));
                    }
                    let snap = Arc::new(w.build(entry.snapshot_id, c, &prev));
                    published.push(snap.clone());
                    prev = snap;
                }
            }
            w.dir = Some(dir);
        }
        Ok(store)
    }

    pub fn ingest_file(&self, path: impl AsRef<Path>, kind: RecordKind) -> Result<IngestReport, StoreError> {
        let path = path.as_ref();
        let bytes = fs::read(path).map_err(|source| StoreError::Read {
            path: path.to_path_buf(),
            source,
        })?;
        self.ingest_bytes(&bytes, kind)
    }

    /// Ingests line-delimited records; accepted ones become visible with
    /// the next [`Store::publish_snapshot`].
    pub fn ingest_bytes(&self, bytes: &[u8], kind: RecordKind) -> Result<IngestReport, StoreError> {
        self.writer.lock().unwrap().ingest(kind, bytes)
    }

    pub fn publish_snapshot(&self) -> Result<SnapshotId, StoreError> {
        let w = self.writer.lock().unwrap();
        let prev = self.latest().unwrap_or_else(|| Arc::new(Snapshot::empty()));
        let id = prev.id + 1;
        let snap = Arc::new(w.build(id, w.counts(), &prev));
        if let Some(dir) = &w.dir {
            let mut log = OpenOptions::new()
                .create(true)
                .append(true)
                .open(dir.join(SNAPSHOT_LOG))?;
            let entry = SnapshotEntry {
                snapshot_id: id,
                counts: snap.counts,
            };
            writeln!(log, "{}", serde_json::to_string(&entry).map_err(io::Error::from)?)?;
            log.sync_data()?;
        }
        self.published.write().unwrap().push(snap);
        Ok(id)
    }

    pub fn latest(&self) -> Option<Arc<Snapshot>> {
        self.published.read().unwrap().last().cloned()
    }

    pub fn snapshot(&self, id: SnapshotId) -> Result<Arc<Snapshot>, StoreError> {
        let published = self.published.read().unwrap();
        // ids are dense and start at 1
        published
            .get((id as usize).wrapping_sub(1))
            .filter(|s| s.id == id)
            .or_else(|| published.iter().find(|s| s.id == id))
            .cloned()
            .ok_or(StoreError::UnknownSnapshot(id))
    }

    /// Pinned snapshot, or the latest one when `id` is `None`.
    pub fn resolve(&self, id: Option<SnapshotId>) -> Result<Arc<Snapshot>, StoreError> {
        match id {
            Some(id) => self.snapshot(id),
            None => Ok(self.latest().unwrap_or_else(|| Arc::new(Snapshot::empty()))),
        }
    }

    pub fn read_session(&self, snapshot_id: SnapshotId, key: &SessionKey) -> Result<Arc<SessionData>, StoreError> {
        Ok(self.snapshot(snapshot_id)?.session(key))
    }

    /// Records accepted but not yet published.
    pub fn pending(&self) -> RecordCounts {
        let total = self.writer.lock().unwrap().counts();
        let seen = self.latest().map(|s| s.counts).unwrap_or_default();
        RecordCounts {
            interactions: total.interactions - seen.interactions,
            glances: total.glances - seen.glances,
            signals: total.signals - seen.signals,
        }
    }
}
