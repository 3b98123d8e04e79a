//! Seeded synthetic fleet telemetry with planted task flows.
//!
//! Each session interleaves planted task attempts with background noise
//! taps. Planted attempts are laid out so the extractor (with its default
//! gap limit) recovers them exactly, and every planted attempt is written
//! to a ground-truth manifest.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io;
use std::path::Path;

use flowboat_core::catalog::{Catalog, UiElement};
use flowboat_core::extract::{SequenceStatus, DEFAULT_MAX_GAP_MS};
use flowboat_core::flows::FlowStatus;
use flowboat_core::model::{Action, Aoi, GlanceEvent, InteractionEvent, SignalSample};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, Normal};
use serde::{Deserialize, Serialize};

use crate::catalog_file::render_catalog;
use crate::records::RecordKind;

pub const CATALOG_FILE: &str = "catalog.jsonl";
pub const MANIFEST_FILE: &str = "manifest.jsonl";
/// Screen every generated catalog is reachable from.
pub const HOME_SCREEN: &str = "home";

const SESSION_SPACING_MS: i64 = 6 * 3_600_000;
const SIGNAL_LEAD_OUT_MS: i64 = 6_000;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedFlow {
    pub path: Vec<String>,
    pub status: SequenceStatus,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Weighted {
    pub value: String,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GlanceModel {
    /// Mean dwell on the center stack.
    pub mean_on_ms: f64,
    /// Mean dwell on the road.
    pub mean_off_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GenConfig {
    pub seed: u64,
    pub n_vehicles: usize,
    pub n_sessions_per_vehicle: usize,
    /// Inclusive range of planted attempts per session.
    pub sequences_per_session: (usize, usize),
    pub flow_mixture: Vec<PlantedFlow>,
    /// Background interactions per minute outside planted attempts.
    pub noise_event_rate: f64,
    pub glance_model: GlanceModel,
    pub signal_rate_hz: f64,
    pub software_versions: Vec<Weighted>,
    pub car_models: Vec<Weighted>,
    pub start_epoch_ms: i64,
}

fn planted(path: &[&str], status: SequenceStatus, weight: f64) -> PlantedFlow {
    PlantedFlow {
        path: path.iter().map(|s| s.to_string()).collect(),
        status,
        weight,
    }
}

fn weighted(value: &str, weight: f64) -> Weighted {
    Weighted {
        value: value.into(),
        weight,
    }
}

impl Default for GenConfig {
    fn default() -> Self {
        use SequenceStatus::*;
        Self {
            seed: 42,
            n_vehicles: 25,
            n_sessions_per_vehicle: 5,
            sequences_per_session: (4, 6),
            flow_mixture: vec![
                planted(
                    &[
                        "nav.home",
                        "nav.search",
                        "nav.kbd_enter",
                        "nav.result_1",
                        "nav.route_started",
                    ],
                    Completed,
                    4.0,
                ),
                planted(
                    &["nav.home", "nav.recent", "nav.recent_1", "nav.route_started"],
                    Completed,
                    3.0,
                ),
                planted(
                    &["nav.home", "nav.favorites", "nav.fav_home", "nav.route_started"],
                    Completed,
                    2.0,
                ),
                planted(
                    &[
                        "nav.home",
                        "nav.search",
                        "nav.kbd_enter",
                        "nav.result_2",
                        "nav.route_started",
                    ],
                    Completed,
                    1.0,
                ),
                planted(&["nav.home", "nav.search", "nav.kbd_enter"], AbortedGap, 1.5),
                planted(&["nav.home", "nav.recent"], AbortedSessionEnd, 0.5),
            ],
            noise_event_rate: 6.0,
            glance_model: GlanceModel {
                mean_on_ms: 1_200.0,
                mean_off_ms: 3_000.0,
            },
            signal_rate_hz: 10.0,
            software_versions: vec![weighted("23.1", 2.0), weighted("23.2", 3.0), weighted("24.1", 1.0)],
            car_models: vec![
                weighted("modelX", 3.0),
                weighted("modelY", 2.0),
                weighted("modelZ", 1.0),
            ],
            start_epoch_ms: 1_700_000_000_000,
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum GenError {
    #[error("flow {0} has a path shorter than 2 elements")]
    PathTooShort(usize),
    #[error("{0} must be positive")]
    NotPositive(&'static str),
    #[error("flow {index}: status {status:?} cannot be planted")]
    UnsupportedStatus { index: usize, status: SequenceStatus },
    #[error("flow {index}: {message}")]
    InconsistentTask { index: usize, message: String },
    #[error("no element left for background noise")]
    EmptyNoisePool,
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Start and end element shared by every planted flow.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedTask {
    pub start_element: String,
    pub end_element: String,
}

impl GenConfig {
    /// Checks the config and derives the planted task: the common first
    /// element and the common last element of the completed flows.
    pub fn validate(&self) -> Result<PlantedTask, GenError> {
        for (name, ok) in [
            ("n_vehicles", self.n_vehicles > 0),
            ("n_sessions_per_vehicle", self.n_sessions_per_vehicle > 0),
            (
                "sequences_per_session",
                self.sequences_per_session.0 <= self.sequences_per_session.1,
            ),
            ("noise_event_rate", self.noise_event_rate > 0.0),
            ("signal_rate_hz", self.signal_rate_hz > 0.0),
            ("glance_model.mean_on_ms", self.glance_model.mean_on_ms > 0.0),
            ("glance_model.mean_off_ms", self.glance_model.mean_off_ms > 0.0),
            ("start_epoch_ms", self.start_epoch_ms > 0),
            ("flow_mixture", !self.flow_mixture.is_empty()),
            ("software_versions", !self.software_versions.is_empty()),
            ("car_models", !self.car_models.is_empty()),
        ] {
            if !ok {
                return Err(GenError::NotPositive(name));
            }
        }
        let weights = self
            .flow_mixture
            .iter()
            .map(|f| f.weight)
            .chain(self.software_versions.iter().map(|w| w.weight))
            .chain(self.car_models.iter().map(|w| w.weight));
        for w in weights {
            if !(w > 0.0 && w.is_finite()) {
                return Err(GenError::NotPositive("weight"));
            }
        }
        for (index, flow) in self.flow_mixture.iter().enumerate() {
            if flow.path.len() < 2 {
                return Err(GenError::PathTooShort(index));
            }
            if flow.status == SequenceStatus::AbortedRestart {
                return Err(GenError::UnsupportedStatus {
                    index,
                    status: flow.status,
                });
            }
        }
        let start = self.flow_mixture[0].path[0].clone();
        let end = self
            .flow_mixture
            .iter()
            .find(|f| f.status.is_completed())
            .map(|f| f.path[f.path.len() - 1].clone())
            .ok_or(GenError::InconsistentTask {
                index: 0,
                message: "no completed flow defines the end element".into(),
            })?;
        for (index, flow) in self.flow_mixture.iter().enumerate() {
            let bad = |message: &str| GenError::InconsistentTask {
                index,
                message: message.into(),
            };
            if flow.path[0] != start {
                return Err(bad("does not begin with the shared start element"));
            }
            if flow.path[1..].contains(&start) {
                return Err(bad("repeats the start element"));
            }
            let inner_end = flow.path[..flow.path.len() - 1].contains(&end);
            let ends_with_end = flow.path[flow.path.len() - 1] == end;
            if inner_end || ends_with_end != flow.status.is_completed() {
                return Err(bad("end element placement does not match the status"));
            }
        }
        Ok(PlantedTask {
            start_element: start,
            end_element: end,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FlowCount {
    pub path: Vec<String>,
    pub status: SequenceStatus,
    pub software_version: String,
    pub car_model: String,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlantedSequence {
    pub vehicle_id: String,
    pub session_id: String,
    pub path: Vec<String>,
    pub status: SequenceStatus,
    pub timestamps: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "snake_case")]
pub enum ManifestRecord {
    Task(PlantedTask),
    FlowCount(FlowCount),
    Planted(PlantedSequence),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Manifest {
    pub task: PlantedTask,
    pub flow_counts: Vec<FlowCount>,
    pub planted: Vec<PlantedSequence>,
}

impl Manifest {
    /// Planted counts per (path, completed/aborted), the grouping used by
    /// flow analysis.
    pub fn flow_totals(&self) -> BTreeMap<(Vec<String>, FlowStatus), usize> {
        let mut out = BTreeMap::new();
        for fc in &self.flow_counts {
            *out.entry((fc.path.clone(), FlowStatus::from(fc.status))).or_default() += fc.count;
        }
        out
    }

    pub fn render(&self) -> String {
        let records = std::iter::once(ManifestRecord::Task(self.task.clone()))
            .chain(self.flow_counts.iter().cloned().map(ManifestRecord::FlowCount))
            .chain(self.planted.iter().cloned().map(ManifestRecord::Planted));
        let mut out = String::new();
        for r in records {
            out.push_str(&serde_json::to_string(&r).expect("manifest records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, serde_json::Error> {
        let mut task = None;
        let mut flow_counts = Vec::new();
        let mut planted = Vec::new();
        for line in text.lines().filter(|l| !l.trim().is_empty()) {
            match serde_json::from_str(line)? {
                ManifestRecord::Task(t) => task = Some(t),
                ManifestRecord::FlowCount(f) => flow_counts.push(f),
                ManifestRecord::Planted(p) => planted.push(p),
            }
        }
        let task = task.ok_or_else(|| serde::de::Error::custom("manifest has no task record"))?;
        Ok(Self {
            task,
            flow_counts,
            planted,
        })
    }
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub interactions: Vec<InteractionEvent>,
    pub glances: Vec<GlanceEvent>,
    pub signals: Vec<SignalSample>,
    pub catalog: Vec<UiElement>,
    pub manifest: Manifest,
}

type ElementRow = (
    &'static str,
    &'static str,
    &'static str,
    &'static str,
    bool,
    Option<&'static str>,
);

// (element_id, label, screen_id, function, interactive, leads_to_screen)
const BASE_CATALOG: &[ElementRow] = &[
    ("home.clock", "Clock", "home", "show_time", false, None),
    ("home.nav", "Navigation", "home", "open_app", true, Some("nav_main")),
    (
        "home.climate",
        "Climate",
        "home",
        "open_app",
        true,
        Some("climate_main"),
    ),
    ("home.media", "Media", "home", "open_app", true, Some("media_main")),
    ("home.phone", "Phone", "home", "open_app", true, Some("phone_main")),
    (
        "nav.home",
        "Navigation Home",
        "nav_main",
        "show_map",
        true,
        Some("nav_main"),
    ),
    (
        "nav.search",
        "Search Destination",
        "nav_main",
        "open_search",
        true,
        Some("nav_search"),
    ),
    (
        "nav.recent",
        "Recent Destinations",
        "nav_main",
        "open_recent",
        true,
        Some("nav_recent"),
    ),
    (
        "nav.favorites",
        "Favorites",
        "nav_main",
        "open_favorites",
        true,
        Some("nav_favorites"),
    ),
    ("nav.zoom_in", "Zoom In", "nav_main", "zoom_map", true, None),
    ("nav.zoom_out", "Zoom Out", "nav_main", "zoom_map", true, None),
    ("nav.back_home", "Back", "nav_main", "go_home", true, Some("home")),
    (
        "nav.kbd_enter",
        "Keyboard Enter",
        "nav_search",
        "submit_query",
        true,
        Some("nav_results"),
    ),
    (
        "nav.kbd_back",
        "Keyboard Back",
        "nav_search",
        "close_search",
        true,
        Some("nav_main"),
    ),
    (
        "nav.result_1",
        "First Result",
        "nav_results",
        "select_destination",
        true,
        Some("nav_route"),
    ),
    (
        "nav.result_2",
        "Second Result",
        "nav_results",
        "select_destination",
        true,
        Some("nav_route"),
    ),
    (
        "nav.recent_1",
        "Most Recent",
        "nav_recent",
        "select_destination",
        true,
        Some("nav_route"),
    ),
    (
        "nav.recent_2",
        "Second Recent",
        "nav_recent",
        "select_destination",
        true,
        Some("nav_route"),
    ),
    (
        "nav.fav_home",
        "Favorite Home",
        "nav_favorites",
        "select_destination",
        true,
        Some("nav_route"),
    ),
    (
        "nav.fav_work",
        "Favorite Work",
        "nav_favorites",
        "select_destination",
        true,
        Some("nav_route"),
    ),
    (
        "nav.route_started",
        "Start Guidance",
        "nav_route",
        "start_guidance",
        true,
        Some("nav_main"),
    ),
    (
        "nav.route_cancel",
        "Cancel Route",
        "nav_route",
        "cancel_route",
        true,
        Some("nav_main"),
    ),
    (
        "climate.temp_up",
        "Temperature Up",
        "climate_main",
        "set_temperature",
        true,
        None,
    ),
    (
        "climate.temp_down",
        "Temperature Down",
        "climate_main",
        "set_temperature",
        true,
        None,
    ),
    (
        "climate.fan",
        "Fan Settings",
        "climate_main",
        "open_fan",
        true,
        Some("climate_fan"),
    ),
    (
        "climate.back_home",
        "Back",
        "climate_main",
        "go_home",
        true,
        Some("home"),
    ),
    ("climate.fan_up", "Fan Up", "climate_fan", "set_fan", true, None),
    ("climate.fan_down", "Fan Down", "climate_fan", "set_fan", true, None),
    (
        "climate.fan_back",
        "Back",
        "climate_fan",
        "close_fan",
        true,
        Some("climate_main"),
    ),
    ("media.play", "Play/Pause", "media_main", "toggle_playback", true, None),
    ("media.next", "Next Track", "media_main", "skip_track", true, None),
    ("media.prev", "Previous Track", "media_main", "skip_track", true, None),
    (
        "media.source",
        "Source",
        "media_main",
        "open_sources",
        true,
        Some("media_sources"),
    ),
    ("media.back_home", "Back", "media_main", "go_home", true, Some("home")),
    (
        "media.src_radio",
        "Radio",
        "media_sources",
        "select_source",
        true,
        Some("media_main"),
    ),
    (
        "media.src_usb",
        "USB",
        "media_sources",
        "select_source",
        true,
        Some("media_main"),
    ),
    (
        "media.src_bt",
        "Bluetooth Audio",
        "media_sources",
        "select_source",
        true,
        Some("media_main"),
    ),
    (
        "phone.contacts",
        "Contacts",
        "phone_main",
        "open_contacts",
        true,
        Some("phone_contacts"),
    ),
    (
        "phone.recents",
        "Recent Calls",
        "phone_main",
        "show_recents",
        true,
        None,
    ),
    ("phone.keypad", "Keypad", "phone_main", "show_keypad", true, None),
    ("phone.back_home", "Back", "phone_main", "go_home", true, Some("home")),
    (
        "phone.contact_1",
        "First Contact",
        "phone_contacts",
        "select_contact",
        true,
        None,
    ),
    (
        "phone.call",
        "Call",
        "phone_contacts",
        "start_call",
        true,
        Some("phone_main"),
    ),
];

const EXTRA_SCREEN: &str = "generated";

/// Catalog covering the base head-unit screens plus every element the
/// mixture references. Unknown mixture elements land on a screen linked
/// from the home screen so the screen graph stays connected.
pub fn write_catalog(config: &GenConfig) -> Vec<UiElement> {
    let mut elements: Vec<UiElement> = BASE_CATALOG
        .iter()
        .map(|(id, label, screen, function, interactive, leads)| UiElement {
            element_id: (*id).into(),
            label: (*label).into(),
            app: app_of(id),
            screen_id: (*screen).into(),
            function: (*function).into(),
            interactive: *interactive,
            leads_to_screen: leads.map(String::from),
        })
        .collect();
    let known: BTreeSet<String> = elements.iter().map(|e| e.element_id.clone()).collect();
    let extra: BTreeSet<&String> = config
        .flow_mixture
        .iter()
        .flat_map(|f| f.path.iter())
        .filter(|id| !known.contains(*id))
        .collect();
    if !extra.is_empty() {
        elements.push(UiElement {
            element_id: "home.more".into(),
            label: "More".into(),
            app: "home".into(),
            screen_id: HOME_SCREEN.into(),
            function: "open_more".into(),
            interactive: true,
            leads_to_screen: Some(EXTRA_SCREEN.into()),
        });
        elements.extend(extra.into_iter().map(|id| UiElement {
            element_id: id.clone(),
            label: id.clone(),
            app: app_of(id),
            screen_id: EXTRA_SCREEN.into(),
            function: "unspecified".into(),
            interactive: true,
            leads_to_screen: None,
        }));
    }
    elements.sort_by(|a, b| a.element_id.cmp(&b.element_id));
    elements
}

fn app_of(id: &str) -> String {
    match id.split('.').next().unwrap_or(id) {
        "nav" => "navigation".into(),
        other => other.into(),
    }
}

fn pick<'a>(rng: &mut ChaCha8Rng, items: &'a [Weighted]) -> &'a str {
    let dist = WeightedIndex::new(items.iter().map(|w| w.weight)).expect("weights validated");
    &items[dist.sample(rng)].value
}

fn round2(x: f64) -> f64 {
    (x * 100.0).round() / 100.0
}

struct SessionBuilder<'a> {
    vehicle_id: String,
    session_id: String,
    software_version: String,
    car_model: String,
    noise_pool: &'a [String],
    noise_gap: Exp<f64>,
    events: Vec<InteractionEvent>,
}

impl SessionBuilder<'_> {
    fn push(&mut self, ts: i64, element: &str, action: Action) {
        self.events.push(InteractionEvent {
            vehicle_id: self.vehicle_id.clone(),
            session_id: self.session_id.clone(),
            timestamp_ms: ts,
            element_id: element.into(),
            action,
            software_version: self.software_version.clone(),
            car_model: self.car_model.clone(),
        });
    }

    fn noise_event(&mut self, rng: &mut ChaCha8Rng, ts: i64) {
        let element = self.noise_pool[rng.random_range(0..self.noise_pool.len())].clone();
        let action = match rng.random_range(0..20) {
            0..=13 => Action::Tap,
            14..=16 => Action::Scroll,
            17..=18 => Action::Drag,
            _ => Action::LongPress,
        };
        self.push(ts, &element, action);
    }

    /// Background taps over `[from, from + len)`; returns the stretch end.
    fn noise_stretch(&mut self, rng: &mut ChaCha8Rng, from: i64, len: i64) -> i64 {
        let end = from + len;
        let mut t = from;
        loop {
            t += (self.noise_gap.sample(rng).ceil() as i64).max(1);
            if t >= end {
                return end;
            }
            self.noise_event(rng, t);
        }
    }
}

/// Generates the full dataset in memory.
pub fn generate(config: &GenConfig) -> Result<Dataset, GenError> {
    let task = config.validate()?;
    let catalog = write_catalog(config);
    let noise_pool: Vec<String> = catalog
        .iter()
        .filter(|e| e.interactive && e.element_id != task.start_element && e.element_id != task.end_element)
        .map(|e| e.element_id.clone())
        .collect();
    if noise_pool.is_empty() {
        return Err(GenError::EmptyNoisePool);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mixture = WeightedIndex::new(config.flow_mixture.iter().map(|f| f.weight)).expect("weights validated");
    let non_terminal: Vec<usize> = (0..config.flow_mixture.len())
        .filter(|i| config.flow_mixture[*i].status != SequenceStatus::AbortedSessionEnd)
        .collect();
    // validation guarantees a completed flow, so this is never empty
    let non_terminal_mix =
        WeightedIndex::new(non_terminal.iter().map(|i| config.flow_mixture[*i].weight)).expect("weights validated");
    let noise_gap =
        Exp::new(config.noise_event_rate / 60_000.0).map_err(|_| GenError::NotPositive("noise_event_rate"))?;
    let on = Exp::new(1.0 / config.glance_model.mean_on_ms).map_err(|_| GenError::NotPositive("mean_on_ms"))?;
    let off = Exp::new(1.0 / config.glance_model.mean_off_ms).map_err(|_| GenError::NotPositive("mean_off_ms"))?;
    let speed_step = Normal::new(0.0, 0.3).expect("constant parameters");
    let steer_noise = Normal::new(0.0, 4.0).expect("constant parameters");
    let sample_period = ((1000.0 / config.signal_rate_hz).round() as i64).max(1);

    let mut interactions = Vec::new();
    let mut glances = Vec::new();
    let mut signals = Vec::new();
    let mut planted_log = Vec::new();
    let mut counts: BTreeMap<(Vec<String>, SequenceStatus, String, String), usize> = BTreeMap::new();

    for v in 0..config.n_vehicles {
        let vehicle_id = format!("veh-{:04}", v + 1);
        let car_model = pick(&mut rng, &config.car_models).to_string();
        for s in 0..config.n_sessions_per_vehicle {
            let session_id = format!("{vehicle_id}-s{:02}", s + 1);
            let software_version = pick(&mut rng, &config.software_versions).to_string();
            let session_start =
                config.start_epoch_ms + (v * config.n_sessions_per_vehicle + s) as i64 * SESSION_SPACING_MS;

            let (lo, hi) = config.sequences_per_session;
            let k = rng.random_range(lo..=hi);
            let mut chosen: Vec<usize> = (0..k).map(|_| mixture.sample(&mut rng)).collect();
            // at most one attempt can run into the end of the session, and it goes last
            let terminal = |i: &usize| config.flow_mixture[*i].status == SequenceStatus::AbortedSessionEnd;
            let mut seen_terminal = false;
            for slot in chosen.iter_mut() {
                if terminal(slot) {
                    if seen_terminal {
                        *slot = non_terminal[non_terminal_mix.sample(&mut rng)];
                    }
                    seen_terminal = true;
                }
            }
            if let Some(pos) = chosen.iter().position(terminal) {
                let t = chosen.remove(pos);
                chosen.push(t);
            }

            let mut b = SessionBuilder {
                vehicle_id: vehicle_id.clone(),
                session_id: session_id.clone(),
                software_version: software_version.clone(),
                car_model: car_model.clone(),
                noise_pool: &noise_pool,
                noise_gap,
                events: Vec::new(),
            };
            let lead = rng.random_range(5_000..20_000);
            let mut t = b.noise_stretch(&mut rng, session_start, lead);
            for idx in chosen {
                let flow = &config.flow_mixture[idx];
                let mut timestamps = Vec::with_capacity(flow.path.len());
                t += rng.random_range(500..3_000);
                for (step, element) in flow.path.iter().enumerate() {
                    if step > 0 {
                        t += rng.random_range(400..6_000);
                    }
                    b.push(t, element, Action::Tap);
                    timestamps.push(t);
                }
                *counts
                    .entry((
                        flow.path.clone(),
                        flow.status,
                        software_version.clone(),
                        car_model.clone(),
                    ))
                    .or_default() += 1;
                planted_log.push(PlantedSequence {
                    vehicle_id: vehicle_id.clone(),
                    session_id: session_id.clone(),
                    path: flow.path.clone(),
                    status: flow.status,
                    timestamps,
                });
                match flow.status {
                    SequenceStatus::AbortedSessionEnd => break,
                    SequenceStatus::AbortedGap => {
                        // the next event must exist and come after the gap limit
                        t += DEFAULT_MAX_GAP_MS + rng.random_range(2_000..15_000);
                        b.noise_event(&mut rng, t);
                    }
                    _ => {}
                }
                let pause = rng.random_range(5_000..25_000);
                t = b.noise_stretch(&mut rng, t, pause);
            }
            let last_event = b.events.last().map_or(session_start, |e| e.timestamp_ms);
            let session_end = last_event + SIGNAL_LEAD_OUT_MS;
            interactions.append(&mut b.events);

            let mut cursor = session_start;
            let mut aoi = Aoi::Road;
            while cursor < session_end {
                let dwell = match aoi {
                    Aoi::CenterStack => on.sample(&mut rng),
                    _ => off.sample(&mut rng),
                };
                let end = (cursor + (dwell.round() as i64).max(50)).min(session_end);
                glances.push(GlanceEvent {
                    vehicle_id: vehicle_id.clone(),
                    session_id: session_id.clone(),
                    aoi,
                    start_ms: cursor,
                    end_ms: end,
                });
                cursor = end;
                aoi = if aoi == Aoi::Road { Aoi::CenterStack } else { Aoi::Road };
            }

            let mut speed: f64 = rng.random_range(5.0..30.0);
            let mut steer = 0.0f64;
            let mut ts = session_start;
            while ts <= session_end {
                speed = (speed + speed_step.sample(&mut rng)).clamp(0.0, 45.0);
                steer = (0.95 * steer + steer_noise.sample(&mut rng)).clamp(-180.0, 180.0);
                signals.push(SignalSample {
                    vehicle_id: vehicle_id.clone(),
                    session_id: session_id.clone(),
                    timestamp_ms: ts,
                    speed_mps: round2(speed),
                    steering_angle_deg: round2(steer),
                });
                ts += sample_period;
            }
        }
    }

    let flow_counts = counts
        .into_iter()
        .map(|((path, status, software_version, car_model), count)| FlowCount {
            path,
            status,
            software_version,
            car_model,
            count,
        })
        .collect();
    Ok(Dataset {
        interactions,
        glances,
        signals,
        catalog,
        manifest: Manifest {
            task,
            flow_counts,
            planted: planted_log,
        },
    })
}

fn render_lines<T: Serialize>(items: &[T]) -> String {
    let mut out = String::with_capacity(items.len() * 128);
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("records serialize"));
        out.push('\n');
    }
    out
}

impl Dataset {
    /// One log in its line-delimited file format.
    pub fn render(&self, kind: RecordKind) -> String {
        match kind {
            RecordKind::Interactions => render_lines(&self.interactions),
            RecordKind::Glances => render_lines(&self.glances),
            RecordKind::Signals => render_lines(&self.signals),
        }
    }

    /// Writes the three logs, the catalog and the manifest into `dir`.
    pub fn write_to(&self, dir: &Path) -> Result<(), GenError> {
        fs::create_dir_all(dir)?;
        for kind in RecordKind::ALL {
            fs::write(dir.join(kind.file_name()), self.render(kind))?;
        }
        fs::write(dir.join(CATALOG_FILE), render_catalog(&self.catalog))?;
        fs::write(dir.join(MANIFEST_FILE), self.manifest.render())?;
        Ok(())
    }

    pub fn catalog(&self) -> Catalog {
        Catalog::from_elements(self.catalog.iter().cloned()).expect("generated catalog is valid")
    }
}
