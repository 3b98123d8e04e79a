//! HTTP interface. Every error body is an [`ApiError`]; analysis responses
//! carry the `snapshot_id` they were computed from.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, RawQuery, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use flowboat_core::catalog::{CatalogError, Screen, UiElement};
use flowboat_core::filter::FilterError;
use flowboat_core::metrics::{DistributionError, Metric};
use flowboat_core::model::Aoi;
use flowboat_core::task::TaskError;
use flowboat_core::{ExtractionConfig, FilterSpec, SequenceStatus, TaskDefinition};
use serde::{Deserialize, Serialize};

use crate::analysis::{AnalysisError, AnalysisQuery, Engine};
use crate::catalog_file::{parse_catalog, CatalogLoadError};
use crate::records::RecordKind;
use crate::store::{SnapshotId, StoreError};
use crate::tasks::RegistryError;

const DEFAULT_SEARCH_LIMIT: usize = 20;
const MAX_SEARCH_LIMIT: usize = 1_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorCode {
    BadRequest,
    NotFound,
    Conflict,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ApiError {
    #[serde(skip)]
    pub status: StatusCode,
    pub code: ErrorCode,
    /// Specific machine-readable cause, e.g. `start_equals_end`.
    pub reason: String,
    pub message: String,
    /// Offending request field, when there is one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl ApiError {
    fn new(code: ErrorCode, reason: &str, message: impl Into<String>) -> Self {
        let status = match code {
            ErrorCode::BadRequest => StatusCode::BAD_REQUEST,
            ErrorCode::NotFound => StatusCode::NOT_FOUND,
            ErrorCode::Conflict => StatusCode::CONFLICT,
            ErrorCode::Internal => StatusCode::INTERNAL_SERVER_ERROR,
        };
        Self {
            status,
            code,
            reason: reason.into(),
            message: message.into(),
            detail: None,
        }
    }

    fn bad_request(reason: &str, message: impl Into<String>) -> Self {
        Self::new(ErrorCode::BadRequest, reason, message)
    }

    fn not_found(reason: &str, message: impl Into<String>) -> Self {
        Self::new(ErrorCode::NotFound, reason, message)
    }

    fn internal(message: impl Into<String>) -> Self {
        Self::new(ErrorCode::Internal, "internal", message)
    }

    fn at(mut self, field: &str) -> Self {
        self.detail = Some(field.into());
        self
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(&self)).into_response()
    }
}

impl From<TaskError> for ApiError {
    fn from(e: TaskError) -> Self {
        let field = match e {
            TaskError::TooShort => "recording",
            _ => "start_element",
        };
        ApiError::bad_request(e.code(), e.to_string()).at(field)
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::UnknownSnapshot(_) => ApiError::not_found("unknown_snapshot", e.to_string()).at("snapshot"),
            StoreError::Read { .. } => ApiError::bad_request("unreadable_path", e.to_string()).at("path"),
            other => ApiError::internal(other.to_string()),
        }
    }
}

impl From<AnalysisError> for ApiError {
    fn from(e: AnalysisError) -> Self {
        let message = e.to_string();
        match e {
            AnalysisError::UnknownTask(_) => ApiError::not_found("unknown_task", message),
            AnalysisError::UnknownSequence(_) => ApiError::not_found("unknown_sequence", message),
            AnalysisError::UnknownElement(_) => ApiError::not_found("unknown_element", message),
            AnalysisError::Store(e) => e.into(),
            AnalysisError::Filter(FilterError::ZeroTopN) => {
                ApiError::bad_request("invalid_filter", message).at("top_n")
            }
            AnalysisError::Filter(FilterError::InvertedTimeRange) => {
                ApiError::bad_request("invalid_filter", message).at("from_ms")
            }
            AnalysisError::Distribution(DistributionError::UnknownFlow(_)) => {
                ApiError::not_found("unknown_flow", message).at("flow")
            }
            AnalysisError::Distribution(DistributionError::NoFlowsSelected) => {
                ApiError::bad_request("no_flows_selected", message).at("flow")
            }
            AnalysisError::Registry(RegistryError::Task(e)) => e.into(),
            AnalysisError::Registry(_) => ApiError::internal(message),
        }
    }
}

impl From<CatalogLoadError> for ApiError {
    fn from(e: CatalogLoadError) -> Self {
        let message = e.to_string();
        match e {
            CatalogLoadError::Invalid(CatalogError::Duplicate(_)) => ApiError::bad_request("duplicate", message),
            CatalogLoadError::Invalid(CatalogError::DanglingScreen { .. }) => {
                ApiError::bad_request("dangling_screen", message)
            }
            _ => ApiError::bad_request("invalid_catalog", message),
        }
    }
}

type ApiResult<T> = Result<T, ApiError>;

/// Decoded query string: parameter name to every value given for it.
struct Params(BTreeMap<String, Vec<String>>);

impl Params {
    fn parse(raw: Option<String>, allowed: &[&str]) -> ApiResult<Self> {
        let mut map: BTreeMap<String, Vec<String>> = BTreeMap::new();
        for (k, v) in url::form_urlencoded::parse(raw.unwrap_or_default().as_bytes()) {
            if !allowed.contains(&k.as_ref()) {
                return Err(
                    ApiError::bad_request("unknown_parameter", format!("unknown query parameter {k:?}")).at(&k),
                );
            }
            map.entry(k.into_owned()).or_default().push(v.into_owned());
        }
        Ok(Self(map))
    }

    fn all(&self, name: &str) -> Option<&[String]> {
        self.0.get(name).map(Vec::as_slice)
    }

    fn one(&self, name: &str) -> ApiResult<Option<&str>> {
        match self.all(name) {
            None => Ok(None),
            Some([v]) => Ok(Some(v.as_str())),
            Some(_) => {
                Err(ApiError::bad_request("repeated_parameter", format!("{name} given more than once")).at(name))
            }
        }
    }

    fn parsed<T: std::str::FromStr>(&self, name: &str) -> ApiResult<Option<T>> {
        self.one(name)?
            .map(|v| {
                v.parse().map_err(|_| {
                    ApiError::bad_request("invalid_parameter", format!("cannot parse {name}={v:?}")).at(name)
                })
            })
            .transpose()
    }

    fn set(&self, name: &str) -> Option<BTreeSet<String>> {
        self.all(name).map(|vs| vs.iter().cloned().collect())
    }

    fn analysis(&self) -> ApiResult<AnalysisQuery> {
        let mut config = ExtractionConfig::default();
        if let Some(g) = self.parsed::<i64>("max_gap_ms")? {
            if g < 0 {
                return Err(
                    ApiError::bad_request("invalid_parameter", "max_gap_ms must be non-negative").at("max_gap_ms"),
                );
            }
            config.max_gap_ms = g;
        }
        if let Some(b) = self.parsed::<bool>("include_aborted")? {
            config.include_aborted = b;
        }
        if let Some(a) = self.one("aoi")? {
            config.glance_aoi_for_metrics = Aoi::parse(a)
                .ok_or_else(|| ApiError::bad_request("invalid_parameter", format!("unknown aoi {a:?}")).at("aoi"))?;
        }
        let statuses = self
            .all("status")
            .map(|vs| {
                vs.iter()
                    .map(|v| {
                        SequenceStatus::parse(v).ok_or_else(|| {
                            ApiError::bad_request("invalid_parameter", format!("unknown status {v:?}")).at("status")
                        })
                    })
                    .collect::<ApiResult<BTreeSet<_>>>()
            })
            .transpose()?;
        let from = self.parsed::<i64>("from_ms")?;
        let to = self.parsed::<i64>("to_ms")?;
        let time_range = match (from, to) {
            (None, None) => None,
            (f, t) => Some((f.unwrap_or(i64::MIN), t.unwrap_or(i64::MAX))),
        };
        Ok(AnalysisQuery {
            snapshot: self.parsed::<SnapshotId>("snapshot")?,
            config,
            filter: FilterSpec {
                software_versions: self.set("software_version"),
                car_models: self.set("car_model"),
                top_n_flows: self.parsed("top_n")?,
                statuses,
                time_range,
            },
        })
    }
}

const FILTER_PARAMS: &[&str] = &[
    "snapshot",
    "software_version",
    "car_model",
    "status",
    "top_n",
    "from_ms",
    "to_ms",
    "max_gap_ms",
    "include_aborted",
    "aoi",
];
const DISTRIBUTION_PARAMS: &[&str] = &[
    "snapshot",
    "software_version",
    "car_model",
    "status",
    "top_n",
    "from_ms",
    "to_ms",
    "max_gap_ms",
    "include_aborted",
    "aoi",
    "flow",
    "metric",
];
const SEQUENCE_PARAMS: &[&str] = &["snapshot", "max_gap_ms", "include_aborted", "aoi"];

fn json_body<T: for<'de> Deserialize<'de>>(body: &[u8]) -> ApiResult<T> {
    serde_json::from_slice(body).map_err(|e| ApiError::bad_request("malformed_body", e.to_string()))
}

async fn blocking<T, F>(engine: &Arc<Engine>, f: F) -> ApiResult<T>
where
    F: FnOnce(&Engine) -> ApiResult<T> + Send + 'static,
    T: Send + 'static,
{
    let engine = engine.clone();
    tokio::task::spawn_blocking(move || f(&engine))
        .await
        .map_err(|e| ApiError::internal(e.to_string()))?
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct NewTask {
    start_element: String,
    end_element: String,
    #[serde(default)]
    name: Option<String>,
}

async fn create_task(State(engine): State<Arc<Engine>>, body: Bytes) -> ApiResult<(StatusCode, Json<TaskDefinition>)> {
    let req: NewTask = json_body(&body)?;
    let task = engine.define_manual(&req.start_element, &req.end_element, req.name)?;
    Ok((StatusCode::CREATED, Json(task)))
}

async fn create_task_from_recording(
    State(engine): State<Arc<Engine>>,
    RawQuery(raw): RawQuery,
    body: Bytes,
) -> ApiResult<(StatusCode, Json<TaskDefinition>)> {
    let params = Params::parse(raw, &["name"])?;
    let text = std::str::from_utf8(&body)
        .map_err(|_| ApiError::bad_request("malformed_body", "recording is not UTF-8").at("recording"))?;
    let task = engine.define_from_recording(text, params.one("name")?.map(String::from))?;
    Ok((StatusCode::CREATED, Json(task)))
}

#[derive(Serialize)]
struct TaskList {
    tasks: Vec<TaskDefinition>,
}

async fn list_tasks(State(engine): State<Arc<Engine>>) -> Json<TaskList> {
    Json(TaskList { tasks: engine.tasks() })
}

async fn get_task(State(engine): State<Arc<Engine>>, Path(id): Path<String>) -> ApiResult<Json<TaskDefinition>> {
    Ok(Json(engine.task(&id)?))
}

async fn task_flows(
    State(engine): State<Arc<Engine>>,
    Path(id): Path<String>,
    RawQuery(raw): RawQuery,
) -> ApiResult<Response> {
    let query = Params::parse(raw, FILTER_PARAMS)?.analysis()?;
    blocking(&engine, move |e| Ok(Json(e.flows(&id, &query)?).into_response())).await
}

async fn task_sankey(
    State(engine): State<Arc<Engine>>,
    Path(id): Path<String>,
    RawQuery(raw): RawQuery,
) -> ApiResult<Response> {
    let query = Params::parse(raw, FILTER_PARAMS)?.analysis()?;
    blocking(&engine, move |e| Ok(Json(e.sankey(&id, &query)?).into_response())).await
}

async fn task_distribution(
    State(engine): State<Arc<Engine>>,
    Path(id): Path<String>,
    RawQuery(raw): RawQuery,
) -> ApiResult<Response> {
    let params = Params::parse(raw, DISTRIBUTION_PARAMS)?;
    let query = params.analysis()?;
    let metric: Metric = params
        .parsed("metric")?
        .ok_or_else(|| ApiError::bad_request("missing_parameter", "metric is required").at("metric"))?;
    let flows = params.all("flow").map(<[String]>::to_vec);
    blocking(&engine, move |e| {
        Ok(Json(e.distribution(&id, &query, flows.as_deref(), metric)?).into_response())
    })
    .await
}

async fn sequence(
    State(engine): State<Arc<Engine>>,
    Path(id): Path<String>,
    RawQuery(raw): RawQuery,
) -> ApiResult<Response> {
    let query = Params::parse(raw, SEQUENCE_PARAMS)?.analysis()?;
    blocking(&engine, move |e| Ok(Json(e.sequence(&id, &query)?).into_response())).await
}

#[derive(Serialize)]
struct SearchResults {
    query: String,
    results: Vec<UiElement>,
}

async fn search_concepts(State(engine): State<Arc<Engine>>, RawQuery(raw): RawQuery) -> ApiResult<Json<SearchResults>> {
    let params = Params::parse(raw, &["q", "limit"])?;
    let query = params.one("q")?.unwrap_or_default().to_string();
    let limit = params
        .parsed::<usize>("limit")?
        .unwrap_or(DEFAULT_SEARCH_LIMIT)
        .min(MAX_SEARCH_LIMIT);
    let catalog = engine.catalog.current();
    let results = catalog.search(&query, limit).into_iter().cloned().collect();
    Ok(Json(SearchResults { query, results }))
}

#[derive(Serialize)]
struct ScreenGraph {
    screens: Vec<Screen>,
}

async fn screens(State(engine): State<Arc<Engine>>) -> Json<ScreenGraph> {
    Json(ScreenGraph {
        screens: engine.catalog.current().screens(),
    })
}

async fn concept(State(engine): State<Arc<Engine>>, Path(id): Path<String>) -> ApiResult<Json<UiElement>> {
    Ok(Json(engine.element(&id)?))
}

async fn coverage(State(engine): State<Arc<Engine>>, RawQuery(raw): RawQuery) -> ApiResult<Response> {
    let snapshot = Params::parse(raw, &["snapshot"])?.parsed::<SnapshotId>("snapshot")?;
    blocking(&engine, move |e| Ok(Json(e.coverage(snapshot)?).into_response())).await
}

#[derive(Serialize)]
struct CatalogLoaded {
    elements: usize,
}

async fn replace_catalog(State(engine): State<Arc<Engine>>, body: Bytes) -> ApiResult<Json<CatalogLoaded>> {
    let catalog = parse_catalog(&body)?;
    Ok(Json(CatalogLoaded {
        elements: engine.catalog.replace(catalog),
    }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct IngestRequest {
    kind: String,
    #[serde(default)]
    path: Option<PathBuf>,
    #[serde(default)]
    payload: Option<String>,
}

async fn ingest(State(engine): State<Arc<Engine>>, body: Bytes) -> ApiResult<Response> {
    let req: IngestRequest = json_body(&body)?;
    let kind: RecordKind = req
        .kind
        .parse()
        .map_err(|m: String| ApiError::bad_request("invalid_parameter", m).at("kind"))?;
    blocking(&engine, move |e| {
        let report = match (req.path, req.payload) {
            (Some(path), None) => e.store.ingest_file(path, kind)?,
            (None, Some(payload)) => e.store.ingest_bytes(payload.as_bytes(), kind)?,
            _ => {
                return Err(ApiError::bad_request("malformed_body", "give exactly one of path and payload").at("path"))
            }
        };
        Ok(Json(report).into_response())
    })
    .await
}

#[derive(Serialize)]
struct Published {
    snapshot_id: SnapshotId,
}

async fn publish(State(engine): State<Arc<Engine>>) -> ApiResult<(StatusCode, Json<Published>)> {
    let snapshot_id = blocking(&engine, |e| Ok(e.store.publish_snapshot()?)).await?;
    Ok((StatusCode::CREATED, Json(Published { snapshot_id })))
}

async fn latest_snapshot(State(engine): State<Arc<Engine>>) -> ApiResult<Response> {
    let snapshot = engine
        .store
        .latest()
        .ok_or_else(|| ApiError::not_found("no_snapshot", "nothing has been published yet"))?;
    Ok(Json(snapshot.info()).into_response())
}

async fn no_route() -> ApiError {
    ApiError::not_found("no_route", "no such endpoint")
}

async fn wrong_method() -> ApiError {
    let mut e = ApiError::bad_request("method_not_allowed", "method not allowed on this endpoint");
    e.status = StatusCode::METHOD_NOT_ALLOWED;
    e
}

pub fn router(engine: Arc<Engine>) -> Router {
    Router::new()
        .route("/api/tasks", post(create_task).get(list_tasks))
        .route("/api/tasks/recording", post(create_task_from_recording))
        .route("/api/tasks/{id}", get(get_task))
        .route("/api/tasks/{id}/flows", get(task_flows))
        .route("/api/tasks/{id}/sankey", get(task_sankey))
        .route("/api/tasks/{id}/distribution", get(task_distribution))
        .route("/api/sequences/{id}", get(sequence))
        .route("/api/concepts", axum::routing::put(replace_catalog))
        .route("/api/concepts/search", get(search_concepts))
        .route("/api/concepts/screens", get(screens))
        .route("/api/concepts/coverage", get(coverage))
        .route("/api/concepts/{id}", get(concept))
        .route("/api/ingest", post(ingest))
        .route("/api/snapshots", post(publish))
        .route("/api/snapshots/latest", get(latest_snapshot))
        .fallback(no_route)
        .method_not_allowed_fallback(wrong_method)
        .with_state(engine)
}
