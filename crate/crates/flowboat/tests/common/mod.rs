#![allow(dead_code)]

pub mod schema;

use std::collections::BTreeMap;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use axum::Router;
use flowboat::analysis::Engine;
use flowboat::catalog_file::CatalogHandle;
use flowboat::datagen::{generate, Dataset, GenConfig};
use flowboat::records::RecordKind;
use flowboat::store::Store;
use flowboat::tasks::TaskRegistry;
use flowboat_core::flows::FlowStatus;
use flowboat_core::InteractionSequence;
use http_body_util::BodyExt;
use tower::ServiceExt;

pub fn seed42() -> Dataset {
    generate(&GenConfig::default()).expect("default config generates")
}

/// Store holding the whole dataset in snapshot 1.
pub fn load(data: &Dataset) -> Store {
    let store = Store::in_memory();
    for kind in RecordKind::ALL {
        let report = store.ingest_bytes(data.render(kind).as_bytes(), kind).unwrap();
        assert_eq!(report.rejected, 0, "{kind}: {:?}", report.reject_reasons.first());
    }
    store.publish_snapshot().unwrap();
    store
}

/// Engine over the dataset with the planted task registered as `t1`.
pub fn engine(data: &Dataset) -> Arc<Engine> {
    let engine = Engine::new(
        load(data),
        CatalogHandle::new(data.catalog()),
        TaskRegistry::in_memory(),
    );
    let task = &data.manifest.task;
    engine
        .define_manual(&task.start_element, &task.end_element, None)
        .unwrap();
    Arc::new(engine)
}

/// Counts per (path, completed/aborted), computed by plain iteration.
pub fn counts_by_flow(seqs: &[InteractionSequence]) -> BTreeMap<(Vec<String>, FlowStatus), usize> {
    let mut out = BTreeMap::new();
    for s in seqs {
        let path = s.events.iter().map(|e| e.element_id.clone()).collect();
        *out.entry((path, FlowStatus::from(s.status))).or_default() += 1;
    }
    out
}

pub async fn call(app: &Router, method: &str, uri: &str, body: impl Into<Body>) -> (StatusCode, Vec<u8>) {
    let req = Request::builder().method(method).uri(uri).body(body.into()).unwrap();
    let resp = app.clone().oneshot(req).await.unwrap();
    let status = resp.status();
    let bytes = resp.into_body().collect().await.unwrap().to_bytes().to_vec();
    (status, bytes)
}

pub async fn get(app: &Router, uri: &str) -> (StatusCode, serde_json::Value) {
    let (status, bytes) = call(app, "GET", uri, Body::empty()).await;
    (status, serde_json::from_slice(&bytes).expect("JSON body"))
}
