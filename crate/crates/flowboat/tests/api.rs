#[path = "../../core/tests/oracle/mod.rs"]
mod oracle;

mod common;

use std::collections::BTreeMap;
use std::sync::OnceLock;

use axum::body::Body;
use axum::http::StatusCode;
use axum::Router;
use flowboat::api::router;
use flowboat::datagen::{generate, Dataset, GenConfig};
use serde_json::Value;

/// Default mixture with a sparse signal rate to keep per-test setup cheap.
fn dataset() -> &'static Dataset {
    static DATA: OnceLock<Dataset> = OnceLock::new();
    DATA.get_or_init(|| {
        generate(&GenConfig {
            signal_rate_hz: 1.0,
            ..GenConfig::default()
        })
        .unwrap()
    })
}

fn app() -> Router {
    router(common::engine(dataset()))
}

async fn post(app: &Router, uri: &str, body: &str) -> (StatusCode, Value) {
    let (status, bytes) = common::call(app, "POST", uri, Body::from(body.to_string())).await;
    (status, serde_json::from_slice(&bytes).unwrap())
}

#[tokio::test]
async fn manual_task_definition() {
    let app = app();
    let (s, body) = post(
        &app,
        "/api/tasks",
        r#"{"start_element":"nav.search","end_element":"nav.result_1","name":"pick"}"#,
    )
    .await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(body["task_id"], "t2");
    assert_eq!(body["name"], "pick");
    let (s, body) = post(
        &app,
        "/api/tasks",
        r#"{"start_element":"nav.home","end_element":"nav.home"}"#,
    )
    .await;
    assert_eq!(
        (s, body["reason"].as_str()),
        (StatusCode::BAD_REQUEST, Some("start_equals_end"))
    );
    let (s, body) = post(
        &app,
        "/api/tasks",
        r#"{"start_element":"nav.home","end_element":"ghost.btn"}"#,
    )
    .await;
    assert_eq!(
        (s, body["reason"].as_str()),
        (StatusCode::BAD_REQUEST, Some("unknown_element"))
    );
    let (s, body) = post(&app, "/api/tasks", "{").await;
    assert_eq!(
        (s, body["reason"].as_str()),
        (StatusCode::BAD_REQUEST, Some("malformed_body"))
    );
    let (_, list) = common::get(&app, "/api/tasks").await;
    assert_eq!(list["tasks"].as_array().unwrap().len(), 2);
}

#[tokio::test]
async fn recorded_task_definition() {
    let app = app();
    let (s, body) = post(
        &app,
        "/api/tasks/recording",
        "nav.home\nnav.search\nnav.kbd_enter\nnav.result_1\n",
    )
    .await;
    assert_eq!(s, StatusCode::CREATED);
    assert_eq!(
        (body["start_element"].as_str(), body["end_element"].as_str()),
        (Some("nav.home"), Some("nav.result_1"))
    );
    let (s, body) = post(&app, "/api/tasks/recording", "nav.home\n").await;
    assert_eq!(
        (s, body["reason"].as_str()),
        (StatusCode::BAD_REQUEST, Some("too_short"))
    );
    let (s, body) = post(&app, "/api/tasks/recording", "nav.home\nghost.btn\n").await;
    assert_eq!(
        (s, body["reason"].as_str()),
        (StatusCode::BAD_REQUEST, Some("unknown_element"))
    );
}

/// Per-node balance read straight off the JSON edge list.
fn json_balance(g: &Value) -> BTreeMap<(u64, String), (u64, u64)> {
    let mut out: BTreeMap<(u64, String), (u64, u64)> = BTreeMap::new();
    for n in g["nodes"].as_array().unwrap() {
        let key = (
            n["depth"].as_u64().unwrap(),
            n["element_id"].as_str().unwrap().to_string(),
        );
        out.entry(key.clone()).or_default();
        if key.0 == 0 {
            out.get_mut(&key).unwrap().0 = g["total_sequences"].as_u64().unwrap();
        }
    }
    for e in g["edges"].as_array().unwrap() {
        let c = e["count"].as_u64().unwrap();
        let from = (
            e["from"]["depth"].as_u64().unwrap(),
            e["from"]["element_id"].as_str().unwrap().to_string(),
        );
        out.get_mut(&from).unwrap().1 += c;
        if e["to"]["kind"] == "element" {
            let to = (
                e["to"]["depth"].as_u64().unwrap(),
                e["to"]["element_id"].as_str().unwrap().to_string(),
            );
            out.get_mut(&to).unwrap().0 += c;
        }
    }
    out
}

#[tokio::test]
async fn sankey_examples() {
    let app = app();
    let manifest = &dataset().manifest;
    let (s, g) = common::get(&app, "/api/tasks/t1/sankey").await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!(g["snapshot_id"], 1);
    assert_eq!(g["total_sequences"].as_u64().unwrap() as usize, manifest.planted.len());
    for (node, (i, o)) in json_balance(&g) {
        assert_eq!(i, o, "{node:?}");
    }
    let planted_for = |models: &[&str]| -> u64 {
        manifest
            .flow_counts
            .iter()
            .filter(|f| models.contains(&f.car_model.as_str()))
            .map(|f| f.count as u64)
            .sum()
    };
    let (_, x) = common::get(&app, "/api/tasks/t1/sankey?car_model=modelX").await;
    assert_eq!(x["total_sequences"].as_u64().unwrap(), planted_for(&["modelX"]));
    let (_, xy) = common::get(&app, "/api/tasks/t1/sankey?car_model=modelX&car_model=modelY").await;
    assert_eq!(
        xy["total_sequences"].as_u64().unwrap(),
        planted_for(&["modelX", "modelY"])
    );
    let (s, e) = common::get(&app, "/api/tasks/t9/sankey").await;
    assert_eq!((s, e["code"].as_str()), (StatusCode::NOT_FOUND, Some("not_found")));
}

#[tokio::test]
async fn aborted_sequences_can_be_left_out() {
    let app = app();
    let completed: usize = dataset()
        .manifest
        .planted
        .iter()
        .filter(|p| p.status.is_completed())
        .count();
    let (_, g) = common::get(&app, "/api/tasks/t1/sankey?include_aborted=false").await;
    assert_eq!(g["total_sequences"].as_u64().unwrap() as usize, completed);
    let (_, g) = common::get(&app, "/api/tasks/t1/sankey?status=completed").await;
    assert_eq!(g["total_sequences"].as_u64().unwrap() as usize, completed);
}

#[tokio::test]
async fn distribution_examples() {
    let app = app();
    let (_, flows) = common::get(&app, "/api/tasks/t1/flows").await;
    let top = &flows["flows"][0];
    let uri = format!(
        "/api/tasks/t1/distribution?metric=time_on_task_ms&flow={}",
        top["flow_id"].as_str().unwrap()
    );
    let (s, d) = common::get(&app, &uri).await;
    assert_eq!(s, StatusCode::OK);
    let entry = &d["flows"][0];
    let values: Vec<f64> = entry["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p["value"].as_f64().unwrap())
        .collect();
    assert_eq!(values.len() as u64, top["count"].as_u64().unwrap());
    let expected = oracle::order_statistics_boxplot(&values);
    assert_eq!(entry["stats"]["median"].as_f64().unwrap(), expected.median);
    assert_eq!(entry["stats"]["q1"].as_f64().unwrap(), expected.q1);
    assert_eq!(entry["stats"]["q3"].as_f64().unwrap(), expected.q3);
    assert_eq!(
        entry["stats"]["outliers"].as_array().unwrap().len(),
        expected.outliers.len()
    );

    // n_interactions equals the path length for every planted sequence
    let (_, d) = common::get(&app, "/api/tasks/t1/distribution?metric=n_interactions").await;
    for f in d["flows"].as_array().unwrap() {
        let len = f["path"].as_array().unwrap().len() as f64;
        assert!(f["points"]
            .as_array()
            .unwrap()
            .iter()
            .all(|p| p["value"].as_f64() == Some(len)));
    }

    let (s, e) = common::get(&app, "/api/tasks/t1/distribution?metric=tgd_ms&flow=f0000").await;
    assert_eq!((s, e["reason"].as_str()), (StatusCode::NOT_FOUND, Some("unknown_flow")));
    let (s, e) = common::get(&app, "/api/tasks/t1/distribution").await;
    assert_eq!((s, e["detail"].as_str()), (StatusCode::BAD_REQUEST, Some("metric")));
    let (s, e) = common::get(&app, "/api/tasks/t1/distribution?metric=lane_keeping").await;
    assert_eq!((s, e["detail"].as_str()), (StatusCode::BAD_REQUEST, Some("metric")));
}

#[tokio::test]
async fn sequence_detail_examples() {
    let app = app();
    let (_, flows) = common::get(&app, "/api/tasks/t1/flows").await;
    for flow in flows["flows"].as_array().unwrap() {
        let id = flow["sequence_ids"][0].as_str().unwrap();
        let (s, d) = common::get(&app, &format!("/api/sequences/{id}")).await;
        assert_eq!(s, StatusCode::OK);
        let markers = d["markers"].as_array().unwrap();
        assert_eq!(markers.len(), flow["path"].as_array().unwrap().len());
        assert_eq!(markers[0]["t_ms"], 0);
        assert_eq!(d["metrics"]["n_interactions"].as_f64().unwrap() as usize, markers.len());
        let speed = d["speed"].as_array().unwrap();
        assert!(speed.first().unwrap()["t_ms"].as_i64().unwrap() >= -5_000);
    }
    let (s, _) = common::get(&app, "/api/sequences/s0000").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn concept_lookup() {
    let app = app();
    let (_, r) = common::get(&app, "/api/concepts/search?q=nav.search").await;
    assert_eq!(r["results"][0]["element_id"], "nav.search");
    let (_, r) = common::get(&app, "/api/concepts/search?q=zzz").await;
    assert!(r["results"].as_array().unwrap().is_empty());
    let (_, r) = common::get(&app, "/api/concepts/search?q=fan&limit=1").await;
    assert_eq!(r["results"].as_array().unwrap().len(), 1);
    let (s, r) = common::get(&app, "/api/concepts/nav.home").await;
    assert_eq!((s, r["screen_id"].as_str()), (StatusCode::OK, Some("nav_main")));
    let (s, _) = common::get(&app, "/api/concepts/ghost.btn").await;
    assert_eq!(s, StatusCode::NOT_FOUND);
    let (_, g) = common::get(&app, "/api/concepts/screens").await;
    assert!(g["screens"]
        .as_array()
        .unwrap()
        .iter()
        .any(|s| s["screen_id"] == "home"));

    let (s, r) = common::call(&app, "PUT", "/api/concepts", Body::from("{\"element_id\":\"x\"}\n")).await;
    assert_eq!(s, StatusCode::BAD_REQUEST, "{}", String::from_utf8_lossy(&r));
    let (_, r) = common::get(&app, "/api/concepts/nav.home").await;
    assert_eq!(
        r["element_id"], "nav.home",
        "failed replacement must keep the old catalog"
    );
}

#[tokio::test]
async fn ingest_then_publish() {
    let app = app();
    let line = |ts: u32| {
        format!(
            r#"{{"vehicle_id":"new","session_id":"n1","timestamp_ms":{ts},"element_id":"nav.home","action":"tap","software_version":"1","car_model":"m"}}"#
        )
    };
    let payload = [line(10), line(20), line(30)].join("\n");
    let body = serde_json::json!({ "kind": "interactions", "payload": payload }).to_string();
    let (s, r) = post(&app, "/api/ingest", &body).await;
    assert_eq!(s, StatusCode::OK);
    assert_eq!((r["accepted"].as_u64(), r["rejected"].as_u64()), (Some(3), Some(0)));

    let bad = [line(40), line(50), line(60).replace(r#""element_id":"nav.home","#, "")].join("\n");
    let body = serde_json::json!({ "kind": "interactions", "payload": bad }).to_string();
    let (_, r) = post(&app, "/api/ingest", &body).await;
    assert_eq!((r["accepted"].as_u64(), r["rejected"].as_u64()), (Some(2), Some(1)));
    assert_eq!(r["reject_reasons"][0]["reason"], "missing_field");
    assert_eq!(r["reject_reasons"][0]["line"], 3);

    let (_, latest) = common::get(&app, "/api/snapshots/latest").await;
    assert_eq!(latest["snapshot_id"], 1);
    let (s, r) = post(&app, "/api/snapshots", "").await;
    assert_eq!((s, r["snapshot_id"].as_u64()), (StatusCode::CREATED, Some(2)));
    let (_, latest) = common::get(&app, "/api/snapshots/latest").await;
    assert_eq!(
        latest["counts"]["interactions"].as_u64().unwrap() as usize,
        dataset().interactions.len() + 5
    );

    let (s, r) = post(
        &app,
        "/api/ingest",
        r#"{"kind":"interactions","path":"/nonexistent/file"}"#,
    )
    .await;
    assert_eq!(
        (s, r["reason"].as_str()),
        (StatusCode::BAD_REQUEST, Some("unreadable_path"))
    );
    let (s, _) = post(&app, "/api/ingest", r#"{"kind":"weather","payload":""}"#).await;
    assert_eq!(s, StatusCode::BAD_REQUEST);
}

#[tokio::test]
async fn gets_do_not_change_later_responses() {
    let app = app();
    let uris = [
        "/api/tasks/t1/flows",
        "/api/tasks/t1/sankey?top_n=2",
        "/api/tasks/t1/distribution?metric=mean_speed_mps",
        "/api/concepts/coverage",
        "/api/snapshots/latest",
    ];
    let mut first = Vec::new();
    for u in uris {
        first.push(common::call(&app, "GET", u, Body::empty()).await.1);
    }
    for u in uris.iter().rev() {
        common::call(&app, "GET", u, Body::empty()).await;
    }
    for (u, before) in uris.iter().zip(first) {
        assert_eq!(common::call(&app, "GET", u, Body::empty()).await.1, before, "{u}");
    }
}

#[tokio::test]
async fn query_validation() {
    let app = app();
    for (uri, field) in [
        ("/api/tasks/t1/flows?top_n=0", "top_n"),
        ("/api/tasks/t1/flows?top_n=x", "top_n"),
        ("/api/tasks/t1/flows?status=lost", "status"),
        ("/api/tasks/t1/flows?from_ms=10&to_ms=5", "from_ms"),
        ("/api/tasks/t1/flows?snapshot=1&snapshot=1", "snapshot"),
        ("/api/tasks/t1/flows?colour=red", "colour"),
        ("/api/tasks/t1/flows?aoi=mirror", "aoi"),
    ] {
        let (s, e) = common::get(&app, uri).await;
        assert_eq!(
            (s, e["detail"].as_str()),
            (StatusCode::BAD_REQUEST, Some(field)),
            "{uri}"
        );
    }
    let (s, e) = common::get(&app, "/api/tasks/t1/flows?snapshot=7").await;
    assert_eq!(
        (s, e["reason"].as_str()),
        (StatusCode::NOT_FOUND, Some("unknown_snapshot"))
    );
}
