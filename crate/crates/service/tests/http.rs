use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request, StatusCode};
use axum::Router;
use corrpanel_core::fixture::{canyon_dataset, canyon_project, canyon_script};
use corrpanel_core::model::ContactId;
use corrpanel_core::project::Project;
use corrpanel_service::replay::request_for;
use corrpanel_service::{router, Store};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use tower::ServiceExt;

struct Reply {
    status: StatusCode,
    etag: Option<String>,
    body: Vec<u8>,
}

impl Reply {
    fn json(&self) -> Value {
        serde_json::from_slice(&self.body).unwrap()
    }
}

async fn send(app: &Router, method: Method, uri: &str, body: Option<&str>, if_match: Option<u64>) -> Reply {
    let mut req = Request::builder().method(method).uri(uri);
    if let Some(rev) = if_match {
        req = req.header("if-match", rev.to_string());
    }
    let req = req
        .header("content-type", "application/json")
        .body(body.map(|b| Body::from(b.to_owned())).unwrap_or_else(Body::empty))
        .unwrap();
    let res = app.clone().oneshot(req).await.unwrap();
    let status = res.status();
    let etag = res.headers().get("etag").map(|v| v.to_str().unwrap().to_owned());
    let body = res.into_body().collect().await.unwrap().to_bytes().to_vec();
    Reply { status, etag, body }
}

fn leaf_count(stratum: &Value) -> usize {
    match stratum["children"].as_array() {
        Some(children) if !children.is_empty() => children.iter().map(leaf_count).sum(),
        _ => 1,
    }
}

fn dataset_app() -> (Arc<Store>, Router) {
    let store = Arc::new(Store::new(Project::new(canyon_dataset())));
    (store.clone(), router(store))
}

fn fixture_app() -> Router {
    router(Arc::new(Store::new(canyon_project())))
}

/// Five picks on the first outcrop, at each contact's middle vertex.
fn five_picks() -> Value {
    let dataset = canyon_dataset();
    let picks: Vec<Value> = (2..=6)
        .map(|i| {
            let id = ContactId::new(format!("w1-c{i:02}"));
            let p = dataset.contact(&id).unwrap().points[5];
            json!({ "contact_id": id, "point": [p.x, p.y, p.z] })
        })
        .collect();
    json!({ "name": "W1", "reference_contact_id": "w1-c01", "picks": picks })
}

#[tokio::test]
async fn created_log_has_one_more_leaf_than_picks() {
    let (_, app) = dataset_app();
    let reply = send(&app, Method::POST, "/api/logs", Some(&five_picks().to_string()), None).await;
    assert_eq!(reply.status, StatusCode::CREATED);
    let body = reply.json();
    assert_eq!(body["revision"], 1);
    assert_eq!(reply.etag.as_deref(), Some("\"1\""));
    assert_eq!(body["log"]["picks"].as_array().unwrap().len(), 5);
    assert_eq!(leaf_count(&body["log"]["tree"]["root"]), 6);
}

#[tokio::test]
async fn removing_a_pick_drops_a_leaf_and_bumps_revision() {
    let (_, app) = dataset_app();
    send(&app, Method::POST, "/api/logs", Some(&five_picks().to_string()), None).await;
    let edit = json!({ "op": "remove", "contact_id": "w1-c04" }).to_string();
    let reply = send(&app, Method::PATCH, "/api/logs/log-1/picks", Some(&edit), None).await;
    assert_eq!(reply.status, StatusCode::OK);
    let body = reply.json();
    assert_eq!(body["revision"], 2);
    assert_eq!(leaf_count(&body["log"]["tree"]["root"]), 5);
}

#[tokio::test]
async fn moving_a_pick_resorts_the_log() {
    let (store, app) = dataset_app();
    send(&app, Method::POST, "/api/logs", Some(&five_picks().to_string()), None).await;
    // move c03's pick to another vertex of the same contact
    let p = store.snapshot().project.dataset.contact(&"w1-c03".into()).unwrap().points[0];
    let edit = json!({ "op": "move", "contact_id": "w1-c03", "point": [p.x, p.y, p.z] }).to_string();
    let reply = send(&app, Method::PATCH, "/api/logs/log-1/picks", Some(&edit), None).await;
    assert_eq!(reply.status, StatusCode::OK);
    let picks = reply.json()["log"]["picks"].as_array().unwrap().clone();
    let heights: Vec<f64> = picks.iter().map(|p| p["true_height_m"].as_f64().unwrap()).collect();
    assert!(heights.windows(2).all(|w| w[0] < w[1]));
}

#[tokio::test]
async fn far_pick_is_rejected() {
    let (_, app) = dataset_app();
    let body = json!({
        "name": "Off",
        "reference_contact_id": "w1-c01",
        "picks": [{ "contact_id": "w1-c02", "point": [100.0, 100.0, 0.0] }]
    });
    let reply = send(&app, Method::POST, "/api/logs", Some(&body.to_string()), None).await;
    assert_eq!(reply.status, StatusCode::BAD_REQUEST);
    assert!(reply.json()["error"].as_str().unwrap().contains("w1-c02"));
}

#[tokio::test]
async fn reads_do_not_change_revision() {
    let app = fixture_app();
    for uri in ["/api/project", "/api/panel.svg", "/api/outcrop-strip", "/"] {
        let reply = send(&app, Method::GET, uri, None, None).await;
        assert_eq!(reply.status, StatusCode::OK, "{uri}");
    }
    let preview = json!({ "contact_id": "w2-c01" }).to_string();
    let reply = send(&app, Method::POST, "/api/plane-preview", Some(&preview), None).await;
    assert_eq!(reply.status, StatusCode::OK);
    let dip = reply.json()["dip_strike"]["dip_angle_deg"].as_f64().unwrap();
    assert!((dip - 3.0).abs() < 0.5, "{dip}");
    let project = send(&app, Method::GET, "/api/project", None, None).await;
    assert_eq!(project.json()["revision"], 0);
    assert_eq!(project.etag.as_deref(), Some("\"0\""));
}

#[tokio::test]
async fn svg_is_served_with_its_content_type() {
    let app = fixture_app();
    let req = Request::get("/api/panel.svg").body(Body::empty()).unwrap();
    let res = app.oneshot(req).await.unwrap();
    assert_eq!(res.headers()["content-type"], "image/svg+xml");
    let body = res.into_body().collect().await.unwrap().to_bytes();
    assert_eq!(body, canyon_project().render_svg().unwrap().as_bytes());
}

#[tokio::test]
async fn malformed_bodies_are_bad_requests() {
    let app = fixture_app();
    for (method, uri, body) in [
        (Method::POST, "/api/logs", "{"),
        (Method::POST, "/api/logs", r#"{"name": 3}"#),
        (Method::PATCH, "/api/logs/log-1/picks", r#"{"op": "teleport"}"#),
        (Method::PATCH, "/api/strata/log-1/w1-c01..w1-c02", r#"{"uncertain": "yes"}"#),
        (Method::POST, "/api/panel/level", r#"{"corr": "corr-1"}"#),
        (Method::POST, "/api/panel/order", r#"{"log_order": ["log-1"]}"#),
        (Method::POST, "/api/correlations", r#"{"contact_refs": []}"#),
    ] {
        let reply = send(&app, method, uri, Some(body), None).await;
        assert_eq!(reply.status, StatusCode::BAD_REQUEST, "{uri} {body}");
        assert!(reply.json()["error"].is_string());
    }
}

#[tokio::test]
async fn unknown_ids_are_not_found() {
    let app = fixture_app();
    for (method, uri, body) in [
        (Method::PATCH, "/api/logs/log-9/picks", r#"{"op": "remove", "contact_id": "w1-c02"}"#),
        (Method::PATCH, "/api/logs/log-1/picks", r#"{"op": "remove", "contact_id": "w2-c02"}"#),
        (Method::PATCH, "/api/strata/log-1/nope..nope", r#"{"uncertain": true}"#),
        (Method::PATCH, "/api/strata/log-1/w1-c01..w1-c02", r#"{"rock_type_id": "granite"}"#),
        (Method::PATCH, "/api/strata/log-1/w1-c01..w1-c02", r#"{"crossbed_ids": ["xb-999"]}"#),
        (Method::POST, "/api/panel/level", r#"{"correlation_id": "corr-7"}"#),
        (Method::POST, "/api/panel/order", r#"{"log_order": ["log-1", "log-2", "log-3", "log-7"]}"#),
        (Method::POST, "/api/plane-preview", r#"{"contact_id": "nowhere"}"#),
    ] {
        let reply = send(&app, method, uri, Some(body), None).await;
        assert_eq!(reply.status, StatusCode::NOT_FOUND, "{uri} {body}");
    }
    let project = send(&app, Method::GET, "/api/project", None, None).await;
    assert_eq!(project.json()["revision"], 0);
}

#[tokio::test]
async fn stale_revision_conflicts() {
    let app = fixture_app();
    let level = json!({ "correlation_id": "corr-1" }).to_string();
    let first = send(&app, Method::POST, "/api/panel/level", Some(&level), Some(0)).await;
    assert_eq!(first.status, StatusCode::OK);
    assert_eq!(first.json()["revision"], 1);
    let stale = send(&app, Method::POST, "/api/panel/level", Some(&level), Some(0)).await;
    assert_eq!(stale.status, StatusCode::CONFLICT);
    let fresh = send(&app, Method::POST, "/api/panel/level", Some(r#"{"correlation_id": null}"#), Some(1)).await;
    assert_eq!(fresh.status, StatusCode::OK);
}

#[tokio::test]
async fn removing_a_correlated_pick_conflicts() {
    let app = fixture_app();
    let edit = json!({ "op": "remove", "contact_id": "w1-c16" }).to_string();
    let reply = send(&app, Method::PATCH, "/api/logs/log-1/picks", Some(&edit), None).await;
    assert_eq!(reply.status, StatusCode::CONFLICT);
}

#[tokio::test]
async fn leveling_reports_offsets() {
    let app = fixture_app();
    let level = json!({ "correlation_id": "corr-1" }).to_string();
    let body = send(&app, Method::POST, "/api/panel/level", Some(&level), None).await.json();
    assert_eq!(body["leveling"], "corr-1");
    assert_eq!(body["offsets"].as_object().unwrap().len(), 4);
}

#[tokio::test]
async fn reorder_updates_rulers() {
    let app = fixture_app();
    let order = json!({ "log_order": ["log-2", "log-1", "log-3", "log-4"] }).to_string();
    let body = send(&app, Method::POST, "/api/panel/order", Some(&order), None).await.json();
    let rulers = body["rulers"].as_array().unwrap();
    assert_eq!(rulers[0]["left_log"], "log-2");
    assert!((rulers[0]["distance_m"].as_f64().unwrap() - 412.0).abs() < 1e-3);
}

#[tokio::test]
async fn clearing_a_rock_type_with_null() {
    let app = fixture_app();
    let uri = "/api/strata/log-1/w1-c01..w1-c02";
    let body = send(&app, Method::PATCH, uri, Some(r#"{"rock_type_id": null}"#), None).await.json();
    assert!(body["stratum"]["rock_type_id"].is_null());
    let body = send(&app, Method::PATCH, uri, Some(r#"{"rock_type_id": "silt"}"#), None).await.json();
    assert_eq!(body["stratum"]["rock_type_id"], "silt");
}

#[tokio::test]
async fn replayed_script_matches_the_fixture() {
    let (store, app) = dataset_app();
    for step in canyon_script(&canyon_dataset()) {
        let req = request_for(&step);
        let method = Method::from_bytes(req.method.as_bytes()).unwrap();
        let reply = send(&app, method, &req.path, Some(&req.body.to_string()), None).await;
        assert!(reply.status.is_success(), "{} {}: {}", req.method, req.path, String::from_utf8_lossy(&reply.body));
    }
    assert_eq!(store.snapshot().project, canyon_project());
}
