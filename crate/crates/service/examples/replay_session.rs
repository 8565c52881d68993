//! Replays the fixture editing session against the HTTP API in-process:
//! start from the bare dataset, create the logs, annotate strata,
//! correlate, level, and export the panel.
//!
//! ```text
//! cargo run -p corrpanel-service --example replay_session -- [out.svg]
//! ```

use std::sync::Arc;

use axum::body::Body;
use axum::http::Request;
use corrpanel_core::fixture::{canyon_dataset, canyon_script, TOP_CORRELATION};
use corrpanel_core::project::Project;
use corrpanel_service::replay::{request_for, Request as Step};
use corrpanel_service::{router, Store};
use http_body_util::BodyExt;
use serde_json::json;
use tower::ServiceExt;

async fn send(app: &axum::Router, step: &Step) -> (u16, serde_json::Value) {
    let req = Request::builder()
        .method(step.method)
        .uri(&step.path)
        .body(Body::from(step.body.to_string()))
        .expect("valid request");
    let res = app.clone().oneshot(req).await.expect("router is infallible");
    let status = res.status().as_u16();
    let bytes = res.into_body().collect().await.expect("body").to_bytes();
    (status, serde_json::from_slice(&bytes).unwrap_or_default())
}

#[tokio::main]
async fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out = std::env::args().nth(1).unwrap_or_else(|| "session.svg".to_owned());
    let dataset = canyon_dataset();
    let store = Arc::new(Store::new(Project::new(dataset.clone())));
    let app = router(store.clone());

    let mut steps: Vec<Step> = canyon_script(&dataset).iter().map(request_for).collect();
    steps.push(Step {
        method: "POST",
        path: "/api/panel/level".to_owned(),
        body: json!({ "correlation_id": TOP_CORRELATION }),
    });
    for step in &steps {
        let (status, body) = send(&app, step).await;
        if !(200..300).contains(&status) {
            return Err(format!("{} {} -> {status}: {body}", step.method, step.path).into());
        }
        if step.path == "/api/logs" {
            let log = &body["log"];
            println!(
                "revision {:>3}: created {} ({}) with {} picks",
                body["revision"].as_u64().unwrap_or(0),
                log["id"].as_str().unwrap_or("?"),
                log["name"].as_str().unwrap_or("?"),
                log["picks"].as_array().map_or(0, Vec::len)
            );
        }
    }

    let snapshot = store.snapshot();
    let svg = snapshot.project.render_svg()?;
    std::fs::write(&out, &svg)?;
    println!("revision {:>3}: leveled and exported {} bytes -> {out}", snapshot.revision, svg.len());
    Ok(())
}
