//! HTTP/1.1 JSON API.
//!
//! Every mutation answers with the affected resource and the new
//! `revision`; the same number is sent as the `ETag` header. A mutation
//! carrying `If-Match: <revision>` fails with 409 when the project has
//! moved on. Bodies are parsed by hand so malformed input is always a 400
//! with a JSON error message.

use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{Html, IntoResponse, Response};
use axum::routing::{get, patch, post};
use axum::{Json, Router};
use corrpanel_core::model::{ContactId, ContactRef, CorrelationId, LogId, Rgb, StratumId};
use corrpanel_core::project::{PickEdit, PickInput, ProjectError, StratumUpdate};
use corrpanel_core::render::project_outcrop_strip;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::store::{Snapshot, Store, StoreError};

const INDEX_HTML: &str = include_str!("index.html");

pub fn router(store: Arc<Store>) -> Router {
    Router::new()
        .route("/", get(index))
        .route("/api/project", get(get_project))
        .route("/api/outcrop-strip", get(outcrop_strip))
        .route("/api/plane-preview", post(plane_preview))
        .route("/api/logs", post(create_log))
        .route("/api/logs/{id}/picks", patch(edit_picks))
        .route("/api/strata/{log}/{stratum}", patch(update_stratum))
        .route("/api/correlations", post(create_correlation))
        .route("/api/panel/level", post(level))
        .route("/api/panel/order", post(order))
        .route("/api/panel.svg", get(panel_svg))
        .with_state(store)
}

#[derive(Debug)]
pub struct ApiError {
    status: StatusCode,
    message: String,
}

impl ApiError {
    fn new(status: StatusCode, message: impl Into<String>) -> Self {
        Self {
            status,
            message: message.into(),
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        (self.status, Json(json!({ "error": self.message }))).into_response()
    }
}

impl From<ProjectError> for ApiError {
    fn from(e: ProjectError) -> Self {
        let status = match &e {
            e if e.is_not_found() => StatusCode::NOT_FOUND,
            ProjectError::MissingPick { .. } => StatusCode::NOT_FOUND,
            ProjectError::ContactInUse { .. } => StatusCode::CONFLICT,
            _ => StatusCode::BAD_REQUEST,
        };
        Self::new(status, e.to_string())
    }
}

impl From<StoreError> for ApiError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Project(e) => e.into(),
            StoreError::StaleRevision { .. } => Self::new(StatusCode::CONFLICT, e.to_string()),
            StoreError::Persist(_) => Self::new(StatusCode::INTERNAL_SERVER_ERROR, e.to_string()),
        }
    }
}

type ApiResult = Result<Response, ApiError>;

fn parse<T: DeserializeOwned>(body: &Bytes) -> Result<T, ApiError> {
    serde_json::from_slice(body)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, format!("invalid request body: {e}")))
}

/// The revision named by `If-Match`, with or without quotes.
fn if_match(headers: &HeaderMap) -> Result<Option<u64>, ApiError> {
    let Some(value) = headers.get(header::IF_MATCH) else {
        return Ok(None);
    };
    value
        .to_str()
        .ok()
        .map(|v| v.trim().trim_matches('"'))
        .and_then(|v| v.parse().ok())
        .map(Some)
        .ok_or_else(|| ApiError::new(StatusCode::BAD_REQUEST, "If-Match must be a revision number"))
}

fn etag(revision: u64) -> (header::HeaderName, HeaderValue) {
    let value = HeaderValue::from_str(&format!("\"{revision}\"")).expect("digits are valid");
    (header::ETAG, value)
}

fn json_response(status: StatusCode, snapshot: &Snapshot, mut body: Value) -> Response {
    body["revision"] = json!(snapshot.revision);
    (status, [etag(snapshot.revision)], Json(body)).into_response()
}

fn to_value<T: serde::Serialize>(value: &T) -> Value {
    serde_json::to_value(value).expect("project types serialize")
}

async fn index() -> Html<&'static str> {
    Html(INDEX_HTML)
}

async fn get_project(State(store): State<Arc<Store>>) -> Response {
    let snap = store.snapshot();
    json_response(StatusCode::OK, &snap, json!({ "project": to_value(&snap.project) }))
}

async fn outcrop_strip(State(store): State<Arc<Store>>) -> ApiResult {
    let snap = store.snapshot();
    let strip = project_outcrop_strip(&snap.project.dataset.contacts)
        .map_err(|e| ApiError::new(StatusCode::BAD_REQUEST, e.to_string()))?;
    Ok(json_response(StatusCode::OK, &snap, json!({ "polylines": to_value(&strip) })))
}

#[derive(Deserialize)]
struct PlanePreviewBody {
    contact_id: ContactId,
}

/// Fits a plane without touching the project.
async fn plane_preview(State(store): State<Arc<Store>>, body: Bytes) -> ApiResult {
    let body: PlanePreviewBody = parse(&body)?;
    let snap = store.snapshot();
    let (plane, ds) = snap.project.preview_plane(&body.contact_id)?;
    Ok(json_response(
        StatusCode::OK,
        &snap,
        json!({ "plane": to_value(&plane), "dip_strike": to_value(&ds) }),
    ))
}

#[derive(Deserialize)]
struct CreateLogBody {
    name: String,
    reference_contact_id: ContactId,
    #[serde(default)]
    picks: Vec<PickInput>,
}

async fn create_log(State(store): State<Arc<Store>>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let body: CreateLogBody = parse(&body)?;
    let (snap, id) = store.mutate(if_match(&headers)?, |p| {
        p.create_log(&body.name, &body.reference_contact_id, &body.picks)
    })?;
    let log = snap.project.log(&id)?;
    Ok(json_response(StatusCode::CREATED, &snap, json!({ "log": to_value(log) })))
}

async fn edit_picks(
    State(store): State<Arc<Store>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let edit: PickEdit = parse(&body)?;
    let id = LogId::new(id);
    let (snap, ()) = store.mutate(if_match(&headers)?, |p| p.edit_picks(&id, &edit))?;
    let log = snap.project.log(&id)?;
    Ok(json_response(StatusCode::OK, &snap, json!({ "log": to_value(log) })))
}

async fn update_stratum(
    State(store): State<Arc<Store>>,
    Path((log, stratum)): Path<(String, String)>,
    headers: HeaderMap,
    body: Bytes,
) -> ApiResult {
    let update: StratumUpdate = parse(&body)?;
    let (log, stratum) = (LogId::new(log), StratumId::new(stratum));
    let (snap, ()) = store.mutate(if_match(&headers)?, |p| p.update_stratum(&log, &stratum, &update))?;
    let geo = snap.project.log(&log)?;
    Ok(json_response(
        StatusCode::OK,
        &snap,
        json!({
            "log_id": log,
            "stratum": to_value(&geo.tree.find(&stratum)),
            "tree": to_value(&geo.tree),
        }),
    ))
}

#[derive(Deserialize)]
struct CreateCorrelationBody {
    contact_refs: Vec<ContactRef>,
    #[serde(default)]
    segment_uncertain: Vec<bool>,
    #[serde(default)]
    color: Option<Rgb>,
}

async fn create_correlation(State(store): State<Arc<Store>>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let body: CreateCorrelationBody = parse(&body)?;
    let (snap, id) = store.mutate(if_match(&headers)?, |p| {
        p.create_correlation(body.contact_refs, body.segment_uncertain, body.color)
    })?;
    let correlation = snap.project.panel.correlation(&id);
    Ok(json_response(
        StatusCode::CREATED,
        &snap,
        json!({ "correlation": to_value(&correlation) }),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct LevelBody {
    correlation_id: Option<CorrelationId>,
}

async fn level(State(store): State<Arc<Store>>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let body: LevelBody = parse(&body)?;
    let (snap, ()) = store.mutate(if_match(&headers)?, |p| p.set_leveling(body.correlation_id))?;
    let offsets = snap.project.offsets()?;
    Ok(json_response(
        StatusCode::OK,
        &snap,
        json!({ "leveling": snap.project.panel.leveling, "offsets": to_value(&offsets) }),
    ))
}

#[derive(Deserialize)]
struct OrderBody {
    log_order: Vec<LogId>,
}

async fn order(State(store): State<Arc<Store>>, headers: HeaderMap, body: Bytes) -> ApiResult {
    let body: OrderBody = parse(&body)?;
    let (snap, ()) = store.mutate(if_match(&headers)?, |p| p.set_log_order(&body.log_order))?;
    let layout = snap.project.layout()?;
    Ok(json_response(
        StatusCode::OK,
        &snap,
        json!({ "log_order": snap.project.panel.log_order, "rulers": to_value(&layout.rulers) }),
    ))
}

async fn panel_svg(State(store): State<Arc<Store>>) -> ApiResult {
    let snap = store.snapshot();
    let svg = snap.project.render_svg()?;
    Ok((
        StatusCode::OK,
        [
            (header::CONTENT_TYPE, HeaderValue::from_static("image/svg+xml")),
            etag(snap.revision),
        ],
        svg,
    )
        .into_response())
}
