//! Versioned JSON documents for datasets and projects.
//!
//! # `incorr-dataset/1`
//!
//! ```json
//! {
//!   "schema": "incorr-dataset/1",
//!   "metadata": { "source": "...", "crs_note": "..." },
//!   "contacts": [
//!     { "id": "c1", "name": "Unit 1 base", "rank": 0, "color": "#d62728",
//!       "line_weight": 2.0, "points": [[x, y, z], ...], "uncertain": false }
//!   ],
//!   "crossbeds": [
//!     { "id": "m1", "source_points": [[x, y, z], ...],
//!       "dip_azimuth_deg": 71.2, "dip_angle_deg": 18.0, "centroid": [x, y, z] }
//!   ]
//! }
//! ```
//!
//! Coordinates are local east/north/up meters. A cross bed with three or
//! more `source_points` is re-derived from them on load; without points the
//! stored dip, azimuth and centroid are required and trusted.
//!
//! # `incorr-project/1`
//!
//! ```json
//! {
//!   "schema": "incorr-project/1",
//!   "dataset": { "metadata": ..., "contacts": [...], "crossbeds": [...] },
//!   "logs": [
//!     { "id": "log-1", "name": "W1", "reference_contact_id": "c1",
//!       "reference_plane": { "origin": [...], "normal": [...], "rms_residual_m": 0.0 },
//!       "picks": [ { "contact_id": "c1", "point": [x, y, z], "true_height_m": 0.0 } ],
//!       "strata": [ { "stratum_id": "c1..c2", "rock_type_id": "silt",
//!                     "rock_type_uncertain": false, "crossbed_ids": ["m1"] } ] }
//!   ],
//!   "panel": { "id": "panel", "log_order": [...], "correlations": [...],
//!              "leveling": null, "rock_catalog": [...], "style": {...} }
//! }
//! ```
//!
//! `reference_plane` and `true_height_m` are written for readers but never
//! trusted: the plane is refitted to the reference contact and heights are
//! recomputed, with a warning when the stored values disagree. Rock type
//! `phi` is likewise recomputed from `grain_size_mm`. Stratum
//! trees are rebuilt from the picks and `strata` re-attaches leaf
//! annotations by stratum id.
//!
//! Saved documents are canonical: object keys sorted, floats rounded to 9
//! significant digits, two-space indentation. Saving a loaded canonical
//! document reproduces it byte for byte.
//!
//! Versioning: readers reject any other `schema` value. A future `/2`
//! reader will accept `/1` documents and upgrade them in memory; writers
//! always emit the newest version.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::geom::{self, Plane, Point3};
use crate::model::{
    krumbein_phi, validate_dataset, Contact, ContactId, CrossBedId, CrossBedMeasurement, Dataset,
    DatasetMetadata, Finding, LogId, Panel,
};
use crate::project::{build_log, Project, PICK_SNAP_TOLERANCE_M};
use crate::strata::StratumAnnotation;

pub const DATASET_SCHEMA: &str = "incorr-dataset/1";
pub const PROJECT_SCHEMA: &str = "incorr-project/1";

const SIGNIFICANT_DIGITS: usize = 9;
/// Stored derived values further than this from the recomputed ones raise
/// a warning.
const DERIVED_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IoError {
    #[error("malformed JSON: {0}")]
    Parse(String),
    #[error("{path} {message}")]
    Schema { path: String, message: String },
    #[error("{} validation finding(s), first: {}", .0.len(), .0.first().map(ToString::to_string).unwrap_or_default())]
    Validation(Vec<Finding>),
    #[error("dangling reference to {0}")]
    DanglingReference(String),
}

fn schema_error(path: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct CrossBedDoc {
    id: CrossBedId,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    source_points: Vec<Point3>,
    #[serde(default)]
    dip_azimuth_deg: Option<f64>,
    #[serde(default)]
    dip_angle_deg: Option<f64>,
    #[serde(default)]
    centroid: Option<Point3>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DatasetBody {
    #[serde(default)]
    metadata: DatasetMetadata,
    contacts: Vec<Contact>,
    #[serde(default)]
    crossbeds: Vec<CrossBedDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct DatasetDoc {
    schema: String,
    #[serde(default)]
    metadata: DatasetMetadata,
    contacts: Vec<Contact>,
    #[serde(default)]
    crossbeds: Vec<CrossBedDoc>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PickDoc {
    contact_id: ContactId,
    point: Point3,
    #[serde(default)]
    true_height_m: Option<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct LogDoc {
    id: LogId,
    name: String,
    reference_contact_id: ContactId,
    #[serde(default)]
    reference_plane: Option<Plane>,
    picks: Vec<PickDoc>,
    #[serde(default)]
    strata: Vec<StratumAnnotation>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct ProjectDoc {
    schema: String,
    dataset: DatasetBody,
    logs: Vec<LogDoc>,
    panel: Panel,
}

/// A loaded project together with non-fatal findings (stale derived
/// values, orphaned annotations).
#[derive(Debug, Clone, PartialEq)]
pub struct LoadedProject {
    pub project: Project,
    pub warnings: Vec<Finding>,
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for segment in path.iter() {
        out.push('/');
        match segment {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

fn parse_value(bytes: &[u8], schema: &str) -> Result<Value, IoError> {
    let value: Value = serde_json::from_slice(bytes).map_err(|e| IoError::Parse(e.to_string()))?;
    match value.get("schema") {
        None => Err(schema_error("/schema", "missing")),
        Some(Value::String(s)) if s == schema => Ok(value),
        Some(other) => Err(schema_error(
            "/schema",
            format!("unsupported version {other}, expected {schema:?}"),
        )),
    }
}

fn decode<T: serde::de::DeserializeOwned>(value: Value) -> Result<T, IoError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let mut path = pointer(e.path());
        let message = e.inner().to_string();
        // report missing fields at the field itself
        if let Some(field) = message
            .strip_prefix("missing field `")
            .and_then(|rest| rest.split('`').next())
        {
            path.push('/');
            path.push_str(field);
            return schema_error(path, "missing");
        }
        if path.is_empty() {
            path.push('/');
        }
        schema_error(path, message)
    })
}

fn dataset_from_body(body: DatasetBody, base: &str) -> Result<Dataset, IoError> {
    let mut findings = Vec::new();
    let mut crossbeds = Vec::with_capacity(body.crossbeds.len());
    for (i, doc) in body.crossbeds.into_iter().enumerate() {
        if doc.source_points.len() >= 3 {
            match CrossBedMeasurement::from_points(doc.id.clone(), doc.source_points) {
                Ok(m) => crossbeds.push(m),
                Err(e) => findings.push(Finding::error(format!("crossbed {}", doc.id), e.to_string())),
            }
            continue;
        }
        if !doc.source_points.is_empty() {
            findings.push(Finding::error(format!("crossbed {}", doc.id), "source_points.len < 3"));
            continue;
        }
        let field = |name: &str| format!("{base}/crossbeds/{i}/{name}");
        crossbeds.push(CrossBedMeasurement {
            dip_azimuth_deg: doc
                .dip_azimuth_deg
                .ok_or_else(|| schema_error(field("dip_azimuth_deg"), "missing"))?,
            dip_angle_deg: doc
                .dip_angle_deg
                .ok_or_else(|| schema_error(field("dip_angle_deg"), "missing"))?,
            centroid: doc
                .centroid
                .ok_or_else(|| schema_error(field("centroid"), "missing"))?,
            id: doc.id,
            source_points: Vec::new(),
        });
    }
    let dataset = Dataset {
        metadata: body.metadata,
        contacts: body.contacts,
        crossbeds,
    };
    findings.extend(validate_dataset(&dataset));
    if findings.iter().any(Finding::is_error) {
        return Err(IoError::Validation(findings));
    }
    Ok(dataset)
}

fn body_from_dataset(dataset: &Dataset) -> DatasetBody {
    DatasetBody {
        metadata: dataset.metadata.clone(),
        contacts: dataset.contacts.clone(),
        crossbeds: dataset
            .crossbeds
            .iter()
            .map(|m| CrossBedDoc {
                id: m.id.clone(),
                source_points: m.source_points.clone(),
                dip_azimuth_deg: Some(m.dip_azimuth_deg),
                dip_angle_deg: Some(m.dip_angle_deg),
                centroid: Some(m.centroid),
            })
            .collect(),
    }
}

fn round_significant(v: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    if !v.is_finite() {
        return v;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, v)
        .parse()
        .unwrap_or(v)
}

fn canonicalize(value: &mut Value) {
    match value {
        Value::Number(n) if n.is_f64() => {
            if let Some(rounded) = n.as_f64().map(round_significant).and_then(serde_json::Number::from_f64) {
                *n = rounded;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(canonicalize),
        Value::Object(map) => map.values_mut().for_each(canonicalize),
        _ => {}
    }
}

fn to_canonical_string<T: Serialize>(doc: &T) -> String {
    let mut value = serde_json::to_value(doc).expect("documents serialize to JSON");
    canonicalize(&mut value);
    let mut out = serde_json::to_string_pretty(&value).expect("values serialize to JSON");
    out.push('\n');
    out
}

/// Parses and validates an `incorr-dataset/1` document.
pub fn load_dataset(bytes: &[u8]) -> Result<Dataset, IoError> {
    let value = parse_value(bytes, DATASET_SCHEMA)?;
    let doc: DatasetDoc = decode(value)?;
    let body = DatasetBody {
        metadata: doc.metadata,
        contacts: doc.contacts,
        crossbeds: doc.crossbeds,
    };
    dataset_from_body(body, "")
}

pub fn save_dataset(dataset: &Dataset) -> String {
    let body = body_from_dataset(dataset);
    to_canonical_string(&DatasetDoc {
        schema: DATASET_SCHEMA.to_owned(),
        metadata: body.metadata,
        contacts: body.contacts,
        crossbeds: body.crossbeds,
    })
}

pub fn save_project(project: &Project) -> String {
    let logs = project
        .logs
        .iter()
        .map(|log| LogDoc {
            id: log.id.clone(),
            name: log.name.clone(),
            reference_contact_id: log.reference_contact_id.clone(),
            reference_plane: Some(log.reference_plane),
            picks: log
                .picks
                .iter()
                .map(|p| PickDoc {
                    contact_id: p.contact_id.clone(),
                    point: p.point,
                    true_height_m: Some(p.true_height_m),
                })
                .collect(),
            strata: log.tree.annotations(),
        })
        .collect();
    to_canonical_string(&ProjectDoc {
        schema: PROJECT_SCHEMA.to_owned(),
        dataset: body_from_dataset(&project.dataset),
        logs,
        panel: project.panel.clone(),
    })
}

fn plane_differs(stored: &Plane, fitted: &Plane) -> bool {
    (stored.origin - fitted.origin).norm() > DERIVED_TOLERANCE
        || (stored.normal - fitted.normal).norm() > DERIVED_TOLERANCE
}

/// Parses an `incorr-project/1` document, re-deriving every derived field.
pub fn load_project(bytes: &[u8]) -> Result<LoadedProject, IoError> {
    let value = parse_value(bytes, PROJECT_SCHEMA)?;
    let doc: ProjectDoc = decode(value)?;
    let dataset = dataset_from_body(doc.dataset, "/dataset")?;
    let mut project = Project::new(dataset);
    project.panel = Panel {
        log_order: Vec::new(),
        ..doc.panel.clone()
    };
    let ranks = project.contact_ranks();
    let mut warnings = Vec::new();
    // phi is stored rounded; the grain size is authoritative
    for rock in &mut project.panel.rock_catalog {
        let phi = krumbein_phi(rock.grain_size_mm);
        if (rock.phi - phi).abs() > DERIVED_TOLERANCE {
            warnings.push(Finding::warning(
                format!("rock type {}", rock.id),
                "stored phi differs from -log2(grain_size_mm); using recomputed",
            ));
        }
        rock.phi = phi;
    }
    let mut errors = Vec::new();

    for log_doc in doc.logs {
        let label = format!("log {}", log_doc.id);
        let contact = project
            .dataset
            .contact(&log_doc.reference_contact_id)
            .ok_or_else(|| IoError::DanglingReference(format!("contact {}", log_doc.reference_contact_id)))?;
        let plane = match geom::fit_plane(&contact.points) {
            Ok(plane) => plane,
            Err(e) => {
                errors.push(Finding::error(&label, format!("reference plane: {e}")));
                continue;
            }
        };
        if log_doc
            .reference_plane
            .is_some_and(|stored| plane_differs(&stored, &plane))
        {
            warnings.push(Finding::warning(&label, "stored reference plane differs from refit; using refit"));
        }

        let mut points = Vec::with_capacity(log_doc.picks.len());
        for pick in &log_doc.picks {
            let contact = project
                .dataset
                .contact(&pick.contact_id)
                .ok_or_else(|| IoError::DanglingReference(format!("contact {}", pick.contact_id)))?;
            let height = geom::true_height(&plane, &pick.point);
            if pick
                .true_height_m
                .is_some_and(|stored| (stored - height).abs() > DERIVED_TOLERANCE)
            {
                warnings.push(Finding::warning(
                    &label,
                    format!("stored true height of {} differs from recomputed; using recomputed", pick.contact_id),
                ));
            }
            let off = geom::closest_point_on_polyline(&contact.points, &pick.point)
                .map(|(_, d)| d)
                .unwrap_or(f64::INFINITY);
            if off > PICK_SNAP_TOLERANCE_M {
                warnings.push(Finding::warning(
                    &label,
                    format!("pick of {} is {off:.3} m off its contact", pick.contact_id),
                ));
            }
            points.push((pick.contact_id.clone(), pick.point));
        }

        let mut log = match build_log(
            log_doc.id.clone(),
            &log_doc.name,
            log_doc.reference_contact_id.clone(),
            plane,
            points,
            &ranks,
        ) {
            Ok(log) => log,
            Err(e) => {
                errors.push(Finding::error(&label, e.to_string()));
                continue;
            }
        };
        for a in &log_doc.strata {
            if let Some(rock) = &a.rock_type_id {
                if project.panel.rock_type(rock).is_none() {
                    return Err(IoError::DanglingReference(format!("rock type {rock}")));
                }
            }
            if let Some(m) = a.crossbed_ids.iter().find(|m| project.dataset.crossbed(m).is_none()) {
                return Err(IoError::DanglingReference(format!("crossbed {m}")));
            }
        }
        for orphan in log.tree.apply_annotations(&log_doc.strata) {
            warnings.push(Finding::warning(&label, format!("annotation for {orphan} matches no leaf stratum; dropped")));
        }
        project.logs.push(log);
    }
    if !errors.is_empty() {
        return Err(IoError::Validation(errors));
    }

    for id in &doc.panel.log_order {
        if project.log(id).is_err() {
            return Err(IoError::DanglingReference(format!("log {id}")));
        }
    }
    project.panel.log_order = doc.panel.log_order;
    for corr in &project.panel.correlations {
        for r in &corr.contact_refs {
            let log = project
                .log(&r.log_id)
                .map_err(|_| IoError::DanglingReference(format!("log {}", r.log_id)))?;
            if log.pick(&r.contact_id).is_none() {
                return Err(IoError::DanglingReference(format!("contact {} in log {}", r.contact_id, r.log_id)));
            }
        }
    }
    if let Some(level) = &project.panel.leveling {
        if project.panel.correlation(level).is_none() {
            return Err(IoError::DanglingReference(format!("correlation {level}")));
        }
    }

    let findings = project.validate();
    if findings.iter().any(Finding::is_error) {
        return Err(IoError::Validation(findings));
    }
    warnings.extend(findings);
    Ok(LoadedProject { project, warnings })
}
