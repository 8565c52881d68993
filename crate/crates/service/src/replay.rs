//! The HTTP requests equivalent to fixture editing steps, so a scripted
//! session can be replayed against a running service.

use corrpanel_core::fixture::FixtureStep;
use serde_json::{json, Value};

/// Method, path and JSON body of one request.
#[derive(Debug, Clone, PartialEq)]
pub struct Request {
    pub method: &'static str,
    pub path: String,
    pub body: Value,
}

pub fn request_for(step: &FixtureStep) -> Request {
    match step {
        FixtureStep::CreateLog {
            name,
            reference_contact_id,
            picks,
        } => Request {
            method: "POST",
            path: "/api/logs".to_owned(),
            body: json!({ "name": name, "reference_contact_id": reference_contact_id, "picks": picks }),
        },
        FixtureStep::UpdateStratum {
            log_id,
            stratum_id,
            update,
        } => Request {
            method: "PATCH",
            path: format!("/api/strata/{log_id}/{stratum_id}"),
            body: serde_json::to_value(update).expect("updates serialize"),
        },
        FixtureStep::CreateCorrelation {
            contact_refs,
            segment_uncertain,
        } => Request {
            method: "POST",
            path: "/api/correlations".to_owned(),
            body: json!({ "contact_refs": contact_refs, "segment_uncertain": segment_uncertain }),
        },
    }
}
