use std::sync::Arc;

use axum::body::Body;
use axum::http::{Method, Request};
use axum::Router;
use corrpanel_core::fixture::{canyon_dataset, canyon_project};
use corrpanel_core::io;
use corrpanel_core::model::{CorrelationId, LogId};
use corrpanel_core::project::Project;
use corrpanel_service::store::PROJECT_FILE;
use corrpanel_service::{router, Store};
use http_body_util::BodyExt;
use rand::seq::{IndexedRandom, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};
use tower::ServiceExt;

#[test]
fn reopening_reproduces_the_panel() {
    let dir = tempfile::tempdir().unwrap();
    let svg = {
        let (store, warnings) = Store::open(dir.path(), || Ok(canyon_project())).unwrap();
        assert!(warnings.is_empty());
        store
            .mutate(None, |p| p.set_leveling(Some(CorrelationId::new("corr-2"))))
            .unwrap();
        store
            .mutate(None, |p| {
                p.set_log_order(&["log-4", "log-2", "log-3", "log-1"].map(LogId::new))
            })
            .unwrap();
        store.snapshot().project.render_svg().unwrap()
    };
    let (reopened, warnings) = Store::open(dir.path(), || panic!("project file exists")).unwrap();
    assert!(warnings.is_empty(), "{warnings:?}");
    assert_eq!(reopened.snapshot().project.render_svg().unwrap(), svg);
    let on_disk = std::fs::read_to_string(dir.path().join(PROJECT_FILE)).unwrap();
    assert_eq!(on_disk, io::save_project(&reopened.snapshot().project));
}

#[test]
fn corrupt_project_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join(PROJECT_FILE), "{ not json").unwrap();
    assert!(Store::open(dir.path(), || Ok(canyon_project())).is_err());
}

struct Fuzzer {
    rng: ChaCha8Rng,
    app: Router,
    store: Arc<Store>,
}

impl Fuzzer {
    async fn send(&self, method: Method, uri: &str, body: Value) -> (u16, Value) {
        let req = Request::builder()
            .method(method)
            .uri(uri)
            .body(Body::from(body.to_string()))
            .unwrap();
        let res = self.app.clone().oneshot(req).await.unwrap();
        let status = res.status().as_u16();
        let bytes = res.into_body().collect().await.unwrap().to_bytes();
        (status, serde_json::from_slice(&bytes).unwrap_or(Value::Null))
    }

    fn project(&self) -> Project {
        self.store.snapshot().project.clone()
    }

    fn contact_point(&mut self, project: &Project, jitter: f64) -> (String, [f64; 3]) {
        let contact = project.dataset.contacts.choose(&mut self.rng).unwrap();
        let p = contact.points.choose(&mut self.rng).unwrap();
        let d = [(); 3].map(|_| self.rng.random_range(-jitter..=jitter));
        (contact.id.to_string(), [p.x + d[0], p.y + d[1], p.z + d[2]])
    }

    fn some_log(&mut self, project: &Project) -> String {
        if project.logs.is_empty() || self.rng.random_bool(0.05) {
            return "log-404".to_owned();
        }
        project.logs.choose(&mut self.rng).unwrap().id.to_string()
    }

    /// One random request, valid or not.
    async fn step(&mut self) -> u16 {
        let project = self.project();
        match self.rng.random_range(0..7) {
            0 => {
                let outcrop = self.rng.random_range(1..=4);
                let mut picks = Vec::new();
                for c in project.dataset.contacts.iter().filter(|c| c.id.as_str().starts_with(&format!("w{outcrop}-"))) {
                    if self.rng.random_bool(0.4) {
                        let p = c.points[self.rng.random_range(0..c.points.len())];
                        picks.push(json!({ "contact_id": c.id, "point": [p.x, p.y, p.z] }));
                    }
                }
                let reference = format!("w{outcrop}-c01");
                self.send(Method::POST, "/api/logs", json!({ "name": "fuzz", "reference_contact_id": reference, "picks": picks })).await.0
            }
            1 => {
                let log = self.some_log(&project);
                let (contact, point) = self.contact_point(&project, 0.3);
                let op = ["add", "move", "remove"].choose(&mut self.rng).unwrap();
                let body = json!({ "op": op, "contact_id": contact, "point": point });
                self.send(Method::PATCH, &format!("/api/logs/{log}/picks"), body).await.0
            }
            2 => {
                let log = self.some_log(&project);
                let stratum = project
                    .log(&LogId::new(log.clone()))
                    .ok()
                    .and_then(|l| {
                        let leaves = l.tree.leaves();
                        leaves.choose(&mut self.rng).map(|s| s.id.to_string())
                    })
                    .unwrap_or_else(|| "..".to_owned());
                let rock = ["clay", "fine-sand", "cobble", "basalt"].choose(&mut self.rng).unwrap();
                let crossbeds: Vec<String> = (0..self.rng.random_range(0..4))
                    .map(|_| format!("xb-{:03}", self.rng.random_range(1..=135)))
                    .collect();
                let body = json!({ "rock_type_id": rock, "uncertain": self.rng.random_bool(0.5), "crossbed_ids": crossbeds });
                self.send(Method::PATCH, &format!("/api/strata/{log}/{stratum}"), body).await.0
            }
            3 => {
                let mut logs: Vec<_> = project.logs.iter().collect();
                logs.shuffle(&mut self.rng);
                let refs: Vec<Value> = logs
                    .iter()
                    .take(self.rng.random_range(1..=4))
                    .filter_map(|l| l.picks.choose(&mut self.rng).map(|p| json!({ "log_id": l.id, "contact_id": p.contact_id })))
                    .collect();
                self.send(Method::POST, "/api/correlations", json!({ "contact_refs": refs })).await.0
            }
            4 => {
                let target = match self.rng.random_range(0..4) {
                    0 => Value::Null,
                    1 => json!("corr-bogus"),
                    _ => project
                        .panel
                        .correlations
                        .choose(&mut self.rng)
                        .map(|c| json!(c.id))
                        .unwrap_or(Value::Null),
                };
                self.send(Method::POST, "/api/panel/level", json!({ "correlation_id": target })).await.0
            }
            5 => {
                let mut order = project.panel.log_order.clone();
                order.shuffle(&mut self.rng);
                if self.rng.random_bool(0.1) {
                    order.pop();
                }
                self.send(Method::POST, "/api/panel/order", json!({ "log_order": order })).await.0
            }
            _ => self.send(Method::GET, "/api/panel.svg", Value::Null).await.0,
        }
    }
}

#[tokio::test]
async fn random_operations_keep_the_project_valid() {
    for seed in 0..6u64 {
        let store = Arc::new(Store::new(Project::new(canyon_dataset())));
        let mut fuzz = Fuzzer {
            rng: ChaCha8Rng::seed_from_u64(seed),
            app: router(store.clone()),
            store,
        };
        let mut accepted = 0;
        for i in 0..150 {
            let before = fuzz.store.snapshot().revision;
            let status = fuzz.step().await;
            assert!(status < 500, "seed {seed} step {i}: status {status}");
            let after = fuzz.store.snapshot();
            let mutated = after.revision != before;
            assert!(after.revision == before || after.revision == before + 1);
            if mutated {
                accepted += 1;
                assert!((200..300).contains(&status));
            }
            let findings = after.project.validate();
            assert!(findings.is_empty(), "seed {seed} step {i}: {findings:?}");
            after.project.render_svg().unwrap();
        }
        assert!(accepted > 20, "seed {seed}: only {accepted} mutations accepted");
    }
}
