//! Editable project state: dataset, logs and panel.
//!
//! Every mutation keeps the project valid; derived data (true heights,
//! stratum trees) is recomputed from the contacts whenever picks change.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Deserializer, Serialize};

use crate::geom::{self, DipStrike, GeomError, Plane, Point3};
use crate::layout::{self, LayoutError, PanelLayout};
use crate::model::{
    validate_dataset, validate_rock_catalog, ContactId, ContactPick, ContactRef, Correlation,
    CorrelationId, CrossBedId, Dataset, Finding, GeoLog, LogId, Panel, Rgb, RockTypeId,
    StratumId,
};
use crate::render;
use crate::strata::{StrataError, StratumTree};

/// Posted pick points must lie within this distance of their contact.
pub const PICK_SNAP_TOLERANCE_M: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProjectError {
    #[error("unknown log {0}")]
    UnknownLog(LogId),
    #[error("unknown contact {0}")]
    UnknownContact(ContactId),
    #[error("unknown correlation {0}")]
    UnknownCorrelation(CorrelationId),
    #[error("pick for contact {contact_id} is {distance_m:.3} m from the contact")]
    PickTooFar { contact_id: ContactId, distance_m: f64 },
    #[error("contact {0} is already picked in this log")]
    DuplicatePick(ContactId),
    #[error("contact {contact_id} is not picked in log {log_id}")]
    MissingPick { log_id: LogId, contact_id: ContactId },
    #[error("contact {contact_id} is used by correlation {correlation_id}")]
    ContactInUse {
        contact_id: ContactId,
        correlation_id: CorrelationId,
    },
    #[error("invalid correlation: {0}")]
    InvalidCorrelation(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Strata(#[from] StrataError),
    #[error(transparent)]
    Layout(#[from] LayoutError),
}

impl ProjectError {
    /// True when the error names an id that does not exist.
    pub fn is_not_found(&self) -> bool {
        matches!(
            self,
            ProjectError::UnknownLog(_)
                | ProjectError::UnknownContact(_)
                | ProjectError::UnknownCorrelation(_)
                | ProjectError::Strata(StrataError::UnknownStratum(_))
                | ProjectError::Strata(StrataError::UnknownRockType(_))
                | ProjectError::Strata(StrataError::UnknownMeasurement(_))
                | ProjectError::Layout(LayoutError::UnknownCorrelation(_))
                | ProjectError::Layout(LayoutError::UnknownLog(_))
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PickInput {
    pub contact_id: ContactId,
    pub point: Point3,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "lowercase")]
pub enum PickEdit {
    Add { contact_id: ContactId, point: Point3 },
    Move { contact_id: ContactId, point: Point3 },
    Remove { contact_id: ContactId },
}

/// Partial update of a leaf stratum; absent fields stay unchanged and an
/// explicit `"rock_type_id": null` clears the rock type.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct StratumUpdate {
    #[serde(default, deserialize_with = "present", skip_serializing_if = "Option::is_none")]
    pub rock_type_id: Option<Option<RockTypeId>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub uncertain: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crossbed_ids: Option<BTreeSet<CrossBedId>>,
}

fn present<'de, D, T>(deserializer: D) -> Result<Option<Option<T>>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    Option::<T>::deserialize(deserializer).map(Some)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Project {
    pub dataset: Dataset,
    pub logs: Vec<GeoLog>,
    pub panel: Panel,
}

impl Project {
    pub fn new(dataset: Dataset) -> Self {
        Self {
            dataset,
            logs: Vec::new(),
            panel: Panel::default(),
        }
    }

    pub fn log(&self, id: &LogId) -> Result<&GeoLog, ProjectError> {
        self.logs
            .iter()
            .find(|l| &l.id == id)
            .ok_or_else(|| ProjectError::UnknownLog(id.clone()))
    }

    fn log_mut(&mut self, id: &LogId) -> Result<&mut GeoLog, ProjectError> {
        self.logs
            .iter_mut()
            .find(|l| &l.id == id)
            .ok_or_else(|| ProjectError::UnknownLog(id.clone()))
    }

    pub fn contact_ranks(&self) -> BTreeMap<ContactId, u32> {
        self.dataset
            .contacts
            .iter()
            .map(|c| (c.id.clone(), c.rank))
            .collect()
    }

    /// Reference plane fitted to a contact's polyline.
    pub fn fit_reference_plane(&self, contact_id: &ContactId) -> Result<Plane, ProjectError> {
        let contact = self
            .dataset
            .contact(contact_id)
            .ok_or_else(|| ProjectError::UnknownContact(contact_id.clone()))?;
        Ok(geom::fit_plane(&contact.points)?)
    }

    /// Plane and dip for a candidate reference contact, without changing
    /// the project.
    pub fn preview_plane(&self, contact_id: &ContactId) -> Result<(Plane, DipStrike), ProjectError> {
        let plane = self.fit_reference_plane(contact_id)?;
        Ok((plane, geom::dip_and_strike(&plane)))
    }

    /// Snaps a point onto its contact's polyline.
    pub fn snap_pick(&self, input: &PickInput) -> Result<Point3, ProjectError> {
        let contact = self
            .dataset
            .contact(&input.contact_id)
            .ok_or_else(|| ProjectError::UnknownContact(input.contact_id.clone()))?;
        let (snapped, distance_m) = geom::closest_point_on_polyline(&contact.points, &input.point)
            .ok_or_else(|| ProjectError::UnknownContact(input.contact_id.clone()))?;
        if distance_m > PICK_SNAP_TOLERANCE_M {
            return Err(ProjectError::PickTooFar {
                contact_id: input.contact_id.clone(),
                distance_m,
            });
        }
        Ok(snapped)
    }

    fn next_id(prefix: &str, taken: impl Fn(&str) -> bool) -> String {
        (1..)
            .map(|n| format!("{prefix}-{n}"))
            .find(|id| !taken(id))
            .expect("unbounded id space")
    }

    /// Creates a log from a reference contact and a set of picks; the new
    /// log is appended to the panel order.
    pub fn create_log(
        &mut self,
        name: &str,
        reference_contact_id: &ContactId,
        picks: &[PickInput],
    ) -> Result<LogId, ProjectError> {
        let plane = self.fit_reference_plane(reference_contact_id)?;
        let mut seen = BTreeSet::new();
        let mut points = Vec::with_capacity(picks.len());
        for pick in picks {
            if !seen.insert(&pick.contact_id) {
                return Err(ProjectError::DuplicatePick(pick.contact_id.clone()));
            }
            points.push((pick.contact_id.clone(), self.snap_pick(pick)?));
        }
        let id = LogId::new(Self::next_id("log", |id| {
            self.logs.iter().any(|l| l.id.as_str() == id)
        }));
        let log = build_log(
            id.clone(),
            name,
            reference_contact_id.clone(),
            plane,
            points,
            &self.contact_ranks(),
        )?;
        self.logs.push(log);
        self.panel.log_order.push(id.clone());
        Ok(id)
    }

    /// Adds, moves or removes one pick and rebuilds the log's tree; leaf
    /// annotations survive wherever both bounding contacts are unchanged.
    pub fn edit_picks(&mut self, log_id: &LogId, edit: &PickEdit) -> Result<(), ProjectError> {
        let log = self.log(log_id)?;
        let mut points: Vec<(ContactId, Point3)> = log
            .picks
            .iter()
            .map(|p| (p.contact_id.clone(), p.point))
            .collect();
        let slot = |points: &[(ContactId, Point3)], contact: &ContactId| {
            points
                .iter()
                .position(|(c, _)| c == contact)
                .ok_or_else(|| ProjectError::MissingPick {
                    log_id: log_id.clone(),
                    contact_id: contact.clone(),
                })
        };

        match edit {
            PickEdit::Add { contact_id, point } => {
                if points.iter().any(|(c, _)| c == contact_id) {
                    return Err(ProjectError::DuplicatePick(contact_id.clone()));
                }
                let snapped = self.snap_pick(&PickInput {
                    contact_id: contact_id.clone(),
                    point: *point,
                })?;
                points.push((contact_id.clone(), snapped));
            }
            PickEdit::Move { contact_id, point } => {
                let i = slot(&points, contact_id)?;
                points[i].1 = self.snap_pick(&PickInput {
                    contact_id: contact_id.clone(),
                    point: *point,
                })?;
            }
            PickEdit::Remove { contact_id } => {
                let i = slot(&points, contact_id)?;
                if let Some(corr) = self.panel.correlations.iter().find(|c| {
                    c.contact_refs
                        .iter()
                        .any(|r| &r.log_id == log_id && &r.contact_id == contact_id)
                }) {
                    return Err(ProjectError::ContactInUse {
                        contact_id: contact_id.clone(),
                        correlation_id: corr.id.clone(),
                    });
                }
                points.remove(i);
            }
        }

        let annotations = log.tree.annotations();
        let mut rebuilt = build_log(
            log.id.clone(),
            &log.name,
            log.reference_contact_id.clone(),
            log.reference_plane,
            points,
            &self.contact_ranks(),
        )?;
        rebuilt.tree.apply_annotations(&annotations);
        *self.log_mut(log_id)? = rebuilt;
        Ok(())
    }

    pub fn update_stratum(
        &mut self,
        log_id: &LogId,
        stratum_id: &StratumId,
        update: &StratumUpdate,
    ) -> Result<(), ProjectError> {
        let catalog = self.panel.rock_catalog.clone();
        let crossbeds = self.dataset.crossbeds.clone();
        let log = self.log_mut(log_id)?;
        // apply to a copy so a failing field leaves the log untouched
        let mut tree = log.tree.clone();
        if tree.find(stratum_id).is_none() {
            return Err(StrataError::UnknownStratum(stratum_id.clone()).into());
        }
        let current_uncertain = tree
            .find(stratum_id)
            .map(|s| s.rock_type_uncertain)
            .unwrap_or(false);
        let uncertain = update.uncertain.unwrap_or(current_uncertain);
        match &update.rock_type_id {
            Some(Some(rock)) => tree.assign_rock_type(stratum_id, rock, uncertain, &catalog)?,
            Some(None) => tree.clear_rock_type(stratum_id)?,
            None => {
                if let Some(flag) = update.uncertain {
                    tree.set_rock_type_uncertain(stratum_id, flag)?;
                }
            }
        }
        if let Some(ids) = &update.crossbed_ids {
            tree.assign_crossbeds(stratum_id, ids.clone(), &crossbeds)?;
        }
        log.tree = tree;
        Ok(())
    }

    /// Creates a correlation. An empty `segment_uncertain` marks every
    /// connection uncertain.
    pub fn create_correlation(
        &mut self,
        contact_refs: Vec<ContactRef>,
        segment_uncertain: Vec<bool>,
        color: Option<Rgb>,
    ) -> Result<CorrelationId, ProjectError> {
        if contact_refs.len() < 2 {
            return Err(ProjectError::InvalidCorrelation(
                "needs contacts in at least two logs".to_owned(),
            ));
        }
        let mut logs = BTreeSet::new();
        for r in &contact_refs {
            let log = self.log(&r.log_id)?;
            if !logs.insert(&r.log_id) {
                return Err(ProjectError::InvalidCorrelation(format!(
                    "more than one contact in log {}",
                    r.log_id
                )));
            }
            if log.pick(&r.contact_id).is_none() {
                return Err(ProjectError::MissingPick {
                    log_id: r.log_id.clone(),
                    contact_id: r.contact_id.clone(),
                });
            }
        }
        let segment_uncertain = if segment_uncertain.is_empty() {
            vec![true; contact_refs.len() - 1]
        } else if segment_uncertain.len() == contact_refs.len() - 1 {
            segment_uncertain
        } else {
            return Err(ProjectError::InvalidCorrelation(format!(
                "expected {} segment flags, got {}",
                contact_refs.len() - 1,
                segment_uncertain.len()
            )));
        };

        let id = CorrelationId::new(Self::next_id("corr", |id| {
            self.panel.correlations.iter().any(|c| c.id.as_str() == id)
        }));
        self.panel.correlations.push(Correlation {
            id: id.clone(),
            contact_refs,
            segment_uncertain,
            color,
        });
        Ok(id)
    }

    pub fn set_leveling(&mut self, correlation: Option<CorrelationId>) -> Result<(), ProjectError> {
        if let Some(id) = &correlation {
            if self.panel.correlation(id).is_none() {
                return Err(ProjectError::UnknownCorrelation(id.clone()));
            }
        }
        let candidate = Panel {
            leveling: correlation,
            ..self.panel.clone()
        };
        layout::compute_offsets(&candidate, &self.logs)?;
        self.panel = candidate;
        Ok(())
    }

    pub fn set_log_order(&mut self, order: &[LogId]) -> Result<(), ProjectError> {
        if let Some(unknown) = order.iter().find(|id| self.log(id).is_err()) {
            return Err(ProjectError::UnknownLog(unknown.clone()));
        }
        self.panel = layout::reorder_logs(&self.panel, order)?;
        Ok(())
    }

    /// Per-log vertical offsets in panel pixels.
    pub fn offsets(&self) -> Result<BTreeMap<LogId, f64>, ProjectError> {
        Ok(layout::compute_offsets(&self.panel, &self.logs)?)
    }

    pub fn layout(&self) -> Result<PanelLayout, ProjectError> {
        Ok(layout::compute_layout(self)?)
    }

    /// The panel as an SVG document.
    pub fn render_svg(&self) -> Result<String, ProjectError> {
        Ok(render::render_panel(&self.panel, &self.layout()?))
    }

    /// Every invariant of the dataset, the logs and the panel.
    pub fn validate(&self) -> Vec<Finding> {
        let mut findings = validate_dataset(&self.dataset);
        findings.extend(validate_rock_catalog(&self.panel.rock_catalog));
        let ranks = self.contact_ranks();

        let mut log_ids = BTreeSet::new();
        for log in &self.logs {
            let label = format!("log {}", log.id);
            if !log_ids.insert(&log.id) {
                findings.push(Finding::error(&label, "duplicate id"));
            }
            if self.dataset.contact(&log.reference_contact_id).is_none() {
                findings.push(Finding::error(
                    &label,
                    format!("unknown reference contact {}", log.reference_contact_id),
                ));
            }
            let mut picked = BTreeSet::new();
            for pick in &log.picks {
                if !picked.insert(&pick.contact_id) {
                    findings.push(Finding::error(
                        &label,
                        format!("contact {} picked twice", pick.contact_id),
                    ));
                }
                if !ranks.contains_key(&pick.contact_id) {
                    findings.push(Finding::error(
                        &label,
                        format!("unknown contact {}", pick.contact_id),
                    ));
                }
            }
            if !log
                .picks
                .windows(2)
                .all(|w| w[0].true_height_m < w[1].true_height_m)
            {
                findings.push(Finding::error(&label, "picks not strictly ascending"));
            }
            if log.tree.leaf_count() != log.picks.len() + 1 {
                findings.push(Finding::error(&label, "leaf count != picks + 1"));
            }
            for leaf in log.tree.leaves() {
                if let Some(rock) = &leaf.rock_type_id {
                    if self.panel.rock_type(rock).is_none() {
                        findings.push(Finding::error(
                            &label,
                            format!("stratum {} has unknown rock type {rock}", leaf.id),
                        ));
                    }
                }
                for m in &leaf.crossbed_ids {
                    if self.dataset.crossbed(m).is_none() {
                        findings.push(Finding::error(
                            &label,
                            format!("stratum {} has unknown measurement {m}", leaf.id),
                        ));
                    }
                }
            }
        }

        let order: BTreeSet<_> = self.panel.log_order.iter().collect();
        if order != log_ids || order.len() != self.panel.log_order.len() {
            findings.push(Finding::error("panel", "log order is not a permutation of the logs"));
        }

        let mut corr_ids = BTreeSet::new();
        for corr in &self.panel.correlations {
            let label = format!("correlation {}", corr.id);
            if !corr_ids.insert(&corr.id) {
                findings.push(Finding::error(&label, "duplicate id"));
            }
            if corr.contact_refs.len() < 2 {
                findings.push(Finding::error(&label, "fewer than two contacts"));
            }
            let mut logs = BTreeSet::new();
            for r in &corr.contact_refs {
                if !logs.insert(&r.log_id) {
                    findings.push(Finding::error(&label, format!("two contacts in log {}", r.log_id)));
                }
                let picked = self
                    .logs
                    .iter()
                    .find(|l| l.id == r.log_id)
                    .is_some_and(|l| l.pick(&r.contact_id).is_some());
                if !picked {
                    findings.push(Finding::error(
                        &label,
                        format!("contact {} is not picked in log {}", r.contact_id, r.log_id),
                    ));
                }
            }
        }
        if let Some(level) = &self.panel.leveling {
            if self.panel.correlation(level).is_none() {
                findings.push(Finding::error("panel", format!("unknown leveling correlation {level}")));
            }
        }
        findings
    }
}

/// Assembles a log from snapped pick points.
pub fn build_log(
    id: LogId,
    name: &str,
    reference_contact_id: ContactId,
    reference_plane: Plane,
    points: Vec<(ContactId, Point3)>,
    ranks: &BTreeMap<ContactId, u32>,
) -> Result<GeoLog, ProjectError> {
    let mut picks: Vec<ContactPick> = points
        .into_iter()
        .map(|(contact_id, point)| ContactPick {
            true_height_m: geom::true_height(&reference_plane, &point),
            contact_id,
            point,
        })
        .collect();
    picks.sort_by(|a, b| a.true_height_m.total_cmp(&b.true_height_m));
    let tree = StratumTree::build(&picks, ranks)?;
    Ok(GeoLog {
        id,
        name: name.to_owned(),
        reference_contact_id,
        anchor_elevation_m: reference_plane.origin.z,
        reference_plane,
        picks,
        tree,
    })
}
