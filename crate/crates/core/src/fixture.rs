//! Deterministic synthetic campaign: four outcrops along a canyon.
//!
//! The generated data has the scale of a real field campaign: 62 contacts
//! picked into four logs (58 bounded strata), rock types on every bounded
//! stratum, 129 cross-bed measurements spread over 18 strata, and two
//! correlations. Geometry is built analytically so that distances and
//! heights are known in closed form:
//!
//! * strata dip [`REGIONAL_DIP_DEG`] toward [`REGIONAL_DIP_AZIMUTH_DEG`];
//! * each outcrop face is a gently curved wall whose reference contact has
//!   its centroid exactly at the outcrop anchor, so adjacent logs sit
//!   [`ANCHOR_SPACING_M`] apart horizontally;
//! * every coordinate is rounded to 0.1 mm so the data survives canonical
//!   serialization unchanged.
//!
//! The project is assembled by replaying [`canyon_script`] through the
//! ordinary [`Project`] operations, the same steps a user (or the HTTP
//! service) would perform.

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::geom::{Point3, Vector3};
use crate::model::{
    default_rock_catalog, Contact, ContactId, ContactRef, CrossBedId, CrossBedMeasurement,
    Dataset, DatasetMetadata, LogId, Rgb, StratumId,
};
use crate::project::{PickInput, Project, ProjectError, StratumUpdate};

pub const FIXTURE_SEED: u64 = 0x1cc0_2021;

pub const REGIONAL_DIP_DEG: f64 = 3.0;
pub const REGIONAL_DIP_AZIMUTH_DEG: f64 = 300.0;

pub const LOG_NAMES: [&str; 4] = ["W1", "W2", "W3", "W4"];
pub const CONTACTS_PER_LOG: [usize; 4] = [16, 15, 16, 15];
/// Horizontal distances between adjacent anchors, W1 to W4.
pub const ANCHOR_SPACING_M: [f64; 3] = [412.0, 300.0, 360.0];

pub const CONTACT_COUNT: usize = 62;
pub const BOUNDED_STRATA_COUNT: usize = 58;
pub const CROSSBED_STRATA_COUNT: usize = 18;
pub const CROSSBED_COUNT: usize = 129;
pub const CORRELATION_COUNT: usize = 2;

/// Correlation joining the top contact of every log.
pub const TOP_CORRELATION: &str = "corr-1";

const ANCHORS: [(f64, f64); 4] = [(0.0, 0.0), (247.2, 329.6), (547.2, 329.6), (835.2, 545.6)];
const BASE_ELEVATIONS: [f64; 4] = [1320.0, 1326.5, 1318.2, 1331.0];
/// Indices of the bounded strata carrying cross beds in each log.
const CROSSBED_STRATA: [&[usize]; 4] = [&[1, 3, 6, 9, 12], &[2, 5, 8, 11], &[0, 4, 7, 10, 13], &[1, 4, 8, 12]];
const UNIT_COLOR: Rgb = Rgb::new(0xd6, 0x27, 0x28);
const BED_COLOR: Rgb = Rgb::new(0xff, 0x7f, 0x0e);

/// Along-face sample positions; symmetric so the centroid sits on the
/// anchor.
const FACE_STEPS: [f64; 11] = [-10.0, -8.0, -6.0, -4.0, -2.0, 0.0, 2.0, 4.0, 6.0, 8.0, 10.0];
/// Pick vertex, the middle of the face.
const PICK_VERTEX: usize = 5;

fn round4(v: f64) -> f64 {
    (v * 1e4).round() / 1e4
}

fn rounded(p: Point3) -> Point3 {
    Point3::new(round4(p.x), round4(p.y), round4(p.z))
}

fn contact_id(log: usize, index: usize) -> ContactId {
    ContactId::new(format!("{}-c{:02}", LOG_NAMES[log].to_lowercase(), index + 1))
}

fn is_unit_contact(index: usize, count: usize) -> bool {
    index.is_multiple_of(4) || index + 1 == count
}

/// Outcrop face geometry shared by contacts and measurements.
struct Face {
    anchor: (f64, f64),
    base: f64,
}

impl Face {
    // unit vectors along the canyon wall and across it
    const ALONG: (f64, f64) = (0.8, 0.6);
    const ACROSS: (f64, f64) = (-0.6, 0.8);

    /// Horizontal position at along-face coordinate `t`; the wall bows by
    /// a zero-mean quadratic over [`FACE_STEPS`].
    fn horizontal(&self, t: f64) -> (f64, f64) {
        let bow = 0.05 * t * t - 2.0;
        (
            self.anchor.0 + t * Self::ALONG.0 + bow * Self::ACROSS.0,
            self.anchor.1 + t * Self::ALONG.1 + bow * Self::ACROSS.1,
        )
    }

    /// Elevation of the regional surface `true_height` above the base
    /// contact at a horizontal position.
    fn elevation(&self, xy: (f64, f64), true_height: f64) -> f64 {
        let dip = REGIONAL_DIP_DEG.to_radians();
        let (sa, ca) = REGIONAL_DIP_AZIMUTH_DEG.to_radians().sin_cos();
        let downdip = (xy.0 - self.anchor.0) * sa + (xy.1 - self.anchor.1) * ca;
        self.base + true_height / dip.cos() - dip.tan() * downdip
    }
}

struct Outcrop {
    face: Face,
    /// True heights of the contacts above the reference contact.
    heights: Vec<f64>,
}

fn outcrops(rng: &mut ChaCha8Rng) -> Vec<Outcrop> {
    (0..LOG_NAMES.len())
        .map(|log| {
            let mut h = 0.0;
            let heights = (0..CONTACTS_PER_LOG[log])
                .map(|i| {
                    if i > 0 {
                        h += (rng.random_range(0.4..2.6) * 100.0_f64).round() / 100.0;
                    }
                    h
                })
                .collect();
            Outcrop {
                face: Face {
                    anchor: ANCHORS[log],
                    base: BASE_ELEVATIONS[log],
                },
                heights,
            }
        })
        .collect()
}

fn contacts(outcrops: &[Outcrop], rng: &mut ChaCha8Rng) -> Vec<Contact> {
    let mut out = Vec::with_capacity(CONTACT_COUNT);
    for (log, outcrop) in outcrops.iter().enumerate() {
        let count = outcrop.heights.len();
        for (i, &h) in outcrop.heights.iter().enumerate() {
            let unit = is_unit_contact(i, count);
            let points = FACE_STEPS
                .iter()
                .map(|&t| {
                    let xy = outcrop.face.horizontal(t);
                    // the reference contact is exactly planar; the rest undulate
                    let wobble = if i == 0 { 0.0 } else { rng.random_range(-0.02..0.02) };
                    rounded(Point3::new(xy.0, xy.1, outcrop.face.elevation(xy, h) + wobble))
                })
                .collect();
            out.push(Contact {
                id: contact_id(log, i),
                name: format!(
                    "{} {} contact {}",
                    LOG_NAMES[log],
                    if unit { "unit" } else { "bed" },
                    i + 1
                ),
                rank: if unit { 0 } else { 1 },
                color: if unit { UNIT_COLOR } else { BED_COLOR },
                line_weight: if unit { 2.0 } else { 1.0 },
                points,
                uncertain: i == 6,
            });
        }
    }
    out
}

fn measurement_points(center: Point3, dip_deg: f64, azimuth_deg: f64, rng: &mut ChaCha8Rng) -> Vec<Point3> {
    let (sd, cd) = dip_deg.to_radians().sin_cos();
    let (sa, ca) = azimuth_deg.to_radians().sin_cos();
    let normal = Vector3::new(sd * sa, sd * ca, cd);
    let strike = normal.cross(&Vector3::z()).normalize();
    let down = normal.cross(&strike);
    let noise = Normal::new(0.0, 0.002).expect("valid sigma");
    [(-0.3, -0.2), (0.3, -0.2), (0.25, 0.25), (-0.2, 0.3)]
        .iter()
        .map(|&(a, b)| {
            let jitter = rng.random_range(0.8..1.2);
            let p = center + strike * (a * jitter) + down * (b * jitter)
                + Vector3::new(noise.sample(rng), noise.sample(rng), noise.sample(rng));
            rounded(p)
        })
        .collect()
}

/// Cross beds, in the order they are assigned to strata.
fn crossbeds(outcrops: &[Outcrop], rng: &mut ChaCha8Rng) -> Vec<(usize, usize, CrossBedMeasurement)> {
    let mut out = Vec::with_capacity(CROSSBED_COUNT);
    let mut n = 0;
    let mut slot = 0;
    for (log, outcrop) in outcrops.iter().enumerate() {
        let spread = Normal::new(62.0 + 9.0 * log as f64, 22.0).expect("valid sigma");
        for &stratum in CROSSBED_STRATA[log] {
            let count = if slot < 3 { 8 } else { 7 };
            slot += 1;
            let mid = (outcrop.heights[stratum] + outcrop.heights[stratum + 1]) / 2.0;
            for _ in 0..count {
                n += 1;
                let t = rng.random_range(-8.0..8.0);
                let xy = outcrop.face.horizontal(t);
                let center = Point3::new(xy.0, xy.1, outcrop.face.elevation(xy, mid));
                let dip = rng.random_range(12.0..28.0);
                let azimuth = spread.sample(rng);
                let points = measurement_points(center, dip, azimuth, rng);
                let m = CrossBedMeasurement::from_points(CrossBedId::new(format!("xb-{n:03}")), points)
                    .expect("fixture measurement points span a plane");
                out.push((log, stratum, m));
            }
        }
    }
    out
}

/// The synthetic interpretation dataset.
pub fn canyon_dataset() -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    let outcrops = outcrops(&mut rng);
    let contacts = contacts(&outcrops, &mut rng);
    let crossbeds = crossbeds(&outcrops, &mut rng).into_iter().map(|(_, _, m)| m).collect();
    Dataset {
        metadata: DatasetMetadata {
            source: "synthetic four-outcrop canyon campaign".to_owned(),
            crs_note: "local ENU meters, x east, y north, z up".to_owned(),
        },
        contacts,
        crossbeds,
    }
}

/// One user-level editing step.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "step", rename_all = "snake_case")]
pub enum FixtureStep {
    CreateLog {
        name: String,
        reference_contact_id: ContactId,
        picks: Vec<PickInput>,
    },
    UpdateStratum {
        log_id: LogId,
        stratum_id: StratumId,
        update: StratumUpdate,
    },
    CreateCorrelation {
        contact_refs: Vec<ContactRef>,
        segment_uncertain: Vec<bool>,
    },
}

/// The editing session that turns [`canyon_dataset`] into the fixture
/// project: create logs, assign rock types and cross beds, correlate.
pub fn canyon_script(dataset: &Dataset) -> Vec<FixtureStep> {
    let mut rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED);
    let outcrops = outcrops(&mut rng);
    let _ = contacts(&outcrops, &mut rng);
    let assignments = crossbeds(&outcrops, &mut rng);
    let mut rock_rng = ChaCha8Rng::seed_from_u64(FIXTURE_SEED ^ 0xa5a5);
    let catalog = default_rock_catalog();

    let log_id = |log: usize| LogId::new(format!("log-{}", log + 1));
    let mut steps = Vec::new();

    for (log, name) in LOG_NAMES.iter().enumerate() {
        let picks = (0..CONTACTS_PER_LOG[log])
            .map(|i| {
                let id = contact_id(log, i);
                let point = dataset.contact(&id).expect("fixture contact").points[PICK_VERTEX];
                PickInput { contact_id: id, point }
            })
            .collect();
        steps.push(FixtureStep::CreateLog {
            name: (*name).to_owned(),
            reference_contact_id: contact_id(log, 0),
            picks,
        });
    }

    for (log, &count) in CONTACTS_PER_LOG.iter().enumerate() {
        for stratum in 0..count - 1 {
            let lower = contact_id(log, stratum);
            let upper = contact_id(log, stratum + 1);
            let has_crossbeds = CROSSBED_STRATA[log].contains(&stratum);
            // sandy strata carry the cross beds; others draw from the full range
            let rock = if has_crossbeds {
                &catalog[rock_rng.random_range(2..6)]
            } else {
                &catalog[rock_rng.random_range(0..8)]
            };
            let crossbed_ids: BTreeSet<CrossBedId> = assignments
                .iter()
                .filter(|(l, s, _)| *l == log && *s == stratum)
                .map(|(_, _, m)| m.id.clone())
                .collect();
            steps.push(FixtureStep::UpdateStratum {
                log_id: log_id(log),
                stratum_id: StratumId::from_bounds(Some(&lower), Some(&upper)),
                update: StratumUpdate {
                    rock_type_id: Some(Some(rock.id.clone())),
                    uncertain: Some(rock_rng.random_bool(0.2)),
                    crossbed_ids: (!crossbed_ids.is_empty()).then_some(crossbed_ids),
                },
            });
        }
    }

    let top = (0..LOG_NAMES.len())
        .map(|log| ContactRef {
            log_id: log_id(log),
            contact_id: contact_id(log, CONTACTS_PER_LOG[log] - 1),
        })
        .collect();
    steps.push(FixtureStep::CreateCorrelation {
        contact_refs: top,
        segment_uncertain: vec![false, true, false],
    });
    let middle = (0..3)
        .map(|log| ContactRef {
            log_id: log_id(log),
            contact_id: contact_id(log, 8),
        })
        .collect();
    steps.push(FixtureStep::CreateCorrelation {
        contact_refs: middle,
        segment_uncertain: vec![true, false],
    });
    steps
}

impl FixtureStep {
    pub fn apply(&self, project: &mut Project) -> Result<(), ProjectError> {
        match self {
            FixtureStep::CreateLog {
                name,
                reference_contact_id,
                picks,
            } => project
                .create_log(name, reference_contact_id, picks)
                .map(drop),
            FixtureStep::UpdateStratum {
                log_id,
                stratum_id,
                update,
            } => project.update_stratum(log_id, stratum_id, update),
            FixtureStep::CreateCorrelation {
                contact_refs,
                segment_uncertain,
            } => project
                .create_correlation(contact_refs.clone(), segment_uncertain.clone(), None)
                .map(drop),
        }
    }
}

/// The fixture project, not leveled.
pub fn canyon_project() -> Project {
    let dataset = canyon_dataset();
    let steps = canyon_script(&dataset);
    let mut project = Project::new(dataset);
    for step in &steps {
        step.apply(&mut project).expect("fixture script applies cleanly");
    }
    project
}

