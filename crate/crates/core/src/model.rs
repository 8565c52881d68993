//! Domain types shared by every stage of the pipeline.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::geom::{self, GeomError, Plane, Point3};
use crate::layout::PanelStyle;
use crate::strata::StratumTree;

macro_rules! id_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        #[serde(transparent)]
        pub struct $name(pub String);

        impl $name {
            pub fn new(id: impl Into<String>) -> Self {
                Self(id.into())
            }

            pub fn as_str(&self) -> &str {
                &self.0
            }
        }

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(&self.0)
            }
        }

        impl From<&str> for $name {
            fn from(id: &str) -> Self {
                Self(id.to_owned())
            }
        }
    };
}

id_type!(
    /// Identifier of a [`Contact`] within a dataset.
    ContactId
);
id_type!(
    /// Identifier of a [`CrossBedMeasurement`] within a dataset.
    CrossBedId
);
id_type!(RockTypeId);
id_type!(LogId);
id_type!(CorrelationId);
id_type!(
    /// Identifier of a stratum, derived from its bounding contacts as
    /// `"<lower>..<upper>"` with an empty side for an unbounded extreme.
    ///
    /// Bounding contacts are unique within a tree, so the id survives tree
    /// rebuilds that leave both bounds in place.
    StratumId
);

impl StratumId {
    pub fn from_bounds(lower: Option<&ContactId>, upper: Option<&ContactId>) -> Self {
        let lower = lower.map(ContactId::as_str).unwrap_or("");
        let upper = upper.map(ContactId::as_str).unwrap_or("");
        Self(format!("{lower}..{upper}"))
    }
}

/// 8-bit RGB color, serialized as `#rrggbb`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Rgb {
    pub r: u8,
    pub g: u8,
    pub b: u8,
}

impl Rgb {
    pub const WHITE: Rgb = Rgb::new(255, 255, 255);
    pub const BLACK: Rgb = Rgb::new(0, 0, 0);

    pub const fn new(r: u8, g: u8, b: u8) -> Self {
        Self { r, g, b }
    }
}

impl fmt::Display for Rgb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{:02x}{:02x}{:02x}", self.r, self.g, self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid color {0:?}, expected #rrggbb")]
pub struct ParseRgbError(String);

impl FromStr for Rgb {
    type Err = ParseRgbError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseRgbError(s.to_owned());
        let hex = s.strip_prefix('#').ok_or_else(err)?;
        if hex.len() != 6 || !hex.is_ascii() {
            return Err(err());
        }
        let channel = |i: usize| u8::from_str_radix(&hex[i..i + 2], 16).map_err(|_| err());
        Ok(Rgb::new(channel(0)?, channel(2)?, channel(4)?))
    }
}

impl Serialize for Rgb {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Rgb {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// A traced boundary between two strata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub id: ContactId,
    pub name: String,
    /// Magnitude of change across the contact; 0 is the greatest.
    pub rank: u32,
    pub color: Rgb,
    pub line_weight: f64,
    /// Polyline vertices in local east/north/up meters.
    pub points: Vec<Point3>,
    #[serde(default)]
    pub uncertain: bool,
}

/// A dip-and-strike measurement on a cross bed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CrossBedMeasurement {
    pub id: CrossBedId,
    #[serde(default)]
    pub source_points: Vec<Point3>,
    pub dip_azimuth_deg: f64,
    pub dip_angle_deg: f64,
    pub centroid: Point3,
}

impl CrossBedMeasurement {
    /// Derives the measurement by fitting a plane to the picked points.
    ///
    /// A horizontal fit has no dip direction; its azimuth is stored as 0.
    pub fn from_points(id: CrossBedId, source_points: Vec<Point3>) -> Result<Self, GeomError> {
        let plane = geom::fit_plane(&source_points)?;
        let dip = geom::dip_and_strike(&plane);
        Ok(Self {
            id,
            dip_azimuth_deg: dip.dip_azimuth_deg.unwrap_or(0.0),
            dip_angle_deg: dip.dip_angle_deg,
            centroid: plane.origin,
            source_points,
        })
    }
}

/// A rock type on the grain-size axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RockType {
    pub id: RockTypeId,
    pub name: String,
    pub grain_size_mm: f64,
    /// Krumbein phi, `-log2(grain_size_mm)`.
    pub phi: f64,
    pub color: Rgb,
}

impl RockType {
    pub fn new(id: &str, name: &str, grain_size_mm: f64, color: Rgb) -> Self {
        Self {
            id: RockTypeId::from(id),
            name: name.to_owned(),
            grain_size_mm,
            phi: krumbein_phi(grain_size_mm),
            color,
        }
    }
}

pub fn krumbein_phi(grain_size_mm: f64) -> f64 {
    -grain_size_mm.log2()
}

/// Wentworth-style classes from clay to cobble, finest first. Sand classes
/// use the geometric midpoint of their bounds to four significant digits.
pub fn default_rock_catalog() -> Vec<RockType> {
    vec![
        RockType::new("clay", "Clay", 0.002, Rgb::new(0x8c, 0x6d, 0x9e)),
        RockType::new("silt", "Silt", 0.015_625, Rgb::new(0x9e, 0xa3, 0xb0)),
        RockType::new(
            "very-fine-sand",
            "Very fine sand",
            0.088_39,
            Rgb::new(0xf3, 0xe7, 0xa1),
        ),
        RockType::new(
            "fine-sand",
            "Fine sand",
            0.176_8,
            Rgb::new(0xf1, 0xd5, 0x6b),
        ),
        RockType::new(
            "medium-sand",
            "Medium sand",
            0.353_6,
            Rgb::new(0xe8, 0xb8, 0x3a),
        ),
        RockType::new("coarse-sand", "Coarse sand", 1.0, Rgb::new(0xd9, 0x8c, 0x2b)),
        RockType::new("pebble", "Pebble", 16.0, Rgb::new(0xb3, 0x6b, 0x3c)),
        RockType::new("cobble", "Cobble", 63.0, Rgb::new(0x7a, 0x4a, 0x2e)),
    ]
}

/// A point picked on a contact while logging, with its height above the
/// log's reference plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContactPick {
    pub contact_id: ContactId,
    pub point: Point3,
    pub true_height_m: f64,
}

/// A geological log: reference plane, ordered contact picks and the
/// stratum tree derived from them.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeoLog {
    pub id: LogId,
    pub name: String,
    pub reference_contact_id: ContactId,
    pub reference_plane: Plane,
    /// Sorted strictly ascending by `true_height_m`.
    pub picks: Vec<ContactPick>,
    pub tree: StratumTree,
    pub anchor_elevation_m: f64,
}

impl GeoLog {
    pub fn pick(&self, contact: &ContactId) -> Option<&ContactPick> {
        self.picks.iter().find(|p| &p.contact_id == contact)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ContactRef {
    pub log_id: LogId,
    pub contact_id: ContactId,
}

/// An asserted identity of one contact across several logs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correlation {
    pub id: CorrelationId,
    pub contact_refs: Vec<ContactRef>,
    /// `segment_uncertain[i]` styles the connection between
    /// `contact_refs[i]` and `contact_refs[i + 1]`.
    #[serde(default)]
    pub segment_uncertain: Vec<bool>,
    #[serde(default)]
    pub color: Option<Rgb>,
}

impl Correlation {
    pub fn contact_in(&self, log: &LogId) -> Option<&ContactId> {
        self.contact_refs
            .iter()
            .find(|r| &r.log_id == log)
            .map(|r| &r.contact_id)
    }

    /// Uncertainty of the connection between the contacts in logs `a` and
    /// `b`. Pairs that are not consecutive in `contact_refs` draw dashed,
    /// like a freshly created connection.
    pub fn is_segment_uncertain(&self, a: &LogId, b: &LogId) -> bool {
        self.contact_refs
            .windows(2)
            .position(|w| {
                (&w[0].log_id == a && &w[1].log_id == b)
                    || (&w[0].log_id == b && &w[1].log_id == a)
            })
            .map(|i| self.segment_uncertain.get(i).copied().unwrap_or(true))
            .unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Panel {
    pub id: String,
    pub log_order: Vec<LogId>,
    pub correlations: Vec<Correlation>,
    pub leveling: Option<CorrelationId>,
    pub rock_catalog: Vec<RockType>,
    pub style: PanelStyle,
}

impl Panel {
    pub fn correlation(&self, id: &CorrelationId) -> Option<&Correlation> {
        self.correlations.iter().find(|c| &c.id == id)
    }

    pub fn rock_type(&self, id: &RockTypeId) -> Option<&RockType> {
        self.rock_catalog.iter().find(|r| &r.id == id)
    }
}

impl Default for Panel {
    fn default() -> Self {
        Self {
            id: "panel".to_owned(),
            log_order: Vec::new(),
            correlations: Vec::new(),
            leveling: None,
            rock_catalog: default_rock_catalog(),
            style: PanelStyle::default(),
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct DatasetMetadata {
    #[serde(default)]
    pub source: String,
    #[serde(default)]
    pub crs_note: String,
}

/// Interpretation input: contacts and cross-bed measurements.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    #[serde(default)]
    pub metadata: DatasetMetadata,
    pub contacts: Vec<Contact>,
    #[serde(default)]
    pub crossbeds: Vec<CrossBedMeasurement>,
}

impl Dataset {
    pub fn contact(&self, id: &ContactId) -> Option<&Contact> {
        self.contacts.iter().find(|c| &c.id == id)
    }

    pub fn crossbed(&self, id: &CrossBedId) -> Option<&CrossBedMeasurement> {
        self.crossbeds.iter().find(|m| &m.id == id)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Warning,
    Error,
}

/// One validation result; rendered as `"<id>: <message>"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub id: Option<String>,
    pub message: String,
}

impl Finding {
    pub fn error(id: impl fmt::Display, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Error,
            id: Some(id.to_string()),
            message: message.into(),
        }
    }

    pub fn warning(id: impl fmt::Display, message: impl Into<String>) -> Self {
        Self {
            severity: Severity::Warning,
            id: Some(id.to_string()),
            message: message.into(),
        }
    }

    pub fn is_error(&self) -> bool {
        self.severity == Severity::Error
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.id {
            Some(id) => write!(f, "{id}: {}", self.message),
            None => f.write_str(&self.message),
        }
    }
}

fn finite_point(p: &Point3) -> bool {
    p.coords.iter().all(|v| v.is_finite())
}

/// Checks every dataset invariant and reports violations as findings.
pub fn validate_dataset(dataset: &Dataset) -> Vec<Finding> {
    let mut findings = Vec::new();

    let mut seen = BTreeSet::new();
    for contact in &dataset.contacts {
        let label = format!("contact {}", contact.id);
        if !seen.insert(&contact.id) {
            findings.push(Finding::error(&label, "duplicate id"));
        }
        if contact.points.len() < 2 {
            findings.push(Finding::error(&label, "points.len < 2"));
        }
        if !(contact.line_weight > 0.0 && contact.line_weight.is_finite()) {
            findings.push(Finding::error(&label, "line_weight must be > 0"));
        }
        if !contact.points.iter().all(finite_point) {
            findings.push(Finding::error(&label, "non-finite coordinate"));
        }
    }

    let mut seen = BTreeSet::new();
    for m in &dataset.crossbeds {
        let label = format!("crossbed {}", m.id);
        if !seen.insert(&m.id) {
            findings.push(Finding::error(&label, "duplicate id"));
        }
        if !(0.0..360.0).contains(&m.dip_azimuth_deg) {
            findings.push(Finding::error(&label, "dip_azimuth_deg outside [0, 360)"));
        }
        if !(0.0..=90.0).contains(&m.dip_angle_deg) {
            findings.push(Finding::error(&label, "dip_angle_deg outside [0, 90]"));
        }
        if !m.source_points.is_empty() && m.source_points.len() < 3 {
            findings.push(Finding::error(&label, "source_points.len < 3"));
        }
        if !finite_point(&m.centroid) || !m.source_points.iter().all(finite_point) {
            findings.push(Finding::error(&label, "non-finite coordinate"));
        }
    }

    findings
}

/// Checks the rock catalog invariants.
pub fn validate_rock_catalog(catalog: &[RockType]) -> Vec<Finding> {
    let mut findings = Vec::new();
    let mut seen = BTreeSet::new();
    for rock in catalog {
        let label = format!("rock type {}", rock.id);
        if !seen.insert(&rock.id) {
            findings.push(Finding::error(&label, "duplicate id"));
        }
        if !(rock.grain_size_mm > 0.0 && rock.grain_size_mm.is_finite()) {
            findings.push(Finding::error(&label, "grain_size_mm must be > 0"));
        } else if (rock.phi - krumbein_phi(rock.grain_size_mm)).abs() > 1e-9 {
            findings.push(Finding::error(&label, "phi != -log2(grain_size_mm)"));
        }
    }
    findings
}

#[cfg(test)]
mod tests {
    use super::*;

    fn contact(id: &str, points: Vec<Point3>) -> Contact {
        Contact {
            id: id.into(),
            name: id.to_owned(),
            rank: 0,
            color: Rgb::new(200, 30, 30),
            line_weight: 1.5,
            points,
            uncertain: false,
        }
    }

    #[test]
    fn one_point_contact_is_reported() {
        let dataset = Dataset {
            contacts: vec![contact("X", vec![Point3::origin()])],
            ..Default::default()
        };
        let findings = validate_dataset(&dataset);
        assert_eq!(findings.len(), 1);
        assert_eq!(findings[0].to_string(), "contact X: points.len < 2");
        assert!(findings[0].is_error());
    }

    #[test]
    fn duplicate_contact_id_is_reported() {
        let pts = vec![Point3::origin(), Point3::new(1.0, 0.0, 0.0)];
        let dataset = Dataset {
            contacts: vec![contact("a", pts.clone()), contact("a", pts)],
            ..Default::default()
        };
        let findings = validate_dataset(&dataset);
        assert_eq!(findings.len(), 1);
        assert!(findings[0].message.contains("duplicate id"));
    }

    #[test]
    fn crossbed_ranges_are_checked() {
        let dataset = Dataset {
            crossbeds: vec![CrossBedMeasurement {
                id: "m".into(),
                source_points: vec![Point3::origin(); 2],
                dip_azimuth_deg: 360.0,
                dip_angle_deg: 91.0,
                centroid: Point3::origin(),
            }],
            ..Default::default()
        };
        assert_eq!(validate_dataset(&dataset).len(), 3);
    }

    #[test]
    fn catalog_has_eight_classes_with_decreasing_phi() {
        let catalog = default_rock_catalog();
        assert_eq!(catalog.len(), 8);
        assert!(catalog.windows(2).all(|w| w[0].phi > w[1].phi));
        assert!(validate_rock_catalog(&catalog).is_empty());

        let clay = &catalog[0];
        assert_eq!(clay.grain_size_mm, 0.002);
        assert!((clay.phi - 8.965_784_284_662_087).abs() < 1e-9);

        let coarse = catalog.iter().find(|r| r.grain_size_mm == 1.0).unwrap();
        assert_eq!(coarse.phi, 0.0);

        let cobble = catalog.last().unwrap();
        assert_eq!(cobble.grain_size_mm, 63.0);
        assert!((cobble.phi + 5.977_279_923_499_917).abs() < 1e-9);
    }

    #[test]
    fn rgb_round_trips_through_hex() {
        let c: Rgb = "#ff7f0e".parse().unwrap();
        assert_eq!(c, Rgb::new(255, 127, 14));
        assert_eq!(c.to_string(), "#ff7f0e");
        assert!("ff7f0e".parse::<Rgb>().is_err());
        assert!("#ff7f0".parse::<Rgb>().is_err());
    }

    #[test]
    fn stratum_ids_follow_bounds() {
        let a = ContactId::from("c1");
        assert_eq!(StratumId::from_bounds(None, Some(&a)).as_str(), "..c1");
        assert_eq!(StratumId::from_bounds(Some(&a), None).as_str(), "c1..");
        assert_eq!(StratumId::from_bounds(None, None).as_str(), "..");
    }

    #[test]
    fn unlisted_segment_pairs_default_to_dashed() {
        let refs = ["l1", "l2", "l3"]
            .iter()
            .map(|l| ContactRef {
                log_id: (*l).into(),
                contact_id: "c".into(),
            })
            .collect();
        let corr = Correlation {
            id: "k".into(),
            contact_refs: refs,
            segment_uncertain: vec![false, true],
            color: None,
        };
        assert!(!corr.is_segment_uncertain(&"l2".into(), &"l1".into()));
        assert!(corr.is_segment_uncertain(&"l2".into(), &"l3".into()));
        assert!(corr.is_segment_uncertain(&"l1".into(), &"l3".into()));
    }
}
