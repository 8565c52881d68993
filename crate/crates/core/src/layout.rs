//! Panel geometry as plain data.
//!
//! All vertical coordinates here are panel pixels growing upward; the
//! renderer flips them into SVG space. A single `px_per_meter` scale is
//! shared by every log.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::circstats::RoseDiagram;
use crate::geom::horizontal_distance;
use crate::model::{ContactId, CorrelationId, GeoLog, LogId, Panel, Rgb, RockType, StratumId};
use crate::project::Project;
use crate::strata::Stratum;

/// Endpoint ys closer than this draw as a straight connection.
pub const STRAIGHT_TOLERANCE_PX: f64 = 1e-9;
/// Clip margin above and below a log, as a fraction of its pick span.
pub const CLIP_MARGIN_FRACTION: f64 = 0.05;
/// Clip margin for logs with fewer than two picks.
pub const MIN_CLIP_MARGIN_M: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum LayoutError {
    #[error("unknown correlation {0}")]
    UnknownCorrelation(CorrelationId),
    #[error("unknown log {0}")]
    UnknownLog(LogId),
    #[error("log order is not a permutation of the project's logs")]
    NotAPermutation,
    #[error("baseline correlation {0} joins fewer than two laid-out logs")]
    BaselineTooSmall(CorrelationId),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PanelStyle {
    pub px_per_meter: f64,
    pub log_gap_px: f64,
    pub primary_width_px: f64,
    pub secondary_width_px: f64,
    pub column_gap_px: f64,
    /// Narrowest drawn rock column, as a fraction of `primary_width_px`.
    pub min_grain_width: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub rose_radius_px: f64,
    pub margin_px: f64,
    pub header_px: f64,
    pub title_font_px: f64,
    pub label_font_px: f64,
    pub secondary_log_level: usize,
}

impl Default for PanelStyle {
    fn default() -> Self {
        Self {
            px_per_meter: 20.0,
            log_gap_px: 120.0,
            primary_width_px: 110.0,
            secondary_width_px: 22.0,
            column_gap_px: 4.0,
            min_grain_width: 0.05,
            phi_min: -6.0,
            phi_max: 9.0,
            rose_radius_px: 22.0,
            margin_px: 30.0,
            header_px: 60.0,
            title_font_px: 14.0,
            label_font_px: 11.0,
            secondary_log_level: 1,
        }
    }
}

impl PanelStyle {
    fn primary_left(&self) -> f64 {
        self.secondary_width_px + self.column_gap_px
    }

    fn rose_lane(&self) -> f64 {
        self.column_gap_px * 2.0 + self.rose_radius_px * 2.0
    }

    /// Horizontal extent of one log including its rose lane.
    pub fn log_width_px(&self) -> f64 {
        self.primary_left() + self.primary_width_px + self.rose_lane()
    }
}

/// Axis-aligned box; `y` is the bottom edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Rect {
    pub x: f64,
    pub y: f64,
    pub w: f64,
    pub h: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StratumBox {
    pub stratum_id: StratumId,
    pub rect: Rect,
    pub rock_type_id: Option<crate::model::RockTypeId>,
    /// `None` draws the stratum white (no rock type yet).
    pub fill: Option<Rgb>,
    pub rock_type_uncertain: bool,
    pub lower_contact_id: Option<ContactId>,
    pub upper_contact_id: Option<ContactId>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContactLine {
    pub contact_id: ContactId,
    pub y: f64,
    pub x_start: f64,
    pub x_end: f64,
    pub color: Rgb,
    pub line_weight: f64,
    pub uncertain: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RosePlacement {
    pub stratum_id: StratumId,
    pub cx: f64,
    pub cy: f64,
    pub radius: f64,
    pub diagram: RoseDiagram,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LogLayout {
    pub log_id: LogId,
    pub name: String,
    pub x_origin_px: f64,
    pub y_offset_px: f64,
    /// Right edge of the primary column, where correlations leave the log.
    pub primary_right_px: f64,
    pub bottom_px: f64,
    pub top_px: f64,
    pub secondary: Vec<StratumBox>,
    pub strata: Vec<StratumBox>,
    pub contacts: Vec<ContactLine>,
    pub roses: Vec<RosePlacement>,
}

impl LogLayout {
    pub fn contact_y(&self, contact: &ContactId) -> Option<f64> {
        self.contacts
            .iter()
            .find(|c| &c.contact_id == contact)
            .map(|c| c.y)
    }

    pub fn center_x(&self) -> f64 {
        (self.x_origin_px + self.primary_right_px) / 2.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Ruler {
    pub left_log: LogId,
    pub right_log: LogId,
    pub distance_m: f64,
    pub x_start: f64,
    pub x_end: f64,
    pub y: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentShape {
    Straight,
    Curved,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationSegment {
    pub left_log: LogId,
    pub right_log: LogId,
    pub start: [f64; 2],
    pub end: [f64; 2],
    pub shape: SegmentShape,
    pub dashed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationPath {
    pub correlation_id: CorrelationId,
    pub color: Rgb,
    pub segments: Vec<CorrelationSegment>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Bounds {
    pub x_min: f64,
    pub x_max: f64,
    pub y_min: f64,
    pub y_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PanelLayout {
    pub style: PanelStyle,
    pub logs: Vec<LogLayout>,
    pub rulers: Vec<Ruler>,
    pub correlations: Vec<CorrelationPath>,
    /// Extent of everything drawn, header included.
    pub bounds: Bounds,
    /// y of the name row and the ruler row, in panel pixels.
    pub name_y: f64,
    pub ruler_y: f64,
}

impl PanelLayout {
    pub fn log(&self, id: &LogId) -> Option<&LogLayout> {
        self.logs.iter().find(|l| &l.log_id == id)
    }
}

/// Fraction of the primary column a rock type fills; coarser grains (lower
/// phi) are wider.
pub fn grain_width(rock: &RockType, style: &PanelStyle) -> f64 {
    ((style.phi_max - rock.phi) / (style.phi_max - style.phi_min)).clamp(0.0, 1.0)
}

fn find_log<'a>(logs: &'a [GeoLog], id: &LogId) -> Result<&'a GeoLog, LayoutError> {
    logs.iter()
        .find(|l| &l.id == id)
        .ok_or_else(|| LayoutError::UnknownLog(id.clone()))
}

/// Vertical offset of every log in `panel.log_order`.
///
/// By default a log sits at its reference-plane elevation, so a contact
/// lands at `px_per_meter * (anchor_elevation + true_height)`. With a
/// leveling correlation, every log holding one of its contacts is shifted
/// so those contacts share the y of the first such log in panel order.
pub fn compute_offsets(
    panel: &Panel,
    logs: &[GeoLog],
) -> Result<BTreeMap<LogId, f64>, LayoutError> {
    let scale = panel.style.px_per_meter;
    let mut offsets = BTreeMap::new();
    for id in &panel.log_order {
        let log = find_log(logs, id)?;
        offsets.insert(id.clone(), scale * log.anchor_elevation_m);
    }

    let Some(baseline_id) = &panel.leveling else {
        return Ok(offsets);
    };
    let baseline = panel
        .correlation(baseline_id)
        .ok_or_else(|| LayoutError::UnknownCorrelation(baseline_id.clone()))?;

    let mut anchored = Vec::new();
    for id in &panel.log_order {
        let log = find_log(logs, id)?;
        let height = baseline
            .contact_in(id)
            .and_then(|c| log.pick(c))
            .map(|p| p.true_height_m);
        if let Some(h) = height {
            anchored.push((id, h));
        }
    }
    if anchored.len() < 2 {
        return Err(LayoutError::BaselineTooSmall(baseline_id.clone()));
    }
    let (first, h0) = anchored[0];
    let target = offsets[first] + scale * h0;
    for (id, h) in anchored {
        offsets.insert(id.clone(), target - scale * h);
    }
    Ok(offsets)
}

/// Returns the panel with its logs in `new_order`.
pub fn reorder_logs(panel: &Panel, new_order: &[LogId]) -> Result<Panel, LayoutError> {
    let current: BTreeSet<_> = panel.log_order.iter().collect();
    let proposed: BTreeSet<_> = new_order.iter().collect();
    if new_order.len() != panel.log_order.len()
        || proposed.len() != new_order.len()
        || current != proposed
    {
        return Err(LayoutError::NotAPermutation);
    }
    Ok(Panel {
        log_order: new_order.to_vec(),
        ..panel.clone()
    })
}

/// Horizontal distance between the reference-plane origins of each pair
/// of adjacent logs; logs missing from `logs` are skipped.
pub fn ruler_distances(panel: &Panel, logs: &[GeoLog]) -> Vec<f64> {
    let ordered: Vec<_> = panel
        .log_order
        .iter()
        .filter_map(|id| find_log(logs, id).ok())
        .collect();
    ordered
        .windows(2)
        .map(|w| horizontal_distance(&w[0].reference_plane.origin, &w[1].reference_plane.origin))
        .collect()
}

/// One connection per pair of participating logs that are adjacent in the
/// panel; participants further apart are not connected.
pub fn correlation_paths(panel: &Panel, layout: &PanelLayout) -> Vec<CorrelationPath> {
    let position = |id: &LogId| layout.logs.iter().position(|l| &l.log_id == id);
    panel
        .correlations
        .iter()
        .map(|corr| {
            let mut members: Vec<(usize, &LogLayout, f64)> = corr
                .contact_refs
                .iter()
                .filter_map(|r| {
                    let idx = position(&r.log_id)?;
                    let log = &layout.logs[idx];
                    Some((idx, log, log.contact_y(&r.contact_id)?))
                })
                .collect();
            members.sort_by_key(|m| m.0);

            let segments = members
                .windows(2)
                .filter(|w| w[1].0 == w[0].0 + 1)
                .map(|w| {
                    let (_, left, y0) = w[0];
                    let (_, right, y1) = w[1];
                    CorrelationSegment {
                        left_log: left.log_id.clone(),
                        right_log: right.log_id.clone(),
                        start: [left.primary_right_px, y0],
                        end: [right.x_origin_px, y1],
                        shape: if (y1 - y0).abs() <= STRAIGHT_TOLERANCE_PX {
                            SegmentShape::Straight
                        } else {
                            SegmentShape::Curved
                        },
                        dashed: corr.is_segment_uncertain(&left.log_id, &right.log_id),
                    }
                })
                .collect();

            let color = corr.color.unwrap_or_else(|| {
                members
                    .first()
                    .and_then(|(_, log, _)| {
                        let contact = corr.contact_in(&log.log_id)?;
                        log.contacts.iter().find(|c| &c.contact_id == contact)
                    })
                    .map(|c| c.color)
                    .unwrap_or(Rgb::BLACK)
            });
            CorrelationPath {
                correlation_id: corr.id.clone(),
                color,
                segments,
            }
        })
        .collect()
}

/// Clipped `(low, high)` true-height extent drawn for a log.
fn clip_extent(log: &GeoLog) -> (f64, f64) {
    match (log.picks.first(), log.picks.last()) {
        (Some(lo), Some(hi)) if log.picks.len() > 1 => {
            let span = hi.true_height_m - lo.true_height_m;
            let margin = CLIP_MARGIN_FRACTION * span;
            (lo.true_height_m - margin, hi.true_height_m + margin)
        }
        (Some(only), _) => (
            only.true_height_m - MIN_CLIP_MARGIN_M,
            only.true_height_m + MIN_CLIP_MARGIN_M,
        ),
        _ => (-MIN_CLIP_MARGIN_M, MIN_CLIP_MARGIN_M),
    }
}

fn clipped(stratum: &Stratum, extent: (f64, f64)) -> (f64, f64) {
    let iv = stratum.height_interval;
    (iv.low.max(extent.0), iv.high.min(extent.1))
}

fn layout_log(
    project: &Project,
    log: &GeoLog,
    x_origin: f64,
    offset: f64,
) -> LogLayout {
    let style = &project.panel.style;
    let scale = style.px_per_meter;
    let extent = clip_extent(log);
    let primary_x = x_origin + style.primary_left();
    let primary_right = primary_x + style.primary_width_px;

    let strata = log
        .tree
        .leaves()
        .into_iter()
        .map(|leaf| {
            let (low, high) = clipped(leaf, extent);
            let rock = leaf
                .rock_type_id
                .as_ref()
                .and_then(|id| project.panel.rock_type(id));
            let fraction = rock
                .map(|r| grain_width(r, style).max(style.min_grain_width))
                .unwrap_or(1.0);
            StratumBox {
                stratum_id: leaf.id.clone(),
                rect: Rect {
                    x: primary_x,
                    y: offset + scale * low,
                    w: fraction * style.primary_width_px,
                    h: scale * (high - low),
                },
                rock_type_id: leaf.rock_type_id.clone(),
                fill: rock.map(|r| r.color),
                rock_type_uncertain: leaf.rock_type_uncertain,
                lower_contact_id: leaf.lower_contact_id.clone(),
                upper_contact_id: leaf.upper_contact_id.clone(),
            }
        })
        .collect();

    let cut = log.tree.cut_at_level(style.secondary_log_level);
    let secondary = cut
        .iter()
        .map(|s| {
            let (low, high) = clipped(s, extent);
            StratumBox {
                stratum_id: s.id.clone(),
                rect: Rect {
                    x: x_origin,
                    y: offset + scale * low,
                    w: style.secondary_width_px,
                    h: scale * (high - low),
                },
                rock_type_id: None,
                fill: None,
                rock_type_uncertain: false,
                lower_contact_id: s.lower_contact_id.clone(),
                upper_contact_id: s.upper_contact_id.clone(),
            }
        })
        .collect();

    let roses = cut
        .iter()
        .filter_map(|s| {
            let azimuths = log
                .tree
                .aggregate_azimuths(&s.id, &project.dataset.crossbeds)
                .ok()?;
            if azimuths.is_empty() {
                return None;
            }
            let (low, high) = clipped(s, extent);
            Some(RosePlacement {
                stratum_id: s.id.clone(),
                cx: primary_right + style.column_gap_px * 2.0 + style.rose_radius_px,
                cy: offset + scale * (low + high) / 2.0,
                radius: style.rose_radius_px,
                diagram: RoseDiagram::from_azimuths(&azimuths),
            })
        })
        .collect();

    let contacts = log
        .picks
        .iter()
        .map(|pick| {
            let contact = project.dataset.contact(&pick.contact_id);
            ContactLine {
                contact_id: pick.contact_id.clone(),
                y: offset + scale * pick.true_height_m,
                x_start: x_origin,
                x_end: primary_right,
                color: contact.map(|c| c.color).unwrap_or(Rgb::BLACK),
                line_weight: contact.map(|c| c.line_weight).unwrap_or(1.0),
                uncertain: contact.is_some_and(|c| c.uncertain),
            }
        })
        .collect();

    LogLayout {
        log_id: log.id.clone(),
        name: log.name.clone(),
        x_origin_px: x_origin,
        y_offset_px: offset,
        primary_right_px: primary_right,
        bottom_px: offset + scale * extent.0,
        top_px: offset + scale * extent.1,
        secondary,
        strata,
        contacts,
        roses,
    }
}

/// Lays out the whole panel.
pub fn compute_layout(project: &Project) -> Result<PanelLayout, LayoutError> {
    let panel = &project.panel;
    let style = &panel.style;
    let ids: BTreeSet<_> = project.logs.iter().map(|l| &l.id).collect();
    let ordered: BTreeSet<_> = panel.log_order.iter().collect();
    if ids != ordered || ordered.len() != panel.log_order.len() {
        return Err(LayoutError::NotAPermutation);
    }

    let offsets = compute_offsets(panel, &project.logs)?;
    let stride = style.log_width_px() + style.log_gap_px;
    let logs: Vec<LogLayout> = panel
        .log_order
        .iter()
        .enumerate()
        .map(|(i, id)| {
            let log = find_log(&project.logs, id)?;
            let x = style.margin_px + stride * i as f64;
            Ok(layout_log(project, log, x, offsets[id]))
        })
        .collect::<Result<_, LayoutError>>()?;

    let mut y_min = f64::INFINITY;
    let mut y_max = f64::NEG_INFINITY;
    for log in &logs {
        y_min = y_min.min(log.bottom_px);
        y_max = y_max.max(log.top_px);
        for rose in &log.roses {
            y_min = y_min.min(rose.cy - rose.radius);
            y_max = y_max.max(rose.cy + rose.radius);
        }
    }
    if logs.is_empty() {
        y_min = 0.0;
        y_max = 0.0;
    }
    let ruler_y = y_max + style.header_px * 0.3;
    let name_y = y_max + style.header_px * 0.65;

    let distances = ruler_distances(panel, &project.logs);
    let rulers = logs
        .windows(2)
        .zip(distances)
        .map(|(w, distance_m)| Ruler {
            left_log: w[0].log_id.clone(),
            right_log: w[1].log_id.clone(),
            distance_m,
            x_start: w[0].center_x(),
            x_end: w[1].center_x(),
            y: ruler_y,
        })
        .collect();

    let n = logs.len() as f64;
    let content_w = if logs.is_empty() {
        0.0
    } else {
        n * style.log_width_px() + (n - 1.0) * style.log_gap_px
    };
    let mut layout = PanelLayout {
        style: style.clone(),
        logs,
        rulers,
        correlations: Vec::new(),
        bounds: Bounds {
            x_min: 0.0,
            x_max: content_w + 2.0 * style.margin_px,
            y_min: y_min - style.margin_px,
            y_max: y_max + style.header_px + style.margin_px,
        },
        name_y,
        ruler_y,
    };
    layout.correlations = correlation_paths(panel, &layout);
    Ok(layout)
}
