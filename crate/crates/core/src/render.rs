//! Deterministic SVG output for a [`PanelLayout`], and the 2D outcrop
//! strip used by the picking view.
//!
//! The document uses a small SVG 1.1 subset (`g`, `rect`, `path`, `line`,
//! `circle`, `text`) with presentation attributes only, so it opens in any
//! vector editor. Every interactive element carries a `data-` attribute
//! holding its model id.

use std::fmt::{self, Write};

use serde::Serialize;

use crate::circstats::BIN_WIDTH_DEG;
use crate::geom::{principal_horizontal_axis, GeomError};
use crate::layout::{CorrelationPath, LogLayout, PanelLayout, RosePlacement, SegmentShape};
use crate::model::{Contact, ContactId, Panel, Rgb};

/// Dash pattern for every uncertainty marker.
pub const DASH_PATTERN: &str = "6,4";

const ROSE_FILL: &str = "#808080";
const MEAN_COLOR: &str = "#ff0000";
const SECONDARY_FILL: &str = "#eeeeee";
const AXIS_COLOR: &str = "#000000";

/// Fixed-precision coordinate formatting; `-0` prints as `0`.
struct Num(f64);

impl fmt::Display for Num {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = format!("{:.2}", self.0);
        let s = s.trim_end_matches('0').trim_end_matches('.');
        if s == "-0" {
            f.write_str("0")
        } else {
            f.write_str(s)
        }
    }
}

struct Esc<'a>(&'a str);

impl fmt::Display for Esc<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.0.chars() {
            match c {
                '&' => f.write_str("&amp;")?,
                '<' => f.write_str("&lt;")?,
                '>' => f.write_str("&gt;")?,
                '"' => f.write_str("&quot;")?,
                '\'' => f.write_str("&apos;")?,
                c => f.write_char(c)?,
            }
        }
        Ok(())
    }
}

/// Maps panel y (up) to SVG y (down).
struct Canvas {
    y_top: f64,
}

impl Canvas {
    fn y(&self, y: f64) -> Num {
        Num(self.y_top - y)
    }
}

fn dash(uncertain: bool) -> String {
    if uncertain {
        format!(" stroke-dasharray=\"{DASH_PATTERN}\"")
    } else {
        String::new()
    }
}

/// Renders the panel. Identical inputs give byte-identical output.
pub fn render_panel(panel: &Panel, layout: &PanelLayout) -> String {
    let mut out = String::new();
    write_panel(&mut out, panel, layout).expect("writing to a String cannot fail");
    out
}

fn write_panel(out: &mut String, panel: &Panel, layout: &PanelLayout) -> fmt::Result {
    let b = layout.bounds;
    let width = b.x_max - b.x_min;
    let height = b.y_max - b.y_min;
    let canvas = Canvas { y_top: b.y_max };

    writeln!(out, r#"<?xml version="1.0" encoding="UTF-8" standalone="no"?>"#)?;
    writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{w}" height="{h}" viewBox="{x} 0 {w} {h}" data-panel-id="{id}">"#,
        w = Num(width),
        h = Num(height),
        x = Num(b.x_min),
        id = Esc(&panel.id),
    )?;
    writeln!(out, "<defs/>")?;
    writeln!(
        out,
        r##"<rect id="frame" x="{}" y="0" width="{}" height="{}" fill="#ffffff"/>"##,
        Num(b.x_min),
        Num(width),
        Num(height)
    )?;

    write_rulers(out, layout, &canvas)?;
    writeln!(out, r#"<g id="correlations">"#)?;
    for path in &layout.correlations {
        write_correlation(out, path, &canvas)?;
    }
    writeln!(out, "</g>")?;
    for log in &layout.logs {
        write_log(out, log, layout, &canvas)?;
    }
    writeln!(out, "</svg>")
}

fn write_rulers(out: &mut String, layout: &PanelLayout, canvas: &Canvas) -> fmt::Result {
    let style = &layout.style;
    writeln!(out, r#"<g id="rulers">"#)?;
    for (i, ruler) in layout.rulers.iter().enumerate() {
        let y = canvas.y(ruler.y);
        let tick = style.label_font_px * 0.4;
        writeln!(
            out,
            r#"<g id="ruler-{n}" class="ruler" data-left-log="{l}" data-right-log="{r}" data-distance-m="{d}">"#,
            n = i + 1,
            l = Esc(ruler.left_log.as_str()),
            r = Esc(ruler.right_log.as_str()),
            d = Num(ruler.distance_m),
        )?;
        writeln!(
            out,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{AXIS_COLOR}" stroke-width="1"/>"#,
            Num(ruler.x_start),
            Num(ruler.x_end),
        )?;
        for x in [ruler.x_start, ruler.x_end] {
            writeln!(
                out,
                r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="{AXIS_COLOR}" stroke-width="1"/>"#,
                canvas.y(ruler.y + tick),
                canvas.y(ruler.y - tick),
                x = Num(x),
            )?;
        }
        writeln!(
            out,
            r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{}" text-anchor="middle">{} m</text>"#,
            Num((ruler.x_start + ruler.x_end) / 2.0),
            canvas.y(ruler.y + tick * 1.5),
            Num(style.label_font_px),
            ruler.distance_m.round() as i64,
        )?;
        writeln!(out, "</g>")?;
    }
    writeln!(out, "</g>")
}

fn write_correlation(out: &mut String, path: &CorrelationPath, canvas: &Canvas) -> fmt::Result {
    let id = Esc(path.correlation_id.as_str());
    writeln!(
        out,
        r#"<g id="correlation-{id}" class="correlation" data-correlation-id="{id}">"#
    )?;
    for seg in &path.segments {
        let [x0, y0] = seg.start;
        let [x1, y1] = seg.end;
        let d = match seg.shape {
            SegmentShape::Straight => format!(
                "M {} {} L {} {}",
                Num(x0),
                canvas.y(y0),
                Num(x1),
                canvas.y(y1)
            ),
            SegmentShape::Curved => {
                let mid = (x0 + x1) / 2.0;
                format!(
                    "M {} {} C {} {} {} {} {} {}",
                    Num(x0),
                    canvas.y(y0),
                    Num(mid),
                    canvas.y(y0),
                    Num(mid),
                    canvas.y(y1),
                    Num(x1),
                    canvas.y(y1)
                )
            }
        };
        writeln!(
            out,
            r#"<path d="{d}" fill="none" stroke="{c}" stroke-width="1.5"{dash} data-correlation-id="{id}" data-left-log="{l}" data-right-log="{r}" data-shape="{shape}"/>"#,
            c = path.color,
            dash = dash(seg.dashed),
            l = Esc(seg.left_log.as_str()),
            r = Esc(seg.right_log.as_str()),
            shape = match seg.shape {
                SegmentShape::Straight => "straight",
                SegmentShape::Curved => "curved",
            },
        )?;
    }
    writeln!(out, "</g>")
}

fn write_log(out: &mut String, log: &LogLayout, layout: &PanelLayout, canvas: &Canvas) -> fmt::Result {
    let style = &layout.style;
    let id = Esc(log.log_id.as_str());
    writeln!(out, r#"<g id="log-{id}" class="log" data-log-id="{id}">"#)?;
    writeln!(
        out,
        r#"<text x="{}" y="{}" font-family="sans-serif" font-size="{}" font-weight="bold" text-anchor="middle">{}</text>"#,
        Num(log.center_x()),
        canvas.y(layout.name_y),
        Num(style.title_font_px),
        Esc(&log.name),
    )?;

    writeln!(
        out,
        r#"<g class="secondary-log" data-level="{}">"#,
        style.secondary_log_level
    )?;
    for s in &log.secondary {
        let r = s.rect;
        writeln!(
            out,
            r#"<path d="M {x0} {y0} H {x1} V {y1} H {x0} Z" fill="{SECONDARY_FILL}" stroke="{AXIS_COLOR}" stroke-width="0.5" data-stratum-id="{sid}"/>"#,
            x0 = Num(r.x),
            x1 = Num(r.x + r.w),
            y0 = canvas.y(r.y),
            y1 = canvas.y(r.y + r.h),
            sid = Esc(s.stratum_id.as_str()),
        )?;
    }
    writeln!(out, "</g>")?;

    writeln!(out, r#"<g class="primary-log">"#)?;
    for s in &log.strata {
        let r = s.rect;
        let fill = s.fill.unwrap_or(Rgb::WHITE);
        let rock = s
            .rock_type_id
            .as_ref()
            .map(|id| format!(r#" data-rock-type-id="{}""#, Esc(id.as_str())))
            .unwrap_or_default();
        writeln!(
            out,
            r#"<rect x="{}" y="{}" width="{}" height="{}" fill="{fill}" stroke="none" data-stratum-id="{}"{rock}/>"#,
            Num(r.x),
            canvas.y(r.y + r.h),
            Num(r.w),
            Num(r.h),
            Esc(s.stratum_id.as_str()),
        )?;
        writeln!(
            out,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="{AXIS_COLOR}" stroke-width="1"{} class="grain-edge" data-stratum-id="{}"/>"#,
            canvas.y(r.y),
            canvas.y(r.y + r.h),
            dash(s.rock_type_uncertain),
            Esc(s.stratum_id.as_str()),
            x = Num(r.x + r.w),
        )?;
    }
    if let (Some(first), Some(last)) = (log.strata.first(), log.strata.last()) {
        writeln!(
            out,
            r#"<line x1="{x}" y1="{}" x2="{x}" y2="{}" stroke="{AXIS_COLOR}" stroke-width="1" class="log-axis"/>"#,
            canvas.y(first.rect.y),
            canvas.y(last.rect.y + last.rect.h),
            x = Num(first.rect.x),
        )?;
    }
    writeln!(out, "</g>")?;

    writeln!(out, r#"<g class="contacts">"#)?;
    for c in &log.contacts {
        writeln!(
            out,
            r#"<line x1="{}" y1="{y}" x2="{}" y2="{y}" stroke="{}" stroke-width="{}"{} data-contact-id="{}"/>"#,
            Num(c.x_start),
            Num(c.x_end),
            c.color,
            Num(c.line_weight),
            dash(c.uncertain),
            Esc(c.contact_id.as_str()),
            y = canvas.y(c.y),
        )?;
    }
    writeln!(out, "</g>")?;

    for rose in &log.roses {
        write_rose(out, log, rose, canvas)?;
    }
    writeln!(out, "</g>")
}

fn write_rose(out: &mut String, log: &LogLayout, rose: &RosePlacement, canvas: &Canvas) -> fmt::Result {
    let cx = rose.cx;
    let cy = canvas.y(rose.cy);
    // compass azimuth to SVG: north is up, angles run clockwise
    let at = |azimuth: f64, r: f64| {
        let (s, c) = azimuth.to_radians().sin_cos();
        (Num(cx + r * s), canvas.y(rose.cy + r * c))
    };
    writeln!(
        out,
        r#"<g id="rose-{log}-{sid}" class="rose" data-stratum-id="{sid}" data-count="{n}">"#,
        log = Esc(log.log_id.as_str()),
        sid = Esc(rose.stratum_id.as_str()),
        n = rose.diagram.total,
    )?;
    writeln!(
        out,
        r##"<circle cx="{}" cy="{cy}" r="{}" fill="none" stroke="#999999" stroke-width="0.5"/>"##,
        Num(cx),
        Num(rose.radius),
    )?;
    for (k, &r) in rose.diagram.radii(rose.radius).iter().enumerate() {
        if r <= 0.0 {
            continue;
        }
        let a0 = k as f64 * BIN_WIDTH_DEG;
        let (x0, y0) = at(a0, r);
        let (x1, y1) = at(a0 + BIN_WIDTH_DEG, r);
        writeln!(
            out,
            r##"<path d="M {} {cy} L {x0} {y0} A {r} {r} 0 0 1 {x1} {y1} Z" fill="{ROSE_FILL}" fill-opacity="0.5" stroke="#404040" stroke-width="0.5" data-bin="{k}"/>"##,
            Num(cx),
            r = Num(r),
        )?;
    }
    if let Some(mean) = rose.diagram.mean_azimuth_deg {
        let (x, y) = at(mean, rose.radius);
        writeln!(
            out,
            r#"<line x1="{}" y1="{cy}" x2="{x}" y2="{y}" stroke="{MEAN_COLOR}" stroke-width="1.5" class="rose-mean"/>"#,
            Num(cx),
        )?;
    }
    writeln!(out, "</g>")
}

/// A contact flattened onto the outcrop strip: `s` runs along the
/// outcrop, `z` is elevation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StripPolyline {
    pub contact_id: ContactId,
    pub color: Rgb,
    pub points: Vec<[f64; 2]>,
}

/// Projects contacts onto the first principal horizontal direction of all
/// their points.
pub fn project_outcrop_strip(contacts: &[Contact]) -> Result<Vec<StripPolyline>, GeomError> {
    let all: Vec<_> = contacts.iter().flat_map(|c| c.points.iter().copied()).collect();
    if !contacts.iter().any(|c| c.points.len() >= 2) {
        return Err(GeomError::TooFewPoints(all.len()));
    }
    let axis = principal_horizontal_axis(&all)?;
    Ok(contacts
        .iter()
        .map(|c| StripPolyline {
            contact_id: c.id.clone(),
            color: c.color,
            points: c
                .points
                .iter()
                .map(|p| [p.x * axis.x + p.y * axis.y, p.z])
                .collect(),
        })
        .collect())
}
