use std::collections::BTreeSet;

use corrpanel_core::fixture::{self, *};
use corrpanel_core::geom::{horizontal_distance, Point3};
use corrpanel_core::io;
use corrpanel_core::layout::ruler_distances;
use corrpanel_core::render::project_outcrop_strip;

#[test]
fn campaign_has_the_documented_scale() {
    let project = canyon_project();
    assert_eq!(project.logs.len(), LOG_NAMES.len());
    assert_eq!(project.dataset.contacts.len(), CONTACT_COUNT);
    assert_eq!(project.dataset.crossbeds.len(), CROSSBED_COUNT);
    assert_eq!(project.panel.correlations.len(), CORRELATION_COUNT);

    let picks: usize = project.logs.iter().map(|l| l.picks.len()).sum();
    assert_eq!(picks, CONTACT_COUNT);

    let leaves: Vec<_> = project.logs.iter().flat_map(|l| l.tree.leaves()).collect();
    let bounded = leaves.iter().filter(|s| s.height_interval.is_bounded()).count();
    assert_eq!(bounded, BOUNDED_STRATA_COUNT);
    assert!(leaves
        .iter()
        .filter(|s| s.height_interval.is_bounded())
        .all(|s| s.rock_type_id.is_some()));

    let with_crossbeds = leaves.iter().filter(|s| !s.crossbed_ids.is_empty()).count();
    assert_eq!(with_crossbeds, CROSSBED_STRATA_COUNT);
    let assigned: BTreeSet<_> = leaves.iter().flat_map(|s| s.crossbed_ids.iter()).collect();
    assert_eq!(assigned.len(), CROSSBED_COUNT);
}

#[test]
fn project_is_valid() {
    let findings = canyon_project().validate();
    assert!(findings.is_empty(), "{findings:?}");
}

#[test]
fn adjacent_anchors_have_the_documented_spacing() {
    let project = canyon_project();
    let distances = ruler_distances(&project.panel, &project.logs);
    assert_eq!(distances.len(), ANCHOR_SPACING_M.len());
    for (d, expected) in distances.iter().zip(ANCHOR_SPACING_M) {
        assert!((d - expected).abs() < 1e-3, "{d} vs {expected}");
    }
}

#[test]
fn picks_are_sorted_and_match_the_tree() {
    for log in canyon_project().logs {
        assert!(log.picks.windows(2).all(|w| w[0].true_height_m < w[1].true_height_m));
        assert_eq!(log.tree.leaf_count(), log.picks.len() + 1);
    }
}

#[test]
fn generation_is_deterministic() {
    assert_eq!(canyon_dataset(), canyon_dataset());
    let a = io::save_project(&canyon_project());
    let b = io::save_project(&canyon_project());
    assert_eq!(a, b);
}

#[test]
fn checked_in_files_match_the_generator() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let project = fixture::canyon_project();
    let dataset = std::fs::read_to_string(dir.join("canyon-dataset.json")).unwrap();
    let stored = std::fs::read_to_string(dir.join("canyon-project.json")).unwrap();
    assert_eq!(dataset, io::save_dataset(&project.dataset));
    assert_eq!(stored, io::save_project(&project));
}

#[test]
fn checked_in_dataset_loads_with_all_contacts() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let dataset = io::load_dataset(&std::fs::read(dir.join("canyon-dataset.json")).unwrap()).unwrap();
    assert_eq!(dataset.contacts.len(), 62);
}

/// Width of the outcrop strip equals the largest pairwise separation along
/// the principal axis, found here by scanning directions for maximum
/// variance instead of an eigen solve.
#[test]
fn strip_width_matches_brute_force_projection() {
    let dataset = canyon_dataset();
    let w1: Vec<_> = dataset
        .contacts
        .iter()
        .filter(|c| c.id.as_str().starts_with("w1-"))
        .cloned()
        .collect();
    let strip = project_outcrop_strip(&w1).unwrap();
    let s: Vec<f64> = strip.iter().flat_map(|p| p.points.iter().map(|q| q[0])).collect();
    let width = s.iter().cloned().fold(f64::MIN, f64::max) - s.iter().cloned().fold(f64::MAX, f64::min);

    let points: Vec<Point3> = w1.iter().flat_map(|c| c.points.iter().copied()).collect();
    let n = points.len() as f64;
    let (mx, my) = (
        points.iter().map(|p| p.x).sum::<f64>() / n,
        points.iter().map(|p| p.y).sum::<f64>() / n,
    );
    let mut best = (f64::MIN, 0.0);
    for step in 0..180_000 {
        let theta = (step as f64 / 1000.0).to_radians();
        let (ax, ay) = (theta.cos(), theta.sin());
        let var: f64 = points.iter().map(|p| ((p.x - mx) * ax + (p.y - my) * ay).powi(2)).sum();
        if var > best.0 {
            best = (var, theta);
        }
    }
    let (ax, ay) = (best.1.cos(), best.1.sin());
    let mut extent: f64 = 0.0;
    for p in &points {
        for q in &points {
            extent = extent.max(((p.x - q.x) * ax + (p.y - q.y) * ay).abs());
        }
    }
    assert!((width - extent).abs() < 1e-3, "{width} vs {extent}");
    // the face is 20 m of wall with a small bow
    let span = points.iter().map(|p| horizontal_distance(p, &points[0])).fold(0.0, f64::max);
    assert!(width <= span + 1e-9);
}
