//! Builds a stratum tree from ranked contact picks, prints its levels and
//! aggregates cross-bed azimuths per unit.
//!
//! ```text
//! cargo run -p corrpanel-core --example stratum_tree
//! ```

use std::collections::{BTreeMap, BTreeSet};

use corrpanel_core::geom::Point3;
use corrpanel_core::model::{ContactId, ContactPick, CrossBedId, CrossBedMeasurement};
use corrpanel_core::strata::{Stratum, StratumTree};

fn print(stratum: &Stratum, depth: usize) {
    let i = stratum.height_interval;
    println!("{:indent$}{}  ({}, {}]", "", stratum.id, i.low, i.high, indent = depth * 2);
    for child in &stratum.children {
        print(child, depth + 1);
    }
}

fn main() {
    // unit contacts (rank 0) at 1 m and 4 m, bed contacts (rank 1) between
    let contacts = [("u1", 1.0, 0), ("u2", 4.0, 0), ("b1", 2.0, 1), ("b2", 3.0, 1), ("b3", 5.5, 1)];
    let picks: Vec<ContactPick> = contacts
        .iter()
        .map(|&(id, h, _)| ContactPick {
            contact_id: id.into(),
            point: Point3::new(0.0, 0.0, h),
            true_height_m: h,
        })
        .collect();
    let ranks: BTreeMap<ContactId, u32> = contacts.iter().map(|&(id, _, r)| (id.into(), r)).collect();

    let mut tree = StratumTree::build(&picks, &ranks).expect("distinct heights");
    print(&tree.root, 0);
    println!("leaves: {}, depth: {}", tree.leaf_count(), tree.depth());
    let units: Vec<_> = tree.cut_at_level(1).iter().map(|s| s.id.to_string()).collect();
    println!("units:  {}", units.join("  "));

    let measurements: Vec<CrossBedMeasurement> = [("m1", 80.0), ("m2", 95.0), ("m3", 110.0)]
        .iter()
        .map(|&(id, az)| CrossBedMeasurement {
            id: id.into(),
            source_points: Vec::new(),
            dip_azimuth_deg: az,
            dip_angle_deg: 18.0,
            centroid: Point3::new(0.0, 0.0, 2.5),
        })
        .collect();
    let first: BTreeSet<CrossBedId> = ["m1", "m2"].into_iter().map(Into::into).collect();
    let second: BTreeSet<CrossBedId> = ["m3"].into_iter().map(Into::into).collect();
    tree.assign_crossbeds(&"u1..b1".into(), first, &measurements).unwrap();
    tree.assign_crossbeds(&"b2..u2".into(), second, &measurements).unwrap();
    let unit = "u1..u2".into();
    println!(
        "azimuths aggregated over unit u1..u2: {:?}",
        tree.aggregate_azimuths(&unit, &measurements).unwrap()
    );
}
