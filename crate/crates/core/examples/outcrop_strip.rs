//! Flattens one outcrop's contacts onto the principal horizontal direction
//! of the face, the 2D view used for picking.
//!
//! ```text
//! cargo run -p corrpanel-core --example outcrop_strip
//! ```

use corrpanel_core::fixture::canyon_dataset;
use corrpanel_core::render::project_outcrop_strip;

fn main() {
    let dataset = canyon_dataset();
    let face: Vec<_> = dataset
        .contacts
        .iter()
        .filter(|c| c.id.as_str().starts_with("w2-"))
        .cloned()
        .collect();
    let strip = project_outcrop_strip(&face).expect("face is not a single vertical line");
    for line in &strip {
        let (s0, z0) = (line.points[0][0], line.points[0][1]);
        let (s1, z1) = (line.points[line.points.len() - 1][0], line.points[line.points.len() - 1][1]);
        println!("{:<10} {} s {:>8.2} .. {:>8.2}  z {:>8.2} .. {:>8.2}", line.contact_id, line.color, s0, s1, z0, z1);
    }
}
