//! Bins paleocurrent azimuths into a 24-sector rose and reports the
//! circular mean and area-true sector radii.
//!
//! ```text
//! cargo run -p corrpanel-core --example rose_diagram
//! ```

use corrpanel_core::circstats::{RoseDiagram, BIN_WIDTH_DEG};

fn main() {
    let azimuths = [350.0, 355.0, 2.0, 10.0, 14.9, 15.0, 20.0, 40.0, 185.0];
    let rose = RoseDiagram::from_azimuths(&azimuths);
    let radii = rose.radii(22.0);
    println!("{} measurements", rose.total);
    for (k, (&count, r)) in rose.bin_counts.iter().zip(radii).enumerate() {
        if count > 0 {
            let lo = k as f64 * BIN_WIDTH_DEG;
            println!("[{lo:>5.1}, {:>5.1})  {count}  r = {r:.2} px", lo + BIN_WIDTH_DEG);
        }
    }
    match rose.mean_azimuth_deg {
        Some(mean) => println!("mean direction {mean:.1} deg"),
        None => println!("mean direction undefined"),
    }
    let opposed = RoseDiagram::from_azimuths(&[0.0, 180.0]);
    println!("mean of 0 and 180: {:?}", opposed.mean_azimuth_deg);
}
