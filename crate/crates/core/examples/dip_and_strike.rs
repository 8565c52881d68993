//! Fits a plane to noisy samples of a known dipping surface and reports
//! dip, dip azimuth and strike, then measures a true thickness.
//!
//! ```text
//! cargo run -p corrpanel-core --example dip_and_strike
//! ```

use corrpanel_core::geom::{dip_and_strike, fit_plane, true_height, Plane, Point3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn main() {
    let truth = Plane::from_dip(Point3::new(0.0, 0.0, 100.0), 25.0, 135.0);
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let noise = Normal::new(0.0, 0.01).unwrap();

    // sample the true plane over a 10 m square and perturb vertically
    let n = truth.normal;
    let points: Vec<Point3> = (0..200)
        .map(|_| {
            let x: f64 = rng.random_range(-5.0..5.0);
            let y: f64 = rng.random_range(-5.0..5.0);
            let z = 100.0 - (n.x * x + n.y * y) / n.z;
            Point3::new(x, y, z + noise.sample(&mut rng))
        })
        .collect();

    let plane = fit_plane(&points).expect("well-spread samples");
    let ds = dip_and_strike(&plane);
    println!("fitted normal   {:.5} {:.5} {:.5}", plane.normal.x, plane.normal.y, plane.normal.z);
    println!("rms residual    {:.4} m", plane.rms_residual_m);
    println!("dip             {:.2} deg (true 25)", ds.dip_angle_deg);
    println!("dip azimuth     {:.2} deg (true 135)", ds.dip_azimuth_deg.unwrap_or(f64::NAN));
    println!("strike          {:.2} deg", ds.strike_azimuth_deg.unwrap_or(f64::NAN));

    // a point 3 m straight above the origin is 3 cos(dip) m above the bed
    let above = Point3::new(0.0, 0.0, 103.0);
    println!(
        "true height of a point 3 m above the origin: {:.4} m (3 cos 25 = {:.4})",
        true_height(&plane, &above),
        3.0 * 25f64.to_radians().cos()
    );
}
