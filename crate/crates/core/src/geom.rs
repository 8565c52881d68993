//! Plane fitting, dip and strike, true heights and horizontal distances.
//!
//! Coordinates are local east/north/up meters: `x` points east, `y` north
//! and `z` up. Azimuths are compass degrees, clockwise from north.

use nalgebra::{Matrix2, Matrix3, SymmetricEigen, Vector2};
use serde::{Deserialize, Serialize};

pub type Point3 = nalgebra::Point3<f64>;
pub type Vector3 = nalgebra::Vector3<f64>;

/// Dip angles below this are treated as horizontal (no dip direction).
pub const HORIZONTAL_TOLERANCE_DEG: f64 = 0.5;

const COLLINEAR_TOLERANCE: f64 = 1e-9;
const SIGN_TIE_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("too few points: need at least 3, got {0}")]
    TooFewPoints(usize),
    #[error("degenerate geometry: points are collinear or coincident")]
    DegenerateGeometry,
}

/// A plane through `origin` with an upward-facing unit `normal`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Plane {
    pub origin: Point3,
    pub normal: Vector3,
    pub rms_residual_m: f64,
}

impl Plane {
    /// Builds a plane from a point and any non-zero normal, orienting the
    /// normal upward.
    pub fn new(origin: Point3, normal: Vector3) -> Self {
        Self {
            origin,
            normal: orient_normal(normal.normalize()),
            rms_residual_m: 0.0,
        }
    }

    pub fn horizontal(origin: Point3) -> Self {
        Self::new(origin, Vector3::z())
    }

    /// Plane dipping `dip_deg` toward compass azimuth `azimuth_deg`.
    pub fn from_dip(origin: Point3, dip_deg: f64, azimuth_deg: f64) -> Self {
        let (sd, cd) = dip_deg.to_radians().sin_cos();
        let (sa, ca) = azimuth_deg.to_radians().sin_cos();
        Self::new(origin, Vector3::new(sd * sa, sd * ca, cd))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DipStrike {
    pub dip_angle_deg: f64,
    /// `None` for planes flatter than [`HORIZONTAL_TOLERANCE_DEG`].
    pub dip_azimuth_deg: Option<f64>,
    pub strike_azimuth_deg: Option<f64>,
}

/// Flips `n` so that it points up; vertical normals break the tie on `y`,
/// then on `x`.
fn orient_normal(n: Vector3) -> Vector3 {
    let flip = if n.z.abs() > SIGN_TIE_TOLERANCE {
        n.z < 0.0
    } else if n.y.abs() > SIGN_TIE_TOLERANCE {
        n.y < 0.0
    } else {
        n.x < 0.0
    };
    if flip {
        -n
    } else {
        n
    }
}

fn centroid(points: &[Point3]) -> Point3 {
    let sum = points
        .iter()
        .fold(Vector3::zeros(), |acc, p| acc + p.coords);
    Point3::from(sum / points.len() as f64)
}

/// Total-least-squares plane: the normal is the direction of least variance
/// of the centered points.
pub fn fit_plane(points: &[Point3]) -> Result<Plane, GeomError> {
    if points.len() < 3 {
        return Err(GeomError::TooFewPoints(points.len()));
    }
    let origin = centroid(points);
    let scatter = points.iter().fold(Matrix3::zeros(), |acc, p| {
        let d = p - origin;
        acc + d * d.transpose()
    });

    let eigen = SymmetricEigen::new(scatter);
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| eigen.eigenvalues[a].total_cmp(&eigen.eigenvalues[b]));
    let largest = eigen.eigenvalues[order[2]].max(0.0);
    let middle = eigen.eigenvalues[order[1]].max(0.0);
    if largest == 0.0 || middle.sqrt() <= COLLINEAR_TOLERANCE * largest.sqrt() {
        return Err(GeomError::DegenerateGeometry);
    }

    let normal = orient_normal(eigen.eigenvectors.column(order[0]).normalize());
    let sum_sq: f64 = points
        .iter()
        .map(|p| (p - origin).dot(&normal).powi(2))
        .sum();
    Ok(Plane {
        origin,
        normal,
        rms_residual_m: (sum_sq / points.len() as f64).sqrt(),
    })
}

/// Maps any angle in degrees into `[0, 360)`.
pub fn normalize_azimuth(deg: f64) -> f64 {
    let a = deg.rem_euclid(360.0);
    // rem_euclid rounds tiny negative inputs up to exactly 360
    if a >= 360.0 {
        0.0
    } else {
        a
    }
}

pub fn dip_and_strike(plane: &Plane) -> DipStrike {
    let n = plane.normal;
    let dip_angle_deg = n.z.clamp(-1.0, 1.0).acos().to_degrees();
    if dip_angle_deg < HORIZONTAL_TOLERANCE_DEG {
        return DipStrike {
            dip_angle_deg,
            dip_azimuth_deg: None,
            strike_azimuth_deg: None,
        };
    }
    // The steepest-descent direction projects horizontally onto (n.x, n.y)
    // for an upward normal.
    let dip_azimuth = normalize_azimuth(n.x.atan2(n.y).to_degrees());
    DipStrike {
        dip_angle_deg,
        dip_azimuth_deg: Some(dip_azimuth),
        strike_azimuth_deg: Some(normalize_azimuth(dip_azimuth - 90.0)),
    }
}

/// Signed distance of `point` above `plane`.
pub fn true_height(plane: &Plane, point: &Point3) -> f64 {
    (point - plane.origin).dot(&plane.normal)
}

pub fn horizontal_distance(a: &Point3, b: &Point3) -> f64 {
    (a.x - b.x).hypot(a.y - b.y)
}

/// Closest point on a polyline to `p`, with its distance.
///
/// Returns `None` for an empty polyline.
pub fn closest_point_on_polyline(polyline: &[Point3], p: &Point3) -> Option<(Point3, f64)> {
    let candidates = polyline
        .windows(2)
        .map(|w| closest_point_on_segment(&w[0], &w[1], p))
        .chain(polyline.first().filter(|_| polyline.len() == 1).copied());
    candidates
        .map(|q| (q, (q - p).norm()))
        .min_by(|a, b| a.1.total_cmp(&b.1))
}

fn closest_point_on_segment(a: &Point3, b: &Point3, p: &Point3) -> Point3 {
    let ab = b - a;
    let len_sq = ab.norm_squared();
    if len_sq == 0.0 {
        return *a;
    }
    let t = ((p - a).dot(&ab) / len_sq).clamp(0.0, 1.0);
    a + ab * t
}

/// First principal direction of a set of horizontal positions, oriented
/// toward increasing `x` (ties toward increasing `y`).
pub fn principal_horizontal_axis(points: &[Point3]) -> Result<Vector2<f64>, GeomError> {
    if points.is_empty() {
        return Err(GeomError::TooFewPoints(0));
    }
    let n = points.len() as f64;
    let (mx, my) = points
        .iter()
        .fold((0.0, 0.0), |(x, y), p| (x + p.x / n, y + p.y / n));
    let scatter = points.iter().fold(Matrix2::zeros(), |acc, p| {
        let d = Vector2::new(p.x - mx, p.y - my);
        acc + d * d.transpose()
    });
    let eigen = SymmetricEigen::new(scatter);
    let major = if eigen.eigenvalues[0] >= eigen.eigenvalues[1] {
        0
    } else {
        1
    };
    if eigen.eigenvalues[major] <= 0.0 {
        return Err(GeomError::DegenerateGeometry);
    }
    let axis = eigen.eigenvectors.column(major).normalize();
    let flip = if axis.x.abs() > SIGN_TIE_TOLERANCE {
        axis.x < 0.0
    } else {
        axis.y < 0.0
    };
    Ok(if flip { -axis } else { axis })
}
