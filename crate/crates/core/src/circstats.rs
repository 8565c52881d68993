//! Azimuth binning, mean direction and area-true rose diagram radii.

use serde::{Deserialize, Serialize};

use crate::geom::normalize_azimuth;

pub const BIN_COUNT: usize = 24;
pub const BIN_WIDTH_DEG: f64 = 15.0;

/// Resultant lengths below this leave the mean direction undefined.
const MIN_RESULTANT: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoseDiagram {
    pub bin_counts: [u32; BIN_COUNT],
    pub mean_azimuth_deg: Option<f64>,
    pub total: u32,
}

impl RoseDiagram {
    pub fn from_azimuths(azimuths: &[f64]) -> Self {
        let bin_counts = bin_azimuths(azimuths);
        Self {
            bin_counts,
            mean_azimuth_deg: mean_azimuth(azimuths),
            total: bin_counts.iter().sum(),
        }
    }

    pub fn radii(&self, max_radius_px: f64) -> [f64; BIN_COUNT] {
        rose_radii(&self.bin_counts, max_radius_px)
    }
}

/// Bin index of an azimuth; edges go to the upper bin.
pub fn bin_index(azimuth_deg: f64) -> usize {
    let a = normalize_azimuth(azimuth_deg);
    ((a / BIN_WIDTH_DEG).floor() as usize).min(BIN_COUNT - 1)
}

/// Counts azimuths into 24 bins of 15 degrees. Non-finite values are ignored.
pub fn bin_azimuths(azimuths: &[f64]) -> [u32; BIN_COUNT] {
    let mut counts = [0; BIN_COUNT];
    for &a in azimuths.iter().filter(|a| a.is_finite()) {
        counts[bin_index(a)] += 1;
    }
    counts
}

/// Mean direction from the vector sum of unit azimuth vectors.
pub fn mean_azimuth(azimuths: &[f64]) -> Option<f64> {
    let (s, c) = azimuths
        .iter()
        .filter(|a| a.is_finite())
        .fold((0.0, 0.0), |(s, c), a| {
            let (sa, ca) = a.to_radians().sin_cos();
            (s + sa, c + ca)
        });
    if s.hypot(c) < MIN_RESULTANT {
        return None;
    }
    Some(normalize_azimuth(s.atan2(c).to_degrees()))
}

/// Sector radii that make sector area proportional to bin count.
pub fn rose_radii(bin_counts: &[u32; BIN_COUNT], max_radius_px: f64) -> [f64; BIN_COUNT] {
    let max = bin_counts.iter().copied().max().unwrap_or(0);
    let mut radii = [0.0; BIN_COUNT];
    if max == 0 {
        return radii;
    }
    for (r, &count) in radii.iter_mut().zip(bin_counts) {
        *r = max_radius_px * (count as f64 / max as f64).sqrt();
    }
    radii
}
