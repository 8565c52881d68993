//! Stratigraphic correlation panels built from digitized outcrop interpretations.
//!
//! The pipeline runs from ranked 3D contact polylines and cross-bed
//! measurements to per-log stratum trees, rose diagrams, a pure-data panel
//! layout and finally a deterministic SVG document:
//!
//! * [`geom`]: plane fitting, dip and strike, true heights.
//! * [`strata`]: stratum trees built from ranked contact picks.
//! * [`circstats`]: azimuth binning and mean direction for rose diagrams.
//! * [`layout`]: panel geometry (offsets, leveling, rulers, correlation paths).
//! * [`render`]: SVG emission and the 2D outcrop strip projection.
//! * [`io`]: versioned JSON documents for datasets and projects.
//! * [`project`]: the editable project state shared by the CLI and the HTTP service.

pub mod circstats;
pub mod fixture;
pub mod geom;
pub mod io;
pub mod layout;
pub mod model;
pub mod project;
pub mod render;
pub mod strata;

pub use geom::{Plane, Point3, Vector3};
pub use model::{
    ContactId, CorrelationId, CrossBedId, Dataset, LogId, Rgb, RockTypeId, StratumId,
};
pub use project::Project;
