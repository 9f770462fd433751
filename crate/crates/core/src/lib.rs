//! Approximate minimum-cost paths for a point robot among polygonal obstacles,
//! where cost is the integral of reciprocal clearance along the path.
#![forbid(unsafe_code)]

pub mod approx;
pub mod error;
pub mod geom;
pub mod io;
pub mod oracle;
pub mod quadrature;
pub mod reachability;
pub mod voronoi;
pub mod wellbehaved;

pub use error::{DiagramError, GeomError, PlanError, SceneError};
