use thiserror::Error;

/// Rejections raised while validating a scene.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneError {
    #[error("bounding box must be finite with min < max")]
    InvalidBox,
    #[error("obstacle {polygon} has no vertices")]
    EmptyRing { polygon: usize },
    #[error("non-finite coordinate in {what}")]
    NonFinite { what: String },
    #[error("{what} is not strictly inside the bounding box")]
    OutsideBox { what: String },
    #[error("obstacle {polygon} is not a simple polygon")]
    SelfIntersecting { polygon: usize },
    #[error("obstacles {first} and {second} intersect")]
    Overlapping { first: usize, second: usize },
    #[error("{which} lies inside an obstacle or on its boundary")]
    EndpointBlocked { which: String },
}

/// Failures of the closed-form and numeric cost routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeomError {
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("quadrature failed: {0}")]
    Quadrature(String),
}

/// Failures while building or querying the (refined) Voronoi diagram.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagramError {
    #[error("diagram construction failed: {0}")]
    Construction(String),
    #[error("clearance {value} outside the range [{lo}, {hi}] of the edge")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("diagram size {count} exceeds the bound {bound}")]
    TooLarge { count: usize, bound: usize },
}

/// Errors surfaced by the planner.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum PlanError {
    #[error(transparent)]
    Scene(#[from] SceneError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error("target unreachable from source")]
    Unreachable,
    #[error("epsilon must lie in (0, 1], got {0}")]
    BadEpsilon(f64),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}
