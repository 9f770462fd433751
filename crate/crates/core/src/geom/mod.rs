//! Points, scenes and features, clearance queries, and the closed-form costs
//! of single-feature paths.

pub mod bisector;
pub mod cost;
pub mod index;
pub mod point;
pub mod primitive;
pub mod scene;

pub use bisector::Bisector;
pub use cost::{
    arc_cost, arc_cost_angles, edge_geodesic_cost, path_cost_numeric, polyline_cost_numeric,
    radial_cost, radial_cost_checked, spiral_cost, Curve, LineFrame, SegmentCurve,
};
pub use index::PointIndex;
pub use point::{signed_angle, Point};
pub use primitive::{
    edge_geodesic, single_feature_geodesic, vertex_geodesic, Geometry, Path, Primitive,
    PrimitiveKind,
};
pub use scene::{
    BBox, ClearanceResult, Feature, FeatureGeom, FeatureId, FeatureKind, Owner, Polygon, Scene,
    TAU_GEO,
};
