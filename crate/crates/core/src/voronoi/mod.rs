//! Voronoi diagram of obstacle features and its refinement into cells with
//! three boundary edges.

pub mod cell;
pub mod diagram;
pub mod refine;

pub use cell::{
    point_at_clearance, CellFrame, ConstClearanceArc, EdgeId, EdgeShape, REdge, RadialRole,
    RefinedCell,
};
pub use diagram::{
    build_voronoi, complexity, ray_entry, site_frame, wrap_pi, Cell, CellPiece, SiteFrame,
    VoronoiDiagram, VoronoiEdge, VORONOI_SIZE_FACTOR,
};
pub use refine::{refine, Connector, RefinedDiagram, REFINED_SIZE_FACTOR};
