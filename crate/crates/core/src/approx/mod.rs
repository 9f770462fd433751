//! Three-stage approximation: a coarse graph for an O(n) estimate, an
//! exponential search over sampled graphs for an O(1) estimate, and a dense
//! graph of locally optimal connections for the final (1+ε) path.

pub mod edgelet;
pub mod graph;
pub mod stages;

pub use edgelet::{
    candidate_indices, clearance_window, mark_edgelets, shadow_point, Edgelet, EdgeletRole, Sample,
};
pub use graph::{dijkstra, GraphEdge, GraphStats, GraphVertex, Payload, Route, SearchGraph, StageTag};
pub use stages::{
    approximate, build_g1, build_g2, build_g3, build_refined, g3_counts, g3_size_bounds,
    planning_size, spacing_divisor, stage1, stage2, stage3, ApproxOptions, G3Build, Solution, StageResult, Timings,
    DEFAULT_C_SCALE, DEFAULT_SPACING_CAP, OVERSHOOT,
};
