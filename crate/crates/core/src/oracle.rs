//! Brute-force upper bounds on the optimal cost from shortest paths in a
//! 16-connected grid over free space.
//!
//! The graph at resolution `R` also carries the edges of every coarser grid
//! `R/2, R/4, …` (down to 16 cells per side) on the same nested nodes, so a
//! finer resolution never returns a larger cost than a coarser one it nests.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use serde::{Deserialize, Serialize};

use crate::error::{GeomError, PlanError};
use crate::geom::cost::path_cost_numeric_with;
use crate::geom::point::{project_on_segment, segments_intersect};
use crate::geom::{BBox, FeatureGeom, Point, Scene, SegmentCurve};
use crate::voronoi::RefinedCell;

pub const DEFAULT_RESOLUTION: usize = 512;
pub const MIN_RESOLUTION: usize = 16;
/// Clearance floor relative to the bounding-box diagonal.
pub const FLOOR_FACTOR: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleConfig {
    /// Grid cells per bounding-box side.
    pub resolution: usize,
    /// Minimum clearance of grid nodes; `None` uses the scene default.
    pub clearance_floor: Option<f64>,
    /// Knight-move edges in addition to the 8 king moves.
    pub sixteen: bool,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            resolution: DEFAULT_RESOLUTION,
            clearance_floor: None,
            sixteen: true,
        }
    }
}

impl OracleConfig {
    pub fn with_resolution(resolution: usize) -> Self {
        Self {
            resolution,
            ..Self::default()
        }
    }

    fn floor(&self, scene: &Scene) -> f64 {
        self.clearance_floor
            .unwrap_or(scene.scale() * FLOOR_FACTOR)
    }

    fn validate(&self, scene: &Scene) -> Result<f64, PlanError> {
        let floor = self.floor(scene);
        if self.resolution < MIN_RESOLUTION {
            return Err(PlanError::Internal(format!(
                "oracle resolution {} below {MIN_RESOLUTION}",
                self.resolution
            )));
        }
        if floor.is_nan() || floor <= 0.0 {
            return Err(PlanError::Internal("oracle clearance floor must be positive".into()));
        }
        Ok(floor)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleResult {
    pub cost: f64,
    /// Polyline of the grid path from `p` to `q`.
    pub path: Vec<Point>,
    pub nodes: usize,
    pub edges: usize,
}

/// Smallest distance from segment `ab` to any obstacle feature.
pub fn segment_clearance(scene: &Scene, a: Point, b: Point) -> f64 {
    let mut best = f64::INFINITY;
    for f in scene.features() {
        let d = match f.geom {
            FeatureGeom::Vertex(v) => project_on_segment(v, a, b).0.dist(v),
            FeatureGeom::Edge { a: c, b: d } => {
                if segments_intersect(a, b, c, d) {
                    0.0
                } else {
                    let d1 = project_on_segment(c, a, b).0.dist(c);
                    let d2 = project_on_segment(d, a, b).0.dist(d);
                    let d3 = project_on_segment(a, c, d).0.dist(a);
                    let d4 = project_on_segment(b, c, d).0.dist(b);
                    d1.min(d2).min(d3).min(d4)
                }
            }
        };
        best = best.min(d);
    }
    best
}

/// Grid geometry shared by the scene and cell oracles.
struct Lattice<'a> {
    scene: &'a Scene,
    bbox: BBox,
    res: usize,
    floor: f64,
    /// Clearance on the half-step lattice, `(2R+1)²` values.
    half: Vec<f64>,
    valid: Vec<bool>,
}

impl<'a> Lattice<'a> {
    fn new(scene: &'a Scene, bbox: BBox, res: usize, floor: f64, keep: impl Fn(Point) -> bool) -> Self {
        let side = 2 * res + 1;
        let mut half = vec![0.0; side * side];
        for i in 0..side {
            for j in 0..side {
                let p = Self::half_point(&bbox, res, i, j);
                half[i * side + j] = scene.clearance_value(p);
            }
        }
        let n = res + 1;
        let mut valid = vec![false; n * n];
        for i in 0..n {
            for j in 0..n {
                let c = half[(2 * i) * side + 2 * j];
                valid[i * n + j] = c >= floor && keep(Self::half_point(&bbox, res, 2 * i, 2 * j));
            }
        }
        Self {
            scene,
            bbox,
            res,
            floor,
            half,
            valid,
        }
    }

    fn half_point(bbox: &BBox, res: usize, i: usize, j: usize) -> Point {
        let fx = i as f64 / (2 * res) as f64;
        let fy = j as f64 / (2 * res) as f64;
        Point::new(
            bbox.min.x + fx * bbox.width(),
            bbox.min.y + fy * bbox.height(),
        )
    }

    fn node(&self, i: usize, j: usize) -> usize {
        i * (self.res + 1) + j
    }

    fn node_point(&self, id: usize) -> Point {
        let n = self.res + 1;
        Self::half_point(&self.bbox, self.res, 2 * (id / n), 2 * (id % n))
    }

    fn half_clr(&self, i: usize, j: usize) -> f64 {
        self.half[i * (2 * self.res + 1) + j]
    }

    /// Cost of segment `ab` given its endpoint and midpoint clearances.
    fn segment_cost(&self, a: Point, b: Point, c0: f64, cm: f64, c1: f64) -> Option<f64> {
        let len = a.dist(b);
        if c0 + c1 >= 2.0 * len && cm >= self.floor {
            return Some(len * (1.0 / c0 + 4.0 / cm + 1.0 / c1) / 6.0);
        }
        self.exact_cost(a, b)
    }

    fn exact_cost(&self, a: Point, b: Point) -> Option<f64> {
        if self.scene.segment_blocked(a, b) || segment_clearance(self.scene, a, b) < self.floor {
            return None;
        }
        path_cost_numeric_with(self.scene, &SegmentCurve(a, b), 1e-7).ok()
    }

    /// Nesting levels: strides 1, 2, 4, … while the grid stays at least
    /// `MIN_RESOLUTION` cells per side.
    fn strides(&self) -> Vec<usize> {
        let mut out = vec![1];
        let mut s = 1;
        while self.res.is_multiple_of(2 * s) && self.res / (2 * s) >= MIN_RESOLUTION {
            s *= 2;
            out.push(s);
        }
        out
    }

    fn edges(&self, sixteen: bool, keep_mid: impl Fn(Point) -> bool) -> Vec<(usize, usize, f64)> {
        let dirs: &[(i64, i64)] = if sixteen {
            &[(1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (2, 1), (1, -2), (2, -1)]
        } else {
            &[(1, 0), (0, 1), (1, 1), (1, -1)]
        };
        let n = self.res as i64;
        let mut out = Vec::new();
        for s in self.strides() {
            let s = s as i64;
            for i in (0..=n).step_by(s as usize) {
                for j in (0..=n).step_by(s as usize) {
                    let u = self.node(i as usize, j as usize);
                    if !self.valid[u] {
                        continue;
                    }
                    for &(dx, dy) in dirs {
                        let (i2, j2) = (i + dx * s, j + dy * s);
                        if i2 < 0 || j2 < 0 || i2 > n || j2 > n {
                            continue;
                        }
                        let v = self.node(i2 as usize, j2 as usize);
                        if !self.valid[v] {
                            continue;
                        }
                        let (mi, mj) = ((2 * i + dx * s) as usize, (2 * j + dy * s) as usize);
                        let (a, b) = (self.node_point(u), self.node_point(v));
                        if !keep_mid(a.lerp(b, 0.5)) {
                            continue;
                        }
                        let c0 = self.half_clr(2 * i as usize, 2 * j as usize);
                        let c1 = self.half_clr(2 * i2 as usize, 2 * j2 as usize);
                        if let Some(c) = self.segment_cost(a, b, c0, self.half_clr(mi, mj), c1) {
                            out.push((u, v, c));
                        }
                    }
                }
            }
        }
        out
    }

    /// Nodes of the grid cell containing `p` at every nesting level.
    fn attach(&self, p: Point) -> Vec<usize> {
        let fx = ((p.x - self.bbox.min.x) / self.bbox.width() * self.res as f64).clamp(0.0, self.res as f64);
        let fy = ((p.y - self.bbox.min.y) / self.bbox.height() * self.res as f64).clamp(0.0, self.res as f64);
        let mut out = Vec::new();
        for s in self.strides() {
            let i0 = ((fx / s as f64).floor() as usize * s).min(self.res - s);
            let j0 = ((fy / s as f64).floor() as usize * s).min(self.res - s);
            for (i, j) in [(i0, j0), (i0 + s, j0), (i0, j0 + s), (i0 + s, j0 + s)] {
                let id = self.node(i, j);
                if self.valid[id] {
                    out.push(id);
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn shortest(
    lat: &Lattice,
    p: Point,
    q: Point,
    sixteen: bool,
    keep_mid: impl Fn(Point) -> bool,
) -> Result<OracleResult, PlanError> {
    for (name, x) in [("p", p), ("q", q)] {
        let c = lat.scene.clearance_value(x);
        if c < lat.floor {
            return Err(GeomError::Precondition(format!(
                "oracle endpoint {name} has clearance {c:e} below the floor {:e}",
                lat.floor
            ))
            .into());
        }
    }
    let grid = lat.edges(sixteen, &keep_mid);
    let nodes = (lat.res + 1) * (lat.res + 1);
    let (sp, tq) = (nodes, nodes + 1);
    let total = nodes + 2;
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); total];
    let mut edge_count = 0;
    let mut add = |adj: &mut Vec<Vec<(usize, f64)>>, u: usize, v: usize, c: f64| {
        adj[u].push((v, c));
        adj[v].push((u, c));
        edge_count += 1;
    };
    for &(u, v, c) in &grid {
        add(&mut adj, u, v, c);
    }
    for (end, x) in [(sp, p), (tq, q)] {
        for id in lat.attach(x) {
            let y = lat.node_point(id);
            if !keep_mid(x.lerp(y, 0.5)) {
                continue;
            }
            if let Some(c) = lat.exact_cost(x, y) {
                add(&mut adj, end, id, c);
            }
        }
    }
    if let Some(c) = lat.exact_cost(p, q) {
        if keep_mid(p.lerp(q, 0.5)) {
            add(&mut adj, sp, tq, c);
        }
    }
    if p == q {
        return Ok(OracleResult {
            cost: 0.0,
            path: vec![p],
            nodes: total,
            edges: edge_count,
        });
    }
    let mut dist = vec![f64::INFINITY; total];
    let mut pred = vec![usize::MAX; total];
    let mut heap = BinaryHeap::new();
    dist[sp] = 0.0;
    heap.push(Entry(0.0, sp));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == tq {
            break;
        }
        for &(v, c) in &adj[u] {
            let nd = d + c;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = u;
                heap.push(Entry(nd, v));
            }
        }
    }
    if !dist[tq].is_finite() {
        return Err(PlanError::Unreachable);
    }
    let point = |id: usize| match id {
        x if x == sp => p,
        x if x == tq => q,
        x => lat.node_point(x),
    };
    let mut path = vec![q];
    let mut cur = tq;
    while cur != sp {
        cur = pred[cur];
        path.push(point(cur));
    }
    path.reverse();
    Ok(OracleResult {
        cost: dist[tq],
        path,
        nodes: total,
        edges: edge_count,
    })
}

/// Upper bound on the optimal cost between `p` and `q` in the scene.
pub fn grid_oracle(scene: &Scene, p: Point, q: Point, config: &OracleConfig) -> Result<OracleResult, PlanError> {
    let floor = config.validate(scene)?;
    let lat = Lattice::new(scene, scene.bbox(), config.resolution, floor, |_| true);
    shortest(&lat, p, q, config.sixteen, |_| true)
}

/// Axis-aligned box around the closed cell, padded slightly.
fn cell_bbox(cell: &RefinedCell) -> BBox {
    let mut pts = vec![cell.u, cell.v];
    let (lo, hi) = cell.param_range();
    for k in 0..=64 {
        let x = lo + (hi - lo) * k as f64 / 64.0;
        pts.push(cell.point_at(x, 0.0));
        pts.push(cell.point_at(x, cell.kappa_height(x)));
    }
    let (mut min, mut max) = (pts[0], pts[0]);
    for p in &pts {
        min = Point::new(min.x.min(p.x), min.y.min(p.y));
        max = Point::new(max.x.max(p.x), max.y.max(p.y));
    }
    let pad = 1e-6 * (max - min).norm().max(1e-12);
    BBox::new(min - Point::new(pad, pad), max + Point::new(pad, pad))
}

/// Upper bound on the cost between two points of a refined cell over paths
/// that stay in the closed cell.
pub fn cell_oracle(
    scene: &Scene,
    cell: &RefinedCell,
    p: Point,
    q: Point,
    config: &OracleConfig,
) -> Result<OracleResult, PlanError> {
    let floor = config.validate(scene)?;
    let bbox = cell_bbox(cell);
    let tol = 1e-9 * bbox.diagonal();
    let inside = |x: Point| cell.contains(x, tol);
    let lat = Lattice::new(scene, bbox, config.resolution, floor, inside);
    shortest(&lat, p, q, config.sixteen, inside)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Polygon;

    fn single_vertex() -> Scene {
        let bbox = BBox::new(Point::new(-50.0, -50.0), Point::new(50.0, 50.0));
        Scene::new(
            vec![Polygon::new(vec![Point::new(0.0, 0.0)])],
            bbox,
            Point::new(1.0, 0.0),
            Point::new(0.0, std::f64::consts::E),
        )
        .unwrap()
    }

    #[test]
    fn radial_pair_matches_log_ratio() {
        let sc = single_vertex();
        let r = grid_oracle(&sc, Point::new(1.0, 0.0), Point::new(4.0, 0.0), &OracleConfig::with_resolution(128)).unwrap();
        let want = 4f64.ln();
        assert!(r.cost >= want - 1e-9 && r.cost <= want * 1.02, "{}", r.cost);
    }

    #[test]
    fn symmetric_and_nested_monotone() {
        let sc = single_vertex();
        let (p, q) = (Point::new(1.0, 0.0), Point::new(0.0, std::f64::consts::E));
        let c64 = grid_oracle(&sc, p, q, &OracleConfig::with_resolution(64)).unwrap().cost;
        let c128 = grid_oracle(&sc, p, q, &OracleConfig::with_resolution(128)).unwrap().cost;
        let back = grid_oracle(&sc, q, p, &OracleConfig::with_resolution(128)).unwrap().cost;
        assert!(c128 <= c64 + 1e-9);
        assert!((back - c128).abs() < 1e-9);
    }

    #[test]
    fn endpoint_below_floor_is_rejected() {
        let sc = single_vertex();
        let r = grid_oracle(&sc, Point::new(1e-6, 0.0), Point::new(1.0, 1.0), &OracleConfig::with_resolution(32));
        assert!(r.is_err());
        let bad = OracleConfig {
            resolution: 8,
            ..OracleConfig::default()
        };
        assert!(grid_oracle(&sc, Point::new(1.0, 0.0), Point::new(1.0, 1.0), &bad).is_err());
    }
}
