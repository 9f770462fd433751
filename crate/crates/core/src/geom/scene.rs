use serde::{Deserialize, Serialize};

use super::point::{orient, segments_intersect, Point};
use crate::error::SceneError;

/// Relative geometric tolerance, applied after scaling by the box diagonal.
pub const TAU_GEO: f64 = 1e-9;

pub type FeatureId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BBox {
    pub min: Point,
    pub max: Point,
}

impl BBox {
    pub fn new(min: Point, max: Point) -> Self {
        Self { min, max }
    }

    pub fn contains_strict(&self, p: Point) -> bool {
        p.x > self.min.x && p.x < self.max.x && p.y > self.min.y && p.y < self.max.y
    }

    pub fn diagonal(&self) -> f64 {
        self.min.dist(self.max)
    }

    pub fn width(&self) -> f64 {
        self.max.x - self.min.x
    }

    pub fn height(&self) -> f64 {
        self.max.y - self.min.y
    }

    /// Corners in counterclockwise order starting at `min`.
    pub fn corners(&self) -> [Point; 4] {
        [
            self.min,
            Point::new(self.max.x, self.min.y),
            self.max,
            Point::new(self.min.x, self.max.y),
        ]
    }
}

/// Obstacle ring. One vertex is a point obstacle, two a segment obstacle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polygon {
    pub vertices: Vec<Point>,
}

impl Polygon {
    pub fn new(vertices: Vec<Point>) -> Self {
        Self { vertices }
    }

    pub fn signed_area(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum::<f64>() * 0.5
    }

    /// Crossing-number containment test; degenerate rings contain nothing.
    pub fn contains(&self, p: Point) -> bool {
        let v = &self.vertices;
        let n = v.len();
        if n < 3 {
            return false;
        }
        let mut inside = false;
        let mut j = n - 1;
        for i in 0..n {
            let (a, b) = (v[i], v[j]);
            if (a.y > p.y) != (b.y > p.y) {
                let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
                if p.x < x {
                    inside = !inside;
                }
            }
            j = i;
        }
        inside
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        let count = if n >= 2 { n } else { 0 };
        (0..count).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FeatureKind {
    Vertex,
    Edge,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum FeatureGeom {
    Vertex(Point),
    Edge { a: Point, b: Point },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Owner {
    Obstacle { polygon: usize, index: usize },
    Boundary { side: usize },
}

/// Directions (absolute angles) whose rays from a vertex stay nearest to it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Wedge {
    pub start: f64,
    pub span: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Feature {
    pub geom: FeatureGeom,
    pub owner: Owner,
    /// Unit normal pointing into free space (edges only).
    pub normal: Point,
    /// `None` for reflex vertices, which own no area.
    pub wedge: Option<Wedge>,
    /// Features sharing an endpoint with this one.
    pub adjacent: Vec<FeatureId>,
}

impl Feature {
    pub fn kind(&self) -> FeatureKind {
        match self.geom {
            FeatureGeom::Vertex(_) => FeatureKind::Vertex,
            FeatureGeom::Edge { .. } => FeatureKind::Edge,
        }
    }

    pub fn is_site(&self) -> bool {
        match self.geom {
            FeatureGeom::Vertex(_) => self.wedge.is_some(),
            FeatureGeom::Edge { .. } => true,
        }
    }

    pub fn vertex(&self) -> Option<Point> {
        match self.geom {
            FeatureGeom::Vertex(p) => Some(p),
            FeatureGeom::Edge { .. } => None,
        }
    }

    /// Distance from `p` and the foot point. Edges are open: a foot outside the
    /// interior yields `None`, the endpoint being a feature of its own.
    pub fn distance(&self, p: Point) -> Option<(f64, Point)> {
        match self.geom {
            FeatureGeom::Vertex(v) => Some((p.dist(v), v)),
            FeatureGeom::Edge { a, b } => {
                let d = b - a;
                let l2 = d.norm2();
                let s = (p - a).dot(d) / l2;
                if s <= 0.0 || s >= 1.0 {
                    return None;
                }
                let foot = a + d * s;
                Some((p.dist(foot), foot))
            }
        }
    }

    /// Distance to the closed geometry (used where endpoints must count).
    pub fn closed_distance(&self, p: Point) -> f64 {
        match self.geom {
            FeatureGeom::Vertex(v) => p.dist(v),
            FeatureGeom::Edge { a, b } => {
                let (foot, _) = super::point::project_on_segment(p, a, b);
                p.dist(foot)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClearanceResult {
    pub value: f64,
    pub feature: FeatureId,
    pub foot: Point,
}

/// Validated planning instance: obstacles, bounding box, endpoints and the
/// derived feature list.
#[derive(Debug, Clone, PartialEq)]
pub struct Scene {
    obstacles: Vec<Polygon>,
    bbox: BBox,
    source: Point,
    target: Point,
    features: Vec<Feature>,
}

impl Scene {
    pub fn new(
        obstacles: Vec<Polygon>,
        bbox: BBox,
        source: Point,
        target: Point,
    ) -> Result<Self, SceneError> {
        if !(bbox.min.is_finite() && bbox.max.is_finite())
            || bbox.min.x >= bbox.max.x
            || bbox.min.y >= bbox.max.y
        {
            return Err(SceneError::InvalidBox);
        }
        let tol = TAU_GEO * bbox.diagonal();
        let mut rings = Vec::with_capacity(obstacles.len());
        for (i, poly) in obstacles.into_iter().enumerate() {
            if poly.vertices.is_empty() {
                return Err(SceneError::EmptyRing { polygon: i });
            }
            if poly.vertices.iter().any(|p| !p.is_finite()) {
                return Err(SceneError::NonFinite {
                    what: format!("obstacle {i}"),
                });
            }
            if let Some(k) = poly.vertices.iter().position(|p| !bbox.contains_strict(*p)) {
                return Err(SceneError::OutsideBox {
                    what: format!("obstacle {i} vertex {k}"),
                });
            }
            let ring = normalize_ring(poly.vertices, tol);
            check_simple(&ring, i)?;
            rings.push(ring);
        }
        for i in 0..rings.len() {
            for j in i + 1..rings.len() {
                if rings_touch(&rings[i], &rings[j]) {
                    return Err(SceneError::Overlapping { first: i, second: j });
                }
            }
        }
        for (name, p) in [("source", source), ("target", target)] {
            if !p.is_finite() {
                return Err(SceneError::NonFinite { what: name.into() });
            }
            if !bbox.contains_strict(p) {
                return Err(SceneError::OutsideBox { what: name.into() });
            }
        }
        let features = build_features(&rings, &bbox);
        let scene = Scene {
            obstacles: rings.into_iter().map(Polygon::new).collect(),
            bbox,
            source,
            target,
            features,
        };
        for (name, p) in [("source", source), ("target", target)] {
            if scene.clearance(p).value <= tol {
                return Err(SceneError::EndpointBlocked { which: name.into() });
            }
        }
        Ok(scene)
    }

    pub fn obstacles(&self) -> &[Polygon] {
        &self.obstacles
    }

    pub fn bbox(&self) -> BBox {
        self.bbox
    }

    pub fn source(&self) -> Point {
        self.source
    }

    pub fn target(&self) -> Point {
        self.target
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn feature(&self, id: FeatureId) -> &Feature {
        &self.features[id]
    }

    /// Same obstacles and box with new endpoints.
    pub fn with_endpoints(&self, source: Point, target: Point) -> Result<Scene, SceneError> {
        Scene::new(self.obstacles.clone(), self.bbox, source, target)
    }

    /// Total number of obstacle vertices (the complexity measure `n`).
    pub fn vertex_count(&self) -> usize {
        self.obstacles.iter().map(|p| p.vertices.len()).sum()
    }

    /// Length scale used to turn relative tolerances into absolute ones.
    pub fn scale(&self) -> f64 {
        self.bbox.diagonal()
    }

    pub fn tol(&self) -> f64 {
        TAU_GEO * self.scale()
    }

    pub fn inside_obstacle(&self, p: Point) -> Option<usize> {
        self.obstacles.iter().position(|poly| poly.contains(p))
    }

    /// Distance to the nearest feature, zero inside an obstacle.
    pub fn clearance(&self, p: Point) -> ClearanceResult {
        let mut best = ClearanceResult {
            value: f64::INFINITY,
            feature: 0,
            foot: p,
        };
        for (id, f) in self.features.iter().enumerate() {
            if let Some((d, foot)) = f.distance(p) {
                if d < best.value {
                    best = ClearanceResult {
                        value: d,
                        feature: id,
                        foot,
                    };
                }
            }
        }
        if self.inside_obstacle(p).is_some() {
            best.value = 0.0;
        }
        best
    }

    pub fn clearance_value(&self, p: Point) -> f64 {
        let mut best = f64::INFINITY;
        for f in &self.features {
            let d = match f.geom {
                FeatureGeom::Vertex(v) => (p - v).norm2(),
                FeatureGeom::Edge { a, b } => {
                    let d = b - a;
                    let s = (p - a).dot(d) / d.norm2();
                    if s <= 0.0 || s >= 1.0 {
                        continue;
                    }
                    (p - (a + d * s)).norm2()
                }
            };
            if d < best {
                best = d;
            }
        }
        if self.inside_obstacle(p).is_some() {
            return 0.0;
        }
        best.sqrt()
    }

    /// Whether segment `pq` crosses or touches any obstacle boundary or interior.
    pub fn segment_blocked(&self, p: Point, q: Point) -> bool {
        for poly in &self.obstacles {
            if poly.vertices.len() == 1 {
                let (foot, _) = super::point::project_on_segment(poly.vertices[0], p, q);
                if foot.dist(poly.vertices[0]) == 0.0 {
                    return true;
                }
                continue;
            }
            for (a, b) in poly.edges() {
                if segments_intersect(p, q, a, b) {
                    return true;
                }
            }
            if poly.contains(p) || poly.contains(q) {
                return true;
            }
        }
        false
    }
}

/// Drop repeated and collinear vertices, enforce counterclockwise order.
fn normalize_ring(mut v: Vec<Point>, tol: f64) -> Vec<Point> {
    v.dedup_by(|a, b| a.dist(*b) <= tol);
    while v.len() > 1 && v[0].dist(v[v.len() - 1]) <= tol {
        v.pop();
    }
    if v.len() >= 3 {
        let mut changed = true;
        while changed && v.len() > 3 {
            changed = false;
            let n = v.len();
            for i in 0..n {
                let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
                let cr = (b - a).cross(c - b);
                if cr.abs() <= tol * (b - a).norm().max((c - b).norm()) && (b - a).dot(c - b) > 0.0
                {
                    v.remove(i);
                    changed = true;
                    break;
                }
            }
        }
        let area: f64 = (0..v.len()).map(|i| v[i].cross(v[(i + 1) % v.len()])).sum();
        if area < 0.0 {
            v.reverse();
        }
    }
    v
}

fn check_simple(v: &[Point], polygon: usize) -> Result<(), SceneError> {
    let n = v.len();
    if n < 3 {
        return Ok(());
    }
    let area: f64 = (0..n).map(|i| v[i].cross(v[(i + 1) % n])).sum();
    if area.abs() == 0.0 {
        return Err(SceneError::SelfIntersecting { polygon });
    }
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        for j in i + 1..n {
            let (c, d) = (v[j], v[(j + 1) % n]);
            let adjacent = j == i + 1 || (i == 0 && j == n - 1);
            if adjacent {
                // Shared endpoint only; reject folding back onto the previous edge.
                let shared = if j == i + 1 { b } else { a };
                let (p, q) = if j == i + 1 { (a, d) } else { (b, c) };
                if orient(p, shared, q) == 0.0 && (p - shared).dot(q - shared) > 0.0 {
                    return Err(SceneError::SelfIntersecting { polygon });
                }
                continue;
            }
            if segments_intersect(a, b, c, d) {
                return Err(SceneError::SelfIntersecting { polygon });
            }
        }
    }
    Ok(())
}

fn rings_touch(a: &[Point], b: &[Point]) -> bool {
    let edges = |v: &[Point]| -> Vec<(Point, Point)> {
        match v.len() {
            1 => vec![(v[0], v[0])],
            n => (0..n).map(|i| (v[i], v[(i + 1) % n])).collect(),
        }
    };
    for (p, q) in edges(a) {
        for (r, s) in edges(b) {
            if segments_intersect(p, q, r, s) {
                return true;
            }
        }
    }
    let pa = Polygon::new(a.to_vec());
    let pb = Polygon::new(b.to_vec());
    pa.contains(b[0]) || pb.contains(a[0])
}

fn build_features(rings: &[Vec<Point>], bbox: &BBox) -> Vec<Feature> {
    let mut features = Vec::new();
    for (pi, ring) in rings.iter().enumerate() {
        let n = ring.len();
        let base = features.len();
        // Vertex i has id base + i; edge i (from vertex i to i+1) has id base + n + i.
        for (i, &v) in ring.iter().enumerate() {
            let wedge = if n == 1 {
                Some(Wedge {
                    start: 0.0,
                    span: 2.0 * std::f64::consts::PI,
                })
            } else {
                let prev = ring[(i + n - 1) % n];
                let next = ring[(i + 1) % n];
                let n_in = outward_normal(prev, v);
                let n_out = outward_normal(v, next);
                let turn = if n == 2 {
                    std::f64::consts::PI
                } else {
                    super::point::signed_angle(v - prev, next - v)
                };
                (turn > 0.0).then(|| Wedge {
                    start: n_in.angle(),
                    span: if n == 2 {
                        std::f64::consts::PI
                    } else {
                        super::point::signed_angle(n_in, n_out)
                    },
                })
            };
            let adjacent = if n == 1 {
                Vec::new()
            } else {
                vec![base + n + (i + n - 1) % n, base + n + i]
            };
            features.push(Feature {
                geom: FeatureGeom::Vertex(v),
                owner: Owner::Obstacle {
                    polygon: pi,
                    index: i,
                },
                normal: Point::default(),
                wedge,
                adjacent,
            });
        }
        if n >= 2 {
            for i in 0..n {
                let (a, b) = (ring[i], ring[(i + 1) % n]);
                let mut adjacent = vec![base + i, base + (i + 1) % n];
                if n == 2 {
                    adjacent.push(base + n + (1 - i));
                } else {
                    adjacent.push(base + n + (i + n - 1) % n);
                    adjacent.push(base + n + (i + 1) % n);
                }
                features.push(Feature {
                    geom: FeatureGeom::Edge { a, b },
                    owner: Owner::Obstacle {
                        polygon: pi,
                        index: n + i,
                    },
                    normal: outward_normal(a, b),
                    wedge: None,
                    adjacent,
                });
            }
        }
    }
    let c = bbox.corners();
    let base = features.len();
    for side in 0..4 {
        let (a, b) = (c[side], c[(side + 1) % 4]);
        features.push(Feature {
            geom: FeatureGeom::Edge { a, b },
            owner: Owner::Boundary { side },
            // Box edges run counterclockwise; free space lies to their left.
            normal: (b - a).unit().perp(),
            wedge: None,
            adjacent: vec![base + (side + 3) % 4, base + (side + 1) % 4],
        });
    }
    features
}

/// Right-hand normal of a counterclockwise obstacle edge, pointing outside.
fn outward_normal(a: Point, b: Point) -> Point {
    let d = (b - a).unit();
    Point::new(d.y, -d.x)
}
