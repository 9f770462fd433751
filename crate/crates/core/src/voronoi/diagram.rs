//! Voronoi diagram of obstacle features, built one site at a time.
//!
//! A site's cell is star-shaped with respect to the site, so its boundary is a
//! function `R(param)` over the site's ray family (angles about a vertex, feet
//! along an edge). `R` is the lower envelope of closed-form ray-entry
//! distances into the regions of all other sites; breakpoints of the envelope
//! are Voronoi vertices.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::DiagramError;
use crate::geom::{Bisector, Feature, FeatureGeom, FeatureId, LineFrame, Point, Scene};

/// Ray family of a site.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum SiteFrame {
    /// Rays from `center` at absolute angle `param` in `[start, start + span]`.
    Angular {
        center: Point,
        start: f64,
        span: f64,
        cyclic: bool,
    },
    /// Rays along the free-side normal from `line.world(param, 0)`, `param ∈ [lo, hi]`.
    Linear { line: LineFrame, lo: f64, hi: f64 },
}

impl SiteFrame {
    pub fn ray(&self, param: f64) -> (Point, Point) {
        match *self {
            SiteFrame::Angular { center, .. } => (center, Point::polar(1.0, param)),
            SiteFrame::Linear { line, .. } => (line.world(param, 0.0), line.normal),
        }
    }

    pub fn domain(&self) -> (f64, f64) {
        match *self {
            SiteFrame::Angular { start, span, .. } => (start, start + span),
            SiteFrame::Linear { lo, hi, .. } => (lo, hi),
        }
    }

    pub fn is_cyclic(&self) -> bool {
        matches!(self, SiteFrame::Angular { cyclic: true, .. })
    }

    /// Site parameter of `p`, unwrapped to lie near `reference` for angles.
    pub fn param_near(&self, p: Point, reference: f64) -> f64 {
        match *self {
            SiteFrame::Angular { center, .. } => {
                let a = (p - center).angle();
                reference + wrap_pi(a - reference)
            }
            SiteFrame::Linear { line, .. } => line.local(p).0,
        }
    }

    /// Site parameter of `p` within the domain, if its ray lies in it.
    pub fn param_in_domain(&self, p: Point, slack: f64) -> Option<f64> {
        let (lo, hi) = self.domain();
        match *self {
            SiteFrame::Angular { cyclic: true, .. } => {
                let a = self.param_near(p, lo + PI);
                Some(a.clamp(lo, hi))
            }
            _ => {
                let a = self.param_near(p, 0.5 * (lo + hi));
                (a >= lo - slack && a <= hi + slack).then(|| a.clamp(lo, hi))
            }
        }
    }
}

/// Angle wrapped into (-π, π].
pub fn wrap_pi(a: f64) -> f64 {
    let mut x = a.rem_euclid(TAU);
    if x > PI {
        x -= TAU;
    }
    x
}

/// Distance along the ray `origin + r·dir` (r > 0) at which it first enters
/// the region strictly closer to `other` than to the ray's own site, given
/// that the ray origin is the site's nearest point for every `r`.
pub fn ray_entry(origin: Point, dir: Point, other: &Feature) -> Option<f64> {
    match other.geom {
        FeatureGeom::Vertex(q) => {
            let w = q - origin;
            let k = dir.dot(w);
            (k > 0.0).then(|| w.norm2() / (2.0 * k))
        }
        FeatureGeom::Edge { a, b } => {
            // Signed distance to the edge line: c0 + c1·r, required in (0, r).
            let m = other.normal;
            let c0 = m.dot(origin - a);
            let c1 = m.dot(dir);
            let mut lo = 0.0_f64;
            let mut hi = f64::INFINITY;
            // c0 + c1·r < r
            if 1.0 - c1 > 1e-15 {
                lo = lo.max(c0 / (1.0 - c1));
            } else if c0 >= 0.0 {
                return None;
            }
            // c0 + c1·r > 0
            if c1 > 0.0 {
                lo = lo.max(-c0 / c1);
            } else if c1 < 0.0 {
                hi = hi.min(-c0 / c1);
            } else if c0 <= 0.0 {
                return None;
            }
            // Foot strictly inside the edge.
            let e = b - a;
            let len = e.norm();
            let e = e / len;
            let l0 = e.dot(origin - a);
            let l1 = e.dot(dir);
            if l1.abs() < 1e-15 {
                if l0 <= 0.0 || l0 >= len {
                    return None;
                }
            } else {
                let (f1, f2) = ((0.0 - l0) / l1, (len - l0) / l1);
                lo = lo.max(f1.min(f2));
                hi = hi.min(f1.max(f2));
            }
            (lo < hi).then_some(lo)
        }
    }
}

/// One boundary piece of a Voronoi cell: over site parameters `[p0, p1]` the
/// boundary is the bisector with `neighbor`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CellPiece {
    pub p0: f64,
    pub p1: f64,
    pub neighbor: FeatureId,
    pub bisector: Bisector,
    /// Index into `VoronoiDiagram::edges`.
    pub edge: usize,
}

/// Voronoi cell of one site.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    pub feature: FeatureId,
    pub frame: SiteFrame,
    pub pieces: Vec<CellPiece>,
}

impl Cell {
    pub fn boundary_point(&self, param: f64, radius: f64) -> Point {
        let (o, d) = self.frame.ray(param);
        o + d * radius
    }
}

/// An edge of the Voronoi diagram: a bisector portion between two sites.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VoronoiEdge {
    pub features: (FeatureId, FeatureId),
    pub bisector: Bisector,
    pub t0: f64,
    pub t1: f64,
    pub start: Point,
    pub end: Point,
}

impl VoronoiEdge {
    /// Parameter minimizing clearance over the edge.
    pub fn clearance_min_t(&self) -> f64 {
        let (lo, hi) = (self.t0.min(self.t1), self.t0.max(self.t1));
        match self.bisector.min_clearance_t() {
            Some(t) => t.clamp(lo, hi),
            None => {
                if self.bisector.clearance(lo) <= self.bisector.clearance(hi) {
                    lo
                } else {
                    hi
                }
            }
        }
    }

    pub fn clearance_min_point(&self) -> Point {
        self.bisector.point(self.clearance_min_t())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VoronoiDiagram {
    pub cells: Vec<Cell>,
    pub edges: Vec<VoronoiEdge>,
    pub vertices: Vec<Point>,
    /// Cell index per feature (`None` for features owning no area).
    pub cell_of: Vec<Option<usize>>,
}

/// Maximum edge count per unit of scene complexity.
pub const VORONOI_SIZE_FACTOR: usize = 16;

/// Scene complexity used in size bounds: obstacle vertices plus box corners.
pub fn complexity(scene: &Scene) -> usize {
    scene.vertex_count() + 4
}

/// Envelope evaluator for one site.
pub(crate) struct Envelope<'a> {
    features: &'a [Feature],
    pub frame: SiteFrame,
    competitors: Vec<FeatureId>,
}

impl<'a> Envelope<'a> {
    pub fn new(scene: &'a Scene, site: FeatureId, frame: SiteFrame) -> Self {
        let features = scene.features();
        let me = &features[site];
        // Adjacent features never win strictly, except edges meeting at a
        // reflex corner.
        let shares_site_vertex = |f: &Feature| {
            f.adjacent
                .iter()
                .any(|j| me.adjacent.contains(j) && features[*j].is_site())
        };
        let competitors = features
            .iter()
            .enumerate()
            .filter(|(id, f)| {
                *id != site
                    && f.is_site()
                    && !(me.adjacent.contains(id)
                        && (f.kind() != me.kind()
                            || f.normal.dot(me.normal) < -1.0 + 1e-9
                            || shares_site_vertex(f)))
            })
            .map(|(id, _)| id)
            .collect();
        Self {
            features,
            frame,
            competitors,
        }
    }

    /// Boundary distance and the neighbor realizing it.
    pub fn eval(&self, param: f64) -> (f64, FeatureId) {
        let (o, d) = self.frame.ray(param);
        let mut best = (f64::INFINITY, usize::MAX);
        for &c in &self.competitors {
            if let Some(r) = ray_entry(o, d, &self.features[c]) {
                if r < best.0 {
                    best = (r, c);
                }
            }
        }
        best
    }

    fn refine(&self, a: f64, la: FeatureId, b: f64, lb: FeatureId, eps: f64, out: &mut Vec<f64>) {
        let (mut a, mut b) = (a, b);
        while b - a > eps {
            let m = 0.5 * (a + b);
            let (_, lm) = self.eval(m);
            if lm == la {
                a = m;
            } else if lm == lb {
                b = m;
            } else {
                self.refine(a, la, m, lm, eps, out);
                self.refine(m, lm, b, lb, eps, out);
                return;
            }
        }
        out.push(0.5 * (a + b));
    }

    /// Pieces `(p0, p1, neighbor)` covering the domain.
    pub fn pieces(&self, samples: usize) -> Result<Vec<(f64, f64, FeatureId)>, DiagramError> {
        let (lo, hi) = self.frame.domain();
        let n = samples.max(8);
        let params: Vec<f64> = (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect();
        let labels: Vec<FeatureId> = params.iter().map(|&p| self.eval(p).1).collect();
        if labels.contains(&usize::MAX) {
            return Err(DiagramError::Construction(
                "ray escapes without meeting another site".into(),
            ));
        }
        let eps = 1e-14 * (hi - lo).abs().max(1.0);
        let mut breaks = Vec::new();
        for i in 0..n {
            if labels[i] != labels[i + 1] {
                self.refine(params[i], labels[i], params[i + 1], labels[i + 1], eps, &mut breaks);
            }
        }
        let mut pieces = Vec::with_capacity(breaks.len() + 1);
        let mut start = lo;
        for &b in &breaks {
            let (_, l) = self.eval(0.5 * (start + b));
            pieces.push((start, b, l));
            start = b;
        }
        let (_, l) = self.eval(0.5 * (start + hi));
        pieces.push((start, hi, l));
        Ok(pieces)
    }
}

/// Ray family of a site, or `None` if it owns no area.
pub fn site_frame(scene: &Scene, id: FeatureId) -> Option<SiteFrame> {
    let f = scene.feature(id);
    match f.geom {
        FeatureGeom::Vertex(c) => f.wedge.map(|w| SiteFrame::Angular {
            center: c,
            start: w.start,
            span: w.span,
            cyclic: w.span >= TAU - 1e-12,
        }),
        FeatureGeom::Edge { a, b } => {
            let len = a.dist(b);
            let line = LineFrame::new(a, (b - a) / len, f.normal);
            // Ends at reflex corners collapse to the corner; stay just inside.
            let shrink = 1e-12 * len;
            let end_is_site = |v: Point| {
                f.adjacent.iter().any(|&j| {
                    let g = scene.feature(j);
                    g.vertex() == Some(v) && g.is_site()
                })
            };
            let lo = if end_is_site(a) { 0.0 } else { shrink };
            let hi = if end_is_site(b) { len } else { len - shrink };
            Some(SiteFrame::Linear { line, lo, hi })
        }
    }
}

fn samples_for(frame: &SiteFrame) -> usize {
    match frame {
        SiteFrame::Angular { span, .. } => ((span / TAU) * 720.0).ceil().max(48.0) as usize,
        SiteFrame::Linear { .. } => 360,
    }
}

/// Build the Voronoi diagram of all sites of the scene.
pub fn build_voronoi(scene: &Scene) -> Result<VoronoiDiagram, DiagramError> {
    let tol = 1e-7 * scene.scale();
    let features = scene.features();
    let mut cells = Vec::new();
    let mut cell_of = vec![None; features.len()];
    for id in 0..features.len() {
        let Some(mut frame) = site_frame(scene, id) else {
            continue;
        };
        let env = Envelope::new(scene, id, frame);
        let mut raw = env.pieces(samples_for(&frame))?;
        if frame.is_cyclic() {
            // Rotate the seam onto a breakpoint so no piece straddles it.
            if raw.len() > 1 && raw[0].2 == raw[raw.len() - 1].2 {
                let first = raw.remove(0);
                let last = raw.last_mut().expect("len > 1");
                last.1 = first.1 + TAU;
            }
            if let SiteFrame::Angular {
                ref mut start,
                ..
            } = frame
            {
                *start = raw[0].0;
            }
        }
        let env = Envelope::new(scene, id, frame);
        let radius = |p: f64| env.eval(p).0;
        // Drop pieces whose boundary collapses to a point (degenerate vertices).
        let mut merged: Vec<(f64, f64, FeatureId)> = Vec::new();
        for piece in raw {
            let a = boundary(&frame, piece.0, radius(piece.0));
            let b = boundary(&frame, piece.1, radius(piece.1));
            if a.dist(b) <= tol && !merged.is_empty() {
                merged.last_mut().expect("non-empty").1 = piece.1;
                continue;
            }
            if let Some(last) = merged.last_mut() {
                if last.2 == piece.2 {
                    last.1 = piece.1;
                    continue;
                }
            }
            merged.push(piece);
        }
        if merged.len() > 1 {
            let first = merged[0];
            let a = boundary(&frame, first.0, radius(first.0));
            let b = boundary(&frame, first.1, radius(first.1));
            if a.dist(b) <= tol {
                merged.remove(0);
                merged[0].0 = first.0;
            }
        }
        let mut pieces = Vec::with_capacity(merged.len());
        for (p0, p1, nb) in merged {
            let bisector = Bisector::between(&features[id], &features[nb]).ok_or_else(|| {
                DiagramError::Construction(format!("features {id} and {nb} have no bisector"))
            })?;
            pieces.push(CellPiece {
                p0,
                p1,
                neighbor: nb,
                bisector,
                edge: usize::MAX,
            });
        }
        cell_of[id] = Some(cells.len());
        cells.push(Cell {
            feature: id,
            frame,
            pieces,
        });
    }

    let mut edges: Vec<VoronoiEdge> = Vec::new();
    let mut vertices: Vec<Point> = Vec::new();
    for cell in cells.iter_mut() {
        let env = Envelope::new(scene, cell.feature, cell.frame);
        for piece in cell.pieces.iter_mut() {
            let a = boundary(&cell.frame, piece.p0, env.eval(piece.p0).0);
            let b = boundary(&cell.frame, piece.p1, env.eval(piece.p1).0);
            for v in [a, b] {
                if !vertices.iter().any(|w| w.dist(v) <= tol) {
                    vertices.push(v);
                }
            }
            let key = (cell.feature.min(piece.neighbor), cell.feature.max(piece.neighbor));
            let found = edges.iter().position(|e| {
                e.features == key
                    && ((e.start.dist(a) <= tol && e.end.dist(b) <= tol)
                        || (e.start.dist(b) <= tol && e.end.dist(a) <= tol))
            });
            piece.edge = match found {
                Some(i) => i,
                None => {
                    edges.push(VoronoiEdge {
                        features: key,
                        bisector: piece.bisector,
                        t0: piece.bisector.project(a),
                        t1: piece.bisector.project(b),
                        start: a,
                        end: b,
                    });
                    edges.len() - 1
                }
            };
        }
    }
    let bound = VORONOI_SIZE_FACTOR * complexity(scene);
    if edges.len() > bound {
        return Err(DiagramError::TooLarge {
            count: edges.len(),
            bound,
        });
    }
    Ok(VoronoiDiagram {
        cells,
        edges,
        vertices,
        cell_of,
    })
}

fn boundary(frame: &SiteFrame, param: f64, r: f64) -> Point {
    let (o, d) = frame.ray(param);
    o + d * r
}
