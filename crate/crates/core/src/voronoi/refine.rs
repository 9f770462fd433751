//! Refinement of the Voronoi diagram into cells with one feature side, two
//! radial edges and one Voronoi edge portion.

use serde::{Deserialize, Serialize};

use super::cell::{CellFrame, EdgeId, EdgeShape, REdge, RadialRole, RefinedCell};
use super::diagram::{complexity, Envelope, SiteFrame, VoronoiDiagram};
use crate::error::DiagramError;
use crate::geom::{FeatureId, Point, PointIndex, Scene};

/// Maximum refined edge count per unit of scene complexity.
pub const REFINED_SIZE_FACTOR: usize = 64;

/// Where the source or target sits in the refined diagram.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Connector {
    pub point: Point,
    pub feature: FeatureId,
    /// Radial edge through the point.
    pub edge: EdgeId,
    /// Clearance of the point, which is its parameter on `edge`.
    pub clearance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedDiagram {
    pub voronoi: VoronoiDiagram,
    pub cells: Vec<RefinedCell>,
    pub edges: Vec<REdge>,
    pub source: Connector,
    pub target: Connector,
    /// Positional tolerance used for merging.
    pub tol: f64,
}

impl RefinedDiagram {
    pub fn internal_edges(&self) -> impl Iterator<Item = (EdgeId, &REdge)> {
        self.edges.iter().enumerate().filter(|(_, e)| e.is_internal())
    }

    pub fn external_edges(&self) -> impl Iterator<Item = (EdgeId, &REdge)> {
        self.edges.iter().enumerate().filter(|(_, e)| !e.is_internal())
    }

    /// Cells whose closure contains `p`.
    pub fn cells_containing(&self, p: Point) -> Vec<usize> {
        (0..self.cells.len())
            .filter(|&i| self.cells[i].contains(p, self.tol))
            .collect()
    }
}

struct Located {
    cell: usize,
    piece: usize,
    param: f64,
    height: f64,
    top: f64,
}

fn locate(scene: &Scene, vd: &VoronoiDiagram, p: Point, tol: f64) -> Option<Located> {
    let mut best: Option<Located> = None;
    for (ci, cell) in vd.cells.iter().enumerate() {
        let Some(param) = cell.frame.param_in_domain(p, 1e-12) else {
            continue;
        };
        let (foot, dir) = cell.frame.ray(param);
        let height = (p - foot).dot(dir);
        if height <= 0.0 || (foot + dir * height).dist(p) > tol {
            continue;
        }
        let env = Envelope::new(scene, cell.feature, cell.frame);
        let top = env.eval(param).0;
        if height > top + tol || best.as_ref().is_some_and(|b| b.height <= height) {
            continue;
        }
        let piece = cell
            .pieces
            .iter()
            .position(|pc| param >= pc.p0 && param <= pc.p1)
            .unwrap_or(0);
        best = Some(Located {
            cell: ci,
            piece,
            param,
            height,
            top,
        });
    }
    best
}

#[derive(Default)]
struct EdgeStore {
    edges: Vec<REdge>,
    /// Radial edges indexed by top point.
    tops: Option<PointIndex>,
    radial_at: Vec<Vec<EdgeId>>,
    /// External edges per Voronoi edge.
    external_of: Vec<Vec<EdgeId>>,
}

impl EdgeStore {
    fn radial(
        &mut self,
        feature: FeatureId,
        foot: Point,
        dir: Point,
        top: f64,
        role: RadialRole,
        tol: f64,
    ) -> EdgeId {
        let tops = self.tops.get_or_insert_with(|| PointIndex::new(tol));
        let top_pt = foot + dir * top;
        for slot in tops.near(top_pt) {
            for &id in &self.radial_at[slot] {
                if let EdgeShape::Radial { foot: f, .. } = self.edges[id].shape {
                    if f.dist(foot) <= tol {
                        return id;
                    }
                }
            }
        }
        let (slot, fresh) = tops.get_or_insert(top_pt);
        if fresh {
            self.radial_at.push(Vec::new());
        }
        let id = self.edges.len();
        self.edges.push(REdge {
            shape: EdgeShape::Radial {
                feature,
                foot,
                dir,
                top,
                role,
            },
            cells: Vec::new(),
        });
        self.radial_at[slot].push(id);
        id
    }

    fn external(&mut self, vd: &VoronoiDiagram, k: usize, a: Point, b: Point, tol: f64) -> EdgeId {
        let e = &vd.edges[k];
        for &id in &self.external_of[k] {
            let (p, q) = self.edges[id].endpoints();
            if (p.dist(a) <= tol && q.dist(b) <= tol) || (p.dist(b) <= tol && q.dist(a) <= tol) {
                return id;
            }
        }
        let id = self.edges.len();
        self.edges.push(REdge {
            shape: EdgeShape::External {
                bisector: e.bisector,
                t0: e.bisector.project(a),
                t1: e.bisector.project(b),
                features: e.features,
                voronoi_edge: k,
            },
            cells: Vec::new(),
        });
        self.external_of[k].push(id);
        id
    }
}

/// Split every Voronoi cell into refined cells.
pub fn refine(vd: VoronoiDiagram, scene: &Scene) -> Result<RefinedDiagram, DiagramError> {
    let tol = 1e-7 * scene.scale();
    let point_tol = 1e-9 * scene.scale();

    // Split points on Voronoi edges, shared by both incident cells.
    let mut edge_splits: Vec<Vec<(f64, RadialRole)>> = vec![Vec::new(); vd.edges.len()];
    let interior = |k: usize, t: f64| {
        let e = &vd.edges[k];
        let (lo, hi) = (e.t0.min(e.t1), e.t0.max(e.t1));
        let p = e.bisector.point(t);
        t > lo && t < hi && p.dist(e.start) > point_tol && p.dist(e.end) > point_tol
    };
    for (k, e) in vd.edges.iter().enumerate() {
        if let Some(t) = e.bisector.min_clearance_t() {
            if interior(k, t) {
                edge_splits[k].push((t, RadialRole::ClearanceMin));
            }
        }
    }

    let mut cell_splits: Vec<Vec<f64>> = vec![Vec::new(); vd.cells.len()];
    let mut ends = Vec::new();
    for (name, p) in [("source", scene.source()), ("target", scene.target())] {
        let loc = locate(scene, &vd, p, tol).ok_or_else(|| {
            DiagramError::Construction(format!("{name} is not inside any Voronoi cell"))
        })?;
        cell_splits[loc.cell].push(loc.param);
        let cell = &vd.cells[loc.cell];
        let piece = &cell.pieces[loc.piece];
        let y = cell.boundary_point(loc.param, loc.top);
        let t = vd.edges[piece.edge].bisector.project(y);
        if interior(piece.edge, t) {
            edge_splits[piece.edge].push((t, RadialRole::Connector));
        }
        ends.push((p, loc));
    }

    let mut store = EdgeStore {
        external_of: vec![Vec::new(); vd.edges.len()],
        ..Default::default()
    };
    let mut cells: Vec<RefinedCell> = Vec::new();
    for (ci, cell) in vd.cells.iter().enumerate() {
        for piece in &cell.pieces {
            let bis = vd.edges[piece.edge].bisector;
            let top_of = |q: f64| -> Result<(Point, Point, f64), DiagramError> {
                let (o, d) = cell.frame.ray(q);
                let r = bis.ray_hit(o, d).ok_or_else(|| {
                    DiagramError::Construction(format!(
                        "ray of feature {} misses its bisector with {}",
                        cell.feature, piece.neighbor
                    ))
                })?;
                Ok((o, d, r))
            };
            let mid = 0.5 * (piece.p0 + piece.p1);
            let mut params = vec![
                (piece.p0, RadialRole::VoronoiVertex),
                (piece.p1, RadialRole::VoronoiVertex),
            ];
            for &(t, role) in &edge_splits[piece.edge] {
                let q = cell.frame.param_near(bis.point(t), mid);
                if q > piece.p0 && q < piece.p1 {
                    params.push((q, role));
                }
            }
            for &q in &cell_splits[ci] {
                if q > piece.p0 && q < piece.p1 {
                    params.push((q, RadialRole::Connector));
                }
            }
            params.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut kept: Vec<(f64, RadialRole, Point, Point, f64)> = Vec::new();
            for (i, &(q, role)) in params.iter().enumerate() {
                let (o, d, r) = top_of(q)?;
                let is_last = i + 1 == params.len();
                if let Some(prev) = kept.last() {
                    let close = prev.2.dist(o) <= point_tol
                        && (prev.2 + prev.3 * prev.4).dist(o + d * r) <= point_tol;
                    if close {
                        if is_last {
                            kept.pop();
                        } else {
                            continue;
                        }
                    }
                }
                kept.push((q, role, o, d, r));
            }
            for w in kept.windows(2) {
                let (q0, role0, o0, d0, r0) = w[0];
                let (q1, role1, o1, d1, r1) = w[1];
                let e0 = store.radial(cell.feature, o0, d0, r0, role0, tol);
                let e1 = store.radial(cell.feature, o1, d1, r1, role1, tol);
                let (top0, top1) = (o0 + d0 * r0, o1 + d1 * r1);
                let ek = store.external(&vd, piece.edge, top0, top1, tol);
                let (t0, t1) = (bis.project(top0), bis.project(top1));
                let low_first = r0 <= r1;
                let (alpha, beta, u, v, clr_u, clr_v, t_u, t_v, pa, pb) = if low_first {
                    (e0, e1, top0, top1, r0, r1, t0, t1, q0, q1)
                } else {
                    (e1, e0, top1, top0, r1, r0, t1, t0, q1, q0)
                };
                let frame = match cell.frame {
                    SiteFrame::Angular { center, .. } => CellFrame::Vertex {
                        center,
                        theta_alpha: pa,
                        theta_beta: pb,
                    },
                    SiteFrame::Linear { line, .. } => CellFrame::Edge {
                        line,
                        s_alpha: pa,
                        s_beta: pb,
                    },
                };
                let id = cells.len();
                for e in [alpha, beta, ek] {
                    store.edges[e].cells.push(id);
                }
                cells.push(RefinedCell {
                    feature: cell.feature,
                    neighbor: piece.neighbor,
                    frame,
                    bisector: bis,
                    kappa: ek,
                    alpha,
                    beta,
                    u,
                    v,
                    clr_u,
                    clr_v,
                    t_u,
                    t_v,
                });
            }
        }
    }

    let mut connectors = Vec::new();
    for (p, loc) in ends {
        let cell = &vd.cells[loc.cell];
        let (o, d) = cell.frame.ray(loc.param);
        let edge = store.radial(cell.feature, o, d, loc.top, RadialRole::Connector, tol);
        if store.edges[edge].cells.is_empty() {
            return Err(DiagramError::Construction(
                "connector edge does not bound any cell".into(),
            ));
        }
        connectors.push(Connector {
            point: p,
            feature: cell.feature,
            edge,
            clearance: loc.height,
        });
    }

    let bound = REFINED_SIZE_FACTOR * complexity(scene);
    if store.edges.len() > bound {
        return Err(DiagramError::TooLarge {
            count: store.edges.len(),
            bound,
        });
    }
    Ok(RefinedDiagram {
        voronoi: vd,
        cells,
        edges: store.edges,
        source: connectors[0],
        target: connectors[1],
        tol,
    })
}
