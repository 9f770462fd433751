//! Refined cells, their boundary edges, and constant-clearance arcs.

use serde::{Deserialize, Serialize};

use super::diagram::wrap_pi;
use crate::error::DiagramError;
use crate::geom::{Bisector, FeatureId, Geometry, LineFrame, Point, Primitive, PrimitiveKind};

pub type EdgeId = usize;

/// Why a radial edge exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialRole {
    /// Joins a feature to a Voronoi vertex.
    VoronoiVertex,
    /// Joins a feature to the clearance minimum of a Voronoi edge.
    ClearanceMin,
    /// Passes through the source or target, or mirrors such a split.
    Connector,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum EdgeShape {
    /// `foot + c·dir` for clearance `c ∈ [0, top]`; parameter is the clearance.
    Radial {
        feature: FeatureId,
        foot: Point,
        dir: Point,
        top: f64,
        role: RadialRole,
    },
    /// Voronoi edge portion; parameter is the bisector parameter.
    External {
        bisector: Bisector,
        t0: f64,
        t1: f64,
        features: (FeatureId, FeatureId),
        voronoi_edge: usize,
    },
}

/// Edge of the refined diagram, shared by the cells on both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct REdge {
    pub shape: EdgeShape,
    pub cells: Vec<usize>,
}

impl REdge {
    pub fn is_internal(&self) -> bool {
        matches!(self.shape, EdgeShape::Radial { .. })
    }

    /// Parameter range, low to high.
    pub fn range(&self) -> (f64, f64) {
        match self.shape {
            EdgeShape::Radial { top, .. } => (0.0, top),
            EdgeShape::External { t0, t1, .. } => (t0.min(t1), t0.max(t1)),
        }
    }

    pub fn point(&self, param: f64) -> Point {
        match self.shape {
            EdgeShape::Radial { foot, dir, .. } => foot + dir * param,
            EdgeShape::External { bisector, .. } => bisector.point(param),
        }
    }

    pub fn clearance(&self, param: f64) -> f64 {
        match self.shape {
            EdgeShape::Radial { .. } => param,
            EdgeShape::External { bisector, .. } => bisector.clearance(param),
        }
    }

    pub fn param_of(&self, p: Point) -> f64 {
        match self.shape {
            EdgeShape::Radial { foot, dir, .. } => (p - foot).dot(dir),
            EdgeShape::External { bisector, .. } => bisector.project(p),
        }
    }

    pub fn endpoints(&self) -> (Point, Point) {
        let (lo, hi) = self.range();
        (self.point(lo), self.point(hi))
    }

    /// Cost of the portion between two parameters.
    pub fn cost(&self, a: f64, b: f64) -> f64 {
        match self.shape {
            EdgeShape::Radial { .. } => (b / a).ln().abs(),
            EdgeShape::External { bisector, .. } => bisector.cost(a, b),
        }
    }

    /// Parameter reached after spending cost `d` from `param` toward the high
    /// (`forward`) or low end; the flag reports clamping at an endpoint.
    pub fn advance(&self, param: f64, d: f64, forward: bool) -> (f64, bool) {
        let (lo, hi) = self.range();
        let raw = match self.shape {
            EdgeShape::Radial { .. } => param * if forward { d.exp() } else { (-d).exp() },
            EdgeShape::External { bisector, .. } => bisector.advance(param, d, forward),
        };
        if raw > hi {
            (hi, true)
        } else if raw < lo {
            (lo, true)
        } else {
            (raw, false)
        }
    }

    /// The portion between two parameters as a path primitive.
    pub fn primitive(&self, a: f64, b: f64) -> Primitive {
        match self.shape {
            EdgeShape::Radial { feature, .. } => {
                Primitive::radial(feature, self.point(a), self.point(b), a, b)
            }
            EdgeShape::External { bisector, .. } => Primitive::bisector_portion(bisector, a, b),
        }
    }
}

/// The unique point of a radial edge at clearance `c ∈ (0, top]`.
pub fn point_at_clearance(edge: &REdge, c: f64) -> Result<Point, DiagramError> {
    match edge.shape {
        EdgeShape::Radial { foot, dir, top, .. } => {
            if !(c > 0.0 && c <= top * (1.0 + 1e-12)) {
                return Err(DiagramError::OutOfRange {
                    value: c,
                    lo: 0.0,
                    hi: top,
                });
            }
            Ok(foot + dir * c.min(top))
        }
        EdgeShape::External { .. } => Err(DiagramError::Construction(
            "clearance lookup on a Voronoi edge".into(),
        )),
    }
}

/// Local frame of a refined cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum CellFrame {
    /// Vertex feature at `center`; α and β are the rays at the given absolute angles.
    Vertex {
        center: Point,
        theta_alpha: f64,
        theta_beta: f64,
    },
    /// Edge feature on `line`; α and β are the normals at abscissae `s_alpha`, `s_beta`.
    Edge {
        line: LineFrame,
        s_alpha: f64,
        s_beta: f64,
    },
}

/// Cell of the refined diagram: bounded by the feature, two radial edges and
/// one Voronoi edge portion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinedCell {
    pub feature: FeatureId,
    pub neighbor: FeatureId,
    pub frame: CellFrame,
    pub bisector: Bisector,
    pub kappa: EdgeId,
    /// Radial edge with the lower top clearance.
    pub alpha: EdgeId,
    pub beta: EdgeId,
    pub u: Point,
    pub v: Point,
    pub clr_u: f64,
    pub clr_v: f64,
    pub t_u: f64,
    pub t_v: f64,
}

/// Maximal constant-clearance path in a cell starting on β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConstClearanceArc {
    pub w: Point,
    pub w_bar: Point,
    pub on_alpha: bool,
    pub clearance: f64,
    /// Bisector parameter of `w_bar` when it lies on κ.
    pub kappa_t: Option<f64>,
    pub cost: f64,
    pub primitive: Primitive,
}

impl RefinedCell {
    pub fn is_vertex(&self) -> bool {
        matches!(self.frame, CellFrame::Vertex { .. })
    }

    pub fn param_alpha(&self) -> f64 {
        match self.frame {
            CellFrame::Vertex { theta_alpha, .. } => theta_alpha,
            CellFrame::Edge { s_alpha, .. } => s_alpha,
        }
    }

    pub fn param_beta(&self) -> f64 {
        match self.frame {
            CellFrame::Vertex { theta_beta, .. } => theta_beta,
            CellFrame::Edge { s_beta, .. } => s_beta,
        }
    }

    /// Foot and unit direction of the ray at a site parameter.
    pub fn ray(&self, param: f64) -> (Point, Point) {
        match self.frame {
            CellFrame::Vertex { center, .. } => (center, Point::polar(1.0, param)),
            CellFrame::Edge { line, .. } => (line.world(param, 0.0), line.normal),
        }
    }

    /// Site parameter of `p` (angle unwrapped into the cell's range).
    pub fn site_param(&self, p: Point) -> f64 {
        match self.frame {
            CellFrame::Vertex {
                center,
                theta_alpha,
                theta_beta,
            } => {
                let mid = 0.5 * (theta_alpha + theta_beta);
                mid + wrap_pi((p - center).angle() - mid)
            }
            CellFrame::Edge { line, .. } => line.local(p).0,
        }
    }

    /// Distance from the feature along the ray through `p` (signed for edges).
    pub fn height(&self, p: Point) -> f64 {
        match self.frame {
            CellFrame::Vertex { center, .. } => p.dist(center),
            CellFrame::Edge { line, .. } => line.local(p).1,
        }
    }

    pub fn point_at(&self, param: f64, height: f64) -> Point {
        let (o, d) = self.ray(param);
        o + d * height
    }

    /// Height of κ over a site parameter.
    pub fn kappa_height(&self, param: f64) -> f64 {
        let (o, d) = self.ray(param);
        self.bisector
            .ray_hit(o, d)
            .unwrap_or(if self.clr_u <= self.clr_v { self.clr_u } else { self.clr_v })
    }

    pub fn param_range(&self) -> (f64, f64) {
        let (a, b) = (self.param_alpha(), self.param_beta());
        (a.min(b), a.max(b))
    }

    /// Closed-cell membership with positional slack `tol`.
    pub fn contains(&self, p: Point, tol: f64) -> bool {
        let (lo, hi) = self.param_range();
        let q = self.site_param(p);
        let h = self.height(p);
        let slack = match self.frame {
            CellFrame::Vertex { .. } => tol / h.max(tol),
            CellFrame::Edge { .. } => tol,
        };
        if q < lo - slack || q > hi + slack || h < -tol {
            return false;
        }
        h <= self.kappa_height(q.clamp(lo, hi)) + tol
    }

    pub fn alpha_point(&self, c: f64) -> Point {
        self.point_at(self.param_alpha(), c)
    }

    pub fn beta_point(&self, c: f64) -> Point {
        self.point_at(self.param_beta(), c)
    }

    /// Bisector parameter of the κ point with clearance `c ∈ [clr_u, clr_v]`.
    pub fn kappa_t_at_clearance(&self, c: f64) -> Option<f64> {
        let t_ref = if self.t_v.abs() >= self.t_u.abs() {
            self.t_v
        } else {
            self.t_u
        };
        let t = self.bisector.t_at_clearance(c, t_ref)?;
        let (lo, hi) = (self.t_u.min(self.t_v), self.t_u.max(self.t_v));
        Some(t.clamp(lo, hi))
    }

    /// κ restricted to the cell, as `(t_low_clearance, t_high_clearance)`.
    pub fn kappa_span(&self) -> (f64, f64) {
        (self.t_u, self.t_v)
    }

    /// The arc of clearance `c` starting at the β point of that clearance.
    pub fn eta(&self, c: f64) -> Result<ConstClearanceArc, DiagramError> {
        let top = self.clr_v;
        if !(c > 0.0 && c <= top * (1.0 + 1e-9)) {
            return Err(DiagramError::OutOfRange {
                value: c,
                lo: 0.0,
                hi: top,
            });
        }
        let c = c.min(top);
        let w = self.beta_point(c);
        let (w_bar, on_alpha, kappa_t) = if c <= self.clr_u * (1.0 + 1e-12) {
            (self.alpha_point(c), true, None)
        } else {
            let t = self.kappa_t_at_clearance(c).ok_or(DiagramError::OutOfRange {
                value: c,
                lo: self.clr_u,
                hi: self.clr_v,
            })?;
            (self.bisector.point(t), false, Some(t))
        };
        let (cost, geometry) = match self.frame {
            CellFrame::Vertex { center, .. } => {
                let phi0 = (w - center).angle();
                let dphi = wrap_pi((w_bar - center).angle() - phi0);
                (
                    dphi.abs(),
                    Geometry::Arc {
                        center,
                        radius: c,
                        phi0,
                        dphi,
                    },
                )
            }
            CellFrame::Edge { line, .. } => {
                let dx = line.local(w_bar).0 - line.local(w).0;
                (dx.abs() / c, Geometry::Segment { a: w, b: w_bar })
            }
        };
        Ok(ConstClearanceArc {
            w,
            w_bar,
            on_alpha,
            clearance: c,
            kappa_t,
            cost,
            primitive: Primitive {
                kind: PrimitiveKind::ClearanceArc,
                feature: Some(self.feature),
                start: w,
                end: w_bar,
                geometry,
                cost,
            },
        })
    }
}
