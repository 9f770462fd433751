use serde::{Deserialize, Serialize};

use super::bisector::Bisector;
use super::cost::{arc_cost_angles, spiral_cost, Curve, LineFrame};
use super::point::{signed_angle, Point};
use super::scene::{Feature, FeatureGeom, FeatureId};
use crate::error::GeomError;

/// Chaining tolerance between consecutive primitives, relative to scene scale.
pub const CHAIN_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PrimitiveKind {
    LogSpiral,
    ClearanceArc,
    RadialSegment,
    VoronoiEdgePortion,
    /// Circular arc centered on an edge feature's supporting line.
    GeodesicArc,
}

impl PrimitiveKind {
    pub fn name(self) -> &'static str {
        match self {
            PrimitiveKind::LogSpiral => "log_spiral",
            PrimitiveKind::ClearanceArc => "clearance_arc",
            PrimitiveKind::RadialSegment => "radial_segment",
            PrimitiveKind::VoronoiEdgePortion => "voronoi_edge_portion",
            PrimitiveKind::GeodesicArc => "geodesic_arc",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Geometry {
    /// Straight in log-polar coordinates about `center`.
    Spiral {
        center: Point,
        r0: f64,
        theta0: f64,
        r1: f64,
        dtheta: f64,
    },
    Arc {
        center: Point,
        radius: f64,
        phi0: f64,
        dphi: f64,
    },
    Segment {
        a: Point,
        b: Point,
    },
    Bisector {
        curve: Bisector,
        t0: f64,
        t1: f64,
    },
}

impl Geometry {
    pub fn reversed(&self) -> Geometry {
        match *self {
            Geometry::Spiral {
                center,
                r0,
                theta0,
                r1,
                dtheta,
            } => Geometry::Spiral {
                center,
                r0: r1,
                theta0: theta0 + dtheta,
                r1: r0,
                dtheta: -dtheta,
            },
            Geometry::Arc {
                center,
                radius,
                phi0,
                dphi,
            } => Geometry::Arc {
                center,
                radius,
                phi0: phi0 + dphi,
                dphi: -dphi,
            },
            Geometry::Segment { a, b } => Geometry::Segment { a: b, b: a },
            Geometry::Bisector { curve, t0, t1 } => Geometry::Bisector {
                curve,
                t0: t1,
                t1: t0,
            },
        }
    }
}

impl Curve for Geometry {
    fn point_at(&self, s: f64) -> Point {
        match *self {
            Geometry::Spiral {
                center,
                r0,
                theta0,
                r1,
                dtheta,
            } => {
                let r = r0 * (r1 / r0).powf(s);
                center + Point::polar(r, theta0 + s * dtheta)
            }
            Geometry::Arc {
                center,
                radius,
                phi0,
                dphi,
            } => center + Point::polar(radius, phi0 + s * dphi),
            Geometry::Segment { a, b } => a.lerp(b, s),
            Geometry::Bisector { curve, t0, t1 } => curve.point(t0 + s * (t1 - t0)),
        }
    }

    fn speed_at(&self, s: f64) -> f64 {
        match *self {
            Geometry::Spiral {
                r0, r1, dtheta, ..
            } => {
                let l = (r1 / r0).ln();
                r0 * (r1 / r0).powf(s) * dtheta.hypot(l)
            }
            Geometry::Arc { radius, dphi, .. } => radius * dphi.abs(),
            Geometry::Segment { a, b } => a.dist(b),
            Geometry::Bisector { curve, t0, t1 } => {
                curve.tangent(t0 + s * (t1 - t0)).norm() * (t1 - t0).abs()
            }
        }
    }
}

/// One analytic piece of a path with its exact cost.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Primitive {
    pub kind: PrimitiveKind,
    /// The feature the piece is expressed against; absent for Voronoi-edge portions.
    pub feature: Option<FeatureId>,
    pub start: Point,
    pub end: Point,
    pub geometry: Geometry,
    pub cost: f64,
}

impl Primitive {
    pub fn reversed(&self) -> Primitive {
        Primitive {
            kind: self.kind,
            feature: self.feature,
            start: self.end,
            end: self.start,
            geometry: self.geometry.reversed(),
            cost: self.cost,
        }
    }

    pub fn sample(&self, nodes: usize) -> Vec<Point> {
        let n = nodes.max(2);
        (0..n)
            .map(|i| self.geometry.point_at(i as f64 / (n - 1) as f64))
            .collect()
    }

    pub fn radial(feature: FeatureId, a: Point, b: Point, clr_a: f64, clr_b: f64) -> Primitive {
        Primitive {
            kind: PrimitiveKind::RadialSegment,
            feature: Some(feature),
            start: a,
            end: b,
            geometry: Geometry::Segment { a, b },
            cost: (clr_b / clr_a).ln().abs(),
        }
    }

    pub fn bisector_portion(curve: Bisector, t0: f64, t1: f64) -> Primitive {
        Primitive {
            kind: PrimitiveKind::VoronoiEdgePortion,
            feature: None,
            start: curve.point(t0),
            end: curve.point(t1),
            geometry: Geometry::Bisector { curve, t0, t1 },
            cost: curve.cost(t0, t1),
        }
    }
}

impl Curve for Primitive {
    fn point_at(&self, s: f64) -> Point {
        self.geometry.point_at(s)
    }
    fn speed_at(&self, s: f64) -> f64 {
        self.geometry.speed_at(s)
    }
}

/// Chain of primitives with the sum of their costs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Path {
    pub primitives: Vec<Primitive>,
    pub cost: f64,
}

impl Path {
    pub fn new(primitives: Vec<Primitive>) -> Path {
        let cost = primitives.iter().map(|p| p.cost).sum();
        Path { primitives, cost }
    }

    pub fn start(&self) -> Option<Point> {
        self.primitives.first().map(|p| p.start)
    }

    pub fn end(&self) -> Option<Point> {
        self.primitives.last().map(|p| p.end)
    }

    pub fn reversed(&self) -> Path {
        Path {
            primitives: self.primitives.iter().rev().map(Primitive::reversed).collect(),
            cost: self.cost,
        }
    }

    /// Largest gap between consecutive primitive endpoints.
    pub fn max_gap(&self) -> f64 {
        self.primitives
            .windows(2)
            .map(|w| w[0].end.dist(w[1].start))
            .fold(0.0, f64::max)
    }

    pub fn check_chain(&self, scale: f64) -> Result<(), GeomError> {
        let gap = self.max_gap();
        if gap > CHAIN_TOL * scale {
            return Err(GeomError::Precondition(format!(
                "primitive chain has a gap of {gap:e}"
            )));
        }
        Ok(())
    }

    pub fn polyline(&self, nodes_per_primitive: usize) -> Vec<Point> {
        let mut out: Vec<Point> = Vec::new();
        for p in &self.primitives {
            let pts = p.sample(nodes_per_primitive);
            let skip = usize::from(!out.is_empty());
            out.extend(pts.into_iter().skip(skip));
        }
        out
    }
}

/// Minimal-cost path between `p` and `q` relative to feature `o` alone.
///
/// Vertex features give a single logarithmic spiral. Edge features give the
/// circular arc through both points centered on the supporting line, or a
/// radial segment when the two feet coincide.
pub fn single_feature_geodesic(
    id: FeatureId,
    o: &Feature,
    p: Point,
    q: Point,
) -> Result<Vec<Primitive>, GeomError> {
    if p == q {
        return Ok(Vec::new());
    }
    match o.geom {
        FeatureGeom::Vertex(c) => Ok(vec![vertex_geodesic(id, c, p, q)?]),
        FeatureGeom::Edge { a, b } => {
            let frame = LineFrame::new(a, (b - a).unit(), o.normal);
            Ok(vec![edge_geodesic(id, &frame, p, q)?])
        }
    }
}

/// Logarithmic spiral about a vertex feature at `center`.
pub fn vertex_geodesic(
    id: FeatureId,
    center: Point,
    p: Point,
    q: Point,
) -> Result<Primitive, GeomError> {
    let cost = spiral_cost(center, p, q)?;
    let (dp, dq) = (p - center, q - center);
    Ok(Primitive {
        kind: PrimitiveKind::LogSpiral,
        feature: Some(id),
        start: p,
        end: q,
        geometry: Geometry::Spiral {
            center,
            r0: dp.norm(),
            theta0: dp.angle(),
            r1: dq.norm(),
            dtheta: signed_angle(dp, dq),
        },
        cost,
    })
}

/// Geodesic of the half-plane metric `ds / y` above `frame`'s line.
pub fn edge_geodesic(
    id: FeatureId,
    frame: &LineFrame,
    p: Point,
    q: Point,
) -> Result<Primitive, GeomError> {
    let (xp, yp) = frame.local(p);
    let (xq, yq) = frame.local(q);
    if yp <= 0.0 || yq <= 0.0 {
        return Err(GeomError::Degenerate("geodesic endpoint on the edge line".into()));
    }
    if (xp - xq).abs() <= 1e-12 * yp.max(yq) {
        return Ok(Primitive::radial(id, p, q, yp, yq));
    }
    let xc = (xp * xp + yp * yp - xq * xq - yq * yq) / (2.0 * (xp - xq));
    let center = frame.world(xc, 0.0);
    let (dp, dq) = (p - center, q - center);
    let cost = arc_cost_angles(yp.atan2(xp - xc), yq.atan2(xq - xc));
    Ok(Primitive {
        kind: PrimitiveKind::GeodesicArc,
        feature: Some(id),
        start: p,
        end: q,
        geometry: Geometry::Arc {
            center,
            radius: dp.norm(),
            phi0: dp.angle(),
            dphi: signed_angle(dp, dq),
        },
        cost,
    })
}
