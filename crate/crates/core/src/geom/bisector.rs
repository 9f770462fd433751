//! Bisector curves between two features, each parameterized by a scalar `t`
//! along a canonical direction. Every kind has a closed-form cost
//! antiderivative `F` with `cost(t1, t2) = |F(t2) - F(t1)|`.

use serde::{Deserialize, Serialize};

use super::point::Point;
use super::scene::{Feature, FeatureGeom};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Bisector {
    /// Two vertices: `mid + t·dir`, clearance `sqrt(t² + half²)`.
    PointPoint { mid: Point, dir: Point, half: f64 },
    /// Two edges on intersecting lines: `apex + t·dir` with `t > 0`, clearance `slope·t`.
    LineLine { apex: Point, dir: Point, slope: f64 },
    /// Two facing parallel edges: `origin + t·dir`, clearance `h`.
    Parallel { origin: Point, dir: Point, h: f64 },
    /// Vertex (focus) and edge (directrix):
    /// `base + t·along + (t²/(4a) + a)·normal`, clearance `t²/(4a) + a`.
    Parabola { base: Point, along: Point, normal: Point, a: f64 },
}

impl Bisector {
    /// Bisector of two features, if they can share a Voronoi edge.
    pub fn between(f1: &Feature, f2: &Feature) -> Option<Bisector> {
        match (f1.geom, f2.geom) {
            (FeatureGeom::Vertex(p), FeatureGeom::Vertex(q)) => {
                let d = q - p;
                let len = d.norm();
                (len > 0.0).then(|| Bisector::PointPoint {
                    mid: (p + q) * 0.5,
                    dir: d.perp() / len,
                    half: 0.5 * len,
                })
            }
            (FeatureGeom::Vertex(p), FeatureGeom::Edge { a, b }) => vertex_edge(p, a, b, f2.normal),
            (FeatureGeom::Edge { a, b }, FeatureGeom::Vertex(p)) => vertex_edge(p, a, b, f1.normal),
            (FeatureGeom::Edge { a: a1, .. }, FeatureGeom::Edge { a: a2, .. }) => {
                let (n1, n2) = (f1.normal, f2.normal);
                let m = n1 - n2;
                if m.norm() < 1e-12 {
                    return None;
                }
                if (n1 + n2).norm() < 1e-12 {
                    let gap = n1.dot(a2 - a1);
                    return (gap > 0.0).then(|| Bisector::Parallel {
                        origin: a1 + n1 * (0.5 * gap),
                        dir: n1.perp(),
                        h: 0.5 * gap,
                    });
                }
                // Apex: intersection of the two supporting lines.
                let e1 = n1.perp();
                let e2 = n2.perp();
                let den = e1.cross(e2);
                let s = (a2 - a1).cross(e2) / den;
                let apex = a1 + e1 * s;
                let mut dir = m.perp().unit();
                let mut slope = n1.dot(dir);
                if slope < 0.0 {
                    dir = -dir;
                    slope = -slope;
                }
                Some(Bisector::LineLine { apex, dir, slope })
            }
        }
    }

    pub fn point(&self, t: f64) -> Point {
        match *self {
            Bisector::PointPoint { mid, dir, .. } => mid + dir * t,
            Bisector::LineLine { apex, dir, .. } => apex + dir * t,
            Bisector::Parallel { origin, dir, .. } => origin + dir * t,
            Bisector::Parabola {
                base,
                along,
                normal,
                a,
            } => base + along * t + normal * (t * t / (4.0 * a) + a),
        }
    }

    pub fn tangent(&self, t: f64) -> Point {
        match *self {
            Bisector::PointPoint { dir, .. }
            | Bisector::LineLine { dir, .. }
            | Bisector::Parallel { dir, .. } => dir,
            Bisector::Parabola {
                along, normal, a, ..
            } => along + normal * (t / (2.0 * a)),
        }
    }

    pub fn clearance(&self, t: f64) -> f64 {
        match *self {
            Bisector::PointPoint { half, .. } => t.hypot(half),
            Bisector::LineLine { slope, .. } => slope * t,
            Bisector::Parallel { h, .. } => h,
            Bisector::Parabola { a, .. } => t * t / (4.0 * a) + a,
        }
    }

    /// Cost antiderivative along the curve, strictly increasing in `t`.
    pub fn antiderivative(&self, t: f64) -> f64 {
        match *self {
            Bisector::PointPoint { half, .. } => (t / half).asinh(),
            Bisector::LineLine { slope, .. } => t.ln() / slope,
            Bisector::Parallel { h, .. } => t / h,
            Bisector::Parabola { a, .. } => 2.0 * (t / (2.0 * a)).asinh(),
        }
    }

    pub fn inverse_antiderivative(&self, v: f64) -> f64 {
        match *self {
            Bisector::PointPoint { half, .. } => half * v.sinh(),
            Bisector::LineLine { slope, .. } => (v * slope).exp(),
            Bisector::Parallel { h, .. } => v * h,
            Bisector::Parabola { a, .. } => 2.0 * a * (0.5 * v).sinh(),
        }
    }

    /// Cost of the portion between parameters `t1` and `t2`.
    pub fn cost(&self, t1: f64, t2: f64) -> f64 {
        (self.antiderivative(t2) - self.antiderivative(t1)).abs()
    }

    /// Parameter reached from `t` after spending cost `d` toward increasing
    /// (`forward`) or decreasing `t`.
    pub fn advance(&self, t: f64, d: f64, forward: bool) -> f64 {
        let f = self.antiderivative(t);
        self.inverse_antiderivative(if forward { f + d } else { f - d })
    }

    /// Parameter of the orthogonal projection of `p` onto the curve's axis.
    pub fn project(&self, p: Point) -> f64 {
        match *self {
            Bisector::PointPoint { mid, dir, .. } => (p - mid).dot(dir),
            Bisector::LineLine { apex, dir, .. } => (p - apex).dot(dir),
            Bisector::Parallel { origin, dir, .. } => (p - origin).dot(dir),
            Bisector::Parabola { base, along, .. } => (p - base).dot(along),
        }
    }

    /// Parameter of the global clearance minimum, if it is an interior point.
    pub fn min_clearance_t(&self) -> Option<f64> {
        match self {
            Bisector::PointPoint { .. } | Bisector::Parabola { .. } => Some(0.0),
            Bisector::LineLine { .. } | Bisector::Parallel { .. } => None,
        }
    }

    /// Parameter with clearance `c` on the side of `t_ref` (sign of `t_ref`).
    pub fn t_at_clearance(&self, c: f64, t_ref: f64) -> Option<f64> {
        let sign = if t_ref < 0.0 { -1.0 } else { 1.0 };
        match *self {
            Bisector::PointPoint { half, .. } => {
                (c >= half).then(|| sign * (c * c - half * half).max(0.0).sqrt())
            }
            Bisector::LineLine { slope, .. } => (c > 0.0).then(|| c / slope),
            Bisector::Parallel { .. } => None,
            Bisector::Parabola { a, .. } => (c >= a).then(|| sign * 2.0 * (a * (c - a)).max(0.0).sqrt()),
        }
    }

    /// Distance along the ray `origin + r·dir` to its first crossing with the
    /// curve at `r ≥ 0`.
    pub fn ray_hit(&self, origin: Point, dir: Point) -> Option<f64> {
        let line_hit = |base: Point, d: Point| {
            let den = dir.cross(d);
            if den.abs() < 1e-300 {
                return None;
            }
            let r = (base - origin).cross(d) / den;
            (r >= -1e-12 * (1.0 + (base - origin).norm())).then(|| r.max(0.0))
        };
        match *self {
            Bisector::PointPoint { mid, dir: d, .. } => line_hit(mid, d),
            Bisector::LineLine { apex, dir: d, .. } => line_hit(apex, d),
            Bisector::Parallel { origin: o, dir: d, .. } => line_hit(o, d),
            Bisector::Parabola {
                base,
                along,
                normal,
                a,
            } => {
                // Y = X²/(4a) + a along X = x0 + r·ux, Y = y0 + r·uy.
                let (x0, y0) = ((origin - base).dot(along), (origin - base).dot(normal));
                let (ux, uy) = (dir.dot(along), dir.dot(normal));
                let qa = ux * ux / (4.0 * a);
                let qb = x0 * ux / (2.0 * a) - uy;
                let qc = x0 * x0 / (4.0 * a) + a - y0;
                if qa.abs() < 1e-300 {
                    return (qb != 0.0).then(|| -qc / qb).filter(|r| *r >= 0.0);
                }
                let disc = qb * qb - 4.0 * qa * qc;
                if disc < 0.0 {
                    return None;
                }
                let q = -0.5 * (qb + qb.signum() * disc.sqrt());
                let (r1, r2) = (q / qa, if q != 0.0 { qc / q } else { 0.0 });
                let (lo, hi) = (r1.min(r2), r1.max(r2));
                if lo >= 0.0 {
                    Some(lo)
                } else if hi >= 0.0 {
                    Some(hi)
                } else {
                    None
                }
            }
        }
    }

    pub fn is_straight(&self) -> bool {
        !matches!(self, Bisector::Parabola { .. })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            Bisector::PointPoint { .. } => "vertex-vertex",
            Bisector::LineLine { .. } => "edge-edge",
            Bisector::Parallel { .. } => "edge-edge-parallel",
            Bisector::Parabola { .. } => "vertex-edge",
        }
    }
}

fn vertex_edge(p: Point, a: Point, b: Point, normal: Point) -> Option<Bisector> {
    let gap = normal.dot(p - a);
    if gap <= 0.0 {
        return None;
    }
    Some(Bisector::Parabola {
        base: p - normal * gap,
        along: (b - a).unit(),
        normal,
        a: 0.5 * gap,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::scene::{Owner, Wedge};

    fn vertex(p: Point) -> Feature {
        Feature {
            geom: FeatureGeom::Vertex(p),
            owner: Owner::Obstacle {
                polygon: 0,
                index: 0,
            },
            normal: Point::default(),
            wedge: Some(Wedge {
                start: 0.0,
                span: 6.0,
            }),
            adjacent: vec![],
        }
    }

    fn edge(a: Point, b: Point) -> Feature {
        let d = (b - a).unit();
        Feature {
            geom: FeatureGeom::Edge { a, b },
            owner: Owner::Boundary { side: 0 },
            normal: d.perp(),
            wedge: None,
            adjacent: vec![],
        }
    }

    #[test]
    fn point_point_cost_inverts_to_sinh() {
        let b = Bisector::between(&vertex(Point::new(0.0, -1.0)), &vertex(Point::new(0.0, 1.0)))
            .unwrap();
        let t = b.advance(0.0, 1.0, true);
        assert!((t.abs() - 1f64.sinh()).abs() < 1e-14);
        assert!((b.cost(0.0, t) - 1.0).abs() < 1e-14);
        assert!(b.point(0.0).norm() < 1e-15);
        assert!((b.clearance(0.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn parabola_points_are_equidistant() {
        let f = vertex(Point::new(1.0, 2.0));
        // Edge along the x-axis with upward normal.
        let e = edge(Point::new(-5.0, 0.0), Point::new(5.0, 0.0));
        let b = Bisector::between(&f, &e).unwrap();
        for t in [-3.0, -0.5, 0.0, 1.0, 4.0] {
            let p = b.point(t);
            assert!((p.dist(Point::new(1.0, 2.0)) - p.y).abs() < 1e-12);
            assert!((b.clearance(t) - p.y).abs() < 1e-12);
        }
    }

    #[test]
    fn ray_hits_parabola_from_focus_and_directrix() {
        let f = vertex(Point::new(0.0, 2.0));
        let e = edge(Point::new(-5.0, 0.0), Point::new(5.0, 0.0));
        let b = Bisector::between(&f, &e).unwrap();
        for ang in [-1.5, -0.7, 0.0, 0.9, 2.5] {
            let dir = Point::polar(1.0, ang - std::f64::consts::FRAC_PI_2);
            let r = b.ray_hit(Point::new(0.0, 2.0), dir).unwrap();
            let p = Point::new(0.0, 2.0) + dir * r;
            assert!((p.y - r).abs() < 1e-12, "angle {ang}");
        }
        let r = b.ray_hit(Point::new(3.0, 0.0), Point::new(0.0, 1.0)).unwrap();
        assert!((r - (9.0 / 4.0 + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn line_line_clearance_is_linear() {
        let e1 = edge(Point::new(0.0, 0.0), Point::new(4.0, 0.0));
        // Second edge on the line y = x, oriented so its normal faces the first edge's side.
        let e2 = edge(Point::new(4.0, 4.0), Point::new(1.0, 1.0));
        let b = Bisector::between(&e1, &e2).unwrap();
        for t in [0.5, 1.0, 3.0] {
            let p = b.point(t);
            assert!((p.y - b.clearance(t)).abs() < 1e-12);
            let d2 = (p.x - p.y).abs() / 2f64.sqrt();
            assert!((d2 - b.clearance(t)).abs() < 1e-12);
        }
    }
}
