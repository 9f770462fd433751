//! Closed-form costs of single-feature paths and the numeric reference.

use super::point::{signed_angle, Point};
use super::scene::Scene;
use crate::error::GeomError;
use crate::quadrature::integrate;

/// Relative tolerance of `path_cost_numeric`.
pub const QUAD_REL_TOL: f64 = 1e-8;
/// Clearance below which the cost integrand is considered divergent.
pub const CLEARANCE_FLOOR: f64 = 1e-12;

/// Cost of the logarithmic spiral about `center` joining `p` and `q`: the
/// Euclidean distance between their log-polar images.
pub fn spiral_cost(center: Point, p: Point, q: Point) -> Result<f64, GeomError> {
    let (dp, dq) = (p - center, q - center);
    if dp.norm() == 0.0 || dq.norm() == 0.0 {
        return Err(GeomError::Degenerate("spiral endpoint at its center".into()));
    }
    let dtheta = signed_angle(dp, dq);
    let dlog = dq.norm().ln() - dp.norm().ln();
    Ok(dtheta.hypot(dlog))
}

/// Cost of a circular arc centered on an edge's supporting line, given the
/// polar angles of its endpoints about that center, both in (0, π).
pub fn arc_cost_angles(theta_p: f64, theta_q: f64) -> f64 {
    ((theta_q * 0.5).tan().ln() - (theta_p * 0.5).tan().ln()).abs()
}

/// Local frame of an edge feature's supporting line: `x` along the edge, `y`
/// the signed height on the free side.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct LineFrame {
    pub origin: Point,
    pub along: Point,
    pub normal: Point,
}

impl LineFrame {
    pub fn new(origin: Point, along: Point, normal: Point) -> Self {
        Self {
            origin,
            along,
            normal,
        }
    }

    pub fn local(&self, p: Point) -> (f64, f64) {
        let d = p - self.origin;
        (d.dot(self.along), d.dot(self.normal))
    }

    pub fn world(&self, x: f64, y: f64) -> Point {
        self.origin + self.along * x + self.normal * y
    }
}

/// Cost of the equal-clearance arc between `p` and `q` about an edge feature.
pub fn arc_cost(line: &LineFrame, p: Point, q: Point, chain_tol: f64) -> Result<f64, GeomError> {
    let (xp, yp) = line.local(p);
    let (xq, yq) = line.local(q);
    if yp <= 0.0 || yq <= 0.0 {
        return Err(GeomError::Degenerate("arc endpoint on the edge line".into()));
    }
    if (yp - yq).abs() > chain_tol {
        return Err(GeomError::Precondition(format!(
            "arc endpoints at different clearances {yp} and {yq}"
        )));
    }
    let cx = 0.5 * (xp + xq);
    Ok(arc_cost_angles(yp.atan2(xp - cx), yq.atan2(xq - cx)))
}

/// Cost of a move straight toward or away from the nearest feature.
pub fn radial_cost(clr_p: f64, clr_q: f64) -> f64 {
    (clr_q.ln() - clr_p.ln()).abs()
}

/// `radial_cost` with the precondition checked against the scene: `p` must lie
/// on the segment from `q` to its nearest feature.
pub fn radial_cost_checked(scene: &Scene, p: Point, q: Point) -> Result<f64, GeomError> {
    let cq = scene.clearance(q);
    let cp = scene.clearance(p).value;
    if cp <= 0.0 || cq.value <= 0.0 {
        return Err(GeomError::Degenerate("radial endpoint on an obstacle".into()));
    }
    let foot = cq.foot;
    let (proj, _) = super::point::project_on_segment(p, foot, q);
    let tol = 1e-7 * scene.scale();
    if proj.dist(p) > tol {
        return Err(GeomError::Precondition(
            "points are not on a common radial segment".into(),
        ));
    }
    Ok(radial_cost(cp, cq.value))
}

/// Minimal cost relative to an edge feature alone: the hyperbolic distance of
/// the upper half-plane bounded by its supporting line.
pub fn edge_geodesic_cost(line: &LineFrame, p: Point, q: Point) -> Result<f64, GeomError> {
    let (_, yp) = line.local(p);
    let (_, yq) = line.local(q);
    if yp <= 0.0 || yq <= 0.0 {
        return Err(GeomError::Degenerate("endpoint on the edge line".into()));
    }
    Ok(2.0 * (p.dist(q) / (2.0 * (yp * yq).sqrt())).asinh())
}

/// Anything with a parametric point on [0, 1] and a speed.
pub trait Curve {
    fn point_at(&self, s: f64) -> Point;
    fn speed_at(&self, s: f64) -> f64;
}

/// Cost of a curve by adaptive quadrature of `1/clr` against the scene.
pub fn path_cost_numeric(scene: &Scene, curve: &dyn Curve) -> Result<f64, GeomError> {
    path_cost_numeric_with(scene, curve, QUAD_REL_TOL)
}

pub fn path_cost_numeric_with(
    scene: &Scene,
    curve: &dyn Curve,
    rel_tol: f64,
) -> Result<f64, GeomError> {
    integrate(
        |s| {
            let p = curve.point_at(s);
            let c = scene.clearance_value(p);
            if c < CLEARANCE_FLOOR {
                return Err(GeomError::Quadrature(format!(
                    "clearance {c:e} below floor at ({}, {})",
                    p.x, p.y
                )));
            }
            Ok(curve.speed_at(s) / c)
        },
        0.0,
        1.0,
        rel_tol,
        1e-14,
    )
}

/// A straight segment as a curve.
#[derive(Debug, Clone, Copy)]
pub struct SegmentCurve(pub Point, pub Point);

impl Curve for SegmentCurve {
    fn point_at(&self, s: f64) -> Point {
        self.0.lerp(self.1, s)
    }
    fn speed_at(&self, _s: f64) -> f64 {
        self.0.dist(self.1)
    }
}

/// Numeric cost of a polyline, segment by segment.
pub fn polyline_cost_numeric(scene: &Scene, points: &[Point]) -> Result<f64, GeomError> {
    points
        .windows(2)
        .map(|w| path_cost_numeric(scene, &SegmentCurve(w[0], w[1])))
        .sum()
}
