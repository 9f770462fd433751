//! Anchor points on the high-clearance radial edge of a refined cell, the
//! radial-then-level paths they define, and in-cell paths built from them
//! whose cost is within a constant factor of optimal.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

use serde::{Deserialize, Serialize};

use crate::error::GeomError;
use crate::geom::{Bisector, Point, Primitive};
use crate::voronoi::{wrap_pi, CellFrame, ConstClearanceArc, RefinedCell};

/// Which first-order condition produced an anchor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorCase {
    /// Edge feature, level arc ending on α: clearance equal to the cell width.
    EdgeAlpha,
    /// Vertex feature, straight κ: incidence angle π/4.
    VertexLine,
    /// Vertex feature, parabolic κ: incidence angle π/2.
    VertexParabola,
    /// Edge feature, straight κ.
    EdgeLine,
    /// Edge feature, parabolic κ: root of the stationarity cubic.
    EdgeParabola,
    /// κ at constant clearance; the top of β.
    Flat,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub point: Point,
    pub clearance: f64,
    pub case: AnchorCase,
    /// Whether the stationary point fell outside the cell and was clamped.
    pub clamped: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnchorPair {
    pub w_alpha: Option<Anchor>,
    pub w_kappa: Anchor,
}

/// Root on `(0, x_beta + 4a]` of `2t³ + 4at² + 8a(a − x_beta)t − 16a³`.
pub fn parabola_anchor_root(a: f64, x_beta: f64) -> f64 {
    let f = |t: f64| ((2.0 * t + 4.0 * a) * t + 8.0 * a * (a - x_beta)) * t - 16.0 * a * a * a;
    let (mut lo, mut hi) = (0.0, x_beta.max(0.0) + 4.0 * a);
    debug_assert!(f(lo) < 0.0 && f(hi) > 0.0);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn clamp_flag(x: f64, lo: f64, hi: f64) -> (f64, bool) {
    let y = x.clamp(lo, hi);
    (y, y != x)
}

/// The two cell-intrinsic anchor candidates on β.
pub fn anchor_points(cell: &RefinedCell) -> AnchorPair {
    let anchor = |clearance: f64, case, clamped| Anchor {
        point: cell.beta_point(clearance),
        clearance,
        case,
        clamped,
    };
    let flat = anchor(cell.clr_v, AnchorCase::Flat, false);
    match cell.frame {
        CellFrame::Vertex {
            center,
            theta_alpha,
            theta_beta,
        } => {
            // Angles measured from the direction of κ's closest approach.
            let (axis, case, target) = match cell.bisector {
                Bisector::PointPoint { mid, .. } => {
                    ((mid - center).angle(), AnchorCase::VertexLine, FRAC_PI_4)
                }
                Bisector::Parabola { normal, .. } => {
                    ((-normal).angle(), AnchorCase::VertexParabola, FRAC_PI_2)
                }
                _ => return AnchorPair {
                    w_alpha: None,
                    w_kappa: flat,
                },
            };
            let phi_a = wrap_pi(theta_alpha - axis).abs();
            let phi_b = wrap_pi(theta_beta - axis).abs();
            let (phi, clamped) = clamp_flag(target, phi_a.min(phi_b), phi_a.max(phi_b));
            let clearance = match cell.bisector {
                Bisector::PointPoint { half, .. } => half / phi.cos(),
                Bisector::Parabola { a, .. } => 2.0 * a / (1.0 + phi.cos()),
                _ => unreachable!(),
            };
            AnchorPair {
                w_alpha: None,
                w_kappa: anchor(clearance.clamp(cell.clr_u, cell.clr_v), case, clamped),
            }
        }
        CellFrame::Edge {
            line,
            s_alpha,
            s_beta,
        } => {
            let width = (s_beta - s_alpha).abs();
            let w_alpha = (width <= cell.clr_u && width > 0.0)
                .then(|| anchor(width, AnchorCase::EdgeAlpha, false));
            let w_kappa = match cell.bisector {
                Bisector::LineLine { .. } => {
                    let k = (cell.clr_v - cell.clr_u) / width;
                    if k <= 1e-12 {
                        flat
                    } else {
                        let (x_a, x_b) = (cell.clr_u / k, cell.clr_v / k);
                        let (x, clamped) = clamp_flag(x_b / k, x_a, x_b);
                        anchor((k * x).clamp(cell.clr_u, cell.clr_v), AnchorCase::EdgeLine, clamped)
                    }
                }
                Bisector::Parabola { base, a, .. } => {
                    let s_focus = line.local(base).0;
                    let x_a = (s_alpha - s_focus).abs();
                    let x_b = (s_beta - s_focus).abs();
                    let root = parabola_anchor_root(a, x_b);
                    let (x, clamped) = clamp_flag(root, x_a.min(x_b), x_a.max(x_b));
                    let c = x * x / (4.0 * a) + a;
                    anchor(c.clamp(cell.clr_u, cell.clr_v), AnchorCase::EdgeParabola, clamped)
                }
                _ => flat,
            };
            AnchorPair { w_alpha, w_kappa }
        }
    }
}

/// Radial move from `p` up β to clearance `clr_w`, then the level arc there.
#[derive(Debug, Clone, PartialEq)]
pub struct LambdaPath {
    pub primitives: Vec<Primitive>,
    pub eta: ConstClearanceArc,
    pub cost: f64,
}

pub fn lambda_path(cell: &RefinedCell, p: Point, clr_w: f64) -> Result<LambdaPath, GeomError> {
    let clr_p = cell.height(p);
    if clr_w < clr_p * (1.0 - 1e-9) {
        return Err(GeomError::Precondition(format!(
            "anchor clearance {clr_w} below start clearance {clr_p}"
        )));
    }
    let clr_w = clr_w.max(clr_p);
    let eta = cell
        .eta(clr_w)
        .map_err(|e| GeomError::Precondition(e.to_string()))?;
    let mut primitives = Vec::with_capacity(2);
    if clr_w > clr_p {
        primitives.push(Primitive::radial(cell.feature, p, eta.w, clr_p, clr_w));
    }
    primitives.push(eta.primitive);
    let cost = (clr_w / clr_p).ln() + eta.cost;
    Ok(LambdaPath {
        primitives,
        eta,
        cost,
    })
}

/// Which candidate won in `best_anchor`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AnchorUsed {
    Start,
    Alpha,
    Kappa,
    None,
}

/// Minimizer of the λ cost over anchors at or above `p` on β.
pub fn best_anchor(cell: &RefinedCell, p: Point) -> Result<(AnchorUsed, LambdaPath), GeomError> {
    let anchors = anchor_points(cell);
    let clr_p = cell.height(p);
    let mut candidates = vec![(AnchorUsed::Start, clr_p)];
    if let Some(w) = anchors.w_alpha {
        candidates.push((AnchorUsed::Alpha, w.clearance));
    }
    candidates.push((AnchorUsed::Kappa, anchors.w_kappa.clearance));
    let mut best: Option<(AnchorUsed, LambdaPath, f64)> = None;
    for (used, c) in candidates {
        if c < clr_p {
            continue;
        }
        let path = lambda_path(cell, p, c)?;
        let better = match &best {
            None => true,
            Some((_, b, bc)) => path.cost < b.cost || (path.cost == b.cost && c < *bc),
        };
        if better {
            best = Some((used, path, c));
        }
    }
    let (used, path, _) = best.expect("the start point is always feasible");
    Ok((used, path))
}

/// Boundary piece of a cell a point lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Alpha,
    Beta,
    Kappa,
}

/// Boundary pieces containing `p`, within `tol`.
pub fn sides_of(cell: &RefinedCell, p: Point, tol: f64) -> Vec<Side> {
    let h = cell.height(p);
    let q = cell.site_param(p);
    let mut out = Vec::new();
    for (side, param) in [(Side::Alpha, cell.param_alpha()), (Side::Beta, cell.param_beta())] {
        let on = match cell.frame {
            CellFrame::Vertex { .. } => (q - param).abs() * h <= tol,
            CellFrame::Edge { .. } => (q - param).abs() <= tol,
        };
        let top = if side == Side::Alpha {
            cell.clr_u
        } else {
            cell.clr_v
        };
        if on && h > 0.0 && h <= top + tol {
            out.push(side);
        }
    }
    let (lo, hi) = cell.param_range();
    if q >= lo - 1e-12 && q <= hi + 1e-12 && (cell.kappa_height(q.clamp(lo, hi)) - h).abs() <= tol {
        out.push(Side::Kappa);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct WellBehavedPath {
    pub primitives: Vec<Primitive>,
    pub anchor_used: AnchorUsed,
    pub cost: f64,
}

fn walk_same_side(cell: &RefinedCell, side: Side, p: Point, q: Point) -> Vec<Primitive> {
    if p.dist(q) == 0.0 {
        return Vec::new();
    }
    match side {
        Side::Alpha | Side::Beta => {
            vec![Primitive::radial(cell.feature, p, q, cell.height(p), cell.height(q))]
        }
        Side::Kappa => vec![Primitive::bisector_portion(
            cell.bisector,
            cell.bisector.project(p),
            cell.bisector.project(q),
        )],
    }
}

/// Boundary walk from `p` to `q` avoiding the feature, neither on β.
fn boundary_walk(cell: &RefinedCell, p: Point, sp: &[Side], q: Point, sq: &[Side]) -> Vec<Primitive> {
    if let Some(&side) = sp.iter().find(|s| sq.contains(s)) {
        return walk_same_side(cell, side, p, q);
    }
    let first = if sp.contains(&Side::Alpha) {
        Side::Alpha
    } else {
        Side::Kappa
    };
    let second = if first == Side::Alpha {
        Side::Kappa
    } else {
        Side::Alpha
    };
    let mut out = walk_same_side(cell, first, p, cell.u);
    out.extend(walk_same_side(cell, second, cell.u, q));
    out
}

/// In-cell path between two boundary points with cost within a constant
/// factor of the optimum.
pub fn well_behaved_path(
    cell: &RefinedCell,
    p: Point,
    q: Point,
    tol: f64,
) -> Result<WellBehavedPath, GeomError> {
    let (sp, sq) = (sides_of(cell, p, tol), sides_of(cell, q, tol));
    if sp.is_empty() || sq.is_empty() {
        return Err(GeomError::Precondition("endpoint not on the cell boundary".into()));
    }
    let finish = |primitives: Vec<Primitive>, anchor_used| {
        let cost = primitives.iter().map(|p| p.cost).sum();
        WellBehavedPath {
            primitives,
            anchor_used,
            cost,
        }
    };
    if let Some(&side) = sp.iter().find(|s| sq.contains(s)) {
        return Ok(finish(walk_same_side(cell, side, p, q), AnchorUsed::None));
    }
    let (p_beta, q_beta) = (sp.contains(&Side::Beta), sq.contains(&Side::Beta));
    if !p_beta && !q_beta {
        return Ok(finish(boundary_walk(cell, p, &sp, q, &sq), AnchorUsed::None));
    }
    if q_beta && !p_beta {
        let rev = well_behaved_path(cell, q, p, tol)?;
        let primitives = rev.primitives.iter().rev().map(Primitive::reversed).collect();
        return Ok(finish(primitives, rev.anchor_used));
    }
    let (used, lambda) = best_anchor(cell, p)?;
    let w_bar = lambda.eta.w_bar;
    let side_w = if lambda.eta.on_alpha {
        vec![Side::Alpha]
    } else {
        vec![Side::Kappa]
    };
    let mut primitives = lambda.primitives;
    primitives.extend(boundary_walk(cell, w_bar, &side_w, q, &sq));
    Ok(finish(primitives, used))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::LineFrame;
    use std::f64::consts::FRAC_PI_6;

    fn cell(frame: CellFrame, bisector: Bisector, pa: f64, pb: f64) -> RefinedCell {
        let mut c = RefinedCell {
            feature: 0,
            neighbor: 1,
            frame,
            bisector,
            kappa: 0,
            alpha: 1,
            beta: 2,
            u: Point::default(),
            v: Point::default(),
            clr_u: 0.0,
            clr_v: 0.0,
            t_u: 0.0,
            t_v: 0.0,
        };
        let (ha, hb) = (c.kappa_height(pa), c.kappa_height(pb));
        c.u = c.point_at(pa, ha);
        c.v = c.point_at(pb, hb);
        c.clr_u = ha;
        c.clr_v = hb;
        c.t_u = bisector.project(c.u);
        c.t_v = bisector.project(c.v);
        c
    }

    fn x_axis() -> LineFrame {
        LineFrame::new(Point::default(), Point::new(1.0, 0.0), Point::new(0.0, 1.0))
    }

    /// Vertex at the origin, κ on the line x = 1, α along the x-axis.
    fn vertex_line_cell(theta_beta: f64) -> RefinedCell {
        cell(
            CellFrame::Vertex {
                center: Point::default(),
                theta_alpha: 0.0,
                theta_beta,
            },
            Bisector::PointPoint {
                mid: Point::new(1.0, 0.0),
                dir: Point::new(0.0, 1.0),
                half: 1.0,
            },
            0.0,
            theta_beta,
        )
    }

    /// Edge on the x-axis, κ the parabola with focus (0, 2a), cell over [x_a, x_b].
    fn edge_parabola_cell(a: f64, x_a: f64, x_b: f64) -> RefinedCell {
        cell(
            CellFrame::Edge {
                line: x_axis(),
                s_alpha: x_a,
                s_beta: x_b,
            },
            Bisector::Parabola {
                base: Point::default(),
                along: Point::new(1.0, 0.0),
                normal: Point::new(0.0, 1.0),
                a,
            },
            x_a,
            x_b,
        )
    }

    #[test]
    fn vertex_line_anchor_at_quarter_pi() {
        let c = vertex_line_cell(1.3);
        let w = anchor_points(&c).w_kappa;
        assert!(anchor_points(&c).w_alpha.is_none());
        assert!(!w.clamped);
        assert!((w.clearance - 2f64.sqrt()).abs() < 1e-12);
        // Stationarity: tan θ − 1 = 0 at the level arc's κ end.
        let eta = c.eta(w.clearance).unwrap();
        assert!((eta.w_bar.angle().tan() - 1.0).abs() < 1e-8);
    }

    #[test]
    fn cubic_root_for_unit_parabola() {
        let t = parabola_anchor_root(1.0, 4.0);
        assert!((t - 2.962_388_61).abs() < 1e-8);
        let f = |t: f64| 2.0 * t.powi(3) + 4.0 * t * t - 24.0 * t - 16.0;
        assert!(f(t).abs() < 1e-9);
        assert!(f(t - 1e-6) < 0.0 && f(t + 1e-6) > 0.0);
        let c = edge_parabola_cell(1.0, 0.5, 4.0);
        let w = anchor_points(&c).w_kappa;
        assert!((w.clearance - (t * t / 4.0 + 1.0)).abs() < 1e-12);
        assert_eq!(w.case, AnchorCase::EdgeParabola);
    }

    #[test]
    fn edge_alpha_anchor_and_best_choice() {
        // Edge cell over x ∈ [1, 3] with κ high above (focus at (2, 20)).
        let c = cell(
            CellFrame::Edge {
                line: x_axis(),
                s_alpha: 1.0,
                s_beta: 3.0,
            },
            Bisector::Parabola {
                base: Point::new(2.0, 0.0),
                along: Point::new(1.0, 0.0),
                normal: Point::new(0.0, 1.0),
                a: 10.0,
            },
            1.0,
            3.0,
        );
        let wa = anchor_points(&c).w_alpha.expect("width below clr(u)");
        assert!((wa.clearance - 2.0).abs() < 1e-14);
        let p = c.beta_point(0.5);
        let (used, lambda) = best_anchor(&c, p).unwrap();
        assert_eq!(used, AnchorUsed::Alpha);
        assert!((lambda.cost - (4f64.ln() + 1.0)).abs() < 1e-12);
        assert!((lambda_path(&c, p, 0.5).unwrap().cost - 4.0).abs() < 1e-12);
        let l = lambda_path(&c, c.beta_point(1.0), 2.0).unwrap();
        assert!((l.cost - (2f64.ln() + 1.0)).abs() < 1e-12);
        assert!(lambda_path(&c, c.beta_point(1.0), 0.5).is_err());
    }

    #[test]
    fn lambda_on_quarter_vertex_cell() {
        // κ far away so the level arc at clearance e lands on α.
        let c = cell(
            CellFrame::Vertex {
                center: Point::default(),
                theta_alpha: 0.0,
                theta_beta: FRAC_PI_2,
            },
            Bisector::PointPoint {
                mid: Point::new(5.0, 5.0),
                dir: Point::new(-1.0, 1.0).unit(),
                half: 50f64.sqrt(),
            },
            0.0,
            FRAC_PI_2,
        );
        let l = lambda_path(&c, c.beta_point(1.0), std::f64::consts::E).unwrap();
        assert!(l.eta.on_alpha);
        assert!((l.cost - (1.0 + FRAC_PI_2)).abs() < 1e-12);
        let (used, _) = best_anchor(&c, c.beta_point(1.0)).unwrap();
        assert_eq!(used, AnchorUsed::Start);
    }

    #[test]
    fn well_behaved_walks() {
        let c = vertex_line_cell(1.2);
        let tol = 1e-9;
        // Both on α: the radial piece.
        let g = well_behaved_path(&c, c.alpha_point(0.2), c.alpha_point(0.8), tol).unwrap();
        assert!((g.cost - 4f64.ln()).abs() < 1e-12);
        // α to κ: up α to u then along κ.
        let q = c.bisector.point(0.5);
        let g = well_behaved_path(&c, c.alpha_point(0.5), q, tol).unwrap();
        assert_eq!(g.primitives.len(), 2);
        assert!((g.primitives[0].end - c.u).norm() < 1e-12);
        let expect = 2f64.ln() + c.bisector.cost(0.0, 0.5);
        assert!((g.cost - expect).abs() < 1e-12);
        // β to κ goes through an anchor and ends at q.
        let g = well_behaved_path(&c, c.beta_point(0.3), q, tol).unwrap();
        assert!((g.primitives.last().unwrap().end - q).norm() < 1e-12);
        let g2 = well_behaved_path(&c, q, c.beta_point(0.3), tol).unwrap();
        assert!((g.cost - g2.cost).abs() < 1e-12);
    }

    #[test]
    fn edge_line_anchor_is_stationary() {
        // κ at 60° from the x-axis through the origin.
        let c = cell(
            CellFrame::Edge {
                line: x_axis(),
                s_alpha: 0.5,
                s_beta: 4.0,
            },
            Bisector::LineLine {
                apex: Point::default(),
                dir: Point::polar(1.0, 2.0 * FRAC_PI_6),
                slope: (2.0 * FRAC_PI_6).sin(),
            },
            0.5,
            4.0,
        );
        let w = anchor_points(&c).w_kappa;
        let k = (2.0 * FRAC_PI_6).tan();
        let x = w.clearance / k;
        assert!(!w.clamped);
        // d/dx [ln(kx) + (x_β − x)/(kx)] = 1/x − x_β/(k x²).
        assert!((1.0 / x - 4.0 / (k * x * x)).abs() < 1e-8);
    }
}
