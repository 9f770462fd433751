//! Whether the single-feature geodesic between two points of a refined cell
//! stays inside the cell, and which portion of a boundary edge a point sees.
//!
//! About a vertex feature the geodesic is straight in `(θ, ln r)` and the
//! image of κ is convex, so staying below κ reduces to a convex gap function
//! being nonnegative. About an edge feature the geodesic is a circular arc
//! centered on the feature's line and `κ(x) − arc(x)` is convex.

use serde::{Deserialize, Serialize};

use crate::error::GeomError;
use crate::geom::{edge_geodesic, vertex_geodesic, Point, Primitive};
use crate::voronoi::{CellFrame, RefinedCell};
use crate::wellbehaved::Side;

/// Log-polar image of a point about a vertex feature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransformedPoint {
    pub theta: f64,
    pub log_r: f64,
}

pub fn transform(cell: &RefinedCell, p: Point) -> Result<TransformedPoint, GeomError> {
    let CellFrame::Vertex { center, .. } = cell.frame else {
        return Err(GeomError::Precondition("log-polar map needs a vertex feature".into()));
    };
    let r = p.dist(center);
    if r == 0.0 {
        return Err(GeomError::Degenerate("point at the vertex feature".into()));
    }
    Ok(TransformedPoint {
        theta: cell.site_param(p),
        log_r: r.ln(),
    })
}

pub fn inverse_transform(cell: &RefinedCell, tp: TransformedPoint) -> Point {
    cell.point_at(tp.theta, tp.log_r.exp())
}

/// Nodes of the dense crossing check.
pub const DENSE_NODES: usize = 256;
/// Relative slack below which a negative gap still counts as grazing.
const GRAZE: f64 = 1e-9;

/// Minimum of a convex function on `[a, b]` by golden-section search, with
/// the abscissa where it is attained. Stops early once below `stop_below`.
fn convex_min(f: impl Fn(f64) -> f64, a: f64, b: f64, stop_below: f64) -> (f64, f64) {
    let inv_phi = 0.5 * (5f64.sqrt() - 1.0);
    let (mut a, mut b) = (a.min(b), a.max(b));
    let (fa, fb) = (f(a), f(b));
    let mut best = if fa <= fb { (fa, a) } else { (fb, b) };
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..60 {
        if fc.min(fd) < best.0 {
            best = if fc < fd { (fc, c) } else { (fd, d) };
        }
        if best.0 < stop_below {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    if fc.min(fd) < best.0 {
        best = if fc < fd { (fc, c) } else { (fd, d) };
    }
    best
}

fn dense_min(f: impl Fn(f64) -> f64, a: f64, b: f64, nodes: usize) -> f64 {
    (0..=nodes)
        .map(|i| f(a + (b - a) * i as f64 / nodes as f64))
        .fold(f64::INFINITY, f64::min)
}

type GapFn<'a> = Box<dyn Fn(f64) -> f64 + 'a>;

/// Gap between κ and the geodesic from `p` to `q`, as a function over the
/// site parameter, with its domain and the scale used for the grazing slack.
fn gap_function(cell: &RefinedCell, p: Point, q: Point) -> Option<(GapFn<'_>, f64, f64, f64)> {
    let (lo, hi) = cell.param_range();
    match cell.frame {
        CellFrame::Vertex { .. } => {
            let (tp, tq) = (transform(cell, p).ok()?, transform(cell, q).ok()?);
            if (tp.theta - tq.theta).abs() < 1e-15 {
                return None;
            }
            let slope = (tq.log_r - tp.log_r) / (tq.theta - tp.theta);
            let f = move |th: f64| {
                let kap = cell.kappa_height(th.clamp(lo, hi)).ln();
                kap - (tp.log_r + slope * (th - tp.theta))
            };
            Some((Box::new(f), tp.theta, tq.theta, 1.0))
        }
        CellFrame::Edge { line, .. } => {
            let ((xp, yp), (xq, yq)) = (line.local(p), line.local(q));
            if (xp - xq).abs() <= 1e-12 * yp.max(yq) {
                return None;
            }
            // Height of the circle through p and q centered on the line, in a
            // form that stays accurate when the center is far away.
            let dx = xq - xp;
            let f = move |x: f64| {
                let s = (x - xp) / dx;
                let y2 = (1.0 - s) * yp * yp + s * yq * yq + s * (1.0 - s) * dx * dx;
                cell.kappa_height(x.clamp(lo, hi)) - y2.max(0.0).sqrt()
            };
            Some((Box::new(f), xp, xq, yp.max(yq)))
        }
    }
}

/// Whether the geodesic relative to the cell's feature between two points of
/// the closed cell stays in the cell.
pub fn locally_reachable(cell: &RefinedCell, p: Point, q: Point) -> bool {
    let Some((f, a, b, scale)) = gap_function(cell, p, q) else {
        return true;
    };
    let slack = GRAZE * scale;
    let (m, at) = convex_min(&f, a, b, -slack);
    if m < -slack {
        return false;
    }
    // A near-tangent interior minimum gets the dense check as a guard.
    let span = (b - a).abs();
    let interior = (at - a).abs().min((at - b).abs()) > 1e-6 * span;
    if interior && m < 1e-6 * scale {
        return dense_min(&f, a, b, DENSE_NODES) >= -slack;
    }
    true
}

/// Dense-sampling variant of `locally_reachable`.
pub fn locally_reachable_dense(cell: &RefinedCell, p: Point, q: Point, nodes: usize) -> bool {
    match gap_function(cell, p, q) {
        None => true,
        Some((f, a, b, scale)) => dense_min(&f, a, b, nodes) >= -GRAZE * scale,
    }
}

/// Parameter range of a boundary side: clearance on α and β, bisector
/// parameter on κ (from `u` to `v`).
pub fn side_range(cell: &RefinedCell, side: Side) -> (f64, f64) {
    match side {
        Side::Alpha => (0.0, cell.clr_u),
        Side::Beta => (0.0, cell.clr_v),
        Side::Kappa => (cell.t_u, cell.t_v),
    }
}

pub fn side_point(cell: &RefinedCell, side: Side, param: f64) -> Point {
    match side {
        Side::Alpha => cell.alpha_point(param),
        Side::Beta => cell.beta_point(param),
        Side::Kappa => cell.bisector.point(param),
    }
}

/// Sub-range of `side` (in `side_range` parameters, low end first in that
/// order) locally reachable from `p`; `None` when empty.
pub fn reachable_portion(cell: &RefinedCell, p: Point, side: Side) -> Option<(f64, f64)> {
    let (a, b) = side_range(cell, side);
    // The feature foot of a radial side has zero clearance; probe just above.
    let a_probe = if side == Side::Kappa { a } else { b * 1e-12 };
    let reach = |x: f64| locally_reachable(cell, p, side_point(cell, side, x));
    let (ra, rb) = (reach(a_probe), reach(b));
    match (ra, rb) {
        (true, true) => Some((a, b)),
        (false, false) => None,
        (true, false) | (false, true) => {
            let (mut good, mut bad) = if ra { (a_probe, b) } else { (b, a_probe) };
            for _ in 0..60 {
                let mid = 0.5 * (good + bad);
                if reach(mid) {
                    good = mid;
                } else {
                    bad = mid;
                }
            }
            Some(if ra { (a, good) } else { (good, b) })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessKind {
    /// Tangent line to the image of κ in the log-polar plane.
    Line,
    /// Circle centered on the feature's line, tangent to κ.
    Circle,
}

/// Tangency that bounds the portion of κ reachable from a point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentWitness {
    pub kind: WitnessKind,
    pub exists: bool,
    /// Point of tangency on κ.
    pub touch: Option<Point>,
    /// Circle center abscissa in the feature's line frame (circle kind).
    pub center_abscissa: Option<f64>,
}

pub fn tangent_witness(cell: &RefinedCell, p: Point) -> TangentWitness {
    let kind = if cell.is_vertex() {
        WitnessKind::Line
    } else {
        WitnessKind::Circle
    };
    let portion = reachable_portion(cell, p, Side::Kappa);
    let (tu, tv) = (cell.t_u, cell.t_v);
    let interior = |x: f64| (x - tu).abs() > 1e-12 * (1.0 + x.abs()) && (x - tv).abs() > 1e-12 * (1.0 + x.abs());
    let boundary = portion.and_then(|(lo, hi)| {
        if interior(hi) {
            Some(hi)
        } else if interior(lo) {
            Some(lo)
        } else {
            None
        }
    });
    let touch = boundary.map(|t| cell.bisector.point(t));
    let center_abscissa = match (cell.frame, touch) {
        (CellFrame::Edge { line, .. }, Some(z)) => {
            let ((xp, yp), (xz, yz)) = (line.local(p), line.local(z));
            ((xp - xz).abs() > 0.0).then(|| (xp * xp + yp * yp - xz * xz - yz * yz) / (2.0 * (xp - xz)))
        }
        _ => None,
    };
    TangentWitness {
        kind,
        exists: touch.is_some(),
        touch,
        center_abscissa,
    }
}

/// Single-feature geodesic between two mutually reachable cell points.
pub fn local_optimal_path(cell: &RefinedCell, p: Point, q: Point) -> Result<Vec<Primitive>, GeomError> {
    if p == q {
        return Ok(Vec::new());
    }
    if !locally_reachable(cell, p, q) {
        return Err(GeomError::Precondition(
            "points are not locally reachable in the cell".into(),
        ));
    }
    let prim = match cell.frame {
        CellFrame::Vertex { center, .. } => vertex_geodesic(cell.feature, center, p, q)?,
        CellFrame::Edge { line, .. } => edge_geodesic(cell.feature, &line, p, q)?,
    };
    Ok(vec![prim])
}
