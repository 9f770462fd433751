//! Cost-bounded portions of cell edges, their samples, shadow points and
//! candidate neighbor sets.

use serde::{Deserialize, Serialize};

use crate::geom::Point;
use crate::voronoi::{EdgeId, RefinedCell};
use crate::wellbehaved::{anchor_points, Side};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EdgeletRole {
    AlphaMarked,
    BetaMarked,
    KappaLow,
    KappaHigh,
    KappaWhole,
}

impl EdgeletRole {
    pub fn side(self) -> Side {
        match self {
            EdgeletRole::AlphaMarked => Side::Alpha,
            EdgeletRole::BetaMarked => Side::Beta,
            _ => Side::Kappa,
        }
    }
}

/// Interval of a diagram edge in that edge's parameters; `from` is the
/// low-clearance end.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Edgelet {
    pub edge: EdgeId,
    pub role: EdgeletRole,
    pub from: f64,
    pub to: f64,
}

impl Edgelet {
    pub fn is_degenerate(&self) -> bool {
        self.from == self.to
    }
}

/// Clearance window any path of cost at most `d` between endpoints of
/// clearances `clr_s` and `clr_t` stays within.
pub fn clearance_window(d: f64, clr_s: f64, clr_t: f64) -> (f64, f64) {
    (clr_s.max(clr_t) / d.exp(), clr_s.min(clr_t) * d.exp())
}

/// Edgelets of a cell for the cost estimate `d`.
pub fn mark_edgelets(cell: &RefinedCell, d: f64, clr_s: f64, clr_t: f64) -> Vec<Edgelet> {
    let (c_lo, c_hi) = clearance_window(d, clr_s, clr_t);
    let mut out = vec![
        Edgelet {
            edge: cell.alpha,
            role: EdgeletRole::AlphaMarked,
            from: cell.clr_u.min(c_lo),
            to: cell.clr_u.min(c_hi),
        },
        Edgelet {
            edge: cell.beta,
            role: EdgeletRole::BetaMarked,
            from: cell.clr_v.min(c_lo),
            to: cell.clr_v.min(c_hi),
        },
    ];
    let bis = cell.bisector;
    let (tu, tv) = (cell.t_u, cell.t_v);
    let forward = tv >= tu;
    let kappa = |role, from, to| Edgelet {
        edge: cell.kappa,
        role,
        from,
        to,
    };
    if bis.cost(tu, tv) <= 2.0 * d {
        out.push(kappa(EdgeletRole::KappaWhole, tu, tv));
        return out;
    }
    let u1 = bis.advance(tu, 2.0 * d, forward);
    let target = cell.clr_v.min(c_hi);
    // Clearance below κ's range: the whole κ is out of reach; keep v′ at v.
    let v1 = if target < cell.clr_u {
        tv
    } else {
        cell.kappa_t_at_clearance(target).unwrap_or(tv)
    };
    if bis.cost(u1, v1) <= 4.0 * d {
        out.push(kappa(EdgeletRole::KappaWhole, tu, v1));
        return out;
    }
    let v2 = bis.advance(v1, 4.0 * d, !forward);
    out.push(kappa(EdgeletRole::KappaLow, tu, u1));
    out.push(kappa(EdgeletRole::KappaHigh, v2, v1));
    out
}

/// A sample on an edgelet: graph vertex, clearance, and ordering key.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub vertex: usize,
    pub key: f64,
}

/// Shadow point used to center the candidate walk on an edgelet of `side`.
pub fn shadow_point(cell: &RefinedCell, p: Point, p_side: Side, edgelet_side: Side) -> Point {
    if p_side != Side::Beta {
        return p;
    }
    let anchors = anchor_points(cell);
    let anchor = match edgelet_side {
        Side::Kappa => Some(anchors.w_kappa),
        Side::Alpha => anchors.w_alpha,
        Side::Beta => None,
    };
    match anchor {
        Some(w) if cell.height(p) < w.clearance => w.point,
        _ => p,
    }
}

/// Indices into `samples` (sorted by key, low-clearance end first) picked
/// around `key` with geometrically growing steps.
pub fn candidate_indices(samples: &[Sample], key: f64, eps: f64) -> Vec<usize> {
    let m = samples.len();
    if m == 0 {
        return Vec::new();
    }
    let mut out = vec![0, m - 1];
    let above = samples.partition_point(|s| s.key <= key);
    let below = samples.partition_point(|s| s.key < key);
    out.extend(below..above);
    let steps = |limit: usize| {
        let mut v = Vec::new();
        let mut x = 1.0f64;
        let mut last = 0usize;
        loop {
            let s = x.floor() as usize;
            if s > limit {
                break;
            }
            if s != last {
                v.push(s);
                last = s;
            }
            x *= 1.0 + eps;
        }
        v
    };
    if below > 0 {
        let q = below - 1;
        out.push(q);
        out.extend(steps(q).into_iter().map(|s| q - s));
    }
    if above < m {
        let q = above;
        out.push(q);
        out.extend(steps(m - 1 - q).into_iter().map(|s| q + s));
    }
    out.sort_unstable();
    out.dedup();
    out
}
