//! Graph builders for the three stages and the end-to-end driver.

use std::collections::HashSet;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use super::edgelet::{candidate_indices, mark_edgelets, shadow_point, Edgelet, Sample};
use super::graph::{dijkstra, Builder, GraphStats, Payload, SearchGraph, StageTag};
use crate::error::PlanError;
use crate::geom::{edge_geodesic_cost, spiral_cost, Path, Point, Scene};
use crate::reachability::locally_reachable;
use crate::voronoi::{build_voronoi, refine, CellFrame, RefinedCell, RefinedDiagram};
use crate::wellbehaved::{anchor_points, Side};

/// Stage-1 overshoot factor per unit of `n`; bounds the exponential search.
pub const OVERSHOOT: f64 = 23.0;
/// Default divisor applied to ε before building the stage-3 graph.
pub const DEFAULT_C_SCALE: f64 = 1.0;
/// Constant in the stage-3 size bounds.
pub const G3_SIZE_CONSTANT: f64 = 400.0;
/// Default upper limit on the divisor of the stage-3 sample spacing.
pub const DEFAULT_SPACING_CAP: usize = 4;

/// The size parameter `n`: number of obstacle vertices, at least one.
pub fn planning_size(scene: &Scene) -> usize {
    scene.vertex_count().max(1)
}

/// Divisor `m` of the stage-3 spacing `ε·d/m`: `n`, limited by `cap`.
pub fn spacing_divisor(n: usize, cap: Option<usize>) -> usize {
    cap.map_or(n, |c| n.min(c.max(1))).max(1)
}

pub fn build_refined(scene: &Scene) -> Result<RefinedDiagram, PlanError> {
    let vd = build_voronoi(scene)?;
    Ok(refine(vd, scene)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageResult {
    pub stage: u8,
    pub path: Path,
    pub cost: f64,
    /// Cost estimate the graph was built for (stages 2 and 3).
    pub search_param: Option<f64>,
    pub stats: GraphStats,
}

impl StageResult {
    fn trivial(stage: u8) -> Self {
        StageResult {
            stage,
            path: Path::default(),
            cost: 0.0,
            search_param: None,
            stats: GraphStats::default(),
        }
    }
}

fn endpoint_clearances(rd: &RefinedDiagram) -> (f64, f64) {
    (rd.source.clearance, rd.target.clearance)
}

/// Adds the level arc of clearance `c` from β of cell `ci`.
fn level_edge(b: &mut Builder, ci: usize, c: f64) {
    let cell = &b.rd.cells[ci];
    let Ok(arc) = cell.eta(c) else {
        return;
    };
    let (beta, alpha, kappa) = (cell.beta, cell.alpha, cell.kappa);
    let c = arc.clearance;
    let w = b.vertex(beta, c);
    let w_bar = match arc.kappa_t {
        Some(t) if !arc.on_alpha => b.vertex(kappa, t),
        _ => b.vertex(alpha, c),
    };
    if arc.cost > 0.0 {
        b.edge(w, w_bar, arc.cost, Payload::Level { cell: ci, clearance: c });
    }
}

fn anchor_clearances(cell: &RefinedCell) -> Vec<f64> {
    let a = anchor_points(cell);
    let mut out = vec![a.w_kappa.clearance];
    out.extend(a.w_alpha.map(|w| w.clearance));
    out
}

/// Diagram vertices plus, per cell, the level arcs from both anchors and from
/// β at the source and target clearances.
pub fn build_g1(rd: &RefinedDiagram) -> SearchGraph {
    let mut b = Builder::new(rd);
    b.diagram_vertices();
    let (s, t) = b.endpoints();
    let (clr_s, clr_t) = endpoint_clearances(rd);
    for (ci, cell) in rd.cells.iter().enumerate() {
        let mut ws = anchor_clearances(cell);
        ws.push(cell.clr_v.min(clr_s));
        ws.push(cell.clr_v.min(clr_t));
        for c in ws {
            level_edge(&mut b, ci, c);
        }
    }
    b.connect_portions();
    b.finish(StageTag::G1, s, t)
}

/// Clearances of β samples between `lo` and `hi` at cost spacing `step`.
fn geometric_samples(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let ratio = step.exp();
    let mut out = Vec::new();
    let mut c = lo;
    while c < hi * (1.0 - 1e-12) {
        out.push(c);
        c *= ratio;
    }
    out.push(hi);
    out
}

/// Graph for cost estimate `d`: samples on the marked portion of every β at
/// cost spacing `d / n`, each with its level arc.
pub fn build_g2(rd: &RefinedDiagram, d: f64, n: usize) -> SearchGraph {
    let mut b = Builder::new(rd);
    b.diagram_vertices();
    let (s, t) = b.endpoints();
    let (clr_s, clr_t) = endpoint_clearances(rd);
    let (c_lo, c_hi) = super::edgelet::clearance_window(d, clr_s, clr_t);
    for (ci, cell) in rd.cells.iter().enumerate() {
        let (lo, hi) = (cell.clr_v.min(c_lo), cell.clr_v.min(c_hi));
        let mut ws = geometric_samples(lo, hi, d / n as f64);
        ws.extend(anchor_clearances(cell));
        ws.push(cell.clr_v.min(clr_s));
        ws.push(cell.clr_v.min(clr_t));
        for c in ws {
            level_edge(&mut b, ci, c);
        }
    }
    b.connect_portions();
    b.finish(StageTag::G2, s, t)
}

/// Parameters along `edge` from `from` to `to` at cost spacing `step`,
/// both ends included.
fn edgelet_params(rd: &RefinedDiagram, e: &Edgelet, step: f64) -> Vec<f64> {
    let edge = &rd.edges[e.edge];
    let mut out = vec![e.from];
    if e.is_degenerate() {
        return out;
    }
    let forward = e.to > e.from;
    let mut x = e.from;
    loop {
        let (nx, _) = edge.advance(x, step, forward);
        let past = if forward { nx >= e.to } else { nx <= e.to };
        if past || nx == x {
            break;
        }
        out.push(nx);
        x = nx;
    }
    out.push(e.to);
    out
}

/// Ordering key on a cell edge: clearance, or the site parameter measured
/// from α when κ has (nearly) constant clearance.
fn edge_key(cell: &RefinedCell, side: Side, p: Point, clearance: f64) -> f64 {
    if side == Side::Kappa && cell.clr_v - cell.clr_u <= 1e-9 * cell.clr_v {
        let sign = (cell.param_beta() - cell.param_alpha()).signum();
        (cell.site_param(p) - cell.param_alpha()) * sign
    } else {
        clearance
    }
}

pub(crate) fn geodesic_cost(cell: &RefinedCell, p: Point, q: Point) -> Option<f64> {
    match cell.frame {
        CellFrame::Vertex { center, .. } => spiral_cost(center, p, q).ok(),
        CellFrame::Edge { line, .. } => edge_geodesic_cost(&line, p, q).ok(),
    }
}

/// Stage-3 graph and the edgelets it was sampled on.
pub struct G3Build {
    pub graph: SearchGraph,
    pub edgelets: Vec<Vec<Edgelet>>,
    /// Locally-reachable tests performed.
    pub tests: usize,
}

/// Sample every edgelet at cost spacing `eps·d/m` and join each sample to its
/// locally reachable candidates.
pub fn build_g3(rd: &RefinedDiagram, d: f64, eps: f64, m: usize) -> Result<G3Build, PlanError> {
    let mut b = Builder::new(rd);
    b.diagram_vertices();
    let (s, t) = b.endpoints();
    let (clr_s, clr_t) = endpoint_clearances(rd);
    let step = eps * d / m as f64;
    let cap = 4 * m * rd.cells.len() * ((6.0 / eps).ceil() as usize + 2) + 64;

    let mut edgelets = Vec::with_capacity(rd.cells.len());
    let mut samples: Vec<Vec<Vec<Sample>>> = Vec::with_capacity(rd.cells.len());
    for cell in &rd.cells {
        let marks = mark_edgelets(cell, d, clr_s, clr_t);
        let mut per = Vec::with_capacity(marks.len());
        for e in &marks {
            let side = e.role.side();
            let mut list = Vec::new();
            for x in edgelet_params(rd, e, step) {
                let v = b.vertex(e.edge, x);
                let vx = b.vertices[v];
                list.push(Sample {
                    vertex: v,
                    key: edge_key(cell, side, vx.point, vx.clearance),
                });
            }
            list.sort_by(|a, b| a.key.total_cmp(&b.key));
            list.dedup_by_key(|s| s.vertex);
            per.push(list);
        }
        if b.vertices.len() > cap {
            return Err(PlanError::Internal(format!(
                "stage-3 sampling exceeded {cap} vertices"
            )));
        }
        edgelets.push(marks);
        samples.push(per);
    }

    let mut tests = 0usize;
    for (ci, cell) in rd.cells.iter().enumerate() {
        let sides = [(Side::Alpha, cell.alpha), (Side::Beta, cell.beta), (Side::Kappa, cell.kappa)];
        let mut on: Vec<(usize, Vec<Side>)> = Vec::new();
        for &(side, e) in &sides {
            for (_, v) in b.sorted_on(e) {
                match on.iter_mut().find(|(u, _)| *u == v) {
                    Some((_, list)) => list.push(side),
                    None => on.push((v, vec![side])),
                }
            }
        }
        let mut tried: HashSet<(usize, usize)> = HashSet::new();
        let mut found: Vec<(usize, usize, f64)> = Vec::new();
        for (p, p_sides) in &on {
            let pv = b.vertices[*p];
            let p_side = if p_sides.len() == 1 { p_sides[0] } else { Side::Alpha };
            for (k, e) in edgelets[ci].iter().enumerate() {
                let side = e.role.side();
                if p_sides.contains(&side) {
                    continue;
                }
                let shadow = shadow_point(cell, pv.point, p_side, side);
                let key = edge_key(cell, side, shadow, cell.height(shadow));
                let list = &samples[ci][k];
                for i in candidate_indices(list, key, eps) {
                    let q = list[i].vertex;
                    if q == *p || !tried.insert((q.min(*p), q.max(*p))) {
                        continue;
                    }
                    let qp = b.vertices[q].point;
                    tests += 1;
                    if locally_reachable(cell, pv.point, qp) {
                        if let Some(c) = geodesic_cost(cell, pv.point, qp) {
                            found.push((*p, q, c));
                        }
                    }
                }
            }
        }
        for (p, q, c) in found {
            b.edge(p, q, c, Payload::Geodesic { cell: ci });
        }
    }
    b.connect_portions();
    Ok(G3Build {
        graph: b.finish(StageTag::G3, s, t),
        edgelets,
        tests,
    })
}

/// Size bounds `(vertices, edges)` for the stage-3 graph.
pub fn g3_size_bounds(n: usize, eps: f64) -> (f64, f64) {
    let n = n as f64;
    let v = G3_SIZE_CONSTANT * n * n / eps;
    let e = G3_SIZE_CONSTANT * n * n / (eps * eps) * (n / eps).ln().max(1.0);
    (v, e)
}

fn solve_graph(rd: &RefinedDiagram, g: &SearchGraph, stage: u8, d: Option<f64>) -> Result<StageResult, PlanError> {
    let route = dijkstra(g.vertices.len(), &g.edges, g.source, g.target)?;
    let path = g.path(rd, &route)?;
    Ok(StageResult {
        stage,
        cost: path.cost,
        path,
        search_param: d,
        stats: g.stats(),
    })
}

fn same_endpoints(rd: &RefinedDiagram) -> bool {
    rd.source.point == rd.target.point
}

pub fn stage1(rd: &RefinedDiagram) -> Result<StageResult, PlanError> {
    if same_endpoints(rd) {
        return Ok(StageResult::trivial(1));
    }
    solve_graph(rd, &build_g1(rd), 1, None)
}

/// Exponential search over `d̃ / 2^i`, keeping the cheapest path.
pub fn stage2(rd: &RefinedDiagram, n: usize, d_tilde: f64) -> Result<StageResult, PlanError> {
    if same_endpoints(rd) || d_tilde <= 0.0 {
        return Ok(StageResult::trivial(2));
    }
    let rounds = (OVERSHOOT * n as f64).log2().ceil() as i32;
    let mut best: Option<StageResult> = None;
    let mut stats = GraphStats::default();
    for i in 0..=rounds {
        let d = d_tilde / 2f64.powi(i);
        let g = build_g2(rd, d, n);
        stats.vertices = stats.vertices.max(g.vertices.len());
        stats.edges = stats.edges.max(g.edges.len());
        let r = match solve_graph(rd, &g, 2, Some(d)) {
            Ok(r) => r,
            Err(PlanError::Unreachable) => continue,
            Err(e) => return Err(e),
        };
        if best.as_ref().is_none_or(|b| r.cost < b.cost) {
            best = Some(r);
        }
    }
    let mut best = best.ok_or(PlanError::Unreachable)?;
    best.stats = stats;
    Ok(best)
}

/// Stage 3 with sample spacing `eps·d/m`.
pub fn stage3(rd: &RefinedDiagram, m: usize, d: f64, eps: f64) -> Result<StageResult, PlanError> {
    if same_endpoints(rd) || d <= 0.0 {
        return Ok(StageResult::trivial(3));
    }
    let built = build_g3(rd, d, eps, m)?;
    solve_graph(rd, &built.graph, 3, Some(d))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ApproxOptions {
    pub epsilon: f64,
    /// ε is divided by this before building the stage-3 graph.
    pub c_scale: f64,
    /// Last stage to run (1, 2 or 3).
    pub last_stage: u8,
    /// Limit on the stage-3 spacing divisor; `None` uses `n` itself.
    pub spacing_cap: Option<usize>,
}

impl ApproxOptions {
    pub fn new(epsilon: f64) -> Self {
        Self {
            epsilon,
            c_scale: DEFAULT_C_SCALE,
            last_stage: 3,
            spacing_cap: Some(DEFAULT_SPACING_CAP),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Timings {
    pub diagram_ms: f64,
    pub stage1_ms: f64,
    pub stage2_ms: f64,
    pub stage3_ms: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    /// Cheapest path over the stages that ran.
    pub best: StageResult,
    pub stages: Vec<StageResult>,
    pub timings: Timings,
    pub refined: RefinedDiagram,
}

fn ms(since: Instant) -> f64 {
    since.elapsed().as_secs_f64() * 1e3
}

/// Runs the stages in order and returns the cheapest path found.
pub fn approximate(scene: &Scene, opts: &ApproxOptions) -> Result<Solution, PlanError> {
    let eps = opts.epsilon;
    if !(eps > 0.0 && eps <= 1.0) {
        return Err(PlanError::BadEpsilon(eps));
    }
    if opts.c_scale.is_nan() || opts.c_scale < 1.0 {
        return Err(PlanError::Internal(format!("c-scale must be at least 1, got {}", opts.c_scale)));
    }
    let mut timings = Timings::default();
    let clock = Instant::now();
    let rd = build_refined(scene)?;
    timings.diagram_ms = ms(clock);
    let n = planning_size(scene);

    let clock = Instant::now();
    let s1 = stage1(&rd)?;
    timings.stage1_ms = ms(clock);
    let mut stages = vec![s1];
    if opts.last_stage >= 2 {
        let clock = Instant::now();
        let s2 = stage2(&rd, n, stages[0].cost)?;
        timings.stage2_ms = ms(clock);
        stages.push(s2);
    }
    if opts.last_stage >= 3 {
        let d = stages.iter().map(|s| s.cost).fold(f64::INFINITY, f64::min);
        let clock = Instant::now();
        let m = spacing_divisor(n, opts.spacing_cap);
        let s3 = stage3(&rd, m, d, eps / opts.c_scale)?;
        timings.stage3_ms = ms(clock);
        stages.push(s3);
    }
    let best = stages
        .iter()
        .fold(None::<&StageResult>, |acc, s| match acc {
            Some(b) if b.cost <= s.cost => Some(b),
            _ => Some(s),
        })
        .cloned()
        .ok_or_else(|| PlanError::Internal("no stage ran".into()))?;
    Ok(Solution {
        best,
        stages,
        timings,
        refined: rd,
    })
}

/// Edge and vertex counts of the stage-3 graph without searching it, plus
/// the number of reachability tests.
pub fn g3_counts(scene: &Scene, d: f64, eps: f64, cap: Option<usize>) -> Result<(GraphStats, usize), PlanError> {
    let rd = build_refined(scene)?;
    let built = build_g3(&rd, d, eps, spacing_divisor(planning_size(scene), cap))?;
    Ok((built.graph.stats(), built.tests))
}
