//! Sample graphs over the refined diagram and their shortest-path search.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::PlanError;
use crate::geom::{Path, Point, PointIndex, Primitive};
use crate::reachability::local_optimal_path;
use crate::voronoi::{EdgeId, RefinedDiagram};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StageTag {
    G1,
    G2,
    G3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphVertex {
    pub point: Point,
    pub clearance: f64,
    /// A diagram edge the vertex lies on.
    pub edge: EdgeId,
}

/// How to rebuild the primitive of a graph edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Payload {
    /// Portion of a diagram edge between two parameters.
    Portion { edge: EdgeId, a: f64, b: f64 },
    /// Constant-clearance arc of a cell.
    Level { cell: usize, clearance: f64 },
    /// Single-feature geodesic inside a cell.
    Geodesic { cell: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraphEdge {
    pub u: usize,
    pub v: usize,
    pub cost: f64,
    pub payload: Payload,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchGraph {
    pub tag: StageTag,
    pub vertices: Vec<GraphVertex>,
    pub edges: Vec<GraphEdge>,
    pub source: usize,
    pub target: usize,
}

impl SearchGraph {
    pub fn stats(&self) -> GraphStats {
        GraphStats {
            vertices: self.vertices.len(),
            edges: self.edges.len(),
        }
    }

    /// The primitive of edge `k`, oriented to start at `from`.
    pub fn primitive(&self, rd: &RefinedDiagram, k: usize, from: usize) -> Result<Primitive, PlanError> {
        let e = &self.edges[k];
        let (a, b) = (self.vertices[e.u].point, self.vertices[e.v].point);
        let prim = match e.payload {
            Payload::Portion { edge, a, b } => rd.edges[edge].primitive(a, b),
            Payload::Level { cell, clearance } => rd.cells[cell].eta(clearance)?.primitive,
            Payload::Geodesic { cell } => local_optimal_path(&rd.cells[cell], a, b)?
                .into_iter()
                .next()
                .ok_or_else(|| PlanError::Internal("empty geodesic on a graph edge".into()))?,
        };
        let start = self.vertices[from].point;
        Ok(if prim.start.dist(start) <= prim.end.dist(start) {
            prim
        } else {
            prim.reversed()
        })
    }

    /// Path of primitives along a vertex/edge route from `dijkstra`.
    pub fn path(&self, rd: &RefinedDiagram, route: &Route) -> Result<Path, PlanError> {
        let mut prims = Vec::with_capacity(route.edges.len());
        for (i, &k) in route.edges.iter().enumerate() {
            prims.push(self.primitive(rd, k, route.vertices[i])?);
        }
        Ok(Path::new(prims))
    }
}

/// Vertex and edge sequence of a shortest path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Route {
    pub vertices: Vec<usize>,
    pub edges: Vec<usize>,
    pub cost: f64,
}

#[derive(PartialEq)]
struct Entry(f64, usize);

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.total_cmp(&self.0).then_with(|| other.1.cmp(&self.1))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Minimal-cost route from `s` to `t` over undirected edges with
/// nonnegative costs; ties settle the lower vertex index first.
pub fn dijkstra(
    vertex_count: usize,
    edges: &[GraphEdge],
    s: usize,
    t: usize,
) -> Result<Route, PlanError> {
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); vertex_count];
    for (k, e) in edges.iter().enumerate() {
        adj[e.u].push((e.v, k));
        adj[e.v].push((e.u, k));
    }
    let mut dist = vec![f64::INFINITY; vertex_count];
    let mut pred: Vec<Option<(usize, usize)>> = vec![None; vertex_count];
    let mut heap = BinaryHeap::new();
    dist[s] = 0.0;
    heap.push(Entry(0.0, s));
    while let Some(Entry(d, u)) = heap.pop() {
        if d > dist[u] {
            continue;
        }
        if u == t {
            break;
        }
        for &(v, k) in &adj[u] {
            let nd = d + edges[k].cost;
            if nd < dist[v] {
                dist[v] = nd;
                pred[v] = Some((u, k));
                heap.push(Entry(nd, v));
            }
        }
    }
    if !dist[t].is_finite() {
        return Err(PlanError::Unreachable);
    }
    let (mut vertices, mut route_edges) = (vec![t], Vec::new());
    let mut cur = t;
    while let Some((u, k)) = pred[cur] {
        vertices.push(u);
        route_edges.push(k);
        cur = u;
    }
    vertices.reverse();
    route_edges.reverse();
    Ok(Route {
        vertices,
        edges: route_edges,
        cost: dist[t],
    })
}

/// Incremental graph construction with vertices merged by position.
pub(crate) struct Builder<'a> {
    pub rd: &'a RefinedDiagram,
    index: PointIndex,
    pub vertices: Vec<GraphVertex>,
    /// Vertices placed on each diagram edge with their parameters.
    pub on_edge: Vec<Vec<(f64, usize)>>,
    pub edges: Vec<GraphEdge>,
    pairs: HashMap<(usize, usize), usize>,
}

impl<'a> Builder<'a> {
    pub fn new(rd: &'a RefinedDiagram) -> Self {
        Self {
            rd,
            index: PointIndex::new(rd.tol),
            vertices: Vec::new(),
            on_edge: vec![Vec::new(); rd.edges.len()],
            edges: Vec::new(),
            pairs: HashMap::new(),
        }
    }

    pub fn vertex(&mut self, edge: EdgeId, param: f64) -> usize {
        let e = &self.rd.edges[edge];
        let p = e.point(param);
        let (id, fresh) = self.index.get_or_insert(p);
        if fresh {
            self.vertices.push(GraphVertex {
                point: p,
                clearance: e.clearance(param),
                edge,
            });
        }
        self.on_edge[edge].push((param, id));
        id
    }

    /// Endpoints of every diagram edge except the feet of radial edges.
    pub fn diagram_vertices(&mut self) {
        for k in 0..self.rd.edges.len() {
            let (lo, hi) = self.rd.edges[k].range();
            if !self.rd.edges[k].is_internal() {
                self.vertex(k, lo);
            }
            self.vertex(k, hi);
        }
    }

    pub fn endpoints(&mut self) -> (usize, usize) {
        let (s, t) = (self.rd.source, self.rd.target);
        (self.vertex(s.edge, s.clearance), self.vertex(t.edge, t.clearance))
    }

    /// Adds an edge, keeping the cheaper one when the pair already exists.
    pub fn edge(&mut self, u: usize, v: usize, cost: f64, payload: Payload) {
        if u == v || !cost.is_finite() {
            return;
        }
        let key = (u.min(v), u.max(v));
        if let Some(&k) = self.pairs.get(&key) {
            if cost < self.edges[k].cost {
                self.edges[k] = GraphEdge { u, v, cost, payload };
            }
            return;
        }
        self.pairs.insert(key, self.edges.len());
        self.edges.push(GraphEdge { u, v, cost, payload });
    }

    /// Sorted, deduplicated vertices of one diagram edge.
    pub fn sorted_on(&self, edge: EdgeId) -> Vec<(f64, usize)> {
        let mut list = self.on_edge[edge].clone();
        list.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        list.dedup_by_key(|x| x.1);
        list
    }

    /// Joins consecutive vertices along every diagram edge.
    pub fn connect_portions(&mut self) {
        for k in 0..self.rd.edges.len() {
            let list = self.sorted_on(k);
            for w in list.windows(2) {
                let ((a, u), (b, v)) = (w[0], w[1]);
                let cost = self.rd.edges[k].cost(a, b);
                self.edge(u, v, cost, Payload::Portion { edge: k, a, b });
            }
        }
    }

    pub fn finish(self, tag: StageTag, source: usize, target: usize) -> SearchGraph {
        SearchGraph {
            tag,
            vertices: self.vertices,
            edges: self.edges,
            source,
            target,
        }
    }
}
