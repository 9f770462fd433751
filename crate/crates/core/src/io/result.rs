//! JSON result documents for solver and oracle runs.

use serde::{Deserialize, Serialize};

use crate::approx::{GraphStats, Solution, Timings};
use crate::geom::{Point, Primitive};
use crate::oracle::OracleResult;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StageStats {
    pub stage: u8,
    pub cost: f64,
    pub vertices: usize,
    pub edges: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultFile {
    pub cost: f64,
    pub epsilon: f64,
    /// Costs of the stages that ran, in order.
    pub stage_costs: Vec<f64>,
    pub path: Vec<Primitive>,
    pub graph_stats: Vec<StageStats>,
    pub timings: Timings,
}

impl ResultFile {
    pub fn from_solution(sol: &Solution, epsilon: f64) -> Self {
        let stat = |stage: u8, cost: f64, s: GraphStats| StageStats {
            stage,
            cost,
            vertices: s.vertices,
            edges: s.edges,
        };
        Self {
            cost: sol.best.path.cost,
            epsilon,
            stage_costs: sol.stages.iter().map(|s| s.cost).collect(),
            path: sol.best.path.primitives.clone(),
            graph_stats: sol.stages.iter().map(|s| stat(s.stage, s.cost, s.stats)).collect(),
            timings: sol.timings,
        }
    }

    /// Largest deviation between `cost` and the sum of primitive costs.
    pub fn cost_mismatch(&self) -> f64 {
        (self.cost - self.path.iter().map(|p| p.cost).sum::<f64>()).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleFile {
    pub cost: f64,
    pub resolution: usize,
    pub path: Vec<Point>,
    pub nodes: usize,
    pub edges: usize,
}

impl OracleFile {
    pub fn new(r: &OracleResult, resolution: usize) -> Self {
        Self {
            cost: r.cost,
            resolution,
            path: r.path.clone(),
            nodes: r.nodes,
            edges: r.edges,
        }
    }
}
