//! Acceptance run: one PASS/FAIL line per criterion with its wall time.

mod common;

use std::f64::consts::{E, FRAC_PI_2};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use clearance_paths::approx::{approximate, g3_counts, ApproxOptions};
use clearance_paths::geom::{BBox, Point, Polygon, Scene};
use clearance_paths::oracle::{grid_oracle, OracleConfig};
use common::suites::{
    anchor_dense_scan, closed_form_fidelity, edgelet_containment, reachable_portion_connectivity,
    well_behaved_bounds,
};
use common::{random_scene, segment_field};

const CORPUS_SEEDS: std::ops::Range<u64> = 0..30;
const CORPUS_EPS: [f64; 3] = [0.5, 0.25, 0.1];
const CORPUS_MAX_VERTICES: usize = 40;
const RATIO_SLACK: f64 = 1.05;

struct Outcome {
    pass: bool,
    detail: Vec<String>,
}

impl Outcome {
    fn new() -> Self {
        Self {
            pass: true,
            detail: Vec::new(),
        }
    }

    fn note(&mut self, line: String) {
        self.detail.push(line);
    }

    fn require(&mut self, ok: bool, line: String) {
        if !ok {
            self.pass = false;
        }
        self.detail.push(if ok { line } else { format!("FAILED {line}") });
    }
}

fn report(id: usize, title: &str, budget: Duration, run: impl FnOnce() -> Outcome) -> bool {
    let clock = Instant::now();
    let mut out = run();
    let took = clock.elapsed();
    if took > budget {
        out.pass = false;
        out.detail.push(format!("FAILED runtime {took:.1?} exceeds {budget:?}"));
    }
    let verdict = if out.pass { "PASS" } else { "FAIL" };
    println!("{verdict} [{id}] {title} ({:.1} s)", took.as_secs_f64());
    for line in &out.detail {
        println!("       {line}");
    }
    out.pass
}

fn first_stages(sol: &clearance_paths::approx::Solution) -> (f64, f64, f64) {
    let cost = |k: u8| sol.stages.iter().find(|s| s.stage == k).map_or(f64::INFINITY, |s| s.cost);
    (cost(1), cost(2), cost(3))
}

fn closed_forms() -> Outcome {
    let mut out = Outcome::new();
    for (kind, rep) in closed_form_fidelity(1000) {
        out.require(rep.ok() && rep.checked == 1000, format!("{kind}: {}", rep.summary()));
    }
    out
}

fn spiral_benchmark() -> Outcome {
    let mut out = Outcome::new();
    let sc = Scene::new(
        vec![Polygon::new(vec![Point::new(0.0, 0.0)])],
        BBox::new(Point::new(-50.0, -50.0), Point::new(50.0, 50.0)),
        Point::new(1.0, 0.0),
        Point::new(0.0, E),
    )
    .unwrap();
    let exact = (1.0 + FRAC_PI_2 * FRAC_PI_2).sqrt();
    match approximate(&sc, &ApproxOptions::new(0.2)) {
        Ok(sol) => {
            let c = first_stages(&sol).2;
            let hi = 1.2 * exact + 0.02;
            out.require(c >= exact - 1e-9 && c <= hi, format!("stage3 {c:.6} in [{exact:.6}, {hi:.6}]"));
        }
        Err(e) => out.require(false, format!("solver error: {e}")),
    }
    out
}

fn two_point_scene() -> Outcome {
    let mut out = Outcome::new();
    let eps = 0.2;
    let sc = Scene::new(
        vec![Polygon::new(vec![Point::new(0.0, 1.0)]), Polygon::new(vec![Point::new(0.0, -1.0)])],
        BBox::new(Point::new(-100.0, -100.0), Point::new(100.0, 100.0)),
        Point::new(-50.0, 0.0),
        Point::new(50.0, 0.0),
    )
    .unwrap();
    let along = 2.0 * 50f64.asinh();
    let sol = approximate(&sc, &ApproxOptions::new(eps));
    let oracle = grid_oracle(&sc, sc.source(), sc.target(), &OracleConfig::default());
    match (sol, oracle) {
        (Ok(sol), Ok(o)) => {
            let c = first_stages(&sol).2;
            let limit = (1.0 + eps) * o.cost * 1.02;
            out.require(c <= limit, format!("stage3 {c:.6} <= (1+ε)·oracle·1.02 = {limit:.6} (oracle {:.6})", o.cost));
            out.require(c < along, format!("stage3 {c:.6} < along-bisector {along:.6}"));
        }
        (Err(e), _) => out.require(false, format!("solver error: {e}")),
        (_, Err(e)) => out.require(false, format!("oracle error: {e}")),
    }
    out
}

struct CorpusRow {
    seed: u64,
    n: usize,
    eps: f64,
    d1: f64,
    d2: f64,
    d3: f64,
    best: f64,
}

fn run_corpus() -> (Vec<CorpusRow>, Vec<String>) {
    let (mut rows, mut errors) = (Vec::new(), Vec::new());
    for seed in CORPUS_SEEDS {
        let sc = random_scene(seed, CORPUS_MAX_VERTICES);
        let n = sc.vertex_count().max(1);
        let oracle = match grid_oracle(&sc, sc.source(), sc.target(), &OracleConfig::default()) {
            Ok(o) => o.cost,
            Err(e) => {
                errors.push(format!("seed {seed}: oracle error: {e}"));
                continue;
            }
        };
        for eps in CORPUS_EPS {
            match approximate(&sc, &ApproxOptions::new(eps)) {
                Ok(sol) => {
                    let (d1, d2, d3) = first_stages(&sol);
                    let best = oracle.min(d1).min(d2).min(d3);
                    rows.push(CorpusRow { seed, n, eps, d1, d2, d3, best });
                }
                Err(e) => errors.push(format!("seed {seed} ε={eps}: solver error: {e}")),
            }
        }
    }
    (rows, errors)
}

fn corpus_ratios(rows: &[CorpusRow], errors: &[String]) -> Outcome {
    let mut out = Outcome::new();
    for e in errors {
        out.require(false, e.clone());
    }
    for eps in CORPUS_EPS {
        let limit = (1.0 + eps) * RATIO_SLACK;
        let mut worst = (0.0, 0);
        for r in rows.iter().filter(|r| r.eps == eps) {
            let ratio = r.d3 / r.best;
            if ratio > worst.0 {
                worst = (ratio, r.seed);
            }
            if ratio > limit {
                out.require(false, format!("seed {} ε={eps}: ratio {ratio:.4} > {limit:.4}", r.seed));
            }
        }
        let count = rows.iter().filter(|r| r.eps == eps).count();
        out.note(format!(
            "ε={eps}: {count} scenes, worst stage3/best {:.4} (seed {}), limit {limit:.4}",
            worst.0, worst.1
        ));
    }
    out.pass &= rows.len() == CORPUS_SEEDS.count() * CORPUS_EPS.len();
    out
}

fn stage_guarantees(rows: &[CorpusRow], errors: &[String]) -> Outcome {
    let mut out = Outcome::new();
    for e in errors {
        out.require(false, e.clone());
    }
    let (mut worst1, mut worst2) = ((0.0, 0, 1), (0.0, 0));
    for r in rows {
        let (q1, q2) = (r.d1 / r.best, r.d2 / r.best);
        if q1 / r.n as f64 > worst1.0 / worst1.2 as f64 {
            worst1 = (q1, r.seed, r.n);
        }
        if q2 > worst2.0 {
            worst2 = (q2, r.seed);
        }
        if q1 > 23.0 * r.n as f64 {
            out.require(false, format!("seed {}: stage1/best {q1:.3} > 23n = {}", r.seed, 23 * r.n));
        }
        if q2 > 50.0 {
            out.require(false, format!("seed {}: stage2/best {q2:.3} > 50", r.seed));
        }
    }
    out.note(format!(
        "worst stage1/best {:.3} at seed {} (n = {}, bound {})",
        worst1.0,
        worst1.1,
        worst1.2,
        23 * worst1.2
    ));
    out.note(format!("worst stage2/best {:.3} at seed {} (bound 50)", worst2.0, worst2.1));
    out.pass &= !rows.is_empty();
    out
}

fn cell_suites() -> Outcome {
    let mut out = Outcome::new();
    type Suite = Box<dyn Fn() -> common::suites::Report>;
    let runs: [(&str, Suite); 4] = [
        ("anchor dense scan", Box::new(|| anchor_dense_scan(200, 20, 1000))),
        ("well-behaved bounds", Box::new(|| well_behaved_bounds(200, 64))),
        ("reachable-portion connectivity", Box::new(|| reachable_portion_connectivity(200, 1000))),
        ("edgelet containment", Box::new(|| edgelet_containment(30, 512))),
    ];
    for (name, run) in runs {
        let clock = Instant::now();
        let rep = run();
        out.require(rep.ok(), format!("{name}: {} ({:.1} s)", rep.summary(), clock.elapsed().as_secs_f64()));
    }
    out
}

fn size_scaling() -> Outcome {
    let mut out = Outcome::new();
    let sizes = [20usize, 40, 80];
    let epsilons = [0.4, 0.2, 0.1];
    let predicted_v = |n: usize, e: f64| (n * n) as f64 / e;
    let predicted_e = |n: usize, e: f64| (n * n) as f64 / (e * e) * (n as f64 / e).ln();

    let sweep = |label: &str, sizes: &[usize], cap: Option<usize>, out: &mut Outcome| {
        let mut base = None;
        for &n in sizes {
            let sc = segment_field(7, n);
            let mut opts = ApproxOptions::new(epsilons[0]);
            opts.last_stage = 2;
            let d = match approximate(&sc, &opts) {
                Ok(sol) => sol.stages.iter().map(|s| s.cost).fold(f64::INFINITY, f64::min),
                Err(e) => {
                    out.require(false, format!("{label} n={n}: solver error: {e}"));
                    continue;
                }
            };
            for &eps in &epsilons {
                let (stats, _) = match g3_counts(&sc, d, eps, cap) {
                    Ok(r) => r,
                    Err(e) => {
                        out.require(false, format!("{label} n={n} ε={eps}: {e}"));
                        continue;
                    }
                };
                let (v, e) = (stats.vertices as f64, stats.edges as f64);
                let &mut (v0, e0, n0, eps0) = base.get_or_insert((v, e, n, eps));
                let (gv, ge) = (v / v0, e / e0);
                let (pv, pe) = (predicted_v(n, eps) / predicted_v(n0, eps0), predicted_e(n, eps) / predicted_e(n0, eps0));
                out.require(
                    gv <= 1.3 * pv && ge <= 1.3 * pe,
                    format!(
                        "{label} n={n} ε={eps}: |V3| {} ×{gv:.2} (pred ×{pv:.2}), |E3| {} ×{ge:.2} (pred ×{pe:.2})",
                        stats.vertices, stats.edges
                    ),
                );
            }
        }
    };
    sweep("default spacing", &sizes, ApproxOptions::new(0.1).spacing_cap, &mut out);
    sweep("full spacing", &sizes[..1], None, &mut out);
    out
}

fn main() -> ExitCode {
    let mut all = true;
    all &= report(1, "closed forms agree with quadrature", Duration::from_secs(10), closed_forms);
    all &= report(2, "spiral benchmark", Duration::from_secs(5), spiral_benchmark);
    all &= report(3, "two-point counterexample", Duration::from_secs(10), two_point_scene);

    let (mut rows, mut errors) = (Vec::new(), Vec::new());
    all &= report(4, "approximation ratio corpus", Duration::from_secs(300), || {
        (rows, errors) = run_corpus();
        corpus_ratios(&rows, &errors)
    });
    all &= report(5, "stage guarantees", Duration::from_secs(300), || stage_guarantees(&rows, &errors));
    all &= report(6, "cell-level suites", Duration::from_secs(180), cell_suites);
    all &= report(7, "size scaling", Duration::from_secs(120), size_scaling);
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
