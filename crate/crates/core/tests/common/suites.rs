//! Randomized property suites over refined cells, shared by the per-module
//! tests (reduced sizes) and the acceptance run (full sizes).

use clearance_paths::approx::{build_refined, mark_edgelets, Edgelet, EdgeletRole};
use clearance_paths::geom::{Point, Scene};
use clearance_paths::oracle::{cell_oracle, grid_oracle, OracleConfig};
use clearance_paths::reachability::{locally_reachable, reachable_portion, side_point, side_range};
use clearance_paths::voronoi::{EdgeShape, RefinedCell, RefinedDiagram};
use clearance_paths::wellbehaved::{best_anchor, lambda_path, well_behaved_path, Side};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::random_scene;

/// Outcome of one suite: number of checks and failure descriptions.
#[derive(Debug, Default)]
pub struct Report {
    pub checked: usize,
    pub skipped: usize,
    pub failures: Vec<String>,
}

impl Report {
    pub fn fail(&mut self, msg: String) {
        self.failures.push(msg);
    }

    pub fn ok(&self) -> bool {
        self.failures.is_empty() && self.checked > 0
    }

    pub fn summary(&self) -> String {
        let mut s = format!(
            "{} checked, {} skipped, {} failed",
            self.checked,
            self.skipped,
            self.failures.len()
        );
        for f in self.failures.iter().take(5) {
            s.push_str("\n    ");
            s.push_str(f);
        }
        s
    }
}

/// Refined cells drawn from seeded random scenes.
pub struct CellPool {
    pub scenes: Vec<Scene>,
    pub diagrams: Vec<RefinedDiagram>,
    /// `(scene index, cell index)`.
    pub cells: Vec<(usize, usize)>,
}

impl CellPool {
    /// `count` cells picked at random from scenes seeded from `seed` on.
    pub fn new(seed: u64, count: usize, max_vertices: usize) -> Self {
        Self::filtered(seed, count, max_vertices, |_| true)
    }

    pub fn filtered(seed: u64, count: usize, max_vertices: usize, keep: impl Fn(&RefinedCell) -> bool) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (mut scenes, mut diagrams, mut cells) = (Vec::new(), Vec::new(), Vec::new());
        let per_scene = 25;
        let mut k = 0u64;
        while cells.len() < count {
            let sc = random_scene(seed.wrapping_mul(1000) + k, max_vertices);
            k += 1;
            let Ok(rd) = build_refined(&sc) else { continue };
            let mut ids: Vec<usize> = (0..rd.cells.len()).filter(|&c| keep(&rd.cells[c])).collect();
            ids.shuffle(&mut rng);
            let si = scenes.len();
            for &c in ids.iter().take(per_scene.min(count - cells.len())) {
                cells.push((si, c));
            }
            scenes.push(sc);
            diagrams.push(rd);
        }
        Self {
            scenes,
            diagrams,
            cells,
        }
    }

    pub fn get(&self, i: usize) -> (&Scene, &RefinedDiagram, &RefinedCell) {
        let (s, c) = self.cells[i];
        (&self.scenes[s], &self.diagrams[s], &self.diagrams[s].cells[c])
    }
}

/// A point on `side` at a random parameter, kept off the feature foot.
pub fn random_side_point(rng: &mut ChaCha8Rng, cell: &RefinedCell, side: Side) -> Point {
    let (a, b) = side_range(cell, side);
    let x = match side {
        Side::Kappa => rng.gen_range(a.min(b)..=a.max(b)),
        _ => b * rng.gen_range(0.02..=1.0),
    };
    side_point(cell, side, x)
}

/// Anchor optimality: a dense scan of anchors on β never beats the chosen one.
pub fn anchor_dense_scan(cells: usize, points: usize, scan: usize) -> Report {
    let pool = CellPool::new(11, cells, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut rep = Report::default();
    for i in 0..pool.cells.len() {
        let (_, _, cell) = pool.get(i);
        for _ in 0..points {
            let clr_p = cell.clr_v * (1e-3f64).powf(rng.gen_range(0.0..1.0));
            let p = cell.beta_point(clr_p);
            let chosen = match best_anchor(cell, p) {
                Ok((_, l)) => l.cost,
                Err(e) => {
                    rep.fail(format!("cell {i}: best_anchor failed: {e}"));
                    continue;
                }
            };
            let mut scan_min = f64::INFINITY;
            for k in 0..=scan {
                let c = clr_p + (cell.clr_v - clr_p) * k as f64 / scan as f64;
                if let Ok(l) = lambda_path(cell, p, c) {
                    scan_min = scan_min.min(l.cost);
                }
            }
            rep.checked += 1;
            if scan_min < chosen - 1e-6 {
                rep.fail(format!("cell {i}: scan {scan_min} < anchor {chosen}"));
            }
        }
    }
    rep
}

/// Well-behaved path costs against the in-cell grid oracle: factor 3 when
/// neither endpoint is on β, factor 11 when exactly one is. Cells whose α
/// collapses onto the obstacle are left out: their α points sit below the
/// oracle's clearance floor.
pub fn well_behaved_bounds(pairs: usize, resolution: usize) -> Report {
    let pool = CellPool::filtered(21, pairs, 24, |c| c.clr_u >= 1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let mut rep = Report::default();
    for i in 0..pool.cells.len() {
        let (scene, rd, cell) = pool.get(i);
        let one_beta = i % 2 == 1;
        let (sp, sq) = if one_beta {
            (Side::Beta, *[Side::Alpha, Side::Kappa].choose(&mut rng).unwrap())
        } else {
            (Side::Alpha, Side::Kappa)
        };
        let (p, q) = (random_side_point(&mut rng, cell, sp), random_side_point(&mut rng, cell, sq));
        let wb = match well_behaved_path(cell, p, q, rd.tol) {
            Ok(w) => w.cost,
            Err(e) => {
                rep.fail(format!("cell {i}: well_behaved_path failed: {e}"));
                continue;
            }
        };
        // Thin cells may need a finer lattice to connect the two points.
        let oracle = [1, 2, 4].iter().find_map(|&m| {
            let cfg = OracleConfig::with_resolution(resolution * m);
            cell_oracle(scene, cell, p, q, &cfg).ok()
        });
        let Some(oracle) = oracle.map(|r| r.cost) else {
            rep.skipped += 1;
            continue;
        };
        let factor = if one_beta { 11.0 } else { 3.0 };
        rep.checked += 1;
        if wb > factor * oracle + 1e-4 {
            rep.fail(format!("cell {i}: well-behaved {wb} > {factor} x oracle {oracle}"));
        }
    }
    rep
}

/// Reachable portions: the dense-scan reachable set on a side is one run of
/// samples that contains an end sample and matches `reachable_portion`.
pub fn reachable_portion_connectivity(cases: usize, samples: usize) -> Report {
    let pool = CellPool::new(31, cases, 24);
    let mut rng = ChaCha8Rng::seed_from_u64(32);
    let mut rep = Report::default();
    let sides = [Side::Alpha, Side::Beta, Side::Kappa];
    for i in 0..pool.cells.len() {
        let (_, _, cell) = pool.get(i);
        let ps = *sides.choose(&mut rng).unwrap();
        let e = *sides.iter().filter(|s| **s != ps).collect::<Vec<_>>().choose(&mut rng).unwrap();
        let p = random_side_point(&mut rng, cell, ps);
        let (a, b) = side_range(cell, *e);
        let lo = if *e == Side::Kappa { a } else { b * 1e-6 };
        let xs: Vec<f64> = (0..samples).map(|k| lo + (b - lo) * k as f64 / (samples - 1) as f64).collect();
        let reach: Vec<bool> = xs.iter().map(|&x| locally_reachable(cell, p, side_point(cell, *e, x))).collect();
        let runs = reach.windows(2).filter(|w| w[0] != w[1]).count();
        rep.checked += 1;
        let any = reach.iter().any(|&r| r);
        let ends = reach[0] || reach[samples - 1];
        let single = match (any, reach[0], reach[samples - 1]) {
            (false, ..) => runs == 0,
            (true, true, true) => runs == 0,
            _ => runs <= 1,
        };
        if !single || (any && !ends) {
            rep.fail(format!("cell {i}: {runs} transitions, ends reachable: {ends}, p on {ps:?}, e {e:?}, vertex {}, {:?}", cell.is_vertex(), reach.iter().enumerate().filter(|w| w.0 > 0 && reach[w.0 - 1] != *w.1).map(|w| w.0).collect::<Vec<_>>()));
            continue;
        }
        let spacing = (b - lo).abs() / (samples - 1) as f64;
        let sorted = |(x, y): (f64, f64)| (x.min(y), x.max(y));
        let dense = any.then(|| {
            let first = reach.iter().position(|&r| r).unwrap();
            let last = reach.iter().rposition(|&r| r).unwrap();
            sorted((xs[first], xs[last]))
        });
        let clip = |x: f64| if *e == Side::Kappa { x } else { x.max(lo) };
        let analytic = reachable_portion(cell, p, *e).map(|(x, y)| sorted((clip(x), clip(y))));
        let agree = match (dense, analytic) {
            (None, None) => true,
            (Some((d0, d1)), Some((a0, a1))) => {
                (d0 - a0).abs() <= 2.0 * spacing && (d1 - a1).abs() <= 2.0 * spacing
            }
            // A portion thinner than the sampling can be missed by the scan.
            (None, Some((a0, a1))) => a1 - a0 <= 2.0 * spacing,
            (Some((d0, d1)), None) => d1 - d0 <= 2.0 * spacing,
        };
        if !agree {
            rep.fail(format!("cell {i}: dense {dense:?} vs analytic {analytic:?} (spacing {spacing:.3e})"));
        }
    }
    rep
}

fn segment_hit(a: Point, b: Point, c: Point, d: Point) -> Option<Point> {
    let r = b - a;
    let s = d - c;
    let den = r.cross(s);
    if den == 0.0 {
        return None;
    }
    let t = (c - a).cross(s) / den;
    let u = (c - a).cross(r) / den;
    ((0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u)).then(|| a + r * t)
}

/// Cost distance, along `edge`, from parameter `x` to the nearest edgelet.
fn edgelet_gap(rd: &RefinedDiagram, edge: usize, x: f64, edgelets: &[&Edgelet]) -> f64 {
    let e = &rd.edges[edge];
    edgelets
        .iter()
        .map(|el| {
            let (lo, hi) = (el.from.min(el.to), el.from.max(el.to));
            if x >= lo && x <= hi {
                0.0
            } else {
                let near = if x < lo { lo } else { hi };
                e.cost(x.max(1e-300), near.max(1e-300))
            }
        })
        .fold(f64::INFINITY, f64::min)
}

/// Crossings of the oracle path with diagram edges lie in edgelets marked
/// with `d` equal to the oracle cost, up to the grid's positional error.
pub fn edgelet_containment(scenes: usize, resolution: usize) -> Report {
    let mut rep = Report::default();
    let config = OracleConfig::with_resolution(resolution);
    for seed in 0..scenes as u64 {
        let scene = random_scene(500 + seed, 24);
        let Ok(rd) = build_refined(&scene) else {
            rep.fail(format!("seed {}: diagram failed", 500 + seed));
            continue;
        };
        let Ok(oracle) = grid_oracle(&scene, scene.source(), scene.target(), &config) else {
            rep.skipped += 1;
            continue;
        };
        let d = oracle.cost;
        let (clr_s, clr_t) = (rd.source.clearance, rd.target.clearance);
        let marks: Vec<Vec<Edgelet>> = rd.cells.iter().map(|c| mark_edgelets(c, d, clr_s, clr_t)).collect();
        let h = scene.bbox().diagonal() / resolution as f64;
        for (k, e) in rd.edges.iter().enumerate() {
            let (lo, hi) = e.range();
            let nodes = if e.is_internal() { 2 } else { 65 };
            let pts: Vec<Point> = (0..nodes)
                .map(|i| e.point(lo + (hi - lo) * i as f64 / (nodes - 1) as f64))
                .collect();
            let own: Vec<&Edgelet> = e
                .cells
                .iter()
                .flat_map(|&c| marks[c].iter().filter(move |el| el.edge == k))
                .collect();
            for seg in oracle.path.windows(2) {
                for w in pts.windows(2) {
                    let Some(x) = segment_hit(seg[0], seg[1], w[0], w[1]) else { continue };
                    let param = match e.shape {
                        EdgeShape::Radial { .. } => scene.clearance_value(x).min(hi),
                        EdgeShape::External { .. } => e.param_of(x).clamp(lo, hi),
                    };
                    rep.checked += 1;
                    let gap = edgelet_gap(&rd, k, param, &own);
                    let slack = 2.0 * h / e.clearance(param).max(1e-12) + 1e-9;
                    if gap > slack {
                        let roles: Vec<EdgeletRole> = own.iter().map(|el| el.role).collect();
                        rep.fail(format!(
                            "seed {}: crossing of edge {k} at param {param:.6} is {gap:.3e} from edgelets {roles:?}",
                            500 + seed
                        ));
                    }
                }
            }
        }
    }
    rep
}

/// Closed-form costs against adaptive quadrature of `1/clr`, `count`
/// random instances per kind, relative tolerance 1e-6.
pub fn closed_form_fidelity(count: usize) -> Vec<(&'static str, Report)> {
    use clearance_paths::geom::{
        path_cost_numeric, radial_cost, single_feature_geodesic, BBox, FeatureKind, Polygon, Primitive,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let far = BBox::new(Point::new(-1e4, -1e4), Point::new(1e4, 1e4));
    let vertex_scene = Scene::new(vec![Polygon::new(vec![Point::new(0.0, 0.0)])], far, Point::new(1.0, 0.0), Point::new(2.0, 0.0)).unwrap();
    let edge_scene = Scene::new(
        vec![Polygon::new(vec![Point::new(-1e3, 0.0), Point::new(1e3, 0.0)])],
        far,
        Point::new(0.0, 1.0),
        Point::new(0.0, 2.0),
    )
    .unwrap();
    let v_id = vertex_scene
        .features()
        .iter()
        .position(|f| f.kind() == FeatureKind::Vertex && f.is_site())
        .unwrap();
    let e_id = edge_scene
        .features()
        .iter()
        .position(|f| f.kind() == FeatureKind::Edge && f.normal.y > 0.5 && f.is_site())
        .unwrap();
    let check = |rep: &mut Report, what: String, closed: f64, numeric: Result<f64, _>| {
        rep.checked += 1;
        match numeric {
            Ok(n) if (closed - n).abs() <= 1e-6 * (1.0 + closed) => {}
            Ok(n) => rep.fail(format!("{what}: closed {closed} vs quadrature {n}")),
            Err(e) => rep.fail(format!("{what}: quadrature failed: {e}")),
        }
    };
    let polar = |rng: &mut ChaCha8Rng| Point::polar(10f64.powf(rng.gen_range(-1.0..1.0)), rng.gen_range(-3.1..3.1));

    let mut spiral = Report::default();
    for i in 0..count {
        let (p, q) = (polar(&mut rng), polar(&mut rng));
        match single_feature_geodesic(v_id, vertex_scene.feature(v_id), p, q) {
            Ok(prims) => {
                let prim = prims[0];
                check(&mut spiral, format!("spiral {i}"), prim.cost, path_cost_numeric(&vertex_scene, &prim));
            }
            Err(e) => spiral.fail(format!("spiral {i}: {e}")),
        }
    }

    let mut arc = Report::default();
    let upper = |rng: &mut ChaCha8Rng| Point::new(rng.gen_range(-10.0..10.0), 10f64.powf(rng.gen_range(-1.0..1.0)));
    for i in 0..count {
        let (p, q) = (upper(&mut rng), upper(&mut rng));
        match single_feature_geodesic(e_id, edge_scene.feature(e_id), p, q) {
            Ok(prims) => {
                let prim = prims[0];
                check(&mut arc, format!("arc {i}"), prim.cost, path_cost_numeric(&edge_scene, &prim));
            }
            Err(e) => arc.fail(format!("arc {i}: {e}")),
        }
    }

    let mut radial = Report::default();
    for i in 0..count {
        let dir = Point::polar(1.0, rng.gen_range(-3.1..3.1));
        let (r0, r1) = (10f64.powf(rng.gen_range(-2.0..1.0)), 10f64.powf(rng.gen_range(-2.0..1.0)));
        let prim = Primitive::radial(v_id, dir * r0, dir * r1, r0, r1);
        check(&mut radial, format!("radial {i}"), radial_cost(r0, r1), path_cost_numeric(&vertex_scene, &prim));
    }

    let mut bisector = Report::default();
    let mut edges = Vec::new();
    for seed in 0..6u64 {
        let sc = random_scene(900 + seed, 16);
        let rd = build_refined(&sc).unwrap();
        let ext: Vec<usize> = rd
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_internal())
            .map(|(k, _)| k)
            .collect();
        edges.push((sc, rd, ext));
    }
    for i in 0..count {
        let (sc, rd, ext) = &edges[i % edges.len()];
        let e = &rd.edges[*ext.choose(&mut rng).unwrap()];
        let (lo, hi) = e.range();
        let (a, b) = (rng.gen_range(lo..=hi), rng.gen_range(lo..=hi));
        let prim = e.primitive(a, b);
        check(&mut bisector, format!("edge portion {i}"), e.cost(a, b), path_cost_numeric(sc, &prim));
    }
    vec![("spiral", spiral), ("arc", arc), ("radial", radial), ("edge_cost", bisector)]
}
