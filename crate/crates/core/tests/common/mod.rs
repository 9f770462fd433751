//! Seeded scene generator shared by the integration suites.
#![allow(dead_code)]

pub mod suites;

use clearance_paths::geom::{BBox, Point, Polygon, Scene};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const BOX: f64 = 100.0;

fn ring(rng: &mut ChaCha8Rng, center: Point, radius: f64, kind: usize) -> Vec<Point> {
    match kind {
        0 => vec![center],
        1 => {
            let a = rng.gen_range(0.0..std::f64::consts::PI);
            let d = Point::polar(radius, a);
            vec![center - d, center + d]
        }
        2 => {
            // Convex polygon with jittered angles.
            let k = rng.gen_range(3..=6);
            let mut angles: Vec<f64> = (0..k)
                .map(|i| {
                    (i as f64 + rng.gen_range(-0.3..0.3)) * std::f64::consts::TAU / k as f64
                })
                .collect();
            angles.sort_by(f64::total_cmp);
            angles
                .into_iter()
                .map(|a| center + Point::polar(radius * rng.gen_range(0.7..1.0), a))
                .collect()
        }
        _ => {
            // Star with alternating radii: half its vertices are reflex.
            let k = 2 * rng.gen_range(3..=4);
            let phase = rng.gen_range(0.0..1.0);
            (0..k)
                .map(|i| {
                    let r = if i % 2 == 0 { radius } else { radius * rng.gen_range(0.35..0.6) };
                    center + Point::polar(r, (i as f64 + phase) * std::f64::consts::TAU / k as f64)
                })
                .collect()
        }
    }
}

/// Random scene with at most `max_vertices` obstacle vertices.
pub fn random_scene(seed: u64, max_vertices: usize) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bbox = BBox::new(Point::new(0.0, 0.0), Point::new(BOX, BOX));
    let mut placed: Vec<(Point, f64)> = Vec::new();
    let mut rings: Vec<Vec<Point>> = Vec::new();
    let mut count = 0;
    let mut attempts = 0;
    while attempts < 400 {
        attempts += 1;
        let kind = rng.gen_range(0..4);
        let radius = rng.gen_range(4.0..12.0);
        let center = Point::new(rng.gen_range(15.0..85.0), rng.gen_range(15.0..85.0));
        if placed.iter().any(|(c, r)| c.dist(center) < r + radius + 3.0) {
            continue;
        }
        let poly = ring(&mut rng, center, radius, kind);
        if count + poly.len() > max_vertices {
            if count + 1 > max_vertices {
                break;
            }
            continue;
        }
        count += poly.len();
        placed.push((center, radius));
        rings.push(poly);
    }
    let obstacles: Vec<Polygon> = rings.into_iter().map(Polygon::new).collect();
    let probe = Scene::new(obstacles.clone(), bbox, Point::new(1.0, 1.0), Point::new(99.0, 99.0))
        .expect("generated obstacles are valid");
    let mut pick = |x_lo: f64, x_hi: f64| loop {
        let p = Point::new(rng.gen_range(x_lo..x_hi), rng.gen_range(5.0..95.0));
        if probe.inside_obstacle(p).is_none() && probe.clearance_value(p) > 1.0 {
            return p;
        }
    };
    let s = pick(3.0, 35.0);
    let t = pick(65.0, 97.0);
    Scene::new(obstacles, bbox, s, t).expect("endpoints are free")
}

/// Scene family for size scaling: `n / 2` segment obstacles on a jittered
/// grid in the standard box, source and target in opposite corners.
pub fn segment_field(seed: u64, n: usize) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count = n / 2;
    let side = (count as f64).sqrt().ceil() as usize;
    let pitch = 80.0 / side as f64;
    let mut slots: Vec<(usize, usize)> = (0..side).flat_map(|i| (0..side).map(move |j| (i, j))).collect();
    slots.shuffle(&mut rng);
    let obstacles = slots[..count]
        .iter()
        .map(|&(i, j)| {
            let c = Point::new(
                10.0 + pitch * (i as f64 + 0.5 + rng.gen_range(-0.15..0.15)),
                10.0 + pitch * (j as f64 + 0.5 + rng.gen_range(-0.15..0.15)),
            );
            let d = Point::polar(0.3 * pitch, rng.gen_range(0.0..std::f64::consts::PI));
            Polygon::new(vec![c - d, c + d])
        })
        .collect();
    let bbox = BBox::new(Point::new(0.0, 0.0), Point::new(BOX, BOX));
    Scene::new(obstacles, bbox, Point::new(4.0, 4.0), Point::new(96.0, 96.0)).expect("segments are disjoint")
}
