//! SVG diagnostics: obstacles, diagram edges, graph samples, edgelets and
//! paths, one `<g>` layer each.

use std::fmt::Write as _;

use crate::approx::{Edgelet, SearchGraph};
use crate::geom::{Path, Point, Scene};
use crate::voronoi::{EdgeShape, RadialRole, RefinedDiagram};

/// Nodes per primitive when a path is drawn as a polyline.
pub const PATH_NODES: usize = 64;
const EDGE_NODES: usize = 32;

/// Layer toggles; everything is drawn by default.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SvgLayers {
    pub obstacles: bool,
    pub voronoi: bool,
    pub refinement: bool,
    pub samples: bool,
    pub edgelets: bool,
    pub path: bool,
}

impl Default for SvgLayers {
    fn default() -> Self {
        Self {
            obstacles: true,
            voronoi: true,
            refinement: true,
            samples: true,
            edgelets: true,
            path: true,
        }
    }
}

/// Optional overlays on top of the scene.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overlay<'a> {
    pub refined: Option<&'a RefinedDiagram>,
    pub graph: Option<&'a SearchGraph>,
    pub edgelets: &'a [Edgelet],
    pub path: Option<&'a Path>,
}

fn points_attr(points: &[Point]) -> String {
    let mut s = String::new();
    for (i, p) in points.iter().enumerate() {
        if i > 0 {
            s.push(' ');
        }
        let _ = write!(s, "{:.6},{:.6}", p.x, p.y);
    }
    s
}

fn polyline(out: &mut String, class: &str, style: &str, points: &[Point]) {
    let _ = writeln!(
        out,
        r#"<polyline class="{class}" {style} fill="none" vector-effect="non-scaling-stroke" points="{}"/>"#,
        points_attr(points)
    );
}

fn sample_range(f: impl Fn(f64) -> Point, a: f64, b: f64, nodes: usize) -> Vec<Point> {
    (0..nodes)
        .map(|i| f(a + (b - a) * i as f64 / (nodes - 1) as f64))
        .collect()
}

pub fn render_svg(scene: &Scene, overlay: &Overlay, layers: &SvgLayers) -> String {
    let b = scene.bbox();
    let (w, h) = (b.width(), b.height());
    let dot = 0.004 * b.diagonal();
    let mut out = String::new();
    let _ = writeln!(out, r#"<?xml version="1.0" encoding="UTF-8"?>"#);
    let _ = writeln!(
        out,
        r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" viewBox="{} {} {} {}" width="800" height="{:.0}">"#,
        b.min.x,
        -b.max.y,
        w,
        h,
        800.0 * h / w
    );
    let _ = writeln!(out, r#"<g transform="scale(1,-1)">"#);
    let _ = writeln!(
        out,
        r#"<rect class="box" x="{}" y="{}" width="{w}" height="{h}" fill="white" stroke="black" vector-effect="non-scaling-stroke"/>"#,
        b.min.x, b.min.y
    );

    if layers.obstacles {
        let _ = writeln!(out, r#"<g id="obstacles">"#);
        for poly in scene.obstacles() {
            match poly.vertices.len() {
                1 => {
                    let p = poly.vertices[0];
                    let _ = writeln!(
                        out,
                        r#"<circle class="obstacle" cx="{}" cy="{}" r="{dot}" fill="darkred"/>"#,
                        p.x, p.y
                    );
                }
                2 => polyline(&mut out, "obstacle", r#"stroke="darkred" stroke-width="3""#, &poly.vertices),
                _ => {
                    let _ = writeln!(
                        out,
                        r#"<polygon class="obstacle" fill="darkred" stroke="darkred" points="{}"/>"#,
                        points_attr(&poly.vertices)
                    );
                }
            }
        }
        let _ = writeln!(out, "</g>");
    }

    if let Some(rd) = overlay.refined {
        let (mut external, mut radial) = (String::new(), String::new());
        for (k, e) in rd.edges.iter().enumerate() {
            let (lo, hi) = e.range();
            let class = format!("redge e{k}");
            match e.shape {
                EdgeShape::External { .. } => polyline(
                    &mut external,
                    &format!("{class} external"),
                    r#"stroke="black" stroke-dasharray="4 3""#,
                    &sample_range(|t| e.point(t), lo, hi, EDGE_NODES),
                ),
                EdgeShape::Radial { role, .. } => {
                    let style = match role {
                        RadialRole::VoronoiVertex => r#"stroke="green""#,
                        RadialRole::ClearanceMin => r#"stroke="blue" stroke-dasharray="1 3""#,
                        RadialRole::Connector => r#"stroke="purple" stroke-dasharray="6 2 1 2""#,
                    };
                    polyline(&mut radial, &format!("{class} radial"), style, &[e.point(lo), e.point(hi)]);
                }
            }
        }
        if layers.voronoi {
            let _ = writeln!(out, r#"<g id="voronoi">"#);
            out.push_str(&external);
            let _ = writeln!(out, "</g>");
        }
        if layers.refinement {
            let _ = writeln!(out, r#"<g id="refinement">"#);
            out.push_str(&radial);
            let _ = writeln!(out, "</g>");
        }
        if layers.edgelets && !overlay.edgelets.is_empty() {
            let _ = writeln!(out, r#"<g id="edgelets">"#);
            for el in overlay.edgelets {
                let e = &rd.edges[el.edge];
                let pts = sample_range(|t| e.point(t), el.from, el.to, EDGE_NODES);
                polyline(&mut out, "edgelet", r#"stroke="orange" stroke-width="3" stroke-opacity="0.7""#, &pts);
            }
            let _ = writeln!(out, "</g>");
        }
    }

    if layers.samples {
        if let Some(g) = overlay.graph {
            let _ = writeln!(out, r#"<g id="samples">"#);
            for v in &g.vertices {
                let _ = writeln!(
                    out,
                    r#"<circle class="sample" cx="{:.6}" cy="{:.6}" r="{}" fill="teal"/>"#,
                    v.point.x,
                    v.point.y,
                    0.4 * dot
                );
            }
            let _ = writeln!(out, "</g>");
        }
    }

    if layers.path {
        if let Some(path) = overlay.path {
            let _ = writeln!(out, r#"<g id="path">"#);
            polyline(&mut out, "path", r#"stroke="red" stroke-width="2""#, &path.polyline(PATH_NODES));
            let _ = writeln!(out, "</g>");
        }
    }

    for (name, p) in [("source", scene.source()), ("target", scene.target())] {
        let _ = writeln!(
            out,
            r#"<circle class="{name}" cx="{}" cy="{}" r="{dot}" fill="black"/>"#,
            p.x, p.y
        );
    }
    let _ = writeln!(out, "</g>\n</svg>");
    out
}
