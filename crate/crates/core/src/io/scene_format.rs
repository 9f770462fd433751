//! Line-oriented scene files.
//!
//! ```text
//! # comments and blank lines are ignored
//! clearance-scene 1                  first record, format version
//! seed 17                            optional, generator seed of the scene
//! box <xmin> <ymin> <xmax> <ymax>
//! source <x> <y>
//! target <x> <y>
//! obstacle <x1> <y1> [<x2> <y2> ...] zero or more, one ring per line
//! ```
//!
//! Tokens are separated by whitespace. A one-vertex ring is a point obstacle
//! and a two-vertex ring a segment obstacle. Records other than `obstacle`
//! appear at most once; their order is free after the header.

use std::fmt::Write as _;

use thiserror::Error;

use crate::error::SceneError;
use crate::geom::{BBox, Point, Polygon, Scene};

pub const FORMAT_TAG: &str = "clearance-scene";
pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SceneFileError {
    #[error("line {line}: {field}: {message}")]
    Syntax {
        line: usize,
        field: String,
        message: String,
    },
    #[error("missing `{field}` record")]
    Missing { field: &'static str },
    #[error("line {line}: unsupported format version {version}")]
    Version { line: usize, version: String },
    #[error("invalid scene: {0}")]
    Invalid(#[from] SceneError),
}

/// Parsed contents of a scene file before geometric validation.
#[derive(Debug, Clone, PartialEq)]
pub struct SceneFile {
    pub version: u32,
    pub seed: Option<u64>,
    pub obstacles: Vec<Vec<Point>>,
    pub bbox: [f64; 4],
    pub source: Point,
    pub target: Point,
}

impl SceneFile {
    pub fn from_scene(scene: &Scene, seed: Option<u64>) -> Self {
        let b = scene.bbox();
        Self {
            version: FORMAT_VERSION,
            seed,
            obstacles: scene.obstacles().iter().map(|p| p.vertices.clone()).collect(),
            bbox: [b.min.x, b.min.y, b.max.x, b.max.y],
            source: scene.source(),
            target: scene.target(),
        }
    }

    pub fn to_scene(&self) -> Result<Scene, SceneError> {
        let [x0, y0, x1, y1] = self.bbox;
        Scene::new(
            self.obstacles.iter().cloned().map(Polygon::new).collect(),
            BBox::new(Point::new(x0, y0), Point::new(x1, y1)),
            self.source,
            self.target,
        )
    }

    pub fn parse(text: &str) -> Result<Self, SceneFileError> {
        let mut header = false;
        let mut seed = None;
        let mut bbox = None;
        let mut source = None;
        let mut target = None;
        let mut obstacles = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = i + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let mut tokens = body.split_whitespace();
            let head = tokens.next().unwrap_or_default();
            let rest: Vec<&str> = tokens.collect();
            let syntax = |field: &str, message: String| SceneFileError::Syntax {
                line,
                field: field.to_string(),
                message,
            };
            if !header {
                if head != FORMAT_TAG {
                    return Err(syntax("header", format!("expected `{FORMAT_TAG} <version>`")));
                }
                match rest.as_slice() {
                    [v] if v.parse::<u32>() == Ok(FORMAT_VERSION) => header = true,
                    [v] => {
                        return Err(SceneFileError::Version {
                            line,
                            version: v.to_string(),
                        })
                    }
                    _ => return Err(syntax("header", "expected one version number".into())),
                }
                continue;
            }
            let once = |slot_filled: bool| {
                if slot_filled {
                    Err(syntax(head, "duplicate record".into()))
                } else {
                    Ok(())
                }
            };
            match head {
                "seed" => {
                    once(seed.is_some())?;
                    let [v] = rest.as_slice() else {
                        return Err(syntax("seed", "expected one integer".into()));
                    };
                    seed = Some(v.parse::<u64>().map_err(|e| syntax("seed", e.to_string()))?);
                }
                "box" => {
                    once(bbox.is_some())?;
                    let v = numbers(&rest, line, "box")?;
                    let [x0, y0, x1, y1] = v[..] else {
                        return Err(syntax("box", "expected four numbers".into()));
                    };
                    bbox = Some([x0, y0, x1, y1]);
                }
                "source" | "target" => {
                    let slot = if head == "source" { &mut source } else { &mut target };
                    once(slot.is_some())?;
                    let v = numbers(&rest, line, head)?;
                    let [x, y] = v[..] else {
                        return Err(syntax(head, "expected two numbers".into()));
                    };
                    *slot = Some(Point::new(x, y));
                }
                "obstacle" => {
                    let field = format!("obstacle {}", obstacles.len());
                    let v = numbers(&rest, line, &field)?;
                    if v.is_empty() || v.len() % 2 != 0 {
                        return Err(syntax(&field, "expected one or more coordinate pairs".into()));
                    }
                    obstacles.push(v.chunks(2).map(|c| Point::new(c[0], c[1])).collect());
                }
                other => return Err(syntax(other, "unknown record".into())),
            }
        }
        if !header {
            return Err(SceneFileError::Missing { field: "clearance-scene" });
        }
        Ok(Self {
            version: FORMAT_VERSION,
            seed,
            obstacles,
            bbox: bbox.ok_or(SceneFileError::Missing { field: "box" })?,
            source: source.ok_or(SceneFileError::Missing { field: "source" })?,
            target: target.ok_or(SceneFileError::Missing { field: "target" })?,
        })
    }

    pub fn serialize(&self) -> String {
        let mut out = format!("{FORMAT_TAG} {}\n", self.version);
        if let Some(seed) = self.seed {
            let _ = writeln!(out, "seed {seed}");
        }
        let [x0, y0, x1, y1] = self.bbox;
        let _ = writeln!(out, "box {x0} {y0} {x1} {y1}");
        let _ = writeln!(out, "source {} {}", self.source.x, self.source.y);
        let _ = writeln!(out, "target {} {}", self.target.x, self.target.y);
        for ring in &self.obstacles {
            out.push_str("obstacle");
            for p in ring {
                let _ = write!(out, " {} {}", p.x, p.y);
            }
            out.push('\n');
        }
        out
    }
}

fn numbers(tokens: &[&str], line: usize, field: &str) -> Result<Vec<f64>, SceneFileError> {
    tokens
        .iter()
        .map(|t| match t.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            Ok(_) => Err(SceneFileError::Syntax {
                line,
                field: field.to_string(),
                message: format!("non-finite coordinate `{t}`"),
            }),
            Err(e) => Err(SceneFileError::Syntax {
                line,
                field: field.to_string(),
                message: format!("`{t}`: {e}"),
            }),
        })
        .collect()
}

/// Parses and validates a scene document.
pub fn parse_scene(text: &str) -> Result<Scene, SceneFileError> {
    Ok(SceneFile::parse(text)?.to_scene()?)
}

pub fn serialize_scene(scene: &Scene) -> String {
    SceneFile::from_scene(scene, None).serialize()
}
