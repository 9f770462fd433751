use std::fs;
use std::path::{Path as FsPath, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use clearance_paths::approx::{approximate, build_refined, ApproxOptions, DEFAULT_C_SCALE};
use clearance_paths::geom::Scene;
use clearance_paths::io::{parse_scene, render_svg, OracleFile, Overlay, ResultFile, SceneFileError, SvgLayers};
use clearance_paths::oracle::{grid_oracle, OracleConfig, DEFAULT_RESOLUTION};
use clearance_paths::PlanError;

/// Slack on top of (1+ε) accepted by `check`.
const CHECK_SLACK: f64 = 1.05;

#[derive(Parser)]
#[command(version, about = "Approximate minimum-cost paths weighted by reciprocal clearance")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the staged approximation.
    Solve {
        scene: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        /// Last stage to run.
        #[arg(long, default_value_t = 3, value_parser = clap::value_parser!(u8).range(1..=3))]
        stage: u8,
        #[arg(long)]
        json: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Grid shortest path used as a reference cost.
    Oracle {
        scene: PathBuf,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Build the refined diagram and report its size.
    Diagram {
        scene: PathBuf,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Solve and compare against the oracle at (1+ε)·1.05.
    Check {
        scene: PathBuf,
        #[command(flatten)]
        solver: SolverArgs,
        #[arg(long, default_value_t = DEFAULT_RESOLUTION)]
        resolution: usize,
    },
}

#[derive(Args)]
struct SolverArgs {
    #[arg(long)]
    epsilon: f64,
    /// ε is divided by this before the final stage.
    #[arg(long, default_value_t = DEFAULT_C_SCALE)]
    c_scale: f64,
    /// Limit on the divisor of the final-stage sample spacing.
    #[arg(long, conflicts_with = "full_spacing")]
    spacing_cap: Option<usize>,
    /// Use the obstacle vertex count as the spacing divisor.
    #[arg(long)]
    full_spacing: bool,
}

impl SolverArgs {
    fn options(&self, last_stage: u8) -> ApproxOptions {
        let mut opts = ApproxOptions::new(self.epsilon);
        opts.c_scale = self.c_scale;
        opts.last_stage = last_stage;
        if self.full_spacing {
            opts.spacing_cap = None;
        } else if let Some(cap) = self.spacing_cap {
            opts.spacing_cap = Some(cap);
        }
        opts
    }
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Scene { path: PathBuf, source: SceneFileError },
    #[error(transparent)]
    Plan(#[from] PlanError),
    #[error("check failed: ratio {ratio:.6} exceeds {limit:.6}")]
    CheckFailed { ratio: f64, limit: f64 },
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Read { .. } | CliError::Scene { .. } => 2,
            CliError::Plan(PlanError::Scene(_) | PlanError::BadEpsilon(_)) => 2,
            CliError::Plan(PlanError::Unreachable) => 3,
            CliError::Write { .. } | CliError::Plan(_) | CliError::CheckFailed { .. } => 4,
        }
    }
}

fn load(path: &FsPath) -> Result<Scene, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Read {
        path: path.into(),
        source,
    })?;
    parse_scene(&text).map_err(|source| CliError::Scene {
        path: path.into(),
        source,
    })
}

fn save(path: &FsPath, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|source| CliError::Write {
        path: path.into(),
        source,
    })
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("result types serialize")
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            scene,
            solver,
            stage,
            json,
            svg,
        } => {
            let sc = load(&scene)?;
            let sol = approximate(&sc, &solver.options(stage))?;
            for s in &sol.stages {
                println!(
                    "stage{} {:.9} vertices {} edges {}",
                    s.stage, s.cost, s.stats.vertices, s.stats.edges
                );
            }
            println!("cost {:.9}", sol.best.cost);
            if let Some(out) = json {
                save(&out, &to_json(&ResultFile::from_solution(&sol, solver.epsilon)))?;
            }
            if let Some(out) = svg {
                let overlay = Overlay {
                    refined: Some(&sol.refined),
                    path: Some(&sol.best.path),
                    ..Overlay::default()
                };
                save(&out, &render_svg(&sc, &overlay, &SvgLayers::default()))?;
            }
        }
        Command::Oracle {
            scene,
            resolution,
            json,
        } => {
            let sc = load(&scene)?;
            let r = grid_oracle(&sc, sc.source(), sc.target(), &OracleConfig::with_resolution(resolution))?;
            println!("oracle {:.9} nodes {} edges {}", r.cost, r.nodes, r.edges);
            if let Some(out) = json {
                save(&out, &to_json(&OracleFile::new(&r, resolution)))?;
            }
        }
        Command::Diagram { scene, svg } => {
            let sc = load(&scene)?;
            let rd = build_refined(&sc)?;
            println!(
                "voronoi edges {} refined edges {} cells {}",
                rd.voronoi.edges.len(),
                rd.edges.len(),
                rd.cells.len()
            );
            if let Some(out) = svg {
                let overlay = Overlay {
                    refined: Some(&rd),
                    ..Overlay::default()
                };
                save(&out, &render_svg(&sc, &overlay, &SvgLayers::default()))?;
            }
        }
        Command::Check {
            scene,
            solver,
            resolution,
        } => {
            let sc = load(&scene)?;
            let sol = approximate(&sc, &solver.options(3))?;
            let r = grid_oracle(&sc, sc.source(), sc.target(), &OracleConfig::with_resolution(resolution))?;
            let best_known = sol.stages.iter().map(|s| s.cost).fold(r.cost, f64::min);
            let ratio = sol.best.cost / best_known;
            let limit = (1.0 + solver.epsilon) * CHECK_SLACK;
            println!(
                "cost {:.9} oracle {:.9} ratio {:.6} limit {:.6}",
                sol.best.cost, r.cost, ratio, limit
            );
            if ratio > limit {
                return Err(CliError::CheckFailed { ratio, limit });
            }
            println!("pass");
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
