use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use fbsurf::cube::{Cube, DEFAULT_MAX_CHAIN};
use fbsurf::geometry::GeodesicSpace;
use fbsurf::Surface;
use fbsurf_cli::commands::{cmd_geodesic, cmd_sample, cmd_solve, cmd_validate, load_face_table};
use fbsurf_cli::config::{surface_from, ExperimentConfig};
use fbsurf_cli::point::parse_point;

/// Forward-backward splitting on the cube and the capped cylinder.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every start of a config and write the CSV outputs.
    Solve {
        #[arg(long)]
        config: PathBuf,
        /// Output directory; overrides `out` in the config.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the value grids of a config's objective.
    Sample {
        #[arg(long)]
        config: PathBuf,
        /// Grid points per chart axis; overrides `density` in the config.
        #[arg(long)]
        density: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the length and path of a minimal geodesic.
    Geodesic {
        #[command(flatten)]
        geometry: GeometryArgs,
        /// Start point, e.g. `F1(0.25, 0.75)` or `side(0, 0.1)`.
        from: String,
        to: String,
    },
    /// Compare exact distances with mesh shortest paths and audit flat triangles.
    Validate {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[arg(long, default_value_t = 0.02)]
        resolution: f64,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0.1)]
        tol: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Args)]
struct GeometryArgs {
    #[arg(long, value_parser = ["cube", "cylinder"])]
    geometry: String,
    /// Cylinder radius [default: 1].
    #[arg(long)]
    radius: Option<f64>,
    /// Cylinder half height [default: 0.5].
    #[arg(long)]
    half_height: Option<f64>,
    /// Face-table overrides for the cube, one `dst src a b c d e f` per line.
    #[arg(long)]
    face_table: Option<PathBuf>,
}

impl GeometryArgs {
    fn surface(&self) -> Result<Surface> {
        let (r, h) = match self.geometry.as_str() {
            "cylinder" => (
                Some(self.radius.unwrap_or(1.0)),
                Some(self.half_height.unwrap_or(0.5)),
            ),
            _ => (self.radius, self.half_height),
        };
        let surface = surface_from(&self.geometry, r, h)?;
        match (&self.face_table, surface) {
            (Some(path), Surface::Cube(_)) => Ok(Surface::Cube(Cube::with_table(
                load_face_table(path)?,
                DEFAULT_MAX_CHAIN,
            ))),
            (Some(_), Surface::Cylinder(_)) => {
                anyhow::bail!("--face-table applies to the cube only")
            }
            (None, s) => Ok(s),
        }
    }
}

/// Exit codes: 0 success, 1 failed validation or runtime error, 2 usage error.
enum Failure {
    Usage(anyhow::Error),
    Run(anyhow::Error),
    Check,
}

fn run(cli: Cli) -> Result<(), Failure> {
    let usage = Failure::Usage;
    match cli.command {
        Command::Solve { config, out } => {
            let cfg = ExperimentConfig::load(&config).map_err(usage)?;
            let out = out.or(cfg.out.clone()).unwrap_or_else(|| "out".into());
            let report = cmd_solve(&cfg, &out).map_err(Failure::Run)?;
            for (i, log) in report.logs.iter().enumerate() {
                let last = log.last();
                println!(
                    "start {}: {} steps, converged {}, H {:.12}, monotone {}",
                    i + 1,
                    log.steps(),
                    log.converged,
                    last.values.h,
                    log.is_monotone(fbsurf_cli::commands::MONOTONE_TOL)
                );
            }
            println!("wrote {} files to {}", report.files.len(), out.display());
        }
        Command::Sample {
            config,
            density,
            out,
        } => {
            let cfg = ExperimentConfig::load(&config).map_err(usage)?;
            let out = out.or(cfg.out.clone()).unwrap_or_else(|| "out".into());
            let names = cmd_sample(&cfg, density.unwrap_or(cfg.density), &out).map_err(usage)?;
            println!("wrote {} to {}", names.join(", "), out.display());
        }
        Command::Geodesic { geometry, from, to } => {
            let surface = geometry.surface().map_err(usage)?;
            let parse = |t: &str| -> Result<_> {
                let p = parse_point(surface.kind(), t)?;
                surface
                    .check_point(&p)
                    .with_context(|| format!("point `{t}`"))?;
                Ok(p)
            };
            let (p, q) = (parse(&from).map_err(usage)?, parse(&to).map_err(usage)?);
            print!("{}", cmd_geodesic(&surface, &p, &q).map_err(Failure::Run)?);
        }
        Command::Validate {
            geometry,
            resolution,
            samples,
            tol,
            seed,
        } => {
            let surface = geometry.surface().map_err(usage)?;
            let outcome =
                cmd_validate(&surface, resolution, samples, tol, seed).map_err(Failure::Run)?;
            print!("{}", outcome.text);
            if !outcome.passed {
                return Err(Failure::Check);
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Check) => ExitCode::from(1),
        Err(Failure::Run(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
