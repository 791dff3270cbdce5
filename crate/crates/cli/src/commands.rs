//! The four subcommands as library functions; `main` only parses arguments and maps
//! outcomes to exit codes.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use fbsurf::cube::{FaceTable, Isometry};
use fbsurf::geometry::{Chart, GeodesicSpace};
use fbsurf::oracle::{audit_triangles, sample_vertex_pairs, validate_geodesics};
use fbsurf::solver::{complexity_bound, solve, IterateRecord};
use fbsurf::{IterateLog, Point, Problem, Surface, SurfaceMesh};
use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::point::format_point;
use crate::table::{num, write_file, write_points};

/// Tolerance on `H` increases for the monotone flag in `summary.csv`.
pub const MONOTONE_TOL: f64 = 1e-10;

/// Largest law-of-cosines defect accepted by the triangle audit.
pub const AUDIT_TOL: f64 = 1e-6;

pub struct SolveReport {
    pub logs: Vec<IterateLog>,
    pub files: Vec<PathBuf>,
}

/// Solves from every start concurrently and writes the iterate logs, the inputs, the
/// summary and the value grids into `out`.
pub fn cmd_solve(cfg: &ExperimentConfig, out: &Path) -> Result<SolveReport> {
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let problem = cfg.problem()?;
    let solver = cfg.solver_config(&problem)?;
    let logs = cfg
        .starts
        .par_iter()
        .enumerate()
        .map(|(i, x0)| {
            solve(&problem, &solver, x0)
                .with_context(|| format!("start {} at {}", i + 1, format_point(x0)))
        })
        .collect::<Result<Vec<_>>>()?;

    let s = &cfg.surface;
    let mut files = Vec::new();
    let mut emit = |name: String| {
        let p = out.join(name);
        files.push(p.clone());
        p
    };
    write_points(&emit("data.csv".into()), s, &cfg.data)?;
    write_points(&emit("origin.csv".into()), s, &[cfg.origin])?;
    for (i, log) in logs.iter().enumerate() {
        let xs: Vec<Point> = log.records.iter().map(|r| r.x).collect();
        write_points(&emit(format!("x{}_log.csv", i + 1)), s, &xs)?;
        write_file(
            &emit(format!("x{}_diag.csv", i + 1)),
            &DIAG_HEADER,
            log.records.iter().map(diag_row),
        )?;
    }
    let rows = summary_rows(cfg, &problem, &logs)?;
    write_file(&emit("summary.csv".into()), &SUMMARY_HEADER, rows)?;
    for name in write_grids(&problem, cfg.density, out)? {
        files.push(out.join(name));
    }
    Ok(SolveReport { logs, files })
}

const DIAG_HEADER: [&str; 12] = [
    "k",
    "chart",
    "a",
    "b",
    "f",
    "g",
    "h",
    "grad_norm",
    "tau",
    "displacement",
    "epsilon",
    "corner_retries",
];

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn diag_row(r: &IterateRecord<f64>) -> Vec<String> {
    vec![
        r.k.to_string(),
        r.x.chart.code().to_string(),
        num(r.x.local[0]),
        num(r.x.local[1]),
        num(r.values.f),
        num(r.values.g),
        num(r.values.h),
        num(r.grad_norm),
        opt(r.tau),
        opt(r.displacement),
        opt(r.epsilon),
        r.corner_retries.to_string(),
    ]
}

const SUMMARY_HEADER: [&str; 14] = [
    "start",
    "mode",
    "steps",
    "converged",
    "monotone",
    "final_h",
    "max_increase",
    "final_displacement",
    "d0",
    "complexity_bound",
    "limit_chart",
    "limit_a",
    "limit_b",
    "limit_spread",
];

/// One row per start. The complexity bound takes the final iterate as the reference
/// minimiser, so `d0` is the distance travelled from the start. `limit_spread` is the
/// largest distance from this limit to any other start's limit.
fn summary_rows(
    cfg: &ExperimentConfig,
    problem: &Problem,
    logs: &[IterateLog],
) -> Result<Vec<Vec<String>>> {
    let (smooth, curv) = cfg.constants(problem)?;
    let s = &cfg.surface;
    let limits: Vec<Point> = logs.iter().map(|l| l.last().x).collect();
    logs.iter()
        .zip(&limits)
        .enumerate()
        .map(|(i, (log, lim))| {
            let d0 = s.distance(&log.records[0].x, lim)?;
            let spread = limits
                .iter()
                .map(|o| s.distance(lim, o))
                .collect::<fbsurf::Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max);
            Ok(vec![
                (i + 1).to_string(),
                log.mode.name().to_string(),
                log.steps().to_string(),
                log.converged.to_string(),
                log.is_monotone(MONOTONE_TOL).to_string(),
                num(log.final_objective()),
                num(log.max_increase()),
                num(log.final_displacement()),
                num(d0),
                num(complexity_bound(log, &smooth, &curv, d0)),
                lim.chart.code().to_string(),
                num(lim.local[0]),
                num(lim.local[1]),
                num(spread),
            ])
        })
        .collect()
}

fn lin(i: usize, n: usize, lo: f64, hi: f64) -> f64 {
    lo + (hi - lo) * i as f64 / (n - 1) as f64
}

/// `H` on `density × density` chart grids. Cube: faces 2, 4 and 6 over the unit square,
/// columns `u,v,value`. Cylinder: the top cap in polar form (`v` is the radius) and the
/// front half `φ ∈ [π, 2π]` of the side (`v` is the height), columns `angle,v,value`.
/// Returns the file names written.
pub fn write_grids(problem: &Problem, density: usize, out: &Path) -> Result<Vec<String>> {
    if density < 2 {
        bail!("density {density} must be at least 2");
    }
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    type Param = Box<dyn Fn(f64, f64) -> Point + Sync>;
    let d = density;
    let grids: Vec<(String, [&str; 3], [f64; 4], Param)> = match problem.space() {
        Surface::Cube(_) => [2u8, 4, 6]
            .into_iter()
            .map(|f| -> (String, [&str; 3], [f64; 4], Param) {
                (
                    format!("F{f}.csv"),
                    ["u", "v", "value"],
                    [0.0, 1.0, 0.0, 1.0],
                    Box::new(move |u, v| Point::face(f, u, v)),
                )
            })
            .collect(),
        Surface::Cylinder(c) => {
            let (r, h) = (c.radius(), c.half_height());
            vec![
                (
                    "top.csv".into(),
                    ["angle", "v", "value"],
                    [0.0, TAU, 0.0, r],
                    Box::new(|a: f64, v: f64| Point::top(v * a.cos(), v * a.sin())),
                ),
                (
                    "side_front.csv".into(),
                    ["angle", "v", "value"],
                    [PI, TAU, -h, h],
                    Box::new(Point::side),
                ),
            ]
        }
    };
    let mut names = Vec::new();
    for (name, header, [a0, a1, b0, b1], at) in grids {
        let rows = (0..d * d)
            .into_par_iter()
            .map(|k| {
                let (a, b) = (lin(k / d, d, a0, a1), lin(k % d, d, b0, b1));
                Ok(vec![num(a), num(b), num(problem.h(&at(a, b))?)])
            })
            .collect::<Result<Vec<_>>>()
            .with_context(|| format!("evaluating {name}"))?;
        write_file(&out.join(&name), &header, rows)?;
        names.push(name);
    }
    Ok(names)
}

pub fn cmd_sample(cfg: &ExperimentConfig, density: usize, out: &Path) -> Result<Vec<String>> {
    write_grids(&cfg.problem()?, density, out)
}

fn chart_label(c: Chart) -> String {
    match c {
        Chart::Face(k) => k.to_string(),
        Chart::Top => "top".into(),
        Chart::Bottom => "bottom".into(),
        Chart::Side => "side".into(),
    }
}

/// Length with 12 decimals, the chart chain, the segments and the crossing points.
pub fn cmd_geodesic(surface: &Surface, from: &Point, to: &Point) -> Result<String> {
    let g = surface.geodesic(from, to)?;
    let mut s = String::new();
    writeln!(s, "length {:.12}", g.length)?;
    let mut charts = g.path.charts();
    if charts.is_empty() {
        charts.push(surface.canonicalize(from)?.chart);
    }
    let chain: Vec<String> = charts.into_iter().map(chart_label).collect();
    writeln!(s, "chain [{}]", chain.join(", "))?;
    for seg in &g.path.segments {
        let (a, b) = (
            Point::new(seg.chart, seg.start),
            Point::new(seg.chart, seg.end),
        );
        writeln!(s, "segment {} -> {}", format_point(&a), format_point(&b))?;
    }
    for c in &g.path.crossings {
        writeln!(s, "crossing {}", format_point(c))?;
    }
    Ok(s)
}

pub struct ValidateOutcome {
    pub text: String,
    pub passed: bool,
}

/// Mesh-oracle comparison on `samples` vertex pairs plus a law-of-cosines audit of
/// `samples` flat-patch triangles.
pub fn cmd_validate(
    surface: &Surface,
    resolution: f64,
    samples: usize,
    tol: f64,
    seed: u64,
) -> Result<ValidateOutcome> {
    let mesh = SurfaceMesh::build(surface, resolution)?;
    let pairs = sample_vertex_pairs(&mesh, samples, seed);
    let report = validate_geodesics(surface, &mesh, &pairs, tol)?;
    let mut text = String::new();
    let violations: Vec<_> = report.violations().collect();
    writeln!(
        text,
        "geodesics: {} pairs at resolution {resolution}, max relative gap {:.6}, {} violations",
        pairs.len(),
        report.max_relative_gap,
        violations.len()
    )?;
    for v in &violations {
        let detail = match (&v.error, v.exact) {
            (Some(e), _) => format!("error: {e}"),
            (None, Some(exact)) => format!("exact {exact:.12}, mesh {:.12}", v.mesh),
            (None, None) => String::new(),
        };
        writeln!(
            text,
            "violation {} -> {}: {detail}",
            format_point(&v.from),
            format_point(&v.to)
        )?;
    }
    let audit_ok = match audit_triangles(surface, samples, seed) {
        Ok(a) => {
            writeln!(
                text,
                "triangles: {} flat-patch triangles, max law-of-cosines defect {:.3e}, {} ambiguous, {} comparison failures",
                a.triangles,
                a.max_flat_defect,
                a.ambiguous,
                a.lower_failures + a.upper_failures
            )?;
            a.max_flat_defect <= AUDIT_TOL && a.lower_failures + a.upper_failures == 0
        }
        Err(e) => {
            writeln!(text, "triangles: audit failed: {e}")?;
            false
        }
    };
    let passed = violations.is_empty() && audit_ok;
    writeln!(text, "{}", if passed { "PASS" } else { "FAIL" })?;
    Ok(ValidateOutcome { text, passed })
}

/// Reads face-table overrides, one per line: `dst src a b c d e f` sets the map
/// `(x, y) ↦ (a x + b y + c, d x + e y + f)` from `src` into the plane of `dst`;
/// `dst src none` removes it. `#` starts a comment.
pub fn load_face_table(path: &Path) -> Result<FaceTable> {
    let src =
        std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_face_table(&src).with_context(|| format!("in {}", path.display()))
}

pub fn parse_face_table(src: &str) -> Result<FaceTable> {
    let mut table = FaceTable::standard();
    for (i, line) in src.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let at = || format!("line {}", i + 1);
        let fields: Vec<&str> = line.split_whitespace().collect();
        let face = |t: &str| -> Result<u8> {
            match t.parse::<u8>() {
                Ok(f @ 1..=6) => Ok(f),
                _ => Err(anyhow!("`{t}` is not a face 1..6")),
            }
        };
        let (dst, src) = match fields[..] {
            [d, s, ..] => (face(d).with_context(at)?, face(s).with_context(at)?),
            _ => bail!("{}: expected `dst src a b c d e f`", at()),
        };
        let map = match fields[2..] {
            ["none"] => None,
            [..] if fields.len() == 8 => {
                let k = fields[2..]
                    .iter()
                    .map(|t| {
                        t.parse::<i32>()
                            .map_err(|_| anyhow!("`{t}` is not an integer"))
                    })
                    .collect::<Result<Vec<_>>>()
                    .with_context(at)?;
                Some(Isometry::new(k[0], k[1], k[2], k[3], k[4], k[5]))
            }
            _ => bail!("{}: expected six integers or `none`", at()),
        };
        table = table.with_entry(dst, src, map);
    }
    Ok(table)
}
