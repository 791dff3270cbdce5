//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{ensure, Result};
use fbsurf::comparison::CurvatureConstants;
use fbsurf::geometry::{Chart, GeodesicSpace};
use fbsurf::oracle::{
    audit_triangles, grid_minimize, mesh_distance, sample_vertex_pairs, validate_geodesics,
};
use fbsurf::solver::{complexity_bound, solve, Mode, SmoothnessConstants};
use fbsurf::{Point, Problem, SolverConfig, StepSchedule, Surface, SurfaceMesh};
use fbsurf_cli::commands::{cmd_solve, MONOTONE_TOL};
use fbsurf_cli::config::ExperimentConfig;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Result<Outcome> {
    Ok(Outcome { pass, detail })
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn surfaces() -> [(&'static str, Surface); 2] {
    [
        ("cube", Surface::cube()),
        ("cylinder", Surface::cylinder(1.0, 0.5).unwrap()),
    ]
}

/// Uniform point kept `m` away from cube edges and cylinder rims.
fn interior_point(s: &Surface, r: &mut ChaCha8Rng, m: f64) -> Point {
    match s {
        Surface::Cube(_) => Point::face(
            r.gen_range(1..=6),
            r.gen_range(m..1.0 - m),
            r.gen_range(m..1.0 - m),
        ),
        Surface::Cylinder(c) => {
            let (rad, h) = (c.radius(), c.half_height());
            let side = 2.0 * PI * rad * 2.0 * h;
            let pick = r.gen_range(0.0..side + 2.0 * PI * rad * rad);
            if pick < side {
                return Point::side(r.gen_range(0.0..2.0 * PI), r.gen_range(-h + m..h - m));
            }
            loop {
                let (u, v) = (r.gen_range(-rad..rad), r.gen_range(-rad..rad));
                if u.hypot(v) <= rad - m {
                    return if pick < side + PI * rad * rad {
                        Point::top(u, v)
                    } else {
                        Point::bottom(u, v)
                    };
                }
            }
        }
    }
}

fn c1_round_trip() -> Result<Outcome> {
    let mut r = rng(101);
    let (mut worst_exp, mut worst_norm) = (0.0f64, 0.0f64);
    for (_, s) in surfaces() {
        for _ in 0..500 {
            let (x, y) = (
                interior_point(&s, &mut r, 1e-3),
                interior_point(&s, &mut r, 1e-3),
            );
            let v = s.log(&x, &y)?;
            let back = s.exp(&v)?;
            let d = s.distance(&x, &y)?;
            worst_exp = worst_exp.max(s.distance(&back, &y)?);
            worst_norm = worst_norm.max((v.components[0].hypot(v.components[1]) - d).abs());
        }
    }
    outcome(
        worst_exp <= 1e-9 && worst_norm <= 1e-10,
        format!("500 pairs per surface, max d(exp log, y) {worst_exp:.1e}, max |‖log‖ − d| {worst_norm:.1e}"),
    )
}

/// Mean and max relative error of snapped mesh distances on fixed point pairs.
fn point_pair_errors(
    s: &Surface,
    mesh: &SurfaceMesh,
    pairs: &[(Point, Point)],
) -> Result<(f64, f64)> {
    let mut errs = Vec::new();
    for (p, q) in pairs {
        let exact = s.distance(p, q)?;
        if exact > 0.05 {
            errs.push((mesh_distance(s, mesh, p, q)?.length - exact).abs() / exact);
        }
    }
    Ok((
        errs.iter().sum::<f64>() / errs.len() as f64,
        errs.iter().copied().fold(0.0, f64::max),
    ))
}

fn c2_oracle() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, s) in surfaces() {
        let mut r = rng(11);
        let pairs: Vec<(Point, Point)> = (0..200)
            .map(|_| {
                (
                    fbsurf::oracle::sample_point(&s, &mut r),
                    fbsurf::oracle::sample_point(&s, &mut r),
                )
            })
            .collect();
        let mut errors = Vec::new();
        for (res, tol) in [(0.02, 0.10), (0.01, 0.05)] {
            let mesh = SurfaceMesh::build(&s, res)?;
            let report = validate_geodesics(&s, &mesh, &sample_vertex_pairs(&mesh, 200, 12), tol)?;
            pass &= report.passed();
            errors.push(point_pair_errors(&s, &mesh, &pairs)?);
            detail.push(format!("{name} {res}: gap {:.4}", report.max_relative_gap));
        }
        let monotone = errors[1].0 <= errors[0].0 && errors[1].1 <= errors[0].1;
        pass &= monotone;
        detail.push(format!(
            "{name} point-pair mean/max {:.4}/{:.4} -> {:.4}/{:.4}",
            errors[0].0, errors[0].1, errors[1].0, errors[1].1
        ));
    }
    outcome(pass, detail.join(", "))
}

fn c3_audit() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, s) in surfaces() {
        let a = audit_triangles(&s, 200, 13)?;
        pass &= a.triangles == 200 && a.max_flat_defect <= 1e-6;
        detail.push(format!(
            "{name} {} triangles, max defect {:.1e}",
            a.triangles, a.max_flat_defect
        ));
    }
    outcome(pass, detail.join(", "))
}

fn c4_prox() -> Result<Outcome> {
    let mut r = rng(104);
    let (mut jumps, mut slides, mut certified) = (0, 0, 0);
    let (mut worst_t, mut worst_cert) = (0.0f64, 0.0f64);
    let mut pass = true;
    for (_, s) in surfaces() {
        for _ in 0..300 {
            let (w, z) = (
                interior_point(&s, &mut r, 1e-3),
                interior_point(&s, &mut r, 1e-3),
            );
            let d = s.distance(&w, &z)?;
            let lambda = r.gen_range(0.1..2.0);
            let tau = r.gen_range(0.0..1.5) * d / lambda;
            let p = Problem::new(&s, vec![w], z, lambda)?;
            let x = p.prox_dist(&w, tau)?;
            let step = lambda * tau;
            if d <= step {
                pass &= x == *p.origin();
                jumps += 1;
                continue;
            }
            slides += 1;
            worst_t = worst_t.max((s.distance(&w, &x)? / d - step / d).abs());
            let rest = s.distance(&x, &z)?;
            let unique = s.geodesic(&x, &z)?.is_unique(1e-7) && s.geodesic(&x, &w)?.is_unique(1e-7);
            if rest < 1e-6 || step < 1e-6 || !unique {
                continue;
            }
            let (lw, lz) = (s.log(&x, &w)?, s.log(&x, &z)?);
            let k = step / rest;
            let defect = (lw.components[0] + k * lz.components[0])
                .hypot(lw.components[1] + k * lz.components[1]);
            worst_cert = worst_cert.max(defect);
            certified += 1;
        }
    }
    pass &= worst_t <= 1e-12 && worst_cert <= 1e-8 && jumps > 0 && certified > 200;
    outcome(
        pass,
        format!(
            "{jumps} threshold jumps, {slides} slides, max |t − λτ/d| {worst_t:.1e}, {certified} certificates, max defect {worst_cert:.1e}"
        ),
    )
}

struct Instance {
    name: &'static str,
    surface: Surface,
    data: Vec<Point>,
    origin: Point,
    lambda: f64,
    starts: Vec<Point>,
}

fn descent_instances() -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for (name, file) in [
        ("cube demo", "cube_demo.toml"),
        ("cylinder demo", "cylinder_demo.toml"),
    ] {
        let c = ExperimentConfig::load(&fixture(file))?;
        out.push(Instance {
            name,
            surface: c.surface,
            data: c.data,
            origin: c.origin,
            lambda: c.lambda,
            starts: c.starts,
        });
    }
    out.push(Instance {
        name: "cube single face",
        surface: Surface::cube(),
        data: vec![
            Point::face(6, 0.3, 0.4),
            Point::face(6, 0.6, 0.7),
            Point::face(6, 0.5, 0.2),
        ],
        origin: Point::face(6, 0.7, 0.3),
        lambda: 0.2,
        starts: vec![Point::face(6, 0.1, 0.9)],
    });
    out.push(Instance {
        name: "cube three faces",
        surface: Surface::cube(),
        data: vec![
            Point::face(1, 0.3, 0.3),
            Point::face(1, 0.6, 0.5),
            Point::face(3, 0.4, 0.6),
        ],
        origin: Point::face(1, 0.7, 0.7),
        lambda: 0.5,
        starts: vec![Point::face(5, 0.5, 0.5)],
    });
    out.push(Instance {
        name: "cylinder cap",
        surface: Surface::cylinder(1.0, 0.5)?,
        data: vec![
            Point::top(0.2, 0.1),
            Point::top(-0.3, 0.4),
            Point::side(2.0, 0.3),
        ],
        origin: Point::top(0.0, 0.0),
        lambda: 0.4,
        starts: vec![Point::side(4.0, -0.2)],
    });
    out.push(Instance {
        name: "slim cylinder",
        surface: Surface::cylinder(0.6, 1.2)?,
        data: vec![
            Point::side(1.0, 0.5),
            Point::side(1.4, -0.2),
            Point::side(0.8, 0.9),
        ],
        origin: Point::side(1.2, 0.0),
        lambda: 0.2,
        starts: vec![Point::bottom(0.1, 0.2)],
    });
    Ok(out)
}

fn c5_monotone_descent() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for inst in descent_instances()? {
        let p = Problem::new(
            inst.surface.clone(),
            inst.data.clone(),
            inst.origin,
            inst.lambda,
        )?;
        let curv = CurvatureConstants::flat(inst.surface.diameter_bound());
        let cap = SmoothnessConstants::for_problem(&p, inst.surface.diameter_bound())
            .step_cap(&curv, None)?;
        let cfg = SolverConfig::new(StepSchedule::constant(0.99 * cap, cap)?);
        let (mut worst_inc, mut worst_disp) = (f64::NEG_INFINITY, 0.0f64);
        for x0 in &inst.starts {
            let log = solve(&p, &cfg, x0)?;
            pass &= log.converged && log.is_monotone(1e-10) && log.final_displacement() < 1e-8;
            worst_inc = worst_inc.max(log.max_increase());
            worst_disp = worst_disp.max(log.final_displacement());
        }
        detail.push(format!(
            "{}: max ΔH {worst_inc:.1e}, last step {worst_disp:.1e}",
            inst.name
        ));
    }
    outcome(pass, detail.join("; "))
}

fn planar_step(x: [f64; 2], data: &[[f64; 2]], z: [f64; 2], lambda: f64, tau: f64) -> [f64; 2] {
    let mut w = x;
    for y in data {
        w[0] += tau * (y[0] - x[0]);
        w[1] += tau * (y[1] - x[1]);
    }
    let d = (z[0] - w[0]).hypot(z[1] - w[1]);
    if d <= lambda * tau {
        return z;
    }
    let t = lambda * tau / d;
    [w[0] + t * (z[0] - w[0]), w[1] + t * (z[1] - w[1])]
}

fn planar_h(x: [f64; 2], data: &[[f64; 2]], z: [f64; 2], lambda: f64) -> f64 {
    let f: f64 = data
        .iter()
        .map(|y| 0.5 * ((x[0] - y[0]).powi(2) + (x[1] - y[1]).powi(2)))
        .sum();
    f + lambda * (x[0] - z[0]).hypot(x[1] - z[1])
}

const FLAT_DATA: [[f64; 2]; 3] = [[0.3, 0.4], [0.6, 0.7], [0.5, 0.2]];
const FLAT_Z: [f64; 2] = [0.7, 0.3];
const FLAT_LAMBDA: f64 = 0.2;

fn flat_problem(lambda: f64) -> Result<Problem<fbsurf::cube::Cube>> {
    let data = FLAT_DATA
        .iter()
        .map(|y| Point::face(6, y[0], y[1]))
        .collect();
    Ok(Problem::new(
        fbsurf::cube::Cube::new(),
        data,
        Point::face(6, FLAT_Z[0], FLAT_Z[1]),
        lambda,
    )?)
}

fn c6_flat_exactness() -> Result<Outcome> {
    let p = flat_problem(FLAT_LAMBDA)?;
    let tau = 0.9 / 3.0;
    let cfg = SolverConfig::new(StepSchedule::constant(tau, 1.0 / 3.0)?)
        .with_max_iters(100)
        .with_stop_tol(0.0);
    let log = solve(&p, &cfg, &Point::face(6, 0.45, 0.52))?;
    let mut x = [0.45, 0.52];
    let mut worst = 0.0f64;
    let mut on_face = true;
    for r in &log.records {
        on_face &= r.x.chart == Chart::Face(6);
        worst = worst.max((r.x.local[0] - x[0]).abs().max((r.x.local[1] - x[1]).abs()));
        x = planar_step(x, &FLAT_DATA, FLAT_Z, FLAT_LAMBDA, tau);
    }
    let steps = log.steps();
    outcome(
        on_face && steps == 100 && worst <= 1e-10,
        format!("{steps} iterations, max deviation {worst:.1e}"),
    )
}

fn c7_reproduction() -> Result<Outcome> {
    let mut pass = true;
    let mut detail = Vec::new();
    for file in ["cube_demo.toml", "cylinder_demo.toml"] {
        let cfg = ExperimentConfig::load(&fixture(file))?;
        let dir = tempfile::tempdir()?;
        let report = cmd_solve(&cfg, dir.path())?;
        let p = cfg.problem()?;
        let limits: Vec<Point> = report.logs.iter().map(|l| l.last().x).collect();
        let mut spread = 0.0f64;
        for a in &limits {
            for b in &limits {
                spread = spread.max(p.space().distance(a, b)?);
            }
        }
        let summary = std::fs::read_to_string(dir.path().join("summary.csv"))?;
        let flags = summary
            .lines()
            .skip(1)
            .all(|l| l.split(',').nth(4) == Some("true"));
        let mesh = SurfaceMesh::build(&cfg.surface, 0.01)?;
        let grid = grid_minimize(&p, &mesh)?;
        let off = p.space().distance(&limits[0], &grid.point)?;
        pass &= limits.len() >= 3 && spread <= 1e-6 && off <= 2.0 * 0.01 && flags;
        ensure!(
            report.logs.iter().all(|l| l.is_monotone(MONOTONE_TOL)) == flags,
            "summary flag disagrees"
        );
        detail.push(format!(
            "{}: {} starts, spread {spread:.1e}, grid argmin {:.4} away, H {:.10}",
            file.trim_end_matches("_demo.toml"),
            limits.len(),
            off,
            report.logs[0].final_objective()
        ));
    }
    outcome(pass, detail.join("; "))
}

fn c8_complexity() -> Result<Outcome> {
    let mut pass = true;
    let mut worst_slack = f64::INFINITY;
    let diam = 2.0f64.sqrt();
    let flat = CurvatureConstants::flat(diam);
    for lambda in [0.05, FLAT_LAMBDA, 0.5] {
        let p = flat_problem(lambda)?;
        let consts = SmoothnessConstants::for_problem(&p, diam);
        let tau = 0.5 / 3.0;
        let mut xs = [0.1, 0.9];
        for _ in 0..20_000 {
            xs = planar_step(xs, &FLAT_DATA, FLAT_Z, lambda, tau);
        }
        let (h_star, star) = (
            planar_h(xs, &FLAT_DATA, FLAT_Z, lambda),
            Point::face(6, xs[0], xs[1]),
        );
        let x0 = Point::face(6, 0.1, 0.9);
        let d0 = p.space().distance(&star, &x0)?;
        for n in [1, 2, 5, 10, 50] {
            let cfg = SolverConfig::new(StepSchedule::constant(tau, 1.0 / 3.0)?)
                .with_max_iters(n)
                .with_stop_tol(0.0);
            let log = solve(&p, &cfg, &x0)?;
            let bound = complexity_bound(&log, &consts, &flat, d0);
            pass &= (bound - d0 * d0 / (2.0 * tau * n as f64)).abs() <= 1e-12;
            worst_slack = worst_slack.min(bound + 1e-8 - (log.final_objective() - h_star));

            // prox-only minimises G, with minimiser z and G* = 0
            let prox = solve(&p, &cfg.clone().with_mode(Mode::ProxOnly), &x0)?;
            let dz = p.space().distance(p.origin(), &x0)?;
            let bound = complexity_bound(&prox, &consts, &flat, dz);
            pass &= (bound - dz * dz / (2.0 * tau * prox.steps() as f64)).abs() <= 1e-12;
            worst_slack = worst_slack.min(bound + 1e-8 - prox.final_objective());
        }
    }
    pass &= worst_slack >= 0.0;
    outcome(
        pass,
        format!("fb and prox-only on 3 flat instances x 5 horizons, min slack {worst_slack:.3e}"),
    )
}

fn c9_shortcut() -> Result<Outcome> {
    let s = Surface::cylinder(1.0, 0.1)?;
    let g = s.geodesic(&Point::side(0.0, 0.0), &Point::side(PI, 0.0))?;
    let crosses = g.path.charts().iter().any(|c| c.is_cap());
    outcome(
        g.length < PI && crosses,
        format!("length {:.12} < π, charts {:?}", g.length, g.path.charts()),
    )
}

fn c10_determinism() -> Result<Outcome> {
    let mut files = 0;
    let mut same = true;
    for file in ["cube_demo.toml", "cylinder_demo.toml"] {
        let cfg = ExperimentConfig::load(&fixture(file))?;
        let (a, b) = (tempfile::tempdir()?, tempfile::tempdir()?);
        let ra = cmd_solve(&cfg, a.path())?;
        let rb = cmd_solve(&cfg, b.path())?;
        same &= ra.files.len() == rb.files.len();
        for f in &ra.files {
            let name = f.file_name().expect("file name");
            same &= std::fs::read(f)? == std::fs::read(b.path().join(name))?;
            files += 1;
        }
    }
    outcome(same, format!("{files} CSV files compared byte for byte"))
}

type Criterion = (&'static str, fn() -> Result<Outcome>);

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("geometry round trip", c1_round_trip),
        ("oracle equivalence", c2_oracle),
        ("comparison audit", c3_audit),
        ("prox correctness", c4_prox),
        ("monotone descent", c5_monotone_descent),
        ("flat-chart exactness", c6_flat_exactness),
        ("multi-start reproduction", c7_reproduction),
        ("complexity bound", c8_complexity),
        ("cap shortcut", c9_shortcut),
        ("determinism", c10_determinism),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = run().unwrap_or_else(|e| Outcome {
            pass: false,
            detail: format!("error: {e:#}"),
        });
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {} {name}: {} [{:.1}s]",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!(
        "acceptance: {} of {} criteria passed",
        criteria.len() - failed,
        criteria.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
