//! Experiment configuration, read from TOML. See the README for the grammar.

use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use fbsurf::geometry::{GeodesicSpace, SurfaceKind};
use fbsurf::solver::{Mode, SmoothnessConstants, DEFAULT_MAX_ITERS, DEFAULT_STOP_TOL};
use fbsurf::CurvatureConstants;
use fbsurf::{Point, Problem, SolverConfig, StepSchedule, Surface};
use serde::Deserialize;

use crate::point::parse_point;

pub const DEFAULT_DENSITY: usize = 32;

/// Largest default initial step.
const TAU0_LIMIT: f64 = 0.5;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    geometry: String,
    radius: Option<f64>,
    half_height: Option<f64>,
    lambda: f64,
    origin: String,
    data: Vec<String>,
    starts: Vec<String>,
    mode: Option<String>,
    max_iters: Option<usize>,
    stop_tol: Option<f64>,
    density: Option<usize>,
    out: Option<PathBuf>,
    smoothness: Option<f64>,
    l_exp: Option<f64>,
    #[serde(default)]
    schedule: RawSchedule,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSchedule {
    #[serde(default = "harmonic")]
    kind: String,
    tau0: Option<f64>,
    taus: Option<Vec<f64>>,
    locality: Option<[f64; 2]>,
}

fn harmonic() -> String {
    "harmonic".into()
}

impl Default for RawSchedule {
    fn default() -> Self {
        RawSchedule {
            kind: harmonic(),
            tau0: None,
            taus: None,
            locality: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleChoice {
    Constant(Option<f64>),
    Harmonic(Option<f64>),
    Custom(Vec<f64>),
}

#[derive(Clone, Debug)]
pub struct ExperimentConfig {
    pub surface: Surface,
    pub lambda: f64,
    pub origin: Point,
    pub data: Vec<Point>,
    pub starts: Vec<Point>,
    pub mode: Mode,
    pub schedule: ScheduleChoice,
    /// Locality radii `(r, R)` limiting the step cap.
    pub locality: Option<(f64, f64)>,
    pub max_iters: usize,
    pub stop_tol: f64,
    pub density: usize,
    pub out: Option<PathBuf>,
    pub smoothness: Option<f64>,
    pub l_exp: f64,
}

/// 1-based line of the first occurrence of `needle` in `src`.
fn line_of(src: &str, needle: &str) -> Option<usize> {
    src.lines().position(|l| l.contains(needle)).map(|i| i + 1)
}

pub fn surface_from(
    geometry: &str,
    radius: Option<f64>,
    half_height: Option<f64>,
) -> Result<Surface> {
    match geometry {
        "cube" => {
            if radius.is_some() || half_height.is_some() {
                bail!("radius and half_height apply to the cylinder only");
            }
            Ok(Surface::cube())
        }
        "cylinder" => {
            let r = radius.ok_or_else(|| anyhow!("cylinder needs a radius"))?;
            let h = half_height.ok_or_else(|| anyhow!("cylinder needs a half_height"))?;
            Ok(Surface::cylinder(r, h)?)
        }
        other => bail!("unknown geometry `{other}`: expected cube or cylinder"),
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let src =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::parse(&src).with_context(|| format!("in {}", path.display()))
    }

    pub fn parse(src: &str) -> Result<Self> {
        let raw: RawConfig = toml::from_str(src)?;
        let surface = surface_from(&raw.geometry, raw.radius, raw.half_height)?;
        let kind = surface.kind();
        let point = |what: String, text: &str| -> Result<Point> {
            let at = line_of(src, text)
                .map(|l| format!("line {l}: "))
                .unwrap_or_default();
            let p = parse_point(kind, text).with_context(|| format!("{at}{what}"))?;
            surface
                .check_point(&p)
                .with_context(|| format!("{at}{what} `{text}`"))?;
            Ok(p)
        };
        let list = |name: &str, items: &[String]| -> Result<Vec<Point>> {
            items
                .iter()
                .enumerate()
                .map(|(i, t)| point(format!("{name}[{i}]"), t))
                .collect()
        };
        let data = list("data", &raw.data)?;
        let starts = list("starts", &raw.starts)?;
        let origin = point("origin".into(), &raw.origin)?;
        if data.is_empty() {
            bail!("data: at least one point required");
        }
        if starts.is_empty() {
            bail!("starts: at least one point required");
        }
        if !(raw.lambda >= 0.0 && raw.lambda.is_finite()) {
            bail!("lambda {} must be finite and nonnegative", raw.lambda);
        }
        let density = raw.density.unwrap_or(DEFAULT_DENSITY);
        if density < 2 {
            bail!("density {density} must be at least 2");
        }
        let s = raw.schedule;
        let schedule = match s.kind.as_str() {
            "constant" => ScheduleChoice::Constant(s.tau0),
            "harmonic" => ScheduleChoice::Harmonic(s.tau0),
            "custom" => ScheduleChoice::Custom(
                s.taus
                    .ok_or_else(|| anyhow!("custom schedule needs taus"))?,
            ),
            other => {
                bail!("unknown schedule kind `{other}`: expected constant, harmonic or custom")
            }
        };
        let mode = match &raw.mode {
            Some(m) => m.parse::<Mode>().map_err(|e| anyhow!("mode: {e}"))?,
            None => Mode::ForwardBackward,
        };
        Ok(ExperimentConfig {
            surface,
            lambda: raw.lambda,
            origin,
            data,
            starts,
            mode,
            schedule,
            locality: s.locality.map(|[r, big_r]| (r, big_r)),
            max_iters: raw.max_iters.unwrap_or(DEFAULT_MAX_ITERS),
            stop_tol: raw.stop_tol.unwrap_or(DEFAULT_STOP_TOL),
            density,
            out: raw.out,
            smoothness: raw.smoothness,
            l_exp: raw.l_exp.unwrap_or(1.0),
        })
    }

    pub fn kind(&self) -> SurfaceKind {
        self.surface.kind()
    }

    pub fn problem(&self) -> Result<Problem> {
        let p = Problem::new(
            self.surface.clone(),
            self.data.clone(),
            self.origin,
            self.lambda,
        )?;
        Ok(match self.smoothness {
            Some(l) => p.with_smoothness(l)?,
            None => p,
        })
    }

    pub fn constants(
        &self,
        problem: &Problem,
    ) -> Result<(SmoothnessConstants<f64>, CurvatureConstants)> {
        let diam = self.surface.diameter_bound();
        let mut smooth = SmoothnessConstants::for_problem(problem, diam);
        if self.l_exp.is_nan() || self.l_exp < 1.0 {
            bail!("l_exp {} must be at least 1", self.l_exp);
        }
        smooth.l_exp = self.l_exp;
        let d = self.surface.descriptor();
        Ok((
            smooth,
            CurvatureConstants::new(d.kappa_lower, d.kappa_upper, diam)?,
        ))
    }

    pub fn solver_config(&self, problem: &Problem) -> Result<SolverConfig> {
        let (smooth, curv) = self.constants(problem)?;
        let cap = smooth.step_cap(&curv, self.locality)?;
        let tau0 = |t: Option<f64>| t.unwrap_or(cap.min(TAU0_LIMIT));
        let schedule = match &self.schedule {
            ScheduleChoice::Constant(t) => StepSchedule::constant(tau0(*t), cap),
            ScheduleChoice::Harmonic(t) => StepSchedule::harmonic(tau0(*t), cap),
            ScheduleChoice::Custom(taus) => StepSchedule::custom(taus.clone(), cap),
        }
        .context("schedule")?;
        Ok(SolverConfig::new(schedule)
            .with_mode(self.mode)
            .with_max_iters(self.max_iters)
            .with_stop_tol(self.stop_tol))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "geometry = \"cube\"\nlambda = 0.2\norigin = \"F6(0.5, 0.5)\"\n\
                           data = [\"F6(0.3, 0.4)\"]\nstarts = [\"F2(0.5, 0.5)\"]\n";

    #[test]
    fn defaults() {
        let c = ExperimentConfig::parse(MINIMAL).unwrap();
        assert_eq!(c.schedule, ScheduleChoice::Harmonic(None));
        assert_eq!(
            (c.max_iters, c.density, c.mode),
            (DEFAULT_MAX_ITERS, DEFAULT_DENSITY, Mode::ForwardBackward)
        );
        let p = c.problem().unwrap();
        let s = c.solver_config(&p).unwrap();
        // cap 1/n = 1 is limited to 0.5
        assert_eq!((s.schedule.tau(0), s.schedule.cap), (0.5, 1.0));
    }

    #[test]
    fn point_errors_carry_the_line() {
        let bad = MINIMAL.replace("F2(0.5, 0.5)", "F2(1.5, 0.5)");
        let e = format!("{:#}", ExperimentConfig::parse(&bad).unwrap_err());
        assert!(e.contains("line 5") && e.contains("starts[0]"), "{e}");
    }

    #[test]
    fn syntax_errors_carry_the_line() {
        let bad = MINIMAL.replace("lambda = 0.2", "lambda = ");
        let e = format!("{:#}", ExperimentConfig::parse(&bad).unwrap_err());
        assert!(e.contains("line 2"), "{e}");
    }

    #[test]
    fn rejects_invalid_settings() {
        for (from, to) in [
            ("starts = [\"F2(0.5, 0.5)\"]", "starts = []"),
            ("lambda = 0.2", "lambda = -1.0"),
            ("geometry = \"cube\"", "geometry = \"torus\""),
            ("geometry = \"cube\"", "geometry = \"cylinder\""),
            ("lambda = 0.2", "lambda = 0.2\ndensity = 1"),
            ("lambda = 0.2", "lambda = 0.2\nmode = \"newton\""),
            ("lambda = 0.2", "lambda = 0.2\nunknown = 3"),
        ] {
            assert!(
                ExperimentConfig::parse(&MINIMAL.replace(from, to)).is_err(),
                "{to}"
            );
        }
        let big_step = format!("{MINIMAL}[schedule]\nkind = \"constant\"\ntau0 = 2.0\n");
        let c = ExperimentConfig::parse(&big_step).unwrap();
        assert!(c.solver_config(&c.problem().unwrap()).is_err());
    }
}
