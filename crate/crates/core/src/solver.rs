//! Forward-backward splitting for `H = F + G` with `F(x) = Σ ½ d²(x, yᵢ)` and
//! `G(x) = λ d(x, z)`, together with the prox-only and gradient-only iterations and their
//! convergence diagnostics.

use crate::comparison::CurvatureConstants;
use crate::error::{Error, Result};
use crate::geometry::{GeodesicSpace, Surface, SurfacePoint, TangentVector};
use crate::scalar::{rotate2, scale2, Scalar};

pub const DEFAULT_MAX_ITERS: usize = 100_000;
pub const DEFAULT_STOP_TOL: f64 = 1e-10;
/// Rotation applied to a descent direction that runs into a cube vertex.
pub const CORNER_PERTURBATION: f64 = 1e-9;
const MAX_CORNER_RETRIES: u32 = 16;

/// Objective data on a geodesic space. `L` is the uniform smoothness factor of `F`.
#[derive(Clone, Debug)]
pub struct Problem<T: Scalar, S = Surface<T>> {
    space: S,
    data: Vec<SurfacePoint<T>>,
    origin: SurfacePoint<T>,
    lambda: T,
    smoothness: T,
}

/// Values of the objective parts at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Values<T> {
    pub f: T,
    pub g: T,
    pub h: T,
}

impl<T: Scalar, S: GeodesicSpace<T>> Problem<T, S> {
    /// Validates and canonicalises the points. `L` defaults to the number of data points,
    /// the smoothness of `F` wherever every `½ d²(·, yᵢ)` is flat.
    pub fn new(
        space: S,
        data: Vec<SurfacePoint<T>>,
        origin: SurfacePoint<T>,
        lambda: T,
    ) -> Result<Self> {
        if data.is_empty() {
            return Err(Error::Config("at least one data point is required".into()));
        }
        if !(lambda >= T::zero() && lambda.is_finite()) {
            return Err(Error::Config(format!(
                "lambda {lambda} must be finite and nonnegative"
            )));
        }
        let data = data
            .iter()
            .map(|p| space.canonicalize(p))
            .collect::<Result<Vec<_>>>()?;
        let origin = space.canonicalize(&origin)?;
        let smoothness = T::from_usize(data.len()).expect("count representable");
        Ok(Self {
            space,
            data,
            origin,
            lambda,
            smoothness,
        })
    }

    pub fn with_smoothness(mut self, l: T) -> Result<Self> {
        if !(l > T::zero() && l.is_finite()) {
            return Err(Error::Config(format!("smoothness {l} must be positive")));
        }
        self.smoothness = l;
        Ok(self)
    }

    pub fn space(&self) -> &S {
        &self.space
    }

    pub fn data(&self) -> &[SurfacePoint<T>] {
        &self.data
    }

    pub fn origin(&self) -> &SurfacePoint<T> {
        &self.origin
    }

    pub fn lambda(&self) -> T {
        self.lambda
    }

    pub fn smoothness(&self) -> T {
        self.smoothness
    }

    pub fn f(&self, x: &SurfacePoint<T>) -> Result<T> {
        let mut s = T::zero();
        for y in &self.data {
            let d = self.space.distance(x, y)?;
            s = s + d * d;
        }
        Ok(s / T::int(2))
    }

    pub fn g(&self, x: &SurfacePoint<T>) -> Result<T> {
        Ok(self.lambda * self.space.distance(x, &self.origin)?)
    }

    pub fn values(&self, x: &SurfacePoint<T>) -> Result<Values<T>> {
        let f = self.f(x)?;
        let g = self.g(x)?;
        Ok(Values { f, g, h: f + g })
    }

    pub fn h(&self, x: &SurfacePoint<T>) -> Result<T> {
        Ok(self.values(x)?.h)
    }

    /// Descent direction `∇(−F)(x) = Σ log_x yᵢ`, based at the canonical form of `x`.
    pub fn grad_f(&self, x: &SurfacePoint<T>) -> Result<TangentVector<T>> {
        let base = self.space.canonicalize(x)?;
        let mut c = [T::zero(), T::zero()];
        for y in &self.data {
            let v = self.space.log(&base, y)?;
            c = [c[0] + v.components[0], c[1] + v.components[1]];
        }
        Ok(TangentVector::new(base, c))
    }

    /// `exp_x(τ ∇(−F)(x))`. A trace into a cube vertex is retried with the direction
    /// rotated by a further `1e-9` rad; the number of retries is returned.
    pub fn descent_step(&self, x: &SurfacePoint<T>, tau: T) -> Result<(SurfacePoint<T>, u32)> {
        let grad = self.grad_f(x)?;
        self.descend(&grad, tau)
    }

    fn descend(&self, grad: &TangentVector<T>, tau: T) -> Result<(SurfacePoint<T>, u32)> {
        if !(tau > T::zero()) {
            return Err(Error::Domain(format!("step size {tau} must be positive")));
        }
        let v = grad.scaled(tau);
        let mut retries = 0;
        loop {
            let angle = T::lit(CORNER_PERTURBATION) * T::int(retries as i32);
            let trial = TangentVector::new(v.base, rotate2(v.components, angle));
            match self.space.exp(&trial) {
                Err(Error::CornerHit { .. }) if retries < MAX_CORNER_RETRIES => retries += 1,
                Err(e) => return Err(e),
                Ok(w) => return Ok((w, retries)),
            }
        }
    }

    /// Closed-form `prox_{τG}(w)`: `z` if `d(w, z) ≤ λτ`, else the point at distance `λτ`
    /// from `w` along the geodesic to `z`.
    pub fn prox_dist(&self, w: &SurfacePoint<T>, tau: T) -> Result<SurfacePoint<T>> {
        if !(tau >= T::zero()) {
            return Err(Error::Domain(format!(
                "step size {tau} must be nonnegative"
            )));
        }
        let step = self.lambda * tau;
        let geo = self.space.geodesic(w, &self.origin)?;
        if geo.length <= step {
            return Ok(self.origin);
        }
        let base = self.space.canonicalize(w)?;
        if step == T::zero() {
            return Ok(base);
        }
        self.space
            .exp(&TangentVector::new(base, scale2(geo.direction, step)))
    }

    /// `J(x) = prox_{τG}(desc_{τF}(x))`.
    pub fn fb_step(&self, x: &SurfacePoint<T>, tau: T) -> Result<SurfacePoint<T>> {
        let (w, _) = self.descent_step(x, tau)?;
        self.prox_dist(&w, tau)
    }

    /// Right side minus left side of the one-step descent inequality
    /// `d²(y, J x) ≤ d²(y, x) + 2τ(H(y) − H(J x)) + (Lτ − λ_u/2) d²(x, J x)
    ///  + (λ_l/2 − 1) d²(x, w) + (1 − λ_u/2) d²(w, J x)`. Nonnegative when it holds.
    pub fn descent_inequality_residual(
        &self,
        x: &SurfacePoint<T>,
        y: &SurfacePoint<T>,
        tau: T,
        curvature: &CurvatureConstants<T>,
    ) -> Result<T> {
        let (w, _) = self.descent_step(x, tau)?;
        let jx = self.prox_dist(&w, tau)?;
        let sq = |a: &SurfacePoint<T>, b: &SurfacePoint<T>| -> Result<T> {
            let d = self.space.distance(a, b)?;
            Ok(d * d)
        };
        let two = T::int(2);
        let rhs = sq(y, x)?
            + two * tau * (self.h(y)? - self.h(&jx)?)
            + (self.smoothness * tau - curvature.lambda_u_half) * sq(x, &jx)?
            + (curvature.lambda_l_half - T::one()) * sq(x, &w)?
            + (T::one() - curvature.lambda_u_half) * sq(&w, &jx)?;
        Ok(rhs - sq(y, &jx)?)
    }
}

/// Step-size rule.
#[derive(Clone, Debug, PartialEq)]
pub enum ScheduleKind<T> {
    Constant,
    /// `τ_k = τ₀/(k + 1)`.
    Harmonic,
    /// Explicit sequence; its last entry repeats once exhausted.
    Custom(Vec<T>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct StepSchedule<T> {
    pub kind: ScheduleKind<T>,
    pub tau0: T,
    /// Largest admissible step.
    pub cap: T,
}

impl<T: Scalar> StepSchedule<T> {
    pub fn constant(tau: T, cap: T) -> Result<Self> {
        Self::checked(ScheduleKind::Constant, tau, cap)
    }

    pub fn harmonic(tau0: T, cap: T) -> Result<Self> {
        Self::checked(ScheduleKind::Harmonic, tau0, cap)
    }

    pub fn custom(taus: Vec<T>, cap: T) -> Result<Self> {
        let tau0 = *taus
            .first()
            .ok_or_else(|| Error::Config("custom schedule is empty".into()))?;
        Self::checked(ScheduleKind::Custom(taus), tau0, cap)
    }

    /// Harmonic with `τ₀ = min(cap, 0.5)`.
    pub fn default_for(cap: T) -> Result<Self> {
        Self::harmonic(cap.min(T::lit(0.5)), cap)
    }

    fn checked(kind: ScheduleKind<T>, tau0: T, cap: T) -> Result<Self> {
        let s = Self { kind, tau0, cap };
        s.validate()?;
        Ok(s)
    }

    /// Every emitted step lies in `(0, cap]`.
    pub fn validate(&self) -> Result<()> {
        if !(self.cap > T::zero()) {
            return Err(Error::Config(format!(
                "step cap {} must be positive",
                self.cap
            )));
        }
        let bad = |t: T| !(t > T::zero() && t <= self.cap);
        let offending = match &self.kind {
            ScheduleKind::Custom(v) => v.iter().copied().find(|&t| bad(t)),
            _ => Some(self.tau0).filter(|&t| bad(t)),
        };
        match offending {
            Some(t) => Err(Error::Config(format!(
                "step size {t} outside (0, {}]",
                self.cap
            ))),
            None => Ok(()),
        }
    }

    pub fn tau(&self, k: usize) -> T {
        match &self.kind {
            ScheduleKind::Constant => self.tau0,
            ScheduleKind::Harmonic => {
                self.tau0 / T::from_usize(k + 1).expect("index representable")
            }
            ScheduleKind::Custom(v) => v[k.min(v.len() - 1)],
        }
    }
}

/// Constants entering the step caps and complexity bounds.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SmoothnessConstants<T> {
    /// Uniform smoothness factor of `F`.
    pub l: T,
    /// Lipschitz constant of `F` on the working set.
    pub l_f: T,
    /// Lipschitz constant of `G`, equal to `λ`.
    pub l_g: T,
    /// Lipschitz constant of the exponential map, at least 1.
    pub l_exp: T,
}

impl<T: Scalar> SmoothnessConstants<T> {
    /// `L = n`, `L_F = n·diam` (each `d(·, yᵢ)` is at most the diameter), `L_G = λ`,
    /// `L_exp = 1`.
    pub fn for_problem<S: GeodesicSpace<T>>(problem: &Problem<T, S>, diam: T) -> Self {
        let n = T::from_usize(problem.data().len()).expect("count representable");
        Self {
            l: problem.smoothness(),
            l_f: n * diam,
            l_g: problem.lambda(),
            l_exp: T::one(),
        }
    }

    /// `λ_u/(2L)`, further limited by `(R − 2r)/(2 L_F (1 + L_exp))` when locality
    /// radii `(r, R)` are given.
    pub fn step_cap(
        &self,
        curvature: &CurvatureConstants<T>,
        locality: Option<(T, T)>,
    ) -> Result<T> {
        let mut cap = curvature.lambda_u_half / self.l;
        if let Some((r, big_r)) = locality {
            let room = big_r - T::int(2) * r;
            if !(r > T::zero() && room > T::zero()) {
                return Err(Error::Config(format!(
                    "locality radii r = {r}, R = {big_r} need 0 < 2r < R"
                )));
            }
            cap = cap.min(room / (T::int(2) * self.l_f * (T::one() + self.l_exp)));
        }
        Ok(cap)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    /// `x⁺ = prox_{τG}(desc_{τF}(x))`, objective `H`.
    ForwardBackward,
    /// `x⁺ = prox_{τG}(x)`, objective `G`.
    ProxOnly,
    /// `x⁺ = desc_{τF}(x)`, objective `F`.
    GradOnly,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::ForwardBackward => "fb",
            Mode::ProxOnly => "prox-only",
            Mode::GradOnly => "grad-only",
        }
    }

    pub fn objective<T: Scalar>(self, v: &Values<T>) -> T {
        match self {
            Mode::ForwardBackward => v.h,
            Mode::ProxOnly => v.g,
            Mode::GradOnly => v.f,
        }
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fb" => Ok(Mode::ForwardBackward),
            "prox-only" => Ok(Mode::ProxOnly),
            "grad-only" => Ok(Mode::GradOnly),
            _ => Err(Error::Config(format!(
                "unknown mode {s:?}; expected fb, prox-only or grad-only"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolverConfig<T> {
    pub schedule: StepSchedule<T>,
    pub max_iters: usize,
    pub stop_tol: T,
    pub mode: Mode,
}

impl<T: Scalar> SolverConfig<T> {
    pub fn new(schedule: StepSchedule<T>) -> Self {
        Self {
            schedule,
            max_iters: DEFAULT_MAX_ITERS,
            stop_tol: T::lit(DEFAULT_STOP_TOL),
            mode: Mode::ForwardBackward,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Self {
        self.mode = mode;
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_stop_tol(mut self, stop_tol: T) -> Self {
        self.stop_tol = stop_tol;
        self
    }
}

/// One iterate. Step fields are `None` on the final record, from which no step was
/// taken.
#[derive(Clone, Debug, PartialEq)]
pub struct IterateRecord<T> {
    pub k: usize,
    pub x: SurfacePoint<T>,
    pub values: Values<T>,
    /// `|∇₋F|(x^k)`, the norm of `Σ log_x yᵢ`.
    pub grad_norm: T,
    /// Point after the forward step; equals `x` in prox-only mode.
    pub w: Option<SurfacePoint<T>>,
    pub tau: Option<T>,
    /// `d(x^k, x^{k+1})`.
    pub displacement: Option<T>,
    /// `max(0, d²(x^{k+1}, x̄) − d²(x^k, x̄))` against the final iterate.
    pub epsilon: Option<T>,
    /// Vertex-avoiding rotations applied to the descent direction.
    pub corner_retries: u32,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IterateLog<T> {
    pub mode: Mode,
    pub records: Vec<IterateRecord<T>>,
    /// Final displacement fell below the stopping tolerance.
    pub converged: bool,
}

impl<T: Scalar> IterateLog<T> {
    pub fn last(&self) -> &IterateRecord<T> {
        self.records.last().expect("log holds the initial iterate")
    }

    /// Number of steps taken.
    pub fn steps(&self) -> usize {
        self.records.len() - 1
    }

    pub fn objective(&self, r: &IterateRecord<T>) -> T {
        self.mode.objective(&r.values)
    }

    pub fn final_objective(&self) -> T {
        self.objective(self.last())
    }

    pub fn min_objective(&self) -> T {
        self.records
            .iter()
            .map(|r| self.objective(r))
            .fold(T::infinity(), T::min)
    }

    pub fn final_displacement(&self) -> T {
        self.records
            .iter()
            .rev()
            .find_map(|r| r.displacement)
            .unwrap_or_else(T::zero)
    }

    /// Largest increase of the objective over one step; nonpositive for a monotone run.
    pub fn max_increase(&self) -> T {
        self.records
            .windows(2)
            .map(|w| self.objective(&w[1]) - self.objective(&w[0]))
            .fold(T::neg_infinity(), T::max)
    }

    /// Objective never rises by more than `tol` from one iterate to the next.
    pub fn is_monotone(&self, tol: T) -> bool {
        self.records.len() < 2 || self.max_increase() <= tol
    }

    fn taus(&self) -> impl Iterator<Item = T> + '_ {
        self.records.iter().filter_map(|r| r.tau)
    }
}

/// Runs the iteration from `x0` until the step displacement drops below `stop_tol` or
/// `max_iters` steps were taken. Quasi-Fejér residuals are filled in against the final
/// iterate.
pub fn solve<T: Scalar, S: GeodesicSpace<T>>(
    problem: &Problem<T, S>,
    config: &SolverConfig<T>,
    x0: &SurfacePoint<T>,
) -> Result<IterateLog<T>> {
    config.schedule.validate()?;
    let space = problem.space();
    let mut x = space.canonicalize(x0)?;
    let mut records = Vec::new();
    let mut converged = false;
    for k in 0..config.max_iters {
        let tau = config.schedule.tau(k);
        let grad = problem.grad_f(&x)?;
        let (w, retries) = match config.mode {
            Mode::ProxOnly => (x, 0),
            _ => problem.descend(&grad, tau)?,
        };
        let next = match config.mode {
            Mode::GradOnly => w,
            _ => problem.prox_dist(&w, tau)?,
        };
        let displacement = space.distance(&x, &next)?;
        records.push(IterateRecord {
            k,
            x,
            values: problem.values(&x)?,
            grad_norm: grad.norm(),
            w: Some(w),
            tau: Some(tau),
            displacement: Some(displacement),
            epsilon: None,
            corner_retries: retries,
        });
        x = next;
        if displacement < config.stop_tol {
            converged = true;
            break;
        }
    }
    records.push(IterateRecord {
        k: records.len(),
        x,
        values: problem.values(&x)?,
        grad_norm: problem.grad_f(&x)?.norm(),
        w: None,
        tau: None,
        displacement: None,
        epsilon: None,
        corner_retries: 0,
    });
    let mut log = IterateLog {
        mode: config.mode,
        records,
        converged,
    };
    let eps = quasi_fejer_residuals(space, &log, &x)?;
    for (r, e) in log.records.iter_mut().zip(eps) {
        r.epsilon = Some(e);
    }
    Ok(log)
}

/// `ε_k = max(0, d²(x^{k+1}, x̄) − d²(x^k, x̄))` for every step of the log.
pub fn quasi_fejer_residuals<T: Scalar, S: GeodesicSpace<T> + ?Sized>(
    space: &S,
    log: &IterateLog<T>,
    reference: &SurfacePoint<T>,
) -> Result<Vec<T>> {
    let sq = log
        .records
        .iter()
        .map(|r| space.distance(&r.x, reference).map(|d| d * d))
        .collect::<Result<Vec<_>>>()?;
    Ok(sq
        .windows(2)
        .map(|w| (w[1] - w[0]).max(T::zero()))
        .collect())
}

/// Iteration-complexity bound on the optimality gap of the log's mode, with
/// `d0 = d(x*, x⁰)`:
///
/// * forward-backward, on `H(x^N) − H*`:
///   `(d0² + ((λ_l/2 − 1) L_exp² L_F² + (1 − λ_u/2) 4 L_G²) Σ τ_k²) / (2 Σ τ_k)`;
/// * prox-only, on `G(x^N) − G*`: `d0² / (2 Σ τ_k)`;
/// * gradient-only, on `min_k F(x^k) − F*`:
///   `L_F (d0² + (λ_l/2) Σ α_k²) / (2 Σ α_k)` with `α_k = τ_k |∇₋F|(x^k)`.
///
/// Sums run over the steps taken. Returns infinity for an empty log.
pub fn complexity_bound<T: Scalar>(
    log: &IterateLog<T>,
    constants: &SmoothnessConstants<T>,
    curvature: &CurvatureConstants<T>,
    d0: T,
) -> T {
    let d0sq = d0 * d0;
    let sum_tau: T = log.taus().sum();
    if !(sum_tau > T::zero()) {
        return T::infinity();
    }
    match log.mode {
        Mode::ForwardBackward => {
            let sum_sq: T = log.taus().map(|t| t * t).sum();
            let c = constants;
            let correction =
                (curvature.lambda_l_half - T::one()) * c.l_exp * c.l_exp * c.l_f * c.l_f
                    + (T::one() - curvature.lambda_u_half) * T::int(4) * c.l_g * c.l_g;
            (d0sq + correction * sum_sq) / (T::int(2) * sum_tau)
        }
        Mode::ProxOnly => d0sq / (T::int(2) * sum_tau),
        Mode::GradOnly => {
            let alphas = alphas(log, T::one());
            let sum_a: T = alphas.iter().copied().sum();
            if !(sum_a > T::zero()) {
                return T::infinity();
            }
            let sum_sq: T = alphas.iter().map(|&a| a * a).sum();
            constants.l_f * (d0sq + curvature.lambda_l_half * sum_sq) / (T::int(2) * sum_a)
        }
    }
}

/// Forward-backward bound for Lipschitz `F` without a Lipschitz `G`:
/// `L_F (d0² + (λ_l/2 + 1/ε − λ_u(1 + ε)/(2ε)) Σ α_k²) / (2 Σ α_k)` with
/// `α_k = τ_k |∇₋F|(x^k) L_exp`.
pub fn complexity_bound_lipschitz_f<T: Scalar>(
    log: &IterateLog<T>,
    constants: &SmoothnessConstants<T>,
    curvature: &CurvatureConstants<T>,
    d0: T,
    epsilon: T,
) -> Result<T> {
    if !(epsilon > T::zero()) {
        return Err(Error::Domain(format!("epsilon {epsilon} must be positive")));
    }
    let alphas = alphas(log, constants.l_exp);
    let sum_a: T = alphas.iter().copied().sum();
    if !(sum_a > T::zero()) {
        return Ok(T::infinity());
    }
    let sum_sq: T = alphas.iter().map(|&a| a * a).sum();
    let factor = curvature.lambda_l_half + epsilon.recip()
        - curvature.lambda_u_half * (T::one() + epsilon) / epsilon;
    Ok(constants.l_f * (d0 * d0 + factor * sum_sq) / (T::int(2) * sum_a))
}

fn alphas<T: Scalar>(log: &IterateLog<T>, l_exp: T) -> Vec<T> {
    log.records
        .iter()
        .filter_map(|r| r.tau.map(|t| t * r.grad_norm * l_exp))
        .collect()
}
