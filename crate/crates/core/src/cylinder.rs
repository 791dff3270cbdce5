//! Exact geodesics on the closed capped cylinder of radius `r` and height `2h`.
//!
//! The side unrolls to a strip of width `2πr` with periodic ends and each cap is a flat
//! disc. A geodesic is straight inside every chart; at a rim crossing it continues
//! straight in the development where the cap disc touches the unrolled rim line at the
//! crossing point. Crossing angles solve small transcendental problems, handled here by
//! multi-start bracketed minimisation over the rim angle.

use crate::error::{Error, Result};
use crate::geometry::{
    Chart, Geodesic, GeodesicPath, GeodesicSpace, GeometryDescriptor, Segment, SurfaceKind,
    SurfacePoint, TangentVector,
};
use crate::scalar::{angle_diff, dot2, hypot2, scale2, sub2, wrap_angle, Scalar};

/// Grid starts per angle for one-crossing problems.
pub const DEFAULT_STARTS: usize = 64;
/// Grid starts per angle for the nested two-crossing problems.
pub const NESTED_STARTS: usize = 32;
/// Local minima kept from each start grid.
const KEEP: usize = 2;

/// Capped cylinder `C_{r,h}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cylinder<T> {
    radius: T,
    half_height: T,
}

/// Candidate path classes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RouteClass {
    /// Straight helix on the side, either way around.
    SideDirect,
    /// Chord inside one cap.
    CapChord,
    /// Side to cap through one rim crossing.
    SideCap,
    /// Top cap to bottom cap down the side.
    CapSideCap,
    /// Side to side across one cap.
    SideCapSide,
}

/// One candidate path between two points, folded into chart segments.
#[derive(Clone, Debug, PartialEq)]
pub struct Route<T> {
    pub class: RouteClass,
    pub length: T,
    /// Rim angles of the crossings, in path order.
    pub angles: Vec<T>,
    pub segments: Vec<Segment<T>>,
    pub crossings: Vec<SurfacePoint<T>>,
}

/// Rim-crossing problem: the crossing angles are the unknowns.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CrossingProblem<T> {
    /// Side point `(φ, z)` to a point on `cap`.
    SideCap {
        side: [T; 2],
        cap: Chart,
        point: [T; 2],
    },
    /// Point on one cap to a point on the other, down the side.
    CapCap { first: [T; 2], second: [T; 2] },
    /// Two side points joined across `cap`.
    SideSide {
        cap: Chart,
        first: [T; 2],
        second: [T; 2],
    },
}

impl<T> CrossingProblem<T> {
    pub fn crossing_count(&self) -> usize {
        match self {
            CrossingProblem::SideCap { .. } => 1,
            _ => 2,
        }
    }
}

type Objective<'a, T> = &'a mut dyn FnMut(T) -> (T, T);

/// Bisection on the derivative inside `[lo, hi]`, tracking the best value seen.
fn refine<T: Scalar>(f: Objective<'_, T>, lo: T, hi: T) -> (T, T) {
    let tol = T::tol(1e-13);
    let (mut a, mut b) = (lo, hi);
    let (va, _) = f(a);
    let (vb, _) = f(b);
    let mut best = if va <= vb { (a, va) } else { (b, vb) };
    for _ in 0..200 {
        if b - a <= tol {
            break;
        }
        let m = (a + b) / T::int(2);
        let (vm, gm) = f(m);
        if vm <= best.1 {
            best = (m, vm);
        }
        if gm > T::zero() {
            b = m;
        } else if gm < T::zero() {
            a = m;
        } else {
            break;
        }
    }
    let m = (a + b) / T::int(2);
    let (vm, _) = f(m);
    let slack = T::epsilon() * T::int(4) * (T::one() + best.1.abs());
    if vm <= best.1 + slack {
        (m, vm)
    } else {
        best
    }
}

/// Local minima of a `2π`-periodic function: `n` grid starts, then refinement of the
/// `keep` best grid minima. Sorted by value; angles wrapped into `[0, 2π)`.
fn minimize_periodic<T: Scalar>(f: Objective<'_, T>, n: usize, keep: usize) -> Vec<(T, T)> {
    let step = T::two_pi() / T::lit(n as f64);
    let vals: Vec<T> = (0..n).map(|i| f(step * T::lit(i as f64)).0).collect();
    let mut minima: Vec<usize> = (0..n)
        .filter(|&i| {
            let prev = vals[(i + n - 1) % n];
            let next = vals[(i + 1) % n];
            vals[i] <= prev && vals[i] <= next
        })
        .collect();
    minima.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap().then(i.cmp(&j)));
    minima.truncate(keep.max(1));
    let mut out: Vec<(T, T)> = minima
        .into_iter()
        .map(|i| {
            let c = step * T::lit(i as f64);
            let (a, v) = refine(f, c - step, c + step);
            (wrap_angle(a), v)
        })
        .collect();
    out.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
    out
}

/// Refinement around `hint` when the derivative brackets a minimum within `half`.
fn refine_near<T: Scalar>(f: Objective<'_, T>, hint: T, half: T) -> Option<(T, T)> {
    let (lo, hi) = (hint - half, hint + half);
    if f(lo).1 > T::zero() || f(hi).1 < T::zero() {
        return None;
    }
    let (a, v) = refine(f, lo, hi);
    Some((wrap_angle(a), v))
}

/// Nested minimisation of `outer(a1) + link(a1, a2) + inner(a2)`: for each outer angle
/// the inner angle is solved exactly, and the outer derivative follows from the
/// envelope theorem. Returns `([a1, a2], value)` local minima sorted by value.
fn minimize_nested<T: Scalar>(
    outer: &dyn Fn(T) -> (T, T),
    link: &dyn Fn(T, T) -> (T, T, T),
    inner: &dyn Fn(T) -> (T, T),
    n: usize,
) -> Vec<([T; 2], T)> {
    let step = T::two_pi() / T::lit(n as f64);
    let solve_inner = |a1: T, hint: Option<T>| -> (T, T) {
        let mut g = |a2: T| {
            let (lv, _, l2) = link(a1, a2);
            let (iv, id) = inner(a2);
            (lv + iv, l2 + id)
        };
        if let Some(h) = hint {
            if let Some(r) = refine_near(&mut g, h, step) {
                return r;
            }
        }
        minimize_periodic(&mut g, n, 1)[0]
    };
    let total = |a1: T, hint: Option<T>| -> (T, T, T) {
        let (a2, iv) = solve_inner(a1, hint);
        let (ov, od) = outer(a1);
        let (_, l1, _) = link(a1, a2);
        (a2, ov + iv, od + l1)
    };
    let grid: Vec<(T, T)> = (0..n)
        .map(|i| {
            let (a2, v, _) = total(step * T::lit(i as f64), None);
            (a2, v)
        })
        .collect();
    let mut minima: Vec<usize> = (0..n)
        .filter(|&i| {
            let v = grid[i].1;
            v <= grid[(i + n - 1) % n].1 && v <= grid[(i + 1) % n].1
        })
        .collect();
    minima.sort_by(|&i, &j| grid[i].1.partial_cmp(&grid[j].1).unwrap().then(i.cmp(&j)));
    minima.truncate(KEEP);
    let tol = T::tol(1e-13);
    let mut out = Vec::new();
    for i in minima {
        let c = step * T::lit(i as f64);
        let mut best = ([c, grid[i].0], grid[i].1);
        let (mut lo, mut hi) = (c - step, c + step);
        let mut hint = grid[i].0;
        for _ in 0..200 {
            if hi - lo <= tol {
                break;
            }
            let m = (lo + hi) / T::int(2);
            let (a2, v, g) = total(m, Some(hint));
            hint = a2;
            if v <= best.1 {
                best = ([m, a2], v);
            }
            if g > T::zero() {
                hi = m;
            } else if g < T::zero() {
                lo = m;
            } else {
                break;
            }
        }
        // values are flat to rounding near the minimum; prefer the derivative root
        let m = (lo + hi) / T::int(2);
        let (a2, v, _) = total(m, Some(hint));
        let slack = T::epsilon() * T::int(4) * (T::one() + best.1.abs());
        if v <= best.1 + slack {
            best = ([m, a2], v);
        }
        out.push(([wrap_angle(best.0[0]), wrap_angle(best.0[1])], best.1));
    }
    out.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
    out
}

impl<T: Scalar> Cylinder<T> {
    pub fn new(radius: T, half_height: T) -> Result<Self> {
        if !(radius.is_finite() && radius > T::zero()) {
            return Err(Error::Domain(format!(
                "cylinder radius must be positive, got {radius}"
            )));
        }
        if !(half_height.is_finite() && half_height > T::zero()) {
            return Err(Error::Domain(format!(
                "cylinder half-height must be positive, got {half_height}"
            )));
        }
        Ok(Cylinder {
            radius,
            half_height,
        })
    }

    pub fn radius(&self) -> T {
        self.radius
    }

    pub fn half_height(&self) -> T {
        self.half_height
    }

    fn seam_tol(&self) -> T {
        T::tol(1e-12) * (T::one() + self.radius + self.half_height)
    }

    /// Rim point of a cap at angle `a`, in cap coordinates.
    pub fn rim(&self, a: T) -> [T; 2] {
        let (s, c) = a.sin_cos();
        [self.radius * c, self.radius * s]
    }

    fn cap_height(&self, cap: Chart) -> T {
        if cap == Chart::Bottom {
            -self.half_height
        } else {
            self.half_height
        }
    }

    /// Vertical gap between height `z` and the rim of `cap`.
    fn gap(&self, cap: Chart, z: T) -> T {
        (self.cap_height(cap) - z).abs()
    }

    /// `|p - rim(a)|` and its derivative in `a`.
    fn cap_term(&self, p: [T; 2], a: T) -> (T, T) {
        let r = self.radius;
        let (s, c) = a.sin_cos();
        let d = (p[0] - r * c).hypot(p[1] - r * s);
        let g = if d > T::zero() {
            r * (p[0] * s - p[1] * c) / d
        } else {
            T::zero()
        };
        (d, g)
    }

    /// Side distance from angle `phi` to the rim at angle `a`, `gap` apart in height,
    /// and its derivative in `a`.
    fn side_term(&self, phi: T, gap: T, a: T) -> (T, T) {
        let r = self.radius;
        let w = angle_diff(phi, a);
        let d = (r * w).hypot(gap);
        let g = if d > T::zero() {
            r * r * w / d
        } else {
            T::zero()
        };
        (d, g)
    }

    /// Side distance between rim angles `a1` and `a2` across height `gap`, with partials.
    fn strip_term(&self, a1: T, a2: T, gap: T) -> (T, T, T) {
        let r = self.radius;
        let w = angle_diff(a1, a2);
        let d = (r * w).hypot(gap);
        let g = if d > T::zero() {
            r * r * w / d
        } else {
            T::zero()
        };
        (d, -g, g)
    }

    /// Chord inside a cap between rim angles `a1` and `a2`, with partials.
    fn chord_term(&self, a1: T, a2: T) -> (T, T, T) {
        let r = self.radius;
        let half = (a2 - a1) / T::int(2);
        let (s, c) = half.sin_cos();
        let v = T::int(2) * r * s.abs();
        let g = if s > T::zero() {
            r * c
        } else if s < T::zero() {
            -r * c
        } else {
            T::zero()
        };
        (v, -g, g)
    }

    /// Total length of the crossing path at the given angles.
    pub fn crossing_objective(&self, problem: &CrossingProblem<T>, angles: &[T]) -> Result<T> {
        if angles.len() != problem.crossing_count() {
            return Err(Error::Domain(format!(
                "expected {} crossing angles, got {}",
                problem.crossing_count(),
                angles.len()
            )));
        }
        Ok(match *problem {
            CrossingProblem::SideCap { side, cap, point } => {
                self.side_term(side[0], self.gap(cap, side[1]), angles[0]).0
                    + self.cap_term(point, angles[0]).0
            }
            CrossingProblem::CapCap { first, second } => {
                self.cap_term(first, angles[0]).0
                    + self
                        .strip_term(angles[0], angles[1], T::int(2) * self.half_height)
                        .0
                    + self.cap_term(second, angles[1]).0
            }
            CrossingProblem::SideSide { cap, first, second } => {
                self.side_term(first[0], self.gap(cap, first[1]), angles[0])
                    .0
                    + self.chord_term(angles[0], angles[1]).0
                    + self
                        .side_term(second[0], self.gap(cap, second[1]), angles[1])
                        .0
            }
        })
    }

    /// Local minima of the crossing objective, best first.
    pub fn crossing_minima(&self, problem: &CrossingProblem<T>) -> Vec<(Vec<T>, T)> {
        match *problem {
            CrossingProblem::SideCap { side, cap, point } => {
                let gap = self.gap(cap, side[1]);
                let mut f = |a: T| {
                    let (v1, g1) = self.side_term(side[0], gap, a);
                    let (v2, g2) = self.cap_term(point, a);
                    (v1 + v2, g1 + g2)
                };
                minimize_periodic(&mut f, DEFAULT_STARTS, KEEP)
                    .into_iter()
                    .map(|(a, v)| (vec![a], v))
                    .collect()
            }
            CrossingProblem::CapCap { first, second } => {
                let gap = T::int(2) * self.half_height;
                minimize_nested(
                    &|a| self.cap_term(first, a),
                    &|a1, a2| self.strip_term(a1, a2, gap),
                    &|a| self.cap_term(second, a),
                    NESTED_STARTS,
                )
                .into_iter()
                .map(|(a, v)| (a.to_vec(), v))
                .collect()
            }
            CrossingProblem::SideSide { cap, first, second } => {
                let g1 = self.gap(cap, first[1]);
                let g2 = self.gap(cap, second[1]);
                minimize_nested(
                    &|a| self.side_term(first[0], g1, a),
                    &|a1, a2| self.chord_term(a1, a2),
                    &|a| self.side_term(second[0], g2, a),
                    NESTED_STARTS,
                )
                .into_iter()
                .map(|(a, v)| (a.to_vec(), v))
                .collect()
            }
        }
    }

    /// Global minimiser of the crossing objective.
    pub fn solve_crossing(&self, problem: &CrossingProblem<T>) -> (Vec<T>, T) {
        self.crossing_minima(problem)
            .into_iter()
            .next()
            .expect("start grid always has a minimum")
    }

    /// Identifies tangent directions across the rim at angle `alpha`: side frame
    /// `(r dφ, dz)` and cap frame `(du, dv)`. Moving up the side corresponds to moving
    /// inward on the top cap and outward on the bottom cap.
    pub fn rim_frame(from: Chart, to: Chart, alpha: T, dir: [T; 2]) -> [T; 2] {
        let (s, c) = alpha.sin_cos();
        let tangent = [-s, c];
        let outward = [c, s];
        match (from, to) {
            (Chart::Side, Chart::Top) => [-dir[0] * s - dir[1] * c, dir[0] * c - dir[1] * s],
            (Chart::Side, Chart::Bottom) => [-dir[0] * s + dir[1] * c, dir[0] * c + dir[1] * s],
            (Chart::Top, Chart::Side) => [dot2(dir, tangent), -dot2(dir, outward)],
            (Chart::Bottom, Chart::Side) => [dot2(dir, tangent), dot2(dir, outward)],
            _ => dir,
        }
    }

    /// Every chart representation of a canonical point (seam points have two).
    fn representations(&self, p: &SurfacePoint<T>) -> Vec<SurfacePoint<T>> {
        let mut out = vec![*p];
        if p.chart.is_cap() && hypot2(p.local) >= self.radius - self.seam_tol() {
            let phi = wrap_angle(p.local[1].atan2(p.local[0]));
            out.push(SurfacePoint::side(phi, self.cap_height(p.chart)));
        }
        out
    }

    fn side_segment(&self, from: [T; 2], phi_to: T, z_to: T) -> Segment<T> {
        let d = angle_diff(from[0], phi_to);
        Segment {
            chart: Chart::Side,
            start: from,
            end: [from[0] + d, z_to],
        }
    }

    fn rim_point(&self, cap: Chart, a: T) -> SurfacePoint<T> {
        SurfacePoint::new(cap, self.rim(a))
    }

    fn route(
        &self,
        class: RouteClass,
        angles: Vec<T>,
        segments: Vec<Segment<T>>,
        crossings: Vec<SurfacePoint<T>>,
    ) -> Route<T> {
        let length = segments
            .iter()
            .map(|s| GeodesicSpace::segment_length(self, s))
            .fold(T::zero(), |a, b| a + b);
        Route {
            class,
            length,
            angles,
            segments,
            crossings,
        }
    }

    fn reversed(mut r: Route<T>) -> Route<T> {
        r.segments.reverse();
        for s in &mut r.segments {
            std::mem::swap(&mut s.start, &mut s.end);
        }
        r.crossings.reverse();
        r.angles.reverse();
        r
    }

    fn direct_routes(&self, p: [T; 2], q: [T; 2], out: &mut Vec<Route<T>>) {
        let d = angle_diff(p[0], q[0]);
        let around = if d >= T::zero() {
            d - T::two_pi()
        } else {
            d + T::two_pi()
        };
        for delta in [d, around] {
            let seg = Segment {
                chart: Chart::Side,
                start: p,
                end: [p[0] + delta, q[1]],
            };
            out.push(self.route(RouteClass::SideDirect, vec![], vec![seg], vec![]));
        }
    }

    fn side_cap_routes(
        &self,
        side: [T; 2],
        cap: Chart,
        point: [T; 2],
        flip: bool,
        out: &mut Vec<Route<T>>,
    ) {
        let problem = CrossingProblem::SideCap { side, cap, point };
        for (angles, _) in self.crossing_minima(&problem) {
            let a = angles[0];
            let segs = vec![
                self.side_segment(side, a, self.cap_height(cap)),
                Segment {
                    chart: cap,
                    start: self.rim(a),
                    end: point,
                },
            ];
            let r = self.route(
                RouteClass::SideCap,
                angles,
                segs,
                vec![self.rim_point(cap, a)],
            );
            out.push(if flip { Self::reversed(r) } else { r });
        }
    }

    fn cap_cap_routes(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>, out: &mut Vec<Route<T>>) {
        let problem = CrossingProblem::CapCap {
            first: p.local,
            second: q.local,
        };
        for (angles, _) in self.crossing_minima(&problem) {
            let (a1, a2) = (angles[0], angles[1]);
            let segs = vec![
                Segment {
                    chart: p.chart,
                    start: p.local,
                    end: self.rim(a1),
                },
                self.side_segment([a1, self.cap_height(p.chart)], a2, self.cap_height(q.chart)),
                Segment {
                    chart: q.chart,
                    start: self.rim(a2),
                    end: q.local,
                },
            ];
            let cross = vec![self.rim_point(p.chart, a1), self.rim_point(q.chart, a2)];
            out.push(self.route(RouteClass::CapSideCap, angles, segs, cross));
        }
    }

    fn over_cap_routes(&self, cap: Chart, p: [T; 2], q: [T; 2], out: &mut Vec<Route<T>>) {
        let problem = CrossingProblem::SideSide {
            cap,
            first: p,
            second: q,
        };
        let zc = self.cap_height(cap);
        for (angles, _) in self.crossing_minima(&problem) {
            let (a1, a2) = (angles[0], angles[1]);
            let segs = vec![
                self.side_segment(p, a1, zc),
                Segment {
                    chart: cap,
                    start: self.rim(a1),
                    end: self.rim(a2),
                },
                self.side_segment([a2, zc], q[0], q[1]),
            ];
            let cross = vec![self.rim_point(cap, a1), self.rim_point(cap, a2)];
            out.push(self.route(RouteClass::SideCapSide, angles, segs, cross));
        }
    }

    /// Lower bound on any path between two points that must touch height `zc`:
    /// vertical travel and horizontal chord combine by Minkowski's inequality.
    fn over_cap_bound(&self, p: [T; 2], q: [T; 2], zc: T) -> T {
        let vertical = (zc - p[1]).abs() + (zc - q[1]).abs();
        let horizontal = hypot2(sub2(self.rim(p[0]), self.rim(q[0])));
        vertical.hypot(horizontal)
    }

    fn cap_cap_bound(&self, p: [T; 2], q: [T; 2]) -> T {
        let r = self.radius;
        let horizontal = hypot2(sub2(p, q)).max((r - hypot2(p)) + (r - hypot2(q)));
        (T::int(2) * self.half_height).hypot(horizontal)
    }

    fn push_routes(
        &self,
        p: &SurfacePoint<T>,
        q: &SurfacePoint<T>,
        prune_above: Option<T>,
        out: &mut Vec<Route<T>>,
    ) {
        let keep = |lb: T| prune_above.is_none_or(|b| lb <= b);
        match (p.chart, q.chart) {
            (Chart::Side, Chart::Side) => {
                self.direct_routes(p.local, q.local, out);
                for cap in [Chart::Top, Chart::Bottom] {
                    let zc = self.cap_height(cap);
                    if keep(self.over_cap_bound(p.local, q.local, zc)) {
                        self.over_cap_routes(cap, p.local, q.local, out);
                    }
                }
            }
            (Chart::Side, cap) => self.side_cap_routes(p.local, cap, q.local, false, out),
            (cap, Chart::Side) => self.side_cap_routes(q.local, cap, p.local, true, out),
            (a, b) if a == b => {
                let seg = Segment {
                    chart: a,
                    start: p.local,
                    end: q.local,
                };
                out.push(self.route(RouteClass::CapChord, vec![], vec![seg], vec![]));
            }
            _ => {
                if keep(self.cap_cap_bound(p.local, q.local)) {
                    self.cap_cap_routes(p, q, out);
                }
            }
        }
    }

    /// Every candidate route between `p` and `q`, over all chart representations of
    /// seam points, without pruning.
    pub fn routes(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<Vec<Route<T>>> {
        let p = self.canonicalize(p)?;
        let q = self.canonicalize(q)?;
        let mut out = Vec::new();
        for rp in self.representations(&p) {
            for rq in self.representations(&q) {
                self.push_routes(&rp, &rq, None, &mut out);
            }
        }
        Ok(out)
    }

    fn segment_direction(&self, seg: &Segment<T>) -> [T; 2] {
        let d = match seg.chart {
            Chart::Side => [
                self.radius * (seg.end[0] - seg.start[0]),
                seg.end[1] - seg.start[1],
            ],
            _ => sub2(seg.end, seg.start),
        };
        scale2(d, T::one() / hypot2(d))
    }

    /// Unit initial direction of a route in the frame of `base`'s chart.
    fn start_direction(&self, base: &SurfacePoint<T>, segments: &[Segment<T>]) -> [T; 2] {
        let tiny = T::tol(1e-13);
        for seg in segments {
            if GeodesicSpace::segment_length(self, seg) <= tiny {
                continue;
            }
            let d = self.segment_direction(seg);
            if seg.chart == base.chart {
                return d;
            }
            let alpha = match base.chart {
                Chart::Side => base.local[0],
                _ => base.local[1].atan2(base.local[0]),
            };
            return Self::rim_frame(seg.chart, base.chart, alpha, d);
        }
        [T::zero(), T::zero()]
    }

    /// Minimising geodesic with the route that realises it.
    pub fn cyl_distance(
        &self,
        p: &SurfacePoint<T>,
        q: &SurfacePoint<T>,
    ) -> Result<(Geodesic<T>, Option<Route<T>>)> {
        let p = self.canonicalize(p)?;
        let q = self.canonicalize(q)?;
        if self.same_point(&p, &q)? {
            return Ok((Geodesic::trivial(), None));
        }
        let reps_p = self.representations(&p);
        let reps_q = self.representations(&q);
        let mut routes = Vec::new();
        // cheap classes first so that the two-angle problems can be pruned
        for two_angle in [false, true] {
            let best = routes
                .iter()
                .map(|r: &Route<T>| r.length)
                .fold(T::infinity(), T::min);
            let margin = T::lit(1e-3) * (T::one() + best);
            for rp in &reps_p {
                for rq in &reps_q {
                    let needs_two = match (rp.chart, rq.chart) {
                        (Chart::Side, Chart::Side) => true,
                        (a, b) => a.is_cap() && b.is_cap() && a != b,
                    };
                    if two_angle {
                        if needs_two {
                            let mut extra = Vec::new();
                            self.push_routes(rp, rq, Some(best + margin), &mut extra);
                            extra.retain(|r| r.class != RouteClass::SideDirect);
                            routes.extend(extra);
                        }
                    } else if !needs_two {
                        self.push_routes(rp, rq, None, &mut routes);
                    } else if rp.chart == Chart::Side {
                        self.direct_routes(rp.local, rq.local, &mut routes);
                    }
                }
            }
        }
        let mut scored: Vec<(T, [T; 2], usize)> = routes
            .iter()
            .enumerate()
            .map(|(i, r)| (r.length, self.start_direction(&p, &r.segments), i))
            .collect();
        scored.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.2.cmp(&b.2)));
        let (length, direction, idx) = *scored
            .first()
            .ok_or_else(|| Error::Internal("no candidate route".into()))?;
        let dir_tol = T::tol(1e-9);
        let runner_up = scored
            .iter()
            .find(|(_, d, _)| hypot2(sub2(*d, direction)) > dir_tol)
            .map(|(l, d, _)| (*l, *d));
        let best = routes.swap_remove(idx);
        let path = GeodesicPath {
            segments: best.segments.clone(),
            length: best.length,
            crossings: best
                .crossings
                .iter()
                .map(|c| self.canonicalize(c))
                .collect::<Result<_>>()?,
        };
        Ok((
            Geodesic {
                length,
                path,
                direction,
                runner_up,
            },
            Some(best),
        ))
    }

    /// Traces the development-straight line from `v.base` with arc length `|v|`.
    pub fn cyl_exp(&self, v: &TangentVector<T>) -> Result<SurfacePoint<T>> {
        self.check_point(&v.base)?;
        let len = v.norm();
        if !len.is_finite() {
            return Err(Error::Domain("tangent vector norm is not finite".into()));
        }
        if len == T::zero() {
            return self.canonicalize(&v.base);
        }
        let (r, h) = (self.radius, self.half_height);
        let zero = T::zero();
        let mut chart = v.base.chart;
        let mut pos = v.base.local;
        if chart == Chart::Side {
            pos[1] = pos[1].max(-h).min(h);
        }
        let mut dir = scale2(v.components, T::one() / len);
        let mut remaining = len;
        for _ in 0..10_000 {
            match chart {
                Chart::Side => {
                    let s_exit = if dir[1] > zero {
                        (h - pos[1]) / dir[1]
                    } else if dir[1] < zero {
                        (-h - pos[1]) / dir[1]
                    } else {
                        T::infinity()
                    };
                    let s_exit = s_exit.max(zero);
                    if s_exit >= remaining {
                        let end = [pos[0] + dir[0] * remaining / r, pos[1] + dir[1] * remaining];
                        return self.canonicalize(&SurfacePoint::side(
                            wrap_angle(end[0]),
                            end[1].max(-h).min(h),
                        ));
                    }
                    let alpha = wrap_angle(pos[0] + dir[0] * s_exit / r);
                    let cap = if dir[1] > zero {
                        Chart::Top
                    } else {
                        Chart::Bottom
                    };
                    dir = Self::rim_frame(Chart::Side, cap, alpha, dir);
                    pos = self.rim(alpha);
                    chart = cap;
                    remaining = remaining - s_exit;
                }
                cap => {
                    let pd = dot2(pos, dir);
                    let c = dot2(pos, pos) - r * r;
                    let s_exit = (-pd + (pd * pd - c).max(zero).sqrt()).max(zero);
                    if s_exit >= remaining {
                        let end = [pos[0] + dir[0] * remaining, pos[1] + dir[1] * remaining];
                        return self.canonicalize(&SurfacePoint::new(cap, self.clamp_disc(end)));
                    }
                    let e = [pos[0] + dir[0] * s_exit, pos[1] + dir[1] * s_exit];
                    let alpha = wrap_angle(e[1].atan2(e[0]));
                    dir = Self::rim_frame(cap, Chart::Side, alpha, dir);
                    pos = [alpha, self.cap_height(cap)];
                    chart = Chart::Side;
                    remaining = remaining - s_exit;
                }
            }
        }
        Err(Error::Internal(
            "exponential map trace did not terminate".into(),
        ))
    }

    fn clamp_disc(&self, p: [T; 2]) -> [T; 2] {
        let n = hypot2(p);
        if n > self.radius {
            scale2(p, self.radius / n)
        } else {
            p
        }
    }
}

impl<T: Scalar> GeodesicSpace<T> for Cylinder<T> {
    fn descriptor(&self) -> GeometryDescriptor<T> {
        GeometryDescriptor {
            kind: SurfaceKind::Cylinder,
            radius: Some(self.radius),
            half_height: Some(self.half_height),
            kappa_lower: T::zero(),
            kappa_upper: T::zero(),
        }
    }

    fn check_point(&self, p: &SurfacePoint<T>) -> Result<()> {
        let tol = self.seam_tol();
        let [a, b] = p.local;
        if !a.is_finite() || !b.is_finite() {
            return Err(Error::invalid(p.chart, "non-finite local coordinates"));
        }
        match p.chart {
            Chart::Side => {
                if b.abs() > self.half_height + tol {
                    return Err(Error::invalid(
                        p.chart,
                        format!("height {b} outside [-{0}, {0}]", self.half_height),
                    ));
                }
            }
            Chart::Top | Chart::Bottom => {
                if hypot2(p.local) > self.radius + tol {
                    return Err(Error::invalid(
                        p.chart,
                        format!("({a}, {b}) outside the cap disc of radius {}", self.radius),
                    ));
                }
            }
            Chart::Face(_) => return Err(Error::invalid(p.chart, "not a cylinder chart")),
        }
        Ok(())
    }

    fn canonicalize(&self, p: &SurfacePoint<T>) -> Result<SurfacePoint<T>> {
        self.check_point(p)?;
        let tol = self.seam_tol();
        let h = self.half_height;
        Ok(match p.chart {
            Chart::Side => {
                let phi = wrap_angle(p.local[0]);
                let z = p.local[1].max(-h).min(h);
                if (h - z).abs() <= tol {
                    SurfacePoint::new(Chart::Top, self.rim(phi))
                } else if (h + z).abs() <= tol {
                    SurfacePoint::new(Chart::Bottom, self.rim(phi))
                } else {
                    SurfacePoint::side(phi, z)
                }
            }
            cap => SurfacePoint::new(cap, self.clamp_disc(p.local)),
        })
    }

    fn embed(&self, p: &SurfacePoint<T>) -> Result<[T; 3]> {
        self.check_point(p)?;
        Ok(match p.chart {
            Chart::Side => {
                let [x, y] = self.rim(p.local[0]);
                [x, y, p.local[1]]
            }
            cap => [p.local[0], p.local[1], self.cap_height(cap)],
        })
    }

    fn geodesic(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<Geodesic<T>> {
        Ok(self.cyl_distance(p, q)?.0)
    }

    fn exp(&self, v: &TangentVector<T>) -> Result<SurfacePoint<T>> {
        self.cyl_exp(v)
    }

    fn segment_length(&self, seg: &Segment<T>) -> T {
        match seg.chart {
            Chart::Side => {
                (self.radius * (seg.end[0] - seg.start[0])).hypot(seg.end[1] - seg.start[1])
            }
            _ => hypot2(sub2(seg.end, seg.start)),
        }
    }
}
