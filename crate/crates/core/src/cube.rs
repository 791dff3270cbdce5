//! Exact geodesics on the surface of the unit cube.
//!
//! Each face carries a fixed unit-square chart. Adjacent faces are related by planar
//! isometries with integer entries (rotate the neighbour about the shared edge into the
//! plane of the current face). Chaining these isometries unfolds a sequence of faces
//! into one plane, where a geodesic is a straight segment that crosses the shared edges
//! in order and avoids the cube vertices.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::geometry::{
    Chart, Geodesic, GeodesicPath, GeodesicSpace, GeometryDescriptor, Segment, SurfaceKind,
    SurfacePoint, TangentVector,
};
use crate::scalar::{hypot2, scale2, sub2, Scalar};

/// Default bound on the number of edges a candidate path may cross.
pub const DEFAULT_MAX_CHAIN: usize = 4;

/// Affine planar isometry `p ↦ A p + b` with integer entries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Isometry {
    pub linear: [[i32; 2]; 2],
    pub offset: [i32; 2],
}

impl Isometry {
    pub const IDENTITY: Isometry = Isometry {
        linear: [[1, 0], [0, 1]],
        offset: [0, 0],
    };

    /// `(x, y) ↦ (a x + b y + c, d x + e y + f)`.
    pub const fn new(a: i32, b: i32, c: i32, d: i32, e: i32, f: i32) -> Self {
        Isometry {
            linear: [[a, b], [d, e]],
            offset: [c, f],
        }
    }

    pub fn apply<T: Scalar>(&self, p: [T; 2]) -> [T; 2] {
        let o = [T::int(self.offset[0]), T::int(self.offset[1])];
        let v = self.apply_linear(p);
        [v[0] + o[0], v[1] + o[1]]
    }

    pub fn apply_linear<T: Scalar>(&self, v: [T; 2]) -> [T; 2] {
        let m = &self.linear;
        // entries are in {-1, 0, 1}; branch-free products keep the result exact
        let mul = |k: i32, x: T| match k {
            0 => T::zero(),
            1 => x,
            -1 => -x,
            _ => T::int(k) * x,
        };
        [
            mul(m[0][0], v[0]) + mul(m[0][1], v[1]),
            mul(m[1][0], v[0]) + mul(m[1][1], v[1]),
        ]
    }

    pub fn apply_int(&self, p: [i32; 2]) -> [i32; 2] {
        let m = &self.linear;
        [
            m[0][0] * p[0] + m[0][1] * p[1] + self.offset[0],
            m[1][0] * p[0] + m[1][1] * p[1] + self.offset[1],
        ]
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &Isometry) -> Isometry {
        let a = &self.linear;
        let b = &inner.linear;
        let mut linear = [[0; 2]; 2];
        for (i, row) in linear.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        let t = self.apply_int(inner.offset);
        Isometry { linear, offset: t }
    }

    pub fn inverse(&self) -> Isometry {
        let m = &self.linear;
        let linear = [[m[0][0], m[1][0]], [m[0][1], m[1][1]]];
        let r = Isometry {
            linear,
            offset: [0, 0],
        };
        let t = r.apply_int(self.offset);
        Isometry {
            linear,
            offset: [-t[0], -t[1]],
        }
    }

    pub fn is_orthogonal(&self) -> bool {
        let m = &self.linear;
        let c0 = m[0][0] * m[0][0] + m[1][0] * m[1][0];
        let c1 = m[0][1] * m[0][1] + m[1][1] * m[1][1];
        let cross = m[0][0] * m[0][1] + m[1][0] * m[1][1];
        c0 == 1 && c1 == 1 && cross == 0
    }
}

/// Transform carrying chart coordinates of `src` into the plane of `dst`'s chart.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FaceTransform {
    pub src: u8,
    pub dst: u8,
    pub map: Isometry,
}

/// One side of a face's unit square.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    X0,
    X1,
    Y0,
    Y1,
}

impl Side {
    fn endpoints(self) -> [[i32; 2]; 2] {
        match self {
            Side::X0 => [[0, 0], [0, 1]],
            Side::X1 => [[1, 0], [1, 1]],
            Side::Y0 => [[0, 0], [1, 0]],
            Side::Y1 => [[0, 1], [1, 1]],
        }
    }
}

/// Table of face-to-face transforms; `entry(dst, src)` expresses `src` coordinates in
/// the plane of `dst`. Missing entries are non-adjacent faces.
#[derive(Clone, Debug, PartialEq)]
pub struct FaceTable {
    entries: [[Option<Isometry>; 6]; 6],
}

impl FaceTable {
    pub fn standard() -> Self {
        use Isometry as I;
        let mut e = [[None; 6]; 6];
        let mut set = |dst: usize, src: usize, m: Isometry| e[dst - 1][src - 1] = Some(m);
        for f in 1..=6 {
            set(f, f, I::IDENTITY);
        }
        set(1, 2, I::new(0, 1, 1, 1, 0, 0)); // (y+1, x)
        set(1, 3, I::new(0, -1, 0, -1, 0, 1)); // (-y, 1-x)
        set(1, 4, I::new(1, 0, 0, 0, -1, 0)); // (x, -y)
        set(1, 5, I::new(-1, 0, 1, 0, 1, 1)); // (1-x, y+1)
        set(2, 1, I::new(0, 1, 0, 1, 0, -1)); // (y, x-1)
        set(2, 4, I::new(1, 0, -1, 0, 1, 0)); // (x-1, y)
        set(2, 5, I::new(1, 0, 1, 0, 1, 0)); // (x+1, y)
        set(2, 6, I::new(0, 1, 0, -1, 0, 2)); // (y, 2-x)
        set(3, 1, I::new(0, -1, 1, -1, 0, 0)); // (1-y, -x)
        set(3, 4, I::new(1, 0, 1, 0, 1, 0)); // (x+1, y)
        set(3, 5, I::new(1, 0, -1, 0, 1, 0)); // (x-1, y)
        set(3, 6, I::new(0, -1, 1, 1, 0, 1)); // (1-y, x+1)
        set(4, 1, I::new(1, 0, 0, 0, -1, 0)); // (x, -y)
        set(4, 2, I::new(1, 0, 1, 0, 1, 0)); // (x+1, y)
        set(4, 3, I::new(1, 0, -1, 0, 1, 0)); // (x-1, y)
        set(4, 6, I::new(1, 0, 0, 0, 1, 1)); // (x, y+1)
        set(5, 1, I::new(-1, 0, 1, 0, 1, -1)); // (1-x, y-1)
        set(5, 2, I::new(1, 0, -1, 0, 1, 0)); // (x-1, y)
        set(5, 3, I::new(1, 0, 1, 0, 1, 0)); // (x+1, y)
        set(5, 6, I::new(-1, 0, 1, 0, -1, 2)); // (1-x, 2-y)
        set(6, 2, I::new(0, -1, 2, 1, 0, 0)); // (2-y, x)
        set(6, 3, I::new(0, 1, -1, -1, 0, 1)); // (y-1, 1-x)
        set(6, 4, I::new(1, 0, 0, 0, 1, -1)); // (x, y-1)
        set(6, 5, I::new(-1, 0, 1, 0, -1, 2)); // (1-x, 2-y)
        FaceTable { entries: e }
    }

    /// Replaces one entry; used to build deliberately broken tables in tests.
    pub fn with_entry(mut self, dst: u8, src: u8, map: Option<Isometry>) -> Self {
        self.entries[dst as usize - 1][src as usize - 1] = map;
        self
    }

    pub fn entry(&self, dst: u8, src: u8) -> Option<Isometry> {
        if !(1..=6).contains(&dst) || !(1..=6).contains(&src) {
            return None;
        }
        self.entries[dst as usize - 1][src as usize - 1]
    }

    pub fn transform(&self, src: u8, dst: u8) -> Result<FaceTransform> {
        self.entry(dst, src)
            .map(|map| FaceTransform { src, dst, map })
            .ok_or(Error::NoTransform { src, dst })
    }

    /// Faces adjacent to `f` in increasing order.
    pub fn neighbours(&self, f: u8) -> Vec<u8> {
        (1..=6u8)
            .filter(|&g| g != f && self.entry(f, g).is_some())
            .collect()
    }

    /// Which side of `f`'s square borders `g`.
    pub fn side_towards(&self, f: u8, g: u8) -> Option<Side> {
        let m = self.entry(f, g)?;
        let c = m.apply::<f64>([0.5, 0.5]);
        if c[0] < 0.0 {
            Some(Side::X0)
        } else if c[0] > 1.0 {
            Some(Side::X1)
        } else if c[1] < 0.0 {
            Some(Side::Y0)
        } else if c[1] > 1.0 {
            Some(Side::Y1)
        } else {
            None
        }
    }

    fn neighbour_across(&self, f: u8, side: Side) -> Option<u8> {
        self.neighbours(f)
            .into_iter()
            .find(|&g| self.side_towards(f, g) == Some(side))
    }
}

impl Default for FaceTable {
    fn default() -> Self {
        Self::standard()
    }
}

/// Expresses `p`, given in `src`'s chart, in the plane of `dst`'s chart.
pub fn face_transform<T: Scalar>(table: &FaceTable, src: u8, dst: u8, p: [T; 2]) -> Result<[T; 2]> {
    Ok(table.transform(src, dst)?.map.apply(p))
}

/// A chain of adjacent faces laid out in the plane of the first face.
#[derive(Clone, Debug, PartialEq)]
pub struct Unfolding {
    pub chain: Vec<u8>,
    /// `maps[i]` carries face `chain[i]`'s chart into the plane of `chain[0]`.
    pub maps: Vec<Isometry>,
    /// Shared edge between consecutive faces, in the plane of `chain[0]`.
    pub edges: Vec<[[i32; 2]; 2]>,
}

impl Unfolding {
    /// Maps the last face's chart into the first face's plane.
    pub fn composed(&self) -> Isometry {
        *self.maps.last().expect("chain is never empty")
    }

    /// Corners of the unit square of face `i`, in the plane of `chain[0]`.
    pub fn window(&self, i: usize) -> [[i32; 2]; 4] {
        let m = &self.maps[i];
        [[0, 0], [1, 0], [1, 1], [0, 1]].map(|c| m.apply_int(c))
    }
}

/// All non-backtracking face chains from `src` to `dst` crossing at most `max_chain`
/// edges, in lexicographic order.
pub fn enumerate_unfoldings(
    table: &FaceTable,
    src: u8,
    dst: u8,
    max_chain: usize,
) -> Vec<Unfolding> {
    let mut out = Vec::new();
    let mut chain = vec![src];
    let mut maps = vec![Isometry::IDENTITY];
    let mut edges = Vec::new();
    walk(
        table, dst, max_chain, &mut chain, &mut maps, &mut edges, &mut out,
    );
    out.sort_by(|a, b| a.chain.cmp(&b.chain));
    out
}

fn walk(
    table: &FaceTable,
    dst: u8,
    max_chain: usize,
    chain: &mut Vec<u8>,
    maps: &mut Vec<Isometry>,
    edges: &mut Vec<[[i32; 2]; 2]>,
    out: &mut Vec<Unfolding>,
) {
    let cur = *chain.last().unwrap();
    if cur == dst {
        out.push(Unfolding {
            chain: chain.clone(),
            maps: maps.clone(),
            edges: edges.clone(),
        });
    }
    if edges.len() == max_chain {
        return;
    }
    let prev = if chain.len() >= 2 {
        Some(chain[chain.len() - 2])
    } else {
        None
    };
    for g in table.neighbours(cur) {
        if Some(g) == prev {
            continue;
        }
        let (Some(step), Some(side)) = (table.entry(cur, g), table.side_towards(cur, g)) else {
            continue;
        };
        let here = *maps.last().unwrap();
        let edge = side.endpoints().map(|c| here.apply_int(c));
        chain.push(g);
        maps.push(here.compose(&step));
        edges.push(edge);
        walk(table, dst, max_chain, chain, maps, edges, out);
        chain.pop();
        maps.pop();
        edges.pop();
    }
}

/// Unit-cube surface with the faces' chart systems.
#[derive(Clone, Debug)]
pub struct Cube {
    table: Arc<FaceTable>,
    max_chain: usize,
    unfoldings: Arc<Vec<Vec<Unfolding>>>,
}

impl Default for Cube {
    fn default() -> Self {
        Self::new()
    }
}

/// A straight candidate in one unfolding that passed the window checks.
struct Candidate<T> {
    index: usize,
    length: T,
    delta: [T; 2],
    crossings: Vec<T>,
}

impl Cube {
    pub fn new() -> Self {
        Self::with_table(FaceTable::standard(), DEFAULT_MAX_CHAIN)
    }

    pub fn with_table(table: FaceTable, max_chain: usize) -> Self {
        let mut unfoldings = Vec::with_capacity(36);
        for src in 1..=6u8 {
            for dst in 1..=6u8 {
                unfoldings.push(enumerate_unfoldings(&table, src, dst, max_chain));
            }
        }
        Cube {
            table: Arc::new(table),
            max_chain,
            unfoldings: Arc::new(unfoldings),
        }
    }

    pub fn with_max_chain(max_chain: usize) -> Self {
        Self::with_table(FaceTable::standard(), max_chain)
    }

    pub fn table(&self) -> &FaceTable {
        &self.table
    }

    pub fn max_chain(&self) -> usize {
        self.max_chain
    }

    pub fn unfoldings(&self, src: u8, dst: u8) -> &[Unfolding] {
        &self.unfoldings[(src as usize - 1) * 6 + (dst as usize - 1)]
    }

    /// Embedding of a face point in R³, per face: 1 `(x,y,0)`, 2 `(1,x,y)`,
    /// 3 `(0,1-x,y)`, 4 `(x,0,y)`, 5 `(1-x,1,y)`, 6 `(x,y,1)`.
    pub fn embed_face<T: Scalar>(face: u8, p: [T; 2]) -> [T; 3] {
        let (x, y) = (p[0], p[1]);
        let (o, i) = (T::zero(), T::one());
        match face {
            1 => [x, y, o],
            2 => [i, x, y],
            3 => [o, i - x, y],
            4 => [x, o, y],
            5 => [i - x, i, y],
            _ => [x, y, i],
        }
    }

    /// Inverse of [`Cube::embed_face`] for a point known to lie on `face`.
    pub fn chart_of<T: Scalar>(face: u8, e: [T; 3]) -> [T; 2] {
        let i = T::one();
        match face {
            1 => [e[0], e[1]],
            2 => [e[1], e[2]],
            3 => [i - e[1], e[2]],
            4 => [e[0], e[2]],
            5 => [i - e[0], e[2]],
            _ => [e[0], e[1]],
        }
    }

    /// Faces whose plane contains the embedded point (within `tol`).
    fn faces_containing<T: Scalar>(e: [T; 3], tol: T) -> Vec<u8> {
        let near = |a: T, b: T| (a - b).abs() <= tol;
        let (o, i) = (T::zero(), T::one());
        let mut out = Vec::new();
        if near(e[2], o) {
            out.push(1);
        }
        if near(e[0], i) {
            out.push(2);
        }
        if near(e[0], o) {
            out.push(3);
        }
        if near(e[1], o) {
            out.push(4);
        }
        if near(e[1], i) {
            out.push(5);
        }
        if near(e[2], i) {
            out.push(6);
        }
        out
    }

    fn face_of<T>(p: &SurfacePoint<T>) -> Result<u8> {
        match p.chart {
            Chart::Face(f @ 1..=6) => Ok(f),
            other => Err(Error::invalid(other, "not a cube face")),
        }
    }

    /// Checks one straight candidate against the unfolded windows. Returns the crossing
    /// parameters along the segment, one per shared edge.
    fn crossings<T: Scalar>(u: &Unfolding, start: [T; 2], delta: [T; 2]) -> Option<Vec<T>> {
        let eps_t = T::tol(1e-12);
        let eps_v = T::tol(1e-12);
        let len = hypot2(delta);
        let mut out = Vec::with_capacity(u.edges.len());
        let mut last = T::zero();
        for e in &u.edges {
            let a = [T::int(e[0][0]), T::int(e[0][1])];
            let b = [T::int(e[1][0]), T::int(e[1][1])];
            let ev = sub2(b, a);
            let denom = delta[0] * ev[1] - delta[1] * ev[0];
            if denom.abs() <= eps_t * len {
                return None;
            }
            let ap = sub2(a, start);
            let t = (ap[0] * ev[1] - ap[1] * ev[0]) / denom;
            let s = (ap[0] * delta[1] - ap[1] * delta[0]) / denom;
            if t < -eps_t || t > T::one() + eps_t || t < last - eps_t {
                return None;
            }
            // crossing at an endpoint of the path is allowed even at a vertex
            let at_endpoint = t * len <= eps_t || (T::one() - t) * len <= eps_t;
            if !at_endpoint && (s < eps_v || s > T::one() - eps_v) {
                return None;
            }
            if at_endpoint && (s < -eps_v || s > T::one() + eps_v) {
                return None;
            }
            last = t.max(last);
            out.push(t.max(T::zero()).min(T::one()));
        }
        Some(out)
    }

    /// Minimising geodesic together with the realising unfolding.
    pub fn cube_distance<T: Scalar>(
        &self,
        p: &SurfacePoint<T>,
        q: &SurfacePoint<T>,
    ) -> Result<(Geodesic<T>, Option<Unfolding>)> {
        let p = self.canonicalize(p)?;
        let q = self.canonicalize(q)?;
        if self.same_point(&p, &q)? {
            return Ok((Geodesic::trivial(), None));
        }
        let (a, b) = (Self::face_of(&p)?, Self::face_of(&q)?);
        let unfoldings = self.unfoldings(a, b);
        let tie = T::tol(1e-12);
        let mut best: Option<Candidate<T>> = None;
        let mut all: Vec<(T, [T; 2])> = Vec::new();
        for (index, u) in unfoldings.iter().enumerate() {
            let image = u.composed().apply(q.local);
            let delta = sub2(image, p.local);
            let length = hypot2(delta);
            let Some(crossings) = Self::crossings(u, p.local, delta) else {
                continue;
            };
            all.push((length, scale2(delta, T::one() / length)));
            // enumeration is lexicographic, so keep the first of equal-length candidates
            if best.as_ref().is_none_or(|b| length < b.length - tie) {
                best = Some(Candidate {
                    index,
                    length,
                    delta,
                    crossings,
                });
            }
        }
        let best = best.ok_or_else(|| {
            Error::Internal(format!(
                "no admissible unfolding between {:?} and {:?} within {} edges",
                p, q, self.max_chain
            ))
        })?;
        let dir = scale2(best.delta, T::one() / best.length);
        let dir_tol = T::tol(1e-9);
        let runner_up = all
            .iter()
            .filter(|(_, d)| hypot2(sub2(*d, dir)) > dir_tol)
            .min_by(|x, y| x.0.partial_cmp(&y.0).unwrap())
            .copied();
        let u = &unfoldings[best.index];
        let path = self.fold_path(u, p.local, best.delta, &best.crossings)?;
        let geo = Geodesic {
            length: best.length,
            path,
            direction: dir,
            runner_up,
        };
        Ok((geo, Some(u.clone())))
    }

    fn fold_path<T: Scalar>(
        &self,
        u: &Unfolding,
        start: [T; 2],
        delta: [T; 2],
        crossings: &[T],
    ) -> Result<GeodesicPath<T>> {
        let at = |t: T| [start[0] + delta[0] * t, start[1] + delta[1] * t];
        let mut params = Vec::with_capacity(crossings.len() + 2);
        params.push(T::zero());
        params.extend_from_slice(crossings);
        params.push(T::one());
        let mut segments = Vec::with_capacity(u.chain.len());
        let mut length = T::zero();
        for (i, &face) in u.chain.iter().enumerate() {
            let inv = u.maps[i].inverse();
            let seg = Segment {
                chart: Chart::Face(face),
                start: inv.apply(at(params[i])),
                end: inv.apply(at(params[i + 1])),
            };
            length = length + hypot2(sub2(seg.end, seg.start));
            segments.push(seg);
        }
        let mut pts = Vec::with_capacity(crossings.len());
        for (i, &t) in crossings.iter().enumerate() {
            let inv = u.maps[i + 1].inverse();
            let local = inv.apply(at(t)).map(|c| c.max(T::zero()).min(T::one()));
            pts.push(self.canonicalize(&SurfacePoint::new(Chart::Face(u.chain[i + 1]), local))?);
        }
        Ok(GeodesicPath {
            segments,
            length,
            crossings: pts,
        })
    }

    /// Ray-traces a straight line of length `|v|` through the face charts.
    pub fn cube_exp<T: Scalar>(&self, v: &TangentVector<T>) -> Result<SurfacePoint<T>> {
        self.check_point(&v.base)?;
        let len = v.norm();
        if !len.is_finite() {
            return Err(Error::Domain("tangent vector norm is not finite".into()));
        }
        if len == T::zero() {
            return self.canonicalize(&v.base);
        }
        let corner_tol = T::tol(1e-12);
        let mut face = Self::face_of(&v.base)?;
        let mut pos = v.base.local.map(|c| c.max(T::zero()).min(T::one()));
        let mut dir = scale2(v.components, T::one() / len);
        let mut remaining = len;
        let (zero, one) = (T::zero(), T::one());
        for _ in 0..100_000 {
            let tx = if dir[0] > zero {
                (one - pos[0]) / dir[0]
            } else if dir[0] < zero {
                -pos[0] / dir[0]
            } else {
                T::infinity()
            };
            let ty = if dir[1] > zero {
                (one - pos[1]) / dir[1]
            } else if dir[1] < zero {
                -pos[1] / dir[1]
            } else {
                T::infinity()
            };
            let t_exit = tx.min(ty).max(zero);
            if t_exit >= remaining {
                let end = [pos[0] + dir[0] * remaining, pos[1] + dir[1] * remaining];
                let end = end.map(|c| c.max(zero).min(one));
                return self.canonicalize(&SurfacePoint::new(Chart::Face(face), end));
            }
            let hit = [pos[0] + dir[0] * t_exit, pos[1] + dir[1] * t_exit];
            for c in [[zero, zero], [one, zero], [zero, one], [one, one]] {
                if hypot2(sub2(hit, c)) <= corner_tol {
                    if remaining - t_exit <= corner_tol {
                        return self.canonicalize(&SurfacePoint::new(Chart::Face(face), c));
                    }
                    let e = Self::embed_face(face, c);
                    return Err(Error::CornerHit {
                        vertex: e.map(|x| x.to_f64_lossy()),
                    });
                }
            }
            let side = if tx <= ty {
                if dir[0] > zero {
                    Side::X1
                } else {
                    Side::X0
                }
            } else if dir[1] > zero {
                Side::Y1
            } else {
                Side::Y0
            };
            let next = self.table.neighbour_across(face, side).ok_or_else(|| {
                Error::Internal(format!("face {face} has no neighbour across {side:?}"))
            })?;
            let step = self.table.transform(face, next)?.map;
            pos = step.apply(hit).map(|c| c.max(zero).min(one));
            dir = step.apply_linear(dir);
            face = next;
            remaining = remaining - t_exit;
        }
        Err(Error::Internal(
            "exponential map trace did not terminate".into(),
        ))
    }
}

impl<T: Scalar> GeodesicSpace<T> for Cube {
    fn descriptor(&self) -> GeometryDescriptor<T> {
        GeometryDescriptor {
            kind: SurfaceKind::Cube,
            radius: None,
            half_height: None,
            kappa_lower: T::zero(),
            kappa_upper: T::zero(),
        }
    }

    fn check_point(&self, p: &SurfacePoint<T>) -> Result<()> {
        Self::face_of(p)?;
        let tol = T::tol(1e-12);
        for c in p.local {
            if !c.is_finite() || c < -tol || c > T::one() + tol {
                return Err(Error::invalid(
                    p.chart,
                    format!("local coordinates {:?} outside [0, 1]²", p.local),
                ));
            }
        }
        Ok(())
    }

    fn canonicalize(&self, p: &SurfacePoint<T>) -> Result<SurfacePoint<T>> {
        self.check_point(p)?;
        let face = Self::face_of(p)?;
        let local = p.local.map(|c| c.max(T::zero()).min(T::one()));
        let e = Self::embed_face(face, local);
        let tol = T::tol(1e-12);
        let target = Self::faces_containing(e, tol)
            .into_iter()
            .min()
            .unwrap_or(face);
        if target == face {
            return Ok(SurfacePoint::new(p.chart, local));
        }
        let l = Self::chart_of(target, e).map(|c| c.max(T::zero()).min(T::one()));
        Ok(SurfacePoint::new(Chart::Face(target), l))
    }

    fn embed(&self, p: &SurfacePoint<T>) -> Result<[T; 3]> {
        self.check_point(p)?;
        Ok(Self::embed_face(Self::face_of(p)?, p.local))
    }

    fn geodesic(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<Geodesic<T>> {
        Ok(self.cube_distance(p, q)?.0)
    }

    fn log(&self, p: &SurfacePoint<T>, q: &SurfacePoint<T>) -> Result<TangentVector<T>> {
        let g = self.geodesic(p, q)?;
        Ok(TangentVector::new(
            self.canonicalize(p)?,
            scale2(g.direction, g.length),
        ))
    }

    fn exp(&self, v: &TangentVector<T>) -> Result<SurfacePoint<T>> {
        self.cube_exp(v)
    }

    fn segment_length(&self, seg: &Segment<T>) -> T {
        hypot2(sub2(seg.end, seg.start))
    }
}
