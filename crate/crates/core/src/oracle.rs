//! Brute-force verification: graph shortest paths on a dense surface mesh, exhaustive
//! grid minimisation of the objective and a flat-patch triangle audit.
//!
//! The mesh is built from the surface embedding alone. Cross-edge weights on the cube
//! come from unfolding the two faces in R³, never from the engine's face table, so a
//! faulty table shows up as a disagreement.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::{Hash, Hasher};
use std::io::{self, Write};

use petgraph::algo::{astar, connected_components};
use petgraph::graph::{NodeIndex, UnGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::comparison::check_triangle_comparison;
use crate::cube::Cube;
use crate::cylinder::Cylinder;
use crate::error::{Error, Result};
use crate::geometry::{Chart, GeodesicSpace, Surface, SurfaceKind, SurfacePoint, TangentVector};
use crate::scalar::{dist3, hypot2, Scalar};
use crate::solver::Problem;

/// Neighbourhood radius in grid steps. It admits the 16-neighbour stencil
/// `(±1, ±2), (±2, ±1)` whose worst direction overestimates length by under 3%.
const STENCIL_RADIUS: f64 = 2.3;
/// Integer form of the squared stencil radius on the cube lattice.
const STENCIL_SQ: i64 = 5;

/// Weighted vertex graph of a surface. Weights are intrinsic lengths of straight paths
/// in a development, so every graph path is a feasible curve on the surface.
#[derive(Clone, Debug)]
pub struct SurfaceMesh<T: Scalar> {
    kind: SurfaceKind,
    resolution: T,
    vertices: Vec<SurfacePoint<T>>,
    positions: Vec<[T; 3]>,
    graph: UnGraph<(), T>,
}

/// Graph distance between the vertices nearest to two query points.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct MeshDistance<T> {
    pub length: T,
    pub from: usize,
    pub to: usize,
    /// Larger of the two embedding distances from a query point to its vertex.
    pub snap_error: T,
}

impl<T: Scalar> SurfaceMesh<T> {
    pub fn build(surface: &Surface<T>, resolution: T) -> Result<Self> {
        if !(resolution > T::zero() && resolution.is_finite()) {
            return Err(Error::Config(format!(
                "resolution {resolution} must be positive"
            )));
        }
        let (vertices, positions, mut edges) = match surface {
            Surface::Cube(_) => cube_mesh(resolution)?,
            Surface::Cylinder(c) => cylinder_mesh(c, resolution)?,
        };
        edges.sort_by(|a, b| {
            (a.0, a.1)
                .cmp(&(b.0, b.1))
                .then(a.2.partial_cmp(&b.2).expect("finite weight"))
        });
        edges.dedup_by_key(|e| (e.0, e.1));
        let mut graph = UnGraph::with_capacity(vertices.len(), edges.len());
        for _ in 0..vertices.len() {
            graph.add_node(());
        }
        for (a, b, w) in edges {
            graph.add_edge(NodeIndex::new(a), NodeIndex::new(b), w);
        }
        if connected_components(&graph) != 1 {
            return Err(Error::Internal("surface mesh is disconnected".into()));
        }
        Ok(Self {
            kind: surface.kind(),
            resolution,
            vertices,
            positions,
            graph,
        })
    }

    pub fn kind(&self) -> SurfaceKind {
        self.kind
    }

    pub fn resolution(&self) -> T {
        self.resolution
    }

    pub fn vertices(&self) -> &[SurfacePoint<T>] {
        &self.vertices
    }

    pub fn positions(&self) -> &[[T; 3]] {
        &self.positions
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.graph.edge_count()
    }

    /// Edges as `(a, b, weight)` with `a < b`, in insertion order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, T)> + '_ {
        self.graph
            .raw_edges()
            .iter()
            .map(|e| (e.source().index(), e.target().index(), e.weight))
    }

    pub fn max_edge(&self) -> T {
        self.edges().map(|e| e.2).fold(T::zero(), T::max)
    }

    /// Hash of vertex coordinates and weighted edges, bit for bit.
    pub fn fingerprint(&self) -> u64 {
        let mut h = DefaultHasher::new();
        for (v, p) in self.vertices.iter().zip(&self.positions) {
            v.chart.hash(&mut h);
            for c in v.local.iter().chain(p) {
                c.to_f64_lossy().to_bits().hash(&mut h);
            }
        }
        for (a, b, w) in self.edges() {
            (a, b, w.to_f64_lossy().to_bits()).hash(&mut h);
        }
        h.finish()
    }

    /// Nearest vertex by embedding distance.
    pub fn nearest_vertex(&self, e: [T; 3]) -> (usize, T) {
        let mut best = (0, T::infinity());
        for (i, p) in self.positions.iter().enumerate() {
            let d = dist3(*p, e);
            if d < best.1 {
                best = (i, d);
            }
        }
        best
    }

    /// Shortest graph path length between two vertices. The chord to the goal is a
    /// consistent A* heuristic since every edge weight is at least its chord.
    pub fn vertex_distance(&self, from: usize, to: usize) -> Result<T> {
        let goal = NodeIndex::new(to);
        let target = self.positions[to];
        astar(
            &self.graph,
            NodeIndex::new(from),
            |n| n == goal,
            |e| *e.weight(),
            |n| dist3(self.positions[n.index()], target),
        )
        .map(|(len, _)| len)
        .ok_or_else(|| Error::Internal(format!("no mesh path from vertex {from} to {to}")))
    }

    /// Plain-text dump: a `v chart a b x y z` line per vertex, then an `e a b w` line per
    /// edge.
    pub fn write_text<W: Write>(&self, mut out: W) -> io::Result<()> {
        for (v, p) in self.vertices.iter().zip(&self.positions) {
            writeln!(
                out,
                "v {} {} {} {} {} {}",
                v.chart.code(),
                v.local[0],
                v.local[1],
                p[0],
                p[1],
                p[2]
            )?;
        }
        for (a, b, w) in self.edges() {
            writeln!(out, "e {a} {b} {w}")?;
        }
        Ok(())
    }
}

pub fn build_mesh<T: Scalar>(surface: &Surface<T>, resolution: T) -> Result<SurfaceMesh<T>> {
    SurfaceMesh::build(surface, resolution)
}

/// Graph distance between the vertices nearest to `p` and `q`.
pub fn mesh_distance<T: Scalar, S: GeodesicSpace<T> + ?Sized>(
    space: &S,
    mesh: &SurfaceMesh<T>,
    p: &SurfacePoint<T>,
    q: &SurfacePoint<T>,
) -> Result<MeshDistance<T>> {
    let (from, ep) = mesh.nearest_vertex(space.embed(p)?);
    let (to, eq) = mesh.nearest_vertex(space.embed(q)?);
    Ok(MeshDistance {
        length: mesh.vertex_distance(from, to)?,
        from,
        to,
        snap_error: ep.max(eq),
    })
}

type Parts<T> = (Vec<SurfacePoint<T>>, Vec<[T; 3]>, Vec<(usize, usize, T)>);

fn steps<T: Scalar>(extent: T, resolution: T) -> usize {
    (extent / resolution)
        .ceil()
        .to_usize()
        .unwrap_or(usize::MAX)
}

fn coarse(what: &str, got: usize, need: usize) -> Error {
    Error::Config(format!(
        "resolution too coarse: {got} vertices along {what}, at least {need} required"
    ))
}

fn ordered<T>(a: usize, b: usize, w: T) -> (usize, usize, T) {
    if a < b {
        (a, b, w)
    } else {
        (b, a, w)
    }
}

/// Face planes as `(axis, level)`, where level 0 or 1 is scaled by the lattice size.
const FACE_PLANES: [(usize, bool); 6] = [
    (2, false),
    (0, true),
    (0, false),
    (1, false),
    (1, true),
    (2, true),
];

fn cube_mesh<T: Scalar>(resolution: T) -> Result<Parts<T>> {
    let n = steps(T::one(), resolution);
    if n < 2 {
        return Err(coarse("a cube edge", n + 1, 3));
    }
    let ni = n as i64;
    let nt = T::from_usize(n).expect("lattice size representable");
    let level = |hi: bool| if hi { ni } else { 0 };
    let faces_of = |k: [i64; 3]| -> Vec<usize> {
        (0..6)
            .filter(|&f| {
                let (axis, hi) = FACE_PLANES[f];
                k[axis] == level(hi)
            })
            .collect()
    };

    let mut index: HashMap<[i64; 3], usize> = HashMap::new();
    let mut keys = Vec::new();
    let mut vertices = Vec::new();
    let mut positions = Vec::new();
    for face in 1..=6u8 {
        for j in 0..=n {
            for i in 0..=n {
                let local = [
                    T::from_usize(i).expect("index") / nt,
                    T::from_usize(j).expect("index") / nt,
                ];
                let e = Cube::embed_face(face, local);
                let key = e.map(|c| (c * nt).round().to_i64().expect("lattice coordinate"));
                if index.contains_key(&key) {
                    continue;
                }
                index.insert(key, vertices.len());
                keys.push(key);
                vertices.push(SurfacePoint::new(Chart::Face(face), local));
                positions.push(e);
            }
        }
    }

    let mut edges = Vec::new();
    for (a, &p) in keys.iter().enumerate() {
        let fp = faces_of(p);
        for dx in -2..=2i64 {
            for dy in -2..=2i64 {
                for dz in -2..=2i64 {
                    let q = [p[0] + dx, p[1] + dy, p[2] + dz];
                    let Some(&b) = index.get(&q) else { continue };
                    if b <= a {
                        continue;
                    }
                    let fq = faces_of(q);
                    let sq = if fp.iter().any(|f| fq.contains(f)) {
                        Some(dx * dx + dy * dy + dz * dz)
                    } else {
                        unfolded_sq(p, &fp, q, &fq, ni)
                    };
                    if let Some(sq) = sq.filter(|&s| s <= STENCIL_SQ) {
                        let w = T::from_i64(sq).expect("small integer").sqrt() / nt;
                        edges.push((a, b, w));
                    }
                }
            }
        }
    }
    Ok((vertices, positions, edges))
}

/// Squared length, in lattice units, of the straight path from `p` to `q` through the
/// edge shared by one face of each, with both faces laid flat. `None` when no face of
/// `p` is adjacent to a face of `q`.
fn unfolded_sq(p: [i64; 3], fp: &[usize], q: [i64; 3], fq: &[usize], n: i64) -> Option<i64> {
    let mut best: Option<i64> = None;
    for &f in fp {
        for &g in fq {
            let (af, hf) = FACE_PLANES[f];
            let (ag, hg) = FACE_PLANES[g];
            if af == ag {
                continue;
            }
            let along = 3 - af - ag;
            let a = (p[ag] - if hg { n } else { 0 }).abs();
            let b = (q[af] - if hf { n } else { 0 }).abs();
            let dk = p[along] - q[along];
            let sq = (a + b) * (a + b) + dk * dk;
            best = Some(best.map_or(sq, |s| s.min(sq)));
        }
    }
    best
}

fn cylinder_mesh<T: Scalar>(cyl: &Cylinder<T>, resolution: T) -> Result<Parts<T>> {
    let r = cyl.radius();
    let h = cyl.half_height();
    let ring = steps(T::two_pi() * r, resolution);
    let rows = steps(T::int(2) * h, resolution);
    if ring < 3 {
        return Err(coarse("the rim", ring, 3));
    }
    if rows < 2 {
        return Err(coarse("the side height", rows + 1, 3));
    }
    let angle = |m: usize| {
        T::two_pi() * T::from_usize(m).expect("index") / T::from_usize(ring).expect("index")
    };
    let radius = T::lit(STENCIL_RADIUS) * resolution;

    let mut vertices = Vec::new();
    let mut positions = Vec::new();
    let mut edges = Vec::new();
    let mut rims = [0usize; 2];
    for (c, cap) in [Chart::Top, Chart::Bottom].into_iter().enumerate() {
        let z = if cap == Chart::Top { h } else { -h };
        let first = vertices.len();
        rims[c] = first;
        for m in 0..ring {
            vertices.push(SurfacePoint::new(cap, cyl.rim(angle(m))));
        }
        let reach = (r / resolution).floor().to_i64().expect("grid extent");
        let inner = r - resolution / T::int(4);
        for j in -reach..=reach {
            for i in -reach..=reach {
                let p = [
                    T::from_i64(i).expect("index") * resolution,
                    T::from_i64(j).expect("index") * resolution,
                ];
                if hypot2(p) <= inner {
                    vertices.push(SurfacePoint::new(cap, p));
                }
            }
        }
        for v in &vertices[first..] {
            positions.push([v.local[0], v.local[1], z]);
        }
        connect_planar(&vertices, first, radius, &mut edges);
    }

    let side_start = vertices.len();
    for k in 1..rows {
        let z = -h
            + T::int(2) * h * T::from_usize(k).expect("index")
                / T::from_usize(rows).expect("index");
        for m in 0..ring {
            let phi = angle(m);
            let [x, y] = cyl.rim(phi);
            vertices.push(SurfacePoint::side(phi, z));
            positions.push([x, y, z]);
        }
    }
    // rows 0 and `rows` are the bottom and top rims
    let node = |m: usize, k: usize| -> usize {
        if k == 0 {
            rims[1] + m
        } else if k == rows {
            rims[0] + m
        } else {
            side_start + (k - 1) * ring + m
        }
    };
    let s_phi = T::two_pi() * r / T::from_usize(ring).expect("index");
    let s_z = T::int(2) * h / T::from_usize(rows).expect("index");
    let dm_max = (radius / s_phi).floor().to_i64().expect("stencil");
    let dk_max = (radius / s_z).floor().to_i64().expect("stencil");
    let mut offsets = Vec::new();
    for dk in 0..=dk_max {
        for dm in -dm_max..=dm_max {
            if dk == 0 && dm <= 0 {
                continue;
            }
            let w = (T::from_i64(dm).expect("offset") * s_phi)
                .hypot(T::from_i64(dk).expect("offset") * s_z);
            // a wrapped offset must stay the short way round
            if w <= radius && 2 * dm.abs() < ring as i64 {
                offsets.push((dm, dk as usize, w));
            }
        }
    }
    for k in 0..=rows {
        for m in 0..ring {
            for &(dm, dk, w) in &offsets {
                if k + dk > rows {
                    continue;
                }
                let m2 = (m as i64 + dm).rem_euclid(ring as i64) as usize;
                let (a, b) = (node(m, k), node(m2, k + dk));
                if a != b {
                    edges.push(ordered(a, b, w));
                }
            }
        }
    }
    Ok((vertices, positions, edges))
}

/// Joins every pair of cap vertices from `first` on that lie within `radius` in the cap
/// plane, bucketing by cells of side `radius`.
fn connect_planar<T: Scalar>(
    vertices: &[SurfacePoint<T>],
    first: usize,
    radius: T,
    edges: &mut Vec<(usize, usize, T)>,
) {
    let cell = |p: [T; 2]| -> (i64, i64) {
        (
            (p[0] / radius).floor().to_i64().expect("cell"),
            (p[1] / radius).floor().to_i64().expect("cell"),
        )
    };
    let mut buckets: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
    for (i, v) in vertices.iter().enumerate().skip(first) {
        buckets.entry(cell(v.local)).or_default().push(i);
    }
    for (i, v) in vertices.iter().enumerate().skip(first) {
        let (cx, cy) = cell(v.local);
        for bx in cx - 1..=cx + 1 {
            for by in cy - 1..=cy + 1 {
                let Some(bucket) = buckets.get(&(bx, by)) else {
                    continue;
                };
                for &j in bucket {
                    if j <= i {
                        continue;
                    }
                    let w = hypot2([
                        vertices[j].local[0] - v.local[0],
                        vertices[j].local[1] - v.local[1],
                    ]);
                    if w <= radius {
                        edges.push((i, j, w));
                    }
                }
            }
        }
    }
}

/// Exhaustive minimiser of `H` over the mesh vertices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridMinimum<T> {
    pub point: SurfacePoint<T>,
    pub value: T,
    /// Vertices at which `H` was evaluated exactly.
    pub evaluated: usize,
}

/// Minimises `H` over all mesh vertices with exact distances. Chord lengths bound
/// geodesic lengths from below, so vertices are visited in order of the chord bound of
/// `H` and the scan stops once that bound exceeds the best value; the result equals a
/// full scan. Ties go to the smaller chart, then the smaller local coordinates.
pub fn grid_minimize<T: Scalar, S: GeodesicSpace<T>>(
    problem: &Problem<T, S>,
    mesh: &SurfaceMesh<T>,
) -> Result<GridMinimum<T>> {
    let space = problem.space();
    let ys = problem
        .data()
        .iter()
        .map(|y| space.embed(y))
        .collect::<Result<Vec<_>>>()?;
    let z = space.embed(problem.origin())?;
    let half = T::lit(0.5);
    let mut order: Vec<(T, usize)> = mesh
        .positions()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let f: T = ys.iter().map(|y| half * dist3(*p, *y).powi(2)).sum();
            (f + problem.lambda() * dist3(*p, z), i)
        })
        .collect();
    order.sort_by(|a, b| a.partial_cmp(b).expect("finite bound"));

    let key = |v: &SurfacePoint<T>, h: T| (h, v.chart, v.local[0], v.local[1]);
    let mut best: Option<(T, SurfacePoint<T>)> = None;
    let mut evaluated = 0;
    for (lb, i) in order {
        if let Some((bh, _)) = best {
            if lb > bh {
                break;
            }
        }
        let v = mesh.vertices()[i];
        let h = problem.h(&v)?;
        evaluated += 1;
        let better = match &best {
            None => true,
            Some((bh, bv)) => {
                key(&v, h).partial_cmp(&key(bv, *bh)) == Some(std::cmp::Ordering::Less)
            }
        };
        if better {
            best = Some((h, v));
        }
    }
    let (value, point) = best.expect("mesh has vertices");
    Ok(GridMinimum {
        point,
        value,
        evaluated,
    })
}

/// Exact versus graph distance for one vertex pair.
#[derive(Clone, Debug, PartialEq)]
pub struct PairCheck<T> {
    pub from: SurfacePoint<T>,
    pub to: SurfacePoint<T>,
    pub exact: Option<T>,
    pub mesh: T,
    /// `mesh / exact − 1`.
    pub relative_gap: Option<T>,
    pub ok: bool,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport<T> {
    pub checks: Vec<PairCheck<T>>,
    pub max_relative_gap: T,
    pub tol: T,
}

impl<T: Scalar> ValidationReport<T> {
    pub fn violations(&self) -> impl Iterator<Item = &PairCheck<T>> {
        self.checks.iter().filter(|c| !c.ok)
    }

    pub fn passed(&self) -> bool {
        self.violations().next().is_none()
    }
}

/// `count` vertex index pairs drawn uniformly with a seeded generator.
pub fn sample_vertex_pairs<T: Scalar>(
    mesh: &SurfaceMesh<T>,
    count: usize,
    seed: u64,
) -> Vec<(usize, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = mesh.vertex_count();
    (0..count)
        .map(|_| (rng.gen_range(0..n), rng.gen_range(0..n)))
        .collect()
}

/// Checks `exact ≤ mesh` (up to rounding) and `mesh ≤ exact·(1 + tol)` on vertex pairs.
/// An error from the exact engine counts as a violation.
pub fn validate_geodesics<T: Scalar, S: GeodesicSpace<T> + Sync + ?Sized>(
    space: &S,
    mesh: &SurfaceMesh<T>,
    pairs: &[(usize, usize)],
    tol: T,
) -> Result<ValidationReport<T>> {
    let checks = pairs
        .par_iter()
        .map(|&(a, b)| -> Result<PairCheck<T>> {
            let (from, to) = (mesh.vertices()[a], mesh.vertices()[b]);
            let graph = mesh.vertex_distance(a, b)?;
            let slack = T::tol(1e-9) * (T::one() + graph);
            Ok(match space.distance(&from, &to) {
                Ok(exact) => {
                    let gap = if exact > T::zero() {
                        graph / exact - T::one()
                    } else {
                        T::zero()
                    };
                    PairCheck {
                        from,
                        to,
                        exact: Some(exact),
                        mesh: graph,
                        relative_gap: Some(gap),
                        ok: exact <= graph + slack && graph <= exact * (T::one() + tol) + slack,
                        error: None,
                    }
                }
                Err(e) => PairCheck {
                    from,
                    to,
                    exact: None,
                    mesh: graph,
                    relative_gap: None,
                    ok: false,
                    error: Some(e.to_string()),
                },
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let max_relative_gap = checks
        .iter()
        .filter_map(|c| c.relative_gap)
        .fold(T::zero(), T::max);
    Ok(ValidationReport {
        checks,
        max_relative_gap,
        tol,
    })
}

/// Uniform random point: area-weighted over the charts, uniform within each.
pub fn sample_point<T: Scalar, R: Rng>(surface: &Surface<T>, rng: &mut R) -> SurfacePoint<T> {
    let u = |rng: &mut R| T::lit(rng.gen::<f64>());
    match surface {
        Surface::Cube(_) => SurfacePoint::face(rng.gen_range(1..=6), u(rng), u(rng)),
        Surface::Cylinder(c) => {
            let (r, h) = (c.radius(), c.half_height());
            let cap = T::PI() * r * r;
            let side = T::two_pi() * r * T::int(2) * h;
            let pick = u(rng) * (side + T::int(2) * cap);
            if pick < side {
                return SurfacePoint::side(
                    u(rng) * T::two_pi(),
                    (u(rng) * T::int(2) - T::one()) * h,
                );
            }
            let chart = if pick < side + cap {
                Chart::Top
            } else {
                Chart::Bottom
            };
            let rho = r * u(rng).sqrt();
            let a = u(rng) * T::two_pi();
            SurfacePoint::new(chart, [rho * a.cos(), rho * a.sin()])
        }
    }
}

/// Radius of an intrinsic disc around `p` free of curvature: the distance to the nearest
/// cube vertex, or to the rim of the cylinder (limited on the side so the disc does not
/// wrap onto itself).
pub fn flat_radius<T: Scalar>(surface: &Surface<T>, p: &SurfacePoint<T>) -> T {
    match surface {
        Surface::Cube(_) => {
            let [x, y] = p.local;
            let (o, i) = (T::zero(), T::one());
            [[o, o], [i, o], [o, i], [i, i]]
                .iter()
                .map(|c| hypot2([x - c[0], y - c[1]]))
                .fold(T::one(), T::min)
        }
        Surface::Cylinder(c) => match p.chart {
            Chart::Side => {
                (c.half_height() - p.local[1].abs()).min(T::lit(0.9) * T::PI() * c.radius())
            }
            _ => c.radius() - hypot2(p.local),
        },
    }
}

/// Triangle-comparison audit on triangles inside flat discs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TriangleAudit<T> {
    pub triangles: usize,
    /// Largest `|a² − (b² + c² − 2bc cos θ)|`.
    pub max_flat_defect: T,
    pub lower_failures: usize,
    pub upper_failures: usize,
    /// Triangles rejected because a side geodesic is not unique.
    pub ambiguous: usize,
}

/// Samples `count` triangles whose vertices lie within `0.45 ρ` of a centre with flat
/// radius `ρ`. Any curve leaving the flat disc is then longer than the straight side, so
/// each triangle is isometric to a planar one and both comparison inequalities are
/// equalities.
pub fn audit_triangles<T: Scalar>(
    surface: &Surface<T>,
    count: usize,
    seed: u64,
) -> Result<TriangleAudit<T>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut audit = TriangleAudit {
        triangles: 0,
        max_flat_defect: T::zero(),
        lower_failures: 0,
        upper_failures: 0,
        ambiguous: 0,
    };
    while audit.triangles < count {
        let centre = surface.canonicalize(&sample_point(surface, &mut rng))?;
        let rho = flat_radius(surface, &centre);
        if rho < T::lit(0.05) {
            continue;
        }
        let reach = T::lit(0.45) * rho;
        let mut corners = Vec::with_capacity(3);
        for _ in 0..3 {
            let len = reach * T::lit(rng.gen::<f64>()).sqrt();
            let a = T::lit(rng.gen::<f64>()) * T::two_pi();
            let v = TangentVector::new(centre, [len * a.cos(), len * a.sin()]);
            corners.push(surface.exp(&v)?);
        }
        match check_triangle_comparison(surface, &corners[0], &corners[1], &corners[2]) {
            Ok(r) => {
                audit.triangles += 1;
                audit.max_flat_defect = audit.max_flat_defect.max(r.flat_defect().abs());
                audit.lower_failures += usize::from(!r.lower_ok);
                audit.upper_failures += usize::from(!r.upper_ok);
            }
            Err(Error::Ambiguous) => audit.ambiguous += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(audit)
}
