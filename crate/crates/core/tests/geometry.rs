mod common;

use common::{cube_point, cylinder_point, rng};
use fbsurf::cube::{enumerate_unfoldings, face_transform, Cube, FaceTable};
use fbsurf::cylinder::{Cylinder, RouteClass};
use fbsurf::geometry::{angle_between, Chart, GeodesicSpace, Segment, SurfacePoint};
use proptest::prelude::*;
use rand::Rng;

fn chord(a: [f64; 3], b: [f64; 3]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)).sqrt()
}

fn metric_properties<S: GeodesicSpace<f64>>(s: &S, pts: &[SurfacePoint<f64>]) {
    for w in pts.windows(3) {
        let (x, y, z) = (&w[0], &w[1], &w[2]);
        let dxy = s.distance(x, y).unwrap();
        let dyx = s.distance(y, x).unwrap();
        assert!((dxy - dyx).abs() <= 1e-12, "asymmetric: {dxy} vs {dyx}");
        let dxz = s.distance(x, z).unwrap();
        let dyz = s.distance(y, z).unwrap();
        assert!(dxz <= dxy + dyz + 1e-10, "triangle inequality fails");
        let v = s.log(x, y).unwrap();
        assert!((v.norm() - dxy).abs() <= 1e-10);
        let back = s.exp(&v).unwrap();
        let miss = s.distance(&back, y).unwrap();
        assert!(miss <= 1e-9, "exp(log) misses by {miss}: {x:?} -> {y:?}");
        assert!(dxy + 1e-12 >= chord(s.embed(x).unwrap(), s.embed(y).unwrap()));
    }
}

#[test]
fn cube_metric_properties() {
    let cube = Cube::new();
    let mut r = rng(11);
    let pts: Vec<_> = (0..502).map(|_| cube_point(&mut r, 1e-3)).collect();
    metric_properties(&cube, &pts);
}

#[test]
fn cylinder_metric_properties() {
    for (rad, h, seed) in [(1.0, 0.5, 12), (0.7, 1.3, 13), (1.0, 0.1, 14)] {
        let c = Cylinder::new(rad, h).unwrap();
        let mut r = rng(seed);
        let pts: Vec<_> = (0..202).map(|_| cylinder_point(&mut r, &c, 1e-3)).collect();
        metric_properties(&c, &pts);
    }
}

fn unit_speed<S: GeodesicSpace<f64>>(s: &S, x: &SurfacePoint<f64>, y: &SurfacePoint<f64>) -> bool {
    let g = s.geodesic(x, y).unwrap();
    if !g.is_unique(1e-6) {
        return false;
    }
    for t in [0.25, 0.5, 0.75] {
        let m = s.geodesic_point(x, y, t).unwrap();
        let d = s.distance(x, &m).unwrap();
        assert!(
            (d - t * g.length).abs() <= 1e-9,
            "t = {t}: {d} vs {}",
            t * g.length
        );
    }
    true
}

#[test]
fn geodesics_have_unit_speed() {
    let cube = Cube::new();
    let mut r = rng(21);
    let mut checked = 0;
    for _ in 0..200 {
        let (x, y) = (cube_point(&mut r, 1e-3), cube_point(&mut r, 1e-3));
        checked += unit_speed(&cube, &x, &y) as usize;
    }
    assert!(checked > 150);
    let c = Cylinder::new(1.0, 0.5).unwrap();
    let mut checked = 0;
    for _ in 0..100 {
        let (x, y) = (
            cylinder_point(&mut r, &c, 1e-3),
            cylinder_point(&mut r, &c, 1e-3),
        );
        checked += unit_speed(&c, &x, &y) as usize;
    }
    assert!(checked > 70);
}

/// Independent check by clipping: the unfolded segment from `a` to `b` must pass
/// through the chain's face windows one after another, entering each window where it
/// leaves the previous one, and never touch a window corner in between.
fn straight_in_windows(u: &fbsurf::cube::Unfolding, a: [f64; 2], b: [f64; 2]) -> bool {
    let d = [b[0] - a[0], b[1] - a[1]];
    let clip = |w: [[i32; 2]; 4]| -> Option<(f64, f64)> {
        let lo = [0, 1].map(|k| w.iter().map(|c| c[k]).min().unwrap() as f64);
        let hi = [0, 1].map(|k| w.iter().map(|c| c[k]).max().unwrap() as f64);
        let (mut t0, mut t1) = (0.0f64, 1.0f64);
        for k in 0..2 {
            if d[k].abs() < 1e-300 {
                if a[k] < lo[k] - 1e-12 || a[k] > hi[k] + 1e-12 {
                    return None;
                }
                continue;
            }
            let (s0, s1) = ((lo[k] - a[k]) / d[k], (hi[k] - a[k]) / d[k]);
            t0 = t0.max(s0.min(s1));
            t1 = t1.min(s0.max(s1));
        }
        (t1 - t0 >= -1e-12).then_some((t0, t1))
    };
    let mut prev_out = 0.0;
    for i in 0..u.chain.len() {
        let Some((t0, t1)) = clip(u.window(i)) else {
            return false;
        };
        if (t0 - prev_out).abs() > 1e-9 {
            return false;
        }
        if i > 0 {
            let p = [a[0] + d[0] * t0, a[1] + d[1] * t0];
            let at_end = !(1e-12..=1.0 - 1e-12).contains(&t0);
            let near_corner = u
                .window(i)
                .iter()
                .any(|c| (p[0] - c[0] as f64).hypot(p[1] - c[1] as f64) < 1e-9);
            if near_corner && !at_end {
                return false;
            }
        }
        prev_out = t1;
    }
    (prev_out - 1.0).abs() <= 1e-9
}

#[test]
fn cube_distance_is_minimal_over_unfoldings() {
    let cube = Cube::new();
    let wide = Cube::with_max_chain(6);
    let table = FaceTable::standard();
    let mut r = rng(31);
    for _ in 0..150 {
        let (p, q) = (cube_point(&mut r, 1e-3), cube_point(&mut r, 1e-3));
        let d = cube.distance(&p, &q).unwrap();
        let (fp, fq) = (face_of(&p), face_of(&q));
        let mut best = f64::INFINITY;
        for u in enumerate_unfoldings(&table, fp, fq, 4) {
            let image = u.composed().apply(q.local);
            let len = (image[0] - p.local[0]).hypot(image[1] - p.local[1]);
            if straight_in_windows(&u, p.local, image) {
                best = best.min(len);
            }
        }
        assert!(
            (best - d).abs() <= 1e-12,
            "{p:?} {q:?}: {d} vs brute force {best}"
        );
        assert!(
            (wide.distance(&p, &q).unwrap() - d).abs() <= 1e-12,
            "longer chains help"
        );
    }
}

fn face_of(p: &SurfacePoint<f64>) -> u8 {
    match p.chart {
        Chart::Face(f) => f,
        _ => unreachable!(),
    }
}

#[test]
fn shared_edges_embed_consistently() {
    let cube = Cube::new();
    let table = FaceTable::standard();
    let mut r = rng(41);
    for f in 1..=6u8 {
        for g in table.neighbours(f) {
            let m = table.entry(f, g).unwrap();
            for _ in 0..20 {
                let s: f64 = r.gen_range(0.0..1.0);
                // points of g on the side facing f land on f's boundary
                for p in [[s, 0.0], [s, 1.0], [0.0, s], [1.0, s]] {
                    let img = m.apply(p);
                    let on_f = (0.0..=1.0).contains(&img[0]) && (0.0..=1.0).contains(&img[1]);
                    if on_f {
                        let a = cube.embed(&SurfacePoint::face(g, p[0], p[1])).unwrap();
                        let b = cube.embed(&SurfacePoint::face(f, img[0], img[1])).unwrap();
                        assert!(chord(a, b) <= 1e-12, "faces {f}/{g} at {p:?}");
                    }
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { failure_persistence: None, ..ProptestConfig::default() })]

    // dyadic coordinates keep `1 - x` exact, so the round trip is bit-exact
    #[test]
    fn face_transforms_round_trip_exactly(i in 0u32..=1 << 20, j in 0u32..=1 << 20, f in 1u8..=6, k in 0usize..4) {
        let (x, y) = (i as f64 / (1 << 20) as f64, j as f64 / (1 << 20) as f64);
        let table = FaceTable::standard();
        let g = table.neighbours(f)[k];
        let there = face_transform(&table, f, g, [x, y]).unwrap();
        let back = face_transform(&table, g, f, there).unwrap();
        prop_assert_eq!(back, [x, y]);
    }

    #[test]
    fn face_transforms_round_trip(x in 0.0f64..1.0, y in 0.0f64..1.0, f in 1u8..=6, k in 0usize..4) {
        let table = FaceTable::standard();
        let g = table.neighbours(f)[k];
        let there = face_transform(&table, f, g, [x, y]).unwrap();
        let back = face_transform(&table, g, f, there).unwrap();
        prop_assert!((back[0] - x).abs() <= 2e-16 && (back[1] - y).abs() <= 2e-16);
    }
}

#[test]
fn cylinder_distance_is_minimum_of_route_classes() {
    let mut r = rng(51);
    for (rad, h) in [(1.0, 0.5), (1.0, 0.1), (0.5, 1.0)] {
        let c = Cylinder::new(rad, h).unwrap();
        for _ in 0..170 {
            let (p, q) = (
                cylinder_point(&mut r, &c, 1e-3),
                cylinder_point(&mut r, &c, 1e-3),
            );
            let d = c.distance(&p, &q).unwrap();
            let routes = c.routes(&p, &q).unwrap();
            let min = routes
                .iter()
                .map(|r| r.length)
                .fold(f64::INFINITY, f64::min);
            for route in &routes {
                assert!(
                    d <= route.length + 1e-12,
                    "{:?} shorter than distance",
                    route.class
                );
            }
            assert!((d - min).abs() <= 1e-12, "{d} vs {min}");
        }
    }
}

/// Tangent identification at a rim point derived from the embedding: the side frame is
/// `(t, e_z)` and the development rotates each cap about the rim tangent `t` onto the
/// side's plane, so the cap's inward normal continues the side's outward vertical.
fn rim_map(from: Chart, to: Chart, alpha: f64, v: [f64; 2]) -> [f64; 2] {
    let t = [-alpha.sin(), alpha.cos()];
    let inward = [-alpha.cos(), -alpha.sin()];
    let away = |cap: Chart| if cap == Chart::Top { 1.0 } else { -1.0 };
    let to_dev = |c: Chart, v: [f64; 2]| match c {
        Chart::Side => v,
        cap => [
            v[0] * t[0] + v[1] * t[1],
            away(cap) * (v[0] * inward[0] + v[1] * inward[1]),
        ],
    };
    let from_dev = |c: Chart, d: [f64; 2]| match c {
        Chart::Side => d,
        cap => {
            let n = away(cap) * d[1];
            [d[0] * t[0] + n * inward[0], d[0] * t[1] + n * inward[1]]
        }
    };
    from_dev(to, to_dev(from, v))
}

fn seg_dir(c: &Cylinder<f64>, s: &Segment<f64>) -> Option<[f64; 2]> {
    let d = match s.chart {
        Chart::Side => [c.radius() * (s.end[0] - s.start[0]), s.end[1] - s.start[1]],
        _ => [s.end[0] - s.start[0], s.end[1] - s.start[1]],
    };
    let n = d[0].hypot(d[1]);
    (n > 1e-12).then(|| [d[0] / n, d[1] / n])
}

fn rim_angle(p: &SurfacePoint<f64>) -> f64 {
    match p.chart {
        Chart::Side => p.local[0],
        _ => p.local[1].atan2(p.local[0]),
    }
}

#[test]
fn cylinder_paths_are_straight_in_the_development() {
    let mut r = rng(61);
    let mut crossing_paths = 0;
    for (rad, h) in [(1.0, 0.5), (1.0, 0.1)] {
        let c = Cylinder::new(rad, h).unwrap();
        for _ in 0..150 {
            let (p, q) = (
                cylinder_point(&mut r, &c, 1e-3),
                cylinder_point(&mut r, &c, 1e-3),
            );
            let g = c.geodesic(&p, &q).unwrap();
            let segs = &g.path.segments;
            let total: f64 = segs.iter().map(|s| c.segment_length(s)).sum();
            assert!((total - g.length).abs() <= 1e-12);
            if segs.len() > 1 {
                crossing_paths += 1;
            }
            // carry each segment direction back across the rims to the first chart
            let mut prev: Option<(Chart, [f64; 2])> = None;
            for (i, s) in segs.iter().enumerate() {
                let start = c.embed(&SurfacePoint::new(s.chart, s.start)).unwrap();
                if i > 0 {
                    let prev_end = segs[i - 1];
                    let e = c
                        .embed(&SurfacePoint::new(prev_end.chart, prev_end.end))
                        .unwrap();
                    assert!(chord(start, e) <= 1e-12, "segments do not join");
                }
                let Some(d) = seg_dir(&c, s) else { continue };
                if let Some((pc, pd)) = prev {
                    let alpha = rim_angle(&g.path.crossings[i - 1]);
                    let carried = rim_map(pc, s.chart, alpha, pd);
                    let res = (carried[0] - d[0]).hypot(carried[1] - d[1]);
                    assert!(res <= 1e-9, "bend of {res} at crossing {i}: {p:?} -> {q:?}");
                }
                prev = Some((s.chart, d));
            }
        }
    }
    assert!(crossing_paths > 50);
}

#[test]
fn first_variation_trend() {
    let cube = Cube::new();
    let mut r = rng(71);
    let mut checked = 0;
    while checked < 20 {
        let (x, y, z) = (
            cube_point(&mut r, 0.05),
            cube_point(&mut r, 0.05),
            cube_point(&mut r, 0.05),
        );
        let gy = cube.geodesic(&x, &y).unwrap();
        let gz = cube.geodesic(&x, &z).unwrap();
        if !gy.is_unique(1e-3) || !gz.is_unique(1e-3) || gy.length < 0.1 || gz.length < 0.1 {
            continue;
        }
        let theta = angle_between(&cube.log(&x, &y).unwrap(), &cube.log(&x, &z).unwrap()).unwrap();
        let dzx = cube.distance(&z, &x).unwrap();
        let res = |t: f64| {
            let m = cube.geodesic_point(&x, &y, t).unwrap();
            (cube.distance(&z, &m).unwrap() - dzx) / (t * gy.length) + theta.cos()
        };
        let (r2, r4) = (res(1e-2).abs(), res(1e-4).abs());
        assert!(r4 <= r2 + 1e-6, "no convergence: {r2} -> {r4}");
        assert!(r4 <= 1e-2);
        checked += 1;
    }
}

#[test]
fn shortcut_route_beats_helix() {
    let c = Cylinder::new(1.0, 0.1).unwrap();
    let (g, route) = c
        .cyl_distance(
            &SurfacePoint::side(0.0, 0.0),
            &SurfacePoint::side(std::f64::consts::PI, 0.0),
        )
        .unwrap();
    assert!(g.length < std::f64::consts::PI);
    assert_eq!(route.unwrap().class, RouteClass::SideCapSide);
}
