#![allow(dead_code)]

use std::f64::consts::TAU;

use fbsurf::cylinder::Cylinder;
use fbsurf::geometry::SurfacePoint;
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Uniform face, local coordinates kept `margin` away from the face boundary.
pub fn cube_point(rng: &mut impl Rng, margin: f64) -> SurfacePoint<f64> {
    let face = rng.gen_range(1..=6u8);
    SurfacePoint::face(
        face,
        rng.gen_range(margin..1.0 - margin),
        rng.gen_range(margin..1.0 - margin),
    )
}

/// Area-weighted point on the cylinder, `margin` away from the rims.
pub fn cylinder_point(rng: &mut impl Rng, c: &Cylinder<f64>, margin: f64) -> SurfacePoint<f64> {
    let (r, h) = (c.radius(), c.half_height());
    let side = TAU * r * 2.0 * h;
    let cap = std::f64::consts::PI * r * r;
    let pick = rng.gen_range(0.0..side + 2.0 * cap);
    if pick < side {
        return SurfacePoint::side(
            rng.gen_range(0.0..TAU),
            rng.gen_range(-h + margin..h - margin),
        );
    }
    loop {
        let u = rng.gen_range(-r..r);
        let v = rng.gen_range(-r..r);
        if u.hypot(v) <= r - margin {
            return if pick < side + cap {
                SurfacePoint::top(u, v)
            } else {
                SurfacePoint::bottom(u, v)
            };
        }
    }
}
