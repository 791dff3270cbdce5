//! Text form of chart-coded points: `F3(0.25, 0.5)` for cube faces, `top(u, v)`,
//! `bottom(u, v)` and `side(phi, z)` for the cylinder.

use anyhow::{anyhow, bail, Result};
use fbsurf::geometry::{Chart, SurfaceKind};
use fbsurf::Point;

pub fn parse_point(kind: SurfaceKind, text: &str) -> Result<Point> {
    let s = text.trim();
    let open = s
        .find('(')
        .ok_or_else(|| anyhow!("point `{s}`: expected `chart(a, b)`"))?;
    let Some(args) = s[open + 1..].strip_suffix(')') else {
        bail!("point `{s}`: missing closing parenthesis");
    };
    let name = s[..open].trim();
    let chart = match (kind, name) {
        (SurfaceKind::Cylinder, "top") => Chart::Top,
        (SurfaceKind::Cylinder, "bottom") => Chart::Bottom,
        (SurfaceKind::Cylinder, "side") => Chart::Side,
        (SurfaceKind::Cube, _) => match name.strip_prefix('F').and_then(|k| k.parse::<u8>().ok()) {
            Some(k @ 1..=6) => Chart::Face(k),
            _ => bail!("point `{s}`: cube charts are F1 to F6"),
        },
        (SurfaceKind::Cylinder, _) => {
            bail!("point `{s}`: cylinder charts are top, bottom and side")
        }
    };
    let coords: Vec<&str> = args.split(',').map(str::trim).collect();
    let [a, b] = coords[..] else {
        bail!("point `{s}`: expected two coordinates");
    };
    let num = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| anyhow!("point `{s}`: `{t}` is not a number"))
    };
    Ok(Point::new(chart, [num(a)?, num(b)?]))
}

/// Inverse of [`parse_point`]; coordinates use the shortest round-trip decimal.
pub fn format_point(p: &Point) -> String {
    let [a, b] = p.local;
    match p.chart {
        Chart::Face(k) => format!("F{k}({a}, {b})"),
        Chart::Top => format!("top({a}, {b})"),
        Chart::Bottom => format!("bottom({a}, {b})"),
        Chart::Side => format!("side({a}, {b})"),
    }
}
