//! CSV layouts read by the plotting scripts. Numbers use the shortest decimal that
//! round-trips the binary value; rows end in `\n` and every file has a header.
//!
//! Point files: cube `x,y,z,face` (embedding and face 1..6); cylinder `r,angle,z,face`
//! (cylindrical coordinates of the embedding, face 0 top, 1 bottom, 2 side).

use std::fs::File;
use std::io::Write;
use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use fbsurf::cube::Cube;
use fbsurf::geometry::{Chart, GeodesicSpace, SurfaceKind};
use fbsurf::{Point, Surface};

pub fn num(x: f64) -> String {
    format!("{x}")
}

pub fn point_header(kind: SurfaceKind) -> [&'static str; 4] {
    match kind {
        SurfaceKind::Cube => ["x", "y", "z", "face"],
        SurfaceKind::Cylinder => ["r", "angle", "z", "face"],
    }
}

pub fn point_row(surface: &Surface, p: &Point) -> Result<[String; 4]> {
    let p = surface.canonicalize(p)?;
    let face = p.chart.code().to_string();
    Ok(match surface {
        Surface::Cube(_) => {
            let e = surface.embed(&p)?;
            [num(e[0]), num(e[1]), num(e[2]), face]
        }
        Surface::Cylinder(c) => match p.chart {
            Chart::Side => [num(c.radius()), num(p.local[0]), num(p.local[1]), face],
            _ => {
                let [u, v] = p.local;
                let z = surface.embed(&p)?[2];
                [num(u.hypot(v)), num(v.atan2(u)), num(z), face]
            }
        },
    })
}

/// Inverse of [`point_row`].
pub fn parse_point_row(surface: &Surface, row: &[&str]) -> Result<Point> {
    let [a, b, c, face] = row else {
        bail!("expected 4 columns, got {}", row.len());
    };
    let v = |t: &str| {
        t.parse::<f64>()
            .map_err(|_| anyhow!("`{t}` is not a number"))
    };
    let code: i64 = face
        .parse()
        .map_err(|_| anyhow!("`{face}` is not a face code"))?;
    let chart = Chart::from_code(surface.kind(), code)?;
    let (a, b, c) = (v(a)?, v(b)?, v(c)?);
    let p = match (surface, chart) {
        (Surface::Cube(_), Chart::Face(f)) => Point::new(chart, Cube::chart_of(f, [a, b, c])),
        (_, Chart::Side) => Point::side(b, c),
        _ => Point::new(chart, [a * b.cos(), a * b.sin()]),
    };
    surface.check_point(&p)?;
    Ok(p)
}

pub fn write_rows<W: Write>(
    out: W,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_file(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    write_rows(std::io::BufWriter::new(f), header, rows)
        .with_context(|| format!("writing {}", path.display()))
}

pub fn write_points(path: &Path, surface: &Surface, points: &[Point]) -> Result<()> {
    let rows = points
        .iter()
        .map(|p| point_row(surface, p).map(Vec::from))
        .collect::<Result<Vec<_>>>()?;
    write_file(path, &point_header(surface.kind()), rows)
}

pub fn read_points(path: &Path, surface: &Surface) -> Result<Vec<Point>> {
    let mut r =
        csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    if header != point_header(surface.kind()) {
        bail!("{}: unexpected header {header:?}", path.display());
    }
    r.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            let fields: Vec<&str> = rec.iter().collect();
            parse_point_row(surface, &fields)
                .with_context(|| format!("{} row {}", path.display(), i + 1))
        })
        .collect()
}
