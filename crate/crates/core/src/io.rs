//! Text formats for point sets and results.
//!
//! Floats are written as `{:.16e}` (17 significant digits), which round-trips
//! every `f64` exactly.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::delaunay::SimplicialComplex;
use crate::error::{Error, Result};
use crate::hull::Hull;
use crate::points::PointSet;

pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Header line `# randgeo points d=<d> n=<n> seed=<seed>`, then one row per point.
pub fn write_points_csv(mut w: impl Write, points: &PointSet) -> Result<()> {
    writeln!(
        w,
        "# randgeo points d={} n={} seed={}",
        points.dim(),
        points.len(),
        points.seed()
    )?;
    let header: Vec<String> = (0..points.dim()).map(|k| format!("x{k}")).collect();
    writeln!(w, "{}", header.join(","))?;
    for p in points.iter() {
        let row: Vec<String> = p.iter().map(|&x| fmt_f64(x)).collect();
        writeln!(w, "{}", row.join(","))?;
    }
    Ok(())
}

fn header_field(line: &str, key: &str) -> Option<u64> {
    line.split_whitespace()
        .find_map(|t| t.strip_prefix(key)?.strip_prefix('=')?.parse().ok())
}

/// Reads the format of [`write_points_csv`]; the column header line is optional.
pub fn read_points_csv(r: impl BufRead) -> Result<PointSet> {
    let mut dim: Option<usize> = None;
    let mut seed = 0;
    let mut coords = Vec::new();
    for (k, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('#') {
            dim = dim.or(header_field(rest, "d").map(|d| d as usize));
            seed = header_field(rest, "seed").unwrap_or(seed);
            continue;
        }
        if line.starts_with('x') {
            continue;
        }
        let row = line
            .split(',')
            .map(|t| t.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::Parse(format!("line {}: {e}", k + 1)))?;
        match dim {
            None => dim = Some(row.len()),
            Some(d) if d != row.len() => {
                return Err(Error::Parse(format!(
                    "line {}: {} columns, expected {d}",
                    k + 1,
                    row.len()
                )))
            }
            _ => {}
        }
        coords.extend(row);
    }
    let dim = dim.ok_or_else(|| Error::Parse("no points".into()))?;
    PointSet::from_coords(dim, coords, seed)
}

/// Rows `i,j,weight` under that header.
pub fn write_edges_csv(mut w: impl Write, edges: impl IntoIterator<Item = (u32, u32, f64)>) -> Result<()> {
    writeln!(w, "i,j,weight")?;
    for (i, j, x) in edges {
        writeln!(w, "{i},{j},{}", fmt_f64(x))?;
    }
    Ok(())
}

/// Rows `v,<index>` for hull vertices (cycle order in the plane), then `f,i,j,k` for facets.
pub fn write_hull_csv(mut w: impl Write, hull: &Hull) -> Result<()> {
    writeln!(w, "kind,a,b,c")?;
    let vertices = match hull {
        Hull::Planar { vertices } | Hull::Spatial { vertices, .. } | Hull::Degenerate { vertices, .. } => vertices,
    };
    for v in vertices {
        writeln!(w, "v,{v}")?;
    }
    for [a, b, c] in hull.facets() {
        writeln!(w, "f,{a},{b},{c}")?;
    }
    Ok(())
}

#[derive(Serialize)]
struct HullJson<'a> {
    kind: &'static str,
    dim: usize,
    vertices: &'a [u32],
    facets: &'a [[u32; 3]],
}

pub fn write_hull_json(w: impl Write, hull: &Hull) -> Result<()> {
    let (kind, dim, vertices) = match hull {
        Hull::Planar { vertices } => ("planar", 2, vertices),
        Hull::Spatial { vertices, .. } => ("spatial", 3, vertices),
        Hull::Degenerate { dim, vertices } => ("degenerate", *dim, vertices),
    };
    write_json(
        w,
        &HullJson {
            kind,
            dim,
            vertices,
            facets: hull.facets(),
        },
    )
}

/// Rows `k,v0,...,vk` for the top simplices.
pub fn write_complex_csv(mut w: impl Write, c: &SimplicialComplex) -> Result<()> {
    for s in c.top_simplices() {
        let v: Vec<String> = s.vertices().iter().map(|x| x.to_string()).collect();
        writeln!(w, "{},{}", s.dim(), v.join(","))?;
    }
    Ok(())
}

pub fn write_complex_json(w: impl Write, c: &SimplicialComplex) -> Result<()> {
    let tops: Vec<Vec<u32>> = c.top_simplices().iter().map(|s| s.vertices().to_vec()).collect();
    write_json(w, &serde_json::json!({ "dim": c.dim(), "simplices": tops }))
}

/// Pretty JSON plus a trailing newline.
pub fn write_json(mut w: impl Write, value: &impl Serialize) -> Result<()> {
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::points::sample_points;

    #[test]
    fn points_round_trip() {
        let p = sample_points(50, 3, 77).unwrap();
        let mut buf = Vec::new();
        write_points_csv(&mut buf, &p).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# randgeo points d=3 n=50 seed=77\nx0,x1,x2\n"));
        let q = read_points_csv(&buf[..]).unwrap();
        assert_eq!(q, p);
    }

    #[test]
    fn bad_rows_rejected() {
        assert!(read_points_csv("0.1,0.2\n0.3\n".as_bytes()).is_err());
        assert!(read_points_csv("0.1,zz\n".as_bytes()).is_err());
        assert!(read_points_csv("".as_bytes()).is_err());
        assert!(read_points_csv("0.1,1.5\n".as_bytes()).is_err());
    }

    #[test]
    fn edges_and_hull_rows() {
        let mut buf = Vec::new();
        write_edges_csv(&mut buf, [(0, 3, 0.5)]).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "i,j,weight\n0,3,5.0000000000000000e-1\n");
        let mut buf = Vec::new();
        let h = Hull::Spatial {
            vertices: vec![0, 1, 2, 3],
            facets: vec![[0, 1, 2]],
        };
        write_hull_csv(&mut buf, &h).unwrap();
        assert!(String::from_utf8(buf).unwrap().ends_with("v,3\nf,0,1,2\n"));
    }
}
