//! The `jsmesh 1` text format.
//!
//! ```text
//! jsmesh 1
//! V <count>
//! <x> <y> <interior | arc:<id> | vertex:<k>>
//! T <count>
//! <i> <j> <k>
//! E <count>
//! <i> <j> <arc-id>
//! ```
//!
//! Coordinates use Rust's shortest round-trip float formatting, so a written
//! mesh reads back bit-identically. The nominal size of a mesh read from file
//! is its longest edge.

use std::fmt::Write as _;

use super::{BoundaryEdge, Marker, MeshError, TriMesh};
use crate::geom::Point;

pub fn write_jsmesh(mesh: &TriMesh) -> String {
    let mut s = String::new();
    s.push_str("jsmesh 1\n");
    let _ = writeln!(s, "V {}", mesh.vertices.len());
    for (p, m) in mesh.vertices.iter().zip(&mesh.markers) {
        let tag = match m {
            Marker::Interior => "interior".to_string(),
            Marker::OnArc(k) => format!("arc:{}", mesh.arc_ids[*k]),
            Marker::DomainVertex(k) => format!("vertex:{k}"),
        };
        let _ = writeln!(s, "{} {} {}", p.x, p.y, tag);
    }
    let _ = writeln!(s, "T {}", mesh.triangles.len());
    for [a, b, c] in &mesh.triangles {
        let _ = writeln!(s, "{a} {b} {c}");
    }
    let _ = writeln!(s, "E {}", mesh.boundary_edges.len());
    for e in &mesh.boundary_edges {
        let _ = writeln!(s, "{} {} {}", e.a, e.b, mesh.arc_ids[e.arc]);
    }
    s
}

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn next(&mut self) -> Result<(usize, &'a str), MeshError> {
        for (i, l) in self.inner.by_ref() {
            let l = l.trim();
            if !l.is_empty() {
                return Ok((i + 1, l));
            }
        }
        Err(MeshError::Parse {
            line: 0,
            message: "unexpected end of file".into(),
        })
    }
}

fn err(line: usize, message: impl Into<String>) -> MeshError {
    MeshError::Parse {
        line,
        message: message.into(),
    }
}

fn section(lines: &mut Lines, tag: &str) -> Result<usize, MeshError> {
    let (n, l) = lines.next()?;
    let mut it = l.split_whitespace();
    if it.next() != Some(tag) {
        return Err(err(n, format!("expected section '{tag}'")));
    }
    it.next()
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| err(n, format!("section '{tag}' needs a count")))
}

pub fn read_jsmesh(text: &str) -> Result<TriMesh, MeshError> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
    };
    let (n, header) = lines.next()?;
    if header != "jsmesh 1" {
        return Err(err(n, "expected header 'jsmesh 1'"));
    }
    let mut arc_ids: Vec<String> = Vec::new();
    let mut arc_index = |id: &str| -> usize {
        match arc_ids.iter().position(|a| a == id) {
            Some(k) => k,
            None => {
                arc_ids.push(id.to_string());
                arc_ids.len() - 1
            }
        }
    };

    let nv = section(&mut lines, "V")?;
    let mut vertices = Vec::with_capacity(nv);
    let mut raw_markers = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines.next()?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(n, "vertex lines are 'x y marker'"));
        }
        let x: f64 = f[0].parse().map_err(|_| err(n, "bad x coordinate"))?;
        let y: f64 = f[1].parse().map_err(|_| err(n, "bad y coordinate"))?;
        vertices.push(Point::new(x, y));
        raw_markers.push((n, f[2].to_string()));
    }
    let nt = section(&mut lines, "T")?;
    let mut triangles = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (n, l) = lines.next()?;
        let f: Vec<usize> = l
            .split_whitespace()
            .map(|s| s.parse().map_err(|_| err(n, "bad triangle index")))
            .collect::<Result<_, _>>()?;
        if f.len() != 3 || f.iter().any(|&i| i >= nv) {
            return Err(err(n, "triangle lines are three vertex indices"));
        }
        triangles.push([f[0], f[1], f[2]]);
    }
    let ne = section(&mut lines, "E")?;
    let mut boundary_edges = Vec::with_capacity(ne);
    for _ in 0..ne {
        let (n, l) = lines.next()?;
        let f: Vec<&str> = l.split_whitespace().collect();
        if f.len() != 3 {
            return Err(err(n, "edge lines are 'i j arc-id'"));
        }
        let a: usize = f[0].parse().map_err(|_| err(n, "bad edge index"))?;
        let b: usize = f[1].parse().map_err(|_| err(n, "bad edge index"))?;
        if a >= nv || b >= nv {
            return Err(err(n, "edge index out of range"));
        }
        boundary_edges.push(BoundaryEdge {
            a,
            b,
            arc: arc_index(f[2]),
        });
    }
    let mut markers = Vec::with_capacity(nv);
    for (n, m) in raw_markers {
        markers.push(if m == "interior" {
            Marker::Interior
        } else if let Some(id) = m.strip_prefix("arc:") {
            Marker::OnArc(arc_index(id))
        } else if let Some(k) = m.strip_prefix("vertex:") {
            Marker::DomainVertex(k.parse().map_err(|_| err(n, "bad domain vertex index"))?)
        } else {
            return Err(err(n, format!("unknown marker '{m}'")));
        });
    }
    if let Ok((n, _)) = lines.next() {
        return Err(err(n, "trailing content"));
    }
    let h = triangles
        .iter()
        .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
        .map(|(i, j)| vertices[i].dist(vertices[j]))
        .fold(0.0, f64::max);
    let mesh = TriMesh {
        vertices,
        triangles,
        boundary_edges,
        markers,
        h,
        arc_ids,
        arc_geometry: None,
    };
    mesh.check()?;
    Ok(mesh)
}
