//! Triangulations of domains with boundary-arc markers.

mod io;

use std::collections::BTreeMap;

use spade::{
    AngleLimit, ConstrainedDelaunayTriangulation, Point2, RefinementParameters, Triangulation,
};
use thiserror::Error;

use crate::domain::{ArcGeometry, ArcKind, DomainSpec};
use crate::geom::{self, Point};

pub use io::{read_jsmesh, write_jsmesh};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("invalid mesh parameter: {0}")]
    InvalidParameter(String),
    #[error("mesh size {h} is not smaller than the shortest arc '{arc}' (length {length})")]
    TooCoarse { h: f64, arc: String, length: f64 },
    #[error("boundary approximation self-intersects between arcs '{first}' and '{second}'")]
    SelfIntersecting { first: String, second: String },
    #[error("triangulation failed: {0}")]
    Triangulation(String),
    #[error("inconsistent mesh: {0}")]
    Inconsistent(String),
    #[error("jsmesh line {line}: {message}")]
    Parse { line: usize, message: String },
}

/// What a mesh vertex lies on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Marker {
    Interior,
    /// Interior point of boundary arc `arc`.
    OnArc(usize),
    /// Domain vertex `k` (an arc endpoint).
    DomainVertex(usize),
}

/// Oriented boundary edge `a → b` (domain on the left) on arc `arc`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub a: usize,
    pub b: usize,
    pub arc: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub vertices: Vec<Point>,
    /// Counterclockwise vertex triples.
    pub triangles: Vec<[usize; 3]>,
    pub boundary_edges: Vec<BoundaryEdge>,
    pub markers: Vec<Marker>,
    /// Nominal mesh size.
    pub h: f64,
    /// Arc ids, indexed by the arc numbers in markers and edges.
    pub arc_ids: Vec<String>,
    /// Arc geometry for projecting refined boundary points; absent for meshes read from file.
    pub arc_geometry: Option<Vec<ArcGeometry>>,
}

impl TriMesh {
    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn triangle_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        geom::triangle_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.triangles.len()).map(|t| self.triangle_area(t)).sum()
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        self.markers[v] != Marker::Interior
    }

    pub fn interior_nodes(&self) -> Vec<usize> {
        (0..self.vertices.len())
            .filter(|&v| !self.is_boundary(v))
            .collect()
    }

    /// Undirected edges `(i, j)` with `i < j`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut e: Vec<(usize, usize)> = self
            .triangles
            .iter()
            .flat_map(|&[a, b, c]| [(a, b), (b, c), (c, a)])
            .map(|(i, j)| (i.min(j), i.max(j)))
            .collect();
        e.sort_unstable();
        e.dedup();
        e
    }

    /// Triangle quality: smallest interior angle in degrees.
    pub fn min_angle_deg(&self) -> f64 {
        let mut best = 180.0f64;
        for t in 0..self.triangles.len() {
            let p = self.triangle_points(t);
            for i in 0..3 {
                let (a, b, c) = (p[i], p[(i + 1) % 3], p[(i + 2) % 3]);
                let (u, v) = (b - a, c - a);
                let ang = u.cross(v).abs().atan2(u.dot(v)).to_degrees();
                best = best.min(ang);
            }
        }
        best
    }

    /// Positive orientation, closed boundary loop, and markers consistent with edges.
    pub fn check(&self) -> Result<(), MeshError> {
        let n = self.vertices.len();
        for (t, tri) in self.triangles.iter().enumerate() {
            if tri.iter().any(|&v| v >= n) {
                return Err(MeshError::Inconsistent(format!("triangle {t} indexes past the vertex list")));
            }
            if !(self.triangle_area(t) > 0.0) {
                return Err(MeshError::Inconsistent(format!("triangle {t} is not positively oriented")));
            }
        }
        let mut count: BTreeMap<(usize, usize), i32> = BTreeMap::new();
        for &[a, b, c] in &self.triangles {
            for (i, j) in [(a, b), (b, c), (c, a)] {
                *count.entry((i, j)).or_default() += 1;
                if count.contains_key(&(j, i)) && count[&(i, j)] > 1 {
                    return Err(MeshError::Inconsistent(format!("edge {i}-{j} is repeated")));
                }
            }
        }
        let mut open: Vec<(usize, usize)> = count
            .keys()
            .filter(|(i, j)| !count.contains_key(&(*j, *i)))
            .copied()
            .collect();
        open.sort_unstable();
        let mut listed: Vec<(usize, usize)> =
            self.boundary_edges.iter().map(|e| (e.a, e.b)).collect();
        listed.sort_unstable();
        if open != listed {
            return Err(MeshError::Inconsistent(
                "boundary edges do not match the triangulation's free edges".into(),
            ));
        }
        for e in &self.boundary_edges {
            for v in [e.a, e.b] {
                match self.markers[v] {
                    Marker::Interior => {
                        return Err(MeshError::Inconsistent(format!("boundary vertex {v} is marked interior")))
                    }
                    Marker::OnArc(k) if k != e.arc => {
                        return Err(MeshError::Inconsistent(format!(
                            "vertex {v} is marked on arc {k} but bounds an edge of arc {}",
                            e.arc
                        )))
                    }
                    _ => {}
                }
            }
        }
        Ok(())
    }
}

fn to_point(p: Point2<f64>) -> Point {
    Point::new(p.x, p.y)
}

/// Conforming triangulation of `spec` with target size `h` in the interior and
/// `h / grading` within `2h` of A and B arcs.
pub fn generate_mesh(spec: &DomainSpec, h: f64, grading: f64) -> Result<TriMesh, MeshError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(MeshError::InvalidParameter(format!("h must be positive, got {h}")));
    }
    if !(grading >= 1.0 && grading.is_finite()) {
        return Err(MeshError::InvalidParameter(format!("grading must be at least 1, got {grading}")));
    }
    for a in &spec.arcs {
        let length = a.geometry.euclidean_length();
        if h >= length {
            return Err(MeshError::TooCoarse {
                h,
                arc: a.id.clone(),
                length,
            });
        }
    }
    let fine = h / grading;
    let blow_up: Vec<&ArcGeometry> = spec
        .arcs
        .iter()
        .filter(|a| a.kind != ArcKind::C)
        .map(|a| &a.geometry)
        .collect();

    // boundary loop
    let mut ring = Vec::new();
    let mut ring_arc = Vec::new();
    for (k, a) in spec.arcs.iter().enumerate() {
        let step = if a.kind == ArcKind::C { h } else { fine };
        let pts = match &a.geometry {
            ArcGeometry::Sampled { .. } => a.geometry.discretize(step),
            g => g.sample_uniform(((g.euclidean_length() / step) * (1.0 - 1e-12)).ceil().max(1.0) as usize),
        };
        for p in &pts[..pts.len() - 1] {
            ring.push(*p);
            ring_arc.push(k);
        }
    }

    // lattice seeds, finer near blow-up arcs
    let dist_blow = |p: Point| {
        blow_up
            .iter()
            .map(|g| g.distance(p))
            .fold(f64::INFINITY, f64::min)
    };
    let mut seeds = Vec::new();
    let (lo, hi) = bounds(&ring);
    // axis-aligned square lattice: right isosceles triangles, structured on aligned rectangles
    let lattice = |spacing: f64, lo: Point, hi: Point, out: &mut Vec<(Point, f64)>| {
        let rows = ((hi.y - lo.y) / spacing).ceil() as usize + 1;
        let cols = ((hi.x - lo.x) / spacing).ceil() as usize + 1;
        for r in 0..rows {
            for c in 0..cols {
                let p = Point::new(lo.x + c as f64 * spacing, lo.y + r as f64 * spacing);
                out.push((p, spacing));
            }
        }
    };
    let mut cand = Vec::new();
    lattice(h, lo, hi, &mut cand);
    for (p, s) in cand {
        if grading > 1.0 && dist_blow(p) <= 2.0 * h {
            continue;
        }
        seeds.push((p, s));
    }
    if grading > 1.0 && !blow_up.is_empty() {
        let pts: Vec<Point> = blow_up.iter().flat_map(|g| g.sample_uniform(64)).collect();
        let (blo, bhi) = bounds(&pts);
        let pad = Point::new(2.0 * h, 2.0 * h);
        let mut cand = Vec::new();
        // anchor on the coarse lattice so both grids share lines
        let snap = |v: f64, o: f64| o + ((v - o) / h).floor() * h;
        let start = Point::new(snap(blo.x - pad.x, lo.x), snap(blo.y - pad.y, lo.y));
        lattice(fine, start, bhi + pad, &mut cand);
        seeds.extend(cand.into_iter().filter(|(p, _)| dist_blow(*p) <= 2.0 * h));
    }
    let seeds: Vec<Point> = seeds
        .into_iter()
        .filter(|(p, s)| {
            geom::winding_number(*p, &ring) != 0 && geom::point_ring_distance(*p, &ring) >= 0.5 * s
        })
        .map(|(p, _)| p)
        .collect();

    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::new();
    let mut handles = Vec::with_capacity(ring.len());
    for p in &ring {
        handles.push(
            cdt.insert(Point2::new(p.x, p.y))
                .map_err(|e| MeshError::Triangulation(format!("{e:?}")))?,
        );
    }
    let m = handles.len();
    for i in 0..m {
        let (a, b) = (handles[i], handles[(i + 1) % m]);
        if !cdt.can_add_constraint(a, b) {
            let other = (0..m)
                .find(|&j| {
                    j != i
                        && (j + 1) % m != i
                        && (i + 1) % m != j
                        && geom::segments_intersect(ring[i], ring[(i + 1) % m], ring[j], ring[(j + 1) % m], 0.0)
                })
                .map_or(ring_arc[i], |j| ring_arc[j]);
            return Err(MeshError::SelfIntersecting {
                first: spec.arcs[ring_arc[i]].id.clone(),
                second: spec.arcs[other].id.clone(),
            });
        }
        cdt.add_constraint(a, b);
    }
    for p in &seeds {
        cdt.insert(Point2::new(p.x, p.y))
            .map_err(|e| MeshError::Triangulation(format!("{e:?}")))?;
    }
    let result = cdt.refine(
        RefinementParameters::new()
            .with_angle_limit(AngleLimit::from_deg(20.0))
            .with_max_allowed_area(h * h)
            .with_max_additional_vertices(2_000_000)
            .exclude_outer_faces(true),
    );
    if !result.refinement_complete {
        return Err(MeshError::Triangulation("refinement did not complete".into()));
    }
    let excluded: std::collections::BTreeSet<usize> =
        result.excluded_faces.iter().map(|f| f.index()).collect();

    let mut raw_tris = Vec::new();
    for f in cdt.inner_faces() {
        if excluded.contains(&f.fix().index()) {
            continue;
        }
        let vs = f.vertices();
        raw_tris.push([vs[0].fix().index(), vs[1].fix().index(), vs[2].fix().index()]);
    }
    let positions: Vec<Point> = cdt.vertices().map(|v| to_point(v.position())).collect();
    let mut remap = vec![usize::MAX; positions.len()];
    let mut vertices = Vec::new();
    for v in 0..positions.len() {
        if raw_tris.iter().any(|t| t.contains(&v)) {
            remap[v] = vertices.len();
            vertices.push(positions[v]);
        }
    }
    let mut triangles: Vec<[usize; 3]> = raw_tris
        .iter()
        .map(|t| [remap[t[0]], remap[t[1]], remap[t[2]]])
        .collect();
    for t in &mut triangles {
        if geom::orient(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0 {
            t.swap(1, 2);
        }
    }
    let geoms: Vec<ArcGeometry> = spec.arcs.iter().map(|a| a.geometry.clone()).collect();
    assemble(spec, vertices, triangles, h, geoms)
}

fn bounds(pts: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

/// Free (boundary) edges of a triangle list, oriented as in their triangle.
fn free_edges(triangles: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let mut directed = std::collections::BTreeSet::new();
    for &[a, b, c] in triangles {
        for e in [(a, b), (b, c), (c, a)] {
            directed.insert(e);
        }
    }
    directed
        .iter()
        .filter(|(i, j)| !directed.contains(&(*j, *i)))
        .copied()
        .collect()
}

/// Derives markers and the ordered boundary loop, projecting boundary Steiner points onto their arcs.
fn assemble(
    spec: &DomainSpec,
    mut vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    h: f64,
    geoms: Vec<ArcGeometry>,
) -> Result<TriMesh, MeshError> {
    let free = free_edges(&triangles);
    let nearest_arc = |p: Point| -> usize {
        let mut best = (f64::INFINITY, 0);
        for (k, g) in geoms.iter().enumerate() {
            let d = g.distance(p);
            if d < best.0 {
                best = (d, k);
            }
        }
        best.1
    };
    let mut markers = vec![Marker::Interior; vertices.len()];
    let mut edges = Vec::with_capacity(free.len());
    for &(a, b) in &free {
        let arc = nearest_arc(vertices[a].lerp(vertices[b], 0.5));
        edges.push(BoundaryEdge { a, b, arc });
        for v in [a, b] {
            if markers[v] == Marker::Interior {
                markers[v] = match spec.vertices.iter().position(|q| *q == vertices[v]) {
                    Some(k) => Marker::DomainVertex(k),
                    None => Marker::OnArc(arc),
                };
            }
        }
    }
    for (v, m) in markers.iter().enumerate() {
        if let Marker::OnArc(k) = m {
            vertices[v] = geoms[*k].project(vertices[v]);
        }
    }
    // chain the loop starting at domain vertex 0
    let next: BTreeMap<usize, BoundaryEdge> = edges.iter().map(|e| (e.a, *e)).collect();
    let start = markers
        .iter()
        .position(|m| *m == Marker::DomainVertex(0))
        .or_else(|| edges.first().map(|e| e.a))
        .ok_or_else(|| MeshError::Triangulation("mesh has no boundary".into()))?;
    let mut ordered = Vec::with_capacity(edges.len());
    let mut v = start;
    while ordered.len() < edges.len() {
        let e = *next
            .get(&v)
            .ok_or_else(|| MeshError::Inconsistent("boundary loop is broken".into()))?;
        ordered.push(e);
        v = e.b;
        if v == start {
            break;
        }
    }
    if ordered.len() != edges.len() {
        return Err(MeshError::Inconsistent(
            "boundary has more than one loop".into(),
        ));
    }
    let mesh = TriMesh {
        vertices,
        triangles,
        boundary_edges: ordered,
        markers,
        h,
        arc_ids: spec.arcs.iter().map(|a| a.id.clone()).collect(),
        arc_geometry: Some(geoms),
    };
    mesh.check()?;
    Ok(mesh)
}

/// Uniform 4-split through edge midpoints; boundary midpoints are projected
/// onto their arcs when the arc geometry is known.
pub fn refine(mesh: &TriMesh) -> TriMesh {
    let mut vertices = mesh.vertices.clone();
    let mut markers = mesh.markers.clone();
    let edge_arc: BTreeMap<(usize, usize), usize> = mesh
        .boundary_edges
        .iter()
        .map(|e| ((e.a.min(e.b), e.a.max(e.b)), e.arc))
        .collect();
    let mut mid: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (i, j) in mesh.edges() {
        let mut p = vertices[i].lerp(vertices[j], 0.5);
        let marker = match edge_arc.get(&(i, j)) {
            Some(&k) => {
                if let Some(g) = &mesh.arc_geometry {
                    p = g[k].project(p);
                }
                Marker::OnArc(k)
            }
            None => Marker::Interior,
        };
        mid.insert((i, j), vertices.len());
        vertices.push(p);
        markers.push(marker);
    }
    let m = |i: usize, j: usize| mid[&(i.min(j), i.max(j))];
    let mut triangles = Vec::with_capacity(4 * mesh.triangles.len());
    for &[a, b, c] in &mesh.triangles {
        let (ab, bc, ca) = (m(a, b), m(b, c), m(c, a));
        triangles.push([a, ab, ca]);
        triangles.push([ab, b, bc]);
        triangles.push([ca, bc, c]);
        triangles.push([ab, bc, ca]);
    }
    let boundary_edges = mesh
        .boundary_edges
        .iter()
        .flat_map(|e| {
            let x = m(e.a, e.b);
            [
                BoundaryEdge { a: e.a, b: x, arc: e.arc },
                BoundaryEdge { a: x, b: e.b, arc: e.arc },
            ]
        })
        .collect();
    TriMesh {
        vertices,
        triangles,
        boundary_edges,
        markers,
        h: 0.5 * mesh.h,
        arc_ids: mesh.arc_ids.clone(),
        arc_geometry: mesh.arc_geometry.clone(),
    }
}

/// Triangles covering the closed polygon `ring` (counterclockwise or not),
/// with areas at most `max_area`.
pub fn triangulate_ring(ring: &[Point], max_area: f64) -> Result<Vec<[Point; 3]>, MeshError> {
    let mut cdt: ConstrainedDelaunayTriangulation<Point2<f64>> =
        ConstrainedDelaunayTriangulation::new();
    let mut hs = Vec::with_capacity(ring.len());
    for p in ring {
        hs.push(
            cdt.insert(Point2::new(p.x, p.y))
                .map_err(|e| MeshError::Triangulation(format!("{e:?}")))?,
        );
    }
    for i in 0..hs.len() {
        let (a, b) = (hs[i], hs[(i + 1) % hs.len()]);
        if !cdt.can_add_constraint(a, b) {
            return Err(MeshError::Triangulation("polygon ring self-intersects".into()));
        }
        cdt.add_constraint(a, b);
    }
    let result = cdt.refine(
        RefinementParameters::new()
            .with_angle_limit(AngleLimit::from_deg(20.0))
            .with_max_allowed_area(max_area)
            .with_max_additional_vertices(1_000_000)
            .exclude_outer_faces(true),
    );
    let excluded: std::collections::BTreeSet<usize> =
        result.excluded_faces.iter().map(|f| f.index()).collect();
    Ok(cdt
        .inner_faces()
        .filter(|f| !excluded.contains(&f.fix().index()))
        .map(|f| {
            let [a, b, c] = f.positions();
            [to_point(a), to_point(b), to_point(c)]
        })
        .collect())
}
