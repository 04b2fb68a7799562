//! Enumeration of admissible polygons.
//!
//! Vertices come from the domain vertex set; sides are geodesic chords
//! (minimal and translating modes) or circular arcs of curvature ±H (CMC
//! mode). A side that runs along a boundary arc is reported as that arc.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use super::{shoot_geodesic, ArcGeometry, ArcKind, CheckMode, DomainError, DomainSpec};
use crate::geom::{self, Point};
use crate::metric::{self, MetricError, NormalSide};

pub const DEFAULT_VERTEX_CAP: usize = 16;
const SEARCH_BUDGET: usize = 5_000_000;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SideGeometry {
    /// Runs along boundary arc `arc` in the boundary direction.
    Boundary { arc: usize },
    /// Straight Euclidean chord.
    Chord,
    /// Numerically computed geodesic of a conformal metric.
    Geodesic { points: Vec<Point> },
    /// Minor circular arc; `inward` when its center lies on the polygon's interior side.
    CircularArc {
        center: Point,
        radius: f64,
        inward: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolygonSide {
    pub from: usize,
    pub to: usize,
    pub geometry: SideGeometry,
}

impl PolygonSide {
    /// Exact curve of the side, directed from `from` to `to`.
    pub fn curve(&self, spec: &DomainSpec) -> ArcGeometry {
        let (a, b) = (spec.vertices[self.from], spec.vertices[self.to]);
        match &self.geometry {
            SideGeometry::Boundary { arc } => spec.arcs[*arc].geometry.clone(),
            SideGeometry::Chord => ArcGeometry::Segment { p: a, q: b },
            SideGeometry::Geodesic { points } => ArcGeometry::Sampled {
                points: points.clone(),
            },
            SideGeometry::CircularArc { center, radius, .. } => {
                minor_arc(*center, *radius, a, b)
            }
        }
    }

    pub fn metric_length(&self, spec: &DomainSpec) -> Result<f64, MetricError> {
        match &self.geometry {
            SideGeometry::Boundary { arc } => spec.arcs[*arc].length(&spec.metric),
            SideGeometry::Chord => metric::segment_length(
                spec.vertices[self.from],
                spec.vertices[self.to],
                &spec.metric,
            ),
            SideGeometry::Geodesic { points } => metric::metric_length(points, &spec.metric),
            SideGeometry::CircularArc { .. } => {
                let c = self.curve(spec);
                if spec.metric.is_euclidean() {
                    Ok(c.euclidean_length())
                } else {
                    metric::metric_length(&c.sample_uniform(512), &spec.metric)
                }
            }
        }
    }
}

/// The minor arc of the circle `(center, radius)` from `a` to `b`.
fn minor_arc(center: Point, radius: f64, a: Point, b: Point) -> ArcGeometry {
    let (u, v) = (a - center, b - center);
    let sweep = u.cross(v).atan2(u.dot(v));
    ArcGeometry::CircularArc {
        center,
        radius,
        from_angle: u.y.atan2(u.x),
        to_angle: v.y.atan2(v.x),
        ccw: sweep > 0.0,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissiblePolygon {
    pub vertex_indices: Vec<usize>,
    pub sides: Vec<PolygonSide>,
    pub is_whole_boundary: bool,
    /// Some side is a chord fallback for a geodesic that could not be computed.
    pub indeterminate: bool,
}

/// Lengths and area of a polygon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PolygonMeasures {
    pub alpha: f64,
    pub beta: f64,
    pub perimeter: f64,
    pub area: f64,
}

impl AdmissiblePolygon {
    /// Compact identifier: vertex indices with side codes
    /// (`b` boundary, `c` chord, `g` geodesic, `+`/`-` arc bending in/out).
    pub fn id(&self) -> String {
        if self.is_whole_boundary {
            return "boundary".into();
        }
        let mut s = String::from("P[");
        for side in &self.sides {
            s.push_str(&side.from.to_string());
            s.push(match side.geometry {
                SideGeometry::Boundary { .. } => 'b',
                SideGeometry::Chord => 'c',
                SideGeometry::Geodesic { .. } => 'g',
                SideGeometry::CircularArc { inward: true, .. } => '+',
                SideGeometry::CircularArc { inward: false, .. } => '-',
            });
        }
        s.push(']');
        s
    }

    pub fn curves(&self, spec: &DomainSpec) -> Vec<ArcGeometry> {
        self.sides.iter().map(|s| s.curve(spec)).collect()
    }

    /// Closed ring through the sides, sampled with spacing at most `step`.
    pub fn ring(&self, spec: &DomainSpec, step: f64) -> Vec<Point> {
        let mut out = Vec::new();
        for c in self.curves(spec) {
            let pts = match &c {
                ArcGeometry::Segment { p, q } => vec![*p, *q],
                g => g.discretize(step),
            };
            out.extend_from_slice(&pts[..pts.len() - 1]);
        }
        out
    }

    /// α, β, ℓ and Area of the polygon in the domain's metric.
    pub fn measure(&self, spec: &DomainSpec) -> Result<PolygonMeasures, DomainError> {
        let scale = spec.length_scale()?;
        let curves = self.curves(spec);
        let on_tol = if spec.metric.is_euclidean() {
            1e-9 * scale
        } else {
            1e-6 * scale
        };
        let mut alpha = 0.0;
        let mut beta = 0.0;
        for (k, arc) in spec.arcs.iter().enumerate() {
            if arc.kind == ArcKind::C {
                continue;
            }
            let on = self.is_whole_boundary
                || self
                    .sides
                    .iter()
                    .any(|s| s.geometry == SideGeometry::Boundary { arc: k })
                || arc_lies_on(&arc.geometry, &curves, on_tol);
            if on {
                let l = arc.length(&spec.metric)?;
                match arc.kind {
                    ArcKind::A => alpha += l,
                    ArcKind::B => beta += l,
                    ArcKind::C => {}
                }
            }
        }
        let perimeter = self
            .sides
            .iter()
            .map(|s| s.metric_length(spec))
            .sum::<Result<f64, _>>()?;
        let area = if spec.metric.is_euclidean() {
            curves.iter().map(|c| c.green_area()).sum::<f64>().abs()
        } else {
            let ring = self.ring(spec, spec.euclidean_perimeter() / 512.0);
            let diam = geom::diameter(&ring);
            let tris = crate::mesh::triangulate_ring(&ring, (diam / 48.0).powi(2))
                .map_err(|e| DomainError::InvalidParameter(e.to_string()))?;
            metric::metric_area_with(&tris, &spec.metric, metric::AreaRule::ThreePoint)?
        };
        Ok(PolygonMeasures {
            alpha,
            beta,
            perimeter,
            area,
        })
    }
}

fn arc_lies_on(arc: &ArcGeometry, curves: &[ArcGeometry], tol: f64) -> bool {
    arc.sample_uniform(8)
        .iter()
        .all(|p| curves.iter().any(|c| c.distance(*p) <= tol))
}

/// A candidate side for an ordered vertex pair.
#[derive(Debug, Clone)]
struct Cand {
    side: SideGeometry,
    /// For boundary sides: whether the side follows the boundary direction.
    forward: bool,
    curve: ArcGeometry,
    poly: Vec<Point>,
    lo: Point,
    hi: Point,
    indeterminate: bool,
}

impl Cand {
    fn new(side: SideGeometry, curve: ArcGeometry, step: f64, indeterminate: bool) -> Self {
        let poly = match &curve {
            ArcGeometry::Segment { p, q } => vec![*p, *q],
            g => g.discretize(step),
        };
        let (lo, hi) = bbox(&poly);
        Self {
            side,
            forward: true,
            curve,
            poly,
            lo,
            hi,
            indeterminate,
        }
    }

    fn reversed(&self) -> Self {
        let side = match &self.side {
            SideGeometry::Geodesic { points } => SideGeometry::Geodesic {
                points: points.iter().rev().copied().collect(),
            },
            SideGeometry::CircularArc {
                center,
                radius,
                inward,
            } => SideGeometry::CircularArc {
                center: *center,
                radius: *radius,
                inward: !inward,
            },
            other => other.clone(),
        };
        Self {
            side,
            forward: !self.forward,
            curve: self.curve.reversed(),
            poly: self.poly.iter().rev().copied().collect(),
            lo: self.lo,
            hi: self.hi,
            indeterminate: self.indeterminate,
        }
    }
}

fn bbox(pts: &[Point]) -> (Point, Point) {
    let mut lo = Point::new(f64::INFINITY, f64::INFINITY);
    let mut hi = Point::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
    for p in pts {
        lo = Point::new(lo.x.min(p.x), lo.y.min(p.y));
        hi = Point::new(hi.x.max(p.x), hi.y.max(p.y));
    }
    (lo, hi)
}

struct Enumerator<'a> {
    spec: &'a DomainSpec,
    mode: CheckMode,
    /// Domain vertex indices usable as polygon vertices.
    verts: Vec<usize>,
    /// `cands[a][b]`: candidate sides from local vertex `a` to local vertex `b`.
    cands: Vec<Vec<Vec<Cand>>>,
    eps_area: f64,
    tol: f64,
    compat: BTreeMap<(usize, usize, usize, usize, usize, usize), bool>,
    visited: usize,
}

/// All admissible polygons of `spec` in canonical order, `∂Ω` first.
pub fn enumerate_admissible_polygons(
    spec: &DomainSpec,
    mode: CheckMode,
) -> Result<Vec<AdmissiblePolygon>, DomainError> {
    enumerate_with_cap(spec, mode, DEFAULT_VERTEX_CAP)
}

pub fn enumerate_with_cap(
    spec: &DomainSpec,
    mode: CheckMode,
    vertex_cap: usize,
) -> Result<Vec<AdmissiblePolygon>, DomainError> {
    if let CheckMode::Cmc { h } = mode {
        if !spec.metric.is_euclidean() {
            return Err(DomainError::UnsupportedMode(
                "CMC polygons are defined for the Euclidean metric only".into(),
            ));
        }
        if !(h > 0.0 && h.is_finite()) {
            return Err(DomainError::InvalidParameter(format!("H must be positive, got {h}")));
        }
    }
    let n = spec.vertices.len();
    let verts: Vec<usize> = match mode {
        CheckMode::Cmc { .. } => (0..n)
            .filter(|&i| {
                let prev = (i + n - 1) % n;
                spec.arcs[i].kind != ArcKind::C || spec.arcs[prev].kind != ArcKind::C
            })
            .collect(),
        _ => (0..n).collect(),
    };
    if verts.len() > vertex_cap {
        return Err(DomainError::TooManyVertices {
            count: verts.len(),
            cap: vertex_cap,
        });
    }
    let scale = spec.length_scale()?;
    let mut e = Enumerator {
        spec,
        mode,
        cands: Vec::new(),
        eps_area: 1e-12 * scale * scale,
        tol: 1e-9 * scale,
        compat: BTreeMap::new(),
        visited: 0,
        verts,
    };
    e.build_candidates()?;

    let mut found = Vec::new();
    if e.convex_fast_path() {
        let m = e.verts.len();
        for mask in 1u32..(1u32 << m) {
            if mask.count_ones() < 3 {
                continue;
            }
            let cycle: Vec<(usize, usize)> = (0..m)
                .filter(|i| mask & (1 << i) != 0)
                .map(|i| (i, 0))
                .collect();
            found.push(cycle);
        }
    } else {
        e.search(&mut found)?;
    }

    let whole = whole_boundary(spec);
    let mut out = vec![whole];
    let mut seen = BTreeSet::new();
    for cycle in found {
        if let Some(p) = e.finish(&cycle)? {
            let key = format!("{:?}", (&p.vertex_indices, &p.sides));
            if seen.insert(key) {
                out.push(p);
            }
        }
    }
    let mut rest = out.split_off(1);
    rest.sort_by(|a, b| canonical_cmp(spec, a, b));
    out.extend(rest);
    Ok(out)
}

fn whole_boundary(spec: &DomainSpec) -> AdmissiblePolygon {
    let n = spec.arcs.len();
    AdmissiblePolygon {
        vertex_indices: (0..n).collect(),
        sides: (0..n)
            .map(|k| PolygonSide {
                from: k,
                to: (k + 1) % n,
                geometry: SideGeometry::Boundary { arc: k },
            })
            .collect(),
        is_whole_boundary: true,
        indeterminate: false,
    }
}

/// Orders polygons by size, then by their vertex coordinates read
/// counterclockwise from the lexicographically smallest one, then by side codes.
fn canonical_cmp(spec: &DomainSpec, a: &AdmissiblePolygon, b: &AdmissiblePolygon) -> Ordering {
    let coords = |p: &AdmissiblePolygon| -> Vec<Point> {
        let v: Vec<Point> = p.vertex_indices.iter().map(|&i| spec.vertices[i]).collect();
        let start = (0..v.len())
            .min_by(|&i, &j| cmp_point(v[i], v[j]))
            .unwrap_or(0);
        (0..v.len()).map(|k| v[(start + k) % v.len()]).collect()
    };
    let codes = |p: &AdmissiblePolygon| -> Vec<u8> {
        p.sides
            .iter()
            .map(|s| match s.geometry {
                SideGeometry::Boundary { .. } => 0,
                SideGeometry::Chord => 1,
                SideGeometry::Geodesic { .. } => 2,
                SideGeometry::CircularArc { inward: true, .. } => 3,
                SideGeometry::CircularArc { inward: false, .. } => 4,
            })
            .collect()
    };
    a.vertex_indices
        .len()
        .cmp(&b.vertex_indices.len())
        .then_with(|| {
            let (ca, cb) = (coords(a), coords(b));
            ca.iter()
                .zip(&cb)
                .map(|(p, q)| cmp_point(*p, *q))
                .find(|o| *o != Ordering::Equal)
                .unwrap_or(Ordering::Equal)
        })
        .then_with(|| {
            // side codes aligned with the same rotation
            let rot = |p: &AdmissiblePolygon| {
                let v: Vec<Point> = p.vertex_indices.iter().map(|&i| spec.vertices[i]).collect();
                let start = (0..v.len())
                    .min_by(|&i, &j| cmp_point(v[i], v[j]))
                    .unwrap_or(0);
                let c = codes(p);
                (0..c.len()).map(|k| c[(start + k) % c.len()]).collect::<Vec<_>>()
            };
            rot(a).cmp(&rot(b))
        })
}

fn cmp_point(p: Point, q: Point) -> Ordering {
    p.x.total_cmp(&q.x).then(p.y.total_cmp(&q.y))
}

impl Enumerator<'_> {
    fn point(&self, local: usize) -> Point {
        self.spec.vertices[self.verts[local]]
    }

    fn sample_step(&self) -> f64 {
        (1.0f64 / 64.0).min(self.spec.euclidean_perimeter() / 1024.0)
    }

    fn build_candidates(&mut self) -> Result<(), DomainError> {
        let m = self.verts.len();
        let n = self.spec.vertices.len();
        let step = self.sample_step();
        let (ring, _) = self.spec.boundary_ring(self.spec.euclidean_perimeter() / 4096.0);
        let scale = self.spec.length_scale()?;
        let curv_slack = 1e-6 / scale;
        let mut cands = vec![vec![Vec::new(); m]; m];
        for a in 0..m {
            for b in a + 1..m {
                let (ia, ib) = (self.verts[a], self.verts[b]);
                let (pa, pb) = (self.point(a), self.point(b));
                let mut list: Vec<Cand> = Vec::new();
                // boundary arcs joining the two vertices (either direction)
                let mut arcs_ab = Vec::new();
                for (k, arc) in self.spec.arcs.iter().enumerate() {
                    let (s, t) = (k, (k + 1) % n);
                    if (s, t) == (ia, ib) || (s, t) == (ib, ia) {
                        arcs_ab.push((k, (s, t) == (ia, ib), arc));
                    }
                }
                match self.mode {
                    CheckMode::Minimal | CheckMode::Translating => {
                        let mut covered = false;
                        for &(k, forward, arc) in &arcs_ab {
                            let geodesic = if self.spec.metric.is_euclidean() {
                                arc.geometry.is_straight(self.tol)
                            } else {
                                let ks = arc.curvature_samples(
                                    &self.spec.metric,
                                    NormalSide::Left,
                                    64,
                                )?;
                                ks.iter().all(|x| x.1.abs() <= curv_slack)
                            };
                            if geodesic {
                                let c = Cand::new(
                                    SideGeometry::Boundary { arc: k },
                                    arc.geometry.clone(),
                                    step,
                                    false,
                                );
                                list.push(if forward { c } else { c.reversed() });
                                covered = true;
                                break;
                            }
                        }
                        if !covered {
                            if self.spec.metric.is_euclidean() {
                                list.push(Cand::new(
                                    SideGeometry::Chord,
                                    ArcGeometry::Segment { p: pa, q: pb },
                                    step,
                                    false,
                                ));
                            } else {
                                match shoot_geodesic(&self.spec.metric, pa, pb) {
                                    Some(g) => list.push(Cand::new(
                                        SideGeometry::Geodesic {
                                            points: g.points.clone(),
                                        },
                                        ArcGeometry::Sampled { points: g.points },
                                        step,
                                        false,
                                    )),
                                    None => list.push(Cand::new(
                                        SideGeometry::Chord,
                                        ArcGeometry::Segment { p: pa, q: pb },
                                        step,
                                        true,
                                    )),
                                }
                            }
                        }
                    }
                    CheckMode::Cmc { h } => {
                        let r = 1.0 / h;
                        let d = pa.dist(pb);
                        let mut geoms: Vec<(SideGeometry, ArcGeometry)> = Vec::new();
                        if d < 2.0 * r {
                            let mid = pa.lerp(pb, 0.5);
                            let off = (r * r - 0.25 * d * d).sqrt();
                            let nrm = (pb - pa).perp() * (1.0 / d);
                            for sgn in [1.0, -1.0] {
                                let c = mid + nrm * (sgn * off);
                                geoms.push((
                                    SideGeometry::CircularArc {
                                        center: c,
                                        radius: r,
                                        inward: geom::orient(pa, pb, c) > 0.0,
                                    },
                                    minor_arc(c, r, pa, pb),
                                ));
                            }
                        }
                        let mut boundary: Vec<Cand> = Vec::new();
                        for &(k, forward, arc) in &arcs_ab {
                            let dir = if forward {
                                arc.geometry.clone()
                            } else {
                                arc.geometry.reversed()
                            };
                            // replace a coincident arc candidate by the boundary arc
                            if let Some(pos) = geoms.iter().position(|(_, g)| {
                                dir.sample_uniform(8).iter().all(|p| g.distance(*p) <= self.tol)
                            }) {
                                geoms.remove(pos);
                            } else if arc.kind == ArcKind::C {
                                continue;
                            }
                            let c = Cand::new(
                                SideGeometry::Boundary { arc: k },
                                arc.geometry.clone(),
                                step,
                                false,
                            );
                            boundary.push(if forward { c } else { c.reversed() });
                        }
                        list.extend(boundary);
                        for (s, g) in geoms {
                            list.push(Cand::new(s, g, step, false));
                        }
                    }
                }
                list.retain(|c| self.contained(c, &ring));
                cands[b][a] = list.iter().map(Cand::reversed).collect();
                cands[a][b] = list;
            }
        }
        self.cands = cands;
        Ok(())
    }

    fn contained(&self, c: &Cand, ring: &[Point]) -> bool {
        let len = c.curve.euclidean_length();
        let n = ((len * 64.0).ceil() as usize).max(16);
        c.curve.sample_uniform(n).iter().all(|p| {
            self.spec
                .arcs
                .iter()
                .any(|a| a.geometry.distance(*p) <= self.tol)
                || geom::winding_number(*p, ring) != 0
        })
    }

    /// All vertices strictly convex in boundary order with every chord admissible.
    fn convex_fast_path(&self) -> bool {
        let m = self.verts.len();
        if !matches!(self.mode, CheckMode::Minimal | CheckMode::Translating)
            || !self.spec.metric.is_euclidean()
            || m != self.spec.vertices.len()
            || m < 3
        {
            return false;
        }
        let convex = (0..m).all(|i| {
            let (a, b, c) = (
                self.point((i + m - 1) % m),
                self.point(i),
                self.point((i + 1) % m),
            );
            geom::orient(a, b, c) > self.eps_area
        });
        convex && (0..m).all(|a| (0..m).all(|b| a == b || self.cands[a][b].len() == 1))
    }

    fn search(&mut self, found: &mut Vec<Vec<(usize, usize)>>) -> Result<(), DomainError> {
        let m = self.verts.len();
        let min_len = if matches!(self.mode, CheckMode::Cmc { .. }) { 2 } else { 3 };
        for s in 0..m {
            let mut path = vec![(s, usize::MAX)];
            let mut used = vec![false; m];
            used[s] = true;
            self.dfs(s, min_len, &mut path, &mut used, found)?;
        }
        Ok(())
    }

    /// `path[i] = (vertex, candidate index of the side arriving at it)`.
    fn dfs(
        &mut self,
        s: usize,
        min_len: usize,
        path: &mut Vec<(usize, usize)>,
        used: &mut [bool],
        found: &mut Vec<Vec<(usize, usize)>>,
    ) -> Result<(), DomainError> {
        self.visited += 1;
        if self.visited > SEARCH_BUDGET {
            return Err(DomainError::EnumerationBudget);
        }
        let m = self.verts.len();
        let last = path.last().unwrap().0;
        // try closing
        if path.len() >= min_len && (path.len() == 2 || path[1].0 < last) {
            for ci in 0..self.cands[last][s].len() {
                if self.side_fits(path, last, s, ci) {
                    let mut cyc: Vec<(usize, usize)> = path.clone();
                    cyc[0].1 = ci;
                    found.push(cyc);
                }
            }
        }
        for v in s + 1..m {
            if used[v] {
                continue;
            }
            for ci in 0..self.cands[last][v].len() {
                if !self.side_fits(path, last, v, ci) {
                    continue;
                }
                used[v] = true;
                path.push((v, ci));
                self.dfs(s, min_len, path, used, found)?;
                path.pop();
                used[v] = false;
            }
        }
        Ok(())
    }

    /// Whether side `u → v` (candidate `ci`) is compatible with every side on `path`.
    fn side_fits(
        &mut self,
        path: &[(usize, usize)],
        u: usize,
        v: usize,
        ci: usize,
    ) -> bool {
        let k = path.len();
        for i in 1..k {
            let (a, b, cj) = (path[i - 1].0, path[i].0, path[i].1);
            if !self.compatible((a, b, cj), (u, v, ci)) {
                return false;
            }
        }
        true
    }

    fn compatible(&mut self, s1: (usize, usize, usize), s2: (usize, usize, usize)) -> bool {
        let key = (s1.0, s1.1, s1.2, s2.0, s2.1, s2.2);
        if let Some(&r) = self.compat.get(&key) {
            return r;
        }
        let r = self.compute_compatible(s1, s2);
        self.compat.insert(key, r);
        r
    }

    fn compute_compatible(&self, s1: (usize, usize, usize), s2: (usize, usize, usize)) -> bool {
        let c1 = &self.cands[s1.0][s1.1][s1.2];
        let c2 = &self.cands[s2.0][s2.1][s2.2];
        let shared: Vec<usize> = [s1.0, s1.1]
            .into_iter()
            .filter(|x| *x == s2.0 || *x == s2.1)
            .collect();
        let straight_forbidden = !matches!(self.mode, CheckMode::Cmc { .. });
        for &v in &shared {
            let p = self.point(v);
            let d1 = if s1.1 == v { c1.poly[c1.poly.len() - 2] } else { c1.poly[1] } - p;
            let d2 = if s2.1 == v { c2.poly[c2.poly.len() - 2] } else { c2.poly[1] } - p;
            let cr = d1.cross(d2).abs();
            let collinear = cr <= 1e-12 * d1.norm() * d2.norm();
            if collinear && d1.dot(d2) > 0.0 {
                return false;
            }
            if collinear && straight_forbidden {
                return false;
            }
        }
        if c1.hi.x < c2.lo.x - self.tol
            || c2.hi.x < c1.lo.x - self.tol
            || c1.hi.y < c2.lo.y - self.tol
            || c2.hi.y < c1.lo.y - self.tol
        {
            return true;
        }
        let n1 = c1.poly.len() - 1;
        let n2 = c2.poly.len() - 1;
        // segment index touching vertex v on each polyline
        let touch = |s: (usize, usize, usize), n: usize, v: usize| -> usize {
            if s.0 == v {
                0
            } else if s.1 == v {
                n - 1
            } else {
                usize::MAX
            }
        };
        for i in 0..n1 {
            for j in 0..n2 {
                if shared
                    .iter()
                    .any(|&v| touch(s1, n1, v) == i && touch(s2, n2, v) == j)
                {
                    continue;
                }
                if geom::segments_intersect(
                    c1.poly[i],
                    c1.poly[i + 1],
                    c2.poly[j],
                    c2.poly[j + 1],
                    self.eps_area,
                ) {
                    return false;
                }
            }
        }
        true
    }

    /// Turns a found cycle into a counterclockwise polygon; `None` when it is
    /// degenerate or coincides with the whole boundary.
    fn finish(&self, cycle: &[(usize, usize)]) -> Result<Option<AdmissiblePolygon>, DomainError> {
        let k = cycle.len();
        let mut sides: Vec<(usize, usize, Cand)> = (0..k)
            .map(|i| {
                let (u, _) = cycle[i];
                let (v, ci) = cycle[(i + 1) % k];
                (u, v, self.cands[u][v][ci].clone())
            })
            .collect();
        let signed: f64 = sides.iter().map(|s| s.2.curve.green_area()).sum();
        if signed.abs() <= self.eps_area {
            return Ok(None);
        }
        if signed < 0.0 {
            sides = sides
                .into_iter()
                .rev()
                .map(|(u, v, c)| (v, u, c.reversed()))
                .collect();
        }
        // rotate so the smallest vertex index comes first
        let start = (0..k).min_by_key(|&i| sides[i].0).unwrap();
        sides.rotate_left(start);
        let curves: Vec<ArcGeometry> = sides.iter().map(|s| s.2.curve.clone()).collect();
        if self
            .spec
            .arcs
            .iter()
            .all(|a| arc_lies_on(&a.geometry, &curves, self.tol))
        {
            return Ok(None);
        }
        // a boundary arc traversed backwards would put Ω on the polygon's outside
        if sides
            .iter()
            .any(|s| matches!(s.2.side, SideGeometry::Boundary { .. }) && !s.2.forward)
        {
            return Ok(None);
        }
        let indeterminate = sides.iter().any(|s| s.2.indeterminate);
        let sides: Vec<PolygonSide> = sides
            .into_iter()
            .map(|(u, v, c)| PolygonSide {
                from: self.verts[u],
                to: self.verts[v],
                geometry: c.side,
            })
            .collect();
        Ok(Some(AdmissiblePolygon {
            vertex_indices: sides.iter().map(|s| s.from).collect(),
            sides,
            is_whole_boundary: false,
            indeterminate,
        }))
    }
}

#[cfg(test)]
mod tests {
    use super::super::presets::*;
    use super::*;
    use ArcKind::*;

    fn pt(x: f64, y: f64) -> Point {
        Point::new(x, y)
    }

    #[test]
    fn square_has_four_corner_triangles() {
        let d = rectangle("sq", (0.0, 1.0), (0.0, 1.0), [C, A, C, A], "0").unwrap();
        let ps = enumerate_admissible_polygons(&d, CheckMode::Minimal).unwrap();
        assert_eq!(ps.len(), 5);
        assert!(ps[0].is_whole_boundary);
        for p in &ps[1..] {
            assert_eq!(p.vertex_indices.len(), 3);
            let m = p.measure(&d).unwrap();
            assert!((m.perimeter - (2.0 + 2f64.sqrt())).abs() < 1e-14);
            assert!((m.area - 0.5).abs() < 1e-15);
            assert_eq!(m.alpha, 1.0);
        }
    }

    #[test]
    fn triangle_has_only_its_boundary() {
        let d = polygon("t", &[pt(0.0, 0.0), pt(1.0, 0.0), pt(0.0, 1.0)], &[C, A, C], "0").unwrap();
        let ps = enumerate_admissible_polygons(&d, CheckMode::Minimal).unwrap();
        assert_eq!(ps.len(), 1);
    }

    #[test]
    fn l_shape_excludes_exterior_chords() {
        let v = [
            pt(0.0, 0.0),
            pt(2.0, 0.0),
            pt(2.0, 1.0),
            pt(1.0, 1.0),
            pt(1.0, 2.0),
            pt(0.0, 2.0),
        ];
        let d = polygon("L", &v, &[C; 6], "0").unwrap();
        let ps = enumerate_admissible_polygons(&d, CheckMode::Minimal).unwrap();
        let ring: Vec<Point> = v.to_vec();
        for p in &ps {
            for s in &p.sides {
                let m = d.vertices[s.from].lerp(d.vertices[s.to], 0.5);
                assert!(
                    geom::winding_number(m, &ring) != 0 || geom::point_ring_distance(m, &ring) < 1e-12
                );
            }
        }
        // chord from (2,0) to (1,2) leaves the domain; (2,1) to (0,2) too
        assert!(!ps.iter().any(|p| p
            .sides
            .iter()
            .any(|s| (s.from, s.to) == (1, 4) || (s.from, s.to) == (4, 1))));
        assert!(ps.len() > 1);
    }

    #[test]
    fn collinear_vertex_yields_single_geometric_polygon() {
        // square with an extra vertex in the middle of the bottom side
        let v = [pt(0.0, 0.0), pt(0.5, 0.0), pt(1.0, 0.0), pt(1.0, 1.0), pt(0.0, 1.0)];
        let d = polygon("sq5", &v, &[A, C, C, C, C], "0").unwrap();
        let ps = enumerate_admissible_polygons(&d, CheckMode::Minimal).unwrap();
        // no polygon has a straight angle, and the whole square is not duplicated
        for p in &ps[1..] {
            let m = p.measure(&d).unwrap();
            assert!(m.area < 1.0 - 1e-12);
        }
        // triangle (0,0),(1,0),(1,1) counts the A arc along its bottom chord
        let t = ps
            .iter()
            .find(|p| p.vertex_indices == vec![0, 2, 3])
            .expect("triangle through the collinear side");
        assert_eq!(t.measure(&d).unwrap().alpha, 0.5);
    }

    #[test]
    fn lens_cmc_polygons() {
        let d = lens(1.0, 0.8, A, 1.0, "0").unwrap();
        let ps = enumerate_admissible_polygons(&d, CheckMode::Cmc { h: 1.0 }).unwrap();
        assert_eq!(ps.len(), 1);
        let m = ps[0].measure(&d).unwrap();
        assert!((m.alpha - 1.6).abs() < 1e-14);
        assert!((m.perimeter - 3.2).abs() < 1e-14);
    }

    #[test]
    fn cmc_requires_euclidean_metric() {
        let mut d = scherk_square(1.0);
        d.metric = crate::metric::ConformalMetric::poincare_disk(3.0).unwrap();
        assert!(matches!(
            enumerate_admissible_polygons(&d, CheckMode::Cmc { h: 1.0 }),
            Err(DomainError::UnsupportedMode(_))
        ));
    }

    #[test]
    fn vertex_cap_is_enforced() {
        let v: Vec<Point> = (0..20)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / 20.0;
                pt(t.cos(), t.sin())
            })
            .collect();
        let d = polygon("20", &v, &[C; 20], "0").unwrap();
        assert!(matches!(
            enumerate_admissible_polygons(&d, CheckMode::Minimal),
            Err(DomainError::TooManyVertices { count: 20, cap: 16 })
        ));
    }
}
