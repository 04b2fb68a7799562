//! Domains with labeled boundary arcs, admissible polygons, and the
//! structural checks for the minimal, CMC and translating problems.

mod check;
mod geodesic;
mod polygon;
mod validate;

use std::f64::consts::TAU;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Expr, ExprError};
use crate::geom::{self, Point};
use crate::metric::{self, ConformalMetric, MetricError, MetricSpec, NormalSide};

pub use check::{
    check_cmc, check_minimal, check_translating, Certificate, CheckReport, GlobalRecord,
    HypothesisRecord, ModeTag, PolygonRecord, Requirement, Slack, Verdict, SIGN_CONVENTION,
};
pub use geodesic::{shoot_geodesic, GeodesicPath};
pub use polygon::{
    enumerate_admissible_polygons, enumerate_with_cap, AdmissiblePolygon, PolygonMeasures,
    PolygonSide, SideGeometry, DEFAULT_VERTEX_CAP,
};
pub use validate::{validate_domain, ArcValidation, ValidationReport};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DomainError {
    #[error("malformed domain JSON at line {line}, column {column}: {message}")]
    Json {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("arc '{arc}': {source}")]
    Expr { arc: String, source: ExprError },
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error("domain has no arcs")]
    Empty,
    #[error("duplicate arc id '{0}'")]
    DuplicateId(String),
    #[error("arc '{0}' is of kind C but carries no data expression")]
    MissingData(String),
    #[error("arc '{0}' is a blow-up arc (A/B) and must not carry data")]
    UnexpectedData(String),
    #[error("arc '{arc}': invalid geometry: {reason}")]
    BadGeometry { arc: String, reason: String },
    #[error("boundary is open between arcs '{from}' and '{to}' (gap {gap:e})")]
    OpenBoundary { from: String, to: String, gap: f64 },
    #[error("boundary self-intersects between arcs '{first}' and '{second}'")]
    SelfIntersection { first: String, second: String },
    #[error("boundary is not counterclockwise (signed area {area})")]
    Clockwise { area: f64 },
    #[error("two {kind} arcs share endpoint: '{first}' and '{second}'")]
    AdjacentBlowUp {
        kind: ArcKind,
        first: String,
        second: String,
    },
    #[error("arc '{arc}' is not geodesic: max |κ_σ| = {max_kappa:e}")]
    NonGeodesic { arc: String, max_kappa: f64 },
    #[error("C arc '{arc}' is not convex toward the domain: min κ_σ = {min_kappa:e}")]
    NonConvex { arc: String, min_kappa: f64 },
    #[error("{count} domain vertices exceed the enumeration cap of {cap}")]
    TooManyVertices { count: usize, cap: usize },
    #[error("polygon enumeration exceeded its search budget")]
    EnumerationBudget,
    #[error("unsupported mode: {0}")]
    UnsupportedMode(String),
    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),
    #[error("unknown arc id '{0}'")]
    UnknownArc(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("internal consistency check failed: {0}")]
    Internal(String),
}

/// Boundary behaviour of a Jenkins-Serrin arc.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ArcKind {
    /// `u → +∞`
    A,
    /// `u → −∞`
    B,
    /// continuous data
    C,
}

impl fmt::Display for ArcKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ArcKind::A => "A",
            ArcKind::B => "B",
            ArcKind::C => "C",
        };
        f.write_str(s)
    }
}

/// Which structural theorem a check or validation is run against.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CheckMode {
    Minimal,
    Cmc { h: f64 },
    Translating,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArcGeometry {
    Segment {
        p: Point,
        q: Point,
    },
    CircularArc {
        center: Point,
        radius: f64,
        from_angle: f64,
        to_angle: f64,
        ccw: bool,
    },
    Sampled {
        points: Vec<Point>,
    },
}

impl ArcGeometry {
    /// Signed angular sweep of a circular arc (positive when counterclockwise).
    fn sweep(from: f64, to: f64, ccw: bool) -> f64 {
        if ccw {
            let s = (to - from).rem_euclid(TAU);
            if s == 0.0 {
                TAU
            } else {
                s
            }
        } else {
            let s = (from - to).rem_euclid(TAU);
            -(if s == 0.0 { TAU } else { s })
        }
    }

    pub fn start(&self) -> Point {
        self.point_at(0.0)
    }

    pub fn end(&self) -> Point {
        self.point_at(1.0)
    }

    /// Point at normalized arclength parameter `t ∈ [0, 1]`.
    pub fn point_at(&self, t: f64) -> Point {
        match self {
            ArcGeometry::Segment { p, q } => {
                if t == 1.0 {
                    *q
                } else {
                    p.lerp(*q, t)
                }
            }
            ArcGeometry::CircularArc {
                center,
                radius,
                from_angle,
                to_angle,
                ccw,
            } => {
                let th = from_angle + t * Self::sweep(*from_angle, *to_angle, *ccw);
                *center + Point::new(th.cos(), th.sin()) * *radius
            }
            ArcGeometry::Sampled { points } => {
                if t <= 0.0 {
                    return points[0];
                }
                if t >= 1.0 {
                    return *points.last().unwrap();
                }
                let total = self.euclidean_length();
                let mut target = t * total;
                for w in points.windows(2) {
                    let l = w[0].dist(w[1]);
                    if target <= l && l > 0.0 {
                        return w[0].lerp(w[1], target / l);
                    }
                    target -= l;
                }
                *points.last().unwrap()
            }
        }
    }

    pub fn euclidean_length(&self) -> f64 {
        match self {
            ArcGeometry::Segment { p, q } => p.dist(*q),
            ArcGeometry::CircularArc {
                radius,
                from_angle,
                to_angle,
                ccw,
                ..
            } => radius * Self::sweep(*from_angle, *to_angle, *ccw).abs(),
            ArcGeometry::Sampled { points } => points.windows(2).map(|w| w[0].dist(w[1])).sum(),
        }
    }

    /// Points along the arc with Euclidean spacing at most `step`, endpoints exact.
    /// Segments are never subdivided beyond their endpoints unless `step` requires it.
    pub fn discretize(&self, step: f64) -> Vec<Point> {
        match self {
            ArcGeometry::Sampled { points } => {
                let mut out = vec![points[0]];
                for w in points.windows(2) {
                    let n = ((w[0].dist(w[1]) / step).ceil() as usize).max(1);
                    for i in 1..=n {
                        out.push(if i == n {
                            w[1]
                        } else {
                            w[0].lerp(w[1], i as f64 / n as f64)
                        });
                    }
                }
                out
            }
            _ => {
                let n = ((self.euclidean_length() / step).ceil() as usize).max(1);
                self.sample_uniform(n)
            }
        }
    }

    /// `n + 1` points at uniform arclength parameter.
    pub fn sample_uniform(&self, n: usize) -> Vec<Point> {
        let n = n.max(1);
        (0..=n)
            .map(|i| {
                if i == n {
                    self.end()
                } else {
                    self.point_at(i as f64 / n as f64)
                }
            })
            .collect()
    }

    /// Closest point of the arc to `p`.
    pub fn project(&self, p: Point) -> Point {
        match self {
            ArcGeometry::Segment { p: a, q: b } => geom::project_to_segment(p, *a, *b),
            ArcGeometry::CircularArc {
                center,
                radius,
                from_angle,
                to_angle,
                ccw,
            } => {
                let sweep = Self::sweep(*from_angle, *to_angle, *ccw);
                let d = p - *center;
                let ang = d.y.atan2(d.x);
                // parameter of ang along the sweep direction
                let rel = if sweep > 0.0 {
                    (ang - from_angle).rem_euclid(TAU)
                } else {
                    (from_angle - ang).rem_euclid(TAU)
                };
                if rel <= sweep.abs() {
                    if d.norm() == 0.0 {
                        return self.start();
                    }
                    return *center + d * (*radius / d.norm());
                }
                let (s, e) = (self.start(), self.end());
                if p.dist(s) <= p.dist(e) {
                    s
                } else {
                    e
                }
            }
            ArcGeometry::Sampled { points } => {
                let mut best = points[0];
                let mut bd = f64::INFINITY;
                for w in points.windows(2) {
                    let q = geom::project_to_segment(p, w[0], w[1]);
                    let d = p.dist(q);
                    if d < bd {
                        bd = d;
                        best = q;
                    }
                }
                best
            }
        }
    }

    pub fn distance(&self, p: Point) -> f64 {
        p.dist(self.project(p))
    }

    /// `½ ∫ (x dy − y dx)` along the arc; summing over a closed boundary gives its signed area.
    pub fn green_area(&self) -> f64 {
        match self {
            ArcGeometry::Segment { p, q } => 0.5 * p.cross(*q),
            ArcGeometry::CircularArc {
                center,
                radius,
                from_angle,
                to_angle,
                ccw,
            } => {
                let sw = Self::sweep(*from_angle, *to_angle, *ccw);
                circular_green(*center, *radius, *from_angle, sw)
            }
            ArcGeometry::Sampled { points } => {
                0.5 * points.windows(2).map(|w| w[0].cross(w[1])).sum::<f64>()
            }
        }
    }

    /// Whether the arc is a straight segment up to `tol`.
    pub fn is_straight(&self, tol: f64) -> bool {
        match self {
            ArcGeometry::Segment { .. } => true,
            ArcGeometry::CircularArc { .. } => false,
            ArcGeometry::Sampled { points } => {
                let (a, b) = (points[0], *points.last().unwrap());
                points
                    .iter()
                    .all(|p| geom::point_segment_distance(*p, a, b) <= tol)
            }
        }
    }

    pub fn reversed(&self) -> ArcGeometry {
        match self {
            ArcGeometry::Segment { p, q } => ArcGeometry::Segment { p: *q, q: *p },
            ArcGeometry::CircularArc {
                center,
                radius,
                from_angle,
                to_angle,
                ccw,
            } => ArcGeometry::CircularArc {
                center: *center,
                radius: *radius,
                from_angle: *to_angle,
                to_angle: *from_angle,
                ccw: !ccw,
            },
            ArcGeometry::Sampled { points } => ArcGeometry::Sampled {
                points: points.iter().rev().copied().collect(),
            },
        }
    }

    fn scaled(&self, s: f64) -> ArcGeometry {
        match self {
            ArcGeometry::Segment { p, q } => ArcGeometry::Segment {
                p: *p * s,
                q: *q * s,
            },
            ArcGeometry::CircularArc {
                center,
                radius,
                from_angle,
                to_angle,
                ccw,
            } => ArcGeometry::CircularArc {
                center: *center * s,
                radius: radius * s,
                from_angle: *from_angle,
                to_angle: *to_angle,
                ccw: *ccw,
            },
            ArcGeometry::Sampled { points } => ArcGeometry::Sampled {
                points: points.iter().map(|p| *p * s).collect(),
            },
        }
    }

    fn check(&self) -> Result<(), String> {
        match self {
            ArcGeometry::Segment { p, q } => {
                if !(p.is_finite() && q.is_finite()) || p == q {
                    return Err("segment endpoints must be finite and distinct".into());
                }
            }
            ArcGeometry::CircularArc {
                center,
                radius,
                from_angle,
                to_angle,
                ..
            } => {
                if !(center.is_finite() && radius.is_finite() && *radius > 0.0) {
                    return Err("circular arc needs a finite center and positive radius".into());
                }
                if !(from_angle.is_finite() && to_angle.is_finite()) {
                    return Err("circular arc angles must be finite".into());
                }
            }
            ArcGeometry::Sampled { points } => {
                if points.len() < 2 || points.iter().any(|p| !p.is_finite()) {
                    return Err("sampled arc needs at least two finite points".into());
                }
                if points.windows(2).any(|w| w[0] == w[1]) {
                    return Err("sampled arc has coincident consecutive points".into());
                }
            }
        }
        Ok(())
    }
}

/// `½ ∫ (x dy − y dx)` over the circular arc starting at angle `from` with signed sweep `sweep`.
pub(crate) fn circular_green(center: Point, radius: f64, from: f64, sweep: f64) -> f64 {
    let to = from + sweep;
    0.5 * (radius * (center.x * (to.sin() - from.sin()) - center.y * (to.cos() - from.cos()))
        + radius * radius * sweep)
}

/// One labeled boundary arc.
#[derive(Debug, Clone, PartialEq)]
pub struct Arc {
    pub id: String,
    pub kind: ArcKind,
    pub geometry: ArcGeometry,
    /// Boundary data `f(x, y)`; present exactly for C arcs.
    pub data: Option<Expr>,
}

impl Arc {
    /// Metric length of the arc.
    pub fn length(&self, metric: &ConformalMetric) -> Result<f64, MetricError> {
        if metric.is_euclidean() {
            return Ok(self.geometry.euclidean_length());
        }
        let pts = match &self.geometry {
            ArcGeometry::Sampled { points } if points.len() > 256 => points.clone(),
            g => g.sample_uniform(512),
        };
        metric::metric_length(&pts, metric)
    }

    /// Geodesic curvature samples `(point, κ_σ)` w.r.t. the normal on `side`.
    ///
    /// Straight segments use the exact Euclidean curvature 0; circular and
    /// sampled arcs use the three-point estimate at `samples` interior points.
    pub fn curvature_samples(
        &self,
        metric: &ConformalMetric,
        side: NormalSide,
        samples: usize,
    ) -> Result<Vec<(Point, f64)>, MetricError> {
        match &self.geometry {
            ArcGeometry::Segment { p, q } => {
                let t = *q - *p;
                let mut n = t.perp() * (1.0 / t.norm());
                if side == NormalSide::Right {
                    n = -n;
                }
                (1..=samples)
                    .map(|i| {
                        let x = p.lerp(*q, i as f64 / (samples + 1) as f64);
                        Ok((x, metric::conformal_curvature(0.0, x, n, metric)?))
                    })
                    .collect()
            }
            ArcGeometry::CircularArc { .. } => {
                let pts = self.geometry.sample_uniform(samples + 1);
                (1..pts.len() - 1)
                    .map(|i| Ok((pts[i], metric::geodesic_curvature(&pts, metric, i, side)?)))
                    .collect()
            }
            ArcGeometry::Sampled { points } => {
                let pts = if points.len() >= 3 {
                    points.clone()
                } else {
                    // two-point polyline: a straight segment
                    return Arc {
                        geometry: ArcGeometry::Segment {
                            p: points[0],
                            q: points[1],
                        },
                        ..self.clone()
                    }
                    .curvature_samples(metric, side, samples);
                };
                (1..pts.len() - 1)
                    .map(|i| Ok((pts[i], metric::geodesic_curvature(&pts, metric, i, side)?)))
                    .collect()
            }
        }
    }
}

/// A bounded domain described by its counterclockwise boundary arcs.
#[derive(Debug, Clone)]
pub struct DomainSpec {
    pub name: String,
    pub metric: ConformalMetric,
    pub arcs: Vec<Arc>,
    /// Arc endpoints: vertex `i` is the start of arc `i` and the end of arc `i − 1`.
    pub vertices: Vec<Point>,
}

impl DomainSpec {
    pub fn new(
        name: impl Into<String>,
        metric: ConformalMetric,
        arcs: Vec<Arc>,
    ) -> Result<Self, DomainError> {
        if arcs.is_empty() {
            return Err(DomainError::Empty);
        }
        let mut seen = std::collections::BTreeSet::new();
        for a in &arcs {
            if a.id.is_empty() || a.id.chars().any(char::is_whitespace) {
                return Err(DomainError::InvalidParameter(format!(
                    "arc id '{}' must be non-empty without whitespace",
                    a.id
                )));
            }
            if !seen.insert(a.id.clone()) {
                return Err(DomainError::DuplicateId(a.id.clone()));
            }
            a.geometry.check().map_err(|reason| DomainError::BadGeometry {
                arc: a.id.clone(),
                reason,
            })?;
            match (a.kind, &a.data) {
                (ArcKind::C, None) => return Err(DomainError::MissingData(a.id.clone())),
                (ArcKind::A | ArcKind::B, Some(_)) => {
                    return Err(DomainError::UnexpectedData(a.id.clone()))
                }
                _ => {}
            }
        }
        let vertices = arcs.iter().map(|a| a.geometry.start()).collect();
        Ok(Self {
            name: name.into(),
            metric,
            arcs,
            vertices,
        })
    }

    /// Parse the domain JSON format.
    pub fn from_json_str(text: &str) -> Result<Self, DomainError> {
        let file: DomainFile = serde_json::from_str(text).map_err(|e| DomainError::Json {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })?;
        file.into_spec()
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&DomainFile::from_spec(self)).expect("domain serializes")
    }

    pub fn arc_index(&self, id: &str) -> Result<usize, DomainError> {
        self.arcs
            .iter()
            .position(|a| a.id == id)
            .ok_or_else(|| DomainError::UnknownArc(id.to_string()))
    }

    pub fn has_kind(&self, kind: ArcKind) -> bool {
        self.arcs.iter().any(|a| a.kind == kind)
    }

    /// Closed boundary polyline (no repeated closing point) with, for each
    /// point, the arc it starts a piece of. Segments keep only their endpoints.
    pub fn boundary_ring(&self, step: f64) -> (Vec<Point>, Vec<usize>) {
        let mut pts = Vec::new();
        let mut owner = Vec::new();
        for (k, a) in self.arcs.iter().enumerate() {
            let d = match &a.geometry {
                ArcGeometry::Segment { p, q } => vec![*p, *q],
                g => g.discretize(step),
            };
            for p in &d[..d.len() - 1] {
                pts.push(*p);
                owner.push(k);
            }
        }
        (pts, owner)
    }

    /// Euclidean diameter of the boundary.
    pub fn euclidean_diameter(&self) -> f64 {
        let step = self.euclidean_perimeter() / 256.0;
        let (ring, _) = self.boundary_ring(step);
        geom::diameter(&ring)
    }

    pub fn euclidean_perimeter(&self) -> f64 {
        self.arcs.iter().map(|a| a.geometry.euclidean_length()).sum()
    }

    /// Length scale used for numerical slacks: the largest metric length of a
    /// straight segment between boundary samples (the diameter for Euclidean domains).
    pub fn length_scale(&self) -> Result<f64, MetricError> {
        if self.metric.is_euclidean() {
            return Ok(self.euclidean_diameter());
        }
        let step = self.euclidean_perimeter() / 96.0;
        let (ring, _) = self.boundary_ring(step);
        let mut best: f64 = 0.0;
        for (i, p) in ring.iter().enumerate() {
            for q in &ring[i + 1..] {
                best = best.max(metric::segment_length(*p, *q, &self.metric)?);
            }
        }
        Ok(best)
    }

    /// Signed Euclidean area enclosed by the boundary.
    pub fn euclidean_area(&self) -> f64 {
        self.arcs.iter().map(|a| a.geometry.green_area()).sum()
    }

    /// Copy with every coordinate multiplied by `s` (Euclidean metric only).
    pub fn scaled(&self, s: f64) -> Result<Self, DomainError> {
        if !self.metric.is_euclidean() {
            return Err(DomainError::UnsupportedMode(
                "scaling is defined for Euclidean domains only".into(),
            ));
        }
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc {
                geometry: a.geometry.scaled(s),
                ..a.clone()
            })
            .collect();
        Self::new(self.name.clone(), self.metric.clone(), arcs)
    }

    /// Copy with every A arc relabeled B and vice versa.
    pub fn swapped_blow_up(&self) -> Self {
        let arcs = self
            .arcs
            .iter()
            .map(|a| Arc {
                kind: match a.kind {
                    ArcKind::A => ArcKind::B,
                    ArcKind::B => ArcKind::A,
                    ArcKind::C => ArcKind::C,
                },
                ..a.clone()
            })
            .collect();
        Self {
            arcs,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct DomainFile {
    name: String,
    metric: MetricSpec,
    arcs: Vec<ArcFile>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ArcFile {
    id: String,
    kind: ArcKind,
    geometry: ArcGeometry,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    data: Option<String>,
}

impl DomainFile {
    fn into_spec(self) -> Result<DomainSpec, DomainError> {
        let metric = ConformalMetric::from_spec(&self.metric)?;
        let arcs = self
            .arcs
            .into_iter()
            .map(|a| {
                let data = match a.data {
                    Some(src) => Some(Expr::parse(&src).map_err(|source| DomainError::Expr {
                        arc: a.id.clone(),
                        source,
                    })?),
                    None => None,
                };
                Ok(Arc {
                    id: a.id,
                    kind: a.kind,
                    geometry: a.geometry,
                    data,
                })
            })
            .collect::<Result<Vec<_>, DomainError>>()?;
        DomainSpec::new(self.name, metric, arcs)
    }

    fn from_spec(spec: &DomainSpec) -> Self {
        DomainFile {
            name: spec.name.clone(),
            metric: spec.metric.to_spec(),
            arcs: spec
                .arcs
                .iter()
                .map(|a| ArcFile {
                    id: a.id.clone(),
                    kind: a.kind,
                    geometry: a.geometry.clone(),
                    data: a.data.as_ref().map(|e| e.source().to_string()),
                })
                .collect(),
        }
    }
}

/// Builders for domains used throughout tests and examples.
pub mod presets {
    use super::*;

    fn arc(id: &str, kind: ArcKind, geometry: ArcGeometry, data: Option<&str>) -> Arc {
        Arc {
            id: id.into(),
            kind,
            geometry,
            data: data.map(|s| Expr::parse(s).expect("preset expression parses")),
        }
    }

    /// Straight-sided polygonal domain from counterclockwise vertices; side `i`
    /// joins vertex `i` to vertex `i + 1` and gets `kinds[i]`. C sides carry `data`.
    pub fn polygon(
        name: &str,
        vertices: &[Point],
        kinds: &[ArcKind],
        data: &str,
    ) -> Result<DomainSpec, DomainError> {
        assert_eq!(vertices.len(), kinds.len());
        let n = vertices.len();
        let arcs = (0..n)
            .map(|i| {
                let d = (kinds[i] == ArcKind::C).then_some(data);
                arc(
                    &format!("s{i}"),
                    kinds[i],
                    ArcGeometry::Segment {
                        p: vertices[i],
                        q: vertices[(i + 1) % n],
                    },
                    d,
                )
            })
            .collect();
        DomainSpec::new(name, ConformalMetric::euclidean(), arcs)
    }

    /// Axis-aligned rectangle `[x0, x1] × [y0, y1]`; sides bottom, right, top, left.
    pub fn rectangle(
        name: &str,
        (x0, x1): (f64, f64),
        (y0, y1): (f64, f64),
        kinds: [ArcKind; 4],
        data: &str,
    ) -> Result<DomainSpec, DomainError> {
        polygon(
            name,
            &[
                Point::new(x0, y0),
                Point::new(x1, y0),
                Point::new(x1, y1),
                Point::new(x0, y1),
            ],
            &kinds,
            data,
        )
    }

    /// Disk bounded by one full circular C arc carrying `data`.
    pub fn disk(name: &str, center: Point, radius: f64, data: &str) -> Result<DomainSpec, DomainError> {
        DomainSpec::new(
            name,
            ConformalMetric::euclidean(),
            vec![arc(
                "circle",
                ArcKind::C,
                ArcGeometry::CircularArc {
                    center,
                    radius,
                    from_angle: 0.0,
                    to_angle: std::f64::consts::TAU,
                    ccw: true,
                },
                Some(data),
            )],
        )
    }

    /// Scherk domain `(−a, a)²` with A on the left/right sides and B on top/bottom.
    pub fn scherk_square(a: f64) -> DomainSpec {
        use ArcKind::*;
        rectangle("scherk", (-a, a), (-a, a), [B, A, B, A], "0").expect("valid preset")
    }

    /// Lens bounded by two circular arcs of radius `radius` meeting at
    /// `(±radius·sin θ, 0)`; the upper arc has kind `upper`, the lower is C with `data`.
    pub fn lens(
        radius: f64,
        theta: f64,
        upper: ArcKind,
        upper_radius: f64,
        data: &str,
    ) -> Result<DomainSpec, DomainError> {
        let half = radius * theta.sin();
        // upper arc: from (half, 0) to (−half, 0), bulging upward
        let up_off = (upper_radius * upper_radius - half * half).sqrt();
        let up_center = Point::new(0.0, -up_off);
        let a0 = (0.0f64 - up_center.y).atan2(half);
        let upper_arc = ArcGeometry::CircularArc {
            center: up_center,
            radius: upper_radius,
            from_angle: a0,
            to_angle: std::f64::consts::PI - a0,
            ccw: true,
        };
        let lo_center = Point::new(0.0, radius * theta.cos());
        let b0 = (0.0f64 - lo_center.y).atan2(-half);
        let lower_arc = ArcGeometry::CircularArc {
            center: lo_center,
            radius,
            from_angle: b0,
            to_angle: (0.0f64 - lo_center.y).atan2(half),
            ccw: true,
        };
        let upper_data = (upper == ArcKind::C).then_some(data);
        DomainSpec::new(
            "lens",
            ConformalMetric::euclidean(),
            vec![
                arc("upper", upper, upper_arc, upper_data),
                arc("lower", ArcKind::C, lower_arc, Some(data)),
            ],
        )
    }
}
