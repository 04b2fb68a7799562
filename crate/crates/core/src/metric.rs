//! Conformal Riemannian metrics `σ = λ²(dx² + dy²)` on planar domains.
//!
//! Every length, area and curvature the rest of the crate reports goes
//! through this module, so the Euclidean case is special-cased to be exact.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{Expr, ExprError, Var};
use crate::geom::{self, Point};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("point ({x}, {y}) lies outside the metric's definition set")]
    OutsideDomain { x: f64, y: f64 },
    #[error("conformal factor is not positive at ({x}, {y}): {value}")]
    NonPositive { x: f64, y: f64, value: f64 },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid metric parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid conformal factor expression: {0}")]
    Expr(#[from] ExprError),
}

/// On-disk form of a metric, as it appears in domain files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MetricSpec {
    Euclidean {},
    PoincareDisk { radius: f64 },
    Custom { lambda: String },
}

#[derive(Debug, Clone)]
enum Kind {
    Euclidean,
    PoincareDisk { radius: f64 },
    Custom { lambda: Expr, dx: Expr, dy: Expr },
}

/// A conformal metric given by its positive conformal factor λ.
#[derive(Debug, Clone)]
pub struct ConformalMetric {
    kind: Kind,
}

impl Default for ConformalMetric {
    fn default() -> Self {
        Self::euclidean()
    }
}

impl ConformalMetric {
    pub fn euclidean() -> Self {
        Self {
            kind: Kind::Euclidean,
        }
    }

    /// Hyperbolic metric of curvature −1 on the disk of Euclidean radius `radius`,
    /// `λ = 2ρ / (ρ² − r²)`.
    pub fn poincare_disk(radius: f64) -> Result<Self, MetricError> {
        if !(radius.is_finite() && radius > 0.0) {
            return Err(MetricError::InvalidParameter(format!(
                "poincare_disk radius must be positive, got {radius}"
            )));
        }
        Ok(Self {
            kind: Kind::PoincareDisk { radius },
        })
    }

    pub fn custom(lambda: &str) -> Result<Self, MetricError> {
        let lambda = Expr::parse(lambda)?;
        let dx = lambda.derivative(Var::X);
        let dy = lambda.derivative(Var::Y);
        Ok(Self {
            kind: Kind::Custom { lambda, dx, dy },
        })
    }

    pub fn from_spec(spec: &MetricSpec) -> Result<Self, MetricError> {
        match spec {
            MetricSpec::Euclidean {} => Ok(Self::euclidean()),
            MetricSpec::PoincareDisk { radius } => Self::poincare_disk(*radius),
            MetricSpec::Custom { lambda } => Self::custom(lambda),
        }
    }

    pub fn to_spec(&self) -> MetricSpec {
        match &self.kind {
            Kind::Euclidean => MetricSpec::Euclidean {},
            Kind::PoincareDisk { radius } => MetricSpec::PoincareDisk { radius: *radius },
            Kind::Custom { lambda, .. } => MetricSpec::Custom {
                lambda: lambda.source().to_string(),
            },
        }
    }

    pub fn is_euclidean(&self) -> bool {
        matches!(self.kind, Kind::Euclidean)
    }

    /// Whether `p` lies in the set where λ is defined and positive.
    pub fn contains(&self, p: Point) -> bool {
        self.lambda(p).is_ok()
    }

    /// The conformal factor λ at `p`.
    pub fn lambda(&self, p: Point) -> Result<f64, MetricError> {
        if !p.is_finite() {
            return Err(MetricError::OutsideDomain { x: p.x, y: p.y });
        }
        match &self.kind {
            Kind::Euclidean => Ok(1.0),
            Kind::PoincareDisk { radius } => {
                let r2 = p.norm_sq();
                let rho2 = radius * radius;
                if r2 >= rho2 {
                    return Err(MetricError::OutsideDomain { x: p.x, y: p.y });
                }
                Ok(2.0 * radius / (rho2 - r2))
            }
            Kind::Custom { lambda, .. } => {
                let v = lambda.eval(p.x, p.y);
                if !v.is_finite() {
                    Err(MetricError::OutsideDomain { x: p.x, y: p.y })
                } else if v <= 0.0 {
                    Err(MetricError::NonPositive {
                        x: p.x,
                        y: p.y,
                        value: v,
                    })
                } else {
                    Ok(v)
                }
            }
        }
    }

    /// Euclidean gradient of `ln λ` at `p`.
    pub fn dlog_lambda(&self, p: Point) -> Result<Point, MetricError> {
        match &self.kind {
            Kind::Euclidean => Ok(Point::new(0.0, 0.0)),
            Kind::PoincareDisk { radius } => {
                self.lambda(p)?;
                let denom = radius * radius - p.norm_sq();
                Ok(p * (2.0 / denom))
            }
            Kind::Custom { dx, dy, .. } => {
                let lam = self.lambda(p)?;
                Ok(Point::new(dx.eval(p.x, p.y) / lam, dy.eval(p.x, p.y) / lam))
            }
        }
    }
}

const GAUSS3_NODES: [f64; 3] = [
    0.5 - 0.387_298_334_620_741_7,
    0.5,
    0.5 + 0.387_298_334_620_741_7,
];
const GAUSS3_WEIGHTS: [f64; 3] = [5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0];

/// Metric length of a single segment, 3-point Gauss rule.
pub fn segment_length(a: Point, b: Point, metric: &ConformalMetric) -> Result<f64, MetricError> {
    let e = a.dist(b);
    if metric.is_euclidean() {
        if !(a.is_finite() && b.is_finite()) {
            return Err(MetricError::OutsideDomain { x: a.x, y: a.y });
        }
        return Ok(e);
    }
    metric.lambda(a)?;
    metric.lambda(b)?;
    let mut s = 0.0;
    for (t, w) in GAUSS3_NODES.iter().zip(GAUSS3_WEIGHTS) {
        s += w * metric.lambda(a.lerp(b, *t))?;
    }
    Ok(s * e)
}

/// `∫ λ ds` along a polyline.
pub fn metric_length(curve: &[Point], metric: &ConformalMetric) -> Result<f64, MetricError> {
    if curve.len() < 2 {
        return Err(MetricError::Degenerate(
            "a polyline needs at least two points".into(),
        ));
    }
    curve
        .windows(2)
        .map(|w| segment_length(w[0], w[1], metric))
        .sum()
}

/// Quadrature rule used per triangle by [`metric_area_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AreaRule {
    #[default]
    Centroid,
    /// Symmetric 3-point rule (exact for quadratics).
    ThreePoint,
}

/// `Σ_T |T| λ²(centroid T)`.
pub fn metric_area(triangles: &[[Point; 3]], metric: &ConformalMetric) -> Result<f64, MetricError> {
    metric_area_with(triangles, metric, AreaRule::Centroid)
}

pub fn metric_area_with(
    triangles: &[[Point; 3]],
    metric: &ConformalMetric,
    rule: AreaRule,
) -> Result<f64, MetricError> {
    let mut total = 0.0;
    for (k, [a, b, c]) in triangles.iter().enumerate() {
        let area = geom::triangle_area(*a, *b, *c).abs();
        if !(area > 0.0) {
            return Err(MetricError::Degenerate(format!("triangle {k} has zero area")));
        }
        if metric.is_euclidean() {
            total += area;
            continue;
        }
        let w = match rule {
            AreaRule::Centroid => {
                let lam = metric.lambda((*a + *b + *c) * (1.0 / 3.0))?;
                lam * lam
            }
            AreaRule::ThreePoint => {
                let mut s = 0.0;
                for (p, q, r) in [(a, b, c), (b, c, a), (c, a, b)] {
                    let x = *p * (2.0 / 3.0) + *q * (1.0 / 6.0) + *r * (1.0 / 6.0);
                    let lam = metric.lambda(x)?;
                    s += lam * lam / 3.0;
                }
                s
            }
        };
        total += area * w;
    }
    Ok(total)
}

/// Which side of a directed curve the normal points to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormalSide {
    /// Tangent rotated counterclockwise; the interior side of a counterclockwise boundary.
    Left,
    Right,
}

/// Signed Euclidean curvature of the circle through three points, positive
/// when the curve turns toward `side`.
pub fn discrete_euclidean_curvature(
    p0: Point,
    p1: Point,
    p2: Point,
    side: NormalSide,
) -> Result<f64, MetricError> {
    let (a, b, c) = (p1 - p0, p2 - p1, p2 - p0);
    let (la, lb, lc) = (a.norm(), b.norm(), c.norm());
    if la == 0.0 || lb == 0.0 || lc == 0.0 {
        return Err(MetricError::Degenerate("coincident consecutive points".into()));
    }
    let k_left = 2.0 * a.cross(b) / (la * lb * lc);
    Ok(match side {
        NormalSide::Left => k_left,
        NormalSide::Right => -k_left,
    })
}

/// Unit normal at a sample, perpendicular to the chord through its neighbours.
pub fn sample_normal(p0: Point, p2: Point, side: NormalSide) -> Point {
    let t = p2 - p0;
    let n = t.perp() * (1.0 / t.norm());
    match side {
        NormalSide::Left => n,
        NormalSide::Right => -n,
    }
}

/// Geodesic curvature `κ_σ = (κ_e − ∂_ν ln λ) / λ` given a Euclidean curvature
/// and unit normal at `p`.
pub fn conformal_curvature(
    kappa_e: f64,
    p: Point,
    normal: Point,
    metric: &ConformalMetric,
) -> Result<f64, MetricError> {
    if metric.is_euclidean() {
        return Ok(kappa_e);
    }
    let lam = metric.lambda(p)?;
    let g = metric.dlog_lambda(p)?;
    Ok((kappa_e - g.dot(normal)) / lam)
}

/// Geodesic curvature of a polyline at an interior sample.
pub fn geodesic_curvature(
    curve: &[Point],
    metric: &ConformalMetric,
    index: usize,
    side: NormalSide,
) -> Result<f64, MetricError> {
    if index == 0 || index + 1 >= curve.len() {
        return Err(MetricError::Degenerate(format!(
            "sample {index} needs neighbours on both sides"
        )));
    }
    let (p0, p1, p2) = (curve[index - 1], curve[index], curve[index + 1]);
    let ke = discrete_euclidean_curvature(p0, p1, p2, side)?;
    conformal_curvature(ke, p1, sample_normal(p0, p2, side), metric)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(r: f64, n: usize) -> Vec<Point> {
        (0..=n)
            .map(|i| {
                let t = std::f64::consts::TAU * i as f64 / n as f64;
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect()
    }

    #[test]
    fn euclidean_lengths() {
        let m = ConformalMetric::euclidean();
        let seg = [Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert_eq!(metric_length(&seg, &m).unwrap(), 1.0);
        let sq = [
            Point::new(0.0, 0.0),
            Point::new(1.0, 0.0),
            Point::new(1.0, 1.0),
            Point::new(0.0, 1.0),
            Point::new(0.0, 0.0),
        ];
        assert_eq!(metric_length(&sq, &m).unwrap(), 4.0);
    }

    #[test]
    fn poincare_radial_length() {
        // high-order oracle: ∫_0^0.5 2/(1−t²) dt = 2 artanh(0.5), refined Simpson
        let n = 20_000;
        let h = 0.5 / n as f64;
        let f = |t: f64| 2.0 / (1.0 - t * t);
        let mut simpson = f(0.0) + f(0.5);
        for i in 1..n {
            simpson += if i % 2 == 1 { 4.0 } else { 2.0 } * f(i as f64 * h);
        }
        simpson *= h / 3.0;
        assert!((simpson - 1.098_612_288_668_11).abs() < 1e-12);

        let m = ConformalMetric::poincare_disk(1.0).unwrap();
        let curve: Vec<Point> = (0..=200).map(|i| Point::new(0.5 * i as f64 / 200.0, 0.0)).collect();
        let len = metric_length(&curve, &m).unwrap();
        assert!((len - simpson).abs() < 1e-9, "{len} vs {simpson}");
    }

    #[test]
    fn outside_disk_is_rejected() {
        let m = ConformalMetric::poincare_disk(1.0).unwrap();
        let seg = [Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(matches!(
            metric_length(&seg, &m),
            Err(MetricError::OutsideDomain { .. })
        ));
        assert!(ConformalMetric::poincare_disk(-1.0).is_err());
    }

    #[test]
    fn area_of_empty_region_is_zero() {
        assert_eq!(metric_area(&[], &ConformalMetric::euclidean()).unwrap(), 0.0);
        let degenerate = [[Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(2.0, 0.0)]];
        assert!(metric_area(&degenerate, &ConformalMetric::euclidean()).is_err());
    }

    #[test]
    fn circle_curvature_is_inverse_radius() {
        let m = ConformalMetric::euclidean();
        let c = circle(2.0, 400);
        for i in [1, 57, 399] {
            let k = geodesic_curvature(&c, &m, i, NormalSide::Left).unwrap();
            assert!((k - 0.5).abs() < 1e-10);
            let kr = geodesic_curvature(&c, &m, i, NormalSide::Right).unwrap();
            assert!((kr + 0.5).abs() < 1e-10);
        }
    }

    #[test]
    fn straight_line_has_zero_curvature() {
        let m = ConformalMetric::euclidean();
        let line = [Point::new(0.0, 0.0), Point::new(0.5, 0.0), Point::new(1.0, 0.0)];
        assert_eq!(geodesic_curvature(&line, &m, 1, NormalSide::Left).unwrap(), 0.0);
        let dup = [Point::new(0.0, 0.0), Point::new(0.0, 0.0), Point::new(1.0, 0.0)];
        assert!(geodesic_curvature(&dup, &m, 1, NormalSide::Left).is_err());
        assert!(geodesic_curvature(&line, &m, 0, NormalSide::Left).is_err());
    }

    #[test]
    fn hyperbolic_circle_curvature() {
        // circle of Euclidean radius r about the origin: κ_σ = coth ρ = (1 + r²)/(2r)
        let m = ConformalMetric::poincare_disk(1.0).unwrap();
        let r = 0.4;
        let c = circle(r, 2000);
        let k = geodesic_curvature(&c, &m, 10, NormalSide::Left).unwrap();
        let expected = (1.0 + r * r) / (2.0 * r);
        assert!((k - expected).abs() < 1e-9, "{k} vs {expected}");
    }

    #[test]
    fn custom_metric_matches_poincare() {
        let custom = ConformalMetric::custom("2 / (1 - x^2 - y^2)").unwrap();
        let disk = ConformalMetric::poincare_disk(1.0).unwrap();
        let p = Point::new(0.3, -0.2);
        assert!((custom.lambda(p).unwrap() - disk.lambda(p).unwrap()).abs() < 1e-14);
        let (g1, g2) = (custom.dlog_lambda(p).unwrap(), disk.dlog_lambda(p).unwrap());
        assert!(g1.dist(g2) < 1e-13);
        assert!(ConformalMetric::custom("1 + q").is_err());
        assert!(matches!(
            ConformalMetric::custom("x").unwrap().lambda(Point::new(-1.0, 0.0)),
            Err(MetricError::NonPositive { .. })
        ));
    }

    #[test]
    fn metric_spec_json_forms() {
        let specs = [
            r#"{"kind":"euclidean"}"#,
            r#"{"kind":"poincare_disk","radius":1.0}"#,
            r#"{"kind":"custom","lambda":"1 + x^2"}"#,
        ];
        for s in specs {
            let spec: MetricSpec = serde_json::from_str(s).unwrap();
            let m = ConformalMetric::from_spec(&spec).unwrap();
            assert_eq!(serde_json::to_string(&m.to_spec()).unwrap(), s);
        }
        assert!(serde_json::from_str::<MetricSpec>(r#"{"kind":"euclidean","x":1}"#).is_err());
    }
}
