//! Post-processing of computed graphs: the weighted area `𝒜_c = ∫ e^{c u} dμ`
//! and its minimizing property, boundary curvature verdicts, the weighted
//! cylinder curvature, and the Euclidean entropy ratio.

use std::sync::Arc;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::domain::{ArcKind, DomainError, DomainSpec};
use crate::geom::Point;
use crate::mesh::TriMesh;
use crate::metric::{ConformalMetric, MetricError, NormalSide};
use crate::solver::{ProblemKind, Solution};

/// Above this exponent magnitude the weighted area is accumulated in log form.
const LOG_FORM_THRESHOLD: f64 = 300.0;

#[derive(Debug, Error)]
pub enum AnalysisError {
    #[error("invalid analysis parameter: {0}")]
    InvalidParameter(String),
    #[error("{0} values for {1} mesh nodes")]
    LengthMismatch(usize, usize),
    #[error("non-finite height at node {0}")]
    NonFinite(usize),
    #[error("minimality test needs a converged translator solution, got {0}")]
    NotTranslator(String),
    #[error("arc '{0}' is a C arc; boundary curvature is only constrained on A and B arcs")]
    ContinuousArc(String),
    #[error("entropy ratio is defined for the euclidean metric only")]
    NonEuclidean,
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Piecewise-linear graph of nodal heights over a mesh.
#[derive(Debug, Clone)]
pub struct GraphSurface {
    pub mesh: Arc<TriMesh>,
    pub u: Vec<f64>,
    pub metric: ConformalMetric,
    /// `λ²` at each triangle centroid.
    lambda_sq: Vec<f64>,
    /// Hat-function gradients per triangle.
    grads: Vec<[Point; 3]>,
}

/// Per-triangle quantities of a graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleElement {
    pub mean_height: f64,
    /// `W = √(1 + |∇u|²/λ²) ≥ 1`
    pub w: f64,
    /// Graph area `W·λ²·|T|`.
    pub area: f64,
}

impl GraphSurface {
    pub fn new(mesh: Arc<TriMesh>, u: Vec<f64>, metric: ConformalMetric) -> Result<Self, AnalysisError> {
        if u.len() != mesh.vertices.len() {
            return Err(AnalysisError::LengthMismatch(u.len(), mesh.vertices.len()));
        }
        if let Some(v) = u.iter().position(|x| !x.is_finite()) {
            return Err(AnalysisError::NonFinite(v));
        }
        let mut lambda_sq = Vec::with_capacity(mesh.triangles.len());
        let mut grads = Vec::with_capacity(mesh.triangles.len());
        for t in 0..mesh.triangles.len() {
            let [a, b, c] = mesh.triangle_points(t);
            let twice = crate::geom::orient(a, b, c);
            grads.push([
                (c - b).perp() * (1.0 / twice),
                (a - c).perp() * (1.0 / twice),
                (b - a).perp() * (1.0 / twice),
            ]);
            let l = metric.lambda((a + b + c) * (1.0 / 3.0))?;
            lambda_sq.push(l * l);
        }
        Ok(Self {
            mesh,
            u,
            metric,
            lambda_sq,
            grads,
        })
    }

    pub fn from_solution(sol: &Solution, metric: &ConformalMetric) -> Result<Self, AnalysisError> {
        Self::new(sol.mesh.clone(), sol.u.clone(), metric.clone())
    }

    /// Same mesh and metric with other heights.
    pub fn with_heights(&self, u: Vec<f64>) -> Result<Self, AnalysisError> {
        if u.len() != self.u.len() {
            return Err(AnalysisError::LengthMismatch(u.len(), self.u.len()));
        }
        if let Some(v) = u.iter().position(|x| !x.is_finite()) {
            return Err(AnalysisError::NonFinite(v));
        }
        Ok(Self { u, ..self.clone() })
    }

    fn element_of(&self, t: usize, u: &[f64]) -> TriangleElement {
        let nodes = self.mesh.triangles[t];
        let g = (0..3).fold(Point::new(0.0, 0.0), |g, a| g + self.grads[t][a] * u[nodes[a]]);
        let lsq = self.lambda_sq[t];
        let w = (1.0 + g.norm_sq() / lsq).sqrt();
        TriangleElement {
            mean_height: (u[nodes[0]] + u[nodes[1]] + u[nodes[2]]) / 3.0,
            w,
            area: w * lsq * self.mesh.triangle_area(t),
        }
    }

    pub fn element(&self, t: usize) -> TriangleElement {
        self.element_of(t, &self.u)
    }

    /// Unweighted graph area in the product metric.
    pub fn area(&self) -> f64 {
        (0..self.mesh.triangles.len()).map(|t| self.element(t).area).sum()
    }

    /// `Σ_T e^{c·mean_T − shift}·area_T` for heights `u`.
    fn scaled_sum(&self, u: &[f64], c: f64, shift: f64) -> f64 {
        (0..self.mesh.triangles.len())
            .map(|t| {
                let e = self.element_of(t, u);
                (c * e.mean_height - shift).exp() * e.area
            })
            .sum()
    }

    /// Exponent shift keeping the weights representable.
    fn shift_for(&self, c: f64) -> f64 {
        let big = self.u.iter().fold(0.0f64, |m, x| m.max((c * x).abs()));
        if big > LOG_FORM_THRESHOLD {
            (0..self.mesh.triangles.len())
                .map(|t| c * self.element(t).mean_height)
                .fold(f64::NEG_INFINITY, f64::max)
        } else {
            0.0
        }
    }
}

/// Weighted area, with its logarithm for heights where the weight overflows.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct WeightedArea {
    /// `𝒜_c`; may be infinite or zero when `log_form` is set.
    pub value: f64,
    pub log_value: f64,
    /// Set when some `|c·u| > 300` and the sum was accumulated as log-sum-exp.
    pub log_form: bool,
}

fn check_speed(c: f64) -> Result<(), AnalysisError> {
    if c > 0.0 && c.is_finite() {
        Ok(())
    } else {
        Err(AnalysisError::InvalidParameter(format!("c must be positive, got {c}")))
    }
}

/// Ilmanen weighted area `Σ_T e^{c·mean u}·W_T·λ²·|T|`.
pub fn weighted_area(surface: &GraphSurface, c: f64) -> Result<WeightedArea, AnalysisError> {
    check_speed(c)?;
    let shift = surface.shift_for(c);
    let s = surface.scaled_sum(&surface.u, c, shift);
    let log_value = shift + s.ln();
    Ok(WeightedArea {
        value: if shift == 0.0 { s } else { log_value.exp() },
        log_value,
        log_form: shift != 0.0,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityConfig {
    pub trials: usize,
    /// Root seed; trial seeds are drawn from it in order.
    pub seed: u64,
    /// Each amplitude is tested with both signs.
    pub amplitudes: Vec<f64>,
}

impl Default for MinimalityConfig {
    fn default() -> Self {
        Self {
            trials: 50,
            seed: 0,
            amplitudes: vec![1e-2, 1e-3],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MinimalityReport {
    pub trials: usize,
    /// Number of trials with at least one violation.
    pub failures: usize,
    /// Seeds of the failing trials, for `perturbation`.
    pub seeds: Vec<u64>,
    pub first_order_failures: usize,
    pub second_order_failures: usize,
    /// Smallest `(𝒜_c[u+εφ] − 𝒜_c[u] + tol)/𝒜_c[u]` over all trials and amplitudes.
    pub min_first_margin: f64,
    /// Smallest `(𝒜_c[u+εφ] + 𝒜_c[u−εφ] − 2𝒜_c[u] + tol)/𝒜_c[u]`.
    pub min_second_margin: f64,
    pub minimizer: bool,
}

/// Random field in `[−1, 1]` at interior nodes, zero on the boundary, unit sup norm.
pub fn perturbation(mesh: &TriMesh, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut phi: Vec<f64> = (0..mesh.vertices.len())
        .map(|v| {
            let x: f64 = rng.random_range(-1.0..=1.0);
            if mesh.is_boundary(v) {
                0.0
            } else {
                x
            }
        })
        .collect();
    let m = phi.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if m > 0.0 {
        phi.iter_mut().for_each(|x| *x /= m);
    }
    phi
}

/// Checks `𝒜_c[u ± εφ] ≥ 𝒜_c[u] − tol` and the symmetric second difference
/// against `tol = 1e-3·ε²·𝒜_c[u]` for random interior perturbations `φ`.
pub fn minimality_test(
    solution: &Solution,
    metric: &ConformalMetric,
    config: &MinimalityConfig,
) -> Result<MinimalityReport, AnalysisError> {
    let c = match solution.kind {
        ProblemKind::Translator { c } if solution.converged => c,
        ProblemKind::Translator { .. } => return Err(AnalysisError::NotTranslator("an unconverged solution".into())),
        k => return Err(AnalysisError::NotTranslator(k.name().into())),
    };
    if config.amplitudes.iter().any(|e| !e.is_finite() || *e < 0.0) {
        return Err(AnalysisError::InvalidParameter("amplitudes must be finite and nonnegative".into()));
    }
    let surface = GraphSurface::from_solution(solution, metric)?;
    minimality_on(&surface, c, config)
}

/// Minimality test on an arbitrary graph; the caller vouches for its meaning.
pub fn minimality_on(
    surface: &GraphSurface,
    c: f64,
    config: &MinimalityConfig,
) -> Result<MinimalityReport, AnalysisError> {
    check_speed(c)?;
    let shift = surface.shift_for(c);
    let base = surface.scaled_sum(&surface.u, c, shift);
    let mut root = ChaCha8Rng::seed_from_u64(config.seed);
    let mut report = MinimalityReport {
        trials: config.trials,
        failures: 0,
        seeds: Vec::new(),
        first_order_failures: 0,
        second_order_failures: 0,
        min_first_margin: f64::INFINITY,
        min_second_margin: f64::INFINITY,
        minimizer: true,
    };
    for _ in 0..config.trials {
        let seed = root.next_u64();
        let phi = perturbation(&surface.mesh, seed);
        let mut failed = false;
        for &eps in &config.amplitudes {
            let tol = 1e-3 * eps * eps * base;
            let moved = |s: f64| -> Vec<f64> { surface.u.iter().zip(&phi).map(|(u, p)| u + s * eps * p).collect() };
            let plus = surface.scaled_sum(&moved(1.0), c, shift);
            let minus = surface.scaled_sum(&moved(-1.0), c, shift);
            for a in [plus, minus] {
                let margin = a - base + tol;
                report.min_first_margin = report.min_first_margin.min(margin / base);
                if margin < 0.0 {
                    report.first_order_failures += 1;
                    failed = true;
                }
            }
            let margin = plus + minus - 2.0 * base + tol;
            report.min_second_margin = report.min_second_margin.min(margin / base);
            if margin < 0.0 {
                report.second_order_failures += 1;
                failed = true;
            }
        }
        if failed {
            report.failures += 1;
            report.seeds.push(seed);
        }
    }
    report.minimizer = report.failures == 0;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryVerdict {
    pub arc: String,
    pub kind: ArcKind,
    pub expected: f64,
    /// Largest `|κ_σ − expected|` over the samples.
    pub max_dev: f64,
    pub samples: usize,
    pub tol: f64,
    pub verdict: bool,
}

/// Geodesic curvature of a blow-up arc, with respect to the inward normal,
/// against the value forced on it: 0 for minimal and translating graphs,
/// `+H0` on A arcs and `−H0` on B arcs for constant mean curvature `H0`.
pub fn boundary_curvature_verdict(
    spec: &DomainSpec,
    arc_id: &str,
    kind: ProblemKind,
    samples: usize,
    tol: f64,
) -> Result<BoundaryVerdict, AnalysisError> {
    let arc = &spec.arcs[spec.arc_index(arc_id)?];
    if arc.kind == ArcKind::C {
        return Err(AnalysisError::ContinuousArc(arc.id.clone()));
    }
    if samples == 0 || !(tol >= 0.0) {
        return Err(AnalysisError::InvalidParameter("need at least one sample and tol ≥ 0".into()));
    }
    let expected = match kind {
        ProblemKind::Cmc { h0 } if arc.kind == ArcKind::A => h0,
        ProblemKind::Cmc { h0 } => -h0,
        _ => 0.0,
    };
    let ks = arc.curvature_samples(&spec.metric, NormalSide::Left, samples)?;
    let max_dev = ks.iter().fold(0.0f64, |m, (_, k)| m.max((k - expected).abs()));
    Ok(BoundaryVerdict {
        arc: arc.id.clone(),
        kind: arc.kind,
        expected,
        max_dev,
        samples: ks.len(),
        tol,
        verdict: max_dev <= tol,
    })
}

/// Mean curvature `e^{−ct/m}·κ_σ` of the vertical cylinder over a curve in
/// the conformally weighted product metric.
pub fn cylinder_weighted_h(kappa_sigma: f64, t: f64, c: f64, m: u32) -> f64 {
    (-c * t / m as f64).exp() * kappa_sigma
}

/// Point of the graph in 3-space.
pub type Point3 = [f64; 3];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyArgmax {
    pub center: Point3,
    pub radius: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntropyReport {
    pub sup: f64,
    pub argmax: Option<EntropyArgmax>,
}

/// Subdivision depth for triangles crossing a sphere.
const CLIP_DEPTH: u32 = 7;

fn sub3(a: Point3, b: Point3) -> Point3 {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dist3(a: Point3, b: Point3) -> f64 {
    let d = sub3(a, b);
    (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt()
}

fn mid3(a: Point3, b: Point3) -> Point3 {
    [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0, (a[2] + b[2]) / 2.0]
}

fn area3(t: &[Point3; 3]) -> f64 {
    let (u, v) = (sub3(t[1], t[0]), sub3(t[2], t[0]));
    let n = [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]];
    0.5 * (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt()
}

/// Area of the part of a triangle inside the ball `B(x, r)`.
fn clipped_area(t: [Point3; 3], x: Point3, r: f64, depth: u32) -> f64 {
    let d = [dist3(t[0], x), dist3(t[1], x), dist3(t[2], x)];
    if d.iter().all(|&di| di <= r) {
        return area3(&t);
    }
    let centroid = [
        (t[0][0] + t[1][0] + t[2][0]) / 3.0,
        (t[0][1] + t[1][1] + t[2][1]) / 3.0,
        (t[0][2] + t[1][2] + t[2][2]) / 3.0,
    ];
    let reach = t.iter().fold(0.0f64, |m, p| m.max(dist3(*p, centroid)));
    if dist3(centroid, x) > r + reach {
        return 0.0;
    }
    if depth == 0 {
        return if dist3(centroid, x) <= r { area3(&t) } else { 0.0 };
    }
    let (m01, m12, m20) = (mid3(t[0], t[1]), mid3(t[1], t[2]), mid3(t[2], t[0]));
    [
        [t[0], m01, m20],
        [m01, t[1], m12],
        [m20, m12, t[2]],
        [m01, m12, m20],
    ]
    .into_iter()
    .map(|s| clipped_area(s, x, r, depth - 1))
    .sum()
}

/// Largest `Area(Σ ∩ B(x, r)) / r²` over the given centers and radii.
pub fn entropy_ratio(
    surface: &GraphSurface,
    centers: &[Point3],
    radii: &[f64],
) -> Result<EntropyReport, AnalysisError> {
    if !surface.metric.is_euclidean() {
        return Err(AnalysisError::NonEuclidean);
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0 && r.is_finite())) {
        return Err(AnalysisError::InvalidParameter(format!("radius must be positive, got {r}")));
    }
    let mesh = &surface.mesh;
    let lift = |v: usize| [mesh.vertices[v].x, mesh.vertices[v].y, surface.u[v]];
    let tris: Vec<[Point3; 3]> = mesh
        .triangles
        .iter()
        .map(|&[a, b, c]| [lift(a), lift(b), lift(c)])
        .collect();
    let mut report = EntropyReport { sup: 0.0, argmax: None };
    for &x in centers {
        for &r in radii {
            let area: f64 = tris.iter().map(|t| clipped_area(*t, x, r, CLIP_DEPTH)).sum();
            let ratio = area / (r * r);
            if ratio > report.sup {
                report.sup = ratio;
                report.argmax = Some(EntropyArgmax { center: x, radius: r });
            }
        }
    }
    Ok(report)
}

/// Combined analysis output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisReport {
    /// Present for translators, whose speed fixes the weight.
    pub weighted_area: Option<WeightedArea>,
    pub minimality: Option<MinimalityReport>,
    pub boundary: Vec<BoundaryVerdict>,
    pub entropy: Option<EntropyReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisOptions {
    pub minimality: MinimalityConfig,
    pub boundary_samples: usize,
    pub boundary_tol: f64,
    /// Number of graph points used as entropy centers.
    pub entropy_centers: usize,
    /// Entropy radii as fractions of the domain diameter.
    pub entropy_radii: Vec<f64>,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        Self {
            minimality: MinimalityConfig::default(),
            boundary_samples: 200,
            boundary_tol: 1e-4,
            entropy_centers: 16,
            entropy_radii: vec![0.25, 0.5],
        }
    }
}

/// Runs every applicable analysis on a solution: weighted area and
/// minimality for translators, curvature verdicts on the blow-up arcs of
/// `spec` when given, and the entropy ratio for the Euclidean metric.
pub fn analyze(
    spec: Option<&DomainSpec>,
    solution: &Solution,
    metric: &ConformalMetric,
    options: &AnalysisOptions,
) -> Result<AnalysisReport, AnalysisError> {
    let surface = GraphSurface::from_solution(solution, metric)?;
    let (weighted_area, minimality) = match solution.kind {
        ProblemKind::Translator { c } => (
            Some(self::weighted_area(&surface, c)?),
            if solution.converged {
                Some(minimality_test(solution, metric, &options.minimality)?)
            } else {
                None
            },
        ),
        _ => (None, None),
    };
    let mut boundary = Vec::new();
    if let Some(spec) = spec {
        for arc in spec.arcs.iter().filter(|a| a.kind != ArcKind::C) {
            boundary.push(boundary_curvature_verdict(
                spec,
                &arc.id,
                solution.kind,
                options.boundary_samples,
                options.boundary_tol,
            )?);
        }
    }
    let entropy = if metric.is_euclidean() && options.entropy_centers > 0 && !options.entropy_radii.is_empty() {
        let mesh = &surface.mesh;
        let interior = mesh.interior_nodes();
        let pool: Vec<usize> = if interior.is_empty() {
            (0..mesh.vertices.len()).collect()
        } else {
            interior
        };
        let stride = pool.len().div_ceil(options.entropy_centers).max(1);
        let centers: Vec<Point3> = pool
            .iter()
            .step_by(stride)
            .map(|&v| [mesh.vertices[v].x, mesh.vertices[v].y, surface.u[v]])
            .collect();
        let rim: Vec<Point> = (0..mesh.vertices.len())
            .filter(|&v| mesh.is_boundary(v))
            .map(|v| mesh.vertices[v])
            .collect();
        let diameter = crate::geom::diameter(&rim);
        let radii: Vec<f64> = options.entropy_radii.iter().map(|f| f * diameter).collect();
        Some(entropy_ratio(&surface, &centers, &radii)?)
    } else {
        None
    };
    Ok(AnalysisReport {
        weighted_area,
        minimality,
        boundary,
        entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::presets::{lens, rectangle, scherk_square};
    use crate::domain::ArcKind::*;
    use crate::mesh::generate_mesh;
    use std::f64::consts::PI;

    fn flat(h: f64, tau: f64) -> GraphSurface {
        let d = rectangle("sq", (0.0, 1.0), (0.0, 1.0), [C, C, C, C], "0").unwrap();
        let m = Arc::new(generate_mesh(&d, h, 1.0).unwrap());
        let n = m.vertices.len();
        GraphSurface::new(m, vec![tau; n], ConformalMetric::euclidean()).unwrap()
    }

    #[test]
    fn flat_weighted_area() {
        let s = flat(0.25, 0.0);
        assert!((weighted_area(&s, 1.0).unwrap().value - 1.0).abs() < 1e-14);
        let s = flat(0.25, 0.7);
        let a = weighted_area(&s, 2.0).unwrap();
        assert!((a.value - (1.4f64).exp()).abs() < 1e-12 * a.value);
        assert!(!a.log_form);
    }

    #[test]
    fn huge_heights_use_log_form() {
        let s = flat(0.25, 500.0);
        let a = weighted_area(&s, 1.0).unwrap();
        assert!(a.log_form);
        assert!((a.log_value - 500.0).abs() < 1e-12);
        let s = flat(0.25, -500.0);
        assert!((weighted_area(&s, 1.0).unwrap().log_value + 500.0).abs() < 1e-12);
    }

    #[test]
    fn small_speed_recovers_unweighted_area() {
        let s = flat(0.25, 0.0);
        let u: Vec<f64> = s.mesh.vertices.iter().map(|p| p.x * p.x - p.y).collect();
        let s = s.with_heights(u).unwrap();
        let a = weighted_area(&s, 1e-8).unwrap().value;
        assert!((a - s.area()).abs() < 1e-6 * s.area());
        assert!(s.area() >= 1.0);
    }

    #[test]
    fn non_translator_is_rejected() {
        let s = flat(0.5, 0.0);
        let sol = Solution {
            mesh: s.mesh.clone(),
            u: s.u.clone(),
            kind: ProblemKind::Minimal,
            cap: None,
            residual: 0.0,
            iterations: 0,
            converged: true,
        };
        assert!(matches!(
            minimality_test(&sol, &ConformalMetric::euclidean(), &MinimalityConfig::default()),
            Err(AnalysisError::NotTranslator(_))
        ));
    }

    #[test]
    fn zero_amplitude_is_exact_equality() {
        let s = flat(0.25, 0.3);
        let cfg = MinimalityConfig {
            trials: 3,
            seed: 9,
            amplitudes: vec![0.0],
        };
        let r = minimality_on(&s, 1.0, &cfg).unwrap();
        assert_eq!(r.failures, 0);
        assert_eq!(r.min_first_margin, 0.0);
    }

    #[test]
    fn flat_graph_is_not_a_weighted_minimizer() {
        // the weight e^{u} rewards lowering the interior of a flat graph
        let s = flat(0.2, 0.0);
        let r = minimality_on(&s, 1.0, &MinimalityConfig { trials: 5, ..Default::default() }).unwrap();
        assert!(!r.minimizer);
        assert!(r.first_order_failures > 0);
        assert_eq!(r.seeds.len(), r.failures);
    }

    #[test]
    fn perturbations_vanish_on_the_boundary() {
        let s = flat(0.2, 0.0);
        let phi = perturbation(&s.mesh, 42);
        assert_eq!(phi, perturbation(&s.mesh, 42));
        assert_eq!(phi.iter().fold(0.0f64, |m, x| m.max(x.abs())), 1.0);
        for v in 0..phi.len() {
            if s.mesh.is_boundary(v) {
                assert_eq!(phi[v], 0.0);
            }
        }
    }

    #[test]
    fn straight_arcs_have_zero_deviation() {
        let d = scherk_square(1.0);
        for id in ["s1", "s3", "s0"] {
            let v = boundary_curvature_verdict(&d, id, ProblemKind::Translator { c: 1.0 }, 200, 1e-10).unwrap();
            assert_eq!(v.max_dev, 0.0);
            assert!(v.verdict);
        }
    }

    #[test]
    fn cmc_arc_signs() {
        let d = lens(1.0, 1.0, A, 1.0, "0").unwrap();
        let v = boundary_curvature_verdict(&d, "upper", ProblemKind::Cmc { h0: 1.0 }, 200, 1e-4).unwrap();
        assert!(v.verdict, "{v:?}");
        assert!(v.max_dev < 1e-8);
        let t = boundary_curvature_verdict(&d, "upper", ProblemKind::Translator { c: 1.0 }, 200, 1e-4).unwrap();
        assert!(!t.verdict);
        assert!((t.max_dev - 1.0).abs() < 1e-8);
        let b = d.swapped_blow_up();
        let v = boundary_curvature_verdict(&b, "upper", ProblemKind::Cmc { h0: -1.0 }, 200, 1e-4).unwrap();
        assert_eq!(v.expected, 1.0);
        assert!(v.verdict);
        assert!(matches!(
            boundary_curvature_verdict(&d, "lower", ProblemKind::Minimal, 10, 1e-4),
            Err(AnalysisError::ContinuousArc(_))
        ));
    }

    #[test]
    fn cylinder_curvature_values() {
        assert_eq!(cylinder_weighted_h(0.0, 3.0, 2.0, 2), 0.0);
        assert_eq!(cylinder_weighted_h(1.0, 0.0, 2.0, 2), 1.0);
        assert!((cylinder_weighted_h(2.0, 2.0, 1.0, 2) - 2.0 / std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn entropy_of_a_plane_is_pi() {
        let s = flat(0.1, 0.0);
        let r = entropy_ratio(&s, &[[0.5, 0.5, 0.0]], &[0.3]).unwrap();
        assert!((r.sup - PI).abs() < 2e-2, "{}", r.sup);
        let far = entropy_ratio(&s, &[[0.5, 0.5, 2.0]], &[0.3]).unwrap();
        assert_eq!(far.sup, 0.0);
        assert!(far.argmax.is_none());
        assert!(entropy_ratio(&s, &[[0.5, 0.5, 0.0]], &[0.0]).is_err());
    }
}
