//! Piecewise-linear finite elements for the prescribed mean curvature graph
//! equations, damped Newton, and capped continuation toward infinite data.
//!
//! In a conformal metric `λ²|dx|²` a graph `u` with upward normal
//! `N = (X − ∇u)/W` satisfies `div_e(∇u / W) = λ² F` with
//! `W = √(1 + |∇u|²/λ²)` and `F = 0` (minimal), `F = H0` (CMC) or
//! `F = c / W` (translator). The lower spherical cap of radius `R` has
//! `F = +2/R` under this convention.

mod assembly;
mod continuation;
mod export;
mod newton;

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{ArcKind, CheckReport, DomainError, DomainSpec};
use crate::geom::Point;
use crate::mesh::{Marker, MeshError, TriMesh};
use crate::metric::MetricError;

pub use assembly::{assemble_jacobian, assemble_residual, SparseMatrix};
pub use continuation::{
    compare, continuation_solve, CapRecord, ContinuationResult, JsStatus, OrderingReport,
};
pub use export::{read_solution_csv, solution_csv, SolutionMeta};
pub use newton::{harmonic_extension, newton_solve};

#[derive(Debug, Error)]
pub enum SolverError {
    #[error("non-finite value at node {node}")]
    NonFinite { node: usize },
    #[error("metric evaluation failed: {0}")]
    Metric(#[from] MetricError),
    #[error("invalid solver parameter: {0}")]
    InvalidParameter(String),
    #[error("singular linear system at Newton iteration {iteration}")]
    Singular { iteration: usize },
    #[error("line search stalled at iteration {} with residual {}", .iterate.iterations, .iterate.residual)]
    Stall { iterate: Box<Solution> },
    #[error("solutions live on different meshes")]
    MeshMismatch,
    #[error("boundary node {node} has no Dirichlet value")]
    MissingData { node: usize },
    #[error("structural check did not pass (verdict {:?})", .0.verdict)]
    CheckFailed(Box<CheckReport>),
    #[error("no converged solution at cap {cap}")]
    ContinuationAborted {
        cap: f64,
        partial: Box<ContinuationResult>,
    },
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// Which graph equation is solved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ProblemKind {
    Minimal,
    Cmc { h0: f64 },
    Translator { c: f64 },
}

impl ProblemKind {
    pub fn validate(&self) -> Result<(), SolverError> {
        match *self {
            ProblemKind::Cmc { h0 } if !h0.is_finite() => {
                Err(SolverError::InvalidParameter(format!("H0 must be finite, got {h0}")))
            }
            ProblemKind::Translator { c } if !(c > 0.0 && c.is_finite()) => {
                Err(SolverError::InvalidParameter(format!("translator speed must be positive, got {c}")))
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Minimal => "minimal",
            ProblemKind::Cmc { .. } => "cmc",
            ProblemKind::Translator { .. } => "translator",
        }
    }
}

/// Boundary values for every mesh node; `None` marks interior nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletData {
    pub values: Vec<Option<f64>>,
    /// Cap substituted for infinite data, if any.
    pub cap: Option<f64>,
}

impl DirichletData {
    /// Capped data: `n` on A arcs, `−n` on B arcs, the arc expression on C
    /// arcs clamped into `[−n, n]` on the sides where blow-up arcs exist.
    /// Domain vertices touching a C arc take C data; an A–B corner takes 0.
    pub fn capped(spec: &DomainSpec, mesh: &TriMesh, cap: f64) -> Result<Self, SolverError> {
        if !(cap > 0.0 && cap.is_finite()) {
            return Err(SolverError::InvalidParameter(format!("cap must be positive, got {cap}")));
        }
        let arc_of_mesh: Vec<usize> = mesh
            .arc_ids
            .iter()
            .map(|id| spec.arc_index(id))
            .collect::<Result<_, _>>()?;
        let (has_a, has_b) = (spec.has_kind(ArcKind::A), spec.has_kind(ArcKind::B));
        let c_value = |arc: usize, p: Point| -> f64 {
            let f = spec.arcs[arc]
                .data
                .as_ref()
                .map_or(0.0, |e| e.eval(p.x, p.y));
            let f = if has_a { f.min(cap) } else { f };
            if has_b {
                f.max(-cap)
            } else {
                f
            }
        };
        let value_on = |arc: usize, p: Point| match spec.arcs[arc].kind {
            ArcKind::A => cap,
            ArcKind::B => -cap,
            ArcKind::C => c_value(arc, p),
        };
        let m = spec.arcs.len();
        let mut values = vec![None; mesh.vertices.len()];
        for (v, mk) in mesh.markers.iter().enumerate() {
            let p = mesh.vertices[v];
            values[v] = match *mk {
                Marker::Interior => None,
                Marker::OnArc(k) => Some(value_on(arc_of_mesh[k], p)),
                Marker::DomainVertex(k) => {
                    if k >= m {
                        return Err(SolverError::InvalidParameter(format!(
                            "mesh references domain vertex {k} but the domain has {m}"
                        )));
                    }
                    let (next, prev) = (k, (k + m - 1) % m);
                    let (kn, kp) = (spec.arcs[next].kind, spec.arcs[prev].kind);
                    Some(if kn == ArcKind::C {
                        c_value(next, p)
                    } else if kp == ArcKind::C {
                        c_value(prev, p)
                    } else if kn == kp {
                        value_on(next, p)
                    } else {
                        0.0
                    })
                }
            };
        }
        for v in 0..values.len() {
            if let Some(x) = values[v] {
                if !x.is_finite() {
                    return Err(SolverError::NonFinite { node: v });
                }
            }
        }
        Ok(Self { values, cap: Some(cap) })
    }

    /// Data given by a closed-form function on all boundary nodes.
    pub fn from_fn(mesh: &TriMesh, f: impl Fn(Point) -> f64) -> Result<Self, SolverError> {
        let mut values = vec![None; mesh.vertices.len()];
        for (v, mk) in mesh.markers.iter().enumerate() {
            if *mk != Marker::Interior {
                let x = f(mesh.vertices[v]);
                if !x.is_finite() {
                    return Err(SolverError::NonFinite { node: v });
                }
                values[v] = Some(x);
            }
        }
        Ok(Self { values, cap: None })
    }

    pub fn shifted(&self, tau: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v.map(|x| x + tau)).collect(),
            cap: self.cap,
        }
    }

    /// Pointwise blend `(1 − t)·self + t·other` of two data sets on one mesh.
    pub(crate) fn blend(&self, other: &Self, t: f64) -> Self {
        Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| match (a, b) {
                    (Some(a), Some(b)) => Some(a + t * (b - a)),
                    _ => None,
                })
                .collect(),
            cap: other.cap,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Residual tolerance relative to the initial residual.
    pub rel_tol: f64,
    /// Absolute residual floor.
    pub abs_tol: f64,
    pub max_iterations: usize,
    pub armijo_slope: f64,
    pub min_step: f64,
    /// Caps `n_k`, strictly increasing.
    pub caps: Vec<f64>,
    /// Interior margin from blow-up arcs; defaults to `5h`.
    pub delta: Option<f64>,
    /// Interior convergence tolerance; defaults to `1e-4 · diameter`.
    pub eps_js: Option<f64>,
    /// Continue when the structural check does not pass.
    pub override_check: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_iterations: 50,
            armijo_slope: 1e-4,
            min_step: 2f64.powi(-20),
            caps: (0..5).map(|k| 2f64.powi(k)).collect(),
            delta: None,
            eps_js: None,
            override_check: false,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), SolverError> {
        let bad = |m: &str| Err(SolverError::InvalidParameter(m.to_string()));
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return bad("tolerances must be positive");
        }
        if self.max_iterations == 0 {
            return bad("max_iterations must be positive");
        }
        if !(self.armijo_slope > 0.0 && self.armijo_slope < 1.0) {
            return bad("armijo slope must lie in (0, 1)");
        }
        if !(self.min_step > 0.0 && self.min_step < 1.0) {
            return bad("minimum step must lie in (0, 1)");
        }
        if self.caps.is_empty() || self.caps.iter().any(|c| !(*c > 0.0 && c.is_finite())) {
            return bad("caps must be positive");
        }
        if self.caps.windows(2).any(|w| w[1] <= w[0]) {
            return bad("caps must be strictly increasing");
        }
        if self.delta.is_some_and(|d| !(d > 0.0)) || self.eps_js.is_some_and(|e| !(e > 0.0)) {
            return bad("delta and eps_js must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    pub mesh: Arc<TriMesh>,
    pub u: Vec<f64>,
    pub kind: ProblemKind,
    pub cap: Option<f64>,
    /// Euclidean norm of the interior residual.
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
}

impl Solution {
    /// Linear interpolation of the nodal field at `p`, if `p` lies in the mesh.
    pub fn eval(&self, p: Point) -> Option<f64> {
        for t in 0..self.mesh.triangles.len() {
            let [a, b, c] = self.mesh.triangle_points(t);
            let area = crate::geom::orient(a, b, c);
            let l0 = crate::geom::orient(p, b, c) / area;
            let l1 = crate::geom::orient(a, p, c) / area;
            let l2 = 1.0 - l0 - l1;
            let eps = -1e-12;
            if l0 >= eps && l1 >= eps && l2 >= eps {
                let [i, j, k] = self.mesh.triangles[t];
                return Some(l0 * self.u[i] + l1 * self.u[j] + l2 * self.u[k]);
            }
        }
        None
    }
}
