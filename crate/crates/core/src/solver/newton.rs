use std::sync::Arc;

use super::assembly::{dof_map, elements, jacobian_with, local, residual_with, Element, SparseMatrix};
use super::{DirichletData, ProblemKind, Solution, SolverConfig, SolverError};
use crate::geom::Point;
use crate::mesh::TriMesh;
use crate::metric::ConformalMetric;

fn norm(r: &[f64]) -> f64 {
    r.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Full nodal vector with boundary values from `data` and `interior` elsewhere.
fn with_boundary(mesh: &TriMesh, data: &DirichletData, fill: &[f64]) -> Result<Vec<f64>, SolverError> {
    if data.values.len() != mesh.vertices.len() {
        return Err(SolverError::MeshMismatch);
    }
    let mut u = fill.to_vec();
    for v in 0..mesh.vertices.len() {
        match (mesh.is_boundary(v), data.values[v]) {
            (true, Some(x)) => u[v] = x,
            (true, None) => return Err(SolverError::MissingData { node: v }),
            _ => {}
        }
    }
    Ok(u)
}

/// Piecewise-linear harmonic extension of the boundary data.
pub fn harmonic_extension(mesh: &TriMesh, data: &DirichletData) -> Result<Vec<f64>, SolverError> {
    let mut u = with_boundary(mesh, data, &vec![0.0; mesh.vertices.len()])?;
    let elems = elements(mesh, &ConformalMetric::euclidean())?;
    let (map, interior) = dof_map(mesh);
    if interior.is_empty() {
        return Ok(u);
    }
    // at u = 0 the minimal Jacobian is the stiffness matrix
    let k = jacobian_with(&elems, &map, interior.len(), &vec![0.0; u.len()], ProblemKind::Minimal);
    let mut rhs = vec![0.0; interior.len()];
    for e in &elems {
        let gb = (0..3)
            .filter(|&a| map[e.nodes[a]].is_none())
            .fold(Point::new(0.0, 0.0), |g, a| g + e.grads[a] * u[e.nodes[a]]);
        for a in 0..3 {
            if let Some(i) = map[e.nodes[a]] {
                rhs[i] -= e.area * gb.dot(e.grads[a]);
            }
        }
    }
    let x = k.solve(&rhs).ok_or(SolverError::Singular { iteration: 0 })?;
    for (i, &v) in interior.iter().enumerate() {
        u[v] = x[i];
    }
    Ok(u)
}

/// Residual magnitude attributable to rounding in the element sums.
fn noise_floor(elems: &[Element], u: &[f64], kind: ProblemKind) -> f64 {
    let mut s = 0.0;
    for e in elems {
        let l = local(e, u);
        let f = match kind {
            ProblemKind::Minimal => 0.0,
            ProblemKind::Cmc { h0 } => h0.abs(),
            ProblemKind::Translator { c } => c / l.w,
        };
        let gmax = e.grads.iter().fold(0.0f64, |m, b| m.max(b.norm()));
        s += e.area * (l.g.norm() * gmax / l.w + f * e.lambda_sq);
    }
    1e3 * f64::EPSILON * s
}

/// Damped Newton from the harmonic extension of `data`.
pub fn newton_solve(
    mesh: Arc<TriMesh>,
    metric: &ConformalMetric,
    data: &DirichletData,
    kind: ProblemKind,
    config: &SolverConfig,
) -> Result<Solution, SolverError> {
    let init = harmonic_extension(&mesh, data)?;
    newton_from(mesh, metric, data, kind, config, &init)
}

/// Damped Newton from `initial`, whose boundary entries are replaced by `data`.
pub(crate) fn newton_from(
    mesh: Arc<TriMesh>,
    metric: &ConformalMetric,
    data: &DirichletData,
    kind: ProblemKind,
    config: &SolverConfig,
    initial: &[f64],
) -> Result<Solution, SolverError> {
    kind.validate()?;
    config.validate()?;
    let mut u = with_boundary(&mesh, data, initial)?;
    if let Some(node) = u.iter().position(|x| !x.is_finite()) {
        return Err(SolverError::NonFinite { node });
    }
    let elems = elements(&mesh, metric)?;
    let (map, interior) = dof_map(&mesh);
    let n = interior.len();
    let mut r = residual_with(&elems, &map, n, &u, kind);
    let r0 = norm(&r);
    let tol = (config.rel_tol * r0)
        .max(config.abs_tol)
        .max(noise_floor(&elems, &u, kind));
    let mut rn = r0;
    let mut iterations = 0;
    let solution = |u: Vec<f64>, residual: f64, iterations: usize, converged: bool| Solution {
        mesh: mesh.clone(),
        u,
        kind,
        cap: data.cap,
        residual,
        iterations,
        converged,
    };
    while rn > tol {
        if iterations == config.max_iterations {
            return Ok(solution(u, rn, iterations, false));
        }
        iterations += 1;
        let j: SparseMatrix = jacobian_with(&elems, &map, n, &u, kind);
        let rhs: Vec<f64> = r.iter().map(|x| -x).collect();
        let step = j.solve(&rhs).ok_or(SolverError::Singular { iteration: iterations })?;
        let mut t = 1.0;
        loop {
            let mut trial = u.clone();
            for (i, &v) in interior.iter().enumerate() {
                trial[v] += t * step[i];
            }
            let rt = residual_with(&elems, &map, n, &trial, kind);
            let nt = norm(&rt);
            if nt.is_finite() && nt <= (1.0 - config.armijo_slope * t) * rn {
                u = trial;
                r = rt;
                rn = nt;
                break;
            }
            t *= 0.5;
            if t < config.min_step {
                return Err(SolverError::Stall {
                    iterate: Box::new(solution(u, rn, iterations, false)),
                });
            }
        }
    }
    Ok(solution(u, rn, iterations, true))
}
