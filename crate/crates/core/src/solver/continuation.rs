use std::sync::Arc;

use serde::Serialize;

use super::newton::{harmonic_extension, newton_from};
use super::{DirichletData, ProblemKind, Solution, SolverConfig, SolverError};
use crate::domain::{check_cmc, check_minimal, check_translating, ArcKind, DomainSpec, Verdict};
use crate::mesh::{Marker, TriMesh};

/// Per-cap diagnostics of a continuation run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapRecord {
    pub cap: f64,
    pub iterations: usize,
    /// Number of data-homotopy solves used to reach this cap.
    pub substeps: usize,
    pub residual: f64,
    /// Monotonicity slack `1e-8·(1 + cap)`.
    pub slack: f64,
    /// `min (u_k − u_{k−1})` over all nodes; absent for the first cap.
    pub min_increment: Option<f64>,
    pub monotone_violations: usize,
    /// `max |u_k − u_{k−1}|` over interior nodes at distance ≥ δ from blow-up arcs.
    pub interior_change: Option<f64>,
    pub max_interior_value: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum JsStatus {
    /// Interior values settled within ε_JS.
    Converged,
    /// All caps solved but interior values did not settle.
    NotConverged,
    /// The capped sequence failed to be monotone beyond slack.
    DiscretizationFailure,
}

#[derive(Debug, Clone, Serialize)]
pub struct ContinuationResult {
    pub kind: ProblemKind,
    pub check_verdict: Verdict,
    pub check_overridden: bool,
    pub delta: f64,
    pub eps_js: f64,
    pub far_nodes: usize,
    pub caps: Vec<CapRecord>,
    /// First cap whose interior change is below ε_JS.
    pub converged_at: Option<f64>,
    pub status: JsStatus,
    /// Capped solutions in cap order; the last is the limit candidate.
    #[serde(skip)]
    pub solutions: Vec<Solution>,
}

/// Solves toward `to` from the solution `from_u` of `from`, halving the data step on failure.
fn homotopy(
    mesh: &Arc<TriMesh>,
    spec: &DomainSpec,
    from: &DirichletData,
    from_u: &[f64],
    to: &DirichletData,
    kind: ProblemKind,
    config: &SolverConfig,
) -> Result<(Solution, usize), SolverError> {
    let (mut done, mut dt) = (0.0f64, 1.0f64);
    let mut u = from_u.to_vec();
    let mut substeps = 0;
    let mut total_iterations = 0;
    loop {
        let t = (done + dt).min(1.0);
        let data = if t == 1.0 { to.clone() } else { from.blend(to, t) };
        substeps += 1;
        match newton_from(mesh.clone(), &spec.metric, &data, kind, config, &u) {
            Ok(s) if s.converged => {
                total_iterations += s.iterations;
                done = t;
                u = s.u.clone();
                if done == 1.0 {
                    let mut s = s;
                    s.iterations = total_iterations;
                    return Ok((s, substeps));
                }
                dt = (2.0 * dt).min(1.0);
            }
            Ok(_) | Err(SolverError::Stall { .. }) | Err(SolverError::Singular { .. }) => {
                dt *= 0.5;
                if dt < 1.0 / 1024.0 {
                    return Err(SolverError::InvalidParameter(format!(
                        "data homotopy failed at fraction {done}"
                    )));
                }
            }
            Err(e) => return Err(e),
        }
    }
}

/// Capped monotone continuation: solves with caps `n_k` warm-started from the
/// previous cap, checks nodal monotonicity and interior convergence away from
/// blow-up arcs.
pub fn continuation_solve(
    spec: &DomainSpec,
    mesh: Arc<TriMesh>,
    kind: ProblemKind,
    config: &SolverConfig,
) -> Result<ContinuationResult, SolverError> {
    kind.validate()?;
    config.validate()?;
    let report = match kind {
        ProblemKind::Minimal => check_minimal(spec)?,
        ProblemKind::Cmc { h0 } => check_cmc(spec, h0)?,
        ProblemKind::Translator { .. } => check_translating(spec)?,
    };
    if report.verdict != Verdict::Pass && !config.override_check {
        return Err(SolverError::CheckFailed(Box::new(report)));
    }
    let delta = config.delta.unwrap_or(5.0 * mesh.h);
    let eps_js = config.eps_js.unwrap_or(1e-4 * spec.euclidean_diameter());
    let blow_up: Vec<_> = spec
        .arcs
        .iter()
        .filter(|a| a.kind != ArcKind::C)
        .map(|a| &a.geometry)
        .collect();
    let far: Vec<usize> = (0..mesh.vertices.len())
        .filter(|&v| mesh.markers[v] == Marker::Interior)
        .filter(|&v| blow_up.iter().all(|g| g.distance(mesh.vertices[v]) >= delta))
        .collect();

    let mut result = ContinuationResult {
        kind,
        check_verdict: report.verdict,
        check_overridden: report.verdict != Verdict::Pass,
        delta,
        eps_js,
        far_nodes: far.len(),
        caps: Vec::new(),
        converged_at: None,
        status: JsStatus::NotConverged,
        solutions: Vec::new(),
    };
    let mut prev: Option<(DirichletData, Solution)> = None;
    for &cap in &config.caps {
        let data = DirichletData::capped(spec, &mesh, cap)?;
        let attempt = match &prev {
            Some((pd, ps)) => homotopy(&mesh, spec, pd, &ps.u, &data, kind, config),
            None => {
                let zero = DirichletData {
                    values: data.values.iter().map(|v| v.map(|_| 0.0)).collect(),
                    cap: data.cap,
                };
                let init = harmonic_extension(&mesh, &data)?;
                match newton_from(mesh.clone(), &spec.metric, &data, kind, config, &init) {
                    Ok(s) if s.converged => Ok((s, 1)),
                    _ => homotopy(&mesh, spec, &zero, &vec![0.0; init.len()], &data, kind, config),
                }
            }
        };
        let (sol, substeps) = match attempt {
            Ok(x) => x,
            Err(_) => {
                result.status = if result.status == JsStatus::DiscretizationFailure {
                    JsStatus::DiscretizationFailure
                } else {
                    JsStatus::NotConverged
                };
                return Err(SolverError::ContinuationAborted {
                    cap,
                    partial: Box::new(result),
                });
            }
        };
        let slack = 1e-8 * (1.0 + cap);
        let mut rec = CapRecord {
            cap,
            iterations: sol.iterations,
            substeps,
            residual: sol.residual,
            slack,
            min_increment: None,
            monotone_violations: 0,
            interior_change: None,
            max_interior_value: far.iter().map(|&v| sol.u[v]).fold(f64::NEG_INFINITY, f64::max),
        };
        if let Some((_, ps)) = &prev {
            let inc: Vec<f64> = sol.u.iter().zip(&ps.u).map(|(a, b)| a - b).collect();
            rec.min_increment = Some(inc.iter().copied().fold(f64::INFINITY, f64::min));
            rec.monotone_violations = inc.iter().filter(|d| **d < -slack).count();
            if !far.is_empty() {
                let change = far.iter().map(|&v| inc[v].abs()).fold(0.0, f64::max);
                rec.interior_change = Some(change);
                if change < eps_js && result.converged_at.is_none() {
                    result.converged_at = Some(cap);
                }
            }
            if rec.monotone_violations > 0 {
                result.status = JsStatus::DiscretizationFailure;
            }
        }
        result.caps.push(rec);
        result.solutions.push(sol.clone());
        prev = Some((data, sol));
    }
    if result.status != JsStatus::DiscretizationFailure && result.converged_at.is_some() {
        result.status = JsStatus::Converged;
    }
    Ok(result)
}

/// Nodewise ordering of two solutions on the same mesh.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OrderingReport {
    /// `min (sol1 − sol2)` over nodes that are not domain vertices.
    pub min_difference: f64,
    pub argmin: Option<usize>,
    /// Non-vertex nodes with `sol1 − sol2 < −slack`.
    pub violating: Vec<usize>,
    /// `min (sol1 − sol2)` over domain vertices, reported only.
    pub corner_min_difference: Option<f64>,
    pub slack: f64,
    /// Whether `sol1 ≥ sol2` within slack away from domain vertices.
    pub holds: bool,
}

pub fn compare(sol1: &Solution, sol2: &Solution, slack: f64) -> Result<OrderingReport, SolverError> {
    if !Arc::ptr_eq(&sol1.mesh, &sol2.mesh) && *sol1.mesh != *sol2.mesh {
        return Err(SolverError::MeshMismatch);
    }
    let mut min = f64::INFINITY;
    let mut argmin = None;
    let mut corner: Option<f64> = None;
    let mut violating = Vec::new();
    for (v, mk) in sol1.mesh.markers.iter().enumerate() {
        let d = sol1.u[v] - sol2.u[v];
        if matches!(mk, Marker::DomainVertex(_)) {
            corner = Some(corner.map_or(d, |c| c.min(d)));
            continue;
        }
        if d < min {
            min = d;
            argmin = Some(v);
        }
        if d < -slack {
            violating.push(v);
        }
    }
    Ok(OrderingReport {
        min_difference: min,
        argmin,
        holds: violating.is_empty(),
        violating,
        corner_min_difference: corner,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::presets::rectangle;
    use crate::domain::ArcKind::*;
    use crate::mesh::generate_mesh;
    use crate::solver::newton_solve;

    fn one_a_square() -> DomainSpec {
        rectangle("one-a", (0.0, 1.0), (0.0, 1.0), [C, C, C, A], "0").unwrap()
    }

    #[test]
    fn continuation_is_monotone_and_bounded_by_minimal() {
        let d = one_a_square();
        let m = Arc::new(generate_mesh(&d, 0.1, 1.0).unwrap());
        let cfg = SolverConfig {
            caps: vec![1.0, 2.0, 4.0, 8.0],
            ..SolverConfig::default()
        };
        let r = continuation_solve(&d, m.clone(), ProblemKind::Translator { c: 1.0 }, &cfg).unwrap();
        assert_eq!(r.caps.len(), 4);
        for c in &r.caps[1..] {
            assert_eq!(c.monotone_violations, 0, "{c:?}");
        }
        for s in &r.solutions {
            let data = DirichletData::capped(&d, &m, s.cap.unwrap()).unwrap();
            let v = newton_solve(m.clone(), &d.metric, &data, ProblemKind::Minimal, &cfg).unwrap();
            assert!(compare(&v, s, 1e-8).unwrap().holds);
        }
        // boundary trace on C arcs stays 0
        for (v, mk) in m.markers.iter().enumerate() {
            if let Marker::OnArc(k) = mk {
                if d.arcs[*k].kind == C {
                    assert_eq!(r.solutions.last().unwrap().u[v], 0.0);
                }
            }
        }
    }

    #[test]
    fn failing_check_requires_override() {
        let d = rectangle("two-a", (0.0, 1.0), (0.0, 1.0), [C, A, C, A], "0").unwrap();
        let m = Arc::new(generate_mesh(&d, 0.2, 1.0).unwrap());
        let kind = ProblemKind::Translator { c: 1.0 };
        let cfg = SolverConfig {
            caps: vec![1.0, 2.0],
            ..SolverConfig::default()
        };
        assert!(matches!(
            continuation_solve(&d, m.clone(), kind, &cfg),
            Err(SolverError::CheckFailed(_))
        ));
        let cfg = SolverConfig {
            override_check: true,
            ..cfg
        };
        let r = continuation_solve(&d, m, kind, &cfg).unwrap();
        assert!(r.check_overridden);
    }

    #[test]
    fn self_comparison_is_zero() {
        let d = one_a_square();
        let m = Arc::new(generate_mesh(&d, 0.25, 1.0).unwrap());
        let data = DirichletData::capped(&d, &m, 1.0).unwrap();
        let s = newton_solve(m, &d.metric, &data, ProblemKind::Minimal, &SolverConfig::default()).unwrap();
        let r = compare(&s, &s, 0.0).unwrap();
        assert_eq!(r.min_difference, 0.0);
        assert!(r.holds);
    }
}
