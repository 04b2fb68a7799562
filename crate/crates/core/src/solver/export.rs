//! Solution export: CSV `x,y,u` per node plus a JSON metadata sidecar.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use super::{ProblemKind, Solution, SolverError};
use crate::mesh::TriMesh;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionMeta {
    pub kind: ProblemKind,
    pub cap: Option<f64>,
    pub residual: f64,
    pub iterations: usize,
    pub converged: bool,
    /// Path of the jsmesh file the nodal values belong to.
    pub mesh: String,
    pub nodes: usize,
}

impl SolutionMeta {
    pub fn new(sol: &Solution, mesh_path: &str) -> Self {
        Self {
            kind: sol.kind,
            cap: sol.cap,
            residual: sol.residual,
            iterations: sol.iterations,
            converged: sol.converged,
            mesh: mesh_path.to_string(),
            nodes: sol.u.len(),
        }
    }
}

pub fn solution_csv(sol: &Solution) -> String {
    let mut s = String::from("x,y,u\n");
    for (p, u) in sol.mesh.vertices.iter().zip(&sol.u) {
        let _ = writeln!(s, "{},{},{}", p.x, p.y, u);
    }
    s
}

/// Nodal values from CSV, checked against the mesh coordinates.
pub fn read_solution_csv(text: &str, mesh: &TriMesh) -> Result<Vec<f64>, SolverError> {
    let bad = |m: String| SolverError::InvalidParameter(m);
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    if lines.next().map(str::trim) != Some("x,y,u") {
        return Err(bad("solution CSV must start with the header 'x,y,u'".into()));
    }
    let mut u = Vec::with_capacity(mesh.vertices.len());
    for (k, line) in lines.enumerate() {
        let f: Vec<f64> = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|_| bad(format!("row {} is not three numbers", k + 1)))?;
        if f.len() != 3 {
            return Err(bad(format!("row {} is not three numbers", k + 1)));
        }
        let p = mesh
            .vertices
            .get(k)
            .ok_or_else(|| bad("more rows than mesh nodes".into()))?;
        if p.x != f[0] || p.y != f[1] {
            return Err(bad(format!("row {} does not match mesh node coordinates", k + 1)));
        }
        u.push(f[2]);
    }
    if u.len() != mesh.vertices.len() {
        return Err(bad(format!("{} rows for {} mesh nodes", u.len(), mesh.vertices.len())));
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::presets::scherk_square;
    use crate::mesh::generate_mesh;
    use std::sync::Arc;

    #[test]
    fn csv_round_trip() {
        let m = Arc::new(generate_mesh(&scherk_square(1.0), 0.3, 1.0).unwrap());
        let u: Vec<f64> = m.vertices.iter().map(|p| p.x.sin() / 3.0 + p.y).collect();
        let sol = Solution {
            mesh: m.clone(),
            u: u.clone(),
            kind: ProblemKind::Minimal,
            cap: None,
            residual: 0.0,
            iterations: 0,
            converged: true,
        };
        assert_eq!(read_solution_csv(&solution_csv(&sol), &m).unwrap(), u);
        let meta = SolutionMeta::new(&sol, "mesh.jsmesh");
        let back: SolutionMeta = serde_json::from_str(&serde_json::to_string(&meta).unwrap()).unwrap();
        assert_eq!(back, meta);
    }
}
