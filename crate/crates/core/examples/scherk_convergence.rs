//! Mesh convergence of the minimal solver against Scherk's surface.

use std::sync::Arc;

use jsgraph::domain::presets::scherk_square;
use jsgraph::mesh::generate_mesh;
use jsgraph::oracles::scherk;
use jsgraph::solver::{newton_solve, DirichletData, ProblemKind, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = scherk_square(1.4);
    let exact = |p: jsgraph::geom::Point| scherk(p.x, p.y).expect("inside the square");
    let mut previous: Option<f64> = None;
    for h in [0.2, 0.1, 0.05] {
        let mesh = Arc::new(generate_mesh(&spec, h, 1.0)?);
        let data = DirichletData::from_fn(&mesh, exact)?;
        let sol = newton_solve(mesh.clone(), &spec.metric, &data, ProblemKind::Minimal, &SolverConfig::default())?;
        let err = mesh
            .interior_nodes()
            .into_iter()
            .map(|v| (sol.u[v] - exact(mesh.vertices[v])).abs())
            .fold(0.0, f64::max);
        let order = previous.map_or(String::new(), |e| format!("order {:.2}", (e / err).log2()));
        println!("h = {h:<5} iterations {} error {err:.3e} {order}", sol.iterations);
        previous = Some(err);
    }
    Ok(())
}
