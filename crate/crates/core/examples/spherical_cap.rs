//! Constant mean curvature graph over the unit disk against the lower spherical cap.

use std::sync::Arc;

use jsgraph::domain::presets::disk;
use jsgraph::geom::Point;
use jsgraph::mesh::generate_mesh;
use jsgraph::oracles::spherical_cap;
use jsgraph::solver::{newton_solve, DirichletData, ProblemKind, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = disk("unit-disk", Point::new(0.0, 0.0), 1.0, "-sqrt(3)")?;
    for h in [0.2, 0.1, 0.05] {
        let mesh = Arc::new(generate_mesh(&spec, h, 1.0)?);
        let data = DirichletData::capped(&spec, &mesh, 1.0)?;
        let sol = newton_solve(mesh.clone(), &spec.metric, &data, ProblemKind::Cmc { h0: 1.0 }, &SolverConfig::default())?;
        let err = mesh
            .interior_nodes()
            .into_iter()
            .map(|v| {
                let p = mesh.vertices[v];
                (sol.u[v] - spherical_cap(p.x, p.y, 2.0).expect("inside")).abs()
            })
            .fold(0.0, f64::max);
        println!("h = {h:<5} nodes {:>5} error {err:.3e}", mesh.vertices.len());
    }
    Ok(())
}
