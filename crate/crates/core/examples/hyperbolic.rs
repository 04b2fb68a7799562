//! Check and capped continuation over a domain in the Poincaré disk.

use std::sync::Arc;

use jsgraph::domain::presets::polygon;
use jsgraph::domain::{check_minimal, ArcKind, DomainSpec};
use jsgraph::geom::Point;
use jsgraph::mesh::generate_mesh;
use jsgraph::metric::ConformalMetric;
use jsgraph::solver::{continuation_solve, ProblemKind, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use ArcKind::{A, C};
    // the bottom side lies on a diameter, hence is a hyperbolic geodesic
    let vertices = [Point::new(-0.5, 0.0), Point::new(0.5, 0.0), Point::new(0.4, 0.5), Point::new(-0.4, 0.5)];
    let flat = polygon("poincare-trapezoid", &vertices, &[A, C, C, C], "0")?;
    let spec = DomainSpec::new(flat.name.clone(), ConformalMetric::poincare_disk(1.0)?, flat.arcs)?;
    let report = check_minimal(&spec)?;
    println!("check {:?} over {} polygons", report.verdict, report.polygons.len());
    let mesh = Arc::new(generate_mesh(&spec, 0.04, 1.0)?);
    let config = SolverConfig {
        caps: vec![1.0, 2.0, 4.0, 8.0],
        ..SolverConfig::default()
    };
    let run = continuation_solve(&spec, mesh, ProblemKind::Minimal, &config)?;
    println!("{} nodes farther than {:.2} from the infinite side", run.far_nodes, run.delta);
    for c in &run.caps {
        println!("cap {:>3} iterations {:>2} max interior value {:.4}", c.cap, c.iterations, c.max_interior_value);
    }
    Ok(())
}
