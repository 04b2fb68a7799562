//! Weighted area, randomized minimality and entropy of a translator graph.

use std::sync::Arc;

use jsgraph::analysis::{entropy_ratio, minimality_test, weighted_area, GraphSurface, MinimalityConfig};
use jsgraph::domain::presets::rectangle;
use jsgraph::domain::ArcKind;
use jsgraph::mesh::generate_mesh;
use jsgraph::solver::{newton_solve, DirichletData, ProblemKind, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use ArcKind::C;
    let spec = rectangle("strip", (-1.2, 1.2), (0.0, 1.0), [C, C, C, C], "-ln(cos(x))")?;
    let mesh = Arc::new(generate_mesh(&spec, 0.05, 1.0)?);
    let data = DirichletData::capped(&spec, &mesh, 1.0)?;
    let sol = newton_solve(mesh, &spec.metric, &data, ProblemKind::Translator { c: 1.0 }, &SolverConfig::default())?;
    let surface = GraphSurface::from_solution(&sol, &spec.metric)?;
    println!("area {:.6}, weighted area {:.6}", surface.area(), weighted_area(&surface, 1.0)?.value);
    let report = minimality_test(&sol, &spec.metric, &MinimalityConfig::default())?;
    println!(
        "minimality: {}/{} trials failed, margins {:.2e} / {:.2e}",
        report.failures, report.trials, report.min_first_margin, report.min_second_margin
    );
    let entropy = entropy_ratio(&surface, &[[0.0, 0.5, 0.3], [0.5, 0.5, 0.5]], &[0.25, 0.5])?;
    println!("entropy ratio sup {:.4} at {:?}", entropy.sup, entropy.argmax);
    Ok(())
}
