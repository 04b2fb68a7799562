//! Capped continuation of a translator over the square with one infinite side.

use std::sync::Arc;

use jsgraph::domain::presets::rectangle;
use jsgraph::domain::ArcKind;
use jsgraph::mesh::generate_mesh;
use jsgraph::solver::{continuation_solve, ProblemKind, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use ArcKind::{A, C};
    let spec = rectangle("one-a", (0.0, 1.0), (0.0, 1.0), [A, C, C, C], "0")?;
    let mesh = Arc::new(generate_mesh(&spec, 0.1, 1.0)?);
    let config = SolverConfig {
        caps: vec![1.0, 2.0, 4.0, 8.0, 16.0],
        ..SolverConfig::default()
    };
    let run = continuation_solve(&spec, mesh, ProblemKind::Translator { c: 1.0 }, &config)?;
    println!("{:>5} {:>6} {:>11} {:>13} {:>10}", "cap", "iters", "violations", "interior Δ", "max u");
    for c in &run.caps {
        let change = c.interior_change.map_or("-".to_string(), |d| format!("{d:.3e}"));
        println!(
            "{:>5} {:>6} {:>11} {:>13} {:>10.4}",
            c.cap, c.iterations, c.monotone_violations, change, c.max_interior_value
        );
    }
    println!("status {:?}, tolerance {:.3e}", run.status, run.eps_js);
    Ok(())
}
