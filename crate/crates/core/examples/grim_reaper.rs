//! Translator on a strip: finite elements against the grim reaper and a shooting profile.

use std::sync::Arc;

use jsgraph::domain::presets::rectangle;
use jsgraph::domain::ArcKind;
use jsgraph::mesh::generate_mesh;
use jsgraph::oracles::{grim_reaper, ode_shoot, OdeKind};
use jsgraph::solver::{newton_solve, DirichletData, ProblemKind, SolverConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use ArcKind::C;
    let spec = rectangle("strip", (-1.2, 1.2), (0.0, 1.0), [C, C, C, C], "-ln(cos(x))")?;
    let mesh = Arc::new(generate_mesh(&spec, 0.05, 1.0)?);
    let data = DirichletData::capped(&spec, &mesh, 1.0)?;
    let sol = newton_solve(mesh, &spec.metric, &data, ProblemKind::Translator { c: 1.0 }, &SolverConfig::default())?;
    let edge = grim_reaper(1.2, 1.0)?;
    let profile = ode_shoot(OdeKind::Translator { c: 1.0 }, (-1.2, 1.2), Some(edge), edge, 2401)?;
    println!("{:>6} {:>12} {:>12} {:>12}", "x", "fem", "exact", "shooting");
    for i in 0..=8 {
        let x = -1.1 + 2.2 * i as f64 / 8.0;
        let fem = sol.eval(jsgraph::geom::Point::new(x, 0.5)).unwrap_or(f64::NAN);
        let ode = profile.eval(x).unwrap_or(f64::NAN);
        println!("{x:>6.3} {fem:>12.6} {:>12.6} {ode:>12.6}", grim_reaper(x, 1.0)?);
    }
    Ok(())
}
