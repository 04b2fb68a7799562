//! Structural checks on a few preset domains, printing verdicts and certificates.

use jsgraph::domain::presets::{lens, rectangle, scherk_square};
use jsgraph::domain::{check_cmc, check_minimal, check_translating, ArcKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    use ArcKind::{A, C};
    let reports = [
        check_minimal(&scherk_square(1.0))?,
        check_translating(&rectangle("one-a", (0.0, 1.0), (0.0, 1.0), [A, C, C, C], "0")?)?,
        check_translating(&rectangle("two-a", (0.0, 1.0), (0.0, 1.0), [C, A, C, A], "0")?)?,
        check_cmc(&lens(1.0, 1.0, A, 1.0, "0")?, 1.0)?,
    ];
    for r in &reports {
        println!("{:<8} {:?}: {:?} over {} polygons", r.domain, r.mode, r.verdict, r.polygons.len());
        if let Some(c) = &r.certificate {
            println!("         certificate on {} with margin {:.3e}: {}", c.subject, c.margin, c.detail);
        }
    }
    Ok(())
}
