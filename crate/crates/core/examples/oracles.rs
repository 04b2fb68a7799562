//! Closed-form solutions and their divergence identities.

use jsgraph::oracles::{identity_csv, identity_table};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for step in [1e-2, 1e-3] {
        let rows = identity_table(step)?;
        let worst = rows.iter().map(|r| r.abs_error).fold(0.0, f64::max);
        println!("step {step:e}: worst identity error {worst:.2e}");
    }
    print!("{}", identity_csv(&identity_table(1e-3)?));
    Ok(())
}
