//! Meshes a lens domain and prints quality figures and the jsmesh header.

use jsgraph::domain::presets::lens;
use jsgraph::domain::ArcKind;
use jsgraph::mesh::{generate_mesh, write_jsmesh};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let spec = lens(1.0, 1.2, ArcKind::A, 1.0, "0")?;
    for h in [0.2, 0.1, 0.05] {
        let mesh = generate_mesh(&spec, h, 2.0)?;
        println!(
            "h = {h:<5} nodes {:>5} triangles {:>5} min angle {:5.1} deg area {:.6}",
            mesh.vertices.len(),
            mesh.triangles.len(),
            mesh.min_angle_deg(),
            mesh.total_area()
        );
    }
    let text = write_jsmesh(&generate_mesh(&spec, 0.3, 1.0)?);
    for line in text.lines().take(4) {
        println!("{line}");
    }
    Ok(())
}
