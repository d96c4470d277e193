//! Regenerates the bundled meshes in `data/`.
//!
//! ```text
//! cargo run -p sbdyn-std --example make_meshes -- data
//! ```

use std::path::PathBuf;

use sbdyn_std::mesh_io::{format_obj, LengthUnit};
use sbdyn_core::shape_model::primitives;

fn main() -> std::io::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "data".into()));
    std::fs::create_dir_all(&dir)?;
    let cube = primitives::cube(1.0);
    std::fs::write(dir.join("cube.obj"), format_obj(&cube, LengthUnit::Meters, "unit cube centered on the origin"))?;
    let itokawa = primitives::itokawa_like();
    std::fs::write(
        dir.join("itokawa_64.obj"),
        format_obj(&itokawa, LengthUnit::Kilometers, "64-face Itokawa-like body, 535 x 294 x 209 m"),
    )?;
    Ok(())
}
