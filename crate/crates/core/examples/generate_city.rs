//! Generate a synthetic city, degrade it into a low-fidelity twin and save
//! both as scene JSON.
//!
//! ```text
//! cargo run --example generate_city -- [seed] [out_dir]
//! ```

use std::path::PathBuf;

use twinforge::scene::{degrade_scene, generate_synthetic_city, load_scene, save_scene, CityParams, DegradeParams};

fn main() -> twinforge::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map(|s| s.parse().expect("seed")).unwrap_or(0);
    let out = args.next().map(PathBuf::from).unwrap_or_else(std::env::temp_dir);
    std::fs::create_dir_all(&out).map_err(|e| twinforge::Error::io(&out, e))?;

    let hi = generate_synthetic_city(seed, 60, 400.0, &CityParams::default())?;
    let degraded = degrade_scene(&hi, &DegradeParams::default(), seed)?;
    for w in &degraded.warnings {
        eprintln!("warning: {w}");
    }
    let low = degraded.scene;

    println!("seed {seed}: {} buildings, terrain {}x{} cells of {} m", hi.buildings.len(), hi.terrain.nx, hi.terrain.ny, hi.terrain.cell_size);
    println!("transmitter at {:?}, {:.2} GHz", hi.tx.position.as_slice(), hi.tx.frequency_hz / 1e9);
    println!("{:>4} {:>10} {:>10} {:>9} {:>9}", "id", "verts(hi)", "verts(lo)", "h_hi", "h_lo");
    for (a, b) in hi.buildings.iter().zip(&low.buildings).take(8) {
        println!("{:>4} {:>10} {:>10} {:>9.2} {:>9.2}", a.id, a.footprint.len(), b.footprint.len(), a.height, b.height);
    }

    let (hi_path, low_path) = (out.join("scene_hi.json"), out.join("scene_low.json"));
    save_scene(&hi, &hi_path)?;
    save_scene(&low, &low_path)?;
    assert_eq!(load_scene(&hi_path)?, hi);
    println!("wrote {} and {}", hi_path.display(), low_path.display());
    Ok(())
}
