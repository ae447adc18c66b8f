//! Trace the reference radio map of a synthetic city, inspect the paths to
//! one receiver and form its array channel.

use twinforge::metrics::coverage_set;
use twinforge::raytrace::{RayConfig, Tracer, NO_COVERAGE};
use twinforge::scene::{generate_synthetic_city, CityParams};
use twinforge::{Vec2, Vec3};

fn main() -> twinforge::Result<()> {
    let scene = generate_synthetic_city(0, 60, 400.0, &CityParams::default())?;
    let depth = std::env::args().nth(1).map(|s| s.parse().expect("depth")).unwrap_or(2);
    let start = std::time::Instant::now();
    let tracer = Tracer::new(&scene, &scene.tx, &RayConfig::with_depth(depth));
    let map = tracer.radio_map(&scene, 1.5);
    println!(
        "{}x{} map at depth {depth}: {} beams, traced in {:.2?}",
        map.nx,
        map.ny,
        tracer.beam_count(),
        start.elapsed()
    );
    let finite = map.values.iter().filter(|v| **v > NO_COVERAGE).count();
    println!("{finite} cells reached");

    let covered = coverage_set(&map, -80.0);
    let position = |k: usize| {
        let c = map.origin + Vec2::new((k % map.nx) as f64 + 0.5, (k / map.nx) as f64 + 0.5) * map.cell_size;
        Vec3::new(c.x, c.y, 1.5)
    };
    let rx = covered
        .iter()
        .map(|&k| position(k))
        .max_by_key(|rx| tracer.paths_to(rx).len())
        .expect("some covered cell");
    let paths = tracer.paths_to(&rx);
    println!("richest receiver {:?}: {} paths, gain {:.2} dB", rx.as_slice(), paths.len(), tracer.gain_db(&rx));
    for p in &paths {
        println!("  order {} via {:?}: {:.2} m, |a| = {:.3e}", p.order, p.buildings, p.length, p.amplitude.norm());
    }
    let h = tracer.channel(&rx);
    let energy: f64 = h.iter().map(|c| c.norm_sqr()).sum();
    println!("{}-element channel energy {energy:.3e}", h.len());

    let path = std::env::temp_dir().join("radiomap.csv");
    map.save(&path, &["example radio map".to_string()])?;
    println!("wrote {}", path.display());
    Ok(())
}
