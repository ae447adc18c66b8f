//! The relevance ellipsoid of one transmitter-receiver pair and its overlap
//! with a single building prism, for a range of excess path lengths.

use twinforge::geometry::{build_proxy, overlap_volume, primary_los_blocker, vertical_overlap_thickness, Ellipsoid};
use twinforge::scene::{Building, Fidelity};
use twinforge::{Vec2, Vec3};

fn main() -> twinforge::Result<()> {
    let tx = Vec3::new(0.0, 0.0, 25.0);
    let rx = Vec3::new(200.0, 0.0, 1.5);
    let building = Building {
        id: 7,
        footprint: vec![Vec2::new(90.0, -15.0), Vec2::new(120.0, -15.0), Vec2::new(120.0, 10.0), Vec2::new(90.0, 10.0)],
        base_z: 0.0,
        height: 18.0,
        fidelity: Fidelity::High,
    };
    let proxy = build_proxy(&building)?;
    let blocker = primary_los_blocker(&tx, &rx, std::slice::from_ref(&proxy));
    println!("direct path first blocked by {blocker:?}");

    println!("{:>6} {:>8} {:>8} {:>12} {:>12} {:>9} {:>7}", "delta", "a", "b", "Vol(E)", "overlap", "rho", "tau(c)");
    for delta in [1.0, 5.0, 10.0, 30.0, 50.0, 100.0] {
        let e = Ellipsoid::new(tx, rx, delta);
        let est = overlap_volume(&proxy, &e, 2.0, 42);
        let tau = vertical_overlap_thickness(&e, Vec2::new(105.0, 0.0), proxy.z_low, proxy.z_high);
        println!(
            "{delta:>6.1} {:>8.2} {:>8.2} {:>12.1} {:>12.1} {:>9.5} {:>7.2}",
            e.semi_major,
            e.semi_minor,
            e.volume(),
            est.volume,
            est.rho,
            tau
        );
    }
    Ok(())
}
