//! Build the polar receiver proxy set of a synthetic city and summarize it
//! per distance band.

use std::collections::BTreeMap;

use twinforge::rx_proxy::{build_rx_proxy_set, generate_candidates, RxProxyParams};
use twinforge::scene::{generate_synthetic_city, CityParams};

fn main() -> twinforge::Result<()> {
    let scene = generate_synthetic_city(3, 60, 400.0, &CityParams::default())?;
    let params = RxProxyParams::default();
    let tx = scene.tx.position;

    let candidates = generate_candidates(&scene.terrain, &scene.buildings, tx, params.h_r);
    let set = build_rx_proxy_set(&scene.terrain, &scene.buildings, tx, &params)?;
    println!("{} outdoor candidates reduced to {} proxies", candidates.len(), set.len());

    let mut per_band: BTreeMap<usize, (usize, f64, f64)> = BTreeMap::new();
    for (rep, cell) in set.representatives.iter().zip(&set.cells) {
        let e = per_band.entry(cell.band).or_insert((0, f64::INFINITY, 0.0));
        e.0 += 1;
        e.1 = e.1.min(rep.r);
        e.2 = e.2.max(rep.r);
    }
    println!("{:>5} {:>8} {:>8} {:>8} {:>8}", "band", "spacing", "proxies", "r_min", "r_max");
    for (band, (n, lo, hi)) in per_band {
        println!("{band:>5} {:>8.2} {n:>8} {lo:>8.1} {hi:>8.1}", params.spacings[band - 1]);
    }

    let path = std::env::temp_dir().join("rx_proxies.csv");
    set.write_csv(&path)?;
    println!("wrote {}", path.display());
    Ok(())
}
