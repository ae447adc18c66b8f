//! Rank the buildings of a low-fidelity twin with EGSR, pick a budget and
//! compare against the volume and random baselines.

use twinforge::egsr::{score_scene, select_top_w, EgsrParams};
use twinforge::harness::{baseline_select_random, baseline_select_volume};
use twinforge::scene::{degrade_scene, generate_synthetic_city, CityParams, DegradeParams};

fn main() -> twinforge::Result<()> {
    let hi = generate_synthetic_city(1, 60, 400.0, &CityParams::default())?;
    let low = degrade_scene(&hi, &DegradeParams::default(), 1)?.scene;
    let params = EgsrParams { seed: 1, ..EgsrParams::default() };

    let table = score_scene(&low, &low.tx, &params)?;
    println!("{} buildings scored over {} receiver proxies (delta {} m)", table.ids.len(), table.n_rx, params.delta);
    println!("{:>4} {:>4} {:>12}", "rank", "id", "score");
    for (rank, (id, s)) in table.ranking().into_iter().take(10).enumerate() {
        println!("{:>4} {id:>4} {s:>12.4e}", rank + 1);
    }

    let w = 10;
    let egsr = select_top_w(&table, w);
    let volume = baseline_select_volume(&low, w);
    let random = baseline_select_random(&low, w, 7);
    println!("egsr   {:?}", egsr.selected);
    println!("volume {:?}", volume.selected);
    println!("random {:?}", random.selected);
    println!("egsr ∩ volume: {}", egsr.selected.intersection(&volume.selected).count());
    Ok(())
}
