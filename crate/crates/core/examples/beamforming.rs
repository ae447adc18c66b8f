//! MRT beamforming designed on the low-fidelity twin and on an EGSR-refined
//! twin, evaluated on the reference scene.

use twinforge::egsr::{score_scene, select_top_w, EgsrParams};
use twinforge::harness::{bf_evaluate, ExperimentConfig};
use twinforge::metrics::ssbf_loss;
use twinforge::scene::{apply_refinement, degrade_scene, generate_synthetic_city, CityParams, DegradeParams};

fn main() -> twinforge::Result<()> {
    let mut config = ExperimentConfig::default();
    config.radio.max_depth = 2;
    let hi = generate_synthetic_city(2, 40, 300.0, &CityParams::default())?;
    let low = degrade_scene(&hi, &DegradeParams::default(), 2)?.scene;
    let tx = config.radio.tx_at(hi.tx.position);

    let table = score_scene(&low, &tx, &EgsrParams::default())?;
    let refined = apply_refinement(&low, &hi, &select_top_w(&table, 10))?;

    for (name, hat) in [("low-fidelity", &low), ("egsr W=10", &refined), ("reference", &hi)] {
        let eval = bf_evaluate(hat, &hi, &tx, &config)?;
        let at = |g: f64| eval.ccdf[eval.gamma.iter().position(|x| (*x - g).abs() < 1e-9).unwrap()];
        println!(
            "{name:>13}: {} receivers, SSBF loss {:.4}, P(G >= 0.9) = {:.3}, P(G >= 0.99) = {:.3}",
            eval.gains.len(),
            ssbf_loss(&eval.gains),
            at(0.9),
            at(0.99)
        );
    }
    Ok(())
}
