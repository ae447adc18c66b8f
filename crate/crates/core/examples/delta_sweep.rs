//! Sensitivity of EGSR to the excess path length Δ at a fixed budget.

use twinforge::harness::{run_delta_sweep, DeltaSweep, ExperimentConfig};

fn main() -> twinforge::Result<()> {
    let mut config = ExperimentConfig::default();
    config.seeds = vec![0];
    config.scene.n_buildings = 40;
    config.scene.extent = 300.0;
    config.radio.max_depth = 2;
    config.delta_sweep = DeltaSweep { deltas: vec![5.0, 10.0, 30.0, 50.0, 100.0, 150.0], budget: 10 };
    let results = run_delta_sweep(&config)?;
    println!("{:>6} {:>10} {:>10} {:>14}", "delta", "rmse_cov", "rmse_all", "mean Vol(E)");
    for r in &results.rows {
        println!("{:>6.0} {:>10.3} {:>10.3} {:>14.3e}", r.delta, r.rmse_cov, r.rmse_all, r.mean_ellipsoid_volume);
    }
    Ok(())
}
