//! Compare EGSR against random, volume and uniform refinement across budgets
//! using a configuration file.
//!
//! ```text
//! cargo run --release --example refinement_comparison -- [config.toml]
//! ```

use twinforge::harness::{ExperimentConfig, Method};

fn main() -> twinforge::Result<()> {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/examples/configs/small.toml").to_string());
    let config = ExperimentConfig::load(path.as_ref())?;
    let results = twinforge::harness::run_refinement_comparison(&config)?;

    println!("{:>9} {:>4} {:>6} {:>10} {:>10} {:>10}", "scenario", "W", "method", "rmse_all", "rmse_cov", "ssbf");
    for row in &results.rows {
        let marker = if row.method == Method::Egsr { "*" } else { "" };
        println!(
            "{:>9} {:>4} {:>6} {:>10.3} {:>10.3} {:>10.4}{marker}",
            row.scenario,
            row.budget,
            row.method.name(),
            row.rmse_all,
            row.rmse_cov,
            row.ssbf_loss.unwrap_or(f64::NAN)
        );
    }
    Ok(())
}
