//! Building-removal ablation: how much each building moves the radio map
//! when deleted, and how unequal that influence is.

use twinforge::harness::{Experiment, ExperimentConfig};

fn main() -> twinforge::Result<()> {
    let mut config = ExperimentConfig::default();
    config.seeds = vec![0];
    config.radio.max_depth = 2;
    let exp = Experiment::new(config)?;
    let results = exp.run_ablation()?;

    for entry in &results.entries {
        let report = &entry.report;
        println!("{} {}: {} receivers", entry.scenario, entry.tx, entry.receivers);
        println!("  Gini of impact strength: {:.3}", report.gini());
        println!("  {:>4} {:>4} {:>10} {:>8}", "rank", "id", "S [dB]", "range");
        for (rank, id) in report.ordering().into_iter().take(10).enumerate() {
            let row = report.rows.iter().find(|r| r.building_id == id).expect("row");
            println!("  {:>4} {id:>4} {:>10.4} {:>8.4}", rank + 1, row.strength_db, row.range);
        }
    }
    print!("{}", results.summary_table().to_csv(Some(&exp.provenance())));
    Ok(())
}
