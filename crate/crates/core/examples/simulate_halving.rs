//! Runs the bundled halving scenario and prints the epoch trace.
//!
//! ```text
//! cargo run --example simulate_halving
//! ```

use std::path::Path;

use blockwatt::ingest::load_scenario;
use blockwatt::minesim::{run_simulation, summarize_trace};
use blockwatt::units::watts_to_twh_per_year;

fn main() -> blockwatt::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/scenarios/halving.scenario");
    let config = load_scenario(&path)?;
    let trace = run_simulation(&config)?;

    println!("epoch  height  subsidy  block_time_s  active  power_twh  revenue_usd_eh");
    for r in &trace.records {
        let active = r.cohorts.values().filter(|c| c.active).count();
        println!(
            "{:>5}  {:>6}  {:>7}  {:>12.1}  {:>6}  {:>9.3}  {:>14.3}",
            r.epoch_index,
            r.height,
            r.subsidy,
            r.mean_block_time(&config.spec),
            active,
            watts_to_twh_per_year(r.power)?,
            r.revenue_rate,
        );
    }

    let summary = summarize_trace(&trace)?;
    println!(
        "mean power: {:.3} TWh/yr",
        watts_to_twh_per_year(summary.mean_power)?
    );
    if let Some(r) = summary.revenue_hash_correlation {
        println!("corr(revenue, hash rate): {r:.3}");
    }
    Ok(())
}
