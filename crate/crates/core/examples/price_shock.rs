//! A one-epoch 40 % price drop: the marginal cohorts switch off, the epoch
//! runs long, and the hash rate returns with the price.
//!
//! ```text
//! cargo run --example price_shock
//! ```

use std::path::Path;

use blockwatt::ingest::load_scenario;
use blockwatt::minesim::run_simulation;

fn main() -> blockwatt::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/scenarios/price_shock.scenario");
    let config = load_scenario(&path)?;
    let trace = run_simulation(&config)?;
    let peak = trace
        .records
        .iter()
        .map(|r| r.hash_rate)
        .fold(0.0, f64::max);

    for r in &trace.records {
        let bar = "=".repeat((40.0 * r.hash_rate / peak).round() as usize);
        println!(
            "epoch {:>2}  price {:>6}  block time {:>6.1} s  {bar}",
            r.epoch_index,
            r.price_usd,
            r.mean_block_time(&config.spec)
        );
    }
    Ok(())
}
