//! Daily revenue per exahash against price and hash rate on the bundled
//! market sample.
//!
//! ```text
//! cargo run --example correlate
//! ```

use std::path::Path;

use blockwatt::estimators::{network_hash_rate, pearson_correlation, revenue_per_exahash};
use blockwatt::ingest::{load_market_csv, resample_daily, ResamplePolicy};
use blockwatt::units::ChainSpec;

fn main() -> blockwatt::Result<()> {
    let spec = ChainSpec::bitcoin();
    let market =
        load_market_csv(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/market_2019_2020.csv"))?;
    let daily = resample_daily(&market, ResamplePolicy::ForwardFill)?;

    let mut revenue = Vec::new();
    let mut price = Vec::new();
    let mut hash_rate = Vec::new();
    for s in daily.samples() {
        revenue.push(revenue_per_exahash(s, &spec)?);
        price.push(s.price_usd);
        hash_rate.push(network_hash_rate(
            s.difficulty,
            spec.target_block_time,
            &spec,
        )?);
    }
    println!("{} days", daily.len());
    println!(
        "corr(revenue, price)     = {:+.3}",
        pearson_correlation(&revenue, &price)?
    );
    println!(
        "corr(revenue, hash rate) = {:+.3}",
        pearson_correlation(&revenue, &hash_rate)?
    );
    println!(
        "corr(price, hash rate)   = {:+.3}",
        pearson_correlation(&price, &hash_rate)?
    );
    Ok(())
}
