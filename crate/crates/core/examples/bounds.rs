//! Lower and upper bounds of Bitcoin's electricity consumption in early 2020.
//!
//! ```text
//! cargo run --example bounds
//! ```

use blockwatt::estimators::{
    lower_bound_power, network_hash_rate, upper_bound_power, MarketSample,
};
use blockwatt::units::{ChainSpec, HardwareCatalog, Tariff};

fn main() -> blockwatt::Result<()> {
    let spec = ChainSpec::bitcoin();
    let catalog = HardwareCatalog::bundled();

    // difficulty of about 1.4e13 means 6e22 expected hashes per block
    let difficulty = 6e22 / spec.hashes_per_difficulty_unit;
    let sample = MarketSample::new("2020-02-10".parse().unwrap(), 9100.0, difficulty, 12.5)?;
    let hash_rate = network_hash_rate(difficulty, spec.target_block_time, &spec)?;
    println!("hash rate: {:.1} EH/s", hash_rate / 1e18);

    for device in catalog.profiles() {
        let lower = lower_bound_power(hash_rate, device.efficiency())?;
        println!(
            "lower bound, every hash on {:<15} {:>6.1} TWh/yr",
            device.name(),
            lower.annual_energy()
        );
    }
    let best = catalog.best_for_year(2020).expect("catalog covers 2020");
    println!("'best' device for 2020 samples: {}", best.name());

    for tariff in [0.025, 0.05] {
        let upper = upper_bound_power(&sample, &spec, Tariff::new(tariff)?)?;
        println!(
            "upper bound at {tariff} USD/kWh: {:>6.1} TWh/yr",
            upper.annual_energy()
        );
    }
    Ok(())
}
