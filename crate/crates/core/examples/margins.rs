//! Mining margins of three hardware generations across the 2020 halving,
//! read from the bundled market sample.
//!
//! ```text
//! cargo run --example margins
//! ```

use std::path::Path;

use blockwatt::estimators::{breakeven_tariff, relative_margin, revenue_per_exahash};
use blockwatt::ingest::load_market_csv;
use blockwatt::units::{ChainSpec, HardwareCatalog, Tariff};

fn main() -> blockwatt::Result<()> {
    let spec = ChainSpec::bitcoin();
    let catalog = HardwareCatalog::bundled();
    let tariff = Tariff::new(0.05)?;
    let market =
        load_market_csv(&Path::new(env!("CARGO_MANIFEST_DIR")).join("data/market_2019_2020.csv"))?;
    let window = market.window(
        Some("2020-04-27".parse().unwrap()),
        Some("2020-06-01".parse().unwrap()),
    );

    print!("{:<10}  {:>8}", "date", "USD/EH");
    for d in catalog.profiles() {
        print!("  {:>15}", d.name());
    }
    println!();
    for sample in window.samples() {
        let rate = revenue_per_exahash(sample, &spec)?;
        print!("{}  {rate:>8.3}", sample.date);
        for d in catalog.profiles() {
            print!("  {:>+15.3}", relative_margin(d, tariff, rate)?);
        }
        println!();
    }

    let after = window.last().expect("window is not empty");
    let rate = revenue_per_exahash(after, &spec)?;
    for d in catalog.profiles() {
        println!(
            "{} breaks even below {:.4} USD/kWh on {}",
            d.name(),
            breakeven_tariff(d, rate)?,
            after.date
        );
    }
    Ok(())
}
