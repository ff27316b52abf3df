//! Per-transaction energy from proof-of-work down to a central database, on
//! a log scale.
//!
//! ```text
//! cargo run --example compare_architectures
//! ```

use blockwatt::netenergy::{compare_architectures, default_comparison, visa_baseline};

fn main() -> blockwatt::Result<()> {
    let mut archs = default_comparison();
    archs.extend(visa_baseline());
    let report = compare_architectures(&archs)?;
    for row in report.rows() {
        let bar = "#".repeat((row.order_of_magnitude + 3).max(0) as usize);
        println!("{:<40} {:>10.3e} J  {bar}", row.name, row.energy_per_tx);
    }
    Ok(())
}
