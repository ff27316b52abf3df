//! Consumption after the next halvings if fees stay at a fifth of today's
//! mining revenue.
//!
//! ```text
//! cargo run --example halving_projection
//! ```

use blockwatt::estimators::{halving_floor, project_consumption};

fn main() -> blockwatt::Result<()> {
    let today = 100.0;
    for fee_share in [0.0, 0.1, 0.2, 0.5] {
        print!("fee share {fee_share:>4}:");
        for n in 0..=4 {
            print!(" {:>6.1}", project_consumption(today, fee_share, n)?);
        }
        println!("  -> floor {:.1} TWh/yr", today * halving_floor(fee_share)?);
    }
    Ok(())
}
