//! Energy per transaction of a large redundant network with and without a
//! zk-rollup, including idle draw.
//!
//! ```text
//! cargo run --example rollup
//! ```

use blockwatt::netenergy::{
    gas_reduction_factor, idle_adjusted_energy_per_tx, prover_energy_per_tx,
    redundant_energy_per_tx, rollup_energy_per_tx, savings_fraction, NetworkProfile, RollupParams,
    NON_POW_ENERGY_PER_TX_PER_NODE,
};

fn main() -> blockwatt::Result<()> {
    for params in [RollupParams::reference(), RollupParams::minimum_transfer()] {
        let network = NetworkProfile::new(
            "ethereum-like",
            10_000,
            NON_POW_ENERGY_PER_TX_PER_NODE,
            params.rollup_throughput(),
        )?
        .with_idle_power(20.0)?;
        let before = redundant_energy_per_tx(&network);
        let factor = gas_reduction_factor(&params);
        let after = rollup_energy_per_tx(before, factor, prover_energy_per_tx(&params))?;
        println!(
            "gas {} -> {} (factor {factor:.1})",
            params.gas_simple_tx(),
            params.gas_rollup_tx()
        );
        println!(
            "  {before:.1} J/tx -> {after:.3} J/tx, saving {:.1} %",
            100.0 * savings_fraction(before, after)?
        );
        println!(
            "  with 20 W idle per node: {:.1} J/tx -> {:.1} J/tx",
            idle_adjusted_energy_per_tx(before, &network)?,
            idle_adjusted_energy_per_tx(after, &network)?
        );
    }
    Ok(())
}
