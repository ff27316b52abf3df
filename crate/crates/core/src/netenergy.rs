//! Per-transaction energy of transaction processing.
//!
//! Non-PoW networks pay for redundancy: every node re-executes every
//! transaction. A zk-rollup compresses that redundant work by the gas ratio
//! and adds the operator's proving cost. Idle draw is amortized over the
//! sustained throughput.

use crate::error::{check, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkProfile {
    name: String,
    node_count: u64,
    energy_per_tx_per_node: f64,
    idle_power_per_node: f64,
    throughput: f64,
    consensus_overhead_per_tx: f64,
}

impl NetworkProfile {
    /// Idle power and consensus overhead start at zero; see the `with_*` setters.
    pub fn new(
        name: impl Into<String>,
        node_count: u64,
        energy_per_tx_per_node: f64,
        throughput: f64,
    ) -> Result<Self> {
        let profile = NetworkProfile {
            name: name.into(),
            node_count,
            energy_per_tx_per_node,
            idle_power_per_node: 0.0,
            throughput,
            consensus_overhead_per_tx: 0.0,
        };
        profile.validate()?;
        Ok(profile)
    }

    pub fn with_idle_power(mut self, watts_per_node: f64) -> Result<Self> {
        self.idle_power_per_node = watts_per_node;
        self.validate()?;
        Ok(self)
    }

    pub fn with_consensus_overhead(mut self, joules_per_tx: f64) -> Result<Self> {
        self.consensus_overhead_per_tx = joules_per_tx;
        self.validate()?;
        Ok(self)
    }

    fn validate(&self) -> Result<()> {
        if self.name.trim().is_empty() {
            return Err(Error::invalid("network name", "must not be empty"));
        }
        if self.node_count < 1 {
            return Err(Error::invalid("node_count", "must be at least 1"));
        }
        check(
            "energy_per_tx_per_node",
            self.energy_per_tx_per_node,
            |v| v >= 0.0,
            ">= 0 J",
        )?;
        check(
            "idle_power_per_node",
            self.idle_power_per_node,
            |v| v >= 0.0,
            ">= 0 W",
        )?;
        check("throughput", self.throughput, |v| v > 0.0, "> 0 tx/s")?;
        check(
            "consensus_overhead_per_tx",
            self.consensus_overhead_per_tx,
            |v| v >= 0.0,
            ">= 0 J",
        )?;
        Ok(())
    }

    pub fn name(&self) -> &str {
        &self.name
    }
    pub fn node_count(&self) -> u64 {
        self.node_count
    }
    pub fn energy_per_tx_per_node(&self) -> f64 {
        self.energy_per_tx_per_node
    }
    pub fn idle_power_per_node(&self) -> f64 {
        self.idle_power_per_node
    }
    pub fn throughput(&self) -> f64 {
        self.throughput
    }
    pub fn consensus_overhead_per_tx(&self) -> f64 {
        self.consensus_overhead_per_tx
    }
}

/// Gas figures and prover sizing of a zk-rollup.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollupParams {
    gas_simple_tx: f64,
    gas_rollup_tx: f64,
    prover_power: f64,
    rollup_throughput: f64,
}

impl RollupParams {
    pub fn new(
        gas_simple_tx: f64,
        gas_rollup_tx: f64,
        prover_power: f64,
        rollup_throughput: f64,
    ) -> Result<Self> {
        check("gas_rollup_tx", gas_rollup_tx, |v| v > 0.0, "> 0")?;
        check(
            "gas_simple_tx",
            gas_simple_tx,
            |v| v >= gas_rollup_tx,
            ">= gas_rollup_tx",
        )?;
        check("prover_power", prover_power, |v| v >= 0.0, ">= 0 W")?;
        check(
            "rollup_throughput",
            rollup_throughput,
            |v| v > 0.0,
            "> 0 tx/s",
        )?;
        Ok(RollupParams {
            gas_simple_tx,
            gas_rollup_tx,
            prover_power,
            rollup_throughput,
        })
    }

    /// Compression of roughly 100x: 365 gas per rollup transfer against a
    /// typical 36 500 gas transaction; prover drawing 1050 W at 2100 tx/s.
    pub fn reference() -> Self {
        RollupParams::new(36_500.0, 365.0, 1050.0, 2100.0).expect("valid preset")
    }

    /// Same operator, compared against the 21 000 gas minimum of a plain
    /// transfer (factor of about 57.5).
    pub fn minimum_transfer() -> Self {
        RollupParams::new(21_000.0, 365.0, 1050.0, 2100.0).expect("valid preset")
    }

    pub fn gas_simple_tx(&self) -> f64 {
        self.gas_simple_tx
    }
    pub fn gas_rollup_tx(&self) -> f64 {
        self.gas_rollup_tx
    }
    pub fn prover_power(&self) -> f64 {
        self.prover_power
    }
    pub fn rollup_throughput(&self) -> f64 {
        self.rollup_throughput
    }
}

/// Energy every node spends on one transaction, summed over the network.
pub fn redundant_energy_per_tx(profile: &NetworkProfile) -> f64 {
    profile.node_count as f64 * profile.energy_per_tx_per_node + profile.consensus_overhead_per_tx
}

pub fn gas_reduction_factor(params: &RollupParams) -> f64 {
    params.gas_simple_tx / params.gas_rollup_tx
}

pub fn prover_energy_per_tx(params: &RollupParams) -> f64 {
    params.prover_power / params.rollup_throughput
}

pub fn rollup_energy_per_tx(base: f64, factor: f64, prover: f64) -> Result<f64> {
    check("base energy", base, |v| v >= 0.0, ">= 0 J/tx")?;
    check("compression factor", factor, |v| v >= 1.0, ">= 1")?;
    check("prover energy", prover, |v| v >= 0.0, ">= 0 J/tx")?;
    Ok(base / factor + prover)
}

/// Fraction of energy saved going from `before` to `after`; negative when
/// `after` is larger.
pub fn savings_fraction(before: f64, after: f64) -> Result<f64> {
    check("energy before", before, |v| v > 0.0, "> 0 J/tx")?;
    check("energy after", after, |v| v >= 0.0, ">= 0 J/tx")?;
    Ok(1.0 - after / before)
}

pub fn idle_adjusted_energy_per_tx(per_tx: f64, profile: &NetworkProfile) -> Result<f64> {
    check("energy per tx", per_tx, |v| v >= 0.0, ">= 0 J/tx")?;
    Ok(per_tx + profile.node_count as f64 * profile.idle_power_per_node / profile.throughput)
}

/// Total mining power divided over the transactions it confirms.
pub fn pow_energy_per_tx(network_power: f64, throughput: f64) -> Result<f64> {
    check("network power", network_power, |v| v >= 0.0, ">= 0 W")?;
    check("throughput", throughput, |v| v > 0.0, "> 0 tx/s")?;
    Ok(network_power / throughput)
}

/// A named system whose per-transaction energy can be resolved.
#[derive(Debug, Clone, PartialEq)]
pub enum Architecture {
    /// Every node executes every transaction.
    Redundant(NetworkProfile),
    /// The network's redundant work compressed by a zk-rollup.
    Rollup {
        network: NetworkProfile,
        params: RollupParams,
    },
    /// Mining power spread over the confirmed transactions.
    ProofOfWork {
        name: String,
        network_power: f64,
        throughput: f64,
    },
    /// An externally reported figure.
    Reported { name: String, energy_per_tx: f64 },
}

impl Architecture {
    pub fn name(&self) -> &str {
        match self {
            Architecture::Redundant(p) => p.name(),
            Architecture::Rollup { network, .. } => network.name(),
            Architecture::ProofOfWork { name, .. } | Architecture::Reported { name, .. } => name,
        }
    }

    /// J/tx, idle draw excluded.
    pub fn energy_per_tx(&self) -> Result<f64> {
        match self {
            Architecture::Redundant(p) => Ok(redundant_energy_per_tx(p)),
            Architecture::Rollup { network, params } => rollup_energy_per_tx(
                redundant_energy_per_tx(network),
                gas_reduction_factor(params),
                prover_energy_per_tx(params),
            ),
            Architecture::ProofOfWork {
                network_power,
                throughput,
                ..
            } => pow_energy_per_tx(*network_power, *throughput),
            Architecture::Reported { energy_per_tx, .. } => {
                check("reported energy", *energy_per_tx, |v| v >= 0.0, ">= 0 J/tx")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureRow {
    pub name: String,
    /// J/tx
    pub energy_per_tx: f64,
    /// floor(log10(energy_per_tx))
    pub order_of_magnitude: i32,
}

/// Rows sorted by descending energy per transaction.
#[derive(Debug, Clone, PartialEq)]
pub struct ArchitectureReport {
    rows: Vec<ArchitectureRow>,
}

impl ArchitectureReport {
    pub fn rows(&self) -> &[ArchitectureRow] {
        &self.rows
    }
}

pub fn order_of_magnitude(energy_per_tx: f64) -> Result<i32> {
    check(
        "energy per tx",
        energy_per_tx,
        |v| v > 0.0,
        "> 0 J/tx on a log scale",
    )?;
    Ok(energy_per_tx.log10().floor() as i32)
}

/// Resolves every configuration and sorts descending; ties keep input order.
pub fn compare_architectures(configs: &[Architecture]) -> Result<ArchitectureReport> {
    if configs.is_empty() {
        return Err(Error::Empty("architecture list".into()));
    }
    let mut rows = configs
        .iter()
        .map(|c| {
            let energy = c.energy_per_tx()?;
            Ok(ArchitectureRow {
                name: c.name().to_string(),
                energy_per_tx: energy,
                order_of_magnitude: order_of_magnitude(energy)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| b.energy_per_tx.total_cmp(&a.energy_per_tx));
    Ok(ArchitectureReport { rows })
}

/// Bitcoin's throughput, tx/s.
pub const BITCOIN_THROUGHPUT: f64 = 4.2;
/// Measured CPU energy per transaction and node on non-PoW Ethereum clients, J.
pub const NON_POW_ENERGY_PER_TX_PER_NODE: f64 = 0.01;

/// The five architectures of the overview comparison, from proof-of-work down
/// to a central database.
pub fn default_comparison() -> Vec<Architecture> {
    let large = NetworkProfile::new(
        "Large non-PoW network",
        10_000,
        NON_POW_ENERGY_PER_TX_PER_NODE,
        10.0,
    )
    .expect("valid preset");
    let rollup_net = NetworkProfile::new(
        "Large non-PoW network with zk-rollup",
        10_000,
        NON_POW_ENERGY_PER_TX_PER_NODE,
        2100.0,
    )
    .expect("valid preset");
    vec![
        Architecture::ProofOfWork {
            name: "PoW (Bitcoin)".into(),
            network_power: 6.85e9,
            throughput: BITCOIN_THROUGHPUT,
        },
        Architecture::Redundant(large),
        Architecture::Rollup {
            network: rollup_net,
            params: RollupParams::reference(),
        },
        Architecture::Redundant(
            NetworkProfile::new("Permissioned (10 nodes)", 10, 0.1, 1000.0).expect("valid preset"),
        ),
        Architecture::Redundant(
            NetworkProfile::new("Central key-value store", 1, 0.02, 5000.0).expect("valid preset"),
        ),
    ]
}

/// VISA's company-wide and data-centre energy per transaction (2017 report).
pub fn visa_baseline() -> [Architecture; 2] {
    [
        Architecture::Reported {
            name: "VISA (company total)".into(),
            energy_per_tx: 6000.0,
        },
        Architecture::Reported {
            name: "VISA (data centres)".into(),
            energy_per_tx: 3000.0,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn net(nodes: u64, per_node: f64) -> NetworkProfile {
        NetworkProfile::new("n", nodes, per_node, 1000.0).unwrap()
    }

    #[test]
    fn redundancy_examples() {
        assert!((redundant_energy_per_tx(&net(10_000, 0.01)) - 100.0).abs() < 1e-9);
        assert!((redundant_energy_per_tx(&net(10, 0.1)) - 1.0).abs() < 1e-12);
        assert_eq!(redundant_energy_per_tx(&net(1, 0.37)), 0.37);
        let with_overhead = net(10, 0.1).with_consensus_overhead(0.5).unwrap();
        assert!((redundant_energy_per_tx(&with_overhead) - 1.5).abs() < 1e-12);
    }

    #[test]
    fn gas_factor_examples() {
        let p = RollupParams::new(21_000.0, 365.0, 0.0, 1.0).unwrap();
        assert!((gas_reduction_factor(&p) - 57.534_246_575).abs() < 1e-6);
        assert_eq!(gas_reduction_factor(&RollupParams::reference()), 100.0);
        let p = RollupParams::new(500.0, 500.0, 0.0, 1.0).unwrap();
        assert_eq!(gas_reduction_factor(&p), 1.0);
        assert!(RollupParams::new(100.0, 365.0, 0.0, 1.0).is_err());
        assert!(RollupParams::new(100.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn prover_examples() {
        assert_eq!(prover_energy_per_tx(&RollupParams::reference()), 0.5);
        let idle = RollupParams::new(1.0, 1.0, 0.0, 2100.0).unwrap();
        assert_eq!(prover_energy_per_tx(&idle), 0.0);
        let small = RollupParams::new(1.0, 1.0, 400.0, 2100.0).unwrap();
        assert!((prover_energy_per_tx(&small) - 0.1905).abs() < 5e-5);
        assert!(RollupParams::new(1.0, 1.0, 400.0, 0.0).is_err());
    }

    #[test]
    fn rollup_examples() {
        assert!((rollup_energy_per_tx(100.0, 100.0, 0.5).unwrap() - 1.5).abs() < 1e-12);
        assert_eq!(rollup_energy_per_tx(42.0, 1.0, 0.0).unwrap(), 42.0);
        assert!((rollup_energy_per_tx(1.0, 100.0, 0.5).unwrap() - 0.51).abs() < 1e-12);
        assert!(rollup_energy_per_tx(1.0, 0.5, 0.5).is_err());
    }

    #[test]
    fn savings_examples() {
        assert!((savings_fraction(100.0, 1.5).unwrap() - 0.985).abs() < 1e-12);
        assert_eq!(savings_fraction(7.0, 7.0).unwrap(), 0.0);
        assert!((savings_fraction(1.0, 1.5).unwrap() + 0.5).abs() < 1e-12);
        assert!(savings_fraction(0.0, 1.0).is_err());
    }

    #[test]
    fn idle_examples() {
        let p = net(10, 0.1);
        assert_eq!(idle_adjusted_energy_per_tx(1.5, &p).unwrap(), 1.5);
        let big = NetworkProfile::new("big", 10_000, 0.01, 2100.0)
            .unwrap()
            .with_idle_power(2.0)
            .unwrap();
        assert!((idle_adjusted_energy_per_tx(1.5, &big).unwrap() - 11.0238).abs() < 1e-4);
        let small = net(10, 0.1).with_idle_power(2.0).unwrap();
        assert!((idle_adjusted_energy_per_tx(1.5, &small).unwrap() - 1.52).abs() < 1e-12);
    }

    #[test]
    fn pow_examples() {
        let j = pow_energy_per_tx(6.85e9, 4.2).unwrap();
        assert!((j - 1.631e9).abs() / 1.631e9 < 1e-3);
        assert!((j / 3.6e6 - 453.0).abs() < 0.5);
        assert_eq!(pow_energy_per_tx(123.0, 1.0).unwrap(), 123.0);
        assert!((pow_energy_per_tx(3e9, 4.2).unwrap() / 3.6e6 - 198.4).abs() < 0.1);
        assert!(pow_energy_per_tx(3e9, 0.0).is_err());
    }

    #[test]
    fn default_comparison_keeps_listed_order() {
        let configs = default_comparison();
        let report = compare_architectures(&configs).unwrap();
        let names: Vec<_> = report.rows().iter().map(|r| r.name.as_str()).collect();
        let listed: Vec<_> = configs.iter().map(|c| c.name()).collect();
        assert_eq!(names, listed);
        let orders: Vec<_> = report.rows().iter().map(|r| r.order_of_magnitude).collect();
        assert_eq!(orders, vec![9, 2, 0, 0, -2]);
    }

    #[test]
    fn single_and_empty_comparisons() {
        let one = compare_architectures(&[Architecture::Redundant(net(1, 0.02))]).unwrap();
        assert_eq!(one.rows().len(), 1);
        assert!(matches!(compare_architectures(&[]), Err(Error::Empty(_))));
    }

    #[test]
    fn visa_rows() {
        let report = compare_architectures(&visa_baseline()).unwrap();
        assert_eq!(report.rows()[0].energy_per_tx, 6000.0);
        assert_eq!(report.rows()[1].energy_per_tx, 3000.0);
        assert_eq!(report.rows()[1].order_of_magnitude, 3);
    }

    #[test]
    fn network_invariants() {
        assert!(NetworkProfile::new("x", 0, 0.1, 1.0).is_err());
        assert!(NetworkProfile::new("x", 1, 0.1, 0.0).is_err());
        assert!(NetworkProfile::new("x", 1, -0.1, 1.0).is_err());
        assert!(net(1, 0.1).with_idle_power(-1.0).is_err());
    }
}
