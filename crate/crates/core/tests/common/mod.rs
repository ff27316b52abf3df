//! Independent reference implementations shared by the property and
//! acceptance tests.

use blockwatt::estimators::MarketSample;
use blockwatt::minesim::{implied_revenue_rate, MinerCohort};
use blockwatt::units::ChainSpec;

/// Textbook two-pass Pearson coefficient.
pub fn pearson_two_pass(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut sab, mut saa, mut sbb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    sab / (saa * sbb).sqrt()
}

/// Every activation subset that is an equilibrium, then the one favouring
/// cheaper cohorts lexicographically.
pub fn equilibrium_by_enumeration(
    cohorts: &[MinerCohort],
    sample: &MarketSample,
    spec: &ChainSpec,
) -> (f64, Vec<String>) {
    let mut order: Vec<&MinerCohort> = cohorts.iter().collect();
    order.sort_by(|a, b| {
        a.cost_per_hash()
            .total_cmp(&b.cost_per_hash())
            .then_with(|| a.id.cmp(&b.id))
    });
    let n = order.len();
    let mut best: Option<(Vec<bool>, f64)> = None;
    for mask in 0u32..(1 << n) {
        let members: Vec<bool> = (0..n).map(|i| mask & (1 << i) != 0).collect();
        let total: f64 = order
            .iter()
            .zip(&members)
            .filter(|(_, &m)| m)
            .map(|(c, _)| c.capacity)
            .sum();
        let stable = order.iter().zip(&members).all(|(c, &m)| {
            if m {
                let rate = implied_revenue_rate(sample, spec, total).unwrap();
                c.margin(rate).unwrap() >= 0.0
            } else {
                let rate = implied_revenue_rate(sample, spec, total + c.capacity).unwrap();
                c.margin(rate).unwrap() < 0.0
            }
        });
        let better = match &best {
            None => true,
            // true sorts after false, so the larger vector favours cheaper cohorts
            Some((b, _)) => members > *b,
        };
        if stable && better {
            best = Some((members, total));
        }
    }
    let (members, total) = best.expect("an equilibrium always exists");
    let ids = order
        .iter()
        .zip(&members)
        .filter(|(_, &m)| m)
        .map(|(c, _)| c.id.clone())
        .collect();
    (total, ids)
}
