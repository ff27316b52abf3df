//! Analytical estimators for proof-of-work networks.
//!
//! Hash rate is inferred from the public difficulty, a lower consumption
//! bound follows from the most efficient hardware, and an upper bound from
//! assuming rational miners spend at most their revenue on electricity. The
//! same revenue figure drives per-device margins and halving projections.

use chrono::NaiveDate;

use crate::error::{check, Error, Result};
use crate::units::{
    ChainSpec, EnergyEstimate, EstimateKind, HardwareProfile, Tariff, HASHES_PER_EXAHASH,
    JOULES_PER_KWH, SECONDS_PER_YEAR,
};

/// One dated market observation.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketSample {
    pub date: NaiveDate,
    /// USD per coin.
    pub price_usd: f64,
    pub difficulty: f64,
    /// Coins per block.
    pub subsidy: f64,
    /// Coins per block; `None` when the source left the cell empty.
    pub fees_per_block: Option<f64>,
    /// H/s
    pub observed_hash_rate: Option<f64>,
}

impl MarketSample {
    pub fn new(date: NaiveDate, price_usd: f64, difficulty: f64, subsidy: f64) -> Result<Self> {
        let sample = MarketSample {
            date,
            price_usd,
            difficulty,
            subsidy,
            fees_per_block: None,
            observed_hash_rate: None,
        };
        sample.validate()?;
        Ok(sample)
    }

    pub fn with_fees(mut self, fees_per_block: f64) -> Result<Self> {
        self.fees_per_block = Some(fees_per_block);
        self.validate()?;
        Ok(self)
    }

    /// Sets the fees so that they make up `fee_share` of the block revenue.
    pub fn with_fee_share(self, fee_share: f64) -> Result<Self> {
        let fees = fees_for_share(self.subsidy, fee_share)?;
        self.with_fees(fees)
    }

    pub fn with_observed_hash_rate(mut self, hash_rate: f64) -> Result<Self> {
        self.observed_hash_rate = Some(hash_rate);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        check("price_usd", self.price_usd, |v| v >= 0.0, ">= 0")?;
        check("difficulty", self.difficulty, |v| v > 0.0, "> 0")?;
        check("subsidy", self.subsidy, |v| v >= 0.0, ">= 0")?;
        if let Some(fees) = self.fees_per_block {
            check("fees_per_block", fees, |v| v >= 0.0, ">= 0")?;
        }
        if let Some(rate) = self.observed_hash_rate {
            check("observed hash rate", rate, |v| v >= 0.0, ">= 0")?;
        }
        Ok(())
    }

    pub fn fees(&self) -> f64 {
        self.fees_per_block.unwrap_or(0.0)
    }

    /// Subsidy plus fees, coins per block.
    pub fn block_reward(&self) -> f64 {
        self.subsidy + self.fees()
    }
}

/// Fees per block such that fees are `fee_share` of (subsidy + fees).
pub fn fees_for_share(subsidy: f64, fee_share: f64) -> Result<f64> {
    check(
        "fee_share",
        fee_share,
        |v| (0.0..1.0).contains(&v),
        "0 <= share < 1",
    )?;
    Ok(subsidy * fee_share / (1.0 - fee_share))
}

/// Market samples with strictly increasing dates.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct MarketSeries {
    samples: Vec<MarketSample>,
}

impl MarketSeries {
    pub fn new(samples: Vec<MarketSample>) -> Result<Self> {
        for pair in samples.windows(2) {
            if pair[1].date <= pair[0].date {
                return Err(Error::invalid(
                    "market series",
                    format!(
                        "dates must increase strictly ({} after {})",
                        pair[1].date, pair[0].date
                    ),
                ));
            }
        }
        Ok(MarketSeries { samples })
    }

    pub fn samples(&self) -> &[MarketSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn first(&self) -> Option<&MarketSample> {
        self.samples.first()
    }

    pub fn last(&self) -> Option<&MarketSample> {
        self.samples.last()
    }

    /// Latest sample dated on or before `date`.
    pub fn at(&self, date: NaiveDate) -> Option<&MarketSample> {
        let idx = self.samples.partition_point(|s| s.date <= date);
        idx.checked_sub(1).map(|i| &self.samples[i])
    }

    /// Samples whose date lies in `[from, to]`; open ends are unbounded.
    pub fn window(&self, from: Option<NaiveDate>, to: Option<NaiveDate>) -> MarketSeries {
        let samples = self
            .samples
            .iter()
            .filter(|s| from.is_none_or(|f| s.date >= f) && to.is_none_or(|t| s.date <= t))
            .cloned()
            .collect();
        MarketSeries { samples }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardPerHashPoint {
    pub date: NaiveDate,
    pub usd_per_exahash: f64,
}

pub fn expected_hashes_per_block(difficulty: f64, spec: &ChainSpec) -> Result<f64> {
    check("difficulty", difficulty, |v| v > 0.0, "> 0")?;
    Ok(difficulty * spec.hashes_per_difficulty_unit)
}

/// Expected network hash rate (H/s) given the difficulty and the average
/// block interval actually observed (or the protocol target).
pub fn network_hash_rate(difficulty: f64, avg_block_time: f64, spec: &ChainSpec) -> Result<f64> {
    check("average block time", avg_block_time, |v| v > 0.0, "> 0 s")?;
    Ok(expected_hashes_per_block(difficulty, spec)? / avg_block_time)
}

/// Consumption if every hash were computed on the most efficient hardware.
pub fn lower_bound_power(hash_rate: f64, best_efficiency: f64) -> Result<EnergyEstimate> {
    check("hash_rate", hash_rate, |v| v >= 0.0, ">= 0")?;
    check("best_efficiency", best_efficiency, |v| v > 0.0, "> 0 J/H")?;
    Ok(
        EnergyEstimate::from_power(hash_rate * best_efficiency, EstimateKind::Lower)?
            .with_assumption("hash_rate_hs", hash_rate)
            .with_assumption("efficiency_j_per_h", best_efficiency),
    )
}

/// Consumption if miners spent their whole revenue on electricity at `tariff`.
pub fn upper_bound_power(
    sample: &MarketSample,
    spec: &ChainSpec,
    tariff: Tariff,
) -> Result<EnergyEstimate> {
    sample.validate()?;
    let tariff = tariff.require_positive()?;
    let annual_revenue = sample.block_reward() * spec.blocks_per_year() * sample.price_usd;
    let annual_joules = annual_revenue / tariff.usd_per_joule();
    let power = annual_joules / SECONDS_PER_YEAR;
    Ok(EnergyEstimate::from_power(power, EstimateKind::Upper)?
        .with_assumption("block_reward_coins", sample.block_reward())
        .with_assumption("price_usd", sample.price_usd)
        .with_assumption("tariff_usd_per_kwh", tariff.usd_per_kwh())
        .with_assumption("target_block_time_s", spec.target_block_time))
}

/// Expected revenue in USD per 10^18 hashes at the sample's difficulty.
pub fn revenue_per_exahash(sample: &MarketSample, spec: &ChainSpec) -> Result<f64> {
    let hashes = expected_hashes_per_block(sample.difficulty, spec)?;
    Ok(sample.block_reward() * sample.price_usd / hashes * HASHES_PER_EXAHASH)
}

pub fn revenue_series(series: &MarketSeries, spec: &ChainSpec) -> Result<Vec<RewardPerHashPoint>> {
    series
        .samples()
        .iter()
        .map(|s| {
            Ok(RewardPerHashPoint {
                date: s.date,
                usd_per_exahash: revenue_per_exahash(s, spec)?,
            })
        })
        .collect()
}

/// (revenue - electricity cost) / electricity cost for one device.
pub fn relative_margin(
    profile: &HardwareProfile,
    tariff: Tariff,
    revenue_rate: f64,
) -> Result<f64> {
    let tariff = tariff.require_positive()?;
    check("revenue rate", revenue_rate, |v| v >= 0.0, ">= 0 USD/EH")?;
    let revenue = revenue_rate * profile.hash_rate() / HASHES_PER_EXAHASH;
    let cost = profile.power() * tariff.usd_per_kwh() / JOULES_PER_KWH;
    Ok((revenue - cost) / cost)
}

/// Tariff (USD/kWh) at which the device's margin is exactly zero.
pub fn breakeven_tariff(profile: &HardwareProfile, revenue_rate: f64) -> Result<f64> {
    check("revenue rate", revenue_rate, |v| v >= 0.0, ">= 0 USD/EH")?;
    Ok(
        revenue_rate * profile.hash_rate() * JOULES_PER_KWH
            / (HASHES_PER_EXAHASH * profile.power()),
    )
}

/// Remaining share of today's consumption after `halvings` subsidy halvings,
/// holding price, tariffs and absolute fee revenue constant.
pub fn halving_fraction(fee_share: f64, halvings: u32) -> Result<f64> {
    check(
        "fee_share",
        fee_share,
        |v| (0.0..=1.0).contains(&v),
        "0 <= share <= 1",
    )?;
    Ok((1.0 - fee_share) * 0.5f64.powi(halvings as i32) + fee_share)
}

/// Long-run floor of [`halving_fraction`]: only fees remain.
pub fn halving_floor(fee_share: f64) -> Result<f64> {
    check(
        "fee_share",
        fee_share,
        |v| (0.0..=1.0).contains(&v),
        "0 <= share <= 1",
    )?;
    Ok(fee_share)
}

pub fn project_consumption(current: f64, fee_share: f64, halvings: u32) -> Result<f64> {
    check("current consumption", current, |v| v >= 0.0, ">= 0")?;
    Ok(current * halving_fraction(fee_share, halvings)?)
}

/// Sample Pearson coefficient of two equally long series.
///
/// Uses a single streaming pass over co-moments, so the result does not
/// depend on computing the means first.
pub fn pearson_correlation(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    if a.len() < 2 {
        return Err(Error::invalid(
            "series",
            "correlation needs at least two points",
        ));
    }
    let (mut mean_a, mut mean_b) = (0.0, 0.0);
    let (mut m2_a, mut m2_b, mut co) = (0.0, 0.0, 0.0);
    for (i, (&x, &y)) in a.iter().zip(b).enumerate() {
        if !x.is_finite() || !y.is_finite() {
            return Err(Error::invalid(
                "series",
                format!("non-finite value at index {i}"),
            ));
        }
        let n = (i + 1) as f64;
        let dx = x - mean_a;
        mean_a += dx / n;
        let dy = y - mean_b;
        mean_b += dy / n;
        m2_a += dx * (x - mean_a);
        m2_b += dy * (y - mean_b);
        co += dx * (y - mean_b);
    }
    if m2_a == 0.0 {
        return Err(Error::ZeroVariance("a".into()));
    }
    if m2_b == 0.0 {
        return Err(Error::ZeroVariance("b".into()));
    }
    Ok((co / (m2_a * m2_b).sqrt()).clamp(-1.0, 1.0))
}

/// Yearly chain growth when throughput is scaled by `tx_multiplier`.
pub fn chain_storage_growth(base_growth: f64, tx_multiplier: f64) -> Result<f64> {
    check("base growth", base_growth, |v| v >= 0.0, ">= 0 GB/yr")?;
    check(
        "transaction multiplier",
        tx_multiplier,
        |v| v >= 0.0,
        ">= 0",
    )?;
    Ok(base_growth * tx_multiplier)
}

/// Scales a Bitcoin figure to all proof-of-work chains; `factor` includes
/// Bitcoin itself and therefore cannot be below one.
pub fn all_pow_consumption(bitcoin_estimate: f64, factor: f64) -> Result<f64> {
    check("bitcoin estimate", bitcoin_estimate, |v| v >= 0.0, ">= 0")?;
    check(
        "factor",
        factor,
        |v| v >= 1.0,
        ">= 1 (Bitcoin is part of the total)",
    )?;
    Ok(bitcoin_estimate * factor)
}
