//! Deterministic simulator of the proof-of-work mining market.
//!
//! Miner cohorts switch on or off depending on their relative margin, the
//! difficulty follows the hash rate once per retarget epoch, and the subsidy
//! halves on schedule. Time advances in whole epochs (or in day-long
//! segments within an epoch) using expected block intervals, so identical
//! configurations always produce identical traces.

use std::collections::BTreeMap;

use chrono::{Days, NaiveDate};

use crate::error::{check, Error, Result};
use crate::estimators::{
    expected_hashes_per_block, pearson_correlation, relative_margin, revenue_per_exahash,
    MarketSample, MarketSeries,
};
use crate::units::{ChainSpec, EnergyEstimate, EstimateKind, HardwareProfile, Tariff};

const SECONDS_PER_DAY: f64 = 86_400.0;

/// A group of identical machines paying the same tariff, switched on or off
/// as a unit.
#[derive(Debug, Clone, PartialEq)]
pub struct MinerCohort {
    pub id: String,
    pub hardware: HardwareProfile,
    pub tariff: Tariff,
    /// H/s
    pub capacity: f64,
    pub active: bool,
    /// Machines not yet installed before this date stay off.
    pub available_from: Option<NaiveDate>,
}

impl MinerCohort {
    pub fn new(
        id: impl Into<String>,
        hardware: HardwareProfile,
        tariff: Tariff,
        capacity: f64,
        active: bool,
    ) -> Result<Self> {
        let id = id.into();
        if id.trim().is_empty() {
            return Err(Error::invalid("cohort id", "must not be empty"));
        }
        check("cohort capacity", capacity, |v| v > 0.0, "> 0 H/s")?;
        Ok(MinerCohort {
            id,
            hardware,
            tariff,
            capacity,
            active,
            available_from: None,
        })
    }

    pub fn with_available_from(mut self, date: NaiveDate) -> Self {
        self.available_from = Some(date);
        self
    }

    pub fn is_available(&self, date: NaiveDate) -> bool {
        self.available_from.is_none_or(|from| from <= date)
    }

    /// W drawn when active.
    pub fn power(&self) -> f64 {
        self.capacity * self.hardware.efficiency()
    }

    /// USD per hash; the revenue rate at which this cohort breaks even.
    pub fn cost_per_hash(&self) -> f64 {
        self.hardware.efficiency() * self.tariff.usd_per_joule()
    }

    pub fn margin(&self, revenue_rate: f64) -> Result<f64> {
        relative_margin(&self.hardware, self.tariff, revenue_rate)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecisionCadence {
    /// Cohorts decide once, at the start of each retarget epoch.
    #[default]
    PerEpoch,
    /// Cohorts re-decide at every UTC midnight.
    PerDay,
}

impl DecisionCadence {
    pub fn as_str(self) -> &'static str {
        match self {
            DecisionCadence::PerEpoch => "per_epoch",
            DecisionCadence::PerDay => "per_day",
        }
    }
}

impl std::str::FromStr for DecisionCadence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "per_epoch" => Ok(DecisionCadence::PerEpoch),
            "per_day" => Ok(DecisionCadence::PerDay),
            other => Err(Error::invalid(
                "decision_cadence",
                format!("`{other}` is not one of per_epoch, per_day"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub spec: ChainSpec,
    pub cohorts: Vec<MinerCohort>,
    /// Exogenous price and fee path; the latest sample on or before the
    /// simulated date applies.
    pub price_path: MarketSeries,
    pub start_difficulty: f64,
    /// Number of retarget epochs to simulate.
    pub duration: u64,
    /// Margin band inside which cohorts keep their current state.
    pub hysteresis: f64,
    pub decision_cadence: DecisionCadence,
    /// Chain height of the first simulated block.
    pub start_height: u64,
    /// Defaults to the first date of the price path.
    pub start_date: Option<NaiveDate>,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        check(
            "start_difficulty",
            self.start_difficulty,
            |v| v > 0.0,
            "> 0",
        )?;
        check("hysteresis", self.hysteresis, |v| v >= 0.0, ">= 0")?;
        if self.duration < 1 {
            return Err(Error::invalid("duration", "must be at least one epoch"));
        }
        if self.cohorts.is_empty() {
            return Err(Error::Empty("cohort list".into()));
        }
        for (i, c) in self.cohorts.iter().enumerate() {
            if self.cohorts[..i].iter().any(|o| o.id == c.id) {
                return Err(Error::invalid(
                    "cohorts",
                    format!("duplicate cohort id `{}`", c.id),
                ));
            }
        }
        let first = self
            .price_path
            .first()
            .ok_or_else(|| Error::Empty("price path".into()))?;
        if self.start_date() < first.date {
            return Err(Error::invalid(
                "start_date",
                format!(
                    "{} precedes the first price sample ({})",
                    self.start_date(),
                    first.date
                ),
            ));
        }
        Ok(())
    }

    pub fn start_date(&self) -> NaiveDate {
        self.start_date
            .or_else(|| self.price_path.first().map(|s| s.date))
            .unwrap_or_default()
    }

    /// Activates the equilibrium set for the opening market conditions and
    /// sets the start difficulty to match its hash rate.
    pub fn seed_equilibrium(&mut self) -> Result<Equilibrium> {
        let sample = self.opening_sample()?;
        let eq = equilibrium_hash_rate(&self.cohorts, &sample, &self.spec)?;
        if eq.hash_rate <= 0.0 {
            return Err(Error::invalid(
                "equilibrium",
                "no cohort is profitable under the opening market conditions",
            ));
        }
        for c in &mut self.cohorts {
            c.active = eq.active.contains(&c.id);
        }
        self.start_difficulty =
            eq.hash_rate * self.spec.target_block_time / self.spec.hashes_per_difficulty_unit;
        Ok(eq)
    }

    fn opening_sample(&self) -> Result<MarketSample> {
        let date = self.start_date();
        let market = self.price_path.at(date).ok_or_else(|| {
            Error::invalid("start_date", format!("no price sample on or before {date}"))
        })?;
        Ok(MarketSample {
            date,
            price_usd: market.price_usd,
            difficulty: self.start_difficulty.max(f64::MIN_POSITIVE),
            subsidy: block_subsidy(self.start_height, &self.spec),
            fees_per_block: market.fees_per_block,
            observed_hash_rate: None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CohortState {
    pub margin: f64,
    pub active: bool,
}

/// One completed retarget epoch.
#[derive(Debug, Clone, PartialEq)]
pub struct EpochRecord {
    pub epoch_index: u64,
    /// Seconds since the start of the run, at the end of the epoch.
    pub sim_time: f64,
    /// Chain height at the end of the epoch.
    pub height: u64,
    /// Difficulty in force during the epoch.
    pub difficulty: f64,
    /// H/s of the active set at the end of the epoch.
    pub hash_rate: f64,
    /// W drawn by the active set at the end of the epoch.
    pub power: f64,
    /// Coins per block at the first block of the epoch.
    pub subsidy: f64,
    pub price_usd: f64,
    pub fees_per_block: f64,
    /// USD/EH seen by the last participation decision.
    pub revenue_rate: f64,
    /// Seconds the epoch took.
    pub duration: f64,
    pub cohorts: BTreeMap<String, CohortState>,
}

impl EpochRecord {
    pub fn mean_block_time(&self, spec: &ChainSpec) -> f64 {
        self.duration / spec.retarget_epoch as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimOutcome {
    Completed,
    /// No hash rate for a full nominal epoch; the epoch never finished.
    Stalled {
        epoch_index: u64,
        sim_time: f64,
        height: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimTrace {
    pub records: Vec<EpochRecord>,
    pub outcome: SimOutcome,
}

/// Subsidy paid by the block at `height`.
pub fn block_subsidy(height: u64, spec: &ChainSpec) -> f64 {
    let halvings = height / spec.halving_interval;
    // beyond ~1075 halvings every f64 subsidy has underflowed to zero
    spec.initial_subsidy * 0.5f64.powi(halvings.min(1100) as i32)
}

/// Coins created by all blocks below `height`.
pub fn cumulative_supply(height: u64, spec: &ChainSpec) -> f64 {
    // cap minus what is still to be mined: subsidy * (2 * interval - blocks
    // into the era). One rounding keeps the result monotone in height.
    let interval = spec.halving_interval as f64;
    let in_era = (height % spec.halving_interval) as f64;
    supply_cap(spec) - block_subsidy(height, spec) * (2.0 * interval - in_era)
}

/// Limit of [`cumulative_supply`] as the height grows without bound.
pub fn supply_cap(spec: &ChainSpec) -> f64 {
    2.0 * spec.initial_subsidy * spec.halving_interval as f64
}

/// Next difficulty after an epoch that took `actual_epoch_duration` seconds.
pub fn retarget_difficulty(old: f64, actual_epoch_duration: f64, spec: &ChainSpec) -> Result<f64> {
    check("difficulty", old, |v| v > 0.0, "> 0")?;
    check(
        "epoch duration",
        actual_epoch_duration,
        |v| v > 0.0,
        "> 0 s",
    )?;
    let target = spec.retarget_epoch as f64 * spec.target_block_time;
    let ratio =
        (target / actual_epoch_duration).clamp(1.0 / spec.retarget_clamp, spec.retarget_clamp);
    Ok(old * ratio)
}

/// Applies one participation decision to every cohort.
pub fn participation_update(
    cohorts: &[MinerCohort],
    revenue_rate: f64,
    hysteresis: f64,
) -> Result<Vec<MinerCohort>> {
    let mut next = cohorts.to_vec();
    update_in_place(&mut next, revenue_rate, hysteresis)?;
    Ok(next)
}

fn update_in_place(
    cohorts: &mut [MinerCohort],
    revenue_rate: f64,
    hysteresis: f64,
) -> Result<Vec<f64>> {
    update_on(cohorts, revenue_rate, hysteresis, None)
}

fn update_on(
    cohorts: &mut [MinerCohort],
    revenue_rate: f64,
    hysteresis: f64,
    date: Option<NaiveDate>,
) -> Result<Vec<f64>> {
    check("hysteresis", hysteresis, |v| v >= 0.0, ">= 0")?;
    cohorts
        .iter_mut()
        .map(|c| {
            let margin = c.margin(revenue_rate)?;
            let unavailable = date.is_some_and(|d| !c.is_available(d));
            if unavailable || (c.active && margin < -hysteresis) {
                c.active = false;
            } else if !c.active && margin > hysteresis {
                c.active = true;
            }
            Ok(margin)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Equilibrium {
    /// H/s
    pub hash_rate: f64,
    /// Ids of the active cohorts, in breakeven order.
    pub active: Vec<String>,
}

/// USD/EH earned when the difficulty matches `hash_rate` at the target block
/// time.
pub fn implied_revenue_rate(
    sample: &MarketSample,
    spec: &ChainSpec,
    hash_rate: f64,
) -> Result<f64> {
    let at_rate = MarketSample {
        difficulty: hash_rate * spec.target_block_time / spec.hashes_per_difficulty_unit,
        ..sample.clone()
    };
    revenue_per_exahash(&at_rate, spec)
}

/// Market equilibrium with the difficulty adjusted to the hash rate.
///
/// Cohorts are scanned from cheapest to most expensive per hash (ties by id);
/// each joins if it stays profitable once its own capacity raises the
/// difficulty. The result has every active cohort at a non-negative margin
/// while no inactive cohort could join profitably, and among all such sets it
/// is the one that favours cheaper cohorts first. The sample's difficulty is
/// ignored, and cohorts not yet available on the sample date stay out.
pub fn equilibrium_hash_rate(
    cohorts: &[MinerCohort],
    sample: &MarketSample,
    spec: &ChainSpec,
) -> Result<Equilibrium> {
    let mut order: Vec<&MinerCohort> = cohorts
        .iter()
        .filter(|c| c.is_available(sample.date))
        .collect();
    order.sort_by(|a, b| {
        a.cost_per_hash()
            .total_cmp(&b.cost_per_hash())
            .then_with(|| a.id.cmp(&b.id))
    });

    let mut hash_rate = 0.0;
    let mut active = Vec::new();
    for cohort in order {
        let joined = hash_rate + cohort.capacity;
        let rate = implied_revenue_rate(sample, spec, joined)?;
        if cohort.margin(rate)? >= 0.0 {
            hash_rate = joined;
            active.push(cohort.id.clone());
        }
    }
    Ok(Equilibrium { hash_rate, active })
}

fn active_hash_rate(cohorts: &[MinerCohort]) -> f64 {
    cohorts
        .iter()
        .filter(|c| c.active)
        .map(|c| c.capacity)
        .sum()
}

fn active_power(cohorts: &[MinerCohort]) -> f64 {
    cohorts
        .iter()
        .filter(|c| c.active)
        .map(MinerCohort::power)
        .sum()
}

struct Decision {
    price_usd: f64,
    fees: f64,
    revenue_rate: f64,
    margins: Vec<f64>,
}

struct Engine<'a> {
    config: &'a SimConfig,
    cohorts: Vec<MinerCohort>,
    start_date: NaiveDate,
}

impl Engine<'_> {
    fn date_at(&self, time: f64) -> NaiveDate {
        let days = (time / SECONDS_PER_DAY).floor() as u64;
        self.start_date
            .checked_add_days(Days::new(days))
            .unwrap_or(NaiveDate::MAX)
    }

    fn decide(&mut self, time: f64, height: u64, difficulty: f64) -> Result<Decision> {
        let date = self.date_at(time);
        let market = self.config.price_path.at(date).ok_or_else(|| {
            Error::invalid("price path", format!("no sample on or before {date}"))
        })?;
        let sample = MarketSample {
            date,
            price_usd: market.price_usd,
            difficulty,
            subsidy: block_subsidy(height, &self.config.spec),
            fees_per_block: market.fees_per_block,
            observed_hash_rate: None,
        };
        let revenue_rate = revenue_per_exahash(&sample, &self.config.spec)?;
        let margins = update_on(
            &mut self.cohorts,
            revenue_rate,
            self.config.hysteresis,
            Some(date),
        )?;
        Ok(Decision {
            price_usd: sample.price_usd,
            fees: sample.fees(),
            revenue_rate,
            margins,
        })
    }
}

/// Runs the epoch loop described by `config`.
pub fn run_simulation(config: &SimConfig) -> Result<SimTrace> {
    config.validate()?;
    let spec = &config.spec;
    let mut engine = Engine {
        config,
        cohorts: config.cohorts.clone(),
        start_date: config.start_date(),
    };
    let epoch_blocks = spec.retarget_epoch as f64;
    let nominal_epoch = epoch_blocks * spec.target_block_time;

    let mut records = Vec::with_capacity(config.duration as usize);
    let mut difficulty = config.start_difficulty;
    let mut height = config.start_height;
    let mut time = 0.0f64;

    for epoch_index in 0..config.duration {
        let epoch_start = time;
        let hashes_per_block = expected_hashes_per_block(difficulty, spec)?;
        let stalled = |sim_time: f64| SimTrace {
            records: Vec::new(),
            outcome: SimOutcome::Stalled {
                epoch_index,
                sim_time,
                height,
            },
        };

        let decision = match config.decision_cadence {
            DecisionCadence::PerEpoch => {
                let decision = engine.decide(time, height, difficulty)?;
                let rate = active_hash_rate(&engine.cohorts);
                if rate <= 0.0 {
                    return Ok(SimTrace {
                        records,
                        ..stalled(time + nominal_epoch)
                    });
                }
                time += epoch_blocks * hashes_per_block / rate;
                decision
            }
            DecisionCadence::PerDay => {
                let mut blocks_done = 0.0f64;
                let mut idle_since: Option<f64> = None;
                loop {
                    let at_height = height + blocks_done.floor() as u64;
                    let decision = engine.decide(time, at_height, difficulty)?;
                    let rate = active_hash_rate(&engine.cohorts);
                    let next_midnight = ((time / SECONDS_PER_DAY).floor() + 1.0) * SECONDS_PER_DAY;
                    if rate > 0.0 {
                        idle_since = None;
                        let needed = (epoch_blocks - blocks_done) * hashes_per_block / rate;
                        if time + needed <= next_midnight {
                            time += needed;
                            break decision;
                        }
                        blocks_done += (next_midnight - time) * rate / hashes_per_block;
                    } else {
                        let since = *idle_since.get_or_insert(time);
                        if next_midnight - since >= nominal_epoch {
                            return Ok(SimTrace {
                                records,
                                ..stalled(since + nominal_epoch)
                            });
                        }
                    }
                    time = next_midnight;
                }
            }
        };

        let duration = time - epoch_start;
        let cohorts = engine
            .cohorts
            .iter()
            .zip(&decision.margins)
            .map(|(c, &margin)| {
                (
                    c.id.clone(),
                    CohortState {
                        margin,
                        active: c.active,
                    },
                )
            })
            .collect();
        records.push(EpochRecord {
            epoch_index,
            sim_time: time,
            height: height + spec.retarget_epoch,
            difficulty,
            hash_rate: active_hash_rate(&engine.cohorts),
            power: active_power(&engine.cohorts),
            subsidy: block_subsidy(height, spec),
            price_usd: decision.price_usd,
            fees_per_block: decision.fees,
            revenue_rate: decision.revenue_rate,
            duration,
            cohorts,
        });
        height += spec.retarget_epoch;
        difficulty = retarget_difficulty(difficulty, duration, spec)?;
    }

    Ok(SimTrace {
        records,
        outcome: SimOutcome::Completed,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceSummary {
    /// One simulated estimate per record.
    pub estimates: Vec<EnergyEstimate>,
    /// Time-weighted mean power, W.
    pub mean_power: f64,
    pub min_power: f64,
    pub max_power: f64,
    /// Pearson coefficient of revenue rate against hash rate; absent for
    /// traces shorter than two epochs or with a flat series.
    pub revenue_hash_correlation: Option<f64>,
}

pub fn summarize_trace(trace: &SimTrace) -> Result<TraceSummary> {
    let records = &trace.records;
    if records.is_empty() {
        return Err(Error::Empty("simulation trace".into()));
    }
    let estimates = records
        .iter()
        .map(|r| {
            Ok(
                EnergyEstimate::from_power(r.power, EstimateKind::Simulated)?
                    .with_assumption("epoch_index", r.epoch_index as f64)
                    .with_assumption("hash_rate_hs", r.hash_rate)
                    .with_assumption("revenue_usd_per_eh", r.revenue_rate),
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let total_time: f64 = records.iter().map(|r| r.duration).sum();
    let mean_power = records.iter().map(|r| r.power * r.duration).sum::<f64>() / total_time;
    let min_power = records
        .iter()
        .map(|r| r.power)
        .fold(f64::INFINITY, f64::min);
    let max_power = records
        .iter()
        .map(|r| r.power)
        .fold(f64::NEG_INFINITY, f64::max);

    let revenue: Vec<f64> = records.iter().map(|r| r.revenue_rate).collect();
    let hash: Vec<f64> = records.iter().map(|r| r.hash_rate).collect();
    let revenue_hash_correlation = if records.len() < 2 {
        None
    } else {
        match pearson_correlation(&revenue, &hash) {
            Ok(r) => Some(r),
            Err(Error::ZeroVariance(_)) => None,
            Err(e) => return Err(e),
        }
    };
    Ok(TraceSummary {
        estimates,
        mean_power,
        min_power,
        max_power,
        revenue_hash_correlation,
    })
}

/// Cohorts whose cost per hash rises as `rank^(1/elasticity)`, all with the
/// same capacity and tariff.
///
/// Cumulative capacity then grows as cost^elasticity. With a uniform tariff
/// the electricity spend of such a market stays a fixed share of revenue, so
/// equilibrium power moves in proportion to mining revenue. Elasticities
/// below one keep the difficulty feedback loop stable.
pub fn breakeven_ladder(
    count: usize,
    base: &HardwareProfile,
    tariff: Tariff,
    capacity_per_cohort: f64,
    elasticity: f64,
) -> Result<Vec<MinerCohort>> {
    check("elasticity", elasticity, |v| v > 0.0, "> 0")?;
    let width = count.to_string().len().max(2);
    (1..=count)
        .map(|rank| {
            let scale = (rank as f64).powf(1.0 / elasticity);
            let hardware = HardwareProfile::new(
                format!("{}-L{rank:0width$}", base.name()),
                base.launch_year(),
                base.hash_rate(),
                base.power() * scale,
            )?;
            MinerCohort::new(
                format!("L{rank:0width$}"),
                hardware,
                tariff,
                capacity_per_cohort,
                true,
            )
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    fn hw(name: &str, hash_rate: f64, power: f64) -> HardwareProfile {
        HardwareProfile::new(name, 2020, hash_rate, power).unwrap()
    }

    fn cohort(
        id: &str,
        hash_rate: f64,
        power: f64,
        tariff: f64,
        capacity: f64,
        active: bool,
    ) -> MinerCohort {
        MinerCohort::new(
            id,
            hw(id, hash_rate, power),
            Tariff::new(tariff).unwrap(),
            capacity,
            active,
        )
        .unwrap()
    }

    fn market(price: f64, fees: f64) -> MarketSample {
        MarketSample::new(date("2020-01-01"), price, 1e13, 12.5)
            .unwrap()
            .with_fees(fees)
            .unwrap()
    }

    #[test]
    fn subsidy_schedule() {
        let spec = ChainSpec::bitcoin();
        assert_eq!(block_subsidy(0, &spec), 50.0);
        assert_eq!(block_subsidy(209_999, &spec), 50.0);
        assert_eq!(block_subsidy(210_000, &spec), 25.0);
        assert_eq!(block_subsidy(630_000, &spec), 6.25);
        assert_eq!(block_subsidy(u64::MAX, &spec), 0.0);
    }

    #[test]
    fn supply_examples() {
        let spec = ChainSpec::bitcoin();
        assert_eq!(cumulative_supply(0, &spec), 0.0);
        assert_eq!(supply_cap(&spec), 21_000_000.0);
        assert_eq!(cumulative_supply(210_000, &spec), 10_500_000.0);
        assert_eq!(cumulative_supply(630_000, &spec), 18_375_000.0);
        assert!((cumulative_supply(64 * 210_000, &spec) - 21e6).abs() < 1e-6);
        assert_eq!(cumulative_supply(u64::MAX - 1, &spec), 21e6);
    }

    #[test]
    fn supply_matches_block_by_block_sum() {
        let spec = ChainSpec {
            halving_interval: 7,
            initial_subsidy: 64.0,
            ..ChainSpec::bitcoin()
        };
        let mut sum = 0.0;
        for h in 0..80u64 {
            assert_eq!(cumulative_supply(h, &spec), sum, "height {h}");
            sum += block_subsidy(h, &spec);
        }
    }

    #[test]
    fn retarget_examples() {
        let spec = ChainSpec::bitcoin();
        let target = 2016.0 * 600.0;
        assert_eq!(retarget_difficulty(1e13, target, &spec).unwrap(), 1e13);
        assert_eq!(
            retarget_difficulty(1e13, 2.0 * target, &spec).unwrap(),
            5e12
        );
        assert_eq!(
            retarget_difficulty(1e13, target / 10.0, &spec).unwrap(),
            4e13
        );
        assert_eq!(
            retarget_difficulty(1e13, target * 10.0, &spec).unwrap(),
            2.5e12
        );
        assert!(retarget_difficulty(1e13, 0.0, &spec).is_err());
        assert!(retarget_difficulty(0.0, target, &spec).is_err());
    }

    fn s9_class(tariff: f64, active: bool) -> MinerCohort {
        cohort("s9", 1.15e13, 1375.0, tariff, 1e18, active)
    }

    #[test]
    fn participation_inside_band_keeps_state() {
        // revenue rate at which the margin is exactly zero
        let c = s9_class(0.05, true);
        let breakeven = c.cost_per_hash() * 1e18;
        let next = participation_update(&[c], breakeven, 0.05).unwrap();
        assert!(next[0].active);
        let next = participation_update(&[s9_class(0.05, false)], breakeven, 0.05).unwrap();
        assert!(!next[0].active);
    }

    #[test]
    fn participation_post_halving_s9() {
        let next = participation_update(&[s9_class(0.05, true)], 0.975, 0.05).unwrap();
        assert!(!next[0].active);
        // at 0.03 USD/kWh the margin is about -2 %, inside the 5 % band
        let cheap = s9_class(0.03, true);
        let m = cheap.margin(0.975).unwrap();
        assert!(m < 0.0 && m > -0.05, "margin {m}");
        let next = participation_update(std::slice::from_ref(&cheap), 0.975, 0.05).unwrap();
        assert!(next[0].active);
        let next = participation_update(&[cheap], 0.975, 0.0).unwrap();
        assert!(!next[0].active);
    }

    #[test]
    fn equilibrium_single_profitable_cohort() {
        let spec = ChainSpec::bitcoin();
        let c = cohort("a", 1.1e14, 3250.0, 0.05, 1e19, false);
        let eq = equilibrium_hash_rate(&[c], &market(9000.0, 0.5), &spec).unwrap();
        assert_eq!(eq.hash_rate, 1e19);
        assert_eq!(eq.active, vec!["a".to_string()]);
    }

    #[test]
    fn equilibrium_second_cohort_crowded_out() {
        let spec = ChainSpec::bitcoin();
        let s = market(9000.0, 0.5);
        let a = cohort("a", 1.1e14, 3250.0, 0.05, 1e20, false);
        // alone, b would earn at a's hash rate plus its own; make it lose money
        let rate_both = implied_revenue_rate(&s, &spec, 1.5e20).unwrap();
        let rate_a = implied_revenue_rate(&s, &spec, 1e20).unwrap();
        let b_power_per_hash = rate_both / 1e18 * 3.6e6 / 0.05 * 1.2;
        let b = cohort("b", 1e14, b_power_per_hash * 1e14, 0.05, 5e19, false);
        assert!(b.margin(rate_both).unwrap() < 0.0);
        assert!(a.margin(rate_a).unwrap() > 0.0);
        let eq = equilibrium_hash_rate(&[b, a], &s, &spec).unwrap();
        assert_eq!(eq.hash_rate, 1e20);
        assert_eq!(eq.active, vec!["a".to_string()]);
    }

    #[test]
    fn equilibrium_without_revenue_is_empty() {
        let spec = ChainSpec::bitcoin();
        let c = cohort("a", 1.1e14, 3250.0, 0.05, 1e19, true);
        let eq = equilibrium_hash_rate(&[c], &market(0.0, 0.0), &spec).unwrap();
        assert_eq!(eq.hash_rate, 0.0);
        assert!(eq.active.is_empty());
    }

    fn flat_config(price: f64) -> SimConfig {
        let path = MarketSeries::new(vec![market(price, 0.5)]).unwrap();
        SimConfig {
            spec: ChainSpec::bitcoin(),
            cohorts: vec![cohort("a", 1.1e14, 3250.0, 0.05, 1e20, true)],
            price_path: path,
            start_difficulty: 1e13,
            duration: 6,
            hysteresis: 0.0,
            decision_cadence: DecisionCadence::PerEpoch,
            start_height: 0,
            start_date: None,
        }
    }

    #[test]
    fn constant_market_reaches_target_block_time() {
        let trace = run_simulation(&flat_config(9000.0)).unwrap();
        assert_eq!(trace.outcome, SimOutcome::Completed);
        assert_eq!(trace.records.len(), 6);
        let spec = ChainSpec::bitcoin();
        for r in &trace.records[2..] {
            assert!((r.mean_block_time(&spec) - 600.0).abs() < 6.0);
            assert_eq!(r.hash_rate, 1e20);
        }
        for pair in trace.records.windows(2) {
            assert_eq!(pair[1].height - pair[0].height, 2016);
        }
    }

    #[test]
    fn worthless_coin_stalls_the_chain() {
        let trace = run_simulation(&flat_config(0.0)).unwrap();
        assert!(trace.records.is_empty());
        assert!(matches!(
            trace.outcome,
            SimOutcome::Stalled { epoch_index: 0, .. }
        ));

        let mut daily = flat_config(0.0);
        daily.decision_cadence = DecisionCadence::PerDay;
        let trace = run_simulation(&daily).unwrap();
        match trace.outcome {
            SimOutcome::Stalled { sim_time, .. } => assert_eq!(sim_time, 2016.0 * 600.0),
            other => panic!("expected a stall, got {other:?}"),
        }
    }

    #[test]
    fn per_day_cadence_matches_per_epoch_in_a_flat_market() {
        let epoch = run_simulation(&flat_config(9000.0)).unwrap();
        let mut cfg = flat_config(9000.0);
        cfg.decision_cadence = DecisionCadence::PerDay;
        let daily = run_simulation(&cfg).unwrap();
        for (a, b) in epoch.records.iter().zip(&daily.records) {
            assert!(((a.sim_time - b.sim_time) / a.sim_time).abs() < 1e-9);
            assert!(((a.difficulty - b.difficulty) / a.difficulty).abs() < 1e-9);
        }
    }

    #[test]
    fn summary_of_flat_trace_has_no_correlation() {
        let mut cfg = flat_config(9000.0);
        cfg.start_difficulty = 1e20 * 600.0 / 4_294_967_296.0;
        let trace = run_simulation(&cfg).unwrap();
        let summary = summarize_trace(&trace).unwrap();
        assert_eq!(summary.revenue_hash_correlation, None);
        let expected = 1e20 * 3250.0 / 1.1e14;
        assert!((summary.mean_power - expected).abs() / expected < 1e-12);
        assert_eq!(summary.estimates.len(), trace.records.len());
        let empty = SimTrace {
            records: vec![],
            outcome: SimOutcome::Completed,
        };
        assert!(summarize_trace(&empty).is_err());
    }

    #[test]
    fn config_validation() {
        let mut cfg = flat_config(1.0);
        cfg.cohorts.clear();
        assert!(run_simulation(&cfg).is_err());
        let mut cfg = flat_config(1.0);
        cfg.duration = 0;
        assert!(run_simulation(&cfg).is_err());
        let mut cfg = flat_config(1.0);
        cfg.start_date = Some(date("2019-01-01"));
        assert!(run_simulation(&cfg).is_err());
        let mut cfg = flat_config(1.0);
        let dup = cfg.cohorts[0].clone();
        cfg.cohorts.push(dup);
        assert!(run_simulation(&cfg).is_err());
    }

    #[test]
    fn ladder_shape() {
        let base = hw("base", 1e14, 3000.0);
        let ladder = breakeven_ladder(20, &base, Tariff::new(0.05).unwrap(), 9e16, 0.5).unwrap();
        assert_eq!(ladder.len(), 20);
        assert_eq!(ladder[0].id, "L01");
        assert_eq!(ladder[19].id, "L20");
        assert_eq!(ladder[2].hardware.power(), 27_000.0);
        assert!(ladder
            .windows(2)
            .all(|w| w[0].cost_per_hash() < w[1].cost_per_hash()));
    }
}
