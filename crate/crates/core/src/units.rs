//! Shared domain types, unit conversions and the hardware catalog.
//!
//! Energies are carried in joules and powers in watts throughout the crate.
//! USD, kWh and TWh only appear at the edges (tariffs, annual totals, reports).

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{check, Error, Result};

/// Mean calendar year including leap days (365.25 d).
pub const HOURS_PER_YEAR: f64 = 8766.0;
pub const SECONDS_PER_YEAR: f64 = HOURS_PER_YEAR * 3600.0;
pub const JOULES_PER_KWH: f64 = 3.6e6;
pub const JOULES_PER_TWH: f64 = 3.6e15;
pub const HASHES_PER_EXAHASH: f64 = 1e18;
pub const HASHES_PER_TERAHASH: f64 = 1e12;

/// Protocol constants of a proof-of-work chain.
#[derive(Debug, Clone, PartialEq)]
pub struct ChainSpec {
    pub name: String,
    /// Target block interval in seconds.
    pub target_block_time: f64,
    /// Blocks between two difficulty adjustments.
    pub retarget_epoch: u64,
    /// Blocks between two subsidy halvings.
    pub halving_interval: u64,
    /// Subsidy of the first era, coins per block.
    pub initial_subsidy: f64,
    /// Expected hashes per block at difficulty 1.
    pub hashes_per_difficulty_unit: f64,
    /// Maximum factor by which one retarget may move the difficulty.
    pub retarget_clamp: f64,
}

impl ChainSpec {
    pub fn bitcoin() -> Self {
        ChainSpec {
            name: "bitcoin".to_string(),
            target_block_time: 600.0,
            retarget_epoch: 2016,
            halving_interval: 210_000,
            initial_subsidy: 50.0,
            hashes_per_difficulty_unit: 4_294_967_296.0,
            retarget_clamp: 4.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check(
            "target_block_time",
            self.target_block_time,
            |v| v > 0.0,
            "> 0",
        )?;
        if self.retarget_epoch < 1 {
            return Err(Error::invalid("retarget_epoch", "must be at least 1"));
        }
        if self.halving_interval < 1 {
            return Err(Error::invalid("halving_interval", "must be at least 1"));
        }
        check(
            "initial_subsidy",
            self.initial_subsidy,
            |v| v >= 0.0,
            ">= 0",
        )?;
        check(
            "hashes_per_difficulty_unit",
            self.hashes_per_difficulty_unit,
            |v| v > 0.0,
            "> 0",
        )?;
        check("retarget_clamp", self.retarget_clamp, |v| v >= 1.0, ">= 1")?;
        Ok(())
    }

    pub fn blocks_per_year(&self) -> f64 {
        SECONDS_PER_YEAR / self.target_block_time
    }
}

impl Default for ChainSpec {
    fn default() -> Self {
        ChainSpec::bitcoin()
    }
}

/// A mining device model.
#[derive(Debug, Clone, PartialEq)]
pub struct HardwareProfile {
    name: String,
    launch_year: i32,
    hash_rate: f64,
    power: f64,
}

impl HardwareProfile {
    /// `hash_rate` in H/s, `power` in W; both must be strictly positive.
    pub fn new(
        name: impl Into<String>,
        launch_year: i32,
        hash_rate: f64,
        power: f64,
    ) -> Result<Self> {
        let name = name.into();
        if name.trim().is_empty() {
            return Err(Error::invalid("hardware name", "must not be empty"));
        }
        check("hash_rate", hash_rate, |v| v > 0.0, "> 0")?;
        check("power", power, |v| v > 0.0, "> 0")?;
        Ok(HardwareProfile {
            name,
            launch_year,
            hash_rate,
            power,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn launch_year(&self) -> i32 {
        self.launch_year
    }

    /// H/s
    pub fn hash_rate(&self) -> f64 {
        self.hash_rate
    }

    /// W
    pub fn power(&self) -> f64 {
        self.power
    }

    /// J/H, see [`efficiency_of`].
    pub fn efficiency(&self) -> f64 {
        efficiency_of(self)
    }
}

/// Electricity price paid by a miner.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Tariff {
    usd_per_kwh: f64,
}

impl Tariff {
    pub fn new(usd_per_kwh: f64) -> Result<Self> {
        check("tariff", usd_per_kwh, |v| v >= 0.0, ">= 0 USD/kWh")?;
        Ok(Tariff { usd_per_kwh })
    }

    pub fn usd_per_kwh(self) -> f64 {
        self.usd_per_kwh
    }

    pub fn usd_per_joule(self) -> f64 {
        self.usd_per_kwh / JOULES_PER_KWH
    }

    pub(crate) fn require_positive(self) -> Result<Self> {
        if self.usd_per_kwh > 0.0 {
            Ok(self)
        } else {
            Err(Error::invalid(
                "tariff",
                "must be > 0 USD/kWh (free electricity makes the bound unbounded)",
            ))
        }
    }
}

impl fmt::Display for Tariff {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.usd_per_kwh)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimateKind {
    Lower,
    Upper,
    BestGuess,
    Simulated,
}

impl EstimateKind {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimateKind::Lower => "lower",
            EstimateKind::Upper => "upper",
            EstimateKind::BestGuess => "best_guess",
            EstimateKind::Simulated => "simulated",
        }
    }
}

/// A power figure together with its annualized energy and the inputs that
/// produced it. The annual figure is always derived from the power.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyEstimate {
    power: f64,
    annual_energy: f64,
    kind: EstimateKind,
    assumptions: BTreeMap<String, f64>,
}

impl EnergyEstimate {
    pub fn from_power(power: f64, kind: EstimateKind) -> Result<Self> {
        let annual_energy = watts_to_twh_per_year(power)?;
        Ok(EnergyEstimate {
            power,
            annual_energy,
            kind,
            assumptions: BTreeMap::new(),
        })
    }

    pub fn with_assumption(mut self, key: impl Into<String>, value: f64) -> Self {
        self.assumptions.insert(key.into(), value);
        self
    }

    /// W
    pub fn power(&self) -> f64 {
        self.power
    }

    /// TWh/yr
    pub fn annual_energy(&self) -> f64 {
        self.annual_energy
    }

    pub fn kind(&self) -> EstimateKind {
        self.kind
    }

    pub fn assumptions(&self) -> &BTreeMap<String, f64> {
        &self.assumptions
    }
}

/// Energy spent per hash, J/H.
pub fn efficiency_of(profile: &HardwareProfile) -> f64 {
    profile.power / profile.hash_rate
}

pub fn watts_to_twh_per_year(power: f64) -> Result<f64> {
    check("power", power, |v| v >= 0.0, ">= 0 W")?;
    Ok(power * SECONDS_PER_YEAR / JOULES_PER_TWH)
}

pub fn twh_per_year_to_watts(annual: f64) -> Result<f64> {
    check("annual energy", annual, |v| v >= 0.0, ">= 0 TWh/yr")?;
    Ok(annual * JOULES_PER_TWH / SECONDS_PER_YEAR)
}

pub fn joules_to_kwh(energy: f64) -> Result<f64> {
    check("energy", energy, |v| v >= 0.0, ">= 0 J")?;
    Ok(energy / JOULES_PER_KWH)
}

pub fn kwh_to_joules(energy: f64) -> Result<f64> {
    check("energy", energy, |v| v >= 0.0, ">= 0 kWh")?;
    Ok(energy * JOULES_PER_KWH)
}

const BUNDLED_HARDWARE: &str = include_str!("../data/hardware.csv");

/// Mining devices indexed by name.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct HardwareCatalog {
    profiles: Vec<HardwareProfile>,
}

impl HardwareCatalog {
    /// Rejects duplicate names.
    pub fn new(profiles: Vec<HardwareProfile>) -> Result<Self> {
        for (i, p) in profiles.iter().enumerate() {
            if profiles[..i].iter().any(|q| q.name == p.name) {
                return Err(Error::invalid(
                    "hardware catalog",
                    format!("duplicate device name `{}`", p.name),
                ));
            }
        }
        Ok(HardwareCatalog { profiles })
    }

    /// The reference devices shipped in `data/hardware.csv`.
    pub fn bundled() -> Self {
        let profiles = crate::ingest::parse_hardware_csv(BUNDLED_HARDWARE, "data/hardware.csv")
            .expect("bundled hardware catalog is valid");
        HardwareCatalog::new(profiles).expect("bundled hardware names are unique")
    }

    pub fn profiles(&self) -> &[HardwareProfile] {
        &self.profiles
    }

    pub fn get(&self, name: &str) -> Option<&HardwareProfile> {
        self.profiles.iter().find(|p| p.name == name)
    }

    /// The most efficient device already on the market before `year`, i.e.
    /// launched in an earlier calendar year. Falls back to devices launched in
    /// `year` itself when nothing older exists.
    pub fn best_for_year(&self, year: i32) -> Option<&HardwareProfile> {
        let best = |pred: &dyn Fn(&HardwareProfile) -> bool| {
            self.profiles
                .iter()
                .filter(|p| pred(p))
                .min_by(|a, b| a.efficiency().total_cmp(&b.efficiency()))
        };
        best(&|p| p.launch_year < year).or_else(|| best(&|p| p.launch_year <= year))
    }
}
