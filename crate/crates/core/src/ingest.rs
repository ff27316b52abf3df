//! Loading, validation and rendering of the CSV datasets and scenario files.
//!
//! All numbers use '.' as the decimal separator regardless of locale. Lines
//! starting with `#` are comments in every format. Rendering writes the
//! canonical column order with the shortest decimal that reads back to the
//! same value, so a canonical file survives a load/render round trip
//! byte for byte.

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use chrono::{Days, NaiveDate};

use crate::error::{Error, Result};
use crate::estimators::{fees_for_share, MarketSample, MarketSeries};
use crate::minesim::{block_subsidy, breakeven_ladder, DecisionCadence, MinerCohort, SimConfig};
use crate::netenergy::NetworkProfile;
use crate::units::{
    ChainSpec, HardwareCatalog, HardwareProfile, Tariff, HASHES_PER_EXAHASH, HASHES_PER_TERAHASH,
};

pub const HARDWARE_COLUMNS: [&str; 4] = ["name", "launch_year", "hash_rate_ths", "power_w"];
pub const MARKET_COLUMNS: [&str; 6] = [
    "date",
    "price_usd",
    "difficulty",
    "subsidy",
    "fees_per_block",
    "hash_rate_ehs",
];
pub const NETWORK_COLUMNS: [&str; 6] = [
    "name",
    "node_count",
    "energy_per_tx_per_node_j",
    "idle_power_per_node_w",
    "throughput_tps",
    "consensus_overhead_j",
];

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| Error::io(path, e))
}

fn origin_of(path: &Path) -> String {
    path.display().to_string()
}

/// A parsed CSV table with a validated header.
struct Table {
    origin: String,
    columns: BTreeMap<String, usize>,
    rows: Vec<(u64, csv::StringRecord)>,
}

impl Table {
    fn parse(text: &str, origin: &str, required: &[&str], optional: &[&str]) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .from_reader(text.as_bytes());
        let malformed = |line: u64, message: String| Error::Malformed {
            path: origin.to_string(),
            line,
            message,
        };
        let csv_error = |e: csv::Error| {
            let line = e.position().map_or(0, |p| p.line());
            malformed(line, e.to_string())
        };

        let header = reader.headers().map_err(csv_error)?.clone();
        if header.is_empty() {
            return Err(malformed(1, "missing header row".into()));
        }
        let mut columns = BTreeMap::new();
        for (i, name) in header.iter().enumerate() {
            if !required.contains(&name) && !optional.contains(&name) {
                return Err(Error::UnknownColumn {
                    path: origin.to_string(),
                    column: name.to_string(),
                });
            }
            if columns.insert(name.to_string(), i).is_some() {
                return Err(malformed(1, format!("column `{name}` appears twice")));
            }
        }
        if let Some(missing) = required.iter().find(|c| !columns.contains_key(**c)) {
            return Err(Error::MissingColumn {
                path: origin.to_string(),
                column: missing.to_string(),
            });
        }

        let mut rows = Vec::new();
        for record in reader.records() {
            let record = record.map_err(csv_error)?;
            let line = record.position().map_or(0, |p| p.line());
            rows.push((line, record));
        }
        Ok(Table {
            origin: origin.to_string(),
            columns,
            rows,
        })
    }

    fn malformed(&self, line: u64, message: impl Into<String>) -> Error {
        Error::Malformed {
            path: self.origin.clone(),
            line,
            message: message.into(),
        }
    }

    /// Trimmed cell; `None` when the column is absent or the cell empty.
    fn cell<'r>(&self, record: &'r csv::StringRecord, column: &str) -> Option<&'r str> {
        let idx = *self.columns.get(column)?;
        record.get(idx).filter(|s| !s.is_empty())
    }

    fn text<'r>(&self, line: u64, record: &'r csv::StringRecord, column: &str) -> Result<&'r str> {
        self.cell(record, column)
            .ok_or_else(|| self.malformed(line, format!("empty `{column}`")))
    }

    fn number(&self, line: u64, record: &csv::StringRecord, column: &str) -> Result<f64> {
        let raw = self.text(line, record, column)?;
        parse_number(raw).map_err(|m| self.malformed(line, format!("`{column}`: {m}")))
    }

    fn optional_number(
        &self,
        line: u64,
        record: &csv::StringRecord,
        column: &str,
    ) -> Result<Option<f64>> {
        self.cell(record, column)
            .map(|raw| {
                parse_number(raw).map_err(|m| self.malformed(line, format!("`{column}`: {m}")))
            })
            .transpose()
    }

    fn integer<T: std::str::FromStr>(
        &self,
        line: u64,
        record: &csv::StringRecord,
        column: &str,
    ) -> Result<T> {
        let raw = self.text(line, record, column)?;
        raw.parse()
            .map_err(|_| self.malformed(line, format!("`{column}`: `{raw}` is not an integer")))
    }

    fn date(&self, line: u64, record: &csv::StringRecord, column: &str) -> Result<NaiveDate> {
        let raw = self.text(line, record, column)?;
        parse_date(raw).map_err(|m| self.malformed(line, format!("`{column}`: {m}")))
    }

    /// Tags a model validation error with the row's line number.
    fn at_line<T>(&self, line: u64, result: Result<T>) -> Result<T> {
        result.map_err(|e| match e {
            Error::InvalidInput { field, reason } => {
                self.malformed(line, format!("invalid {field}: {reason}"))
            }
            other => other,
        })
    }
}

/// Locale-independent decimal; rejects NaN and infinities.
pub fn parse_number(raw: &str) -> std::result::Result<f64, String> {
    let bytes_ok = raw
        .bytes()
        .all(|b| b.is_ascii_digit() || matches!(b, b'.' | b'-' | b'+' | b'e' | b'E'));
    let value: f64 = if bytes_ok { raw.parse().ok() } else { None }
        .ok_or_else(|| format!("`{raw}` is not a decimal number"))?;
    if !value.is_finite() {
        return Err(format!("`{raw}` is not finite"));
    }
    Ok(value)
}

/// ISO-8601 calendar date, `YYYY-MM-DD`.
pub fn parse_date(raw: &str) -> std::result::Result<NaiveDate, String> {
    NaiveDate::parse_from_str(raw, "%Y-%m-%d")
        .map_err(|_| format!("`{raw}` is not a YYYY-MM-DD date"))
}

/// Shortest decimal `d` with `d * scale == value`.
fn scaled(value: f64, scale: f64) -> String {
    if scale == 1.0 {
        return value.to_string();
    }
    let target = value / scale;
    for digits in 0..17 {
        let candidate: f64 = format!("{target:.digits$e}").parse().unwrap_or(target);
        if candidate * scale == value {
            return candidate.to_string();
        }
    }
    target.to_string()
}

fn write_rows(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> String {
    let mut writer = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    writer.write_record(header).expect("write to memory");
    for row in rows {
        writer.write_record(&row).expect("write to memory");
    }
    String::from_utf8(writer.into_inner().expect("flush to memory")).expect("utf-8 input")
}

// ---------------------------------------------------------------------------
// hardware.csv

pub fn parse_hardware_csv(text: &str, origin: &str) -> Result<Vec<HardwareProfile>> {
    let table = Table::parse(text, origin, &HARDWARE_COLUMNS, &[])?;
    let profiles = table
        .rows
        .iter()
        .map(|(line, r)| {
            let line = *line;
            let profile = HardwareProfile::new(
                table.text(line, r, "name")?,
                table.integer(line, r, "launch_year")?,
                table.number(line, r, "hash_rate_ths")? * HASHES_PER_TERAHASH,
                table.number(line, r, "power_w")?,
            );
            table.at_line(line, profile)
        })
        .collect::<Result<Vec<_>>>()?;
    HardwareCatalog::new(profiles.clone()).map_err(|e| Error::Malformed {
        path: origin.to_string(),
        line: 0,
        message: e.to_string(),
    })?;
    Ok(profiles)
}

pub fn load_hardware_csv(path: &Path) -> Result<Vec<HardwareProfile>> {
    parse_hardware_csv(&read_file(path)?, &origin_of(path))
}

pub fn render_hardware_csv(profiles: &[HardwareProfile]) -> String {
    write_rows(
        &HARDWARE_COLUMNS,
        profiles.iter().map(|p| {
            vec![
                p.name().to_string(),
                p.launch_year().to_string(),
                scaled(p.hash_rate(), HASHES_PER_TERAHASH),
                scaled(p.power(), 1.0),
            ]
        }),
    )
}

// ---------------------------------------------------------------------------
// market.csv

/// Dates must be strictly increasing. An empty `fees_per_block` cell means
/// no fee data (`MarketSample::fees` reads it as 0).
pub fn parse_market_csv(text: &str, origin: &str) -> Result<MarketSeries> {
    let table = Table::parse(text, origin, &MARKET_COLUMNS[..4], &MARKET_COLUMNS[4..])?;
    let mut samples: Vec<MarketSample> = Vec::with_capacity(table.rows.len());
    for (line, r) in &table.rows {
        let line = *line;
        let date = table.date(line, r, "date")?;
        if let Some(prev) = samples.last() {
            if prev.date == date {
                return Err(Error::DuplicateDate {
                    path: origin.to_string(),
                    date,
                    line,
                });
            }
            if prev.date > date {
                return Err(Error::NonMonotonicDate {
                    path: origin.to_string(),
                    date,
                    line,
                });
            }
        }
        let sample = MarketSample {
            date,
            price_usd: table.number(line, r, "price_usd")?,
            difficulty: table.number(line, r, "difficulty")?,
            subsidy: table.number(line, r, "subsidy")?,
            fees_per_block: table.optional_number(line, r, "fees_per_block")?,
            observed_hash_rate: table
                .optional_number(line, r, "hash_rate_ehs")?
                .map(|v| v * HASHES_PER_EXAHASH),
        };
        table.at_line(line, sample.validate())?;
        samples.push(sample);
    }
    MarketSeries::new(samples)
}

pub fn load_market_csv(path: &Path) -> Result<MarketSeries> {
    parse_market_csv(&read_file(path)?, &origin_of(path))
}

/// Writes all six columns; absent optional values become empty cells.
pub fn render_market_csv(series: &MarketSeries) -> String {
    write_rows(
        &MARKET_COLUMNS,
        series.samples().iter().map(|s| {
            vec![
                s.date.to_string(),
                scaled(s.price_usd, 1.0),
                scaled(s.difficulty, 1.0),
                scaled(s.subsidy, 1.0),
                s.fees_per_block.map(|v| scaled(v, 1.0)).unwrap_or_default(),
                s.observed_hash_rate
                    .map(|v| scaled(v, HASHES_PER_EXAHASH))
                    .unwrap_or_default(),
            ]
        }),
    )
}

// ---------------------------------------------------------------------------
// networks.csv

/// `idle_power_per_node_w` and `consensus_overhead_j` may be omitted or left
/// empty and default to 0.
pub fn parse_networks_csv(text: &str, origin: &str) -> Result<Vec<NetworkProfile>> {
    let table = Table::parse(
        text,
        origin,
        &[
            "name",
            "node_count",
            "energy_per_tx_per_node_j",
            "throughput_tps",
        ],
        &["idle_power_per_node_w", "consensus_overhead_j"],
    )?;
    table
        .rows
        .iter()
        .map(|(line, r)| {
            let line = *line;
            let idle = table
                .optional_number(line, r, "idle_power_per_node_w")?
                .unwrap_or(0.0);
            let overhead = table
                .optional_number(line, r, "consensus_overhead_j")?
                .unwrap_or(0.0);
            let profile = NetworkProfile::new(
                table.text(line, r, "name")?,
                table.integer(line, r, "node_count")?,
                table.number(line, r, "energy_per_tx_per_node_j")?,
                table.number(line, r, "throughput_tps")?,
            )
            .and_then(|p| p.with_idle_power(idle))
            .and_then(|p| p.with_consensus_overhead(overhead));
            table.at_line(line, profile)
        })
        .collect()
}

pub fn load_networks_csv(path: &Path) -> Result<Vec<NetworkProfile>> {
    parse_networks_csv(&read_file(path)?, &origin_of(path))
}

pub fn render_networks_csv(profiles: &[NetworkProfile]) -> String {
    write_rows(
        &NETWORK_COLUMNS,
        profiles.iter().map(|p| {
            vec![
                p.name().to_string(),
                p.node_count().to_string(),
                scaled(p.energy_per_tx_per_node(), 1.0),
                scaled(p.idle_power_per_node(), 1.0),
                scaled(p.throughput(), 1.0),
                scaled(p.consensus_overhead_per_tx(), 1.0),
            ]
        }),
    )
}

// ---------------------------------------------------------------------------
// resampling

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResamplePolicy {
    /// Gap days repeat the last known sample.
    ForwardFill,
    /// Any gap is an error.
    Strict,
}

/// One sample per calendar day from the first to the last date.
pub fn resample_daily(series: &MarketSeries, policy: ResamplePolicy) -> Result<MarketSeries> {
    let (first, last) = match (series.first(), series.last()) {
        (Some(f), Some(l)) => (f.date, l.date),
        _ => return Err(Error::Empty("market series".into())),
    };
    let mut out = Vec::with_capacity((last - first).num_days() as usize + 1);
    let mut missing = Vec::new();
    let mut next = series.samples().iter().peekable();
    let mut current: Option<&MarketSample> = None;
    let mut day = first;
    while day <= last {
        if next.peek().is_some_and(|s| s.date == day) {
            current = next.next();
            out.push(current.expect("peeked").clone());
        } else {
            missing.push(day);
            let prev = current.expect("first day always has a sample");
            out.push(MarketSample {
                date: day,
                ..prev.clone()
            });
        }
        day = day.checked_add_days(Days::new(1)).expect("date in range");
    }
    if policy == ResamplePolicy::Strict && !missing.is_empty() {
        return Err(Error::MissingDates(missing));
    }
    MarketSeries::new(out)
}

// ---------------------------------------------------------------------------
// datasets

/// Market, hardware and network data loaded together.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub market: MarketSeries,
    pub hardware: Vec<HardwareProfile>,
    pub networks: Vec<NetworkProfile>,
}

impl Dataset {
    /// Missing hardware falls back to the bundled catalog; missing networks
    /// to an empty list.
    pub fn load(market: &Path, hardware: Option<&Path>, networks: Option<&Path>) -> Result<Self> {
        Ok(Dataset {
            market: load_market_csv(market)?,
            hardware: match hardware {
                Some(p) => load_hardware_csv(p)?,
                None => HardwareCatalog::bundled().profiles().to_vec(),
            },
            networks: networks
                .map(load_networks_csv)
                .transpose()?
                .unwrap_or_default(),
        })
    }

    pub fn catalog(&self) -> Result<HardwareCatalog> {
        HardwareCatalog::new(self.hardware.clone())
    }

    /// Every cohort's hardware must be one of the dataset's devices.
    pub fn check_cohorts(&self, cohorts: &[MinerCohort]) -> Result<()> {
        for c in cohorts {
            if !self.hardware.iter().any(|h| h == &c.hardware) {
                return Err(Error::DanglingHardware {
                    key: format!("cohort.{}.hardware", c.id),
                    name: c.hardware.name().to_string(),
                });
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// scenarios

/// Every key a scenario file may set. `<id>` is any cohort id made of
/// letters, digits, `_` and `-`.
pub const SCENARIO_KEYS: &[(&str, &str)] = &[
    (
        "chain.preset",
        "`bitcoin` (the default); other chain keys override it",
    ),
    ("chain.name", "label"),
    ("chain.target_block_time_s", "seconds"),
    ("chain.retarget_epoch", "blocks per difficulty adjustment"),
    ("chain.halving_interval", "blocks per subsidy halving"),
    ("chain.initial_subsidy", "coins per block in the first era"),
    (
        "chain.hashes_per_difficulty_unit",
        "expected hashes per block at difficulty 1",
    ),
    (
        "chain.retarget_clamp",
        "maximum difficulty change per retarget",
    ),
    ("sim.duration_epochs", "required; number of retarget epochs"),
    (
        "sim.start_height",
        "chain height of the first block, default 0",
    ),
    (
        "sim.start_date",
        "YYYY-MM-DD, default the first market date",
    ),
    (
        "sim.start_difficulty",
        "required unless sim.seed_equilibrium = true",
    ),
    (
        "sim.seed_equilibrium",
        "true: start from the market equilibrium",
    ),
    ("sim.hysteresis", "margin band, default 0"),
    ("sim.decision_cadence", "per_epoch (default) or per_day"),
    (
        "hardware.file",
        "device CSV relative to the scenario, default the bundled catalog",
    ),
    ("market.file", "market CSV relative to the scenario"),
    ("market.price_usd", "constant price, instead of market.file"),
    (
        "market.fees_per_block",
        "constant fees with market.price_usd, default 0",
    ),
    (
        "market.fee_share",
        "fees as a share of the start reward, instead of market.fees_per_block",
    ),
    (
        "ladder.count",
        "number of generated breakeven-ladder cohorts",
    ),
    ("ladder.hardware", "device the ladder is scaled from"),
    ("ladder.tariff_usd_kwh", "tariff of every ladder cohort"),
    ("ladder.capacity_ehs", "capacity of every ladder cohort"),
    ("ladder.elasticity", "capacity growth exponent, default 0.5"),
    ("cohort.<id>.hardware", "device name"),
    ("cohort.<id>.tariff_usd_kwh", "USD/kWh"),
    ("cohort.<id>.capacity_ehs", "EH/s"),
    ("cohort.<id>.active", "initial state, default true"),
    (
        "cohort.<id>.available_from",
        "YYYY-MM-DD before which the cohort stays off",
    ),
];

const COHORT_FIELDS: [&str; 5] = [
    "hardware",
    "tariff_usd_kwh",
    "capacity_ehs",
    "active",
    "available_from",
];

struct Entry {
    value: String,
    line: u64,
}

struct Keys {
    entries: BTreeMap<String, Entry>,
}

impl Keys {
    fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = idx as u64 + 1;
            let content = raw.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let malformed = |message: String| Error::Malformed {
                path: origin.to_string(),
                line,
                message,
            };
            let (key, value) = content
                .split_once('=')
                .ok_or_else(|| malformed(format!("expected `key = value`, found `{content}`")))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() || value.is_empty() {
                return Err(malformed(format!(
                    "expected `key = value`, found `{content}`"
                )));
            }
            if !is_known_key(key) {
                return Err(Error::UnknownKey {
                    key: key.to_string(),
                    line,
                });
            }
            let entry = Entry {
                value: value.to_string(),
                line,
            };
            if entries.insert(key.to_string(), entry).is_some() {
                return Err(malformed(format!("`{key}` is set twice")));
            }
        }
        Ok(Keys { entries })
    }

    fn has(&self, key: &str) -> bool {
        self.entries.contains_key(key)
    }

    fn str(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    fn invalid(&self, key: &str, reason: impl std::fmt::Display) -> Error {
        let line = self.entries.get(key).map_or(0, |e| e.line);
        Error::invalid(key, format!("line {line}: {reason}"))
    }

    fn get<T>(
        &self,
        key: &str,
        parse: impl Fn(&str) -> std::result::Result<T, String>,
    ) -> Result<Option<T>> {
        self.str(key)
            .map(|raw| parse(raw).map_err(|m| self.invalid(key, m)))
            .transpose()
    }

    fn number(&self, key: &str) -> Result<Option<f64>> {
        self.get(key, parse_number)
    }

    fn count(&self, key: &str) -> Result<Option<u64>> {
        self.get(key, |raw| {
            raw.parse()
                .map_err(|_| format!("`{raw}` is not a non-negative integer"))
        })
    }

    fn flag(&self, key: &str) -> Result<Option<bool>> {
        self.get(key, |raw| match raw {
            "true" => Ok(true),
            "false" => Ok(false),
            _ => Err(format!("`{raw}` is not true or false")),
        })
    }

    fn date(&self, key: &str) -> Result<Option<NaiveDate>> {
        self.get(key, parse_date)
    }

    fn required<T>(&self, key: &str, value: Option<T>) -> Result<T> {
        value.ok_or_else(|| Error::MissingKey(key.to_string()))
    }

    /// Attaches the key name to validation errors raised by the model.
    fn tag<T>(&self, key: &str, result: Result<T>) -> Result<T> {
        result.map_err(|e| match e {
            Error::InvalidInput { reason, .. } => self.invalid(key, reason),
            other => other,
        })
    }
}

fn is_known_key(key: &str) -> bool {
    if let Some(rest) = key.strip_prefix("cohort.") {
        return match rest.rsplit_once('.') {
            Some((id, field)) => is_cohort_id(id) && COHORT_FIELDS.contains(&field),
            None => false,
        };
    }
    SCENARIO_KEYS.iter().any(|(k, _)| *k == key)
}

fn is_cohort_id(id: &str) -> bool {
    !id.is_empty()
        && id
            .bytes()
            .all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

fn chain_from(keys: &Keys) -> Result<ChainSpec> {
    let mut spec = match keys.str("chain.preset") {
        None | Some("bitcoin") => ChainSpec::bitcoin(),
        Some(other) => {
            return Err(keys.invalid("chain.preset", format!("unknown preset `{other}`")))
        }
    };
    if let Some(name) = keys.str("chain.name") {
        spec.name = name.to_string();
    }
    if let Some(v) = keys.number("chain.target_block_time_s")? {
        spec.target_block_time = v;
    }
    if let Some(v) = keys.count("chain.retarget_epoch")? {
        spec.retarget_epoch = v;
    }
    if let Some(v) = keys.count("chain.halving_interval")? {
        spec.halving_interval = v;
    }
    if let Some(v) = keys.number("chain.initial_subsidy")? {
        spec.initial_subsidy = v;
    }
    if let Some(v) = keys.number("chain.hashes_per_difficulty_unit")? {
        spec.hashes_per_difficulty_unit = v;
    }
    if let Some(v) = keys.number("chain.retarget_clamp")? {
        spec.retarget_clamp = v;
    }
    spec.validate().map_err(|e| match e {
        Error::InvalidInput { field, reason } => Error::invalid(format!("chain.{field}"), reason),
        other => other,
    })?;
    Ok(spec)
}

fn market_from(
    keys: &Keys,
    base: &Path,
    spec: &ChainSpec,
    start_height: u64,
) -> Result<MarketSeries> {
    let constant = [
        "market.price_usd",
        "market.fees_per_block",
        "market.fee_share",
    ];
    match keys.str("market.file") {
        Some(file) => {
            if let Some(k) = constant.iter().find(|k| keys.has(k)) {
                return Err(keys.invalid(k, "cannot be combined with market.file"));
            }
            load_market_csv(&base.join(file))
        }
        None => {
            let price = keys.required("market.file", keys.number("market.price_usd")?)?;
            let subsidy = block_subsidy(start_height, spec);
            let fees = match (
                keys.number("market.fees_per_block")?,
                keys.number("market.fee_share")?,
            ) {
                (Some(_), Some(_)) => {
                    return Err(keys.invalid(
                        "market.fee_share",
                        "cannot be combined with market.fees_per_block",
                    ))
                }
                (Some(fees), None) => fees,
                (None, Some(share)) => {
                    keys.tag("market.fee_share", fees_for_share(subsidy, share))?
                }
                (None, None) => 0.0,
            };
            let date = keys.date("sim.start_date")?.unwrap_or(NaiveDate::MIN);
            let sample = MarketSample {
                date,
                price_usd: price,
                // unused by the simulator
                difficulty: 1.0,
                subsidy,
                fees_per_block: Some(fees),
                observed_hash_rate: None,
            };
            keys.tag("market.price_usd", sample.validate())?;
            MarketSeries::new(vec![sample])
        }
    }
}

fn cohorts_from(keys: &Keys, catalog: &HardwareCatalog) -> Result<Vec<MinerCohort>> {
    let resolve = |key: &str| -> Result<HardwareProfile> {
        let name = keys.required(key, keys.str(key))?;
        catalog
            .get(name)
            .cloned()
            .ok_or_else(|| Error::DanglingHardware {
                key: key.to_string(),
                name: name.to_string(),
            })
    };
    let tariff = |key: &str| -> Result<Tariff> {
        let v = keys.required(key, keys.number(key)?)?;
        keys.tag(key, Tariff::new(v))
    };
    let capacity = |key: &str| -> Result<f64> {
        Ok(keys.required(key, keys.number(key)?)? * HASHES_PER_EXAHASH)
    };

    let mut cohorts = Vec::new();
    let ladder_keys = [
        "ladder.count",
        "ladder.tariff_usd_kwh",
        "ladder.capacity_ehs",
        "ladder.elasticity",
    ];
    if keys.has("ladder.hardware") || ladder_keys.iter().any(|k| keys.has(k)) {
        let count = keys.required("ladder.count", keys.count("ladder.count")?)?;
        let base = resolve("ladder.hardware")?;
        let elasticity = keys.number("ladder.elasticity")?.unwrap_or(0.5);
        let ladder = breakeven_ladder(
            count as usize,
            &base,
            tariff("ladder.tariff_usd_kwh")?,
            capacity("ladder.capacity_ehs")?,
            elasticity,
        );
        cohorts.extend(keys.tag("ladder.elasticity", ladder)?);
    }

    let ids: BTreeSet<&str> = keys
        .entries
        .keys()
        .filter_map(|k| k.strip_prefix("cohort."))
        .filter_map(|rest| rest.rsplit_once('.').map(|(id, _)| id))
        .collect();
    for id in ids {
        let key = |field: &str| format!("cohort.{id}.{field}");
        let capacity_key = key("capacity_ehs");
        let cohort = MinerCohort::new(
            id,
            resolve(&key("hardware"))?,
            tariff(&key("tariff_usd_kwh"))?,
            capacity(&capacity_key)?,
            keys.flag(&key("active"))?.unwrap_or(true),
        );
        let mut cohort = keys.tag(&capacity_key, cohort)?;
        if let Some(date) = keys.date(&key("available_from"))? {
            cohort = cohort.with_available_from(date);
        }
        cohorts.push(cohort);
    }
    Ok(cohorts)
}

/// Parses scenario text; relative file references resolve against `base`.
pub fn parse_scenario(text: &str, base: &Path, origin: &str) -> Result<SimConfig> {
    let keys = Keys::parse(text, origin)?;
    let spec = chain_from(&keys)?;
    let start_height = keys.count("sim.start_height")?.unwrap_or(0);
    let catalog = match keys.str("hardware.file") {
        Some(file) => HardwareCatalog::new(load_hardware_csv(&base.join(file))?)?,
        None => HardwareCatalog::bundled(),
    };
    let price_path = market_from(&keys, base, &spec, start_height)?;
    let cohorts = cohorts_from(&keys, &catalog)?;

    let seed = keys.flag("sim.seed_equilibrium")?.unwrap_or(false);
    let start_difficulty = match (keys.number("sim.start_difficulty")?, seed) {
        (Some(_), true) => {
            return Err(keys.invalid(
                "sim.start_difficulty",
                "cannot be combined with sim.seed_equilibrium = true",
            ))
        }
        (Some(d), false) => d,
        (None, true) => 1.0,
        (None, false) => return Err(Error::MissingKey("sim.start_difficulty".into())),
    };
    let decision_cadence = keys
        .get("sim.decision_cadence", |raw| {
            raw.parse::<DecisionCadence>().map_err(|e| e.to_string())
        })?
        .unwrap_or_default();

    let mut config = SimConfig {
        spec,
        cohorts,
        price_path,
        start_difficulty,
        duration: keys.required("sim.duration_epochs", keys.count("sim.duration_epochs")?)?,
        hysteresis: keys.number("sim.hysteresis")?.unwrap_or(0.0),
        decision_cadence,
        start_height,
        start_date: keys.date("sim.start_date")?,
    };
    config.validate()?;
    if seed {
        config.seed_equilibrium()?;
    }
    Ok(config)
}

pub fn load_scenario(path: &Path) -> Result<SimConfig> {
    let base = path.parent().map_or_else(PathBuf::new, Path::to_path_buf);
    parse_scenario(&read_file(path)?, &base, &origin_of(path))
}

#[cfg(test)]
mod tests {
    use super::*;

    const MARKET: &str = "date,price_usd,difficulty,subsidy,fees_per_block,hash_rate_ehs\n\
                          2020-01-01,7200,13798783827516,12.5,0.6,98.1\n\
                          2020-01-02,6985,13798783827516,12.5,,\n";

    fn d(s: &str) -> NaiveDate {
        s.parse().unwrap()
    }

    #[test]
    fn market_two_rows() {
        let series = parse_market_csv(MARKET, "m.csv").unwrap();
        assert_eq!(series.len(), 2);
        let second = &series.samples()[1];
        assert_eq!(second.fees(), 0.0);
        assert_eq!(second.observed_hash_rate, None);
        assert_eq!(series.samples()[0].observed_hash_rate, Some(98.1e18));
        assert_eq!(render_market_csv(&series), MARKET);
    }

    #[test]
    fn market_optional_columns_may_be_absent() {
        let text = "# comment\ndate,price_usd,difficulty,subsidy\n2020-01-01,7200,1e13,12.5\n";
        let series = parse_market_csv(text, "m.csv").unwrap();
        assert_eq!(series.samples()[0].fees_per_block, None);
    }

    #[test]
    fn market_duplicate_date_is_named() {
        let text = "date,price_usd,difficulty,subsidy\n2020-01-01,1,1,1\n2020-01-01,2,1,1\n";
        let err = parse_market_csv(text, "m.csv").unwrap_err();
        assert!(
            matches!(err, Error::DuplicateDate { line: 3, .. }),
            "{err:?}"
        );
        assert!(err.to_string().contains("2020-01-01"));
    }

    #[test]
    fn market_out_of_order() {
        let text = "date,price_usd,difficulty,subsidy\n2020-01-02,1,1,1\n2020-01-01,2,1,1\n";
        assert!(matches!(
            parse_market_csv(text, "m.csv"),
            Err(Error::NonMonotonicDate { line: 3, .. })
        ));
    }

    #[test]
    fn market_schema_errors() {
        let unknown = "date,price_usd,difficulty,subsidy,volume\n";
        assert!(matches!(
            parse_market_csv(unknown, "m.csv"),
            Err(Error::UnknownColumn { column, .. }) if column == "volume"
        ));
        let missing = "date,price_usd,difficulty\n";
        assert!(matches!(
            parse_market_csv(missing, "m.csv"),
            Err(Error::MissingColumn { column, .. }) if column == "subsidy"
        ));
        let comma_decimal = "date,price_usd,difficulty,subsidy\n2020-01-01,\"7200,5\",1,1\n";
        assert!(matches!(
            parse_market_csv(comma_decimal, "m.csv"),
            Err(Error::Malformed { line: 2, .. })
        ));
        let ragged = "date,price_usd,difficulty,subsidy\n2020-01-01,1,1\n";
        assert!(matches!(
            parse_market_csv(ragged, "m.csv"),
            Err(Error::Malformed { .. })
        ));
        let nan = "date,price_usd,difficulty,subsidy\n2020-01-01,NaN,1,1\n";
        assert!(matches!(
            parse_market_csv(nan, "m.csv"),
            Err(Error::Malformed { line: 2, .. })
        ));
        let bad_date = "date,price_usd,difficulty,subsidy\n01/02/2020,1,1,1\n";
        assert!(matches!(
            parse_market_csv(bad_date, "m.csv"),
            Err(Error::Malformed { line: 2, .. })
        ));
    }

    #[test]
    fn comment_lines_keep_line_numbers() {
        let text = "# one\n# two\ndate,price_usd,difficulty,subsidy\n2020-01-01,1,1,1\n2020-01-02,-1,1,1\n";
        let err = parse_market_csv(text, "m.csv").unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 5, .. }), "{err:?}");
    }

    #[test]
    fn hardware_examples() {
        let text = "name,launch_year,hash_rate_ths,power_w\nAntminerS9,2016,11.5,1127\nAntminerS19Pro,2020,110,3250\n";
        let profiles = parse_hardware_csv(text, "h.csv").unwrap();
        assert_eq!(profiles[0].hash_rate(), 1.15e13);
        assert_eq!(profiles[1].hash_rate(), 1.1e14);
        assert_eq!(render_hardware_csv(&profiles), text);

        let zero = "name,launch_year,hash_rate_ths,power_w\nBroken,2016,11.5,0\n";
        let err = parse_hardware_csv(zero, "h.csv").unwrap_err();
        assert!(matches!(err, Error::Malformed { line: 2, .. }), "{err:?}");
        let dup = "name,launch_year,hash_rate_ths,power_w\nA,2016,1,1\nA,2017,1,1\n";
        assert!(parse_hardware_csv(dup, "h.csv").is_err());
    }

    #[test]
    fn bundled_catalog_parses() {
        assert_eq!(HardwareCatalog::bundled().profiles().len(), 3);
    }

    #[test]
    fn networks_round_trip() {
        let text = "name,node_count,energy_per_tx_per_node_j,idle_power_per_node_w,throughput_tps,consensus_overhead_j\n\
                    Permissioned,10,0.1,0,1000,0\n\
                    \"Rollup, large\",10000,0.0001,20,2100,0.5\n";
        let nets = parse_networks_csv(text, "n.csv").unwrap();
        assert_eq!(nets[1].name(), "Rollup, large");
        assert_eq!(render_networks_csv(&nets), text);
        let short = "name,node_count,energy_per_tx_per_node_j,throughput_tps\nA,3,0.5,10\n";
        assert_eq!(
            parse_networks_csv(short, "n.csv").unwrap()[0].idle_power_per_node(),
            0.0
        );
    }

    #[test]
    fn missing_file_is_io() {
        let err = load_market_csv(Path::new("/nonexistent/market.csv")).unwrap_err();
        assert!(err.is_io());
    }

    fn gappy() -> MarketSeries {
        let text = "date,price_usd,difficulty,subsidy\n2020-01-01,1,1,1\n2020-01-05,2,1,1\n";
        parse_market_csv(text, "g.csv").unwrap()
    }

    #[test]
    fn resample_forward_fill() {
        let daily = resample_daily(&gappy(), ResamplePolicy::ForwardFill).unwrap();
        assert_eq!(daily.len(), 5);
        for s in &daily.samples()[1..4] {
            assert_eq!(s.price_usd, 1.0);
        }
        assert_eq!(daily.samples()[3].date, d("2020-01-04"));
        assert_eq!(daily.samples()[4].price_usd, 2.0);
        assert_eq!(
            resample_daily(&daily, ResamplePolicy::ForwardFill).unwrap(),
            daily
        );
        assert_eq!(
            resample_daily(&daily, ResamplePolicy::Strict).unwrap(),
            daily
        );
    }

    #[test]
    fn resample_strict_lists_gap() {
        match resample_daily(&gappy(), ResamplePolicy::Strict) {
            Err(Error::MissingDates(days)) => {
                assert_eq!(
                    days,
                    vec![d("2020-01-02"), d("2020-01-03"), d("2020-01-04")]
                )
            }
            other => panic!("{other:?}"),
        }
        let empty = MarketSeries::new(vec![]).unwrap();
        assert!(resample_daily(&empty, ResamplePolicy::ForwardFill).is_err());
    }

    const MINIMAL: &str = "\
sim.duration_epochs = 3
sim.start_difficulty = 1.6e13
market.price_usd = 9000
cohort.a.hardware = AntminerS19Pro
cohort.a.tariff_usd_kwh = 0.05
cohort.a.capacity_ehs = 100
";

    #[test]
    fn minimal_scenario_defaults() {
        let cfg = parse_scenario(MINIMAL, Path::new("."), "s").unwrap();
        assert_eq!(cfg.spec, ChainSpec::bitcoin());
        assert_eq!(cfg.hysteresis, 0.0);
        assert_eq!(cfg.decision_cadence, DecisionCadence::PerEpoch);
        assert_eq!(cfg.start_height, 0);
        assert_eq!(cfg.cohorts.len(), 1);
        assert_eq!(cfg.cohorts[0].capacity, 1e20);
        assert!(cfg.cohorts[0].active);
        assert_eq!(cfg.price_path.samples()[0].fees(), 0.0);
    }

    #[test]
    fn scenario_unknown_key_is_named() {
        let text = format!("{MINIMAL}chain.blok_time = 600\n");
        match parse_scenario(&text, Path::new("."), "s") {
            Err(Error::UnknownKey { key, line }) => {
                assert_eq!(key, "chain.blok_time");
                assert_eq!(line, 7);
            }
            other => panic!("{other:?}"),
        }
        let bad_field = format!("{MINIMAL}cohort.a.colour = red\n");
        assert!(matches!(
            parse_scenario(&bad_field, Path::new("."), "s"),
            Err(Error::UnknownKey { .. })
        ));
    }

    #[test]
    fn scenario_dangling_hardware() {
        let text = MINIMAL.replace("AntminerS19Pro", "AntminerS99");
        match parse_scenario(&text, Path::new("."), "s") {
            Err(Error::DanglingHardware { key, name }) => {
                assert_eq!(key, "cohort.a.hardware");
                assert_eq!(name, "AntminerS99");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn scenario_missing_and_conflicting_keys() {
        let text = MINIMAL.replace("sim.duration_epochs = 3\n", "");
        assert!(matches!(
            parse_scenario(&text, Path::new("."), "s"),
            Err(Error::MissingKey(k)) if k == "sim.duration_epochs"
        ));
        let text = MINIMAL.replace("cohort.a.capacity_ehs = 100\n", "");
        assert!(matches!(
            parse_scenario(&text, Path::new("."), "s"),
            Err(Error::MissingKey(k)) if k == "cohort.a.capacity_ehs"
        ));
        let text = format!("{MINIMAL}sim.seed_equilibrium = true\n");
        assert!(parse_scenario(&text, Path::new("."), "s").is_err());
        let text = format!("{MINIMAL}sim.duration_epochs = 4\n");
        assert!(matches!(
            parse_scenario(&text, Path::new("."), "s"),
            Err(Error::Malformed { line: 7, .. })
        ));
        let text = format!("{MINIMAL}just words\n");
        assert!(matches!(
            parse_scenario(&text, Path::new("."), "s"),
            Err(Error::Malformed { line: 7, .. })
        ));
        let text = format!("{MINIMAL}sim.hysteresis = -1\n");
        let err = parse_scenario(&text, Path::new("."), "s").unwrap_err();
        assert!(err.to_string().contains("hysteresis"), "{err}");
    }

    #[test]
    fn scenario_ladder_and_seeding() {
        let text = "\
sim.duration_epochs = 2
sim.seed_equilibrium = true
sim.start_height = 609840
market.price_usd = 9000
market.fee_share = 0.2   # of the start reward
ladder.count = 20
ladder.hardware = AntminerS19Pro
ladder.tariff_usd_kwh = 0.05
ladder.capacity_ehs = 0.09
";
        let cfg = parse_scenario(text, Path::new("."), "s").unwrap();
        assert_eq!(cfg.cohorts.len(), 20);
        assert_eq!(cfg.price_path.samples()[0].fees(), 3.125);
        let active = cfg.cohorts.iter().filter(|c| c.active).count();
        assert!(active > 0 && active < 20, "{active}");
        assert!(cfg.start_difficulty > 1e10);
    }
}
