//! The `blockwatt` command line.
//!
//! Every subcommand writes CSV (or an aligned table) to stdout and
//! diagnostics to stderr. Exit codes: 0 success, 1 invalid input, 2 I/O
//! failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::{Error, Result};
use crate::estimators::{
    halving_floor, halving_fraction, lower_bound_power, network_hash_rate, pearson_correlation,
    project_consumption, relative_margin, revenue_per_exahash, upper_bound_power, MarketSample,
    MarketSeries,
};
use crate::ingest::{
    load_hardware_csv, load_market_csv, load_networks_csv, load_scenario, parse_date,
    resample_daily, ResamplePolicy,
};
use crate::minesim::{run_simulation, summarize_trace, SimOutcome, SimTrace};
use crate::netenergy::{
    compare_architectures, gas_reduction_factor, prover_energy_per_tx, redundant_energy_per_tx,
    rollup_energy_per_tx, savings_fraction, Architecture, NetworkProfile, RollupParams,
};
use crate::units::{watts_to_twh_per_year, ChainSpec, HardwareCatalog, Tariff};

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommandOutcome {
    pub exit_code: i32,
    /// Machine-readable payload.
    pub stdout: String,
    /// Diagnostics and summaries.
    pub stderr: String,
}

impl CommandOutcome {
    fn ok(stdout: String) -> Self {
        CommandOutcome {
            exit_code: 0,
            stdout,
            stderr: String::new(),
        }
    }

    fn with_stderr(mut self, stderr: String) -> Self {
        self.stderr = stderr;
        self
    }

    fn failure(err: &Error) -> Self {
        CommandOutcome {
            exit_code: if err.is_io() { 2 } else { 1 },
            stdout: String::new(),
            stderr: format!("error: {err}\n"),
        }
    }

    fn from_result(result: Result<CommandOutcome>) -> Self {
        result.unwrap_or_else(|e| CommandOutcome::failure(&e))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "blockwatt",
    version,
    about = "Energy estimates for proof-of-work blockchains and their alternatives"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Lower and upper bounds of the network's power draw, per market sample.
    Bounds(BoundsArgs),
    /// Relative mining margin of catalog devices, per market sample.
    Margin(MarginArgs),
    /// Consumption after successive subsidy halvings.
    Project(ProjectArgs),
    /// Run simulation scenarios and write their epoch traces.
    Simulate(SimulateArgs),
    /// Per-transaction energy before and after a zk-rollup.
    Rollup(RollupArgs),
    /// Rank architectures by energy per transaction.
    Compare(CompareArgs),
    /// Pearson correlation of two daily market series.
    Correlate(CorrelateArgs),
}

/// Inclusive date window `FROM..TO`; either end may be omitted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct DateRange {
    pub from: Option<NaiveDate>,
    pub to: Option<NaiveDate>,
}

impl FromStr for DateRange {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        let (from, to) = s
            .split_once("..")
            .ok_or_else(|| format!("`{s}` is not a FROM..TO date range"))?;
        let end = |raw: &str| (!raw.is_empty()).then(|| parse_date(raw)).transpose();
        Ok(DateRange {
            from: end(from.trim())?,
            to: end(to.trim())?,
        })
    }
}

impl DateRange {
    fn apply(&self, series: &MarketSeries) -> MarketSeries {
        series.window(self.from, self.to)
    }
}

#[derive(Debug, Clone, Args)]
pub struct BoundsArgs {
    /// Market CSV.
    pub market: PathBuf,
    /// Hardware CSV; the bundled catalog when omitted.
    pub hardware: Option<PathBuf>,
    /// Electricity tariff for the upper bound, USD/kWh. Repeat for several.
    #[arg(long = "tariff", required = true)]
    pub tariffs: Vec<f64>,
    /// Efficiency for the lower bound: a device name, `best` (most efficient
    /// device on the market before the sample's year) or a value in J/H.
    /// Repeat for several.
    #[arg(long = "efficiency", default_value = "best")]
    pub efficiencies: Vec<String>,
    /// Only samples within FROM..TO.
    #[arg(long)]
    pub date_range: Option<DateRange>,
}

#[derive(Debug, Clone, Args)]
pub struct MarginArgs {
    /// Market CSV.
    pub market: PathBuf,
    /// Hardware CSV; the bundled catalog when omitted.
    pub hardware: Option<PathBuf>,
    /// Electricity tariff, USD/kWh.
    #[arg(long)]
    pub tariff: f64,
    /// Device names from the catalog.
    #[arg(long = "hardware", required = true, num_args = 1..)]
    pub devices: Vec<String>,
    /// Only samples within FROM..TO.
    #[arg(long)]
    pub date_range: Option<DateRange>,
}

#[derive(Debug, Clone, Args)]
pub struct ProjectArgs {
    /// Current consumption, TWh/yr.
    #[arg(long)]
    pub current_twh: f64,
    /// Share of mining revenue paid as fees, 0 to 1.
    #[arg(long)]
    pub fee_share: f64,
    /// Number of halvings to project.
    #[arg(long)]
    pub halvings: u32,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Scenario files; several run in parallel.
    #[arg(required = true)]
    pub scenarios: Vec<PathBuf>,
    /// Trace CSV for one scenario, or a directory receiving `<name>.csv` per
    /// scenario. Stdout when omitted with a single scenario.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct RollupArgs {
    /// Nodes re-executing every transaction.
    #[arg(long, default_value_t = 10_000)]
    pub nodes: u64,
    /// Energy one node spends per transaction, J.
    #[arg(long, default_value_t = 0.01)]
    pub per_node_j: f64,
    /// Gas of a plain transfer.
    #[arg(long, default_value_t = 36_500.0)]
    pub gas_simple: f64,
    /// Gas of the same transfer inside a rollup.
    #[arg(long, default_value_t = 365.0)]
    pub gas_rollup: f64,
    /// Power of the operator's prover, W.
    #[arg(long, default_value_t = 1050.0)]
    pub prover_w: f64,
    /// Sustained rollup throughput, tx/s.
    #[arg(long, default_value_t = 2100.0)]
    pub tps: f64,
    /// Idle power per node, W; adds idle-adjusted columns amortized over `--tps`.
    #[arg(long)]
    pub idle_w: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Default)]
pub enum Format {
    #[default]
    Csv,
    Table,
}

#[derive(Debug, Clone, Args)]
pub struct CompareArgs {
    /// Networks CSV.
    pub networks: PathBuf,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Series {
    /// USD per coin.
    PriceUsd,
    Difficulty,
    /// Expected mining revenue, USD per 10^18 hashes.
    RevenuePerEh,
    /// Observed hash rate where present, otherwise implied by the difficulty.
    HashRate,
    /// Hash rate implied by the difficulty at the target block time.
    ImpliedHashRate,
    /// Fees per block, coins.
    FeesPerBlock,
}

impl Series {
    fn name(self) -> &'static str {
        match self {
            Series::PriceUsd => "price_usd",
            Series::Difficulty => "difficulty",
            Series::RevenuePerEh => "revenue_per_eh",
            Series::HashRate => "hash_rate",
            Series::ImpliedHashRate => "implied_hash_rate",
            Series::FeesPerBlock => "fees_per_block",
        }
    }

    fn value(self, sample: &MarketSample, spec: &ChainSpec) -> Result<f64> {
        match self {
            Series::PriceUsd => Ok(sample.price_usd),
            Series::Difficulty => Ok(sample.difficulty),
            Series::RevenuePerEh => revenue_per_exahash(sample, spec),
            Series::HashRate => hash_rate_of(sample, spec),
            Series::ImpliedHashRate => {
                network_hash_rate(sample.difficulty, spec.target_block_time, spec)
            }
            Series::FeesPerBlock => Ok(sample.fees()),
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct CorrelateArgs {
    /// Market CSV; resampled to daily values with forward fill.
    pub market: PathBuf,
    #[arg(long, value_enum)]
    pub x: Series,
    #[arg(long, value_enum)]
    pub y: Series,
    /// Only days within FROM..TO.
    #[arg(long)]
    pub date_range: Option<DateRange>,
    /// Print the aligned daily series instead of the coefficient.
    #[arg(long)]
    pub series: bool,
}

/// Parses `args` (program name first) and runs the subcommand.
pub fn run<I, T>(args: I) -> CommandOutcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
                    CommandOutcome::ok(text)
                }
                _ => CommandOutcome {
                    exit_code: 1,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    match cli.command {
        Command::Bounds(a) => cmd_bounds(&a),
        Command::Margin(a) => cmd_margin(&a),
        Command::Project(a) => cmd_project(&a),
        Command::Simulate(a) => cmd_simulate(&a),
        Command::Rollup(a) => cmd_rollup(&a),
        Command::Compare(a) => cmd_compare(&a),
        Command::Correlate(a) => cmd_correlate(&a),
    }
}

fn catalog_from(path: Option<&Path>) -> Result<HardwareCatalog> {
    match path {
        Some(p) => HardwareCatalog::new(load_hardware_csv(p)?),
        None => Ok(HardwareCatalog::bundled()),
    }
}

/// Observed hash rate when the sample carries one, else the rate implied by
/// the difficulty at the target block time.
fn hash_rate_of(sample: &MarketSample, spec: &ChainSpec) -> Result<f64> {
    match sample.observed_hash_rate {
        Some(r) => Ok(r),
        None => network_hash_rate(sample.difficulty, spec.target_block_time, spec),
    }
}

fn csv_line(out: &mut String, cells: &[String]) {
    out.push_str(&cells.join(","));
    out.push('\n');
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '.' || c == '-' {
                c
            } else {
                '_'
            }
        })
        .collect()
}

enum EfficiencyChoice {
    Best,
    Device(f64),
}

pub fn cmd_bounds(args: &BoundsArgs) -> CommandOutcome {
    CommandOutcome::from_result(bounds(args))
}

fn bounds(args: &BoundsArgs) -> Result<CommandOutcome> {
    let spec = ChainSpec::bitcoin();
    let tariffs = args
        .tariffs
        .iter()
        .map(|&t| Tariff::new(t)?.require_positive())
        .collect::<Result<Vec<_>>>()?;
    let market = load_market_csv(&args.market)?;
    let catalog = catalog_from(args.hardware.as_deref())?;
    let choices = args
        .efficiencies
        .iter()
        .map(|e| {
            if e == "best" {
                Ok(EfficiencyChoice::Best)
            } else if let Some(p) = catalog.get(e) {
                Ok(EfficiencyChoice::Device(p.efficiency()))
            } else {
                e.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v > 0.0)
                    .map(EfficiencyChoice::Device)
                    .ok_or_else(|| {
                        Error::invalid(
                            "efficiency",
                            format!("`{e}` is neither `best`, a catalog device nor a J/H value"),
                        )
                    })
            }
        })
        .collect::<Result<Vec<_>>>()?;

    let mut header = vec!["date".to_string()];
    for e in &args.efficiencies {
        header.push(if args.efficiencies.len() == 1 {
            "lower_twh".into()
        } else {
            format!("lower_twh_{}", sanitize(e))
        });
    }
    for t in &tariffs {
        header.push(if tariffs.len() == 1 {
            "upper_twh".into()
        } else {
            format!("upper_twh_{}", t.usd_per_kwh())
        });
    }
    let mut out = String::new();
    csv_line(&mut out, &header);

    let window = args.date_range.unwrap_or_default().apply(&market);
    for sample in window.samples() {
        let hash_rate = hash_rate_of(sample, &spec)?;
        let mut row = vec![sample.date.to_string()];
        for choice in &choices {
            let efficiency = match choice {
                EfficiencyChoice::Device(e) => *e,
                EfficiencyChoice::Best => catalog
                    .best_for_year(sample.date.year())
                    .ok_or_else(|| {
                        Error::invalid(
                            "efficiency",
                            format!("no catalog device available by {}", sample.date),
                        )
                    })?
                    .efficiency(),
            };
            let lower = lower_bound_power(hash_rate, efficiency)?;
            row.push(lower.annual_energy().to_string());
        }
        for &t in &tariffs {
            row.push(
                upper_bound_power(sample, &spec, t)?
                    .annual_energy()
                    .to_string(),
            );
        }
        csv_line(&mut out, &row);
    }
    Ok(CommandOutcome::ok(out))
}

pub fn cmd_margin(args: &MarginArgs) -> CommandOutcome {
    CommandOutcome::from_result(margin(args))
}

fn margin(args: &MarginArgs) -> Result<CommandOutcome> {
    let spec = ChainSpec::bitcoin();
    let tariff = Tariff::new(args.tariff)?.require_positive()?;
    let market = load_market_csv(&args.market)?;
    let catalog = catalog_from(args.hardware.as_deref())?;
    let devices = args
        .devices
        .iter()
        .map(|name| {
            catalog
                .get(name)
                .ok_or_else(|| Error::invalid("hardware", format!("unknown device `{name}`")))
        })
        .collect::<Result<Vec<_>>>()?;

    let mut header = vec!["date".to_string(), "revenue_usd_per_eh".to_string()];
    header.extend(
        devices
            .iter()
            .map(|d| format!("margin_{}", sanitize(d.name()))),
    );
    let mut out = String::new();
    csv_line(&mut out, &header);
    for sample in args.date_range.unwrap_or_default().apply(&market).samples() {
        let rate = revenue_per_exahash(sample, &spec)?;
        let mut row = vec![sample.date.to_string(), rate.to_string()];
        for d in &devices {
            row.push(relative_margin(d, tariff, rate)?.to_string());
        }
        csv_line(&mut out, &row);
    }
    Ok(CommandOutcome::ok(out))
}

pub fn cmd_project(args: &ProjectArgs) -> CommandOutcome {
    CommandOutcome::from_result(project(args))
}

fn project(args: &ProjectArgs) -> Result<CommandOutcome> {
    let mut out = String::from("halvings,fraction,twh\n");
    for n in 0..=args.halvings {
        let fraction = halving_fraction(args.fee_share, n)?;
        let twh = project_consumption(args.current_twh, args.fee_share, n)?;
        let _ = writeln!(out, "{n},{fraction},{twh}");
    }
    let floor = halving_floor(args.fee_share)?;
    let _ = writeln!(out, "floor,{floor},{}", args.current_twh * floor);
    Ok(CommandOutcome::ok(out))
}

/// Trace rows with one margin and one state column per cohort.
pub fn render_trace(trace: &SimTrace, spec: &ChainSpec) -> String {
    let mut header: Vec<String> = [
        "epoch_index",
        "sim_time_s",
        "height",
        "difficulty",
        "hash_rate_hs",
        "power_w",
        "subsidy",
        "price_usd",
        "fees_per_block",
        "revenue_usd_per_eh",
        "block_time_s",
        "active_cohorts",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    if let Some(first) = trace.records.first() {
        header.extend(first.cohorts.keys().map(|id| format!("margin_{id}")));
    }
    let mut out = String::new();
    csv_line(&mut out, &header);
    for r in &trace.records {
        let mut row = vec![
            r.epoch_index.to_string(),
            r.sim_time.to_string(),
            r.height.to_string(),
            r.difficulty.to_string(),
            r.hash_rate.to_string(),
            r.power.to_string(),
            r.subsidy.to_string(),
            r.price_usd.to_string(),
            r.fees_per_block.to_string(),
            r.revenue_rate.to_string(),
            r.mean_block_time(spec).to_string(),
            r.cohorts.values().filter(|c| c.active).count().to_string(),
        ];
        row.extend(r.cohorts.values().map(|c| c.margin.to_string()));
        csv_line(&mut out, &row);
    }
    out
}

fn trace_summary(name: &str, trace: &SimTrace) -> Result<String> {
    let mut s = format!("scenario: {name}\nepochs: {}\n", trace.records.len());
    match &trace.outcome {
        SimOutcome::Completed => s.push_str("outcome: completed\n"),
        SimOutcome::Stalled {
            epoch_index,
            sim_time,
            height,
        } => {
            let _ = writeln!(
                s,
                "outcome: stalled in epoch {epoch_index} at height {height}, t = {sim_time} s"
            );
        }
    }
    if !trace.records.is_empty() {
        let summary = summarize_trace(trace)?;
        let _ = writeln!(
            s,
            "mean_power_twh: {:.3}",
            watts_to_twh_per_year(summary.mean_power)?
        );
        let _ = writeln!(
            s,
            "min_power_twh: {:.3}",
            watts_to_twh_per_year(summary.min_power)?
        );
        let _ = writeln!(
            s,
            "max_power_twh: {:.3}",
            watts_to_twh_per_year(summary.max_power)?
        );
        match summary.revenue_hash_correlation {
            Some(r) => {
                let _ = writeln!(s, "corr_revenue_hash_rate: {r:.4}");
            }
            None => s.push_str("corr_revenue_hash_rate: undefined\n"),
        }
    }
    Ok(s)
}

fn simulate_one(path: &Path) -> Result<(String, String)> {
    let config = load_scenario(path)?;
    let trace = run_simulation(&config)?;
    let name = path.display().to_string();
    Ok((
        render_trace(&trace, &config.spec),
        trace_summary(&name, &trace)?,
    ))
}

pub fn cmd_simulate(args: &SimulateArgs) -> CommandOutcome {
    CommandOutcome::from_result(simulate(args))
}

fn simulate(args: &SimulateArgs) -> Result<CommandOutcome> {
    if args.scenarios.len() > 1 && args.out.is_none() {
        return Err(Error::invalid(
            "--out",
            "a directory is required when running several scenarios",
        ));
    }
    let results: Vec<Result<(String, String)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = args
            .scenarios
            .iter()
            .map(|p| scope.spawn(move || simulate_one(p)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });

    let mut stderr = String::new();
    let mut outputs = Vec::with_capacity(results.len());
    for r in results {
        let (trace, summary) = r?;
        stderr.push_str(&summary);
        outputs.push(trace);
    }

    match (&args.out, args.scenarios.len()) {
        (None, _) => Ok(CommandOutcome::ok(outputs.remove(0)).with_stderr(stderr)),
        (Some(file), 1) => {
            fs::write(file, &outputs[0]).map_err(|e| Error::io(file, e))?;
            Ok(CommandOutcome::ok(String::new()).with_stderr(stderr))
        }
        (Some(dir), _) => {
            fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
            let mut seen = std::collections::BTreeSet::new();
            for (path, trace) in args.scenarios.iter().zip(&outputs) {
                let stem = path
                    .file_stem()
                    .map_or("scenario".into(), |s| s.to_string_lossy().into_owned());
                if !seen.insert(stem.clone()) {
                    return Err(Error::invalid(
                        "scenarios",
                        format!("two scenarios would both write `{stem}.csv`"),
                    ));
                }
                let target = dir.join(format!("{stem}.csv"));
                fs::write(&target, trace).map_err(|e| Error::io(&target, e))?;
            }
            Ok(CommandOutcome::ok(String::new()).with_stderr(stderr))
        }
    }
}

pub fn cmd_rollup(args: &RollupArgs) -> CommandOutcome {
    CommandOutcome::from_result(rollup(args))
}

fn rollup(args: &RollupArgs) -> Result<CommandOutcome> {
    let mut network = NetworkProfile::new("network", args.nodes, args.per_node_j, args.tps)?;
    if let Some(idle) = args.idle_w {
        network = network.with_idle_power(idle)?;
    }
    let params = RollupParams::new(args.gas_simple, args.gas_rollup, args.prover_w, args.tps)?;
    let before = redundant_energy_per_tx(&network);
    let factor = gas_reduction_factor(&params);
    let prover = prover_energy_per_tx(&params);
    let after = rollup_energy_per_tx(before, factor, prover)?;
    let saving = savings_fraction(before, after)?;

    let mut header = vec![
        "before_j_per_tx",
        "compression_factor",
        "prover_j_per_tx",
        "after_j_per_tx",
        "saving",
    ];
    let mut row = vec![before, factor, prover, after, saving];
    if args.idle_w.is_some() {
        let idle = crate::netenergy::idle_adjusted_energy_per_tx(0.0, &network)?;
        header.extend(["before_idle_j_per_tx", "after_idle_j_per_tx", "saving_idle"]);
        row.extend([
            before + idle,
            after + idle,
            savings_fraction(before + idle, after + idle)?,
        ]);
    }
    let mut out = header.join(",");
    out.push('\n');
    csv_line(
        &mut out,
        &row.iter().map(f64::to_string).collect::<Vec<_>>(),
    );
    let mut stderr = String::new();
    if saving < 0.0 {
        stderr
            .push_str("note: the rollup costs more energy per transaction than direct execution\n");
    }
    Ok(CommandOutcome::ok(out).with_stderr(stderr))
}

pub fn cmd_compare(args: &CompareArgs) -> CommandOutcome {
    CommandOutcome::from_result(compare(args))
}

fn compare(args: &CompareArgs) -> Result<CommandOutcome> {
    let networks = load_networks_csv(&args.networks)?;
    let archs: Vec<Architecture> = networks.into_iter().map(Architecture::Redundant).collect();
    let report = compare_architectures(&archs)?;
    let rows = report.rows();
    let mut out = String::new();
    match args.format {
        Format::Csv => {
            out.push_str("name,energy_per_tx_j,order_of_magnitude\n");
            for r in rows {
                let name = if r.name.contains([',', '"']) {
                    format!("\"{}\"", r.name.replace('"', "\"\""))
                } else {
                    r.name.clone()
                };
                let _ = writeln!(out, "{name},{},{}", r.energy_per_tx, r.order_of_magnitude);
            }
        }
        Format::Table => {
            let width = rows.iter().map(|r| r.name.len()).max().unwrap_or(0).max(4);
            let lowest = rows.iter().map(|r| r.order_of_magnitude).min().unwrap_or(0);
            let _ = writeln!(
                out,
                "{:<width$}  {:>12}  {:>4}  log scale",
                "name", "J/tx", "10^"
            );
            for r in rows {
                let bar = "#".repeat((r.order_of_magnitude - lowest + 1) as usize);
                let _ = writeln!(
                    out,
                    "{:<width$}  {:>12.4e}  {:>4}  {bar}",
                    r.name, r.energy_per_tx, r.order_of_magnitude
                );
            }
        }
    }
    Ok(CommandOutcome::ok(out))
}

pub fn cmd_correlate(args: &CorrelateArgs) -> CommandOutcome {
    CommandOutcome::from_result(correlate(args))
}

fn correlate(args: &CorrelateArgs) -> Result<CommandOutcome> {
    let spec = ChainSpec::bitcoin();
    let market = load_market_csv(&args.market)?;
    let daily = resample_daily(&market, ResamplePolicy::ForwardFill)?;
    let window = args.date_range.unwrap_or_default().apply(&daily);
    let column = |s: Series| {
        window
            .samples()
            .iter()
            .map(|sample| s.value(sample, &spec))
            .collect::<Result<Vec<f64>>>()
    };
    let (xs, ys) = (column(args.x)?, column(args.y)?);
    let (xn, yn) = (args.x.name(), args.y.name());

    if args.series {
        let mut out = format!("date,{xn},{yn}\n");
        for ((s, x), y) in window.samples().iter().zip(&xs).zip(&ys) {
            let _ = writeln!(out, "{},{x},{y}", s.date);
        }
        return Ok(CommandOutcome::ok(out));
    }
    let r = pearson_correlation(&xs, &ys).map_err(|e| match e {
        Error::ZeroVariance(which) => {
            Error::ZeroVariance(if which == "a" { xn } else { yn }.to_string())
        }
        other => other,
    })?;
    let from = window
        .first()
        .map(|s| s.date.to_string())
        .unwrap_or_default();
    let to = window
        .last()
        .map(|s| s.date.to_string())
        .unwrap_or_default();
    Ok(CommandOutcome::ok(format!(
        "x,y,from,to,days,pearson\n{xn},{yn},{from},{to},{},{r}\n",
        xs.len()
    )))
}
