//! Energy accounting for proof-of-work blockchains and the transaction
//! processing architectures that could replace them.
//!
//! * [`units`]: shared domain types, unit conversions, the hardware catalog.
//! * [`estimators`]: hash rate, lower and upper power bounds, mining margins,
//!   halving projections, correlation.
//! * [`netenergy`]: per-transaction energy of redundant networks, zk-rollups
//!   and proof-of-work.
//! * [`minesim`]: deterministic simulator of miners entering and leaving the
//!   market.
//! * [`ingest`]: CSV and scenario loaders.
//! * [`cli`]: the `blockwatt` command-line front end.

pub mod cli;
pub mod error;
pub mod estimators;
pub mod ingest;
pub mod minesim;
pub mod netenergy;
pub mod units;

pub use error::{Error, Result};
