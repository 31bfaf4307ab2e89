//! Agent-based model of fossil-fuel divestment.
//!
//! A representative fossil-fuel firm is traded on a stock market by
//! investors whose beliefs about the arrival of strong carbon policy spread
//! over an adaptive social network. Divestment by convinced investors can
//! burst a carbon bubble and shut the firm down before the carbon budget is
//! exhausted; whether it does depends on how fast beliefs spread relative to
//! trading, how many investors are socially responsible, and how much
//! liquidity the market has.
//!
//! The crate is organised bottom-up:
//!
//! - [`firm`]: reserve and budget bookkeeping, share valuation.
//! - [`market`]: dividends, investment decisions, market-maker pricing.
//! - [`social`]: small-world network, success-based imitation, rewiring.
//! - [`policy`]: stochastic arrival of binding carbon policy.
//! - [`engine`]: the monthly scheduler and trajectory recording.
//! - [`analysis`]: crash detection, behaviour types, ensemble statistics.
//! - [`ensemble`]: parallel Monte Carlo ensembles and parameter sweeps.
//! - [`io`]: CSV/JSON output with a digest manifest.
//! - [`cli`]: the `divest` command-line front end.
//!
//! ```
//! use divest::{engine, SimConfig};
//!
//! let config = SimConfig { horizon: 24, ..SimConfig::default() };
//! let record = engine::run(&config).unwrap();
//! assert_eq!(record.months.len(), 24);
//! ```

pub mod analysis;
pub mod cli;
pub mod config;
pub mod engine;
pub mod ensemble;
pub mod error;
pub mod firm;
pub mod io;
pub mod market;
pub mod policy;
pub mod social;

pub use analysis::{classify, summarize, BehaviorType, EnsembleSummary};
pub use config::SimConfig;
pub use engine::{run, RunRecord, World};
pub use ensemble::{run_ensemble, sweep, Axis, SweepResult};
pub use error::{Error, Result};
