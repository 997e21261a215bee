//! Agent-based simulation of two play-to-earn tokenomics designs.
//!
//! * [`serverfi`]: players turn contributed value into lottery draws, collect
//!   `k` fragment types, synthesize and stake NFTs, and share a cut of server
//!   value. Entry and exit follow a rational cost/reward comparison.
//! * [`retention`]: the top share of players by trailing contribution split a
//!   payout pool each iteration; players who go unrewarded too long leave.
//!
//! [`harness`] runs seeded repeats (in parallel, bit-reproducibly) and
//! aggregates the per-iteration total value into a mean line and min/max band.
//! [`analysis`] handles JSON configs, the series CSV, trend metrics and the
//! coupon-collector oracle. See the crate's `examples/` directory for one
//! runnable program per capability.

pub mod analysis;
pub mod cli;
pub mod econ;
pub mod error;
pub mod harness;
pub mod record;
pub mod retention;
pub mod serverfi;

pub use econ::{derive_stream, EconCoreParams, PlayerId, RngStream, ValueAmount};
pub use error::{Result, SimError};
pub use harness::{
    aggregate, run_experiment, run_experiment_with, run_once, AggregateSeries, ExperimentOutput,
    ExperimentSpec, ModelKind, RepeatRun, RunOptions,
};
pub use record::{IterationRecord, ModelExtras};
pub use retention::{RetentionParams, RetentionState};
pub use serverfi::{ServerFiParams, ServerFiState};
