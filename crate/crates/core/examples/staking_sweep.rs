//! How generous does staking have to be for the fragment economy to keep
//! growing? Sweeps the staking share and the payoff horizon players project
//! over, and reports the trend of the mean total value for each pair.
//!
//! With the default share (0.1) and horizon (50) the projected reward of one
//! NFT drops below the full-collection cost shortly after the first mints,
//! the entry gate closes, players without an NFT leave, and the economy
//! freezes at its holder base. Growth persists only once share * horizon is
//! in the low hundreds.
//!
//! ```bash
//! cargo run --release -p gamefi-sim --example staking_sweep
//! ```

use gamefi_sim::analysis::trend_report;
use gamefi_sim::serverfi::expected_collection_cost;
use gamefi_sim::{run_experiment, ExperimentSpec, ModelKind};

fn main() -> gamefi_sim::Result<()> {
    let base = ExperimentSpec::new(ModelKind::ServerFi).with_size(500, 10).with_seed(7);
    println!(
        "full-collection cost at k={}, lambda={}: {:.2}",
        base.serverfi.k,
        base.serverfi.lambda,
        expected_collection_cost(base.serverfi.k, base.serverfi.lambda)
    );
    println!(
        "{:>6} {:>7} {:>11} {:>9} {:>6} {:>10}",
        "share", "horizon", "late_slope", "T500/T50", "peak", "players"
    );
    for share in [0.1, 0.25, 0.5, 1.0] {
        for horizon in [50u32, 200, 1000, 5000] {
            let mut spec = base.clone();
            spec.serverfi.staking_share = share;
            spec.serverfi.payoff_horizon = horizon;
            let series = run_experiment(&spec)?.series;
            let trend = trend_report(&series)?;
            println!(
                "{share:>6} {horizon:>7} {:>11.3} {:>9.3} {:>6} {:>10.0}",
                trend.late_slope,
                series.mean_total_value[499] / series.mean_total_value[49],
                trend.peak_iteration,
                series.mean_active_players[499],
            );
        }
    }
    Ok(())
}
