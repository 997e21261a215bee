//! Repeats, iteration loops and cross-repeat aggregation.
//!
//! Every repeat owns its state and random stream, so repeats run in any order
//! or in parallel. Aggregation sorts each iteration's per-repeat values before
//! a compensated sum, which makes the result independent of the order in which
//! repeats are supplied or finished.

use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::econ::{compensated_sum, derive_stream, EconCoreParams};
use crate::error::{Result, SimError};
use crate::record::IterationRecord;
use crate::retention::{RetentionParams, RetentionState};
use crate::serverfi::{ServerFiParams, ServerFiState};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    #[serde(rename = "serverfi")]
    ServerFi,
    Retention,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSpec {
    pub model: ModelKind,
    pub econ: EconCoreParams,
    pub serverfi: ServerFiParams,
    pub retention: RetentionParams,
    pub iterations: u32,
    pub repeats: u32,
    pub master_seed: u64,
}

impl ExperimentSpec {
    pub const DEFAULT_ITERATIONS: u32 = 500;
    pub const DEFAULT_REPEATS: u32 = 100;
    pub const DEFAULT_SEED: u64 = 1;

    /// Defaults everywhere except the model choice.
    pub fn new(model: ModelKind) -> Self {
        ExperimentSpec {
            model,
            econ: EconCoreParams::default(),
            serverfi: ServerFiParams::default(),
            retention: RetentionParams::default(),
            iterations: Self::DEFAULT_ITERATIONS,
            repeats: Self::DEFAULT_REPEATS,
            master_seed: Self::DEFAULT_SEED,
        }
    }

    pub fn with_size(mut self, iterations: u32, repeats: u32) -> Self {
        self.iterations = iterations;
        self.repeats = repeats;
        self
    }

    pub fn with_seed(mut self, master_seed: u64) -> Self {
        self.master_seed = master_seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 {
            return Err(SimError::invalid("iterations", "must be at least 1"));
        }
        if self.repeats == 0 {
            return Err(SimError::invalid("repeats", "must be at least 1"));
        }
        self.econ.validate().map_err(|e| e.in_section("econ"))?;
        self.serverfi.validate().map_err(|e| e.in_section("serverfi"))?;
        self.retention.validate().map_err(|e| e.in_section("retention"))?;
        Ok(())
    }
}

/// Records of one repeat, tagged with its index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RepeatRun {
    pub repeat_index: u32,
    pub records: Vec<IterationRecord>,
}

/// Per-iteration statistics across repeats. All vectors have one entry per
/// iteration, index 0 being iteration 1.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AggregateSeries {
    pub mean_total_value: Vec<f64>,
    pub min_total_value: Vec<f64>,
    pub max_total_value: Vec<f64>,
    pub mean_active_players: Vec<f64>,
}

impl AggregateSeries {
    pub fn len(&self) -> usize {
        self.mean_total_value.len()
    }

    pub fn is_empty(&self) -> bool {
        self.mean_total_value.is_empty()
    }
}

/// Run one repeat from an empty world.
pub fn run_once(spec: &ExperimentSpec, repeat_index: u32) -> Result<Vec<IterationRecord>> {
    spec.validate()?;
    if repeat_index >= spec.repeats {
        return Err(SimError::invalid(
            "repeat_index",
            format!("must be below repeats ({})", spec.repeats),
        ));
    }
    Ok(simulate_repeat(spec, repeat_index))
}

fn simulate_repeat(spec: &ExperimentSpec, repeat_index: u32) -> Vec<IterationRecord> {
    let mut rng = derive_stream(spec.master_seed, repeat_index as u64);
    let n = spec.iterations as usize;
    match spec.model {
        ModelKind::ServerFi => {
            let mut state = ServerFiState::new(spec.serverfi.clone(), spec.econ.clone());
            (0..n).map(|_| state.step(&mut rng)).collect()
        }
        ModelKind::Retention => {
            let mut state = RetentionState::new(spec.retention.clone(), spec.econ.clone());
            (0..n).map(|_| state.step(&mut rng)).collect()
        }
    }
}

fn sorted_mean(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    compensated_sum(values.iter().copied()) / values.len() as f64
}

/// Pointwise mean/min/max of total value and mean active players.
pub fn aggregate(results: &[RepeatRun]) -> Result<AggregateSeries> {
    let first = results.first().ok_or(SimError::NoRepeats)?;
    let len = first.records.len();
    for run in results {
        if run.records.len() != len {
            return Err(SimError::LengthMismatch {
                repeat_index: run.repeat_index as usize,
                found: run.records.len(),
                expected: len,
            });
        }
    }
    let mut series = AggregateSeries {
        mean_total_value: Vec::with_capacity(len),
        min_total_value: Vec::with_capacity(len),
        max_total_value: Vec::with_capacity(len),
        mean_active_players: Vec::with_capacity(len),
    };
    let mut totals = vec![0.0; results.len()];
    let mut actives = vec![0.0; results.len()];
    for i in 0..len {
        for (slot, run) in results.iter().enumerate() {
            totals[slot] = run.records[i].total_value.get();
            actives[slot] = run.records[i].active_players as f64;
        }
        let mean = sorted_mean(&mut totals);
        let lo = totals[0];
        let hi = totals[totals.len() - 1];
        // the compensated mean of sorted values cannot leave [lo, hi] by more
        // than rounding; pin it so the band invariant is exact
        series.mean_total_value.push(mean.clamp(lo, hi));
        series.min_total_value.push(lo);
        series.max_total_value.push(hi);
        series.mean_active_players.push(sorted_mean(&mut actives));
    }
    Ok(series)
}

/// Lower and upper empirical quantiles of total value at each iteration, using
/// the nearest-rank rule. An alternative to the min/max band.
pub fn quantile_band(results: &[RepeatRun], lower: f64, upper: f64) -> Result<Vec<(f64, f64)>> {
    if !(0.0..=1.0).contains(&lower) || !(lower..=1.0).contains(&upper) {
        return Err(SimError::invalid(
            "quantile",
            "bounds must satisfy 0 <= lower <= upper <= 1",
        ));
    }
    let series = aggregate(results)?;
    let n = results.len();
    let rank = |q: f64| ((q * n as f64).ceil() as usize).clamp(1, n) - 1;
    let mut column = vec![0.0; n];
    Ok((0..series.len())
        .map(|i| {
            for (slot, run) in results.iter().enumerate() {
                column[slot] = run.records[i].total_value.get();
            }
            column.sort_by(f64::total_cmp);
            (column[rank(lower)], column[rank(upper)])
        })
        .collect())
}

/// How repeats are scheduled. Output never depends on this.
#[derive(Clone, Debug, Default)]
pub struct RunOptions {
    /// `Some(1)` runs serially; `None` uses the global rayon pool.
    pub workers: Option<usize>,
    /// Raw per-repeat records kept in memory (lowest repeat indices first).
    pub raw_cap: Option<usize>,
    /// Write one CSV of raw records per repeat into this directory.
    pub spill_dir: Option<PathBuf>,
}

#[derive(Clone, Debug)]
pub struct ExperimentOutput {
    pub series: AggregateSeries,
    pub raw: Vec<RepeatRun>,
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<ExperimentOutput> {
    run_experiment_with(spec, &RunOptions::default())
}

pub fn run_experiment_with(spec: &ExperimentSpec, options: &RunOptions) -> Result<ExperimentOutput> {
    spec.validate()?;
    let indices: Vec<u32> = (0..spec.repeats).collect();
    let run = |r: u32| RepeatRun {
        repeat_index: r,
        records: simulate_repeat(spec, r),
    };
    let mut runs: Vec<RepeatRun> = match options.workers {
        Some(1) => indices.into_iter().map(run).collect(),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w)
                .build()
                .map_err(|e| SimError::invalid("workers", e.to_string()))?;
            pool.install(|| indices.into_par_iter().map(run).collect())
        }
        None => indices.into_par_iter().map(run).collect(),
    };
    runs.sort_by_key(|r| r.repeat_index);

    let series = aggregate(&runs)?;
    if let Some(dir) = &options.spill_dir {
        fs::create_dir_all(dir)?;
        for r in &runs {
            let path = dir.join(format!("repeat_{:04}.csv", r.repeat_index));
            crate::analysis::csv::write_records_csv_file(&r.records, &path)?;
        }
    }
    let cap = options.raw_cap.unwrap_or(spec.repeats as usize);
    runs.truncate(cap);
    Ok(ExperimentOutput { series, raw: runs })
}
