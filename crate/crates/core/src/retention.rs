//! Top-player reward economy.
//!
//! Every iteration the players with the highest contributions over a trailing
//! window share a pool equal to `pool_share` of all window contributions.
//! Players who go unrewarded for more than their tolerance leave.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::econ::{
    compensated_sum, init_productivity, mutate_productivity, EconCoreParams, IdAllocator,
    PlayerCore, PlayerId, RngStream, ValueAmount,
};
use crate::error::{Result, SimError};
use crate::record::{IterationRecord, ModelExtras};
use crate::serverfi::arrivals;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PayoutSplit {
    /// Pool divided in proportion to each winner's window total.
    #[default]
    Proportional,
    Equal,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RetentionParams {
    pub top_fraction: f64,
    pub pool_share: f64,
    pub window: usize,
    pub tolerance_min: u32,
    pub tolerance_max: u32,
    pub n0: u64,
    pub alpha: f64,
    pub split: PayoutSplit,
}

impl Default for RetentionParams {
    fn default() -> Self {
        RetentionParams {
            top_fraction: 0.2,
            pool_share: 0.8,
            window: 5,
            tolerance_min: 3,
            tolerance_max: 10,
            n0: 200,
            alpha: 1.02,
            split: PayoutSplit::Proportional,
        }
    }
}

impl RetentionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.top_fraction > 0.0 && self.top_fraction <= 1.0) {
            return Err(SimError::invalid("top_fraction", "must be in (0, 1]"));
        }
        if !(0.0..=1.0).contains(&self.pool_share) {
            return Err(SimError::invalid("pool_share", "must be in [0, 1]"));
        }
        if self.window == 0 {
            return Err(SimError::invalid("window", "must be at least 1"));
        }
        if self.tolerance_min == 0 {
            return Err(SimError::invalid("tolerance_min", "must be at least 1"));
        }
        if self.tolerance_max < self.tolerance_min {
            return Err(SimError::invalid(
                "tolerance_max",
                "must be >= tolerance_min",
            ));
        }
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(SimError::invalid("alpha", "must exceed 1"));
        }
        Ok(())
    }
}

/// Trailing per-player contributions, at most `window` entries each.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ContributionLedger {
    window: usize,
    entries: BTreeMap<PlayerId, VecDeque<f64>>,
}

impl ContributionLedger {
    pub fn new(window: usize) -> Self {
        assert!(window >= 1);
        ContributionLedger {
            window,
            entries: BTreeMap::new(),
        }
    }

    pub fn record(&mut self, id: PlayerId, v: ValueAmount) {
        let buf = self
            .entries
            .entry(id)
            .or_insert_with(|| VecDeque::with_capacity(self.window));
        if buf.len() == self.window {
            buf.pop_front();
        }
        buf.push_back(v.get());
    }

    pub fn remove(&mut self, id: PlayerId) {
        self.entries.remove(&id);
    }

    pub fn entries(&self, id: PlayerId) -> Option<&VecDeque<f64>> {
        self.entries.get(&id)
    }

    pub fn ids(&self) -> impl Iterator<Item = PlayerId> + '_ {
        self.entries.keys().copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

pub fn window_totals(ledger: &ContributionLedger) -> BTreeMap<PlayerId, ValueAmount> {
    ledger
        .entries
        .iter()
        .map(|(&id, buf)| (id, ValueAmount::saturating(buf.iter().sum())))
        .collect()
}

/// Number of winners among `n` players: `max(1, floor(p * n))`, or 0 when
/// there are no players.
pub fn winner_count(n: usize, top_fraction: f64) -> usize {
    if n == 0 {
        return 0;
    }
    let raw = (top_fraction * n as f64 + 1e-9).floor() as usize;
    raw.clamp(1, n)
}

/// Highest window totals win; boundary ties go to the lower id.
pub fn select_top(totals: &BTreeMap<PlayerId, ValueAmount>, top_fraction: f64) -> BTreeSet<PlayerId> {
    let count = winner_count(totals.len(), top_fraction);
    let mut ranked: Vec<(PlayerId, f64)> = totals.iter().map(|(&id, v)| (id, v.get())).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    ranked.into_iter().take(count).map(|(id, _)| id).collect()
}

/// Split `pool_share` of all window totals among the winners.
pub fn payout(
    totals: &BTreeMap<PlayerId, ValueAmount>,
    winners: &BTreeSet<PlayerId>,
    pool_share: f64,
    split: PayoutSplit,
) -> BTreeMap<PlayerId, f64> {
    if winners.is_empty() {
        return BTreeMap::new();
    }
    let pool = pool_share * compensated_sum(totals.values().map(|v| v.get()));
    let winner_weight = compensated_sum(winners.iter().map(|id| totals[id].get()));
    let equal = split == PayoutSplit::Equal || winner_weight <= 0.0;
    winners
        .iter()
        .map(|&id| {
            let amount = if equal {
                pool / winners.len() as f64
            } else {
                pool * (totals[&id].get() / winner_weight)
            };
            (id, amount)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RetentionPlayer {
    pub core: PlayerCore,
    pub tolerance: u32,
    pub consecutive_misses: u32,
    /// Lifetime payouts received.
    pub earned: f64,
}

/// Bump miss counters and mark players whose misses exceed their tolerance
/// as inactive. Returns the ids that left, in id order.
pub fn update_churn(players: &mut [RetentionPlayer], winners: &BTreeSet<PlayerId>) -> Vec<PlayerId> {
    let mut departed = Vec::new();
    for p in players.iter_mut().filter(|p| p.core.active) {
        if winners.contains(&p.core.id) {
            p.consecutive_misses = 0;
        } else {
            p.consecutive_misses += 1;
            if p.consecutive_misses > p.tolerance {
                p.core.active = false;
                departed.push(p.core.id);
            }
        }
    }
    departed
}

/// What happened to the payout pool in the latest step.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct PayoutAudit {
    pub window_sum: f64,
    pub pool: f64,
    pub paid: f64,
}

#[derive(Clone, Debug)]
pub struct RetentionState {
    players: Vec<RetentionPlayer>,
    ledger: ContributionLedger,
    iteration: u32,
    params: RetentionParams,
    econ: EconCoreParams,
    ids: IdAllocator,
    last_payout: PayoutAudit,
}

impl RetentionState {
    pub fn new(params: RetentionParams, econ: EconCoreParams) -> Self {
        RetentionState {
            players: Vec::new(),
            ledger: ContributionLedger::new(params.window),
            iteration: 1,
            params,
            econ,
            ids: IdAllocator::default(),
            last_payout: PayoutAudit::default(),
        }
    }

    pub fn players(&self) -> &[RetentionPlayer] {
        &self.players
    }

    pub fn ledger(&self) -> &ContributionLedger {
        &self.ledger
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn params(&self) -> &RetentionParams {
        &self.params
    }

    pub fn last_payout(&self) -> &PayoutAudit {
        &self.last_payout
    }

    /// Add a player with a chosen productivity and tolerance.
    pub fn seed_player(&mut self, productivity: ValueAmount, tolerance: u32) -> PlayerId {
        let id = self.ids.next_id();
        self.players.push(RetentionPlayer {
            core: PlayerCore::new(id, productivity, self.iteration),
            tolerance,
            consecutive_misses: 0,
            earned: 0.0,
        });
        id
    }

    pub fn step(&mut self, rng: &mut RngStream) -> IterationRecord {
        let iteration = self.iteration;

        // 1. arrivals
        let joins = arrivals(iteration, self.params.n0, self.params.alpha, true);
        for _ in 0..joins {
            let productivity = init_productivity(rng, &self.econ);
            let tolerance = rng.random_range(self.params.tolerance_min..=self.params.tolerance_max);
            self.seed_player(productivity, tolerance);
        }

        // 2. contributions
        let active_players = self.players.len() as u64;
        for p in &self.players {
            self.ledger.record(p.core.id, p.core.productivity);
        }
        let total_value = ValueAmount::saturating(compensated_sum(
            self.players.iter().map(|p| p.core.productivity.get()),
        ));

        // 3. ranking and payout
        let totals = window_totals(&self.ledger);
        let winners = select_top(&totals, self.params.top_fraction);
        let payouts = payout(&totals, &winners, self.params.pool_share, self.params.split);
        for p in &mut self.players {
            if let Some(amount) = payouts.get(&p.core.id) {
                p.earned += amount;
            }
        }
        let window_sum = compensated_sum(totals.values().map(|v| v.get()));
        let payout_total = compensated_sum(payouts.values().copied());
        self.last_payout = PayoutAudit {
            window_sum,
            pool: self.params.pool_share * window_sum,
            paid: payout_total,
        };

        // 4. churn
        let departed = update_churn(&mut self.players, &winners);
        for id in &departed {
            self.ledger.remove(*id);
        }
        self.players.retain(|p| p.core.active);

        // 5. mutation
        for p in &mut self.players {
            p.core.productivity = mutate_productivity(p.core.productivity, rng, &self.econ);
        }

        self.iteration += 1;
        IterationRecord {
            iteration,
            total_value,
            active_players,
            joins,
            departures: departed.len() as u64,
            extra: ModelExtras::Retention {
                payout_total,
                winner_count: winners.len() as u64,
            },
        }
    }
}

/// Free-function form of [`RetentionState::step`].
pub fn step_retention(state: &mut RetentionState, rng: &mut RngStream) -> IterationRecord {
    state.step(rng)
}
