//! Fragment-synthesis economy ("ServerFi").
//!
//! Contributed value buys lottery draws at `lambda` per draw. Each draw yields
//! one of `k` fragment types uniformly; a full set of `k` distinct fragments
//! is synthesized into an NFT that is staked immediately. Stakers split a
//! fraction `staking_share` of each iteration's total value. Newcomers join
//! only while the projected reward of one NFT covers the expected cost of a
//! full collection, and players without an NFT leave once their remaining
//! collection cost exceeds that projection.

use serde::{Deserialize, Serialize};

use crate::econ::{
    compensated_sum, init_productivity, mutate_productivity, EconCoreParams, IdAllocator,
    PlayerCore, PlayerId, RngStream, ValueAmount,
};
use crate::error::{Result, SimError};
use crate::record::{IterationRecord, ModelExtras};

pub const MAX_FRAGMENT_TYPES: usize = 64;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ServerFiParams {
    /// Value per lottery draw.
    pub lambda: f64,
    /// Number of fragment types.
    pub k: usize,
    /// Arrivals in the first iteration.
    pub n0: u64,
    /// Arrival decay base.
    pub alpha: f64,
    /// Fraction of each iteration's total value paid out to staked NFTs.
    pub staking_share: f64,
    /// Iterations of per-NFT reward a rational player projects.
    pub payoff_horizon: u32,
}

impl Default for ServerFiParams {
    fn default() -> Self {
        ServerFiParams {
            lambda: 2.0,
            k: 8,
            n0: 200,
            alpha: 1.02,
            staking_share: 0.1,
            payoff_horizon: 50,
        }
    }
}

impl ServerFiParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.lambda.is_finite() && self.lambda > 1.0) {
            return Err(SimError::invalid("lambda", "must exceed 1"));
        }
        if !(1..=MAX_FRAGMENT_TYPES).contains(&self.k) {
            return Err(SimError::invalid(
                "k",
                format!("must be in [1, {MAX_FRAGMENT_TYPES}]"),
            ));
        }
        if !(self.alpha.is_finite() && self.alpha > 1.0) {
            return Err(SimError::invalid("alpha", "must exceed 1"));
        }
        if !(0.0..=1.0).contains(&self.staking_share) {
            return Err(SimError::invalid("staking_share", "must be in [0, 1]"));
        }
        if self.payoff_horizon == 0 {
            return Err(SimError::invalid("payoff_horizon", "must be at least 1"));
        }
        Ok(())
    }
}

/// Harmonic number `H_m`, with `H_0 = 0`.
pub fn harmonic(m: usize) -> f64 {
    (1..=m).map(|i| 1.0 / i as f64).sum()
}

/// Expected value spent to collect all `k` fragment types from scratch:
/// `lambda * k * H_k`.
pub fn expected_collection_cost(k: usize, lambda: f64) -> f64 {
    lambda * k as f64 * harmonic(k)
}

/// Expected value spent to obtain the `missing` types not yet held, out of
/// `k`: `lambda * k * H_missing`.
pub fn expected_remaining_cost(missing: usize, k: usize, lambda: f64) -> f64 {
    debug_assert!(missing <= k);
    lambda * k as f64 * harmonic(missing)
}

/// Convert carried credit plus a new contribution into whole draws.
///
/// Returns `(draws, new_credit)` with `credit + v == draws * lambda + new_credit`
/// and `0 <= new_credit < lambda`.
pub fn draws_for_contribution(credit: f64, v: ValueAmount, lambda: f64) -> (u64, f64) {
    let total = credit + v.get();
    let mut draws = (total / lambda).floor();
    let mut rest = total - draws * lambda;
    // total / lambda can round across an integer boundary
    if rest < 0.0 {
        draws -= 1.0;
        rest = total - draws * lambda;
    } else if rest >= lambda {
        draws += 1.0;
        rest = total - draws * lambda;
    }
    (draws as u64, rest.max(0.0))
}

/// One fragment index, uniform on `0..k`.
#[inline]
pub fn draw_fragment(rng: &mut RngStream, k: usize) -> usize {
    rng.index(k)
}

pub fn draw_fragments(rng: &mut RngStream, num_draws: u64, k: usize) -> Vec<usize> {
    (0..num_draws).map(|_| draw_fragment(rng, k)).collect()
}

#[derive(Clone, Debug, PartialEq)]
pub struct FragmentInventory {
    counts: Vec<u32>,
    /// Value not yet converted into a draw.
    pub draw_credit: f64,
}

impl FragmentInventory {
    pub fn empty(k: usize) -> Self {
        FragmentInventory {
            counts: vec![0; k],
            draw_credit: 0.0,
        }
    }

    pub fn from_counts(counts: Vec<u32>) -> Self {
        FragmentInventory {
            counts,
            draw_credit: 0.0,
        }
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn add(&mut self, fragment: usize) {
        self.counts[fragment] += 1;
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    /// Number of fragment types not held at all.
    pub fn missing(&self) -> usize {
        self.counts.iter().filter(|&&c| c == 0).count()
    }

    /// Mint as many complete sets as possible. Returns the number minted.
    pub fn synthesize(&mut self) -> u32 {
        let minted = self.counts.iter().copied().min().unwrap_or(0);
        if minted > 0 {
            for c in &mut self.counts {
                *c -= minted;
            }
        }
        minted
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ServerFiPlayer {
    pub core: PlayerCore,
    pub inventory: FragmentInventory,
    pub staked_nfts: u64,
}

/// Per-NFT payout for one iteration; zero when nothing is staked.
pub fn per_nft_reward(total_value: ValueAmount, staking_share: f64, staked_count: u64) -> f64 {
    if staked_count == 0 {
        0.0
    } else {
        staking_share * total_value.get() / staked_count as f64
    }
}

/// True (open) when `last_per_nft_reward * payoff_horizon >= expected_cost`.
pub fn entry_gate(expected_cost: f64, last_per_nft_reward: f64, payoff_horizon: u32) -> bool {
    last_per_nft_reward * payoff_horizon as f64 >= expected_cost
}

/// `floor(n0 / alpha^(iteration - 1))` while the gate is open, otherwise 0.
pub fn arrivals(iteration: u32, n0: u64, alpha: f64, gate_open: bool) -> u64 {
    assert!(iteration >= 1, "iterations are 1-based");
    if !gate_open {
        return 0;
    }
    // Repeated multiplication keeps the result identical on every platform.
    let mut scale = 1.0f64;
    for _ in 1..iteration {
        scale *= alpha;
    }
    (n0 as f64 / scale).floor() as u64
}

/// True when the player leaves. Holders never leave; others leave when the
/// expected cost of completing their set exceeds the projected reward.
pub fn churn_serverfi(
    player: &ServerFiPlayer,
    last_per_nft_reward: f64,
    params: &ServerFiParams,
) -> bool {
    if player.staked_nfts > 0 {
        return false;
    }
    let remaining = expected_remaining_cost(player.inventory.missing(), params.k, params.lambda);
    remaining > last_per_nft_reward * params.payoff_horizon as f64
}

/// One player's value-to-draw conversion in the most recent step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConversionAudit {
    pub player: PlayerId,
    pub credit_before: f64,
    pub contribution: f64,
    pub draws: u64,
    pub credit_after: f64,
}

/// Cumulative fragment flows over a repeat.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FragmentFlows {
    pub drawn: u64,
    pub minted_nfts: u64,
    /// Fragments held by players at the moment they left.
    pub destroyed: u64,
}

#[derive(Clone, Debug)]
pub struct ServerFiState {
    players: Vec<ServerFiPlayer>,
    /// The next iteration to execute (1-based).
    iteration: u32,
    /// `None` until an iteration ends with at least one staked NFT.
    last_per_nft_reward: Option<f64>,
    params: ServerFiParams,
    econ: EconCoreParams,
    ids: IdAllocator,
    flows: FragmentFlows,
    audit: Option<Vec<ConversionAudit>>,
}

impl ServerFiState {
    pub fn new(params: ServerFiParams, econ: EconCoreParams) -> Self {
        ServerFiState {
            players: Vec::new(),
            iteration: 1,
            last_per_nft_reward: None,
            params,
            econ,
            ids: IdAllocator::default(),
            flows: FragmentFlows::default(),
            audit: None,
        }
    }

    /// Keep a per-player conversion log for the latest step.
    pub fn with_audit(mut self) -> Self {
        self.audit = Some(Vec::new());
        self
    }

    pub fn players(&self) -> &[ServerFiPlayer] {
        &self.players
    }

    /// Insert a pre-built player; ids are still allocated here.
    pub fn seed_player(&mut self, productivity: ValueAmount) -> PlayerId {
        let id = self.ids.next_id();
        self.players.push(ServerFiPlayer {
            core: PlayerCore::new(id, productivity, self.iteration),
            inventory: FragmentInventory::empty(self.params.k),
            staked_nfts: 0,
        });
        id
    }

    pub fn iteration(&self) -> u32 {
        self.iteration
    }

    pub fn last_per_nft_reward(&self) -> Option<f64> {
        self.last_per_nft_reward
    }

    pub fn params(&self) -> &ServerFiParams {
        &self.params
    }

    pub fn flows(&self) -> FragmentFlows {
        self.flows
    }

    pub fn audit(&self) -> Option<&[ConversionAudit]> {
        self.audit.as_deref()
    }

    pub fn staked_total(&self) -> u64 {
        self.players.iter().map(|p| p.staked_nfts).sum()
    }

    pub fn inventory_total(&self) -> u64 {
        self.players.iter().map(|p| p.inventory.total()).sum()
    }

    pub fn gate_open(&self) -> bool {
        match self.last_per_nft_reward {
            None => true,
            Some(reward) => entry_gate(
                expected_collection_cost(self.params.k, self.params.lambda),
                reward,
                self.params.payoff_horizon,
            ),
        }
    }

    /// Advance one iteration.
    pub fn step(&mut self, rng: &mut RngStream) -> IterationRecord {
        let iteration = self.iteration;
        let k = self.params.k;
        let lambda = self.params.lambda;

        // 1. arrivals
        let joins = arrivals(iteration, self.params.n0, self.params.alpha, self.gate_open());
        for _ in 0..joins {
            let productivity = init_productivity(rng, &self.econ);
            self.seed_player(productivity);
        }

        // 2. contributions
        let total_value = ValueAmount::saturating(compensated_sum(
            self.players.iter().map(|p| p.core.productivity.get()),
        ));
        let active_players = self.players.len() as u64;

        // 3. draws, lottery, synthesis
        if let Some(log) = self.audit.as_mut() {
            log.clear();
        }
        let mut fragments_drawn = 0u64;
        let mut nfts_minted = 0u64;
        for player in &mut self.players {
            let credit_before = player.inventory.draw_credit;
            let v = player.core.productivity;
            let (draws, credit_after) = draws_for_contribution(credit_before, v, lambda);
            player.inventory.draw_credit = credit_after;
            for _ in 0..draws {
                player.inventory.add(draw_fragment(rng, k));
            }
            let minted = player.inventory.synthesize() as u64;
            player.staked_nfts += minted;
            fragments_drawn += draws;
            nfts_minted += minted;
            if let Some(log) = self.audit.as_mut() {
                log.push(ConversionAudit {
                    player: player.core.id,
                    credit_before,
                    contribution: v.get(),
                    draws,
                    credit_after,
                });
            }
        }
        self.flows.drawn += fragments_drawn;
        self.flows.minted_nfts += nfts_minted;

        // 4. staking payout
        let staked_total = self.staked_total();
        let reward = per_nft_reward(total_value, self.params.staking_share, staked_total);
        if staked_total > 0 {
            self.last_per_nft_reward = Some(reward);
        }

        // 5. churn
        let mut departures = 0u64;
        if let Some(last) = self.last_per_nft_reward {
            let params = &self.params;
            let flows = &mut self.flows;
            self.players.retain_mut(|p| {
                if churn_serverfi(p, last, params) {
                    p.core.active = false;
                    flows.destroyed += p.inventory.total();
                    departures += 1;
                    false
                } else {
                    true
                }
            });
        }

        // 6. mutation
        for p in &mut self.players {
            p.core.productivity = mutate_productivity(p.core.productivity, rng, &self.econ);
        }

        self.iteration += 1;
        IterationRecord {
            iteration,
            total_value,
            active_players,
            joins,
            departures,
            extra: ModelExtras::ServerFi {
                nfts_minted,
                staked_total,
                per_nft_reward: reward,
                fragments_drawn,
            },
        }
    }
}

/// Free-function form of [`ServerFiState::step`].
pub fn step_serverfi(state: &mut ServerFiState, rng: &mut RngStream) -> IterationRecord {
    state.step(rng)
}
