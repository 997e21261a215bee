use serde::{Deserialize, Serialize};

use crate::econ::ValueAmount;

/// Observables for one iteration of one repeat.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    /// 1-based iteration index.
    pub iteration: u32,
    /// Sum of contributions realized this iteration.
    pub total_value: ValueAmount,
    /// Players that contributed this iteration.
    pub active_players: u64,
    pub joins: u64,
    pub departures: u64,
    pub extra: ModelExtras,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelExtras {
    ServerFi {
        nfts_minted: u64,
        staked_total: u64,
        per_nft_reward: f64,
        fragments_drawn: u64,
    },
    Retention {
        payout_total: f64,
        winner_count: u64,
    },
}
