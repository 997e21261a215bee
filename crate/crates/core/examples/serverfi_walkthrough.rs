//! Step a single fragment-economy world by hand and watch the lottery,
//! synthesis, staking and the entry gate.
//!
//! ```bash
//! cargo run -p gamefi-sim --example serverfi_walkthrough
//! ```

use gamefi_sim::serverfi::{expected_collection_cost, ServerFiParams, ServerFiState};
use gamefi_sim::{derive_stream, EconCoreParams, ModelExtras};

fn main() {
    let params = ServerFiParams::default();
    let cost = expected_collection_cost(params.k, params.lambda);
    let mut world = ServerFiState::new(params.clone(), EconCoreParams::default());
    let mut rng = derive_stream(42, 0);

    println!("collection cost {cost:.2}, horizon {}", params.payoff_horizon);
    println!("iter  joins  left  players  total_value  minted  staked  reward/NFT  gate");
    for _ in 0..45 {
        let rec = world.step(&mut rng);
        let ModelExtras::ServerFi {
            nfts_minted,
            staked_total,
            per_nft_reward,
            ..
        } = rec.extra
        else {
            unreachable!()
        };
        println!(
            "{:>4} {:>6} {:>5} {:>8} {:>12.1} {:>7} {:>7} {:>11.4}  {}",
            rec.iteration,
            rec.joins,
            rec.departures,
            rec.active_players,
            rec.total_value.get(),
            nfts_minted,
            staked_total,
            per_nft_reward,
            if world.gate_open() { "open" } else { "closed" },
        );
    }

    let flows = world.flows();
    println!(
        "\nfragments drawn {}, consumed {}, destroyed on exit {}, still held {}",
        flows.drawn,
        flows.minted_nfts * params.k as u64,
        flows.destroyed,
        world.inventory_total()
    );
    let best = world
        .players()
        .iter()
        .max_by_key(|p| p.staked_nfts)
        .expect("holders remain");
    println!(
        "largest holder {} with {} NFTs, productivity {:.3}",
        best.core.id, best.staked_nfts, best.core.productivity
    );
}
