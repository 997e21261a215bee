//! Follow the top-player reward economy for a few dozen iterations: who wins
//! the pool, how miss counters build up, and when players give up.
//!
//! ```bash
//! cargo run -p gamefi-sim --example retention_walkthrough
//! ```

use gamefi_sim::retention::{select_top, window_totals, RetentionParams, RetentionState};
use gamefi_sim::{derive_stream, EconCoreParams, ModelExtras};

fn main() {
    let params = RetentionParams::default();
    let mut world = RetentionState::new(params, EconCoreParams::default());
    let mut rng = derive_stream(42, 0);

    println!("iter  joins  left  players  total_value  winners  payout");
    for _ in 0..60 {
        let rec = world.step(&mut rng);
        let ModelExtras::Retention {
            payout_total,
            winner_count,
        } = rec.extra
        else {
            unreachable!()
        };
        if rec.iteration <= 12 || rec.iteration.is_multiple_of(6) {
            println!(
                "{:>4} {:>6} {:>5} {:>8} {:>12.1} {:>8} {:>8.1}",
                rec.iteration,
                rec.joins,
                rec.departures,
                rec.active_players,
                rec.total_value.get(),
                winner_count,
                payout_total
            );
        }
    }

    // the ranking the next payout will start from
    let totals = window_totals(world.ledger());
    let leaders = select_top(&totals, 0.2);
    let mut earners: Vec<_> = world.players().iter().collect();
    earners.sort_by(|a, b| b.earned.total_cmp(&a.earned));
    println!("\ntop earners after {} iterations:", world.iteration() - 1);
    for p in earners.iter().take(5) {
        println!(
            "  {} joined {:>3}  productivity {:>6.3}  earned {:>9.1}  misses {}/{}  leading: {}",
            p.core.id,
            p.core.joined_at,
            p.core.productivity,
            p.earned,
            p.consecutive_misses,
            p.tolerance,
            leaders.contains(&p.core.id)
        );
    }
    let stalled = world
        .players()
        .iter()
        .filter(|p| p.consecutive_misses + 1 > p.tolerance)
        .count();
    println!("{stalled} players leave if they miss the next payout");
}
