//! Closed-form fragment collection cost against brute-force simulation.
//!
//! ```bash
//! cargo run --release -p gamefi-sim --example coupon_oracle -- [trials]
//! ```

use gamefi_sim::analysis::coupon_oracle;
use gamefi_sim::derive_stream;
use gamefi_sim::serverfi::{expected_collection_cost, expected_remaining_cost};

fn main() {
    let trials: u64 = std::env::args()
        .nth(1)
        .and_then(|s| s.parse().ok())
        .unwrap_or(100_000);

    println!("{:>3} {:>12} {:>12} {:>10}", "k", "analytic", "simulated", "rel_err");
    for k in [1usize, 2, 3, 4, 6, 8, 12, 16, 32, 64] {
        let analytic = expected_collection_cost(k, 1.0);
        let mut rng = derive_stream(99, k as u64);
        let simulated = coupon_oracle(k, trials, &mut rng);
        println!(
            "{k:>3} {analytic:>12.4} {simulated:>12.4} {:>10.5}",
            (simulated - analytic).abs() / analytic
        );
    }

    // a player holding 5 of 8 types still expects to pay this much (lambda = 2)
    println!(
        "\nremaining cost, 3 of 8 types missing, lambda 2: {:.3}",
        expected_remaining_cost(3, 8, 2.0)
    );
}
