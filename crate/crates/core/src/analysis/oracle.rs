//! Brute-force coupon-collector estimate, used to check the closed-form
//! collection cost.

use rand::Rng;

use crate::econ::RngStream;

/// Mean number of uniform draws over `k` types needed to hold every type,
/// over `trials` independent collections.
pub fn coupon_oracle(k: usize, trials: u64, rng: &mut RngStream) -> f64 {
    assert!(k >= 1 && trials >= 1);
    let mut seen = vec![false; k];
    let mut total_draws: u64 = 0;
    for _ in 0..trials {
        seen.iter_mut().for_each(|s| *s = false);
        let mut distinct = 0;
        while distinct < k {
            total_draws += 1;
            let slot = &mut seen[rng.random_range(0..k)];
            if !*slot {
                *slot = true;
                distinct += 1;
            }
        }
    }
    total_draws as f64 / trials as f64
}
