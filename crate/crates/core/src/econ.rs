//! Agent primitives shared by both economies: contributed value, player
//! identity, productivity with mutation noise, and per-repeat random streams.

use std::fmt;
use std::iter::Sum;
use std::ops::Add;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, LogNormal, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};

/// Bound on the mutation factor: `1 + eps` stays within `[0.1, 1.9]`.
pub const MUTATION_TRUNCATION: f64 = 0.9;

/// A non-negative amount of contributed value.
#[derive(Clone, Copy, Debug, Default, PartialEq, PartialOrd, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct ValueAmount(f64);

impl ValueAmount {
    pub const ZERO: ValueAmount = ValueAmount(0.0);

    /// Rejects negative, NaN and infinite amounts.
    pub fn new(amount: f64) -> Result<Self> {
        if amount.is_finite() && amount >= 0.0 {
            // normalise -0.0
            Ok(ValueAmount(amount + 0.0))
        } else {
            Err(SimError::invalid("value", format!("must be finite and >= 0, got {amount}")))
        }
    }

    /// Clamps negative inputs to zero. NaN maps to zero as well.
    pub fn saturating(amount: f64) -> Self {
        if amount > 0.0 {
            ValueAmount(amount)
        } else {
            ValueAmount::ZERO
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }

    pub fn max(self, other: ValueAmount) -> ValueAmount {
        if other.0 > self.0 {
            other
        } else {
            self
        }
    }
}

impl TryFrom<f64> for ValueAmount {
    type Error = SimError;

    fn try_from(value: f64) -> Result<Self> {
        ValueAmount::new(value)
    }
}

impl From<ValueAmount> for f64 {
    fn from(v: ValueAmount) -> f64 {
        v.0
    }
}

impl Add for ValueAmount {
    type Output = ValueAmount;

    fn add(self, rhs: ValueAmount) -> ValueAmount {
        ValueAmount(self.0 + rhs.0)
    }
}

impl Sum for ValueAmount {
    fn sum<I: Iterator<Item = ValueAmount>>(iter: I) -> ValueAmount {
        iter.fold(ValueAmount::ZERO, Add::add)
    }
}

impl fmt::Display for ValueAmount {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

/// Player identity, assigned in join order within a repeat and never reused.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PlayerId(pub u64);

impl fmt::Display for PlayerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Hands out [`PlayerId`]s in join order.
#[derive(Clone, Debug, Default)]
pub struct IdAllocator {
    next: u64,
}

impl IdAllocator {
    pub fn next_id(&mut self) -> PlayerId {
        let id = PlayerId(self.next);
        self.next += 1;
        id
    }

    pub fn issued(&self) -> u64 {
        self.next
    }
}

/// State common to every player regardless of economy.
#[derive(Clone, Debug, PartialEq)]
pub struct PlayerCore {
    pub id: PlayerId,
    /// Value contributed per iteration.
    pub productivity: ValueAmount,
    pub joined_at: u32,
    pub active: bool,
}

impl PlayerCore {
    pub fn new(id: PlayerId, productivity: ValueAmount, joined_at: u32) -> Self {
        PlayerCore {
            id,
            productivity,
            joined_at,
            active: true,
        }
    }
}

/// Deterministic random stream owned by a single repeat.
///
/// Backed by ChaCha8 seeded with the master seed; the repeat index selects the
/// ChaCha stream, so each repeat reads a disjoint keystream. ChaCha output is
/// specified bit-for-bit, independent of platform and endianness.
#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn master_seed_stream(master_seed: u64, repeat_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(repeat_index);
        RngStream { inner }
    }

    /// A uniform draw in `[0, 1)` with 53 bits of precision.
    pub fn uniform(&mut self) -> f64 {
        (self.inner.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// A uniform index in `0..n` from exactly one 64-bit variate.
    pub fn index(&mut self, n: usize) -> usize {
        debug_assert!(n > 0);
        ((self.inner.next_u64() as u128 * n as u128) >> 64) as usize
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}

/// Build the random stream for one repeat of an experiment.
pub fn derive_stream(master_seed: u64, repeat_index: u64) -> RngStream {
    RngStream::master_seed_stream(master_seed, repeat_index)
}

/// Productivity distribution and noise magnitudes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct EconCoreParams {
    /// Median of the log-normal initial productivity.
    pub productivity_init_mean: f64,
    /// Standard deviation of the underlying normal.
    pub productivity_init_sigma: f64,
    pub mutation_sigma: f64,
    pub productivity_floor: f64,
}

impl Default for EconCoreParams {
    fn default() -> Self {
        EconCoreParams {
            productivity_init_mean: 1.0,
            productivity_init_sigma: 0.5,
            mutation_sigma: 0.1,
            productivity_floor: 0.01,
        }
    }
}

impl EconCoreParams {
    pub fn validate(&self) -> Result<()> {
        let p = self;
        if !(p.productivity_init_mean.is_finite() && p.productivity_init_mean > 0.0) {
            return Err(SimError::invalid("productivity_init_mean", "must be positive"));
        }
        if !(p.productivity_init_sigma.is_finite() && p.productivity_init_sigma >= 0.0) {
            return Err(SimError::invalid("productivity_init_sigma", "must be >= 0"));
        }
        if !(p.mutation_sigma.is_finite() && p.mutation_sigma >= 0.0) {
            return Err(SimError::invalid("mutation_sigma", "must be >= 0"));
        }
        if !(p.productivity_floor.is_finite() && p.productivity_floor > 0.0) {
            return Err(SimError::invalid("productivity_floor", "must be positive"));
        }
        Ok(())
    }

    fn floor(&self) -> ValueAmount {
        ValueAmount(self.productivity_floor)
    }
}

/// Draw an initial productivity: log-normal with median
/// `productivity_init_mean`, clamped below at the floor.
pub fn init_productivity(rng: &mut RngStream, params: &EconCoreParams) -> ValueAmount {
    let mu = params.productivity_init_mean.ln();
    let sample = if params.productivity_init_sigma == 0.0 {
        params.productivity_init_mean
    } else {
        LogNormal::new(mu, params.productivity_init_sigma)
            .expect("sigma validated")
            .sample(rng)
    };
    ValueAmount::saturating(sample).max(params.floor())
}

/// Draw the multiplicative noise term: Normal(0, sigma) conditioned on
/// `|eps| <= MUTATION_TRUNCATION`.
pub fn mutation_noise(rng: &mut RngStream, sigma: f64) -> f64 {
    if sigma == 0.0 {
        return 0.0;
    }
    loop {
        let z: f64 = StandardNormal.sample(rng);
        let eps = sigma * z;
        if eps.abs() <= MUTATION_TRUNCATION {
            return eps;
        }
    }
}

/// Apply a known noise term; `v * (1 + eps)` clamped below at the floor.
pub fn apply_mutation(v: ValueAmount, eps: f64, params: &EconCoreParams) -> ValueAmount {
    let eps = eps.clamp(-MUTATION_TRUNCATION, MUTATION_TRUNCATION);
    ValueAmount::saturating(v.get() * (1.0 + eps)).max(params.floor())
}

pub fn mutate_productivity(
    v: ValueAmount,
    rng: &mut RngStream,
    params: &EconCoreParams,
) -> ValueAmount {
    if params.mutation_sigma == 0.0 {
        return v;
    }
    let eps = mutation_noise(rng, params.mutation_sigma);
    apply_mutation(v, eps, params)
}

/// Neumaier-compensated sum. Used wherever totals must not drift with
/// population size.
pub fn compensated_sum<I: IntoIterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for x in values {
        let t = sum + x;
        if sum.abs() >= x.abs() {
            comp += (sum - t) + x;
        } else {
            comp += (x - t) + sum;
        }
        sum = t;
    }
    sum + comp
}
