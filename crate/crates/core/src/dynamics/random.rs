use std::collections::BTreeMap;

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::OddLagShape;
use crate::ics::InitialConditions;
use crate::ratio::Ratio;

/// Seeded source of positive rational initial values `p/q` with
/// `p in 1..=20`, `q in 1..=10`.
pub struct IcSampler {
    rng: ChaCha8Rng,
}

impl IcSampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn value(&mut self) -> Ratio {
        random_ratio(&mut self.rng, 1..=20, 1..=10)
    }

    pub fn sample(&mut self, k: usize) -> InitialConditions {
        InitialConditions::Rational((0..k).map(|_| self.value()).collect())
    }

    pub fn samples(&mut self, k: usize, count: usize) -> Vec<InitialConditions> {
        (0..count).map(|_| self.sample(k)).collect()
    }
}

pub fn random_ratio<R: Rng>(
    rng: &mut R,
    numer: std::ops::RangeInclusive<i64>,
    denom: std::ops::RangeInclusive<i64>,
) -> Ratio {
    Ratio::new(
        BigInt::from(rng.random_range(numer)),
        BigInt::from(rng.random_range(denom)),
    )
}

/// A random odd-lag shape: odd lag in `{1, 3, 5, 7}`, one to three even lags up
/// to 8 with coefficients `p/q`, `p in 1..=6`, `q in 1..=4`.
pub fn random_shape<R: Rng>(rng: &mut R) -> OddLagShape {
    let odd_lag = 2 * rng.random_range(0..4usize) + 1;
    let count = rng.random_range(1..=3usize);
    let mut even = BTreeMap::new();
    while even.len() < count {
        even.insert(
            2 * rng.random_range(1..=4usize),
            random_ratio(rng, 1..=6, 1..=4),
        );
    }
    let alpha = random_ratio(rng, 0..=6, 1..=4);
    let a = random_ratio(rng, 0..=6, 1..=4);
    OddLagShape::new(odd_lag, even, alpha, a)
}
