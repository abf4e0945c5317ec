//! Seeded random rate vectors with exact sums.
//!
//! Rates are drawn as positive integer weights and normalized, so a vector
//! sums to its target exactly. The weight range itself is drawn per vector;
//! narrow ranges produce many equal rates and exercise tie-breaking.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::rates::RateVector;
use crate::rational::{int, rat, Rational};

const WEIGHT_CEILINGS: [i64; 6] = [1, 2, 3, 10, 100, 1000];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn weights<R: Rng>(rng: &mut R, n: usize) -> Vec<i64> {
    let ceiling = WEIGHT_CEILINGS[rng.gen_range(0..WEIGHT_CEILINGS.len())];
    (0..n).map(|_| rng.gen_range(1..=ceiling)).collect()
}

/// `n` rates summing to exactly 1.
pub fn random_rates<R: Rng>(rng: &mut R, n: usize) -> RateVector {
    let w = weights(rng, n);
    let total: i64 = w.iter().sum();
    RateVector::new(w.iter().map(|&wi| rat(wi, total)).collect())
        .expect("normalized weights form a valid rate vector")
}

/// `n` rates summing to at most 1: with probability one half the sum is
/// exactly 1, otherwise it is scaled by a random factor in `(0, 1)`.
pub fn random_subunit_rates<R: Rng>(rng: &mut R, n: usize) -> RateVector {
    let w = weights(rng, n);
    let total: i64 = w.iter().sum();
    let slack = if rng.gen_bool(0.5) {
        int(1)
    } else {
        let d = rng.gen_range(2..=20);
        rat(rng.gen_range(1..d), d)
    };
    RateVector::new(w.iter().map(|&wi| rat(wi, total) * &slack).collect())
        .expect("scaled weights form a valid rate vector")
}

/// `n` rates summing to exactly `processors`, none above 1.
///
/// Needs `n >= processors`; resamples until the cap holds.
pub fn random_multiproc_rates<R: Rng>(rng: &mut R, n: usize, processors: usize) -> Vec<Rational> {
    assert!(n >= processors && processors >= 1);
    let p = processors as i64;
    loop {
        let w = weights(rng, n);
        let total: i64 = w.iter().sum();
        if w.iter().all(|&wi| wi * p <= total) {
            return w.iter().map(|&wi| rat(wi * p, total)).collect();
        }
    }
}

/// The standard random suite: `count` vectors, sizes drawn from `sizes`, each summing to 1.
pub fn random_suite(seed: u64, count: usize, sizes: std::ops::RangeInclusive<usize>) -> Vec<RateVector> {
    let mut rng = rng(seed);
    (0..count)
        .map(|_| {
            let n = rng.gen_range(sizes.clone());
            random_rates(&mut rng, n)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_rates_sum_to_one() {
        let mut r = rng(7);
        for n in 1..30 {
            let rv = random_rates(&mut r, n);
            assert_eq!(rv.len(), n);
            assert_eq!(rv.sum(), int(1));
        }
    }

    #[test]
    fn subunit_rates_stay_within_budget() {
        let mut r = rng(8);
        for n in 1..30 {
            let rv = random_subunit_rates(&mut r, n);
            assert!(rv.sum() <= int(1));
        }
    }

    #[test]
    fn multiproc_rates_respect_cap_and_sum() {
        let mut r = rng(9);
        for p in [1usize, 2, 4] {
            for n in [p, 2 * p, 30] {
                let rates = random_multiproc_rates(&mut r, n, p);
                assert_eq!(rates.iter().sum::<Rational>(), int(p as i64));
                assert!(rates.iter().all(|x| *x <= int(1)));
            }
        }
    }

    #[test]
    fn suite_is_reproducible() {
        assert_eq!(random_suite(3, 5, 2..=50), random_suite(3, 5, 2..=50));
        assert_ne!(random_suite(3, 5, 2..=50), random_suite(4, 5, 2..=50));
    }
}
