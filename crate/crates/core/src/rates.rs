//! Validated growth-rate vectors and their integer rescaling.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::rational::{self, Rational};

/// Largest common denominator the integer engine accepts.
///
/// Heights are stored as `i128` numerators over this scale, and the potential
/// check multiplies two of them, so the bound keeps every product well inside
/// `i128` for any horizon that fits in memory.
pub const MAX_SCALE: i128 = 1 << 40;

/// Growth rates sorted fastest first, with the caller's original order kept.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RateVector {
    rates: Vec<Rational>,
    budget: Rational,
    original: Vec<usize>,
}

impl RateVector {
    /// Rates for a single-processor game; they must sum to at most 1.
    pub fn new(rates: Vec<Rational>) -> Result<Self> {
        Self::with_budget(rates, Rational::one())
    }

    pub fn with_budget(rates: Vec<Rational>, budget: Rational) -> Result<Self> {
        if rates.is_empty() {
            return Err(Error::EmptyGarden);
        }
        if let Some((index, rate)) = rates.iter().enumerate().find(|(_, r)| !r.is_positive()) {
            return Err(Error::NonPositiveRate {
                index,
                rate: rate.clone(),
            });
        }
        let sum: Rational = rates.iter().sum();
        if sum > budget {
            return Err(Error::RateSumExceedsBudget { sum: Box::new(sum), budget: Box::new(budget) });
        }
        let mut original: Vec<usize> = (0..rates.len()).collect();
        // Stable, so equal rates keep the caller's relative order.
        original.sort_by(|&a, &b| rates[b].cmp(&rates[a]));
        let sorted = original.iter().map(|&i| rates[i].clone()).collect();
        Ok(RateVector {
            rates: sorted,
            budget,
            original,
        })
    }

    pub fn from_ratios(pairs: &[(i64, i64)]) -> Result<Self> {
        Self::new(pairs.iter().map(|&(p, q)| rational::rat(p, q)).collect())
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    pub fn rates(&self) -> &[Rational] {
        &self.rates
    }

    pub fn rate(&self, index: usize) -> &Rational {
        &self.rates[index]
    }

    pub fn fastest(&self) -> &Rational {
        &self.rates[0]
    }

    pub fn budget(&self) -> &Rational {
        &self.budget
    }

    pub fn sum(&self) -> Rational {
        self.rates.iter().sum()
    }

    /// Index the caller used for the bamboo now at sorted position `index`.
    pub fn original_index(&self, index: usize) -> usize {
        self.original[index]
    }

    /// Rates in the order they were supplied.
    pub fn in_original_order(&self) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.len()];
        for (pos, &orig) in self.original.iter().enumerate() {
            out[orig] = self.rates[pos].clone();
        }
        out
    }

    pub fn scale(&self) -> Result<Scale> {
        Scale::covering(self, std::iter::empty())
    }
}

/// Rates rewritten as integer numerators over one common denominator.
///
/// Every reachable height is a sum of rates minus whole units, so it is also
/// an integer multiple of `1 / denom`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scale {
    denom: i128,
    rates: Vec<i128>,
}

impl Scale {
    /// Smallest scale covering the rates and every value in `extra`.
    pub fn covering<'a>(
        rates: &'a RateVector,
        extra: impl IntoIterator<Item = &'a Rational>,
    ) -> Result<Self> {
        let limit = BigInt::from(MAX_SCALE);
        let denom = rational::common_denominator(rates.rates().iter().chain(extra), &limit)
            .map_err(|d| Error::ScaleTooLarge(d.to_string()))?;
        let rates = rates
            .rates()
            .iter()
            .map(|r| rational::rescale(r, &denom).expect("rate numerators fit under MAX_SCALE"))
            .collect();
        Ok(Scale {
            denom: denom.to_i128().expect("bounded by MAX_SCALE"),
            rates,
        })
    }

    pub fn denom(&self) -> i128 {
        self.denom
    }

    pub fn rates(&self) -> &[i128] {
        &self.rates
    }

    pub fn len(&self) -> usize {
        self.rates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rates.is_empty()
    }

    /// Integer numerator of `value`, if its denominator divides the scale.
    pub fn numerator_of(&self, value: &Rational) -> Option<i128> {
        let d = BigInt::from(self.denom);
        if (&d % value.denom()).is_zero() {
            rational::rescale(value, &d)
        } else {
            None
        }
    }

    /// Smallest numerator `k` with `k / denom >= x`, so `h >= x` iff `h_num >= k`.
    pub fn threshold(&self, x: &Rational) -> i128 {
        let scaled = x * Rational::from_integer(BigInt::from(self.denom));
        rational::ceil(&scaled).to_i128().unwrap_or(match x.cmp(&Rational::zero()) {
            Ordering::Less => i128::MIN,
            _ => i128::MAX,
        })
    }

    pub fn to_rational(&self, numer: i128) -> Rational {
        rational::from_scaled(numer, self.denom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    #[test]
    fn sorts_descending_and_keeps_permutation() {
        let rv = RateVector::new(vec![rat(1, 10), rat(1, 2), rat(1, 5), rat(1, 5)]).unwrap();
        assert_eq!(rv.rates(), &[rat(1, 2), rat(1, 5), rat(1, 5), rat(1, 10)]);
        let orig: Vec<_> = (0..4).map(|i| rv.original_index(i)).collect();
        assert_eq!(orig, vec![1, 2, 3, 0]);
        assert_eq!(
            rv.in_original_order(),
            vec![rat(1, 10), rat(1, 2), rat(1, 5), rat(1, 5)]
        );
    }

    #[test]
    fn rejects_oversubscribed_and_nonpositive() {
        let err = RateVector::from_ratios(&[(1, 2), (2, 3)]).unwrap_err();
        match err {
            Error::RateSumExceedsBudget { sum, .. } => assert_eq!(*sum, rat(7, 6)),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            RateVector::from_ratios(&[(1, 2), (0, 1)]),
            Err(Error::NonPositiveRate { index: 1, .. })
        ));
        assert!(matches!(
            RateVector::new(vec![]),
            Err(Error::EmptyGarden)
        ));
    }

    #[test]
    fn budget_allows_multiprocessor_sums() {
        let rv = RateVector::with_budget(vec![rat(1, 1), rat(1, 1)], rat(2, 1)).unwrap();
        assert_eq!(rv.sum(), rat(2, 1));
    }

    #[test]
    fn scale_is_lcm_of_denominators() {
        let rv = RateVector::from_ratios(&[(1, 1000), (1, 1400)]).unwrap();
        let s = rv.scale().unwrap();
        assert_eq!(s.denom(), 7000);
        assert_eq!(s.rates(), &[7, 5]);
        assert_eq!(s.threshold(&rat(101, 100)), 7070);
        assert_eq!(s.threshold(&rat(1, 3)), 2334);
        assert_eq!(s.numerator_of(&rat(3, 7)), Some(3000));
        assert_eq!(s.numerator_of(&rat(1, 3)), None);
    }

    #[test]
    fn oversized_scale_is_reported() {
        let primes = [1_000_003i64, 1_000_033, 1_000_037];
        let rates = primes.iter().map(|&p| rat(1, p)).collect();
        let rv = RateVector::new(rates).unwrap();
        assert!(matches!(rv.scale(), Err(Error::ScaleTooLarge(_))));
    }
}
