//! Cutting strategies.
//!
//! Each strategy is a pure function from the intermediate heights of a step
//! (after growth, before the cut) to an optional bamboo index. Indices refer
//! to the fastest-first order of [`RateVector`], and every tie is broken
//! toward the lowest index, which among equal heights or deadlines is also a
//! fastest candidate.
//!
//! The free functions here work on exact rationals and define the strategies.
//! [`Strategy`] is the integer-scaled interface the engine drives; the
//! implementations returned by [`StrategyRef::scanner`] re-express the same
//! rules over numerators.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::rates::{RateVector, Scale};
use crate::rational::{self, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum StrategyRef {
    ReduceMax,
    /// Cut the fastest bamboo with height at least the threshold; idle otherwise.
    ReduceFastest(Rational),
    DeadlineDriven,
}

impl StrategyRef {
    pub fn reduce_fastest(threshold: Rational) -> Result<Self> {
        if !threshold.is_positive() {
            return Err(Error::NonPositiveThreshold(threshold));
        }
        Ok(StrategyRef::ReduceFastest(threshold))
    }

    pub fn threshold(&self) -> Option<&Rational> {
        match self {
            StrategyRef::ReduceFastest(x) => Some(x),
            _ => None,
        }
    }

    /// Straightforward per-step implementation over scaled heights.
    pub fn scanner(&self, scale: &Scale) -> Box<dyn Strategy + Send> {
        match self {
            StrategyRef::ReduceMax => Box::new(ReduceMaxScan),
            StrategyRef::ReduceFastest(x) => Box::new(ReduceFastestScan {
                threshold: scale.threshold(x),
            }),
            StrategyRef::DeadlineDriven => Box::new(DeadlineScan),
        }
    }
}

impl fmt::Display for StrategyRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StrategyRef::ReduceMax => f.write_str("reduce-max"),
            StrategyRef::ReduceFastest(x) => {
                write!(f, "reduce-fastest:{}", rational::format_rational(x))
            }
            StrategyRef::DeadlineDriven => f.write_str("deadline-driven"),
        }
    }
}

impl FromStr for StrategyRef {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        match s {
            "reduce-max" => Ok(StrategyRef::ReduceMax),
            "deadline-driven" => Ok(StrategyRef::DeadlineDriven),
            _ => match s.strip_prefix("reduce-fastest:") {
                Some(x) => StrategyRef::reduce_fastest(rational::parse_rational(x)?),
                None => Err(Error::parse(
                    "strategy",
                    s,
                    "expected reduce-max, reduce-fastest:<p>/<q> or deadline-driven",
                )),
            },
        }
    }
}

/// Index of a tallest bamboo, lowest index on ties.
pub fn reduce_max_choose(heights: &[Rational]) -> Result<usize> {
    let mut best: Option<usize> = None;
    for (i, h) in heights.iter().enumerate() {
        match best {
            Some(b) if heights[b] >= *h => {}
            _ => best = Some(i),
        }
    }
    best.ok_or(Error::EmptyGarden)
}

/// Lowest index (so fastest) among bamboo with height at least `x`.
pub fn reduce_fastest_choose(
    x: &Rational,
    heights: &[Rational],
    rates: &RateVector,
) -> Option<usize> {
    debug_assert_eq!(heights.len(), rates.len());
    heights.iter().position(|h| h >= x)
}

/// Step at which a cup of this height, seen at step `now`, reaches height 2.
///
/// Reaching exactly 2 counts, so the result is `now + ceil((2 - height) / rate)`.
/// For a cup already at 2 or above the result is at or before `now`.
pub fn dds_deadline(height: &Rational, rate: &Rational, now: u64) -> Result<i64> {
    if *height < Rational::one() {
        return Err(Error::HeightBelowRequest(height.clone()));
    }
    let two = Rational::from_integer(BigInt::from(2));
    let wait = rational::ceil(&((two - height) / rate));
    let wait = wait.to_i64().expect("deadline offset fits in i64");
    Ok(now as i64 + wait)
}

/// Among cups at height 1 or more, the one with the earliest deadline.
pub fn deadline_driven_choose(
    heights: &[Rational],
    rates: &RateVector,
    now: u64,
) -> Option<usize> {
    let mut best: Option<(i64, usize)> = None;
    for (i, h) in heights.iter().enumerate() {
        let Ok(deadline) = dds_deadline(h, rates.rate(i), now) else {
            continue;
        };
        if best.is_none_or(|(d, _)| deadline < d) {
            best = Some((deadline, i));
        }
    }
    best.map(|(_, i)| i)
}

/// What a strategy sees at the moment it acts: heights after growth.
///
/// Heights and rates are numerators over `denom`.
#[derive(Clone, Copy, Debug)]
pub struct GardenView<'a> {
    pub step: u64,
    pub intermediate: &'a [i128],
    pub rates: &'a [i128],
    pub denom: i128,
}

pub trait Strategy {
    fn choose(&mut self, view: &GardenView<'_>) -> Option<usize>;
}

impl<F> Strategy for F
where
    F: FnMut(&GardenView<'_>) -> Option<usize>,
{
    fn choose(&mut self, view: &GardenView<'_>) -> Option<usize> {
        self(view)
    }
}

struct ReduceMaxScan;

impl Strategy for ReduceMaxScan {
    fn choose(&mut self, view: &GardenView<'_>) -> Option<usize> {
        let mut best = 0;
        for (i, &h) in view.intermediate.iter().enumerate().skip(1) {
            if h > view.intermediate[best] {
                best = i;
            }
        }
        (!view.intermediate.is_empty()).then_some(best)
    }
}

struct ReduceFastestScan {
    threshold: i128,
}

impl Strategy for ReduceFastestScan {
    fn choose(&mut self, view: &GardenView<'_>) -> Option<usize> {
        view.intermediate.iter().position(|&h| h >= self.threshold)
    }
}

struct DeadlineScan;

impl Strategy for DeadlineScan {
    fn choose(&mut self, view: &GardenView<'_>) -> Option<usize> {
        let one = view.denom;
        let mut best: Option<(i128, usize)> = None;
        for (i, (&h, &r)) in view.intermediate.iter().zip(view.rates).enumerate() {
            if h < one {
                continue;
            }
            let deadline = view.step as i128 + rational::ceil_div(2 * one - h, r);
            if best.is_none_or(|(d, _)| deadline < d) {
                best = Some((deadline, i));
            }
        }
        best.map(|(_, i)| i)
    }
}
