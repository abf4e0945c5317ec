//! Driving strategies through the game.
//!
//! [`run`] uses a dedicated engine per built-in strategy. Between cuts a
//! bamboo's height is linear in time, so the step at which it next crosses a
//! threshold, and its deadline, only change when it is cut. Reduce-Fastest
//! and Deadline-Driven therefore run off two heaps (bamboo waiting to become
//! eligible, and eligible ones ordered by priority) at `O(log n)` per step.
//! Reduce-Max scans heights every step.
//!
//! [`run_with`] drives any [`Strategy`] by materializing the intermediate
//! heights at every step.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use crate::engine::GameVariant;
use crate::error::{Error, Result};
use crate::rates::{RateVector, Scale};
use crate::rational::ceil_div;
use crate::strategy::{GardenView, Strategy, StrategyRef};
use crate::trace::Trace;

pub fn run(
    rates: &RateVector,
    variant: GameVariant,
    strategy: &StrategyRef,
    horizon: u64,
) -> Result<Trace> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let scale = rates.scale()?;
    let choices = match strategy {
        StrategyRef::ReduceMax => reduce_max(&scale, variant, horizon),
        StrategyRef::ReduceFastest(x) => {
            let threshold = scale.threshold(x);
            threshold_engine(&scale, variant, horizon, |_, _| threshold, |_, _, i| i as i128)
        }
        StrategyRef::DeadlineDriven => {
            let one = scale.denom();
            // Deadline is fixed from the last cut: last + ceil((2 - post) / rate).
            threshold_engine(
                &scale,
                variant,
                horizon,
                |_, _| one,
                |lazy: &Lazy, r: &[i128], i| {
                    i128::from(lazy.last[i]) + ceil_div(2 * one - lazy.base[i], r[i])
                },
            )
        }
    };
    Ok(Trace::from_parts(rates.clone(), variant, scale, choices))
}

/// Run an arbitrary strategy, consulting it on the intermediate heights of every step.
pub fn run_with(
    rates: &RateVector,
    variant: GameVariant,
    strategy: &mut dyn Strategy,
    horizon: u64,
) -> Result<Trace> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let scale = rates.scale()?;
    let n = rates.len();
    let denom = scale.denom();
    let mut heights = vec![0i128; n];
    let mut choices = Vec::with_capacity(horizon as usize);
    for step in 1..=horizon {
        for (h, &r) in heights.iter_mut().zip(scale.rates()) {
            *h += r;
        }
        let view = GardenView {
            step,
            intermediate: &heights,
            rates: scale.rates(),
            denom,
        };
        let choice = strategy.choose(&view);
        if let Some(i) = choice {
            if i >= n {
                return Err(Error::IndexOutOfRange { index: i, len: n });
            }
            heights[i] = variant.apply_cut_scaled(heights[i], denom);
        }
        choices.push(choice.map(|i| i as u32));
    }
    Ok(Trace::from_parts(rates.clone(), variant, scale, choices))
}

fn reduce_max(scale: &Scale, variant: GameVariant, horizon: u64) -> Vec<Option<u32>> {
    let rates = scale.rates();
    let mut heights = vec![0i128; rates.len()];
    let mut choices = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        let mut best = 0;
        let mut best_h = i128::MIN;
        for (i, (h, &r)) in heights.iter_mut().zip(rates).enumerate() {
            *h += r;
            if *h > best_h {
                best_h = *h;
                best = i;
            }
        }
        heights[best] = variant.apply_cut_scaled(best_h, scale.denom());
        choices.push(Some(best as u32));
    }
    choices
}

/// Per-bamboo state frozen at the last cut.
struct Lazy {
    last: Vec<u64>,
    base: Vec<i128>,
}

impl Lazy {
    fn height(&self, i: usize, step: u64, rate: i128) -> i128 {
        self.base[i] + i128::from(step - self.last[i]) * rate
    }

    /// First step after the last cut at which bamboo `i` reaches `threshold`.
    fn eligible_from(&self, i: usize, threshold: i128, rate: i128) -> u64 {
        let wait = ceil_div(threshold - self.base[i], rate).max(1);
        self.last[i].saturating_add(u64::try_from(wait).unwrap_or(u64::MAX))
    }
}

/// Shared loop for strategies that cut, among bamboo at or above a
/// threshold, the one with the smallest priority key. Both the threshold and
/// the key may depend only on the state at the last cut.
fn threshold_engine(
    scale: &Scale,
    variant: GameVariant,
    horizon: u64,
    threshold: impl Fn(&Lazy, usize) -> i128,
    key: impl Fn(&Lazy, &[i128], usize) -> i128,
) -> Vec<Option<u32>> {
    let rates = scale.rates();
    let n = rates.len();
    let mut lazy = Lazy {
        last: vec![0; n],
        base: vec![0; n],
    };
    let mut waiting: BinaryHeap<Reverse<(u64, usize)>> = (0..n)
        .map(|i| Reverse((lazy.eligible_from(i, threshold(&lazy, i), rates[i]), i)))
        .collect();
    let mut ready: BinaryHeap<Reverse<(i128, usize)>> = BinaryHeap::new();
    let mut choices = Vec::with_capacity(horizon as usize);
    for step in 1..=horizon {
        while let Some(&Reverse((at, i))) = waiting.peek() {
            if at > step {
                break;
            }
            waiting.pop();
            ready.push(Reverse((key(&lazy, rates, i), i)));
        }
        let choice = ready.pop().map(|Reverse((_, i))| i);
        if let Some(i) = choice {
            let height = lazy.height(i, step, rates[i]);
            lazy.base[i] = variant.apply_cut_scaled(height, scale.denom());
            lazy.last[i] = step;
            let at = lazy.eligible_from(i, threshold(&lazy, i), rates[i]);
            waiting.push(Reverse((at, i)));
        }
        choices.push(choice.map(|i| i as u32));
    }
    choices
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};
    use crate::trace::backlog;

    #[test]
    fn uniform_four_under_reduce_fastest_two() {
        // Hand simulation: no cuts until step 8 (height 2), then bamboo
        // 0..3 are cut at steps 8..11; the last reaches 11/4.
        let rv = RateVector::from_ratios(&[(1, 4); 4]).unwrap();
        let strategy = StrategyRef::ReduceFastest(int(2));
        let trace = run(&rv, GameVariant::Flush, &strategy, 12).unwrap();
        assert_eq!(trace.len(), 12);
        let expected: Vec<Option<usize>> = [None; 7]
            .into_iter()
            .chain([Some(0), Some(1), Some(2), Some(3), None])
            .collect();
        assert_eq!(trace.choices(), expected);
        assert_eq!(backlog(&trace).unwrap().max_intermediate, rat(11, 4));
    }

    #[test]
    fn reduce_max_breaks_first_tie_low() {
        let rv = RateVector::from_ratios(&[(1, 2), (1, 2)]).unwrap();
        let trace = run(&rv, GameVariant::Flush, &StrategyRef::ReduceMax, 1).unwrap();
        let rec = trace.records().next().unwrap();
        assert_eq!(rec.intermediate_heights, vec![rat(1, 2), rat(1, 2)]);
        assert_eq!(rec.cut_index, Some(0));
    }

    #[test]
    fn zero_horizon_is_rejected() {
        let rv = RateVector::from_ratios(&[(1, 2)]).unwrap();
        for s in [
            StrategyRef::ReduceMax,
            StrategyRef::ReduceFastest(int(1)),
            StrategyRef::DeadlineDriven,
        ] {
            assert!(matches!(
                run(&rv, GameVariant::Flush, &s, 0),
                Err(Error::ZeroHorizon)
            ));
        }
    }

    #[test]
    fn two_bamboo_deadline_driven_by_hand() {
        // Fast bamboo (99/100) reaches 1 on even steps and is cut there; the
        // slow one reaches 1 at step 100, loses to the fast deadline at 101
        // vs 200, and is cut at step 101.
        let rv = RateVector::from_ratios(&[(99, 100), (1, 100)]).unwrap();
        let trace = run(&rv, GameVariant::Flush, &StrategyRef::DeadlineDriven, 102).unwrap();
        let choices = trace.choices();
        assert_eq!(choices[0], None);
        assert_eq!(choices[1], Some(0));
        assert_eq!(choices[98], None);
        assert_eq!(choices[99], Some(0));
        assert_eq!(choices[100], Some(1));
        assert_eq!(backlog(&trace).unwrap().max_intermediate, rat(198, 100));
    }

    #[test]
    fn dedicated_engines_match_scanners() {
        let cases: &[&[(i64, i64)]] = &[
            &[(1, 3), (1, 3), (1, 4)],
            &[(2, 5), (1, 5), (1, 5), (1, 10), (1, 20)],
            &[(1, 7); 7],
            &[(5, 6), (1, 12)],
        ];
        let strategies = [
            StrategyRef::ReduceMax,
            StrategyRef::ReduceFastest(int(1)),
            StrategyRef::ReduceFastest(int(2)),
            StrategyRef::ReduceFastest(rat(3, 2)),
            StrategyRef::DeadlineDriven,
        ];
        for rates in cases {
            let rv = RateVector::from_ratios(rates).unwrap();
            let scale = rv.scale().unwrap();
            for variant in [GameVariant::Flush, GameVariant::UnitRemove] {
                for s in &strategies {
                    let fast = run(&rv, variant, s, 400).unwrap();
                    let mut scan = s.scanner(&scale);
                    let slow = run_with(&rv, variant, scan.as_mut(), 400).unwrap();
                    assert_eq!(fast.choices(), slow.choices(), "{rates:?} {variant} {s}");
                }
            }
        }
    }

    #[test]
    fn run_with_rejects_bad_index() {
        let rv = RateVector::from_ratios(&[(1, 2)]).unwrap();
        let mut bad = |_: &GardenView<'_>| Some(3);
        assert!(matches!(
            run_with(&rv, GameVariant::Flush, &mut bad, 2),
            Err(Error::IndexOutOfRange { index: 3, len: 1 })
        ));
    }
}
