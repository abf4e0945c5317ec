//! Deliberately naive engine used as an oracle.
//!
//! Everything is recomputed from scratch each step with exact rationals,
//! linear scans, and the rational-level strategy functions. It shares only
//! the step semantics of [`crate::engine`] with the optimized engine.

use crate::engine::{self, GameVariant, StepRecord};
use crate::error::{Error, Result};
use crate::rates::RateVector;
use crate::strategy::{self, StrategyRef};

pub fn run_naive(
    rates: &RateVector,
    variant: GameVariant,
    strategy: &StrategyRef,
    horizon: u64,
) -> Result<Vec<StepRecord>> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let mut state = engine::new_game(rates, variant);
    let mut records = Vec::with_capacity(horizon as usize);
    for _ in 0..horizon {
        let now = state.time + 1;
        let intermediate = engine::grow(rates, &state.heights);
        let choice = match strategy {
            StrategyRef::ReduceMax => Some(strategy::reduce_max_choose(&intermediate)?),
            StrategyRef::ReduceFastest(x) => {
                strategy::reduce_fastest_choose(x, &intermediate, rates)
            }
            StrategyRef::DeadlineDriven => {
                strategy::deadline_driven_choose(&intermediate, rates, now)
            }
        };
        let (next, record) = engine::step(rates, &state, choice)?;
        debug_assert_eq!(record.intermediate_heights, intermediate);
        state = next;
        records.push(record);
    }
    Ok(records)
}

/// Replay recorded cuts through the step semantics.
pub fn replay(
    rates: &RateVector,
    variant: GameVariant,
    choices: impl IntoIterator<Item = Option<usize>>,
) -> Result<Vec<StepRecord>> {
    let mut state = engine::new_game(rates, variant);
    let mut records = Vec::new();
    for choice in choices {
        let (next, record) = engine::step(rates, &state, choice)?;
        state = next;
        records.push(record);
    }
    Ok(records)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn naive_uniform_four_reaches_eleven_quarters() {
        let rv = RateVector::from_ratios(&[(1, 4); 4]).unwrap();
        let recs = run_naive(&rv, GameVariant::Flush, &StrategyRef::ReduceFastest(int(2)), 12)
            .unwrap();
        let max = recs
            .iter()
            .flat_map(|r| r.intermediate_heights.iter())
            .max()
            .unwrap();
        assert_eq!(*max, rat(11, 4));
        assert_eq!(recs[10].cut_index, Some(3));
        assert_eq!(recs[10].intermediate_heights[3], rat(11, 4));
    }

    #[test]
    fn replay_reproduces_naive_run() {
        let rv = RateVector::from_ratios(&[(1, 2), (1, 3), (1, 6)]).unwrap();
        let recs = run_naive(&rv, GameVariant::UnitRemove, &StrategyRef::DeadlineDriven, 50)
            .unwrap();
        let again = replay(&rv, GameVariant::UnitRemove, recs.iter().map(|r| r.cut_index))
            .unwrap();
        assert_eq!(recs, again);
    }
}
