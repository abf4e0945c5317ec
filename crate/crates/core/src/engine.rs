//! Exact game semantics over rationals.
//!
//! A step first grows every bamboo by its rate, producing the *intermediate*
//! heights, and then applies at most one cut. Under [`GameVariant::Flush`] a
//! cut resets the bamboo to zero; under [`GameVariant::UnitRemove`] it removes
//! one unit of water, never going below zero.
//!
//! Time starts at 0 with all heights zero, and the first growth happens in
//! step 1. `GardenState::heights` always holds post-cut heights.
//!
//! Strategies are consulted on the intermediate heights, so every threshold
//! test (`height >= x`, `height >= 1`) sees the state after growth and before
//! the cut of the same step.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rates::RateVector;
use crate::rational::{self, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GameVariant {
    /// Cutting resets the bamboo to height 0.
    Flush,
    /// The emptier removes up to one unit from the chosen cup.
    UnitRemove,
}

impl GameVariant {
    pub fn apply_cut(self, height: &Rational) -> Rational {
        match self {
            GameVariant::Flush => Rational::zero(),
            GameVariant::UnitRemove => {
                let rest = height - Rational::one();
                if rest > Rational::zero() {
                    rest
                } else {
                    Rational::zero()
                }
            }
        }
    }

    /// Same as [`apply_cut`](Self::apply_cut) on numerators over `denom`.
    pub fn apply_cut_scaled(self, height: i128, denom: i128) -> i128 {
        match self {
            GameVariant::Flush => 0,
            GameVariant::UnitRemove => (height - denom).max(0),
        }
    }
}

impl fmt::Display for GameVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GameVariant::Flush => "flush",
            GameVariant::UnitRemove => "unit",
        })
    }
}

impl FromStr for GameVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "flush" => Ok(GameVariant::Flush),
            "unit" | "unit-remove" => Ok(GameVariant::UnitRemove),
            other => Err(Error::parse("variant", other, "expected flush or unit")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GardenState {
    pub time: u64,
    pub heights: Vec<Rational>,
    pub variant: GameVariant,
}

/// One step of a game: heights after growth, the cut, and heights after it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: u64,
    #[serde(with = "rational::serde_str_vec")]
    pub intermediate_heights: Vec<Rational>,
    pub cut_index: Option<usize>,
    #[serde(with = "rational::serde_str_vec")]
    pub post_heights: Vec<Rational>,
}

pub fn new_game(rates: &RateVector, variant: GameVariant) -> GardenState {
    GardenState {
        time: 0,
        heights: vec![Rational::zero(); rates.len()],
        variant,
    }
}

/// Grow every bamboo, then cut `choice` if given.
pub fn step(
    rates: &RateVector,
    state: &GardenState,
    choice: Option<usize>,
) -> Result<(GardenState, StepRecord)> {
    let intermediate = grow(rates, &state.heights);
    step_from_intermediate(state, intermediate, choice)
}

pub(crate) fn grow(rates: &RateVector, heights: &[Rational]) -> Vec<Rational> {
    heights
        .iter()
        .zip(rates.rates())
        .map(|(h, r)| h + r)
        .collect()
}

/// Finish a step whose growth has already been applied.
pub(crate) fn step_from_intermediate(
    state: &GardenState,
    intermediate: Vec<Rational>,
    choice: Option<usize>,
) -> Result<(GardenState, StepRecord)> {
    let len = intermediate.len();
    if let Some(index) = choice {
        if index >= len {
            return Err(Error::IndexOutOfRange { index, len });
        }
    }
    let mut post = intermediate.clone();
    if let Some(index) = choice {
        post[index] = state.variant.apply_cut(&intermediate[index]);
    }
    let time = state.time + 1;
    let record = StepRecord {
        step: time,
        intermediate_heights: intermediate,
        cut_index: choice,
        post_heights: post.clone(),
    };
    let next = GardenState {
        time,
        heights: post,
        variant: state.variant,
    };
    Ok((next, record))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    fn state(heights: Vec<Rational>, variant: GameVariant) -> GardenState {
        GardenState {
            time: 0,
            heights,
            variant,
        }
    }

    #[test]
    fn new_game_starts_at_zero() {
        let rv = RateVector::from_ratios(&[(1, 2), (1, 2)]).unwrap();
        let s = new_game(&rv, GameVariant::Flush);
        assert_eq!(s.time, 0);
        assert_eq!(s.heights, vec![int(0), int(0)]);

        let rv = RateVector::from_ratios(&[(1, 4); 4]).unwrap();
        assert_eq!(new_game(&rv, GameVariant::Flush).heights, vec![int(0); 4]);
    }

    #[test]
    fn flush_cut_resets_chosen_bamboo() {
        let rv = RateVector::from_ratios(&[(1, 2), (1, 2)]).unwrap();
        let s = state(vec![int(1), rat(1, 2)], GameVariant::Flush);
        let (next, rec) = step(&rv, &s, Some(0)).unwrap();
        assert_eq!(rec.intermediate_heights, vec![rat(3, 2), int(1)]);
        assert_eq!(rec.post_heights, vec![int(0), int(1)]);
        assert_eq!(next.heights, rec.post_heights);
        assert_eq!(next.time, 1);
        assert_eq!(rec.step, 1);
    }

    #[test]
    fn idle_step_only_grows() {
        let rv = RateVector::from_ratios(&[(1, 4)]).unwrap();
        let s = state(vec![rat(1, 4)], GameVariant::Flush);
        let (_, rec) = step(&rv, &s, None).unwrap();
        assert_eq!(rec.intermediate_heights, vec![rat(1, 2)]);
        assert_eq!(rec.post_heights, vec![rat(1, 2)]);
        assert_eq!(rec.cut_index, None);
    }

    #[test]
    fn unit_remove_takes_exactly_one_unit() {
        let rv = RateVector::from_ratios(&[(1, 4)]).unwrap();
        let s = state(vec![rat(7, 4)], GameVariant::UnitRemove);
        let (_, rec) = step(&rv, &s, Some(0)).unwrap();
        assert_eq!(rec.intermediate_heights, vec![int(2)]);
        assert_eq!(rec.post_heights, vec![int(1)]);

        let s = state(vec![rat(1, 4)], GameVariant::UnitRemove);
        let (_, rec) = step(&rv, &s, Some(0)).unwrap();
        assert_eq!(rec.post_heights, vec![int(0)]);
    }

    #[test]
    fn out_of_range_choice_is_rejected() {
        let rv = RateVector::from_ratios(&[(1, 4)]).unwrap();
        let s = new_game(&rv, GameVariant::Flush);
        assert!(matches!(
            step(&rv, &s, Some(1)),
            Err(Error::IndexOutOfRange { index: 1, len: 1 })
        ));
    }

    #[test]
    fn record_serializes_with_fraction_strings() {
        let rec = StepRecord {
            step: 3,
            intermediate_heights: vec![rat(3, 2), int(1)],
            cut_index: Some(0),
            post_heights: vec![int(0), int(1)],
        };
        let line = serde_json::to_string(&rec).unwrap();
        assert_eq!(
            line,
            r#"{"step":3,"intermediate_heights":["3/2","1/1"],"cut_index":0,"post_heights":["0/1","1/1"]}"#
        );
        let back: StepRecord = serde_json::from_str(&line).unwrap();
        assert_eq!(back, rec);
    }

    #[test]
    fn variant_parses() {
        assert_eq!("flush".parse::<GameVariant>().unwrap(), GameVariant::Flush);
        assert_eq!("unit".parse::<GameVariant>().unwrap(), GameVariant::UnitRemove);
        assert!("drain".parse::<GameVariant>().is_err());
    }
}
