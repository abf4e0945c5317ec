//! The `p`-processor flushing game and its reduction to one processor.
//!
//! With `p` processors the filler may place up to `p` units per step, no cup
//! getting more than 1, and the emptier flushes up to `p` distinct cups.
//! Dividing every rate by `p` gives a single-processor game; grouping its
//! steps into chunks of `p` turns any single-processor strategy into a
//! `p`-processor one that loses at most one unit of backlog.

use num_traits::Signed;
use serde::{Deserialize, Serialize};

use crate::engine::GameVariant;
use crate::error::{Error, Result};
use crate::rates::RateVector;
use crate::rational::{self, int, Rational};
use crate::run::run;
use crate::strategy::StrategyRef;
use crate::trace::{backlog, BacklogReport, Trace};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiprocConfig {
    processors: usize,
    rates: Vec<Rational>,
}

impl MultiprocConfig {
    /// Rates are kept in the caller's order.
    pub fn new(processors: usize, rates: Vec<Rational>) -> Result<Self> {
        if processors == 0 {
            return Err(Error::ZeroProcessors);
        }
        if rates.is_empty() {
            return Err(Error::EmptyGarden);
        }
        for (index, rate) in rates.iter().enumerate() {
            if !rate.is_positive() {
                return Err(Error::NonPositiveRate {
                    index,
                    rate: rate.clone(),
                });
            }
            if *rate > int(1) {
                return Err(Error::RateAboveOne {
                    index,
                    rate: rate.clone(),
                });
            }
        }
        let sum: Rational = rates.iter().sum();
        let budget = int(processors as i64);
        if sum > budget {
            return Err(Error::RateSumExceedsBudget { sum: Box::new(sum), budget: Box::new(budget) });
        }
        Ok(MultiprocConfig { processors, rates })
    }

    pub fn processors(&self) -> usize {
        self.processors
    }

    pub fn rates(&self) -> &[Rational] {
        &self.rates
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiprocState {
    pub time: u64,
    pub heights: Vec<Rational>,
}

impl MultiprocState {
    pub fn new(config: &MultiprocConfig) -> Self {
        MultiprocState {
            time: 0,
            heights: vec![int(0); config.rates.len()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiprocRecord {
    pub step: u64,
    #[serde(with = "rational::serde_str_vec")]
    pub intermediate_heights: Vec<Rational>,
    /// Sorted, distinct.
    pub cut_indices: Vec<usize>,
    #[serde(with = "rational::serde_str_vec")]
    pub post_heights: Vec<Rational>,
}

/// Grow every cup, then flush each chosen one.
pub fn multiproc_step(
    config: &MultiprocConfig,
    state: &MultiprocState,
    choices: &[usize],
) -> Result<(MultiprocState, MultiprocRecord)> {
    let n = config.rates.len();
    if state.heights.len() != n {
        return Err(Error::MalformedTrace(format!(
            "{} heights for {n} cups",
            state.heights.len()
        )));
    }
    if choices.len() > config.processors {
        return Err(Error::TooManyChoices {
            given: choices.len(),
            processors: config.processors,
        });
    }
    let mut cut_indices = choices.to_vec();
    cut_indices.sort_unstable();
    for w in cut_indices.windows(2) {
        if w[0] == w[1] {
            return Err(Error::DuplicateChoice(w[0]));
        }
    }
    if let Some(&index) = cut_indices.iter().find(|&&i| i >= n) {
        return Err(Error::IndexOutOfRange { index, len: n });
    }
    let intermediate: Vec<Rational> = state
        .heights
        .iter()
        .zip(&config.rates)
        .map(|(h, r)| h + r)
        .collect();
    let mut post = intermediate.clone();
    for &i in &cut_indices {
        post[i] = int(0);
    }
    let next = MultiprocState {
        time: state.time + 1,
        heights: post.clone(),
    };
    let step = next.time;
    Ok((
        next,
        MultiprocRecord {
            step,
            intermediate_heights: intermediate,
            cut_indices,
            post_heights: post,
        },
    ))
}

/// The single-processor game with every rate divided by `p`.
pub fn reduce_to_single(config: &MultiprocConfig) -> Result<RateVector> {
    let p = int(config.processors as i64);
    RateVector::new(config.rates.iter().map(|r| r / &p).collect())
}

/// A `p`-processor run driven by a single-processor strategy on the reduced game.
#[derive(Clone, Debug)]
pub struct MultiprocTrace {
    config: MultiprocConfig,
    reduced: Trace,
    /// Cup indices in the caller's order, one sorted set per step.
    choices: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiprocBacklog {
    #[serde(with = "rational::serde_str")]
    pub max_intermediate: Rational,
    pub argmax_step: u64,
    pub argmax_index: usize,
}

pub fn run_reduction(
    config: &MultiprocConfig,
    strategy: &StrategyRef,
    horizon: u64,
) -> Result<MultiprocTrace> {
    if horizon == 0 {
        return Err(Error::ZeroHorizon);
    }
    let reduced_rates = reduce_to_single(config)?;
    let p = config.processors;
    let reduced = run(&reduced_rates, GameVariant::Flush, strategy, horizon * p as u64)?;
    let single = reduced.choices();
    let choices = single
        .chunks(p)
        .map(|chunk| {
            let mut set: Vec<usize> = chunk
                .iter()
                .flatten()
                .map(|&i| reduced_rates.original_index(i))
                .collect();
            set.sort_unstable();
            set.dedup();
            set
        })
        .collect();
    Ok(MultiprocTrace {
        config: config.clone(),
        reduced,
        choices,
    })
}

impl MultiprocTrace {
    pub fn config(&self) -> &MultiprocConfig {
        &self.config
    }

    pub fn len(&self) -> usize {
        self.choices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.choices.is_empty()
    }

    /// The single-processor trace, `p` steps per multiprocessor step.
    pub fn reduced(&self) -> &Trace {
        &self.reduced
    }

    pub fn choices(&self) -> &[Vec<usize>] {
        &self.choices
    }

    pub fn reduced_backlog(&self) -> Result<BacklogReport> {
        backlog(&self.reduced)
    }

    /// Scaled replay: the reduced scale also covers the original rates,
    /// since each is `p` times a reduced numerator.
    pub fn backlog(&self) -> MultiprocBacklog {
        let scale = self.reduced.scale();
        let reduced_rates = self.reduced.rates();
        let p = self.config.processors as i128;
        let mut rates = vec![0i128; self.config.rates.len()];
        for (sorted, &r) in scale.rates().iter().enumerate() {
            rates[reduced_rates.original_index(sorted)] = p * r;
        }
        let mut heights = vec![0i128; rates.len()];
        let mut best = (i128::MIN, 0, 0);
        for (k, set) in self.choices.iter().enumerate() {
            for (i, (h, &r)) in heights.iter_mut().zip(&rates).enumerate() {
                *h += r;
                if *h > best.0 {
                    best = (*h, k as u64 + 1, i);
                }
            }
            for &i in set {
                heights[i] = 0;
            }
        }
        MultiprocBacklog {
            max_intermediate: scale.to_rational(best.0),
            argmax_step: best.1,
            argmax_index: best.2,
        }
    }

    /// Exact per-step records; linear in `len * n`.
    pub fn records(&self) -> Result<Vec<MultiprocRecord>> {
        let mut state = MultiprocState::new(&self.config);
        let mut out = Vec::with_capacity(self.choices.len());
        for set in &self.choices {
            let (next, rec) = multiproc_step(&self.config, &state, set)?;
            state = next;
            out.push(rec);
        }
        Ok(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine;
    use crate::rational::rat;
    use crate::sampling::{random_multiproc_rates, rng};
    use rand::Rng;

    fn thirds() -> MultiprocConfig {
        MultiprocConfig::new(2, vec![rat(1, 3); 3]).unwrap()
    }

    #[test]
    fn step_flushes_every_choice() {
        let config = thirds();
        let state = MultiprocState {
            time: 0,
            heights: vec![int(1); 3],
        };
        let (next, rec) = multiproc_step(&config, &state, &[1, 0]).unwrap();
        assert_eq!(next.heights, vec![int(0), int(0), rat(4, 3)]);
        assert_eq!(rec.cut_indices, vec![0, 1]);
        assert_eq!(rec.intermediate_heights, vec![rat(4, 3); 3]);

        let (idle, _) = multiproc_step(&config, &state, &[]).unwrap();
        assert_eq!(idle.heights, vec![rat(4, 3); 3]);
    }

    #[test]
    fn step_rejects_bad_choice_sets() {
        let config = thirds();
        let state = MultiprocState::new(&config);
        assert!(matches!(
            multiproc_step(&config, &state, &[0, 1, 2]),
            Err(Error::TooManyChoices { given: 3, processors: 2 })
        ));
        assert!(matches!(
            multiproc_step(&config, &state, &[1, 1]),
            Err(Error::DuplicateChoice(1))
        ));
        assert!(multiproc_step(&config, &state, &[5]).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(matches!(MultiprocConfig::new(0, vec![rat(1, 2)]), Err(Error::ZeroProcessors)));
        assert!(matches!(
            MultiprocConfig::new(2, vec![rat(3, 2), rat(1, 4)]),
            Err(Error::RateAboveOne { index: 0, .. })
        ));
        assert!(matches!(
            MultiprocConfig::new(2, vec![int(1), int(1), rat(1, 10)]),
            Err(Error::RateSumExceedsBudget { .. })
        ));
    }

    #[test]
    fn single_processor_matches_flush_engine() {
        let rates = vec![rat(1, 2), rat(1, 3), rat(1, 6)];
        let config = MultiprocConfig::new(1, rates.clone()).unwrap();
        let rv = RateVector::new(rates).unwrap();
        assert_eq!(rv.rates(), reduce_to_single(&config).unwrap().rates());
        let mut a = MultiprocState::new(&config);
        let mut b = engine::new_game(&rv, GameVariant::Flush);
        for choice in [Some(0), None, Some(2), Some(1), Some(0)] {
            let set: Vec<usize> = choice.into_iter().collect();
            let (na, ra) = multiproc_step(&config, &a, &set).unwrap();
            let (nb, rb) = engine::step(&rv, &b, choice).unwrap();
            assert_eq!(ra.post_heights, rb.post_heights);
            assert_eq!(ra.intermediate_heights, rb.intermediate_heights);
            (a, b) = (na, nb);
        }
    }

    #[test]
    fn reduction_examples() {
        let config = MultiprocConfig::new(2, vec![int(1), rat(1, 2), rat(1, 2)]).unwrap();
        assert_eq!(
            reduce_to_single(&config).unwrap().rates(),
            &[rat(1, 2), rat(1, 4), rat(1, 4)]
        );
        let config = MultiprocConfig::new(3, vec![int(1), rat(1, 2), rat(1, 2), int(1)]).unwrap();
        assert_eq!(reduce_to_single(&config).unwrap().sum(), int(1));
    }

    #[test]
    fn chunks_follow_the_reduced_trace() {
        let mut r = rng(21);
        let rates = random_multiproc_rates(&mut r, 9, 3);
        let config = MultiprocConfig::new(3, rates).unwrap();
        let mt = run_reduction(&config, &StrategyRef::DeadlineDriven, 200).unwrap();
        let single = mt.reduced().choices();
        let reduced_rates = mt.reduced().rates();
        for (k, set) in mt.choices().iter().enumerate() {
            let mut expect: Vec<usize> = single[3 * k..3 * k + 3]
                .iter()
                .flatten()
                .map(|&i| reduced_rates.original_index(i))
                .collect();
            expect.sort_unstable();
            expect.dedup();
            assert_eq!(*set, expect);
        }
        let recs = mt.records().unwrap();
        let exact = recs
            .iter()
            .flat_map(|r| r.intermediate_heights.iter())
            .max()
            .unwrap();
        assert_eq!(*exact, mt.backlog().max_intermediate);
    }

    #[test]
    fn wrapped_backlogs_stay_one_above_reduced() {
        let mut r = rng(22);
        for p in [2usize, 4] {
            for _ in 0..5 {
                let n = r.gen_range(p..=4 * p);
                let config = MultiprocConfig::new(p, random_multiproc_rates(&mut r, n, p)).unwrap();
                for (s, cap) in [
                    (StrategyRef::DeadlineDriven, 3),
                    (StrategyRef::ReduceMax, 5),
                    (StrategyRef::ReduceFastest(int(2)), 4),
                ] {
                    let mt = run_reduction(&config, &s, 500).unwrap();
                    let b = mt.backlog().max_intermediate;
                    assert!(b < int(cap), "{s} {b}");
                    let single = mt.reduced_backlog().unwrap().max_intermediate;
                    assert!(b <= single + int(1));
                }
            }
        }
    }
}
