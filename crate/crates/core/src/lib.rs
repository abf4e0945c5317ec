//! Exact simulation of bamboo garden trimming, the fixed-rate cup game with
//! flushing.
//!
//! Bamboo grow at fixed rational rates summing to at most 1. Each step every
//! bamboo grows, then the player cuts one. The backlog is the tallest height
//! ever seen right after growth. This crate runs the Reduce-Max,
//! Reduce-Fastest(x) and Deadline-Driven strategies, builds the adversarial
//! gardens that force large backlogs, and audits traces against the bound
//! each strategy guarantees. All arithmetic is exact.
//!
//! ```
//! use bamboo_garden::{backlog, rat, run, GameVariant, RateVector, StrategyRef};
//!
//! let rates = RateVector::from_ratios(&[(1, 4); 4])?;
//! let trace = run(&rates, GameVariant::Flush, &"reduce-fastest:2".parse()?, 12)?;
//! assert_eq!(backlog(&trace)?.max_intermediate, rat(11, 4));
//! # Ok::<(), bamboo_garden::Error>(())
//! ```

pub mod analysis;
pub mod cli;
pub mod constructions;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod multiproc;
pub mod rates;
pub mod rational;
pub mod reference;
pub mod run;
pub mod sampling;
pub mod strategy;
pub mod trace;
pub mod verify;

pub use engine::{new_game, step, GameVariant, GardenState, StepRecord};
pub use error::{Error, Result};
pub use rates::{RateVector, Scale};
pub use rational::{int, rat, Rational};
pub use run::{run, run_with};
pub use strategy::{GardenView, Strategy, StrategyRef};
pub use trace::{backlog, BacklogReport, Trace};
