//! Audits of traces against the backlog bounds each strategy guarantees.
//!
//! Checkers never fail on a violated bound; they return the violations as
//! data so callers can report counterexamples.

mod dds;
mod potential;
mod reduce_fastest;

use serde::{Deserialize, Serialize};

pub use dds::{audit_dds, Completion, DdsAudit, OverflowEvent};
pub use potential::{
    check_reduce_max_invariant, ledgers, potential, volume, PotentialLedger,
};
pub use reduce_fastest::{audit_reduce_fastest, CutWindow, RfAudit};

use crate::error::{Error, Result};
use crate::rational::{self, int, rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationKind {
    /// Post-cut height above `4 - potential`.
    PotentialBound,
    /// Intermediate height at or above `4 - h_1`.
    IntermediateBound,
    /// Volume failed to drop by a unit after a cut of a bamboo at height 2 or more.
    VolumeDrop,
    /// Intermediate height reached 2.
    Overflow,
    CutBelowRequest,
    NotEarliestDeadline,
    IdleWithRequest,
    /// A bamboo cut `m` times while another waited above the threshold is slower than `m` times it.
    FillRateBudget,
    /// A bamboo regrew less than the threshold between consecutive cuts.
    Regrowth,
    /// Intermediate height reached `x + 1`.
    ThresholdExceeded,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub step: u64,
    pub index: usize,
    pub kind: ViolationKind,
    #[serde(with = "rational::serde_str")]
    pub lhs: Rational,
    #[serde(with = "rational::serde_str")]
    pub rhs: Rational,
    /// Second bamboo involved, for window checks the one that was waiting.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub related: Option<usize>,
}

/// Violations found by a checker; only the first [`ViolationLog::CAPACITY`] are kept.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationLog {
    pub total: u64,
    pub recorded: Vec<Violation>,
}

impl ViolationLog {
    pub const CAPACITY: usize = 1000;

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn push(&mut self, v: Violation) {
        self.total += 1;
        if self.recorded.len() < Self::CAPACITY {
            self.recorded.push(v);
        }
    }

    pub fn count(&self, kind: ViolationKind) -> usize {
        self.recorded.iter().filter(|v| v.kind == kind).count()
    }

    pub fn merge(&mut self, other: ViolationLog) {
        self.total += other.total;
        let room = Self::CAPACITY.saturating_sub(self.recorded.len());
        self.recorded.extend(other.recorded.into_iter().take(room));
    }
}

/// Earlier published upper bound for Reduce-Fastest(x), kept as a comparison column:
/// `max(x + x^2 / (4(x - 1)), 1/2 + x + x^2 / (4(x - 1/2)))` for `x > 1`.
pub fn bilo_reference_bound(x: &Rational) -> Result<Rational> {
    if *x <= int(1) {
        return Err(Error::OutOfDomain {
            what: "x",
            constraint: "x > 1",
            value: rational::format_rational(x),
        });
    }
    let sq = x * x;
    let first = x + &sq / (int(4) * (x - int(1)));
    let second = rat(1, 2) + x + &sq / (int(4) * (x - rat(1, 2)));
    Ok(first.max(second))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_bound_at_two() {
        let b = bilo_reference_bound(&int(2)).unwrap();
        assert_eq!(b, rat(19, 6));
        assert!(b >= rat(5, 4) * int(2));
        assert!(bilo_reference_bound(&int(1)).is_err());
        assert!(bilo_reference_bound(&rat(1, 2)).is_err());
    }

    #[test]
    fn reference_bound_is_at_least_five_quarters_x() {
        for (p, q) in [(101, 100), (3, 2), (2, 1), (5, 2), (7, 1), (100, 1)] {
            let x = rat(p, q);
            assert!(bilo_reference_bound(&x).unwrap() >= rat(5, 4) * &x, "x = {p}/{q}");
        }
    }

    #[test]
    fn violation_json_shape() {
        let v = Violation {
            step: 4,
            index: 1,
            kind: ViolationKind::PotentialBound,
            lhs: rat(7, 2),
            rhs: rat(13, 4),
            related: None,
        };
        assert_eq!(
            serde_json::to_string(&v).unwrap(),
            r#"{"step":4,"index":1,"kind":"potential_bound","lhs":"7/2","rhs":"13/4"}"#
        );
    }

    #[test]
    fn log_caps_recorded_entries() {
        let mut log = ViolationLog::default();
        let v = Violation {
            step: 1,
            index: 0,
            kind: ViolationKind::Overflow,
            lhs: int(2),
            rhs: int(2),
            related: None,
        };
        for _ in 0..ViolationLog::CAPACITY + 5 {
            log.push(v.clone());
        }
        assert_eq!(log.total, ViolationLog::CAPACITY as u64 + 5);
        assert_eq!(log.recorded.len(), ViolationLog::CAPACITY);
    }
}
