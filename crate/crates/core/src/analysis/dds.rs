//! Audit of the deadline-driven strategy as a scheduler of requests.
//!
//! A cup issues a request when it reaches height 1. The request's deadline
//! is the step at which the cup would reach 2, and it is served by a cut
//! that brings the cup back below 1. A correct run never lets a cup reach 2,
//! never idles while a request is open, and always serves an earliest deadline.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{Violation, ViolationKind, ViolationLog};
use crate::rational::{self, ceil_div, int, Rational};
use crate::trace::Trace;

/// A cut of a requesting cup while it was still below 2.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Completion {
    pub step: u64,
    pub index: usize,
    pub deadline: i64,
    #[serde(with = "rational::serde_str")]
    pub height: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverflowEvent {
    pub step: u64,
    pub index: usize,
    #[serde(with = "rational::serde_str")]
    pub height: Rational,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DdsAudit {
    /// Cups with a request still open at the end of the trace.
    pub open_requests: Vec<usize>,
    /// Deadline of each cup's open request at the end of the trace.
    pub deadlines: Vec<Option<i64>>,
    pub requests: u64,
    pub completions: Vec<Completion>,
    /// First [`ViolationLog::CAPACITY`] overflows; all are counted in `violations`.
    pub overflows: Vec<OverflowEvent>,
    pub violations: ViolationLog,
}

pub fn audit_dds(trace: &Trace) -> DdsAudit {
    let scale = trace.scale();
    let one = scale.denom();
    let two = 2 * one;
    let rates = scale.rates();
    let n = rates.len();
    let mut audit = DdsAudit {
        deadlines: vec![None; n],
        ..DdsAudit::default()
    };
    let mut open: BTreeSet<(i64, usize)> = BTreeSet::new();
    let deadline_at = |step: u64, h: i128, r: i128| -> i64 {
        let wait = i64::try_from(ceil_div(two - h, r)).unwrap_or(i64::MAX / 2);
        step as i64 + wait
    };

    let mut cursor = trace.cursor();
    while let Some(view) = cursor.advance() {
        let step = view.step;
        for (i, &h) in view.intermediate.iter().enumerate() {
            if h >= two {
                let height = scale.to_rational(h);
                if audit.overflows.len() < ViolationLog::CAPACITY {
                    audit.overflows.push(OverflowEvent {
                        step,
                        index: i,
                        height: height.clone(),
                    });
                }
                audit.violations.push(Violation {
                    step,
                    index: i,
                    kind: ViolationKind::Overflow,
                    lhs: height,
                    rhs: int(2),
                    related: None,
                });
            }
            if h >= one && audit.deadlines[i].is_none() {
                let d = deadline_at(step, h, rates[i]);
                audit.deadlines[i] = Some(d);
                open.insert((d, i));
                audit.requests += 1;
            }
        }

        match view.cut {
            None => {
                if let Some(&(_, i)) = open.first() {
                    audit.violations.push(Violation {
                        step,
                        index: i,
                        kind: ViolationKind::IdleWithRequest,
                        lhs: scale.to_rational(view.intermediate[i]),
                        rhs: int(1),
                        related: None,
                    });
                }
            }
            Some(j) => {
                let h = view.intermediate[j];
                match audit.deadlines[j] {
                    None => audit.violations.push(Violation {
                        step,
                        index: j,
                        kind: ViolationKind::CutBelowRequest,
                        lhs: scale.to_rational(h),
                        rhs: int(1),
                        related: None,
                    }),
                    Some(dj) => {
                        let &(earliest, k) = open.first().expect("cup j has an open request");
                        if dj > earliest {
                            audit.violations.push(Violation {
                                step,
                                index: j,
                                kind: ViolationKind::NotEarliestDeadline,
                                lhs: int(dj),
                                rhs: int(earliest),
                                related: Some(k),
                            });
                        }
                        if h < two {
                            audit.completions.push(Completion {
                                step,
                                index: j,
                                deadline: dj,
                                height: scale.to_rational(h),
                            });
                        }
                        let post = view.post[j];
                        open.remove(&(dj, j));
                        audit.deadlines[j] = None;
                        if post >= one {
                            // Still requesting; the deadline moves with the new height.
                            let d = deadline_at(step, post, rates[j]);
                            audit.deadlines[j] = Some(d);
                            open.insert((d, j));
                        }
                    }
                }
            }
        }
    }
    audit.open_requests = open.iter().map(|&(_, i)| i).collect();
    audit.open_requests.sort_unstable();
    audit
}
