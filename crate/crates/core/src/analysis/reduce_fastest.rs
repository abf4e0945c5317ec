//! Audit of Reduce-Fastest(x) through waiting windows.
//!
//! A window opens when a bamboo `i` first reaches the threshold `x` and
//! closes when `i` is cut. Every cut in between goes to a faster bamboo `j`,
//! and `j` can only be cut `m` times there if `r_j >= m * r_i`. In the flush
//! game a bamboo also needs to regrow to `x` between its cuts.

use serde::{Deserialize, Serialize};

use super::{Violation, ViolationKind, ViolationLog};
use crate::engine::GameVariant;
use crate::rational::{int, Rational};
use crate::trace::Trace;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutWindow {
    /// The bamboo waiting above the threshold.
    pub watched: usize,
    pub opened_at: u64,
    /// Step of the cut of `watched`; `None` if the trace ended first.
    pub closed_at: Option<u64>,
    /// Cuts made strictly inside the window.
    pub cuts: u64,
    /// Distinct bamboo cut inside the window.
    pub distinct: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RfAudit {
    pub windows_audited: u64,
    /// Largest number of cuts of a single bamboo inside one window.
    pub max_cuts_in_window: u64,
    pub windows: Vec<CutWindow>,
    pub violations: ViolationLog,
}

struct Open {
    opened_at: u64,
    exceeded: bool,
}

pub fn audit_reduce_fastest(trace: &Trace, x: &Rational) -> RfAudit {
    let scale = trace.scale();
    let rates = scale.rates();
    let n = rates.len();
    let d = scale.denom();
    let threshold = scale.threshold(x);
    let ceiling = threshold.saturating_add(d);
    let flush = trace.variant() == GameVariant::Flush;

    let mut audit = RfAudit::default();
    let mut open: Vec<Option<Open>> = (0..n).map(|_| None).collect();
    let mut last_cut = vec![0u64; n];
    // log[s - 1] is the cut made at step s.
    let mut log: Vec<Option<usize>> = Vec::with_capacity(trace.len());
    let mut counts = vec![0u64; n];
    let mut touched: Vec<usize> = Vec::new();

    let mut close = |audit: &mut RfAudit, i: usize, opened_at: u64, closed_at: Option<u64>, log: &[Option<usize>]| {
        let end = closed_at.map_or(log.len() as u64, |c| c - 1);
        let mut cuts = 0;
        for &j in log[opened_at as usize - 1..end as usize].iter().flatten() {
            if counts[j] == 0 {
                touched.push(j);
            }
            counts[j] += 1;
            cuts += 1;
        }
        let at = closed_at.unwrap_or(log.len() as u64);
        for &j in &touched {
            let m = counts[j];
            audit.max_cuts_in_window = audit.max_cuts_in_window.max(m);
            if rates[j] < i128::from(m as i64) * rates[i] {
                audit.violations.push(Violation {
                    step: at,
                    index: j,
                    kind: ViolationKind::FillRateBudget,
                    lhs: int(m as i64) * trace.rates().rate(i),
                    rhs: trace.rates().rate(j).clone(),
                    related: Some(i),
                });
            }
            counts[j] = 0;
        }
        audit.windows.push(CutWindow {
            watched: i,
            opened_at,
            closed_at,
            cuts,
            distinct: touched.len(),
        });
        audit.windows_audited += 1;
        touched.clear();
    };

    let mut cursor = trace.cursor();
    while let Some(view) = cursor.advance() {
        let step = view.step;
        log.push(view.cut);
        for (i, &h) in view.intermediate.iter().enumerate() {
            if h < threshold {
                continue;
            }
            let w = open[i].get_or_insert(Open {
                opened_at: step,
                exceeded: false,
            });
            if h >= ceiling && !w.exceeded {
                w.exceeded = true;
                audit.violations.push(Violation {
                    step,
                    index: i,
                    kind: ViolationKind::ThresholdExceeded,
                    lhs: scale.to_rational(h),
                    rhs: scale.to_rational(ceiling),
                    related: None,
                });
            }
        }
        if let Some(j) = view.cut {
            if flush && i128::from((step - last_cut[j]) as i64) * rates[j] < threshold {
                audit.violations.push(Violation {
                    step,
                    index: j,
                    kind: ViolationKind::Regrowth,
                    lhs: int((step - last_cut[j]) as i64) * trace.rates().rate(j),
                    rhs: x.clone(),
                    related: None,
                });
            }
            last_cut[j] = step;
            if let Some(w) = open[j].take() {
                close(&mut audit, j, w.opened_at, Some(step), &log);
            }
        }
    }
    for (i, w) in open.into_iter().enumerate() {
        if let Some(w) = w {
            close(&mut audit, i, w.opened_at, None, &log);
        }
    }
    audit
}
