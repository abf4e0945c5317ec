//! Game traces and backlog measurement.
//!
//! A [`Trace`] produced by the engine stores only the cut made at each step;
//! heights are regenerated on demand by replaying the step semantics over
//! integer numerators (see [`Scale`]). This keeps long runs on gardens with
//! tens of thousands of bamboo in memory proportional to the horizon.
//!
//! Traces can also be assembled from explicit [`StepRecord`]s, which need not
//! obey the game rules. The analysis checkers accept both kinds, which is how
//! their violation paths are tested.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::engine::{GameVariant, StepRecord};
use crate::error::{Error, Result};
use crate::rates::{RateVector, Scale};
use crate::rational::{self, Rational};

#[derive(Clone, Debug)]
pub struct Trace {
    rates: RateVector,
    variant: GameVariant,
    scale: Scale,
    body: Body,
}

#[derive(Clone, Debug)]
enum Body {
    Choices(Vec<Option<u32>>),
    Explicit(Vec<ExplicitStep>),
}

#[derive(Clone, Debug)]
struct ExplicitStep {
    intermediate: Vec<i128>,
    cut: Option<usize>,
    post: Vec<i128>,
}

/// Borrowed view of one step, heights as numerators over [`Trace::scale`].
#[derive(Clone, Copy, Debug)]
pub struct StepView<'a> {
    pub step: u64,
    pub intermediate: &'a [i128],
    pub cut: Option<usize>,
    pub post: &'a [i128],
}

impl Trace {
    pub(crate) fn from_parts(
        rates: RateVector,
        variant: GameVariant,
        scale: Scale,
        choices: Vec<Option<u32>>,
    ) -> Self {
        Trace {
            rates,
            variant,
            scale,
            body: Body::Choices(choices),
        }
    }

    /// Trace of the game in which the given cuts are made in order.
    pub fn from_choices(
        rates: RateVector,
        variant: GameVariant,
        choices: &[Option<usize>],
    ) -> Result<Self> {
        let len = rates.len();
        let scale = rates.scale()?;
        let choices = choices
            .iter()
            .map(|c| match *c {
                Some(index) if index >= len => Err(Error::IndexOutOfRange { index, len }),
                Some(index) => Ok(Some(index as u32)),
                None => Ok(None),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self::from_parts(rates, variant, scale, choices))
    }

    /// Trace holding the given records verbatim.
    ///
    /// Only the shape is validated (contiguous steps from 1, matching lengths,
    /// cut indices in range), not the game rules.
    pub fn from_records(
        rates: RateVector,
        variant: GameVariant,
        records: &[StepRecord],
    ) -> Result<Self> {
        let n = rates.len();
        for (k, rec) in records.iter().enumerate() {
            if rec.step != k as u64 + 1 {
                return Err(Error::MalformedTrace(format!(
                    "record {k} has step {}, expected {}",
                    rec.step,
                    k + 1
                )));
            }
            if rec.intermediate_heights.len() != n || rec.post_heights.len() != n {
                return Err(Error::MalformedTrace(format!(
                    "step {} does not have {n} heights",
                    rec.step
                )));
            }
            if let Some(index) = rec.cut_index {
                if index >= n {
                    return Err(Error::IndexOutOfRange { index, len: n });
                }
            }
        }
        let heights = records
            .iter()
            .flat_map(|r| r.intermediate_heights.iter().chain(&r.post_heights));
        let scale = Scale::covering(&rates, heights)?;
        let to_nums = |hs: &[Rational]| -> Vec<i128> {
            hs.iter()
                .map(|h| scale.numerator_of(h).expect("scale covers every height"))
                .collect()
        };
        let steps = records
            .iter()
            .map(|r| ExplicitStep {
                intermediate: to_nums(&r.intermediate_heights),
                cut: r.cut_index,
                post: to_nums(&r.post_heights),
            })
            .collect();
        Ok(Trace {
            rates,
            variant,
            scale,
            body: Body::Explicit(steps),
        })
    }

    pub fn len(&self) -> usize {
        match &self.body {
            Body::Choices(c) => c.len(),
            Body::Explicit(s) => s.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn rates(&self) -> &RateVector {
        &self.rates
    }

    pub fn variant(&self) -> GameVariant {
        self.variant
    }

    pub fn scale(&self) -> &Scale {
        &self.scale
    }

    /// Cut made at each step, in order.
    pub fn choices(&self) -> Vec<Option<usize>> {
        match &self.body {
            Body::Choices(c) => c.iter().map(|c| c.map(|i| i as usize)).collect(),
            Body::Explicit(s) => s.iter().map(|s| s.cut).collect(),
        }
    }

    pub fn cursor(&self) -> Cursor<'_> {
        let n = self.rates.len();
        Cursor {
            trace: self,
            pos: 0,
            intermediate: vec![0; n],
            post: vec![0; n],
        }
    }

    /// Materialize every step as exact rationals.
    pub fn records(&self) -> Records<'_> {
        Records {
            cursor: self.cursor(),
        }
    }

    /// One JSON object per line, one line per step.
    pub fn write_jsonl<W: Write>(&self, mut out: W) -> Result<()> {
        for rec in self.records() {
            serde_json::to_writer(&mut out, &rec)?;
            out.write_all(b"\n")
                .map_err(|e| Error::io("<trace output>", e))?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: BufRead>(
        rates: RateVector,
        variant: GameVariant,
        input: R,
    ) -> Result<Self> {
        let mut records = Vec::new();
        for line in input.lines() {
            let line = line.map_err(|e| Error::io("<trace input>", e))?;
            if line.trim().is_empty() {
                continue;
            }
            records.push(serde_json::from_str::<StepRecord>(&line)?);
        }
        Self::from_records(rates, variant, &records)
    }
}

/// Walks a trace step by step without materializing it.
pub struct Cursor<'a> {
    trace: &'a Trace,
    pos: usize,
    intermediate: Vec<i128>,
    post: Vec<i128>,
}

impl<'a> Cursor<'a> {
    pub fn advance(&mut self) -> Option<StepView<'_>> {
        let pos = self.pos;
        match &self.trace.body {
            Body::Choices(choices) => {
                let choice = *choices.get(pos)?;
                let rates = self.trace.scale.rates();
                for ((inter, post), &r) in self.intermediate.iter_mut().zip(&mut self.post).zip(rates) {
                    *inter = *post + r;
                    *post = *inter;
                }
                let cut = choice.map(|c| c as usize);
                if let Some(c) = cut {
                    self.post[c] = self
                        .trace
                        .variant
                        .apply_cut_scaled(self.intermediate[c], self.trace.scale.denom());
                }
                self.pos += 1;
                Some(StepView {
                    step: pos as u64 + 1,
                    intermediate: &self.intermediate,
                    cut,
                    post: &self.post,
                })
            }
            Body::Explicit(steps) => {
                let s = steps.get(pos)?;
                self.pos += 1;
                Some(StepView {
                    step: pos as u64 + 1,
                    intermediate: &s.intermediate,
                    cut: s.cut,
                    post: &s.post,
                })
            }
        }
    }
}

pub struct Records<'a> {
    cursor: Cursor<'a>,
}

impl Iterator for Records<'_> {
    type Item = StepRecord;

    fn next(&mut self) -> Option<StepRecord> {
        let scale = &self.cursor.trace.scale;
        let to_rat = |hs: &[i128]| hs.iter().map(|&h| scale.to_rational(h)).collect();
        let view = self.cursor.advance()?;
        Some(StepRecord {
            step: view.step,
            intermediate_heights: to_rat(view.intermediate),
            cut_index: view.cut,
            post_heights: to_rat(view.post),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BacklogReport {
    /// Tallest intermediate height over the whole trace; this is the backlog.
    #[serde(with = "rational::serde_str")]
    pub max_intermediate: Rational,
    #[serde(with = "rational::serde_str")]
    pub max_post_cut: Rational,
    /// First step attaining `max_intermediate`.
    pub argmax_step: u64,
    /// Lowest fastest-first index attaining it at that step.
    pub argmax_index: usize,
    /// The same bamboo in the caller's original rate order.
    pub argmax_original_index: usize,
    #[serde(with = "rational::serde_str_vec")]
    pub per_bamboo_max: Vec<Rational>,
}

pub fn backlog(trace: &Trace) -> Result<BacklogReport> {
    if trace.is_empty() {
        return Err(Error::EmptyTrace);
    }
    let n = trace.rates().len();
    let mut best = i128::MIN;
    let mut best_post = i128::MIN;
    let (mut argmax_step, mut argmax_index) = (0, 0);
    let mut per_bamboo = vec![i128::MIN; n];
    let mut cursor = trace.cursor();
    while let Some(view) = cursor.advance() {
        for (i, (&h, &p)) in view.intermediate.iter().zip(view.post).enumerate() {
            if h > best {
                best = h;
                argmax_step = view.step;
                argmax_index = i;
            }
            best_post = best_post.max(p);
            if h > per_bamboo[i] {
                per_bamboo[i] = h;
            }
        }
    }
    let scale = trace.scale();
    Ok(BacklogReport {
        max_intermediate: scale.to_rational(best),
        max_post_cut: scale.to_rational(best_post),
        argmax_step,
        argmax_index,
        argmax_original_index: trace.rates().original_index(argmax_index),
        per_bamboo_max: per_bamboo.into_iter().map(|h| scale.to_rational(h)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, rat};

    #[test]
    fn replay_matches_hand_computation() {
        let rv = RateVector::from_ratios(&[(1, 2), (1, 4)]).unwrap();
        let trace =
            Trace::from_choices(rv, GameVariant::Flush, &[None, Some(0), Some(1)]).unwrap();
        let recs: Vec<_> = trace.records().collect();
        assert_eq!(recs[0].intermediate_heights, vec![rat(1, 2), rat(1, 4)]);
        assert_eq!(recs[1].intermediate_heights, vec![int(1), rat(1, 2)]);
        assert_eq!(recs[1].post_heights, vec![int(0), rat(1, 2)]);
        assert_eq!(recs[2].intermediate_heights, vec![rat(1, 2), rat(3, 4)]);
        assert_eq!(recs[2].post_heights, vec![rat(1, 2), int(0)]);
    }

    #[test]
    fn backlog_of_single_idle_step() {
        let rv = RateVector::from_ratios(&[(1, 4)]).unwrap();
        let trace = Trace::from_choices(rv, GameVariant::Flush, &[None]).unwrap();
        let report = backlog(&trace).unwrap();
        assert_eq!(report.max_intermediate, rat(1, 4));
        assert_eq!(report.max_post_cut, rat(1, 4));
        assert_eq!(report.argmax_step, 1);
    }

    #[test]
    fn backlog_reports_original_index() {
        let rv = RateVector::from_ratios(&[(1, 8), (1, 2)]).unwrap();
        let trace = Trace::from_choices(rv, GameVariant::Flush, &[None, None]).unwrap();
        let report = backlog(&trace).unwrap();
        assert_eq!(report.max_intermediate, int(1));
        assert_eq!(report.argmax_index, 0);
        assert_eq!(report.argmax_original_index, 1);
        assert_eq!(report.per_bamboo_max, vec![int(1), rat(1, 4)]);
    }

    #[test]
    fn empty_trace_has_no_backlog() {
        let rv = RateVector::from_ratios(&[(1, 4)]).unwrap();
        let trace = Trace::from_choices(rv, GameVariant::Flush, &[]).unwrap();
        assert!(matches!(backlog(&trace), Err(Error::EmptyTrace)));
    }

    #[test]
    fn explicit_records_are_kept_verbatim() {
        let rv = RateVector::from_ratios(&[(1, 2)]).unwrap();
        let recs = vec![StepRecord {
            step: 1,
            intermediate_heights: vec![rat(7, 3)],
            cut_index: None,
            post_heights: vec![rat(7, 3)],
        }];
        let trace = Trace::from_records(rv.clone(), GameVariant::Flush, &recs).unwrap();
        assert_eq!(trace.scale().denom(), 6);
        assert_eq!(trace.records().collect::<Vec<_>>(), recs);

        let bad = vec![StepRecord { step: 2, ..recs[0].clone() }];
        assert!(Trace::from_records(rv, GameVariant::Flush, &bad).is_err());
    }

    #[test]
    fn jsonl_round_trip() {
        let rv = RateVector::from_ratios(&[(1, 3), (1, 3), (1, 6)]).unwrap();
        let trace = Trace::from_choices(
            rv.clone(),
            GameVariant::UnitRemove,
            &[None, None, Some(0), Some(2)],
        )
        .unwrap();
        let mut buf = Vec::new();
        trace.write_jsonl(&mut buf).unwrap();
        assert_eq!(buf.iter().filter(|&&b| b == b'\n').count(), 4);
        let back = Trace::read_jsonl(rv, GameVariant::UnitRemove, &buf[..]).unwrap();
        assert_eq!(
            back.records().collect::<Vec<_>>(),
            trace.records().collect::<Vec<_>>()
        );
    }
}
