//! Volume and potential functions behind the Reduce-Max bound.
//!
//! For the first `i` bamboo (fastest first), the volume is the sum of their
//! heights with each capped at 2. The potential spreads that volume greedily
//! over the fastest rates in chunks of at most 2 and sums rate times weight,
//! so it lies in `[0, 2]` whenever rates sum to at most 1.
//!
//! Under Reduce-Max every post-cut height satisfies `h_i <= 4 - potential(i)`,
//! and every intermediate height stays below `4 - h_1`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{Violation, ViolationKind, ViolationLog};
use crate::error::{Error, Result};
use crate::rates::RateVector;
use crate::rational::{self, int, Rational};
use crate::trace::Trace;

/// Sum of the first `count` heights, each capped at 2.
pub fn volume(count: usize, heights: &[Rational]) -> Result<Rational> {
    if count == 0 || count > heights.len() {
        return Err(Error::PrefixOutOfRange {
            count,
            len: heights.len(),
        });
    }
    let two = int(2);
    Ok(heights[..count]
        .iter()
        .map(|h| if *h < two { h.clone() } else { two.clone() })
        .sum())
}

/// Greedy rate-weighted distribution of `volume(count, heights)`.
pub fn potential(count: usize, heights: &[Rational], rates: &RateVector) -> Result<Rational> {
    if heights.len() != rates.len() {
        return Err(Error::MalformedTrace(format!(
            "{} heights for {} rates",
            heights.len(),
            rates.len()
        )));
    }
    let v = volume(count, heights)?;
    let mut phi = Rational::zero();
    for k in 0..count {
        let offset = int(2 * k as i64);
        if offset >= v {
            break;
        }
        let weight = (&v - offset).min(int(2));
        phi += rates.rate(k) * weight;
    }
    Ok(phi)
}

/// Volumes and potentials of every prefix at one instant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PotentialLedger {
    pub step: u64,
    /// `volume[i]` covers the first `i + 1` bamboo.
    #[serde(with = "rational::serde_str_vec")]
    pub volume: Vec<Rational>,
    #[serde(with = "rational::serde_str_vec")]
    pub potential: Vec<Rational>,
}

impl PotentialLedger {
    pub fn compute(step: u64, heights: &[Rational], rates: &RateVector) -> Result<Self> {
        let n = heights.len();
        let volume = (1..=n).map(|c| volume(c, heights)).collect::<Result<_>>()?;
        let potential = (1..=n)
            .map(|c| potential(c, heights, rates))
            .collect::<Result<_>>()?;
        Ok(PotentialLedger {
            step,
            volume,
            potential,
        })
    }
}

/// Ledger of the post-cut heights at time 0 and after every step.
///
/// Exact and quadratic per step; meant for short traces.
pub fn ledgers(trace: &Trace) -> Result<Vec<PotentialLedger>> {
    let rates = trace.rates();
    let zeros = vec![Rational::zero(); rates.len()];
    let mut out = vec![PotentialLedger::compute(0, &zeros, rates)?];
    for rec in trace.records() {
        out.push(PotentialLedger::compute(rec.step, &rec.post_heights, rates)?);
    }
    Ok(out)
}

/// Prefix volumes of scaled heights: `out[c]` covers the first `c` bamboo.
fn prefix_volumes(heights: &[i128], two: i128, out: &mut [i128]) {
    out[0] = 0;
    for (c, &h) in heights.iter().enumerate() {
        out[c + 1] = out[c] + h.min(two);
    }
}

/// Potential of the first `count` bamboo, as a numerator over `denom^2`.
fn scaled_potential(count: usize, vol: i128, two: i128, rate_prefix: &[i128], rates: &[i128]) -> i128 {
    let full = usize::try_from(vol / two).unwrap_or(usize::MAX).min(count);
    let mut phi = two * rate_prefix[full];
    if full < count {
        phi += rates[full] * (vol - two * full as i128);
    }
    phi
}

/// Check every Reduce-Max bound along the trace.
///
/// At each step this tests, for every prefix `i`, the post-cut bound
/// `h_i <= 4 - potential(i)`, that every intermediate height is below
/// `4 - h_1`, and, when the cut bamboo `j` stood at 2 or more, that the
/// volume of each prefix `i` dropped by a unit: from its own previous volume
/// when `j < i`, from the previous volume of prefix `j` when `j > i`.
pub fn check_reduce_max_invariant(trace: &Trace) -> ViolationLog {
    let scale = trace.scale();
    let d = scale.denom();
    let rates = scale.rates();
    let n = rates.len();
    let two = 2 * d;
    let four_sq = 4 * d * d;
    let inter_limit = 4 * d - rates[0];
    let mut rate_prefix = vec![0i128; n + 1];
    for k in 0..n {
        rate_prefix[k + 1] = rate_prefix[k] + rates[k];
    }
    let sq = BigInt::from(d) * BigInt::from(d);
    let over_sq = |v: i128| Rational::new(BigInt::from(v), sq.clone());

    let mut log = ViolationLog::default();
    let mut prev = vec![0i128; n + 1];
    let mut cur = vec![0i128; n + 1];
    let mut cursor = trace.cursor();
    while let Some(view) = cursor.advance() {
        for (i, &h) in view.intermediate.iter().enumerate() {
            if h >= inter_limit {
                log.push(Violation {
                    step: view.step,
                    index: i,
                    kind: ViolationKind::IntermediateBound,
                    lhs: scale.to_rational(h),
                    rhs: scale.to_rational(inter_limit),
                    related: None,
                });
            }
        }

        prefix_volumes(view.post, two, &mut cur);
        for c in 1..=n {
            let phi = scaled_potential(c, cur[c], two, &rate_prefix, rates);
            let lhs = view.post[c - 1] * d;
            let rhs = four_sq - phi;
            if lhs > rhs {
                log.push(Violation {
                    step: view.step,
                    index: c - 1,
                    kind: ViolationKind::PotentialBound,
                    lhs: scale.to_rational(view.post[c - 1]),
                    rhs: over_sq(rhs),
                    related: None,
                });
            }
        }

        if let Some(j) = view.cut.filter(|&j| view.intermediate[j] >= two) {
            for i in (0..n).filter(|&i| i != j) {
                let base = if j < i { prev[i + 1] } else { prev[j + 1] };
                let bound = base - d;
                if cur[i + 1] > bound {
                    log.push(Violation {
                        step: view.step,
                        index: i,
                        kind: ViolationKind::VolumeDrop,
                        lhs: scale.to_rational(cur[i + 1]),
                        rhs: scale.to_rational(bound),
                        related: Some(j),
                    });
                }
            }
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    log
}
