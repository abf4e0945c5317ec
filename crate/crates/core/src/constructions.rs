//! Adversarial rate vectors with known lower bounds on the backlog.
//!
//! Each [`Construction`] carries the backlog its strategy is forced to reach
//! and a horizon long enough for that to happen.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::rates::RateVector;
use crate::rational::{self, int, rat, Rational};
use crate::strategy::StrategyRef;

#[derive(Clone, Debug)]
pub struct Construction {
    pub name: String,
    pub rates: RateVector,
    pub predicted_backlog_lower_bound: Rational,
    pub critical_horizon: u64,
    /// Strategy the bound is proved against; `None` means every strategy.
    pub target: Option<StrategyRef>,
}

/// Two bamboo with rates `1 - eps` and `eps`; no strategy stays below `2 - 2 eps`.
pub fn two_bamboo(eps: &Rational) -> Result<Construction> {
    if !eps.is_positive() || *eps >= rat(1, 2) {
        return Err(out_of_domain("eps", "0 < eps < 1/2", eps));
    }
    let rates = RateVector::new(vec![Rational::one() - eps, eps.clone()])?;
    let horizon = rational::ceil(&(int(2) / eps));
    Ok(Construction {
        name: format!("two-bamboo:{}", rational::format_rational(eps)),
        rates,
        predicted_backlog_lower_bound: int(2) - int(2) * eps,
        critical_horizon: to_u64(horizon),
        target: None,
    })
}

/// `n` bamboo of rate `1/n`; Reduce-Fastest(x) lets the last one reach `x + (n-1)/n`.
pub fn uniform(n: u64, x: &Rational) -> Result<Construction> {
    if n < 1 {
        return Err(out_of_domain("n", "n >= 1", &n));
    }
    if !x.is_positive() {
        return Err(out_of_domain("x", "x > 0", x));
    }
    let n_i = n as i64;
    let rates = RateVector::new(vec![rat(1, n_i); n as usize])?;
    let horizon = rational::ceil(&(x * int(n_i))) + BigInt::from(n);
    Ok(Construction {
        name: format!("uniform:{n}:{}", rational::format_rational(x)),
        rates,
        predicted_backlog_lower_bound: x + rat(n_i - 1, n_i),
        critical_horizon: to_u64(horizon),
        target: Some(StrategyRef::ReduceFastest(x.clone())),
    })
}

/// `f` fast bamboo and `sqrt(f) + 1` slow ones that push Reduce-Fastest(1)
/// towards backlog 3. `f` must be a perfect square of at least 4.
///
/// The bound is only realized within `critical_horizon` for large `f`; for
/// small `f` the slow bamboo are not yet tall when the fast ones finish their
/// first round.
pub fn rf1_fast_slow(f: u64) -> Result<Construction> {
    let root = f.isqrt();
    if f < 4 || root * root != f {
        return Err(out_of_domain("f", "a perfect square >= 4", &f));
    }
    let (f_i, s) = (f as i64, root as i64);
    let fast = rat(1, f_i + s);
    let slow = rat(1, f_i + 2 * s + 2);
    let mut rates = vec![fast; f as usize];
    rates.extend(std::iter::repeat_n(slow, (s + 1) as usize));
    Ok(Construction {
        name: format!("rf1-fast-slow:{f}"),
        rates: RateVector::new(rates)?,
        predicted_backlog_lower_bound: rat(3 * f_i + 2 * s, f_i + 2 * s + 2),
        critical_horizon: 3 * f + 2 * root + 1,
        target: Some(StrategyRef::ReduceFastest(int(1))),
    })
}

/// 900 bamboo of rate 1/1000 and 140 of rate 1/1400: Reduce-Fastest(x) with
/// `1 <= x <= 101/100` reaches `29/14 > 2.01`.
pub fn rf_x_counter() -> Construction {
    let mut rates = vec![rat(1, 1000); 900];
    rates.extend(std::iter::repeat_n(rat(1, 1400), 140));
    Construction {
        name: "rf-x-counter".to_string(),
        rates: RateVector::new(rates).expect("rates sum to exactly 1"),
        predicted_backlog_lower_bound: rat(2900, 1400),
        critical_horizon: 3000,
        target: Some(StrategyRef::ReduceFastest(int(1))),
    }
}

/// Parsed form of the construction grammar.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ConstructionSpec {
    TwoBamboo(Rational),
    Uniform(u64, Rational),
    Rf1FastSlow(u64),
    RfXCounter,
}

impl ConstructionSpec {
    pub fn build(&self) -> Result<Construction> {
        match self {
            ConstructionSpec::TwoBamboo(eps) => two_bamboo(eps),
            ConstructionSpec::Uniform(n, x) => uniform(*n, x),
            ConstructionSpec::Rf1FastSlow(f) => rf1_fast_slow(*f),
            ConstructionSpec::RfXCounter => Ok(rf_x_counter()),
        }
    }
}

impl FromStr for ConstructionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = |why: &str| Error::parse("construction", s, why);
        let mut parts = s.split(':');
        let head = parts.next().unwrap_or_default();
        let args: Vec<&str> = parts.collect();
        let int_arg = |a: &str| a.trim().parse::<u64>().map_err(|e| bad(&e.to_string()));
        match (head, args.as_slice()) {
            ("two-bamboo", [eps]) => Ok(ConstructionSpec::TwoBamboo(rational::parse_rational(eps)?)),
            ("uniform", [n, x]) => Ok(ConstructionSpec::Uniform(
                int_arg(n)?,
                rational::parse_rational(x)?,
            )),
            ("rf1-fast-slow", [f]) => Ok(ConstructionSpec::Rf1FastSlow(int_arg(f)?)),
            ("rf-x-counter", []) => Ok(ConstructionSpec::RfXCounter),
            _ => Err(bad(
                "expected two-bamboo:<eps>, uniform:<n>:<x>, rf1-fast-slow:<f> or rf-x-counter",
            )),
        }
    }
}

impl fmt::Display for ConstructionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstructionSpec::TwoBamboo(eps) => {
                write!(f, "two-bamboo:{}", rational::format_rational(eps))
            }
            ConstructionSpec::Uniform(n, x) => {
                write!(f, "uniform:{n}:{}", rational::format_rational(x))
            }
            ConstructionSpec::Rf1FastSlow(k) => write!(f, "rf1-fast-slow:{k}"),
            ConstructionSpec::RfXCounter => f.write_str("rf-x-counter"),
        }
    }
}

fn out_of_domain(what: &'static str, constraint: &'static str, value: &dyn fmt::Display) -> Error {
    Error::OutOfDomain {
        what,
        constraint,
        value: value.to_string(),
    }
}

fn to_u64(v: BigInt) -> u64 {
    v.to_u64().unwrap_or(u64::MAX)
}
