//! Exact rationals and their `"p/q"` text form.
//!
//! Every height, rate, and threshold in the crate is a [`Rational`]. On the
//! wire they are always written as `"p/q"` with `q > 0` in lowest terms, so
//! integers appear as `"2/1"`. Parsing is more lenient and also accepts bare
//! integers and finite decimals (`"0.01"` parses to exactly `1/100`).

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

/// Shorthand for building small constants.
pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

pub fn format_rational(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

pub fn parse_rational(input: &str) -> Result<Rational> {
    let s = input.trim();
    if s.is_empty() {
        return Err(Error::parse("rational", input, "empty string"));
    }
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p
            .trim()
            .parse()
            .map_err(|e| Error::parse("rational", input, e))?;
        let q: BigInt = q
            .trim()
            .parse()
            .map_err(|e| Error::parse("rational", input, e))?;
        if q.is_zero() {
            return Err(Error::parse("rational", input, "zero denominator"));
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        let negative = whole.trim_start().starts_with('-');
        let digits = frac.len() as u32;
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::parse("rational", input, "bad fractional part"));
        }
        let whole: BigInt = match whole {
            "" | "-" | "+" => BigInt::zero(),
            w => w.parse().map_err(|e| Error::parse("rational", input, e))?,
        };
        let frac: BigInt = frac.parse().map_err(|e| Error::parse("rational", input, e))?;
        let scale = BigInt::from(10u32).pow(digits);
        let magnitude = whole.abs() * &scale + frac;
        let numer = if negative { -magnitude } else { magnitude };
        return Ok(Rational::new(numer, scale));
    }
    let n: BigInt = s.parse().map_err(|e| Error::parse("rational", input, e))?;
    Ok(Rational::from_integer(n))
}

/// Approximate decimal value, for human-facing columns only.
pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

pub fn ceil(value: &Rational) -> BigInt {
    value.ceil().to_integer()
}

/// Rebuild an exact rational from an integer numerator over a common scale.
pub fn from_scaled(numer: i128, scale: i128) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(scale))
}

/// `ceil(a / b)` for `b > 0`.
pub fn ceil_div(a: i128, b: i128) -> i128 {
    debug_assert!(b > 0);
    // i64 division is several times cheaper than the i128 libcall.
    if let (Ok(a64), Ok(b64)) = (i64::try_from(a), i64::try_from(b)) {
        return a64.div_ceil_signed(b64) as i128;
    }
    let q = a.div_euclid(b);
    if a.rem_euclid(b) == 0 {
        q
    } else {
        q + 1
    }
}

trait DivCeilSigned {
    fn div_ceil_signed(self, rhs: Self) -> Self;
}

impl DivCeilSigned for i64 {
    fn div_ceil_signed(self, rhs: i64) -> i64 {
        let q = self.div_euclid(rhs);
        if self.rem_euclid(rhs) == 0 {
            q
        } else {
            q + 1
        }
    }
}

/// Least common multiple of the denominators; `Err` carries the partial lcm once it exceeds `limit`.
pub fn common_denominator<'a, I>(values: I, limit: &BigInt) -> std::result::Result<BigInt, BigInt>
where
    I: IntoIterator<Item = &'a Rational>,
{
    let mut acc = BigInt::one();
    for v in values {
        acc = acc.lcm(v.denom());
        if &acc > limit {
            return Err(acc);
        }
    }
    Ok(acc)
}

/// `numer / denom` rewritten over `scale`; `scale` must be a multiple of the denominator.
pub fn rescale(value: &Rational, scale: &BigInt) -> Option<i128> {
    let factor = scale / value.denom();
    debug_assert!((&factor * value.denom()) == *scale);
    (value.numer() * factor).to_i128()
}

pub mod serde_str {
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(value: &Rational, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(value))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rational, D::Error> {
        let raw = String::deserialize(d)?;
        parse_rational(&raw).map_err(de::Error::custom)
    }
}

pub mod serde_str_vec {
    use serde::ser::SerializeSeq;
    use serde::{de, Deserialize, Deserializer, Serializer};

    use super::{format_rational, parse_rational, Rational};

    pub fn serialize<S: Serializer>(values: &[Rational], s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(values.len()))?;
        for v in values {
            seq.serialize_element(&format_rational(v))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Rational>, D::Error> {
        let raw = Vec::<String>::deserialize(d)?;
        raw.iter()
            .map(|s| parse_rational(s).map_err(de::Error::custom))
            .collect()
    }
}
