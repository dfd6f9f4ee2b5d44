//! Thin helpers around `BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn int(v: i64) -> Rational {
    BigRational::from_integer(BigInt::from(v))
}

pub fn frac(num: i64, den: i64) -> Rational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn pow2(k: u32) -> Rational {
    BigRational::from_integer(BigInt::from(2u8).pow(k))
}

pub fn to_f64(r: &Rational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn zero() -> Rational {
    Rational::zero()
}

pub fn one() -> Rational {
    Rational::one()
}

/// Rational in `{num, den}` wire form. Numerator and denominator are kept as
/// decimal strings when they overflow `i64`, otherwise as plain integers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RationalRecord {
    pub num: serde_json::Value,
    pub den: serde_json::Value,
}

fn bigint_value(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(x) => serde_json::Value::from(x),
        None => serde_json::Value::String(v.to_string()),
    }
}

fn value_bigint(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Error::Parse(format!("non-integer rational component {n}"))),
        serde_json::Value::String(s) => s
            .parse::<BigInt>()
            .map_err(|e| Error::Parse(format!("bad integer {s:?}: {e}"))),
        other => Err(Error::Parse(format!("bad rational component {other}"))),
    }
}

impl From<&Rational> for RationalRecord {
    fn from(r: &Rational) -> Self {
        RationalRecord {
            num: bigint_value(r.numer()),
            den: bigint_value(r.denom()),
        }
    }
}

impl TryFrom<&RationalRecord> for Rational {
    type Error = Error;

    fn try_from(rec: &RationalRecord) -> Result<Rational> {
        let num = value_bigint(&rec.num)?;
        let den = value_bigint(&rec.den)?;
        if den.is_zero() {
            return Err(Error::Parse("zero denominator".into()));
        }
        Ok(BigRational::new(num, den))
    }
}

/// Parses "p/q", "p" or a decimal like "0.25" into an exact rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    if let Some((p, q)) = s.split_once('/') {
        let p: BigInt = p.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        let q: BigInt = q.trim().parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
        if q.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((whole, fracpart)) = s.split_once('.') {
        if fracpart.is_empty() || !fracpart.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse(format!("bad decimal {s:?}")));
        }
        let digits = format!("{whole}{fracpart}");
        let num: BigInt = digits.parse().map_err(|_| Error::Parse(format!("bad decimal {s:?}")))?;
        let den = BigInt::from(10u8).pow(fracpart.len() as u32);
        return Ok(BigRational::new(num, den));
    }
    let p: BigInt = s.parse().map_err(|_| Error::Parse(format!("bad rational {s:?}")))?;
    Ok(BigRational::from_integer(p))
}

/// Canonical "p/q" text (or "p" for integers).
pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("1/2").unwrap(), frac(1, 2));
        assert_eq!(parse_rational("0.25").unwrap(), frac(1, 4));
        assert_eq!(parse_rational("3").unwrap(), int(3));
        assert_eq!(parse_rational("-2/4").unwrap(), frac(-1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn record_round_trip_big() {
        let r = BigRational::new(BigInt::from(1), BigInt::from(2u8).pow(80u32));
        let rec = RationalRecord::from(&r);
        assert!(rec.den.is_string());
        assert_eq!(Rational::try_from(&rec).unwrap(), r);
    }
}
