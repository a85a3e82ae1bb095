//! Exact rational helpers. Rationals travel as `"p/q"` strings in lowest
//! terms with a positive denominator.

use crate::error::{Error, Result};
use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rat = BigRational;

pub fn int(v: i64) -> Rat {
    Rat::from_integer(BigInt::from(v))
}

pub fn frac(p: i64, q: i64) -> Rat {
    Rat::new(BigInt::from(p), BigInt::from(q))
}

pub fn zero() -> Rat {
    Rat::zero()
}

pub fn one() -> Rat {
    Rat::one()
}

/// `p/q` with `q > 0` and `gcd(p, q) = 1`; integers keep the `/1`.
pub fn to_string(r: &Rat) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn parse(s: &str) -> Result<Rat> {
    let s = s.trim();
    let bad = || Error::parse(0, format!("bad rational {s:?}"));
    let (p, q) = match s.split_once('/') {
        Some((p, q)) => (p.trim(), q.trim()),
        None => (s, "1"),
    };
    let p: BigInt = p.parse().map_err(|_| bad())?;
    let q: BigInt = q.parse().map_err(|_| bad())?;
    if q.is_zero() || q.is_negative() {
        return Err(bad());
    }
    Ok(Rat::new(p, q))
}

/// Least common multiple of the denominators of `values`.
pub fn common_denominator<'a>(values: impl IntoIterator<Item = &'a Rat>) -> BigInt {
    let mut acc = BigInt::one();
    for v in values {
        let d = v.denom();
        let g = num::integer::gcd(acc.clone(), d.clone());
        acc = acc * d / g;
    }
    acc
}

pub mod serde_rat {
    use super::Rat;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&super::to_string(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        super::parse(&s).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_lowest_terms() {
        assert_eq!(to_string(&frac(6, -4)), "-3/2");
        assert_eq!(to_string(&int(3)), "3/1");
        assert_eq!(parse("10/4").unwrap(), frac(5, 2));
        assert_eq!(parse("7").unwrap(), int(7));
        assert!(parse("1/0").is_err());
        assert!(parse("1/-2").is_err());
    }

    #[test]
    fn lcm_of_denominators() {
        let xs = [frac(1, 4), frac(1, 6), int(2)];
        assert_eq!(common_denominator(xs.iter()), BigInt::from(12));
    }
}
