//! Exact rational helpers shared by every module.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use std::str::FromStr;

pub type Q = BigRational;

pub fn q(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

pub fn qf(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Q {
    Q::zero()
}

pub fn one() -> Q {
    Q::one()
}

/// Canonical text form: `p` for integers, `p/q` otherwise.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    let v = Q::from_str(s).ok()?;
    if v.denom().is_zero() {
        return None;
    }
    Some(v)
}

pub fn is_pos(x: &Q) -> bool {
    x.is_positive()
}

pub fn min_q<'a>(xs: impl IntoIterator<Item = &'a Q>) -> Option<Q> {
    xs.into_iter().min().cloned()
}

/// Serde adapters that write rationals as canonical strings.
pub mod serde_q {
    use super::*;
    use serde::de::Error as _;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Q, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_q(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Q, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        value_to_q(&v).ok_or_else(|| D::Error::custom(format!("not a rational: {v}")))
    }

    pub fn value_to_q(v: &serde_json::Value) -> Option<Q> {
        match v {
            serde_json::Value::String(s) => parse_q(s),
            serde_json::Value::Number(n) => n.as_i64().map(q),
            _ => None,
        }
    }

    pub mod vec {
        use super::*;
        use serde::ser::SerializeSeq;

        pub fn serialize<S: Serializer>(xs: &[Q], s: S) -> Result<S::Ok, S::Error> {
            let mut seq = s.serialize_seq(Some(xs.len()))?;
            for x in xs {
                seq.serialize_element(&fmt_q(x))?;
            }
            seq.end()
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Q>, D::Error> {
            let vs = Vec::<serde_json::Value>::deserialize(d)?;
            vs.iter()
                .map(|v| {
                    value_to_q(v).ok_or_else(|| D::Error::custom(format!("not a rational: {v}")))
                })
                .collect()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        for x in [q(0), q(-3), qf(1, 2), qf(-7, 3), qf(6, 4)] {
            assert_eq!(parse_q(&fmt_q(&x)), Some(x));
        }
        assert_eq!(fmt_q(&qf(6, 4)), "3/2");
        assert_eq!(parse_q("1/0"), None);
        assert_eq!(parse_q("abc"), None);
    }
}
