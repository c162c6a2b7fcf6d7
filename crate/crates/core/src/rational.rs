//! Exact rational values and their text forms.
//!
//! Values cross file and CLI boundaries as `"p/q"` strings (integers are also
//! accepted on input). Output always uses the `"p/q"` form, `"3/1"` included.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::de::{self, Visitor};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = num_rational::BigRational;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// `num / den`, reduced. Panics on a zero denominator.
pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn from_biguints(num: BigUint, den: BigUint) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn parse(text: &str) -> Result<Rational> {
    let text = text.trim();
    let bad = || Error::Parse(format!("`{text}` is not a rational of the form p/q"));
    match text.split_once('/') {
        Some((p, q)) => {
            let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
            if q.is_zero() {
                return Err(Error::Parse(format!("`{text}` has a zero denominator")));
            }
            Ok(Rational::new(p, q))
        }
        None => BigInt::from_str(text)
            .map(Rational::from_integer)
            .map_err(|_| bad()),
    }
}

/// Always `p/q`, with `q > 0`.
pub fn format(value: &Rational) -> String {
    format!("{}/{}", value.numer(), value.denom())
}

/// Nearest `f64`; for display and non-exact comparisons only.
pub fn to_f64(value: &Rational) -> f64 {
    let magnitude = ratio_to_f64(
        value.numer().abs().to_biguint().unwrap_or_default(),
        value.denom().to_biguint().unwrap_or_default(),
    );
    if value.is_negative() {
        -magnitude
    } else {
        magnitude
    }
}

/// `num / den` as an `f64` via a 64-bit quotient, accurate for operands of any size.
pub fn ratio_to_f64(num: BigUint, den: BigUint) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = den.bits() as i64 - num.bits() as i64 + 64;
    let (n, d) = if shift >= 0 {
        (num << shift as u64, den)
    } else {
        (num, den << (-shift) as u64)
    };
    let q = n.div_floor(&d).to_f64().unwrap_or(f64::NAN);
    let half = shift / 2;
    q * 2f64.powi(-(half as i32)) * 2f64.powi(-((shift - half) as i32))
}

/// `ceil(q * total)` for non-negative `q`.
pub fn ceil_times(q: &Rational, total: &BigUint) -> BigUint {
    let prod = q * Rational::from_integer(BigInt::from(total.clone()));
    let c = prod.ceil().to_integer();
    c.to_biguint().unwrap_or_default()
}

/// Serde adapter: accepts `"p/q"`, `"p"` or a JSON integer; writes `"p/q"`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Q(pub Rational);

impl fmt::Display for Q {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format(&self.0))
    }
}

impl From<Rational> for Q {
    fn from(value: Rational) -> Self {
        Q(value)
    }
}

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&format(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct QVisitor;
        impl Visitor<'_> for QVisitor {
            type Value = Q;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a rational as \"p/q\" or an integer")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<Q, E> {
                parse(v).map(Q).map_err(E::custom)
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<Q, E> {
                Ok(Q(int(v)))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<Q, E> {
                Ok(Q(Rational::from_integer(BigInt::from(v))))
            }
        }
        deserializer.deserialize_any(QVisitor)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse("4/9").unwrap(), ratio(4, 9));
        assert_eq!(parse(" 8/18 ").unwrap(), ratio(4, 9));
        assert_eq!(parse("-3").unwrap(), int(-3));
        assert_eq!(format(&int(2)), "2/1");
        assert_eq!(format(&ratio(-2, 4)), "-1/2");
        assert!(parse("1/0").is_err());
        assert!(parse("x").is_err());
    }

    #[test]
    fn json_forms() {
        let v: Vec<Q> = serde_json::from_str(r#"["1/3", 2, "5"]"#).unwrap();
        assert_eq!(v, vec![Q(ratio(1, 3)), Q(int(2)), Q(int(5))]);
        assert_eq!(serde_json::to_string(&Q(ratio(1, 3))).unwrap(), "\"1/3\"");
    }

    #[test]
    fn huge_ratio_to_float() {
        let small = ratio_to_f64(BigUint::from(2u32).pow(3000), BigUint::from(3u32).pow(1893));
        let expected = (3000.0 * 2f64.ln() - 1893.0 * 3f64.ln()).exp();
        assert!((small / expected - 1.0).abs() < 1e-12);
        assert_eq!(to_f64(&ratio(1, 4)), 0.25);
        assert!((ceil_times(&ratio(4, 9), &BigUint::from(729u32)) - BigUint::from(324u32)).is_zero());
    }
}
