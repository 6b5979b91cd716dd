//! Exact rational arithmetic.
//!
//! All coordinates, distances, radii and certificate values in this crate are
//! rationals with arbitrary-precision numerator and denominator, always kept
//! in reduced form with a positive denominator. The textual form is `p/q`,
//! with `/q` omitted when the denominator is 1.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

/// A reduced rational number with positive denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Rat(BigRational);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid rational `{0}`")]
pub struct RatParseError(pub String);

impl Rat {
    /// Builds `numer/denom`. Panics if `denom == 0`.
    pub fn new(numer: i64, denom: i64) -> Self {
        assert!(denom != 0, "zero denominator");
        Rat(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_int(n: i64) -> Self {
        Rat(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_big(numer: BigInt, denom: BigInt) -> Option<Self> {
        if denom.is_zero() {
            return None;
        }
        Some(Rat(BigRational::new(numer, denom)))
    }

    pub fn zero() -> Self {
        Rat(BigRational::zero())
    }

    pub fn one() -> Self {
        Rat(BigRational::one())
    }

    pub fn two() -> Self {
        Rat::from_int(2)
    }

    /// 2^exp for any integer exponent.
    pub fn pow2(exp: i64) -> Self {
        if exp >= 0 {
            Rat(BigRational::from_integer(BigInt::one() << exp as usize))
        } else {
            Rat(BigRational::new(
                BigInt::one(),
                BigInt::one() << (-exp) as usize,
            ))
        }
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Rat {
        Rat(self.0.abs())
    }

    /// True for 2^{-k} with k >= 0, i.e. 1, 1/2, 1/4, ...
    pub fn is_pow2_reciprocal(&self) -> bool {
        self.is_positive() && self.numer().is_one() && self.denom().magnitude().count_ones() == 1
    }

    /// True when the denominator is a power of two (integers included).
    pub fn is_dyadic(&self) -> bool {
        self.denom().magnitude().count_ones() == 1
    }
}

impl fmt::Display for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_integer() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

impl fmt::Debug for Rat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl FromStr for Rat {
    type Err = RatParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || RatParseError(s.to_string());
        let (num_str, den_str) = match s.split_once('/') {
            Some((n, d)) => (n, Some(d)),
            None => (s, None),
        };
        let numer: BigInt = num_str.parse().map_err(|_| err())?;
        let denom: BigInt = match den_str {
            Some(d) => {
                if d.starts_with('+') || d.starts_with('-') {
                    return Err(err());
                }
                let d: BigInt = d.parse().map_err(|_| err())?;
                if d.is_zero() || d.is_negative() {
                    return Err(err());
                }
                d
            }
            None => BigInt::one(),
        };
        Ok(Rat(BigRational::new(numer, denom)))
    }
}

impl Serialize for Rat {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rat {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! binop {
    ($trait:ident, $method:ident) => {
        impl $trait for &Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                Rat((&self.0).$method(&rhs.0))
            }
        }
        impl $trait for Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                (&self).$method(&rhs)
            }
        }
        impl $trait<&Rat> for Rat {
            type Output = Rat;
            fn $method(self, rhs: &Rat) -> Rat {
                (&self).$method(rhs)
            }
        }
        impl $trait<Rat> for &Rat {
            type Output = Rat;
            fn $method(self, rhs: Rat) -> Rat {
                self.$method(&rhs)
            }
        }
    };
}

binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for &Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-&self.0)
    }
}

impl Neg for Rat {
    type Output = Rat;
    fn neg(self) -> Rat {
        Rat(-self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn display_omits_unit_denominator() {
        assert_eq!(Rat::from_int(2).to_string(), "2");
        assert_eq!(Rat::new(1, 2).to_string(), "1/2");
        assert_eq!(Rat::new(-3, 4).to_string(), "-3/4");
        assert_eq!(Rat::new(4, 2).to_string(), "2");
    }

    #[test]
    fn parse_reduces() {
        let r: Rat = "6/8".parse().unwrap();
        assert_eq!(r, Rat::new(3, 4));
        assert!("1/0".parse::<Rat>().is_err());
        assert!("1/-2".parse::<Rat>().is_err());
        assert!("".parse::<Rat>().is_err());
        assert!("0.5".parse::<Rat>().is_err());
    }

    #[test]
    fn pow2_both_signs() {
        assert_eq!(Rat::pow2(0), Rat::one());
        assert_eq!(Rat::pow2(3), Rat::from_int(8));
        assert_eq!(Rat::pow2(-3), Rat::new(1, 8));
    }

    #[test]
    fn pow2_reciprocal_detection() {
        assert!(Rat::one().is_pow2_reciprocal());
        assert!(Rat::new(1, 4).is_pow2_reciprocal());
        assert!(!Rat::new(1, 3).is_pow2_reciprocal());
        assert!(!Rat::new(3, 4).is_pow2_reciprocal());
        assert!(!Rat::from_int(2).is_pow2_reciprocal());
        assert!(!Rat::zero().is_pow2_reciprocal());
    }

    proptest! {
        #[test]
        fn parse_format_round_trip(n in -1000i64..1000, d in 1i64..1000) {
            let r = Rat::new(n, d);
            let back: Rat = r.to_string().parse().unwrap();
            prop_assert_eq!(back, r);
        }

        #[test]
        fn arithmetic_is_exact(a in -50i64..50, b in 1i64..50, c in -50i64..50, d in 1i64..50) {
            let x = Rat::new(a, b);
            let y = Rat::new(c, d);
            prop_assert_eq!(&x + &y, Rat::new(a * d + c * b, b * d));
            prop_assert_eq!(&x * &y, Rat::new(a * c, b * d));
        }
    }
}
