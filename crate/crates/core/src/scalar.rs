//! Arithmetic backends shared by the float and exact-rational code paths.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Field operations needed by the (p,q) primitives, the operator and the
/// closed-form moments. Implemented by `f64` and [`ExactScalar`].
pub trait Scalar:
    Clone
    + PartialOrd
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    /// Whether arithmetic is exact (no rounding).
    const IS_EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn to_f64(&self) -> f64;

    fn from_usize(v: usize) -> Self {
        Self::from_i64(v as i64)
    }

    fn is_zero(&self) -> bool {
        *self == Self::zero()
    }

    fn abs(&self) -> Self {
        if *self < Self::zero() {
            -self.clone()
        } else {
            self.clone()
        }
    }

    fn powu(&self, exp: usize) -> Self {
        let mut base = self.clone();
        let mut e = exp;
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

impl Scalar for f64 {
    const IS_EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn abs(&self) -> Self {
        f64::abs(*self)
    }
    fn powu(&self, exp: usize) -> Self {
        match i32::try_from(exp) {
            Ok(e) => self.powi(e),
            Err(_) => self.powf(exp as f64),
        }
    }
}

/// Arbitrary-precision rational, always in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ExactScalar(BigRational);

impl ExactScalar {
    pub fn new(numerator: impl Into<BigInt>, denominator: impl Into<BigInt>) -> Self {
        Self(BigRational::new(numerator.into(), denominator.into()))
    }

    pub fn from_integer(v: i64) -> Self {
        Self(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn as_ratio(&self) -> &BigRational {
        &self.0
    }
}

impl From<BigRational> for ExactScalar {
    fn from(r: BigRational) -> Self {
        Self(r)
    }
}

impl fmt::Debug for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.denom().is_one() {
            write!(f, "{}", self.0.numer())
        } else {
            write!(f, "{}/{}", self.0.numer(), self.0.denom())
        }
    }
}

/// Accepts integers (`3`), fractions (`-2/7`) and plain decimals (`0.125`,
/// `1e-3` is not accepted). Decimals are read exactly, not through `f64`.
impl FromStr for ExactScalar {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational literal: {s:?}"));
        if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num.trim().parse().map_err(|_| bad())?;
            let den: BigInt = den.trim().parse().map_err(|_| bad())?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            return Ok(Self(BigRational::new(num, den)));
        }
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(bad());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let digits = format!("{int_part}{frac_part}");
        let mut num: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| bad())?
        };
        if neg {
            num = -num;
        }
        let den = num_traits::pow(BigInt::from(10), frac_part.len());
        Ok(Self(BigRational::new(num, den)))
    }
}

impl Serialize for ExactScalar {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for ExactScalar {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($trait:ident, $method:ident) => {
        impl $trait for ExactScalar {
            type Output = ExactScalar;
            fn $method(self, rhs: ExactScalar) -> ExactScalar {
                ExactScalar($trait::$method(self.0, rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for ExactScalar {
    type Output = ExactScalar;
    fn neg(self) -> ExactScalar {
        ExactScalar(-self.0)
    }
}

impl Scalar for ExactScalar {
    const IS_EXACT: bool = true;

    fn zero() -> Self {
        Self(BigRational::zero())
    }
    fn one() -> Self {
        Self(BigRational::one())
    }
    fn from_i64(v: i64) -> Self {
        Self::from_integer(v)
    }
    fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    fn abs(&self) -> Self {
        Self(self.0.abs())
    }
    fn powu(&self, exp: usize) -> Self {
        Self(num_traits::pow(self.0.clone(), exp))
    }
}
