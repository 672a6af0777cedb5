//! Number backends.
//!
//! Every algorithm in this crate is generic over [`Scalar`]. Two backends are
//! provided: exact big rationals ([`Rational`]) and `f64`. The rational
//! backend compares exactly; the float backend compares with a relative
//! tolerance of [`FLOAT_REL_TOL`].

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

/// Exact rational number used by the rational backend.
pub type Rational = BigRational;

/// Relative tolerance used by the float backend for every `<=` / `==` check.
pub const FLOAT_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParseScalarError {
    #[error("cannot parse {0:?} as a number")]
    Malformed(String),
    #[error("expected a number or a \"p/q\" string, found {0}")]
    WrongJsonType(String),
    #[error("non-finite value {0}")]
    NonFinite(f64),
}

/// Which number backend a run uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    Float,
    Rational,
}

impl Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Float => write!(f, "float"),
            Backend::Rational => write!(f, "rational"),
        }
    }
}

impl FromStr for Backend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "float" => Ok(Backend::Float),
            "rational" => Ok(Backend::Rational),
            other => Err(format!("unknown backend {other:?} (expected float|rational)")),
        }
    }
}

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
    const BACKEND: Backend;

    /// `self <= other` under the backend's tolerance policy.
    fn tol_le(&self, other: &Self) -> bool;

    fn tol_eq(&self, other: &Self) -> bool {
        self.tol_le(other) && other.tol_le(self)
    }

    fn from_rational(r: &Rational) -> Self;

    /// Exact conversion to a rational (floats convert to their exact binary value).
    fn to_rational(&self) -> Rational;

    fn floor(&self) -> Self;

    fn ceil(&self) -> Self;

    /// Square root. Exact only when it happens to be representable; the rational
    /// backend rounds through `f64`.
    fn sqrt(&self) -> Self;

    /// Canonical JSON encoding: `"p/q"` strings for rationals, numbers for floats.
    fn encode(&self) -> Value;

    fn decode(v: &Value) -> Result<Self, ParseScalarError>;

    fn from_count(n: usize) -> Self {
        <Self as FromPrimitive>::from_usize(n).expect("usize fits every backend")
    }

    /// `2^exp`, exact on both backends for moderate exponents.
    fn pow2(exp: i32) -> Self {
        let two = Self::from_count(2);
        let mut acc = Self::one();
        for _ in 0..exp.unsigned_abs() {
            acc = acc * two.clone();
        }
        if exp < 0 {
            Self::one() / acc
        } else {
            acc
        }
    }

    fn half(&self) -> Self {
        self.clone() / Self::from_count(2)
    }

    fn to_f64_lossy(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Scalar for Rational {
    const BACKEND: Backend = Backend::Rational;

    fn tol_le(&self, other: &Self) -> bool {
        self <= other
    }

    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }

    fn to_rational(&self) -> Rational {
        self.clone()
    }

    fn floor(&self) -> Self {
        BigRational::floor(self)
    }

    fn ceil(&self) -> Self {
        BigRational::ceil(self)
    }

    fn sqrt(&self) -> Self {
        let f = self.to_f64_lossy().sqrt();
        BigRational::from_float(f).unwrap_or_else(Zero::zero)
    }

    fn encode(&self) -> Value {
        Value::String(format!("{}/{}", self.numer(), self.denom()))
    }

    fn decode(v: &Value) -> Result<Self, ParseScalarError> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(BigRational::from_integer(BigInt::from(i)))
                } else {
                    let f = n.as_f64().ok_or_else(|| ParseScalarError::Malformed(n.to_string()))?;
                    BigRational::from_float(f).ok_or(ParseScalarError::NonFinite(f))
                }
            }
            other => Err(ParseScalarError::WrongJsonType(other.to_string())),
        }
    }
}

impl Scalar for f64 {
    const BACKEND: Backend = Backend::Float;

    fn tol_le(&self, other: &Self) -> bool {
        *self <= *other + FLOAT_REL_TOL * self.abs().max(other.abs())
    }

    fn from_rational(r: &Rational) -> Self {
        r.to_f64().unwrap_or(f64::NAN)
    }

    fn to_rational(&self) -> Rational {
        BigRational::from_float(*self).expect("finite float")
    }

    fn floor(&self) -> Self {
        f64::floor(*self)
    }

    fn ceil(&self) -> Self {
        f64::ceil(*self)
    }

    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }

    fn encode(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }

    fn decode(v: &Value) -> Result<Self, ParseScalarError> {
        let f = match v {
            Value::Number(n) => n.as_f64().ok_or_else(|| ParseScalarError::Malformed(n.to_string()))?,
            Value::String(s) => parse_rational(s)?
                .to_f64()
                .ok_or_else(|| ParseScalarError::Malformed(s.clone()))?,
            other => return Err(ParseScalarError::WrongJsonType(other.to_string())),
        };
        if f.is_finite() {
            Ok(f)
        } else {
            Err(ParseScalarError::NonFinite(f))
        }
    }
}

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"-0.125"` exactly.
pub fn parse_rational(s: &str) -> Result<Rational, ParseScalarError> {
    let t = s.trim();
    let bad = || ParseScalarError::Malformed(s.to_string());
    if let Some((p, q)) = t.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(BigRational::new(p, q));
    }
    if let Some((int, frac)) = t.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = int.starts_with('-');
        let int_part = if int.is_empty() || int == "-" || int == "+" {
            BigInt::zero()
        } else {
            BigInt::from_str(int).map_err(|_| bad())?
        };
        let frac_num = BigInt::from_str(frac).map_err(|_| bad())?;
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_r = BigRational::new(frac_num, scale);
        let int_r = BigRational::from_integer(int_part.abs());
        let mag = int_r + frac_r;
        return Ok(if negative { -mag } else { mag });
    }
    BigInt::from_str(t)
        .map(BigRational::from_integer)
        .map_err(|_| bad())
}

/// Convenience constructor `p/q` for tests and fixtures.
pub fn ratio(p: i64, q: i64) -> Rational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

pub fn smax<S: Scalar>(a: S, b: S) -> S {
    if b > a {
        b
    } else {
        a
    }
}

pub fn smin<S: Scalar>(a: S, b: S) -> S {
    if b < a {
        b
    } else {
        a
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fraction_integer_and_decimal() {
        assert_eq!(parse_rational("3/4").unwrap(), ratio(3, 4));
        assert_eq!(parse_rational("-6/8").unwrap(), ratio(-3, 4));
        assert_eq!(parse_rational("5").unwrap(), ratio(5, 1));
        assert_eq!(parse_rational("0.125").unwrap(), ratio(1, 8));
        assert_eq!(parse_rational("-0.5").unwrap(), ratio(-1, 2));
        assert_eq!(parse_rational(".5").unwrap(), ratio(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.").is_err());
    }

    #[test]
    fn rational_encoding_is_p_over_q() {
        assert_eq!(ratio(6, 4).encode(), Value::String("3/2".into()));
        assert_eq!(ratio(2, 1).encode(), Value::String("2/1".into()));
        let back = Rational::decode(&ratio(-7, 3).encode()).unwrap();
        assert_eq!(back, ratio(-7, 3));
    }

    #[test]
    fn float_tolerance_is_relative() {
        assert!(1.0f64.tol_le(&(1.0 - 1e-12)));
        assert!(!1.0f64.tol_le(&(1.0 - 1e-6)));
        assert!(1e9f64.tol_eq(&(1e9 + 0.1)));
        assert!(!ratio(1, 1).tol_le(&ratio(999_999_999, 1_000_000_000)));
    }

    #[test]
    fn pow2_both_backends() {
        assert_eq!(Rational::pow2(-3), ratio(1, 8));
        assert_eq!(Rational::pow2(4), ratio(16, 1));
        assert_eq!(f64::pow2(-2), 0.25);
    }

    #[test]
    fn floor_and_ceil() {
        assert_eq!(Scalar::floor(&ratio(-3, 2)), ratio(-2, 1));
        assert_eq!(Scalar::ceil(&ratio(-3, 2)), ratio(-1, 1));
        assert_eq!(Scalar::floor(&-1.5f64), -2.0);
    }
}
