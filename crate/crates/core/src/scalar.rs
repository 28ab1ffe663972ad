//! Numeric traits the rest of the crate is generic over.
//!
//! Piecewise-linear dynamics only needs an ordered field, and matrix algebra
//! only needs a signed integer ring. Exactness claims hold for the rational and
//! big-integer instantiations; the float instantiation exists for quick
//! plotting-grade evaluation.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{FromPrimitive, Num, Signed, ToPrimitive};

use crate::error::{DynError, Result};

/// An ordered field used for breakpoints, values and periodic points.
pub trait Scalar:
    Clone + PartialOrd + Num + Signed + FromPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer is representable")
    }

    /// Text form used in JSON records.
    fn to_text(&self) -> String {
        self.to_string()
    }

    fn parse_text(s: &str) -> Result<Self>;

    /// Midpoint of two values.
    fn midpoint(a: &Self, b: &Self) -> Self {
        (a.clone() + b.clone()) / Self::from_int(2)
    }

    /// Floor, used to locate the unit interval containing a value.
    fn floor_int(&self) -> i64;

    fn is_integral(&self) -> bool;
}

impl Scalar for BigRational {
    fn parse_text(s: &str) -> Result<Self> {
        let s = s.trim();
        let parsed = match s.split_once('/') {
            Some((p, q)) => {
                let p = BigInt::from_str(p.trim()).map_err(|e| DynError::Parse(e.to_string()))?;
                let q = BigInt::from_str(q.trim()).map_err(|e| DynError::Parse(e.to_string()))?;
                if q == BigInt::from(0) {
                    return Err(DynError::Parse(format!("zero denominator in {s:?}")));
                }
                Ratio::new(p, q)
            }
            None => Ratio::from_integer(
                BigInt::from_str(s).map_err(|e| DynError::Parse(e.to_string()))?,
            ),
        };
        Ok(parsed)
    }

    fn floor_int(&self) -> i64 {
        self.floor().to_integer().to_i64().expect("floor fits in i64")
    }

    fn is_integral(&self) -> bool {
        self.is_integer()
    }
}

impl Scalar for f64 {
    fn parse_text(s: &str) -> Result<Self> {
        s.trim()
            .parse::<f64>()
            .map_err(|e| DynError::Parse(e.to_string()))
    }

    fn floor_int(&self) -> i64 {
        self.floor() as i64
    }

    fn is_integral(&self) -> bool {
        self.fract() == 0.0
    }
}

/// Signed integer ring for matrix entries.
pub trait Entry:
    Clone + PartialEq + Num + Signed + FromPrimitive + ToPrimitive + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    fn from_int(v: i64) -> Self {
        Self::from_i64(v).expect("integer is representable")
    }
}

impl Entry for BigInt {}
impl Entry for i64 {}
impl Entry for i128 {}
