//! Coefficient fields.
//!
//! Every formal-series and graph-sum routine is generic over [`Scalar`], so the
//! same code runs with exact rationals (identity checks) and with floats or
//! complex numbers (numerical evaluation).

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::complex::Complex64;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};

/// Exact rational coefficients.
pub type Rational = BigRational;

/// A commutative field of coefficients.
///
/// The series algebra itself only needs ring operations and division by
/// small integers; exact partition-function ratios use general division.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + fmt::Display
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    fn from_int(n: i64) -> Self;

    fn from_ratio(num: i64, den: i64) -> Self;

    /// Exact conversion from a binary float, when the field can hold it.
    fn from_f64_exact(x: f64) -> Option<Self>;

    /// Modulus as a float, used by certificates and residual reports.
    fn magnitude(&self) -> f64;

    /// Real part as a float.
    fn real_f64(&self) -> f64;

    /// True when arithmetic in this field is exact.
    fn is_exact() -> bool;

    /// JSON encoding used by series dumps and CLI output.
    fn to_json(&self) -> serde_json::Value;

    fn from_json(v: &serde_json::Value) -> Option<Self>;
}

/// Fields that additionally support the transcendental functions needed for
/// numerical evaluation of the density/activity maps.
pub trait Analytic: Scalar {
    fn exp(&self) -> Self;
    fn ln(&self) -> Self;
    fn from_f64(x: f64) -> Self;
}

impl Scalar for f64 {
    fn from_int(n: i64) -> Self {
        n as f64
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        num as f64 / den as f64
    }
    fn from_f64_exact(x: f64) -> Option<Self> {
        Some(x)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
    fn real_f64(&self) -> f64 {
        *self
    }
    fn is_exact() -> bool {
        false
    }
    fn to_json(&self) -> serde_json::Value {
        if self.is_finite() {
            serde_json::json!(*self)
        } else {
            serde_json::Value::String(format_float(*self))
        }
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        match v {
            serde_json::Value::Number(n) => n.as_f64(),
            serde_json::Value::String(s) => match s.as_str() {
                "inf" => Some(f64::INFINITY),
                "-inf" => Some(f64::NEG_INFINITY),
                other => other.parse().ok(),
            },
            _ => None,
        }
    }
}

impl Analytic for f64 {
    fn exp(&self) -> Self {
        f64::exp(*self)
    }
    fn ln(&self) -> Self {
        f64::ln(*self)
    }
    fn from_f64(x: f64) -> Self {
        x
    }
}

impl Scalar for Complex64 {
    fn from_int(n: i64) -> Self {
        Complex64::new(n as f64, 0.0)
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        Complex64::new(num as f64 / den as f64, 0.0)
    }
    fn from_f64_exact(x: f64) -> Option<Self> {
        Some(Complex64::new(x, 0.0))
    }
    fn magnitude(&self) -> f64 {
        self.norm()
    }
    fn real_f64(&self) -> f64 {
        self.re
    }
    fn is_exact() -> bool {
        false
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::json!([self.re.to_json(), self.im.to_json()])
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        match v {
            serde_json::Value::Array(parts) if parts.len() == 2 => {
                Some(Complex64::new(f64::from_json(&parts[0])?, f64::from_json(&parts[1])?))
            }
            other => f64::from_json(other).map(|re| Complex64::new(re, 0.0)),
        }
    }
}

impl Analytic for Complex64 {
    fn exp(&self) -> Self {
        Complex64::exp(*self)
    }
    fn ln(&self) -> Self {
        Complex64::ln(*self)
    }
    fn from_f64(x: f64) -> Self {
        Complex64::new(x, 0.0)
    }
}

impl Scalar for BigRational {
    fn from_int(n: i64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }
    fn from_ratio(num: i64, den: i64) -> Self {
        BigRational::new(BigInt::from(num), BigInt::from(den))
    }
    fn from_f64_exact(x: f64) -> Option<Self> {
        BigRational::from_float(x)
    }
    fn magnitude(&self) -> f64 {
        self.abs().to_f64().unwrap_or(f64::INFINITY)
    }
    fn real_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
    fn is_exact() -> bool {
        true
    }
    fn to_json(&self) -> serde_json::Value {
        serde_json::Value::String(format_rational(self))
    }
    fn from_json(v: &serde_json::Value) -> Option<Self> {
        match v {
            serde_json::Value::String(s) => parse_rational(s),
            serde_json::Value::Number(n) => n.as_i64().map(Self::from_int),
            _ => None,
        }
    }
}

/// Parses `p/q` or `p`.
pub fn parse_rational(s: &str) -> Option<BigRational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                return None;
            }
            Some(BigRational::new(p.trim().parse().ok()?, q))
        }
        None => Some(BigRational::from_integer(s.parse().ok()?)),
    }
}

/// `1/n!` in the given field.
pub fn inv_factorial<S: Scalar>(n: usize) -> S {
    S::from_ratio(1, factorial(n) as i64)
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Formats a rational as `p/q` (or `p` when integral).
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Shortest round-trip decimal for a float.
pub fn format_float(x: f64) -> String {
    if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else if x == 0.0 {
        "0".into()
    } else {
        format!("{x:?}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_formatting() {
        assert_eq!(format_rational(&Rational::from_ratio(-3, 2)), "-3/2");
        assert_eq!(format_rational(&Rational::from_int(4)), "4");
        assert_eq!(format_float(-1.5), "-1.5");
        assert_eq!(format_float(0.1), "0.1");
        assert_eq!(format_float(-2.0), "-2.0");
    }

    #[test]
    fn inverse_factorials() {
        assert_eq!(inv_factorial::<Rational>(4), Rational::from_ratio(1, 24));
        assert_eq!(factorial(0), 1);
        assert!((inv_factorial::<f64>(3) - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn json_round_trip() {
        let r = Rational::from_ratio(-7, 3);
        assert_eq!(Rational::from_json(&r.to_json()), Some(r));
        assert_eq!(f64::from_json(&f64::INFINITY.to_json()), Some(f64::INFINITY));
        let c = Complex64::new(0.5, -2.0);
        assert_eq!(Complex64::from_json(&c.to_json()), Some(c));
        assert!(parse_rational("1/0").is_none());
    }

    #[test]
    fn exact_float_embedding() {
        assert_eq!(Rational::from_f64_exact(-0.5), Some(Rational::from_ratio(-1, 2)));
        assert!(Rational::from_f64_exact(f64::NAN).is_none());
    }
}
