//! Scalar abstraction shared by every solver in the crate.
//!
//! All numerical code is written against [`Scalar`], implemented for `f32`,
//! `f64` and the exact [`Rational`] type. Floating types compare with an
//! absolute tolerance, the rational type compares exactly (tolerance zero).

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Exact arbitrary-precision rational number.
pub type Rational = BigRational;

pub trait Scalar:
    Clone + Debug + Display + PartialOrd + Num + Signed + Send + Sync + 'static
{
    /// True for exact arithmetic (tolerance zero).
    const EXACT: bool;

    /// Absolute tolerance used for pivoting and threshold comparisons.
    fn default_tolerance() -> Self;

    fn is_finite_value(&self) -> bool;

    fn from_ratio(numer: i64, denom: i64) -> Self;

    fn from_f64_value(v: f64) -> Self;

    fn to_f64_value(&self) -> f64;

    /// Square root; exact types go through `f64`.
    fn sqrt_value(&self) -> Self;

    /// Parses `"3"`, `"-0.25"` or `"p/q"`.
    fn parse_scalar(s: &str) -> Result<Self, String>;

    /// JSON encoding: numbers for floats, `"p/q"` strings for rationals.
    fn to_json(&self) -> serde_json::Value;

    /// Accepts JSON numbers and `"p/q"` strings. Exact types read a
    /// non-integer number as its shortest round-trip decimal, so `0.1` is
    /// exactly `1/10`.
    fn from_json(v: &serde_json::Value) -> Result<Self, String>;

    fn from_usize(n: usize) -> Self {
        Self::from_ratio(n as i64, 1)
    }
}

fn parse_ratio_parts(s: &str) -> Option<(&str, &str)> {
    let (a, b) = s.split_once('/')?;
    Some((a.trim(), b.trim()))
}

macro_rules! impl_float_scalar {
    ($t:ty, $tol:expr) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn default_tolerance() -> Self {
                $tol
            }

            fn is_finite_value(&self) -> bool {
                self.is_finite()
            }

            fn from_ratio(numer: i64, denom: i64) -> Self {
                (numer as f64 / denom as f64) as $t
            }

            fn from_f64_value(v: f64) -> Self {
                v as $t
            }

            fn to_f64_value(&self) -> f64 {
                *self as f64
            }

            fn sqrt_value(&self) -> Self {
                self.sqrt()
            }

            fn parse_scalar(s: &str) -> Result<Self, String> {
                let s = s.trim();
                if let Some((a, b)) = parse_ratio_parts(s) {
                    let a: f64 = a.parse().map_err(|_| format!("invalid number `{s}`"))?;
                    let b: f64 = b.parse().map_err(|_| format!("invalid number `{s}`"))?;
                    if b == 0.0 {
                        return Err(format!("zero denominator in `{s}`"));
                    }
                    return Ok((a / b) as $t);
                }
                let v: f64 = s.parse().map_err(|_| format!("invalid number `{s}`"))?;
                if !v.is_finite() {
                    return Err(format!("non-finite number `{s}`"));
                }
                Ok(v as $t)
            }

            fn to_json(&self) -> serde_json::Value {
                serde_json::Number::from_f64(*self as f64)
                    .map(serde_json::Value::Number)
                    .unwrap_or(serde_json::Value::Null)
            }

            fn from_json(v: &serde_json::Value) -> Result<Self, String> {
                match v {
                    serde_json::Value::Number(n) => n
                        .as_f64()
                        .map(|x| x as $t)
                        .ok_or_else(|| format!("number out of range: {n}")),
                    serde_json::Value::String(s) => Self::parse_scalar(s),
                    other => Err(format!("expected a number, found {other}")),
                }
            }
        }
    };
}

impl_float_scalar!(f64, 1e-9);
impl_float_scalar!(f32, 1e-5);

impl Scalar for Rational {
    const EXACT: bool = true;

    fn default_tolerance() -> Self {
        Rational::zero()
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn from_ratio(numer: i64, denom: i64) -> Self {
        Rational::new(BigInt::from(numer), BigInt::from(denom))
    }

    fn from_f64_value(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Rational::zero)
    }

    fn to_f64_value(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn sqrt_value(&self) -> Self {
        Self::from_f64_value(self.to_f64_value().sqrt())
    }

    fn parse_scalar(s: &str) -> Result<Self, String> {
        let s = s.trim();
        if let Some((a, b)) = parse_ratio_parts(s) {
            let a = BigInt::from_str(a).map_err(|_| format!("invalid rational `{s}`"))?;
            let b = BigInt::from_str(b).map_err(|_| format!("invalid rational `{s}`"))?;
            if b.is_zero() {
                return Err(format!("zero denominator in `{s}`"));
            }
            return Ok(Rational::new(a, b));
        }
        // Terminating decimal such as "-0.125" is converted exactly.
        let (neg, body) = match s.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, s.strip_prefix('+').unwrap_or(s)),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        let digits_ok = |d: &str| d.chars().all(|c| c.is_ascii_digit());
        if (int_part.is_empty() && frac_part.is_empty())
            || !digits_ok(int_part)
            || !digits_ok(frac_part)
        {
            return Err(format!("invalid rational `{s}`"));
        }
        let mut text = String::from(if int_part.is_empty() { "0" } else { int_part });
        text.push_str(frac_part);
        let numer = BigInt::from_str(&text).map_err(|_| format!("invalid rational `{s}`"))?;
        let denom = num_traits::pow(BigInt::from(10), frac_part.len());
        let r = Rational::new(numer, denom);
        Ok(if neg { -r } else { r })
    }

    fn to_json(&self) -> serde_json::Value {
        if self.denom().is_one() {
            serde_json::Value::String(self.numer().to_string())
        } else {
            serde_json::Value::String(format!("{}/{}", self.numer(), self.denom()))
        }
    }

    fn from_json(v: &serde_json::Value) -> Result<Self, String> {
        match v {
            serde_json::Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Rational::from_integer(BigInt::from(i)))
                } else if let Some(u) = n.as_u64() {
                    Ok(Rational::from_integer(BigInt::from(u)))
                } else {
                    let f = n.as_f64().ok_or_else(|| format!("number out of range: {n}"))?;
                    // Display of f64 never uses exponent notation
                    Self::parse_scalar(&f.to_string())
                }
            }
            serde_json::Value::String(s) => Self::parse_scalar(s),
            other => Err(format!("expected a number, found {other}")),
        }
    }
}

/// `a < b` beyond tolerance.
pub fn lt_tol<T: Scalar>(a: &T, b: &T, tol: &T) -> bool {
    a.clone() + tol.clone() < *b
}

/// `a <= b` up to tolerance.
pub fn le_tol<T: Scalar>(a: &T, b: &T, tol: &T) -> bool {
    a.clone() <= b.clone() + tol.clone()
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

pub fn sub<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() - y.clone()).collect()
}

pub fn add<T: Scalar>(a: &[T], b: &[T]) -> Vec<T> {
    a.iter().zip(b).map(|(x, y)| x.clone() + y.clone()).collect()
}

pub fn scale<T: Scalar>(s: &T, a: &[T]) -> Vec<T> {
    a.iter().map(|x| s.clone() * x.clone()).collect()
}

pub fn dist_sq<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| {
        let d = x.clone() - y.clone();
        acc + d.clone() * d
    })
}

pub fn max_of<T: Scalar>(a: T, b: T) -> T {
    if b > a {
        b
    } else {
        a
    }
}

pub fn min_of<T: Scalar>(a: T, b: T) -> T {
    if b < a {
        b
    } else {
        a
    }
}

/// Coordinates equal up to tolerance.
pub fn points_eq<T: Scalar>(a: &[T], b: &[T], tol: &T) -> bool {
    a.len() == b.len()
        && a
            .iter()
            .zip(b)
            .all(|(x, y)| (x.clone() - y.clone()).abs() <= *tol)
}

pub fn to_f64_vec<T: Scalar>(v: &[T]) -> Vec<f64> {
    v.iter().map(Scalar::to_f64_value).collect()
}

pub fn json_point<T: Scalar>(p: &[T]) -> serde_json::Value {
    serde_json::Value::Array(p.iter().map(Scalar::to_json).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_parses_decimals_exactly() {
        let r = Rational::parse_scalar("-0.125").unwrap();
        assert_eq!(r, Rational::from_ratio(-1, 8));
        assert_eq!(Rational::parse_scalar("3/6").unwrap(), Rational::from_ratio(1, 2));
        assert_eq!(Rational::parse_scalar("7").unwrap(), Rational::from_ratio(7, 1));
        assert!(Rational::parse_scalar("1/0").is_err());
        assert!(Rational::parse_scalar("abc").is_err());
        assert!(Rational::parse_scalar(".").is_err());
    }

    #[test]
    fn float_parses_ratio_strings() {
        assert_eq!(f64::parse_scalar("1/4").unwrap(), 0.25);
        assert_eq!(f64::parse_scalar(" 2.5 ").unwrap(), 2.5);
        assert!(f64::parse_scalar("inf").is_err());
    }

    #[test]
    fn exact_mode_reads_decimal_json_as_written() {
        let v: serde_json::Value = serde_json::from_str("0.1").unwrap();
        assert_eq!(Rational::from_json(&v).unwrap(), Rational::from_ratio(1, 10));
        let v: serde_json::Value = serde_json::from_str("1e-7").unwrap();
        assert_eq!(Rational::from_json(&v).unwrap(), Rational::from_ratio(1, 10_000_000));
        let v: serde_json::Value = serde_json::from_str("2.0").unwrap();
        assert_eq!(Rational::from_json(&v).unwrap(), Rational::from_ratio(2, 1));
        let v: serde_json::Value = serde_json::from_str("\"1/2\"").unwrap();
        assert_eq!(Rational::from_json(&v).unwrap(), Rational::from_ratio(1, 2));
        let v: serde_json::Value = serde_json::from_str("-4").unwrap();
        assert_eq!(Rational::from_json(&v).unwrap(), Rational::from_ratio(-4, 1));
    }

    #[test]
    fn json_round_trip() {
        let r = Rational::from_ratio(-3, 7);
        assert_eq!(Rational::from_json(&r.to_json()).unwrap(), r);
        let x = 0.1f64;
        assert_eq!(f64::from_json(&x.to_json()).unwrap(), x);
    }

    #[test]
    fn tolerance_helpers() {
        let tol = 1e-9;
        assert!(le_tol(&1.0, &(1.0 - 1e-12), &tol));
        assert!(!lt_tol(&1.0, &(1.0 + 1e-12), &tol));
        assert!(lt_tol(&1.0, &1.1, &tol));
        let z = Rational::zero();
        assert!(!lt_tol(&Rational::one(), &Rational::one(), &z));
    }
}
