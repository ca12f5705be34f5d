//! Real parameters with an exact rational fast path.
//!
//! Parameters typed on the command line (`2`, `0.5`, `1/3`, `1.5e-2`) are
//! exactly representable as rationals, so comparisons such as `a = b` or
//! `ab = 1` are decided exactly. Values that only exist as `f64` fall back to
//! an absolute tolerance.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// Absolute tolerance for real comparisons when no exact value is available.
pub const REAL_TOL: f64 = 1e-9;

/// A real number, optionally carrying its exact rational value.
#[derive(Clone, Debug)]
pub struct Real {
    approx: f64,
    exact: Option<BigRational>,
}

impl Real {
    pub fn from_f64(x: f64) -> Self {
        Real {
            approx: x,
            exact: None,
        }
    }

    pub fn from_ratio(num: i64, den: i64) -> Result<Self> {
        if den == 0 {
            return Err(Error::domain("zero denominator"));
        }
        let q = BigRational::new(BigInt::from(num), BigInt::from(den));
        Ok(Self::from_rational(q))
    }

    pub fn from_rational(q: BigRational) -> Self {
        let approx = q.to_f64().unwrap_or(f64::NAN);
        Real {
            approx,
            exact: Some(q),
        }
    }

    pub fn value(&self) -> f64 {
        self.approx
    }

    pub fn exact(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    pub fn is_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn recip(&self) -> Result<Self> {
        match &self.exact {
            Some(q) if q.is_zero() => Err(Error::domain("reciprocal of zero")),
            Some(q) => Ok(Self::from_rational(q.recip())),
            None if self.approx == 0.0 => Err(Error::domain("reciprocal of zero")),
            None => Ok(Self::from_f64(1.0 / self.approx)),
        }
    }

    pub fn mul(&self, other: &Real) -> Real {
        match (&self.exact, &other.exact) {
            (Some(p), Some(q)) => Self::from_rational(p * q),
            _ => Self::from_f64(self.approx * other.approx),
        }
    }

    /// Equality: exact when both sides are rational, `|x - y| <= 1e-9` otherwise.
    pub fn same_as(&self, other: &Real) -> bool {
        match (&self.exact, &other.exact) {
            (Some(p), Some(q)) => p == q,
            _ => (self.approx - other.approx).abs() <= REAL_TOL,
        }
    }

    pub fn is_one(&self) -> bool {
        match &self.exact {
            Some(q) => q.is_one(),
            None => (self.approx - 1.0).abs() <= REAL_TOL,
        }
    }

    pub fn is_positive(&self) -> bool {
        match &self.exact {
            Some(q) => q.is_positive(),
            None => self.approx > 0.0,
        }
    }
}

impl From<f64> for Real {
    fn from(x: f64) -> Self {
        Real::from_f64(x)
    }
}

impl PartialEq for Real {
    fn eq(&self, other: &Self) -> bool {
        self.same_as(other)
    }
}

impl fmt::Display for Real {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Some(q) => match decimal_string(q) {
                Some(s) => f.write_str(&s),
                None => write!(f, "{}/{}", q.numer(), q.denom()),
            },
            None => write!(f, "{}", self.approx),
        }
    }
}

/// Renders `q` as a terminating decimal if it is one (denominator `2^i 5^j`).
fn decimal_string(q: &BigRational) -> Option<String> {
    let mut den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let digits = twos.max(fives);
    let scaled = q * BigRational::from_integer(BigInt::from(10).pow(digits));
    let n = scaled.to_integer();
    let neg = n.is_negative();
    let s = n.abs().to_string();
    let width = digits as usize + 1;
    let s = format!("{:0>width$}", s, width = width);
    let (int, frac) = s.split_at(s.len() - digits as usize);
    Some(format!("{}{}.{}", if neg { "-" } else { "" }, int, frac))
}

impl FromStr for Real {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let num = parse_decimal(n.trim())
                .ok_or_else(|| Error::Input(format!("not a number: {s:?}")))?;
            let den = parse_decimal(d.trim())
                .ok_or_else(|| Error::Input(format!("not a number: {s:?}")))?;
            if den.is_zero() {
                return Err(Error::Input(format!("zero denominator in {s:?}")));
            }
            return Ok(Self::from_rational(num / den));
        }
        if let Some(q) = parse_decimal(s) {
            return Ok(Self::from_rational(q));
        }
        s.parse::<f64>()
            .ok()
            .filter(|x| x.is_finite())
            .map(Self::from_f64)
            .ok_or_else(|| Error::Input(format!("not a number: {s:?}")))
    }
}

/// Parses `[-+]digits[.digits][e[-+]digits]` into an exact rational.
fn parse_decimal(s: &str) -> Option<BigRational> {
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, body) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int, frac) = body.split_once('.').unwrap_or((body, ""));
    if int.is_empty() && frac.is_empty() {
        return None;
    }
    if !int.chars().chain(frac.chars()).all(|c| c.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int}{frac}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().ok()?
    };
    let scale = exp - frac.len() as i32;
    let ten = BigInt::from(10);
    let mut q = BigRational::from_integer(n);
    if scale >= 0 {
        q *= BigRational::from_integer(ten.pow(scale as u32));
    } else {
        q /= BigRational::from_integer(ten.pow((-scale) as u32));
    }
    Some(if neg { -q } else { q })
}
