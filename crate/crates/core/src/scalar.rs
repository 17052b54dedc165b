//! Exact rationals, high-precision binary floats, and the text forms both use.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};

/// Default working precision for float mode, in bits.
pub const DEFAULT_PRECISION: u32 = 128;
/// Smallest precision float mode accepts.
pub const MIN_PRECISION: u32 = 64;

/// Default dedup tolerance for a precision: `2^(-precision/2)`.
pub fn default_tolerance(precision: u32) -> Float {
    let exp = -((precision / 2) as i32);
    Float::with_val(precision, Float::i_exp(1, exp))
}

pub fn check_precision(precision: u32) -> Result<()> {
    if precision < MIN_PRECISION {
        return Err(Error::InvalidInput(format!("precision {precision} is below the minimum of {MIN_PRECISION} bits")));
    }
    Ok(())
}

/// A rational number in canonical form (positive denominator, reduced).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct ExactScalar(Rational);

impl ExactScalar {
    pub fn new(numerator: impl Into<Integer>, denominator: impl Into<Integer>) -> Result<Self> {
        let den = denominator.into();
        if den == 0 {
            return Err(Error::InvalidInput("zero denominator".into()));
        }
        Ok(ExactScalar(Rational::from((numerator.into(), den))))
    }

    pub fn from_int(v: i64) -> Self {
        ExactScalar(Rational::from(v))
    }

    pub fn as_rational(&self) -> &Rational {
        &self.0
    }

    pub fn into_rational(self) -> Rational {
        self.0
    }

    pub fn numerator(&self) -> &Integer {
        self.0.numer()
    }

    pub fn denominator(&self) -> &Integer {
        self.0.denom()
    }

    pub fn to_big(&self, precision: u32) -> BigScalar {
        BigScalar(Float::with_val(precision, &self.0))
    }
}

impl From<Rational> for ExactScalar {
    fn from(r: Rational) -> Self {
        ExactScalar(r)
    }
}

impl From<i64> for ExactScalar {
    fn from(v: i64) -> Self {
        ExactScalar::from_int(v)
    }
}

impl fmt::Display for ExactScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl FromStr for ExactScalar {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(ExactScalar)
    }
}

/// A binary float carrying its own precision; arithmetic on it rounds to
/// nearest at that precision.
#[derive(Clone, Debug, PartialEq, PartialOrd)]
pub struct BigScalar(Float);

impl BigScalar {
    pub fn new(value: Float) -> Self {
        BigScalar(value)
    }

    pub fn with_precision(precision: u32, value: &Float) -> Self {
        BigScalar(Float::with_val(precision, value))
    }

    pub fn from_rational(r: &Rational, precision: u32) -> Self {
        BigScalar(Float::with_val(precision, r))
    }

    pub fn precision(&self) -> u32 {
        self.0.prec()
    }

    pub fn as_float(&self) -> &Float {
        &self.0
    }

    pub fn into_float(self) -> Float {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64()
    }
}

impl From<Float> for BigScalar {
    fn from(f: Float) -> Self {
        BigScalar(f)
    }
}

impl fmt::Display for BigScalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_float(&self.0))
    }
}

/// Either number mode, used where an operation accepts both.
#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(Rational),
    Float(Float),
}

impl Scalar {
    pub fn int(v: i64) -> Self {
        Scalar::Exact(Rational::from(v))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Scalar::Exact(_))
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    /// The value as a float at `precision` (exact values are rounded once).
    pub fn to_float(&self, precision: u32) -> Float {
        match self {
            Scalar::Exact(r) => Float::with_val(precision, r),
            Scalar::Float(f) => Float::with_val(precision, f),
        }
    }

    /// The exact rational value; floats convert without rounding.
    pub fn to_rational(&self) -> Option<Rational> {
        match self {
            Scalar::Exact(r) => Some(r.clone()),
            Scalar::Float(f) => f.to_rational(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => r.to_f64(),
            Scalar::Float(f) => f.to_f64(),
        }
    }

    /// `self + other`: exact when both are exact, else rounded at `precision`.
    pub fn add(&self, other: &Scalar, precision: u32) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(Rational::from(a + b)),
            _ => Scalar::Float(Float::with_val(
                precision,
                self.to_float(precision + 32) + other.to_float(precision + 32),
            )),
        }
    }

    pub fn sub(&self, other: &Scalar, precision: u32) -> Scalar {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Scalar::Exact(Rational::from(a - b)),
            _ => Scalar::Float(Float::with_val(
                precision,
                self.to_float(precision + 32) - other.to_float(precision + 32),
            )),
        }
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(a) => Scalar::Exact(Rational::from(-a)),
            Scalar::Float(f) => Scalar::Float(Float::with_val(f.prec(), -f)),
        }
    }

    /// `|self - other| <= tol`; exact values compare exactly when `tol` is `None`.
    pub fn approx_eq(&self, other: &Scalar, tol: Option<&Float>) -> bool {
        match (self, other, tol) {
            (Scalar::Exact(a), Scalar::Exact(b), _) => a == b,
            (_, _, Some(t)) => {
                let p = t.prec().max(crate::scalar::DEFAULT_PRECISION) + 64;
                Float::with_val(p, self.to_float(p) - other.to_float(p)).abs() <= *t
            }
            _ => self.cmp_value(other) == Ordering::Equal,
        }
    }

    pub fn cmp_value(&self, other: &Scalar) -> Ordering {
        let ord = match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Some(a.cmp(b)),
            (Scalar::Exact(a), Scalar::Float(b)) => a.partial_cmp(b),
            (Scalar::Float(a), Scalar::Exact(b)) => a.partial_cmp(b),
            (Scalar::Float(a), Scalar::Float(b)) => a.partial_cmp(b),
        };
        ord.expect("scalars are never NaN")
    }
}

impl From<Rational> for Scalar {
    fn from(r: Rational) -> Self {
        Scalar::Exact(r)
    }
}

impl From<Float> for Scalar {
    fn from(f: Float) -> Self {
        Scalar::Float(f)
    }
}

impl From<ExactScalar> for Scalar {
    fn from(e: ExactScalar) -> Self {
        Scalar::Exact(e.0)
    }
}

impl From<BigScalar> for Scalar {
    fn from(b: BigScalar) -> Self {
        Scalar::Float(b.0)
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => f.write_str(&format_rational(r)),
            Scalar::Float(x) => f.write_str(&format_float(x)),
        }
    }
}

/// `p` for integers, `p/q` otherwise.
pub fn format_rational(r: &Rational) -> String {
    if *r.denom() == 1 {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Decimal scientific form with enough digits to identify the float.
pub fn format_float(x: &Float) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    let digits = (x.prec() as f64 * std::f64::consts::LOG10_2).ceil() as usize + 1;
    x.to_string_radix(10, Some(digits))
}

/// Parses an optional-sign integer, `p/q`, or a decimal literal such as
/// `-1.25` or `3e-2` into an exact rational.
pub fn parse_rational(text: &str) -> Result<Rational> {
    let s = text.trim();
    if s.is_empty() {
        return Err(Error::InvalidInput("empty number".into()));
    }
    let bad = || Error::InvalidInput(format!("not a number: `{s}`"));
    if let Some((p, q)) = s.split_once('/') {
        let p = Integer::from_str(p.trim()).map_err(|_| bad())?;
        let q = Integer::from_str(q.trim()).map_err(|_| bad())?;
        if q == 0 {
            return Err(Error::InvalidInput(format!("zero denominator in `{s}`")));
        }
        return Ok(Rational::from((p, q)));
    }
    if is_decimal_literal(s) {
        return parse_decimal_exact(s).ok_or_else(bad);
    }
    Integer::from_str(s).map(Rational::from).map_err(|_| bad())
}

pub(crate) fn is_decimal_literal(s: &str) -> bool {
    s.contains(['.', 'e', 'E'])
}

fn parse_decimal_exact(s: &str) -> Option<Rational> {
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().ok()?),
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return None;
    }
    if !int_part.bytes().chain(frac_part.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{int_part}{frac_part}");
    let mut value = Rational::from(Integer::from_str(&digits).ok()?);
    let scale = exponent - frac_part.len() as i32;
    let power = Integer::from(Integer::u_pow_u(10, scale.unsigned_abs()));
    if scale >= 0 {
        value *= power;
    } else {
        value /= power;
    }
    if neg {
        value = -value;
    }
    Some(value)
}

/// Parses a decimal literal into a float correctly rounded at `precision`.
pub fn parse_float(text: &str, precision: u32) -> Result<Float> {
    let s = text.trim();
    let parsed = Float::parse(s).map_err(|_| Error::InvalidInput(format!("not a number: `{s}`")))?;
    Ok(Float::with_val(precision, parsed))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rationals_are_canonical() {
        let a = ExactScalar::new(6, -4).unwrap();
        assert_eq!(a.numerator(), &Integer::from(-3));
        assert_eq!(a.denominator(), &Integer::from(2));
        assert_eq!(a.to_string(), "-3/2");
        assert!(ExactScalar::new(1, 0).is_err());
    }

    #[test]
    fn parses_integer_fraction_and_decimal() {
        assert_eq!(parse_rational("-7").unwrap(), Rational::from(-7));
        assert_eq!(parse_rational(" 3/6 ").unwrap(), Rational::from((1, 2)));
        assert_eq!(parse_rational("0.125").unwrap(), Rational::from((1, 8)));
        assert_eq!(parse_rational("-1.5e2").unwrap(), Rational::from(-150));
        assert_eq!(parse_rational("25e-2").unwrap(), Rational::from((1, 4)));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn default_tolerance_is_half_precision() {
        let t = default_tolerance(128);
        assert_eq!(t, Float::with_val(128, Float::i_exp(1, -64)));
    }

    #[test]
    fn mixed_comparison() {
        let third = Scalar::Exact(Rational::from((1, 3)));
        let f = Scalar::Float(Float::with_val(128, 0.25));
        assert_eq!(third.cmp_value(&f), Ordering::Greater);
        assert_eq!(f.cmp_value(&third), Ordering::Less);
    }
}
