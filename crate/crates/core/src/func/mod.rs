//! The function language: parsing, symbolic differentiation, evaluation,
//! discrete derivatives, images of finite sets, and monotonicity pieces.

mod ast;
mod diff;
mod eval;
mod parse;
mod partition;

use std::fmt;

use rug::Float;

pub use ast::FunctionExpr;
pub use diff::{differentiate, nth_derivative};
pub use eval::{evaluate, evaluate_exact, evaluate_float, pi};
pub use parse::parse;
pub use partition::{monotone_partition, monotone_partition_with, MonotonePiece, DEFAULT_SAMPLES};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};
use crate::set::FiniteSet;

/// A compact interval `[lo, hi]` with `lo < hi`.
#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Scalar,
    pub hi: Scalar,
}

impl Interval {
    pub fn new(lo: Scalar, hi: Scalar) -> Result<Self> {
        if lo.cmp_value(&hi) != std::cmp::Ordering::Less {
            return Err(Error::BadInterval { lo: lo.to_string(), hi: hi.to_string() });
        }
        Ok(Interval { lo, hi })
    }

    /// Parses `a,b` with exact endpoints.
    pub fn parse(text: &str) -> Result<Self> {
        let (a, b) =
            text.split_once(',').ok_or_else(|| Error::InvalidInput(format!("interval must be `a,b`, got `{text}`")))?;
        Interval::new(Scalar::Exact(scalar::parse_rational(a)?), Scalar::Exact(scalar::parse_rational(b)?))
    }

    pub fn diameter(&self, precision: u32) -> Float {
        Float::with_val(precision, self.hi.to_float(precision) - self.lo.to_float(precision))
    }

    pub fn contains(&self, x: &Scalar) -> bool {
        use std::cmp::Ordering::*;
        self.lo.cmp_value(x) != Greater && x.cmp_value(&self.hi) != Greater
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// `Δ_d f` for a fixed positive shift.
#[derive(Clone, Debug, PartialEq)]
pub struct DiscreteDerivativeSpec {
    pub base: FunctionExpr,
    pub shift: Scalar,
}

impl DiscreteDerivativeSpec {
    pub fn new(base: FunctionExpr, shift: Scalar) -> Result<Self> {
        if shift.cmp_value(&Scalar::int(0)) != std::cmp::Ordering::Greater {
            return Err(Error::InvalidInput(format!("shift must be positive, got {shift}")));
        }
        Ok(DiscreteDerivativeSpec { base, shift })
    }
}

/// `x ↦ f(x + d) - f(x)`, with `d` folded in as an exact constant (a float
/// shift is converted without rounding).
pub fn discrete_derivative(spec: &DiscreteDerivativeSpec) -> FunctionExpr {
    let d = spec.shift.to_rational().expect("finite shift");
    let shifted = spec.base.substitute(&FunctionExpr::add(FunctionExpr::x(), FunctionExpr::Const(d)));
    FunctionExpr::sub(shifted, spec.base.clone())
}

/// Convenience form of [`discrete_derivative`].
pub fn delta(f: &FunctionExpr, d: &Scalar) -> Result<FunctionExpr> {
    Ok(discrete_derivative(&DiscreteDerivativeSpec::new(f.clone(), d.clone())?))
}

/// `{f(a) : a in A}`. Exact when `A` is exact and `f` is a rational
/// function; otherwise a float set at `precision`, merged at the source
/// set's tolerance (or the default one for that precision).
pub fn image(f: &FunctionExpr, a: &FiniteSet, precision: u32) -> Result<FiniteSet> {
    let tol = a.tolerance().cloned().unwrap_or_else(|| scalar::default_tolerance(precision));
    image_with_tolerance(f, a, precision, tol)
}

pub fn image_with_tolerance(f: &FunctionExpr, a: &FiniteSet, precision: u32, tolerance: Float) -> Result<FiniteSet> {
    if let Some(rs) = a.rationals() {
        if f.is_rational_function() {
            let vals = rs.iter().map(|r| evaluate_exact(f, r)).collect::<Result<Vec<_>>>()?;
            return Ok(FiniteSet::from_rationals(vals));
        }
    }
    scalar::check_precision(precision)?;
    let vals =
        a.scalars().iter().map(|x| evaluate(f, x, precision).map(|v| v.into_float())).collect::<Result<Vec<_>>>()?;
    FiniteSet::from_floats(vals, precision, tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rug::Rational;

    #[test]
    fn discrete_derivative_examples() {
        let x2 = parse("x^2").unwrap();
        let d = delta(&x2, &Scalar::int(1)).unwrap();
        assert_eq!(d, parse("(x + 1)^2 - x^2").unwrap());
        for t in [-3, 0, 5] {
            let v = evaluate_exact(&d, &Rational::from(t)).unwrap();
            assert_eq!(v, Rational::from(2 * t + 1));
        }
        let lin = delta(&FunctionExpr::x(), &Scalar::Exact(Rational::from((3, 7)))).unwrap();
        assert_eq!(lin, FunctionExpr::constant(Rational::from((3, 7))));
        assert!(delta(&x2, &Scalar::int(0)).is_err());
    }

    #[test]
    fn exp_shift_by_log_two() {
        let ln2 = Float::with_val(128, 2).ln();
        let d = delta(&parse("exp(x)").unwrap(), &Scalar::Float(ln2)).unwrap();
        let e = parse("exp(x)").unwrap();
        for t in [-2, -1, 0, 1, 2] {
            let x = Scalar::int(t);
            let a = evaluate(&d, &x, 128).unwrap().into_float();
            let b = evaluate(&e, &x, 128).unwrap().into_float();
            assert!(Float::with_val(128, &a - &b).abs() < 1e-20 * b.to_f64());
        }
    }

    #[test]
    fn image_examples() {
        let sq = parse("x^2").unwrap();
        let a = FiniteSet::from_integers([1, 2, 4]);
        assert_eq!(image(&sq, &a, 128).unwrap(), FiniteSet::from_integers([1, 4, 16]));
        let a = FiniteSet::from_integers([-1, 1]);
        assert_eq!(image(&sq, &a, 128).unwrap(), FiniteSet::from_integers([1]));
        let at = image(&parse("arctan(exp(x))").unwrap(), &FiniteSet::from_integers([0]), 128).unwrap();
        assert!(!at.is_exact());
        assert_eq!(at.get(0).unwrap().to_float(128), pi(128) / 4);
    }
}
