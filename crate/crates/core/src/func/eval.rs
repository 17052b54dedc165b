use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Rational};

use super::ast::FunctionExpr as E;
use crate::error::{Error, Result};
use crate::scalar::{BigScalar, Scalar};

/// Extra bits carried through evaluation before the final rounding.
const GUARD_BITS: u32 = 32;

fn domain(node: &E, argument: &Float) -> Error {
    Error::Domain { node: node.to_string(), argument: argument.to_string_radix(10, Some(20)) }
}

/// Evaluates at working precision `prec` without the final rounding.
pub(crate) fn eval_float(f: &E, x: &Float, prec: u32) -> Result<Float> {
    let ev = |e: &E| eval_float(e, x, prec);
    Ok(match f {
        E::Const(c) => Float::with_val(prec, c),
        E::Var => Float::with_val(prec, x),
        E::Neg(a) => -ev(a)?,
        E::Add(a, b) => ev(a)? + ev(b)?,
        E::Sub(a, b) => ev(a)? - ev(b)?,
        E::Mul(a, b) => ev(a)? * ev(b)?,
        E::Div(a, b) => {
            let d = ev(b)?;
            if d.is_zero() {
                return Err(domain(f, &d));
            }
            ev(a)? / d
        }
        E::Pow(a, n) => {
            let base = ev(a)?;
            if *n < 0 && base.is_zero() {
                return Err(domain(f, &base));
            }
            base.pow(*n)
        }
        E::Exp(a) => ev(a)?.exp(),
        E::Log(a) => {
            let v = ev(a)?;
            if v <= 0 {
                return Err(domain(f, &v));
            }
            v.ln()
        }
        E::Sin(a) => ev(a)?.sin(),
        E::Cos(a) => ev(a)?.cos(),
        E::Arctan(a) => ev(a)?.atan(),
    })
}

/// `f(x)` rounded to `precision` bits.
pub fn evaluate(f: &E, x: &Scalar, precision: u32) -> Result<BigScalar> {
    Ok(BigScalar::new(evaluate_float(f, &x.to_float(precision + GUARD_BITS), precision)?))
}

/// Float-argument form of [`evaluate`].
pub fn evaluate_float(f: &E, x: &Float, precision: u32) -> Result<Float> {
    let work = precision + GUARD_BITS;
    let v = eval_float(f, &Float::with_val(work, x), work)?;
    if !v.is_finite() {
        return Err(domain(f, x));
    }
    Ok(Float::with_val(precision, v))
}

/// Exact value of a rational function at a rational point.
pub fn evaluate_exact(f: &E, x: &Rational) -> Result<Rational> {
    let ev = |e: &E| evaluate_exact(e, x);
    let exact_domain =
        |node: &E, v: &Rational| Error::Domain { node: node.to_string(), argument: crate::scalar::format_rational(v) };
    Ok(match f {
        E::Const(c) => c.clone(),
        E::Var => x.clone(),
        E::Neg(a) => -ev(a)?,
        E::Add(a, b) => ev(a)? + ev(b)?,
        E::Sub(a, b) => ev(a)? - ev(b)?,
        E::Mul(a, b) => ev(a)? * ev(b)?,
        E::Div(a, b) => {
            let d = ev(b)?;
            if d == 0 {
                return Err(exact_domain(f, &d));
            }
            ev(a)? / d
        }
        E::Pow(a, n) => {
            let base = ev(a)?;
            if *n < 0 {
                if base == 0 {
                    return Err(exact_domain(f, &base));
                }
                base.pow(n.unsigned_abs()).recip()
            } else {
                base.pow(*n as u32)
            }
        }
        _ => return Err(Error::InvalidInput(format!("`{f}` is transcendental and has no exact value"))),
    })
}

/// π at `precision` bits.
pub fn pi(precision: u32) -> Float {
    Float::with_val(precision, Constant::Pi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::parse::parse;

    #[test]
    fn examples() {
        let v = evaluate(&parse("x^2").unwrap(), &Scalar::int(3), 128).unwrap();
        assert_eq!(*v.as_float(), 9);
        let err = evaluate(&parse("log(x)").unwrap(), &Scalar::int(-1), 128).unwrap_err();
        assert!(matches!(err, Error::Domain { ref node, .. } if node == "log(x)"));
        let v = evaluate(&parse("arctan(exp(x))").unwrap(), &Scalar::int(0), 128).unwrap();
        let quarter_pi = pi(128) / 4;
        assert_eq!(*v.as_float(), quarter_pi);
    }

    #[test]
    fn division_by_zero_is_a_domain_error() {
        let err = evaluate(&parse("1/(x - 2)").unwrap(), &Scalar::int(2), 128).unwrap_err();
        assert_eq!(err.code(), "domain_error");
        assert!(evaluate_exact(&parse("x^-1").unwrap(), &Rational::new()).is_err());
    }

    #[test]
    fn exact_evaluation() {
        let f = parse("(x^2 + 1)/(2*x)").unwrap();
        assert_eq!(evaluate_exact(&f, &Rational::from(3)).unwrap(), Rational::from((5, 3)));
        assert!(evaluate_exact(&parse("exp(x)").unwrap(), &Rational::new()).is_err());
    }

    #[test]
    fn within_a_few_ulps() {
        // sin^2 + cos^2 = 1 exercises cancellation-free composition
        let f = parse("sin(x)^2 + cos(x)^2").unwrap();
        for k in [-7, 1, 3, 50] {
            let v = evaluate(&f, &Scalar::Exact(Rational::from((k, 3))), 128).unwrap();
            let err = Float::with_val(128, v.as_float() - 1u32).abs();
            assert!(err <= Float::with_val(128, Float::i_exp(1, -125)));
        }
    }
}
