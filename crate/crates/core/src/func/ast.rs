use std::fmt;

use rug::Rational;

/// Expression over the fixed catalog: rational constants, the variable `x`,
/// field operations, integer powers, and `exp`, `log`, `sin`, `cos`,
/// `arctan`.
///
/// Build expressions through the associated constructors; they apply only
/// domain-preserving simplifications (constant folding, identities with 0
/// and 1), never cancel a division or drop a partial subexpression.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FunctionExpr {
    Const(Rational),
    Var,
    Neg(Box<FunctionExpr>),
    Add(Box<FunctionExpr>, Box<FunctionExpr>),
    Sub(Box<FunctionExpr>, Box<FunctionExpr>),
    Mul(Box<FunctionExpr>, Box<FunctionExpr>),
    Div(Box<FunctionExpr>, Box<FunctionExpr>),
    Pow(Box<FunctionExpr>, i32),
    Exp(Box<FunctionExpr>),
    Log(Box<FunctionExpr>),
    Sin(Box<FunctionExpr>),
    Cos(Box<FunctionExpr>),
    Arctan(Box<FunctionExpr>),
}

use FunctionExpr as E;

impl FunctionExpr {
    pub fn x() -> Self {
        E::Var
    }

    pub fn constant(r: impl Into<Rational>) -> Self {
        E::Const(r.into())
    }

    pub fn int(v: i64) -> Self {
        E::Const(Rational::from(v))
    }

    pub fn as_const(&self) -> Option<&Rational> {
        match self {
            E::Const(c) => Some(c),
            _ => None,
        }
    }

    fn is_const_value(&self, v: i32) -> bool {
        matches!(self, E::Const(c) if *c == v)
    }

    /// True when the expression has no log, division, or negative power
    /// anywhere, so it is defined on the whole real line.
    pub fn is_total(&self) -> bool {
        match self {
            E::Const(_) | E::Var => true,
            E::Log(_) | E::Div(..) => false,
            E::Pow(b, n) => *n >= 0 && b.is_total(),
            E::Neg(a) | E::Exp(a) | E::Sin(a) | E::Cos(a) | E::Arctan(a) => a.is_total(),
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) => a.is_total() && b.is_total(),
        }
    }

    /// Whether the node itself is domain-restricted.
    pub fn is_partial_node(&self) -> bool {
        matches!(self, E::Log(_) | E::Div(..)) || matches!(self, E::Pow(_, n) if *n < 0)
    }

    /// No transcendental nodes: evaluable exactly over the rationals.
    pub fn is_rational_function(&self) -> bool {
        match self {
            E::Const(_) | E::Var => true,
            E::Exp(_) | E::Log(_) | E::Sin(_) | E::Cos(_) | E::Arctan(_) => false,
            E::Pow(b, _) | E::Neg(b) => b.is_rational_function(),
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => {
                a.is_rational_function() && b.is_rational_function()
            }
        }
    }

    /// Polynomial with rational coefficients: no division by a non-constant,
    /// no negative powers, no transcendental nodes.
    pub fn is_polynomial(&self) -> bool {
        match self {
            E::Const(_) | E::Var => true,
            E::Pow(b, n) => *n >= 0 && b.is_polynomial(),
            E::Neg(b) => b.is_polynomial(),
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) => a.is_polynomial() && b.is_polynomial(),
            E::Div(a, b) => a.is_polynomial() && matches!(**b, E::Const(ref c) if *c != 0),
            _ => false,
        }
    }

    /// Coefficients `c_0, c_1, ...` (trailing zeros trimmed) of a
    /// polynomial expression; `None` otherwise.
    pub fn polynomial_coefficients(&self) -> Option<Vec<Rational>> {
        fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
            while v.last().is_some_and(|c| *c == 0) {
                v.pop();
            }
            v
        }
        fn combine(a: Vec<Rational>, b: Vec<Rational>, sign: i32) -> Vec<Rational> {
            let n = a.len().max(b.len());
            let mut out = vec![Rational::new(); n];
            for (i, c) in a.into_iter().enumerate() {
                out[i] += c;
            }
            for (i, c) in b.into_iter().enumerate() {
                if sign > 0 {
                    out[i] += c;
                } else {
                    out[i] -= c;
                }
            }
            trim(out)
        }
        fn product(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
            if a.is_empty() || b.is_empty() {
                return Vec::new();
            }
            let mut out = vec![Rational::new(); a.len() + b.len() - 1];
            for (i, x) in a.iter().enumerate() {
                for (j, y) in b.iter().enumerate() {
                    out[i + j] += Rational::from(x * y);
                }
            }
            trim(out)
        }
        Some(match self {
            E::Const(c) => trim(vec![c.clone()]),
            E::Var => vec![Rational::new(), Rational::from(1)],
            E::Neg(a) => a.polynomial_coefficients()?.into_iter().map(|c| -c).collect(),
            E::Add(a, b) => combine(a.polynomial_coefficients()?, b.polynomial_coefficients()?, 1),
            E::Sub(a, b) => combine(a.polynomial_coefficients()?, b.polynomial_coefficients()?, -1),
            E::Mul(a, b) => product(&a.polynomial_coefficients()?, &b.polynomial_coefficients()?),
            E::Div(a, b) => {
                let d = b.as_const().filter(|c| **c != 0)?;
                a.polynomial_coefficients()?.into_iter().map(|c| c / d).collect()
            }
            E::Pow(a, n) if *n >= 0 => {
                let base = a.polynomial_coefficients()?;
                let mut acc = vec![Rational::from(1)];
                for _ in 0..*n {
                    acc = product(&acc, &base);
                }
                acc
            }
            _ => return None,
        })
    }

    pub fn neg(a: FunctionExpr) -> Self {
        match a {
            E::Const(c) => E::Const(-c),
            E::Neg(inner) => *inner,
            a => E::Neg(Box::new(a)),
        }
    }

    pub fn add(a: FunctionExpr, b: FunctionExpr) -> Self {
        match (a, b) {
            (E::Const(x), E::Const(y)) => E::Const(x + y),
            (a, b) if a.is_const_value(0) => b,
            (a, b) if b.is_const_value(0) => a,
            (a, b) => E::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: FunctionExpr, b: FunctionExpr) -> Self {
        match (a, b) {
            (E::Const(x), E::Const(y)) => E::Const(x - y),
            (a, b) if b.is_const_value(0) => a,
            (a, b) if a.is_const_value(0) => E::neg(b),
            // (e + c) - e = c, only when e has no domain restriction
            (E::Add(l, r), b) if *l == b && b.is_total() && r.as_const().is_some() => *r,
            (a, b) => E::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: FunctionExpr, b: FunctionExpr) -> Self {
        match (a, b) {
            (E::Const(x), E::Const(y)) => E::Const(x * y),
            (a, b) if a.is_const_value(1) => b,
            (a, b) if b.is_const_value(1) => a,
            (a, b) if a.is_const_value(0) && b.is_total() => a,
            (a, b) if b.is_const_value(0) && a.is_total() => b,
            (a, b) if a.is_const_value(-1) => E::neg(b),
            (a, b) if b.is_const_value(-1) => E::neg(a),
            (a, b) => E::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: FunctionExpr, b: FunctionExpr) -> Self {
        match (a, b) {
            (E::Const(x), E::Const(y)) if y != 0 => E::Const(x / y),
            (a, b) if b.is_const_value(1) => a,
            (a, b) => E::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(base: FunctionExpr, n: i32) -> Self {
        match base {
            E::Const(c) if n >= 0 || c != 0 => {
                let v = if n >= 0 {
                    rug::ops::Pow::pow(c, n.unsigned_abs())
                } else {
                    rug::ops::Pow::pow(c, n.unsigned_abs()).recip()
                };
                E::Const(v)
            }
            b if n == 1 => b,
            b if n == 0 && b.is_total() => E::int(1),
            b => E::Pow(Box::new(b), n),
        }
    }

    pub fn exp(a: FunctionExpr) -> Self {
        E::Exp(Box::new(a))
    }

    pub fn log(a: FunctionExpr) -> Self {
        E::Log(Box::new(a))
    }

    pub fn sin(a: FunctionExpr) -> Self {
        E::Sin(Box::new(a))
    }

    pub fn cos(a: FunctionExpr) -> Self {
        E::Cos(Box::new(a))
    }

    pub fn arctan(a: FunctionExpr) -> Self {
        E::Arctan(Box::new(a))
    }

    /// Replaces every occurrence of the variable by `by`.
    pub fn substitute(&self, by: &FunctionExpr) -> FunctionExpr {
        let s = |e: &FunctionExpr| e.substitute(by);
        match self {
            E::Const(_) => self.clone(),
            E::Var => by.clone(),
            E::Neg(a) => E::neg(s(a)),
            E::Add(a, b) => E::add(s(a), s(b)),
            E::Sub(a, b) => E::sub(s(a), s(b)),
            E::Mul(a, b) => E::mul(s(a), s(b)),
            E::Div(a, b) => E::div(s(a), s(b)),
            E::Pow(a, n) => E::pow(s(a), *n),
            E::Exp(a) => E::exp(s(a)),
            E::Log(a) => E::log(s(a)),
            E::Sin(a) => E::sin(s(a)),
            E::Cos(a) => E::cos(s(a)),
            E::Arctan(a) => E::arctan(s(a)),
        }
    }

    pub fn node_count(&self) -> usize {
        1 + match self {
            E::Const(_) | E::Var => 0,
            E::Neg(a) | E::Pow(a, _) | E::Exp(a) | E::Log(a) | E::Sin(a) | E::Cos(a) | E::Arctan(a) => a.node_count(),
            E::Add(a, b) | E::Sub(a, b) | E::Mul(a, b) | E::Div(a, b) => a.node_count() + b.node_count(),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            E::Add(..) | E::Sub(..) => 1,
            E::Mul(..) | E::Div(..) => 2,
            E::Neg(_) => 3,
            E::Pow(..) => 4,
            _ => 5,
        }
    }

    fn write_at(&self, f: &mut fmt::Formatter<'_>, min_prec: u8) -> fmt::Result {
        if self.precedence() < min_prec {
            f.write_str("(")?;
            self.write_at(f, 0)?;
            return f.write_str(")");
        }
        let call = |f: &mut fmt::Formatter<'_>, name: &str, a: &FunctionExpr| {
            write!(f, "{name}(")?;
            a.write_at(f, 0)?;
            f.write_str(")")
        };
        match self {
            E::Const(c) => {
                if *c.denom() == 1 && *c >= 0 {
                    write!(f, "{}", c.numer())
                } else if *c.denom() == 1 {
                    write!(f, "({})", c.numer())
                } else {
                    write!(f, "({}/{})", c.numer(), c.denom())
                }
            }
            E::Var => f.write_str("x"),
            E::Neg(a) => {
                f.write_str("-")?;
                a.write_at(f, 3)
            }
            E::Add(a, b) | E::Sub(a, b) => {
                a.write_at(f, 1)?;
                f.write_str(if matches!(self, E::Add(..)) { " + " } else { " - " })?;
                b.write_at(f, 2)
            }
            E::Mul(a, b) | E::Div(a, b) => {
                a.write_at(f, 2)?;
                f.write_str(if matches!(self, E::Mul(..)) { "*" } else { "/" })?;
                b.write_at(f, 3)
            }
            E::Pow(a, n) => {
                a.write_at(f, 5)?;
                write!(f, "^{n}")
            }
            E::Exp(a) => call(f, "exp", a),
            E::Log(a) => call(f, "log", a),
            E::Sin(a) => call(f, "sin", a),
            E::Cos(a) => call(f, "cos", a),
            E::Arctan(a) => call(f, "arctan", a),
        }
    }
}

/// Renders in the input grammar; reparsing gives back the same tree.
impl fmt::Display for FunctionExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_at(f, 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructors_fold_conservatively() {
        let x = E::x();
        assert_eq!(E::add(E::int(2), E::int(3)), E::int(5));
        assert_eq!(E::mul(E::int(1), x.clone()), x);
        assert_eq!(E::mul(E::int(0), x.clone()), E::int(0));
        let lg = E::log(x.clone());
        assert!(matches!(E::mul(E::int(0), lg.clone()), E::Mul(..)));
        assert!(matches!(E::div(x.clone(), x.clone()), E::Div(..)));
        assert_eq!(E::sub(E::add(x.clone(), E::int(4)), x.clone()), E::int(4));
        assert!(matches!(E::sub(E::add(lg.clone(), E::int(4)), lg), E::Sub(..)));
        assert_eq!(E::pow(E::int(2), -2), E::constant(Rational::from((1, 4))));
        assert_eq!(E::neg(E::neg(x.clone())), x);
    }

    #[test]
    fn classification() {
        let p = E::add(E::pow(E::x(), 3), E::div(E::x(), E::int(2)));
        assert!(p.is_polynomial() && !p.is_total());
        assert!(!E::div(E::int(1), E::x()).is_polynomial());
        assert!(E::div(E::int(1), E::x()).is_rational_function());
        assert!(!E::exp(E::x()).is_rational_function());
    }

    #[test]
    fn polynomial_expansion() {
        let e = E::sub(E::pow(E::add(E::x(), E::int(1)), 2), E::pow(E::x(), 2));
        assert_eq!(e.polynomial_coefficients().unwrap(), vec![Rational::from(1), Rational::from(2)]);
        assert_eq!(E::sub(E::x(), E::x()).polynomial_coefficients().unwrap(), Vec::<Rational>::new());
        assert!(E::exp(E::x()).polynomial_coefficients().is_none());
    }

    #[test]
    fn rendering() {
        let x = E::x();
        let e = E::sub(x.clone(), E::add(x.clone(), E::int(1)));
        assert_eq!(e.to_string(), "x - (x + 1)");
        let e = E::mul(E::int(3), E::pow(x.clone(), 2));
        assert_eq!(e.to_string(), "3*x^2");
        let e = E::pow(E::add(x.clone(), E::constant(Rational::from((-1, 2)))), -2);
        assert_eq!(e.to_string(), "(x + (-1/2))^-2");
        assert_eq!(E::arctan(E::exp(x)).to_string(), "arctan(exp(x))");
    }
}
