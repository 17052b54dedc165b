use super::ast::FunctionExpr as E;

/// Symbolic derivative with respect to `x`.
pub fn differentiate(f: &E) -> E {
    match f {
        E::Const(_) => E::int(0),
        E::Var => E::int(1),
        E::Neg(a) => E::neg(differentiate(a)),
        E::Add(a, b) => E::add(differentiate(a), differentiate(b)),
        E::Sub(a, b) => E::sub(differentiate(a), differentiate(b)),
        E::Mul(a, b) => E::add(E::mul(differentiate(a), (**b).clone()), E::mul((**a).clone(), differentiate(b))),
        E::Div(a, b) => E::div(
            E::sub(E::mul(differentiate(a), (**b).clone()), E::mul((**a).clone(), differentiate(b))),
            E::pow((**b).clone(), 2),
        ),
        E::Pow(a, n) => {
            if *n == 0 {
                return E::int(0);
            }
            E::mul(E::mul(E::int(*n as i64), E::pow((**a).clone(), n - 1)), differentiate(a))
        }
        E::Exp(a) => E::mul(f.clone(), differentiate(a)),
        E::Log(a) => E::div(differentiate(a), (**a).clone()),
        E::Sin(a) => E::mul(E::cos((**a).clone()), differentiate(a)),
        E::Cos(a) => E::neg(E::mul(E::sin((**a).clone()), differentiate(a))),
        E::Arctan(a) => E::div(differentiate(a), E::add(E::int(1), E::pow((**a).clone(), 2))),
    }
}

/// `f^(k)`.
pub fn nth_derivative(f: &E, k: usize) -> E {
    (0..k).fold(f.clone(), |g, _| differentiate(&g))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::parse::parse;

    #[test]
    fn examples() {
        assert_eq!(differentiate(&parse("x^3").unwrap()), parse("3*x^2").unwrap());
        assert_eq!(differentiate(&parse("arctan(exp(x))").unwrap()), parse("exp(x)/(1 + exp(x)^2)").unwrap());
        assert_eq!(differentiate(&E::int(7)), E::int(0));
        assert_eq!(nth_derivative(&parse("x^3").unwrap(), 3), E::int(6));
        assert_eq!(nth_derivative(&parse("x^3").unwrap(), 4), E::int(0));
    }
}
