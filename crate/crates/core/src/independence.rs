//! Linear independence of function families.
//!
//! Numeric verdicts come from Wronskians sampled at Chebyshev nodes:
//! independence is certified by one sample where `|W|` clears a threshold,
//! dependence by a linear combination whose residual is negligible at every
//! sample. Polynomial families are decided exactly by coefficient rank.

use std::cmp::Ordering;

use rug::ops::Pow;
use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::func::{self, delta, evaluate_float, nth_derivative, FunctionExpr, Interval};
use crate::linalg;
use crate::scalar::{BigScalar, Scalar};

pub const DEFAULT_SAMPLES: usize = 64;

const GUARD_BITS: u32 = 32;

/// `{f_0, ..., f_{n-1}}` on a compact interval.
#[derive(Clone, Debug, PartialEq)]
pub struct FunctionFamily {
    pub members: Vec<FunctionExpr>,
    pub interval: Interval,
}

impl FunctionFamily {
    pub fn new(members: Vec<FunctionExpr>, interval: Interval) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::TooSmall { required: 1, actual: 0 });
        }
        Ok(FunctionFamily { members, interval })
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    NumericWronskian,
    ExactRank,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::NumericWronskian => "numeric_wronskian",
            Method::ExactRank => "exact_rank",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Evidence {
    /// A sample point with a large Wronskian.
    Witness { x: Float, wronskian_abs: Float },
    /// Coefficients (one fixed to 1) of a combination vanishing at every
    /// sample, and its largest residual.
    Combination { coefficients: Vec<Float>, residual: Float },
    /// Exact rank of the coefficient matrix.
    Rank { rank: usize, size: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceVerdict {
    pub independent: bool,
    pub evidence: Evidence,
    pub samples_used: usize,
    pub method: Method,
}

/// `2^(-precision/4)`: a sampled `|W|` above this certifies independence.
pub fn wronskian_threshold(precision: u32) -> Float {
    Float::with_val(precision, Float::i_exp(1, -((precision / 4) as i32)))
}

/// Wronskian matrix entries `f_j^(i)`, differentiated once up front.
struct WronskianPlan {
    rows: Vec<Vec<FunctionExpr>>,
}

impl WronskianPlan {
    fn new(members: &[FunctionExpr]) -> Self {
        let n = members.len();
        let mut rows = vec![members.to_vec()];
        for i in 1..n {
            rows.push(rows[i - 1].iter().map(func::differentiate).collect());
        }
        WronskianPlan { rows }
    }

    fn at(&self, x: &Float, precision: u32) -> Result<Float> {
        let work = precision + GUARD_BITS;
        let m = self
            .rows
            .iter()
            .map(|row| row.iter().map(|e| evaluate_float(e, x, work)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Float::with_val(precision, linalg::det_float(m, work)))
    }
}

/// `det [f_j^(i)(x)]`.
pub fn wronskian(family: &FunctionFamily, x: &Scalar, precision: u32) -> Result<BigScalar> {
    if !family.interval.contains(x) {
        return Err(Error::PreconditionViolated(format!("{x} lies outside {}", family.interval)));
    }
    let plan = WronskianPlan::new(&family.members);
    plan.at(&x.to_float(precision + GUARD_BITS), precision).map(BigScalar::new)
}

/// `count` Chebyshev points of the first kind inside the interval.
pub fn chebyshev_nodes(interval: &Interval, count: usize, precision: u32) -> Vec<Float> {
    let lo = interval.lo.to_float(precision);
    let hi = interval.hi.to_float(precision);
    let mid = Float::with_val(precision, &lo + &hi) / 2u32;
    let half = Float::with_val(precision, &hi - &lo) / 2u32;
    let pi = func::pi(precision);
    (0..count)
        .map(|s| {
            let angle = Float::with_val(precision, &pi * (2 * s as u32 + 1)) / (2 * count as u32);
            Float::with_val(precision, &mid + Float::with_val(precision, &half * angle.cos()))
        })
        .collect()
}

/// Whether the k-th derivatives of the family are linearly independent.
/// Polynomial families are decided by exact rank; everything else by the
/// sampled Wronskian (see [`is_k_independent_numeric`]).
pub fn is_k_independent(
    family: &FunctionFamily,
    k: usize,
    samples: usize,
    precision: u32,
) -> Result<IndependenceVerdict> {
    let derived: Vec<FunctionExpr> = family.members.iter().map(|f| nth_derivative(f, k)).collect();
    let polys: Option<Vec<Vec<Rational>>> = derived.iter().map(|g| g.polynomial_coefficients()).collect();
    if let Some(polys) = polys {
        let width = polys.iter().map(|p| p.len()).max().unwrap_or(0);
        let rows: Vec<Vec<Rational>> = polys
            .into_iter()
            .map(|mut p| {
                p.resize(width, Rational::new());
                p
            })
            .collect();
        let rank = if width == 0 { 0 } else { linalg::rank_exact(&rows) };
        let n = rows.len();
        return Ok(IndependenceVerdict {
            independent: rank == n,
            evidence: Evidence::Rank { rank, size: n },
            samples_used: 0,
            method: Method::ExactRank,
        });
    }
    numeric_verdict(&derived, &family.interval, samples, precision)
}

/// The sampled-Wronskian verdict, regardless of the family's shape.
pub fn is_k_independent_numeric(
    family: &FunctionFamily,
    k: usize,
    samples: usize,
    precision: u32,
) -> Result<IndependenceVerdict> {
    let derived: Vec<FunctionExpr> = family.members.iter().map(|f| nth_derivative(f, k)).collect();
    numeric_verdict(&derived, &family.interval, samples, precision)
}

fn numeric_verdict(
    members: &[FunctionExpr],
    interval: &Interval,
    samples: usize,
    precision: u32,
) -> Result<IndependenceVerdict> {
    crate::scalar::check_precision(precision)?;
    let n = members.len();
    if samples < n {
        return Err(Error::InvalidInput(format!("need at least {n} samples, got {samples}")));
    }
    let nodes = chebyshev_nodes(interval, samples, precision + GUARD_BITS);
    let plan = WronskianPlan::new(members);
    let mut best: Option<(Float, Float)> = None;
    for x in &nodes {
        let w = plan.at(x, precision)?.abs();
        if best.as_ref().is_none_or(|(_, b)| w > *b) {
            best = Some((x.clone(), w));
        }
    }
    let (wx, wmax) = best.expect("at least one sample");
    if wmax > wronskian_threshold(precision) {
        return Ok(IndependenceVerdict {
            independent: true,
            evidence: Evidence::Witness { x: Float::with_val(precision, wx), wronskian_abs: wmax },
            samples_used: samples,
            method: Method::NumericWronskian,
        });
    }

    // dependence: fix one coefficient to 1 and fit the rest
    let work = precision + GUARD_BITS;
    let values: Vec<Vec<Float>> = members
        .iter()
        .map(|g| nodes.iter().map(|x| evaluate_float(g, x, work)).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let scale =
        values
            .iter()
            .flatten()
            .map(|v| v.clone().abs())
            .fold(Float::with_val(work, 1), |a, v| if v > a { v } else { a });
    let tol = Float::with_val(work, &scale * Float::with_val(work, Float::i_exp(1, -((precision / 2) as i32))));
    let mut best_fit: Option<(Vec<Float>, Float)> = None;
    for pivot in 0..n {
        let others: Vec<Vec<Float>> = (0..n).filter(|&j| j != pivot).map(|j| values[j].clone()).collect();
        let target: Vec<Float> = values[pivot].iter().map(|v| Float::with_val(work, -v)).collect();
        let (c, residual) = linalg::least_squares(&others, &target, work);
        let mut coefficients = Vec::with_capacity(n);
        let mut it = c.into_iter();
        for j in 0..n {
            coefficients.push(if j == pivot {
                Float::with_val(precision, 1)
            } else {
                Float::with_val(precision, it.next().unwrap())
            });
        }
        if best_fit.as_ref().is_none_or(|(_, r)| residual.total_cmp(r) == Ordering::Less) {
            best_fit = Some((coefficients, residual));
        }
    }
    let (coefficients, residual) = best_fit.expect("n >= 1");
    if residual <= tol {
        return Ok(IndependenceVerdict {
            independent: false,
            evidence: Evidence::Combination { coefficients, residual: Float::with_val(precision, residual) },
            samples_used: samples,
            method: Method::NumericWronskian,
        });
    }
    Err(Error::Inconclusive {
        max_wronskian: wmax.to_string_radix(10, Some(6)),
        best_residual: residual.to_string_radix(10, Some(6)),
    })
}

/// Exact-rank report for the family `{Δ_{δ_i} f'}` of a polynomial `f`.
#[derive(Clone, Debug, PartialEq)]
pub struct PolynomialDeltaReport {
    pub verdict: IndependenceVerdict,
    pub degree: usize,
    pub rank: usize,
    /// Determinant of the rows `r = 1..n` of the shift matrix.
    pub minor_det: Rational,
    /// `Π_{i<j} (δ_i - δ_j) · Π δ_i`, equal to `minor_det` up to sign.
    pub closed_form: Rational,
}

fn check_shifts(shifts: &[Rational]) -> Result<()> {
    for (i, a) in shifts.iter().enumerate() {
        if *a == 0 {
            return Err(Error::PreconditionViolated(format!("shift {i} is zero")));
        }
        if let Some(j) = shifts[..i].iter().position(|b| b == a) {
            return Err(Error::PreconditionViolated(format!("shifts {j} and {i} are equal")));
        }
    }
    Ok(())
}

fn degree(coefficients: &[Rational]) -> Option<usize> {
    coefficients.iter().rposition(|c| *c != 0)
}

/// The `(m-1) × n` matrix with rows `(δ_1^r, ..., δ_n^r)`, `r = 1..m-1`.
pub fn shift_matrix(degree: usize, shifts: &[Rational]) -> Vec<Vec<Rational>> {
    (1..degree.max(1)).map(|r| shifts.iter().map(|d| d.clone().pow(r as u32)).collect()).collect()
}

/// Rank of [`shift_matrix`] with no degree requirement. `{Δ_{δ_i} f'}` is
/// independent exactly when this equals the number of shifts.
pub fn shift_matrix_rank(degree: usize, shifts: &[Rational]) -> usize {
    let m = shift_matrix(degree, shifts);
    if m.is_empty() {
        0
    } else {
        linalg::rank_exact(&m)
    }
}

/// Decides independence of `{Δ_{δ_i} f'}` for `f = Σ c_j x^j` of degree
/// `m >= n + 1` through the rank of the shift matrix.
pub fn polynomial_delta_independence(coefficients: &[Rational], shifts: &[Rational]) -> Result<PolynomialDeltaReport> {
    check_shifts(shifts)?;
    let n = shifts.len();
    let m = degree(coefficients).unwrap_or(0);
    if m < n + 1 {
        return Err(Error::DegreeTooLow { degree: m, required: n + 1 });
    }
    let matrix = shift_matrix(m, shifts);
    let rank = linalg::rank_exact(&matrix);
    let minor_det = linalg::det_exact(&matrix[..n]);
    let mut closed_form: Rational = shifts.iter().fold(Rational::from(1), |acc, d| acc * d);
    for i in 0..n {
        for j in i + 1..n {
            closed_form *= Rational::from(&shifts[i] - &shifts[j]);
        }
    }
    Ok(PolynomialDeltaReport {
        verdict: IndependenceVerdict {
            independent: rank == n,
            evidence: Evidence::Rank { rank, size: n },
            samples_used: 0,
            method: Method::ExactRank,
        },
        degree: m,
        rank,
        minor_det,
        closed_form,
    })
}

/// `C_1..C_4` of the arctan Wronskian numerator for `σ_i = e^{δ_i}`.
///
/// `C_2` carries the factor `(σ_3 - 1)` shared by the other three; the
/// numerator is `y^5 (C_1 y^4 + C_2 y^6 + C_3 y^8 + C_4 y^10)`.
pub fn arctan_wronskian_coefficients(s1: &Float, s2: &Float, s3: &Float) -> [Float; 4] {
    let p = s1.prec().max(s2.prec()).max(s3.prec());
    let f = |v: Float| Float::with_val(p, v);
    let one = || Float::with_val(p, 1);
    let common = f(Float::with_val(p, -16)
        * f(s1.clone() - one())
        * f(s1.clone() - s2)
        * f(s2.clone() - one())
        * f(s1.clone() - s3)
        * f(s2.clone() - s3)
        * f(s3.clone() - one()));
    let m = |terms: &[(i64, u32, u32, u32)]| {
        let mut acc = Float::with_val(p, 0);
        for &(c, a, b, d) in terms {
            let t = f(Float::with_val(p, c) * f(s1.clone().pow(a)) * f(s2.clone().pow(b)) * f(s3.clone().pow(d)));
            acc += t;
        }
        acc
    };
    let q1 = m(&[
        (-1, 1, 0, 0),
        (-1, 2, 0, 0),
        (-1, 0, 1, 0),
        (-2, 1, 1, 0),
        (-1, 2, 1, 0),
        (-1, 0, 2, 0),
        (-1, 1, 2, 0),
        (-1, 0, 0, 1),
        (-2, 1, 0, 1),
        (-1, 2, 0, 1),
        (-2, 0, 1, 1),
        (-2, 1, 1, 1),
        (-1, 0, 2, 1),
        (-1, 0, 0, 2),
        (-1, 1, 0, 2),
        (-1, 0, 1, 2),
    ]);
    let q2 = m(&[(3, 1, 1, 1), (3, 2, 1, 1), (3, 1, 2, 1), (3, 1, 1, 2)]);
    let q3 = m(&[(-3, 2, 2, 1), (-3, 2, 1, 2), (-3, 1, 2, 2), (-3, 2, 2, 2)]);
    let q4 = m(&[
        (1, 3, 2, 1),
        (1, 2, 3, 1),
        (1, 3, 3, 1),
        (1, 3, 1, 2),
        (2, 2, 2, 2),
        (2, 3, 2, 2),
        (1, 1, 3, 2),
        (2, 2, 3, 2),
        (1, 3, 3, 2),
        (1, 2, 1, 3),
        (1, 3, 1, 3),
        (1, 1, 2, 3),
        (2, 2, 2, 3),
        (1, 3, 2, 3),
        (1, 1, 3, 3),
        (1, 2, 3, 3),
    ]);
    [f(common.clone() * q1), f(common.clone() * q2), f(common.clone() * q3), f(common * q4)]
}

/// Closed form of `W(Δ_{δ_1} f', Δ_{δ_2} f', Δ_{δ_3} f')(x)` for
/// `f(x) = arctan(e^x)`:
///
/// `y^5 (C_1 y^4 + C_2 y^6 + C_3 y^8 + C_4 y^10) / ((1+y^2)^3 Π (1+σ_i^2 y^2)^3)`
/// with `y = e^x`. Repeated shifts give exactly 0.
pub fn arctan_wronskian_closed_form(d1: &Scalar, d2: &Scalar, d3: &Scalar, x: &Scalar, precision: u32) -> BigScalar {
    let p = precision + GUARD_BITS;
    let s: Vec<Float> = [d1, d2, d3].iter().map(|d| d.to_float(p).exp()).collect();
    let [c1, c2, c3, c4] = arctan_wronskian_coefficients(&s[0], &s[1], &s[2]);
    let y = x.to_float(p).exp();
    let y2 = Float::with_val(p, y.square_ref());
    // y^9 (C1 + y^2 (C2 + y^2 (C3 + y^2 C4)))
    let mut poly = c4;
    for c in [c3, c2, c1] {
        poly = Float::with_val(p, &poly * &y2) + c;
    }
    let num = poly * Float::with_val(p, y.clone().pow(9u32));
    let cube = |v: Float| v.pow(3u32);
    let mut den = cube(Float::with_val(p, &y2 + 1u32));
    for si in &s {
        den *= cube(Float::with_val(p, Float::with_val(p, si.square_ref()) * &y2) + 1u32);
    }
    BigScalar::new(Float::with_val(precision, num / den))
}

/// `f` and distinct positive shifts.
#[derive(Clone, Debug, PartialEq)]
pub struct DeltaFamilySpec {
    pub base: FunctionExpr,
    pub shifts: Vec<Scalar>,
}

impl DeltaFamilySpec {
    pub fn new(base: FunctionExpr, shifts: Vec<Scalar>) -> Result<Self> {
        for (i, d) in shifts.iter().enumerate() {
            if d.cmp_value(&Scalar::int(0)) != Ordering::Greater {
                return Err(Error::PreconditionViolated(format!("shift {i} = {d} is not positive")));
            }
            if let Some(j) = shifts[..i].iter().position(|e| e.cmp_value(d) == Ordering::Equal) {
                return Err(Error::PreconditionViolated(format!("shifts {j} and {i} are equal")));
            }
        }
        if shifts.is_empty() {
            return Err(Error::TooSmall { required: 1, actual: 0 });
        }
        Ok(DeltaFamilySpec { base, shifts })
    }

    pub fn members(&self) -> Result<Vec<FunctionExpr>> {
        self.shifts.iter().map(|d| delta(&self.base, d)).collect()
    }
}

/// `I ∩ (I - max δ) = [lo, hi - max δ]`.
pub fn delta_domain(interval: &Interval, shifts: &[Scalar]) -> Result<Interval> {
    let max = shifts.iter().max_by(|a, b| a.cmp_value(b)).ok_or(Error::TooSmall { required: 1, actual: 0 })?;
    let hi = match (&interval.hi, max) {
        (Scalar::Exact(h), Scalar::Exact(m)) => Scalar::Exact(Rational::from(h - m)),
        (h, m) => {
            let p = 256;
            Scalar::Float(Float::with_val(p, h.to_float(p) - m.to_float(p)))
        }
    };
    Interval::new(interval.lo.clone(), hi)
        .map_err(|_| Error::EmptyDomain(format!("{interval} shifted left by {max} leaves no interval")))
}

/// Whether `{Δ_{δ_i} f}` is 1-independent on `I ∩ (I - max δ)`.
pub fn delta_family_independence(
    spec: &DeltaFamilySpec,
    interval: &Interval,
    samples: usize,
    precision: u32,
) -> Result<IndependenceVerdict> {
    let domain = delta_domain(interval, &spec.shifts)?;
    let family = FunctionFamily::new(spec.members()?, domain)?;
    is_k_independent(&family, 1, samples, precision)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::parse;

    fn fam(src: &[&str], lo: i64, hi: i64) -> FunctionFamily {
        FunctionFamily::new(
            src.iter().map(|s| parse(s).unwrap()).collect(),
            Interval::new(Scalar::int(lo), Scalar::int(hi)).unwrap(),
        )
        .unwrap()
    }

    fn near(a: &Float, b: f64) -> bool {
        (a.to_f64() - b).abs() < 1e-30
    }

    #[test]
    fn wronskian_examples() {
        let x = Scalar::Exact(Rational::from((1, 3)));
        assert!(near(wronskian(&fam(&["sin(x)", "cos(x)"], 0, 1), &x, 128).unwrap().as_float(), -1.0));
        assert!(near(wronskian(&fam(&["1", "x"], 0, 1), &x, 128).unwrap().as_float(), 1.0));
        assert!(near(wronskian(&fam(&["x", "2*x"], 0, 1), &x, 128).unwrap().as_float(), 0.0));
    }

    #[test]
    fn k_independence_examples() {
        let v = is_k_independent_numeric(&fam(&["x^2", "x^3"], 1, 2), 1, 64, 128).unwrap();
        assert!(v.independent);
        let v = is_k_independent(&fam(&["x^2", "x^3"], 1, 2), 1, 64, 128).unwrap();
        assert!(v.independent && v.method == Method::ExactRank);
        let v = is_k_independent_numeric(&fam(&["x", "x^2"], 1, 2), 2, 64, 128).unwrap();
        assert!(!v.independent);
        let v = is_k_independent(&fam(&["sin(x)", "cos(x)"], 0, 1), 3, 64, 128).unwrap();
        assert!(v.independent);
    }

    #[test]
    fn dependent_transcendental_family() {
        let v = is_k_independent(&fam(&["exp(x)", "3*exp(x)", "sin(x)"], 0, 1), 0, 16, 128).unwrap();
        assert!(!v.independent);
        match v.evidence {
            Evidence::Combination { residual, .. } => assert!(residual < 1e-30),
            other => panic!("unexpected evidence {other:?}"),
        }
    }

    #[test]
    fn polynomial_delta_examples() {
        let c: Vec<Rational> = [0, 0, 0, 1].iter().map(|&v| Rational::from(v)).collect();
        let r = polynomial_delta_independence(&c, &[Rational::from(2), Rational::from(3)]).unwrap();
        assert!(r.verdict.independent);
        assert_eq!(r.minor_det.clone().abs(), 6);
        assert_eq!(r.closed_form.clone().abs(), r.minor_det.clone().abs());
        assert!(matches!(
            polynomial_delta_independence(&c, &[Rational::from(1), Rational::from(1)]),
            Err(Error::PreconditionViolated(_))
        ));
        let c2: Vec<Rational> = [0, 0, 1].iter().map(|&v| Rational::from(v)).collect();
        assert_eq!(
            polynomial_delta_independence(&c2, &[Rational::from(1), Rational::from(2)]),
            Err(Error::DegreeTooLow { degree: 2, required: 3 })
        );
    }

    #[test]
    fn arctan_closed_form_matches_numeric_wronskian() {
        let f = parse("arctan(exp(x))").unwrap();
        let fp = func::differentiate(&f);
        let ln = |v: u32| Scalar::Float(Float::with_val(160, v).ln());
        let ds = [ln(2), ln(3), ln(4)];
        let members: Vec<FunctionExpr> = ds.iter().map(|d| delta(&fp, d).unwrap()).collect();
        let family = FunctionFamily::new(members, Interval::new(Scalar::int(-1), Scalar::int(1)).unwrap()).unwrap();
        let x = Scalar::int(0);
        let numeric = wronskian(&family, &x, 128).unwrap().into_float();
        let closed = arctan_wronskian_closed_form(&ds[0], &ds[1], &ds[2], &x, 128).into_float();
        let rel = (Float::with_val(128, &numeric - &closed) / &numeric).abs();
        assert!(rel < 1e-20, "numeric {numeric} closed {closed}");
        let z = arctan_wronskian_closed_form(&ds[0], &ds[0], &ds[2], &x, 128);
        assert!(z.as_float().is_zero());
    }

    #[test]
    fn delta_family_examples() {
        let i = Interval::new(Scalar::int(0), Scalar::int(4)).unwrap();
        let spec = DeltaFamilySpec::new(parse("x^3").unwrap(), vec![Scalar::int(1), Scalar::int(2)]).unwrap();
        assert!(delta_family_independence(&spec, &i, 64, 128).unwrap().independent);
        let spec = DeltaFamilySpec::new(parse("x^2").unwrap(), vec![Scalar::int(1), Scalar::int(2)]).unwrap();
        assert!(!delta_family_independence(&spec, &i, 64, 128).unwrap().independent);
        let i2 = Interval::new(Scalar::int(-2), Scalar::int(2)).unwrap();
        let spec = DeltaFamilySpec::new(
            parse("arctan(exp(x))").unwrap(),
            vec![Scalar::int(1), Scalar::int(2), Scalar::int(3)],
        )
        .unwrap();
        assert!(delta_family_independence(&spec, &i2, 64, 128).unwrap().independent);
        let spec = DeltaFamilySpec::new(parse("x^3").unwrap(), vec![Scalar::int(4)]).unwrap();
        assert!(matches!(delta_family_independence(&spec, &i, 64, 128), Err(Error::EmptyDomain(_))));
    }
}
