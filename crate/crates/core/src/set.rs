//! Sorted finite sets of scalars and the order-statistics the squeezing
//! arguments read off them: consecutive differences, convexity order, and
//! interval counts.
//!
//! Exact sets are stored over a common denominator. When the scaled
//! numerators fit in `i128` the set is a plain integer vector, which is what
//! makes million-element sumsets cheap; otherwise big integers or, for
//! unwieldy denominators, full rationals are used.

use std::cmp::Ordering;
use std::fmt;

use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::scalar::{self, Scalar};

/// Common denominators wider than this fall back to per-element rationals.
const MAX_SCALED_DEN_BITS: u32 = 1024;

/// Number mode of a set.
#[derive(Clone, Debug, PartialEq)]
pub enum Mode {
    Exact,
    Float { precision: u32, tolerance: Float },
}

#[derive(Clone, Debug)]
pub(crate) enum ExactElems {
    /// `nums[i] / den`, with `den > 0`.
    Small {
        den: Integer,
        nums: Vec<i128>,
    },
    Big {
        den: Integer,
        nums: Vec<Integer>,
    },
    Ratio(Vec<Rational>),
}

#[derive(Clone, Debug)]
pub(crate) struct FloatElems {
    pub values: Vec<Float>,
    pub precision: u32,
    pub tolerance: Float,
}

#[derive(Clone, Debug)]
pub(crate) enum Repr {
    Exact(ExactElems),
    Float(FloatElems),
}

/// A strictly increasing, duplicate-free collection of scalars, all exact or
/// all float. Float sets also keep their dedup tolerance: consecutive
/// elements differ by more than it.
#[derive(Clone, Debug)]
pub struct FiniteSet {
    pub(crate) repr: Repr,
}

/// `(a_2 - a_1, ..., a_n - a_{n-1})` in index order.
#[derive(Clone, Debug, PartialEq)]
pub struct ConsecutiveDifferenceSequence {
    pub values: Vec<Scalar>,
}

impl ConsecutiveDifferenceSequence {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl FiniteSet {
    pub fn from_rationals<I: IntoIterator<Item = Rational>>(values: I) -> Self {
        let mut v: Vec<Rational> = values.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSet { repr: Repr::Exact(ExactElems::from_sorted_rationals(v)) }
    }

    pub fn from_integers<I: IntoIterator<Item = i64>>(values: I) -> Self {
        let mut nums: Vec<i128> = values.into_iter().map(i128::from).collect();
        nums.sort_unstable();
        nums.dedup();
        FiniteSet { repr: Repr::Exact(ExactElems::Small { den: Integer::from(1), nums }) }
    }

    /// Float set at `precision`; values closer than `tolerance` are merged
    /// (the smallest of each run survives).
    pub fn from_floats<I: IntoIterator<Item = Float>>(values: I, precision: u32, tolerance: Float) -> Result<Self> {
        scalar::check_precision(precision)?;
        if tolerance.is_sign_negative() && !tolerance.is_zero() || tolerance.is_nan() {
            return Err(Error::InvalidInput("tolerance must be nonnegative".into()));
        }
        let mut v: Vec<Float> = values.into_iter().map(|x| Float::with_val(precision, x)).collect();
        if v.iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidInput("float set elements must be finite".into()));
        }
        v.sort_unstable_by(|a, b| a.total_cmp(b));
        let values = tolerance_merge(v, &tolerance);
        Ok(FiniteSet { repr: Repr::Float(FloatElems { values, precision, tolerance }) })
    }

    pub fn empty_exact() -> Self {
        FiniteSet { repr: Repr::Exact(ExactElems::Small { den: Integer::from(1), nums: Vec::new() }) }
    }

    pub fn empty_like(&self) -> Self {
        match &self.repr {
            Repr::Exact(_) => FiniteSet::empty_exact(),
            Repr::Float(f) => FiniteSet {
                repr: Repr::Float(FloatElems {
                    values: Vec::new(),
                    precision: f.precision,
                    tolerance: f.tolerance.clone(),
                }),
            },
        }
    }

    pub fn len(&self) -> usize {
        match &self.repr {
            Repr::Exact(e) => e.len(),
            Repr::Float(f) => f.values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.repr, Repr::Exact(_))
    }

    pub fn mode(&self) -> Mode {
        match &self.repr {
            Repr::Exact(_) => Mode::Exact,
            Repr::Float(f) => Mode::Float { precision: f.precision, tolerance: f.tolerance.clone() },
        }
    }

    /// Precision of a float set; `None` for exact sets.
    pub fn precision(&self) -> Option<u32> {
        match &self.repr {
            Repr::Exact(_) => None,
            Repr::Float(f) => Some(f.precision),
        }
    }

    pub fn tolerance(&self) -> Option<&Float> {
        match &self.repr {
            Repr::Exact(_) => None,
            Repr::Float(f) => Some(&f.tolerance),
        }
    }

    pub fn get(&self, i: usize) -> Option<Scalar> {
        if i >= self.len() {
            return None;
        }
        Some(match &self.repr {
            Repr::Exact(e) => Scalar::Exact(e.get(i)),
            Repr::Float(f) => Scalar::Float(f.values[i].clone()),
        })
    }

    pub fn min(&self) -> Option<Scalar> {
        self.get(0)
    }

    pub fn max(&self) -> Option<Scalar> {
        self.len().checked_sub(1).and_then(|i| self.get(i))
    }

    pub fn scalars(&self) -> Vec<Scalar> {
        (0..self.len()).filter_map(|i| self.get(i)).collect()
    }

    /// Elements as rationals; `None` for float sets.
    pub fn rationals(&self) -> Option<Vec<Rational>> {
        match &self.repr {
            Repr::Exact(e) => Some(e.to_rationals()),
            Repr::Float(_) => None,
        }
    }

    /// Elements as floats at `precision` (exact elements rounded once).
    pub fn floats(&self, precision: u32) -> Vec<Float> {
        match &self.repr {
            Repr::Exact(e) => e.to_rationals().iter().map(|r| Float::with_val(precision, r)).collect(),
            Repr::Float(f) => f.values.iter().map(|x| Float::with_val(precision, x)).collect(),
        }
    }

    /// Approximate values, for reporting and fitting only.
    pub fn to_f64s(&self) -> Vec<f64> {
        match &self.repr {
            Repr::Exact(e) => e.to_rationals().iter().map(|r| r.to_f64()).collect(),
            Repr::Float(f) => f.values.iter().map(|x| x.to_f64()).collect(),
        }
    }

    /// The same set in float mode.
    pub fn to_float_mode(&self, precision: u32, tolerance: Float) -> Result<FiniteSet> {
        FiniteSet::from_floats(self.floats(precision), precision, tolerance)
    }

    /// `{-x : x in self}`.
    pub fn negated(&self) -> FiniteSet {
        match &self.repr {
            Repr::Exact(ExactElems::Small { den, nums }) => FiniteSet {
                repr: Repr::Exact(ExactElems::Small {
                    den: den.clone(),
                    nums: nums.iter().rev().map(|n| -n).collect(),
                }),
            },
            Repr::Exact(e) => FiniteSet::from_rationals(e.to_rationals().into_iter().map(|r| -r)),
            Repr::Float(f) => FiniteSet {
                repr: Repr::Float(FloatElems {
                    values: f.values.iter().rev().map(|x| Float::with_val(f.precision, -x)).collect(),
                    precision: f.precision,
                    tolerance: f.tolerance.clone(),
                }),
            },
        }
    }

    /// Membership: exact equality in exact mode, within tolerance in float mode.
    pub fn contains(&self, x: &Scalar) -> bool {
        match &self.repr {
            Repr::Exact(e) => match x.to_rational() {
                Some(r) => e.contains(&r),
                None => false,
            },
            Repr::Float(f) => {
                let x = x.to_float(f.precision);
                let idx = f.values.partition_point(|v| *v < x);
                let near = |i: usize| {
                    f.values.get(i).is_some_and(|v| Float::with_val(f.precision, v - &x).abs() <= f.tolerance)
                };
                near(idx) || (idx > 0 && near(idx - 1))
            }
        }
    }

    /// Number of elements `<= bound` (or `< bound` when `strict`).
    pub(crate) fn rank(&self, bound: &Scalar, strict: bool) -> usize {
        match &self.repr {
            Repr::Exact(e) => {
                let b = bound.to_rational().expect("finite bound");
                e.rank(&b, strict)
            }
            Repr::Float(f) => f.values.partition_point(|v| {
                let ord = match bound {
                    Scalar::Exact(r) => v.partial_cmp(r),
                    Scalar::Float(g) => v.partial_cmp(g),
                }
                .expect("finite values");
                if strict {
                    ord == Ordering::Less
                } else {
                    ord != Ordering::Greater
                }
            }),
        }
    }

    pub(crate) fn check_same_mode(&self, other: &FiniteSet) -> Result<()> {
        if self.is_exact() != other.is_exact() {
            return Err(Error::ModeMismatch);
        }
        Ok(())
    }

    /// Parses the set file format: one scalar per line, `#` comments and
    /// blank lines ignored, order irrelevant. Integers and `p/q` are exact;
    /// a decimal literal anywhere switches the whole set to float mode
    /// unless `exact_decimals` is set, in which case decimals are read as
    /// exact rationals.
    pub fn parse_set_text(text: &str, exact_decimals: bool, precision: u32, tolerance: Float) -> Result<FiniteSet> {
        let lines: Vec<(usize, &str)> = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
            .collect();
        let float_mode =
            !exact_decimals && lines.iter().any(|(_, l)| !l.contains('/') && scalar::is_decimal_literal(l));
        let at_line = |n: usize, e: Error| Error::InvalidInput(format!("line {n}: {e}"));
        if float_mode {
            let mut values = Vec::with_capacity(lines.len());
            for (n, l) in lines {
                let v = if l.contains('/') {
                    Float::with_val(precision, scalar::parse_rational(l).map_err(|e| at_line(n, e))?)
                } else {
                    scalar::parse_float(l, precision).map_err(|e| at_line(n, e))?
                };
                values.push(v);
            }
            FiniteSet::from_floats(values, precision, tolerance)
        } else {
            let mut values = Vec::with_capacity(lines.len());
            for (n, l) in lines {
                values.push(scalar::parse_rational(l).map_err(|e| at_line(n, e))?);
            }
            Ok(FiniteSet::from_rationals(values))
        }
    }
}

impl PartialEq for FiniteSet {
    fn eq(&self, other: &Self) -> bool {
        if self.len() != other.len() {
            return false;
        }
        match (&self.repr, &other.repr) {
            (Repr::Exact(a), Repr::Exact(b)) => match (a, b) {
                (ExactElems::Small { den: da, nums: na }, ExactElems::Small { den: db, nums: nb }) => {
                    da == db && na == nb
                }
                _ => a.to_rationals() == b.to_rationals(),
            },
            (Repr::Float(a), Repr::Float(b)) => a.values == b.values,
            _ => false,
        }
    }
}

impl fmt::Display for FiniteSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, x) in self.scalars().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("}")
    }
}

impl ExactElems {
    pub(crate) fn from_sorted_rationals(v: Vec<Rational>) -> Self {
        let mut den = Integer::from(1);
        for r in &v {
            den.lcm_mut(r.denom());
            if den.significant_bits() > MAX_SCALED_DEN_BITS {
                return ExactElems::Ratio(v);
            }
        }
        let scaled: Vec<Integer> = v.iter().map(|r| r.numer() * Integer::from(&den / r.denom())).collect();
        if scaled.iter().all(|n| n.to_i128().is_some()) {
            let nums = scaled.iter().map(|n| n.to_i128().unwrap()).collect();
            ExactElems::Small { den, nums }
        } else {
            ExactElems::Big { den, nums: scaled }
        }
    }

    pub(crate) fn len(&self) -> usize {
        match self {
            ExactElems::Small { nums, .. } => nums.len(),
            ExactElems::Big { nums, .. } => nums.len(),
            ExactElems::Ratio(v) => v.len(),
        }
    }

    pub(crate) fn get(&self, i: usize) -> Rational {
        match self {
            ExactElems::Small { den, nums } => Rational::from((Integer::from(nums[i]), den.clone())),
            ExactElems::Big { den, nums } => Rational::from((nums[i].clone(), den.clone())),
            ExactElems::Ratio(v) => v[i].clone(),
        }
    }

    pub(crate) fn to_rationals(&self) -> Vec<Rational> {
        (0..self.len()).map(|i| self.get(i)).collect()
    }

    fn contains(&self, r: &Rational) -> bool {
        match self {
            ExactElems::Small { den, nums } => {
                let scaled = Rational::from(r * den);
                if *scaled.denom() != 1 {
                    return false;
                }
                match scaled.numer().to_i128() {
                    Some(n) => nums.binary_search(&n).is_ok(),
                    None => false,
                }
            }
            ExactElems::Big { den, nums } => {
                let scaled = Rational::from(r * den);
                *scaled.denom() == 1 && nums.binary_search(scaled.numer()).is_ok()
            }
            ExactElems::Ratio(v) => v.binary_search(r).is_ok(),
        }
    }

    fn rank(&self, bound: &Rational, strict: bool) -> usize {
        match self {
            ExactElems::Small { den, nums } => {
                let t = Rational::from(bound * den);
                // n <= t  <=>  n <= floor(t);  n < t  <=>  n < ceil(t)
                if strict {
                    let c = clamp_i128(&t.ceil_ref().into());
                    nums.partition_point(|n| *n < c)
                } else {
                    let fl = clamp_i128(&t.floor_ref().into());
                    nums.partition_point(|n| *n <= fl)
                }
            }
            ExactElems::Big { den, nums } => {
                let t = Rational::from(bound * den);
                if strict {
                    let c = Integer::from(t.ceil_ref());
                    nums.partition_point(|n| *n < c)
                } else {
                    let fl = Integer::from(t.floor_ref());
                    nums.partition_point(|n| *n <= fl)
                }
            }
            ExactElems::Ratio(v) => {
                if strict {
                    v.partition_point(|x| x < bound)
                } else {
                    v.partition_point(|x| x <= bound)
                }
            }
        }
    }
}

fn clamp_i128(r: &Rational) -> i128 {
    let n = r.numer();
    n.to_i128().unwrap_or(if *n > 0 { i128::MAX } else { i128::MIN })
}

/// Drops every element within `tol` of the last kept one. Input sorted.
pub(crate) fn tolerance_merge(sorted: Vec<Float>, tol: &Float) -> Vec<Float> {
    let mut out: Vec<Float> = Vec::with_capacity(sorted.len());
    for x in sorted {
        match out.last() {
            Some(last) if Float::with_val(x.prec(), &x - last) <= *tol => {}
            _ => out.push(x),
        }
    }
    out
}

/// Index-order consecutive differences; errors when `|A| < 2`.
pub fn consecutive_differences(a: &FiniteSet) -> Result<ConsecutiveDifferenceSequence> {
    if a.len() < 2 {
        return Err(Error::TooSmall { required: 2, actual: a.len() });
    }
    let values = match &a.repr {
        Repr::Exact(ExactElems::Small { den, nums }) => {
            nums.windows(2).map(|w| Scalar::Exact(Rational::from((Integer::from(w[1] - w[0]), den.clone())))).collect()
        }
        Repr::Exact(e) => {
            let v = e.to_rationals();
            v.windows(2).map(|w| Scalar::Exact(Rational::from(&w[1] - &w[0]))).collect()
        }
        Repr::Float(f) => {
            f.values.windows(2).map(|w| Scalar::Float(Float::with_val(f.precision, &w[1] - &w[0]))).collect()
        }
    };
    Ok(ConsecutiveDifferenceSequence { values })
}

/// Successive difference sequences of a sorted sequence, stopping when a
/// level fails `increasing` or would have fewer than one element.
fn monotone_levels<T, D, C>(seq: Vec<T>, k_cap: usize, diff: D, increasing: C) -> usize
where
    D: Fn(&T, &T) -> T,
    C: Fn(&T, &T) -> bool,
{
    let mut level = seq;
    let mut order = 0;
    while order < k_cap {
        let next: Vec<T> = level.windows(2).map(|w| diff(&w[1], &w[0])).collect();
        if next.windows(2).any(|w| !increasing(&w[0], &w[1])) {
            break;
        }
        order += 1;
        level = next;
    }
    order
}

/// Largest `k <= min(k_max, |A| - 2)` such that `A` is k-convex: every
/// difference level `D, D', ..., D^(k-1)` is strictly increasing. Sets with
/// fewer than three elements report 0.
pub fn convexity_order(a: &FiniteSet, k_max: usize) -> usize {
    order_with(a, k_max, false)
}

/// The reflected notion: the convexity order of `-A`. A set is k-concave
/// exactly when its reflection is k-convex.
pub fn concavity_order(a: &FiniteSet, k_max: usize) -> usize {
    order_with(&a.negated(), k_max, false)
}

fn order_with(a: &FiniteSet, k_max: usize, _reflected: bool) -> usize {
    let cap = k_max.min(a.len().saturating_sub(2));
    if cap == 0 {
        return 0;
    }
    match &a.repr {
        Repr::Exact(ExactElems::Small { nums, .. }) => monotone_levels(nums.clone(), cap, |x, y| x - y, |x, y| x < y),
        Repr::Exact(e) => monotone_levels(e.to_rationals(), cap, |x, y| Rational::from(x - y), |x, y| x < y),
        Repr::Float(f) => {
            let p = f.precision;
            monotone_levels(f.values.clone(), cap, |x, y| Float::with_val(p, x - y), |x, y| x < y)
        }
    }
}

/// `|S ∩ (lo, hi]|` when `right_closed`, `|S ∩ (lo, hi)|` otherwise.
pub fn interval_count(s: &FiniteSet, lo: &Scalar, hi: &Scalar, right_closed: bool) -> Result<usize> {
    if lo.cmp_value(hi) != Ordering::Less {
        return Err(Error::BadInterval { lo: lo.to_string(), hi: hi.to_string() });
    }
    let upper = s.rank(hi, !right_closed);
    let lower = s.rank(lo, false);
    Ok(upper.saturating_sub(lower))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ints(v: &[i64]) -> FiniteSet {
        FiniteSet::from_integers(v.iter().copied())
    }

    #[test]
    fn construction_sorts_and_dedups() {
        let s = ints(&[4, 1, 2, 4, 1]);
        assert_eq!(s.len(), 3);
        assert_eq!(s.to_string(), "{1, 2, 4}");
        let r = FiniteSet::from_rationals([Rational::from((1, 2)), Rational::from((2, 4)), Rational::from(-1)]);
        assert_eq!(r.to_string(), "{-1, 1/2}");
    }

    #[test]
    fn float_sets_merge_within_tolerance() {
        let tol = Float::with_val(128, 1e-10);
        let s =
            FiniteSet::from_floats([1.0, 1.0 + 1e-12, 2.0, 0.5].map(|x| Float::with_val(128, x)), 128, tol).unwrap();
        assert_eq!(s.len(), 3);
        assert!(s.contains(&Scalar::Float(Float::with_val(128, 1.0 + 5e-11))));
        assert!(!s.contains(&Scalar::Float(Float::with_val(128, 1.5))));
    }

    #[test]
    fn differences_examples() {
        let d = consecutive_differences(&ints(&[1, 2, 4, 8])).unwrap();
        assert_eq!(d.values, vec![Scalar::int(1), Scalar::int(2), Scalar::int(4)]);
        let d = consecutive_differences(&ints(&[1, 2, 3])).unwrap();
        assert_eq!(d.values, vec![Scalar::int(1), Scalar::int(1)]);
        let d = consecutive_differences(&ints(&[0, 10])).unwrap();
        assert_eq!(d.values, vec![Scalar::int(10)]);
        assert_eq!(consecutive_differences(&ints(&[5])), Err(Error::TooSmall { required: 2, actual: 1 }));
    }

    #[test]
    fn convexity_examples() {
        assert_eq!(convexity_order(&ints(&[1, 2, 4, 8]), 5), 2);
        assert_eq!(convexity_order(&ints(&[1, 2, 3, 4]), 5), 0);
        assert_eq!(convexity_order(&ints(&[1, 4, 9, 16, 25]), 5), 1);
        assert_eq!(convexity_order(&ints(&[1, 2, 4, 8]), 1), 1);
        assert_eq!(convexity_order(&ints(&[3]), 5), 0);
        assert_eq!(convexity_order(&ints(&[3, 9]), 5), 0);
    }

    #[test]
    fn concave_reflection() {
        let a = ints(&[1, 2, 4, 8, 16]);
        assert_eq!(concavity_order(&a.negated(), 10), convexity_order(&a, 10));
        assert_eq!(concavity_order(&a, 10), 0);
    }

    #[test]
    fn convexity_in_float_mode() {
        let s = ints(&[1, 2, 4, 8]).to_float_mode(128, scalar::default_tolerance(128)).unwrap();
        assert_eq!(convexity_order(&s, 5), 2);
    }

    #[test]
    fn interval_count_examples() {
        let s: FiniteSet = ints(&(-2..=7).collect::<Vec<_>>());
        assert_eq!(interval_count(&s, &Scalar::int(1), &Scalar::int(4), false).unwrap(), 2);
        let s = ints(&[1, 2, 3]);
        assert_eq!(interval_count(&s, &Scalar::int(0), &Scalar::int(3), true).unwrap(), 3);
        assert_eq!(interval_count(&s, &Scalar::int(3), &Scalar::int(5), true).unwrap(), 0);
        assert!(matches!(interval_count(&s, &Scalar::int(3), &Scalar::int(3), true), Err(Error::BadInterval { .. })));
    }

    #[test]
    fn interval_count_rational_bounds_on_scaled_sets() {
        let s = FiniteSet::from_rationals((1..=6).map(|i| Rational::from((i, 3))));
        let lo = Scalar::Exact(Rational::from((1, 2)));
        let hi = Scalar::Exact(Rational::from((5, 3)));
        // 2/3, 1, 4/3, 5/3
        assert_eq!(interval_count(&s, &lo, &hi, true).unwrap(), 4);
        assert_eq!(interval_count(&s, &lo, &hi, false).unwrap(), 3);
    }

    #[test]
    fn parses_set_files() {
        let text = "# a comment\n4\n\n1/2\n-3\n4\n";
        let s = FiniteSet::parse_set_text(text, false, 128, scalar::default_tolerance(128)).unwrap();
        assert!(s.is_exact());
        assert_eq!(s.to_string(), "{-3, 1/2, 4}");
        let f = FiniteSet::parse_set_text("0.5\n1\n", false, 128, scalar::default_tolerance(128)).unwrap();
        assert!(!f.is_exact());
        assert_eq!(f.len(), 2);
        let e = FiniteSet::parse_set_text("0.5\n1\n", true, 128, scalar::default_tolerance(128)).unwrap();
        assert_eq!(e.to_string(), "{1/2, 1}");
        let err = FiniteSet::parse_set_text("1\nzzz\n", false, 128, scalar::default_tolerance(128));
        assert!(matches!(err, Err(Error::InvalidInput(m)) if m.starts_with("line 2")));
    }
}
