//! Squeezing constructions: explicit elements of iterated sumsets that sit
//! inside disjoint gaps, each carried with the signed generators that prove
//! membership.

use std::cmp::Ordering;

use rug::{Float, Rational};

use crate::error::{Error, Result};
use crate::func::{evaluate, evaluate_exact, monotone_partition, FunctionExpr, Interval};
use crate::scalar::{Scalar, DEFAULT_PRECISION};
use crate::set::{convexity_order, interval_count, FiniteSet};
use crate::sumset::{sumset, SignedSumSpec, SumsetMembership};

/// A sumset element with its proof: `value = Σ sign·generator`, and the
/// interval `(lower, upper]` (or `(lower, upper)`) it was squeezed into.
#[derive(Clone, Debug, PartialEq)]
pub struct WitnessedElement {
    pub value: Scalar,
    pub witness: Vec<(Scalar, i8)>,
    /// Gap index, or `[l, i]` for translate lists, or `[s]` for lemma output.
    pub tag: Vec<usize>,
    pub lower: Scalar,
    pub upper: Scalar,
    pub upper_closed: bool,
}

impl WitnessedElement {
    pub fn witness_sum(&self, precision: u32) -> Scalar {
        let mut acc = Scalar::int(0);
        for (g, s) in &self.witness {
            acc = if *s > 0 { acc.add(g, precision) } else { acc.sub(g, precision) };
        }
        acc
    }

    pub fn in_interval(&self) -> bool {
        let above = self.value.cmp_value(&self.lower) == Ordering::Greater;
        let below = match self.value.cmp_value(&self.upper) {
            Ordering::Less => true,
            Ordering::Equal => self.upper_closed,
            Ordering::Greater => false,
        };
        above && below
    }

    /// Sum matches (exactly, or to `tol`) and the value is in its interval.
    pub fn is_consistent(&self, tol: Option<&Float>) -> bool {
        let p = match &self.value {
            Scalar::Float(f) => f.prec(),
            Scalar::Exact(_) => DEFAULT_PRECISION,
        };
        self.witness_sum(p).approx_eq(&self.value, tol) && self.in_interval()
    }

    /// Number of `+` and `-` terms.
    pub fn shape(&self) -> (usize, usize) {
        let plus = self.witness.iter().filter(|(_, s)| *s > 0).count();
        (plus, self.witness.len() - plus)
    }
}

fn working_precision(a: &FiniteSet) -> u32 {
    a.precision().unwrap_or(DEFAULT_PRECISION)
}

fn require_order(a: &FiniteSet, k: usize) -> Result<()> {
    let order = convexity_order(a, k);
    if order < k {
        return Err(Error::NotConvex { order, required: k });
    }
    Ok(())
}

struct Raw {
    value: Scalar,
    terms: Vec<(usize, i8)>,
}

// Level-k witnesses of an increasing sequence; terms index into `seq`.
fn iterate(seq: &[Scalar], k: u32, precision: u32) -> Vec<(usize, Raw)> {
    if k == 0 {
        return seq.iter().enumerate().map(|(j, v)| (j, Raw { value: v.clone(), terms: vec![(j, 1)] })).collect();
    }
    let diffs: Vec<Scalar> = seq.windows(2).map(|w| w[1].sub(&w[0], precision)).collect();
    let inner = iterate(&diffs, k - 1, precision);
    let zero = Scalar::int(0);
    let mut out = Vec::new();
    for (i, d) in diffs.iter().enumerate() {
        for (_, w) in &inner {
            if w.value.cmp_value(&zero) != Ordering::Greater || w.value.cmp_value(d) == Ordering::Greater {
                continue;
            }
            let mut terms = Vec::with_capacity(2 * w.terms.len() + 1);
            terms.push((i, 1));
            for &(j, s) in &w.terms {
                terms.push((j + 1, s));
                terms.push((j, -s));
            }
            out.push((i, Raw { value: seq[i].add(&w.value, precision), terms }));
        }
    }
    out
}

fn to_witnessed(seq: &[Scalar], raw: Vec<(usize, Raw)>) -> Vec<WitnessedElement> {
    raw.into_iter()
        .map(|(i, r)| WitnessedElement {
            value: r.value,
            witness: r.terms.into_iter().map(|(j, s)| (seq[j].clone(), s)).collect(),
            tag: vec![i],
            lower: seq[i].clone(),
            upper: seq[i + 1].clone(),
            upper_closed: true,
        })
        .collect()
}

/// `a_i + (a_{j+1} - a_j)` for `j ≤ i`, placed in `(a_i, a_{i+1}]`.
pub fn squeeze_basic(a: &FiniteSet) -> Result<Vec<WitnessedElement>> {
    require_order(a, 1)?;
    let seq = a.scalars();
    Ok(to_witnessed(&seq, iterate(&seq, 1, working_precision(a))))
}

/// The `k`-fold recursion: into each gap `(a_i, a_{i+1}]` goes `a_i + x` for
/// every level-`(k-1)` witness `x ≤ d_i` of the difference sequence. Each
/// value is checked against `2^k A - (2^k - 1) A`.
pub fn squeeze_iterated(a: &FiniteSet, k: u32, cap: u64) -> Result<(usize, Vec<WitnessedElement>)> {
    if k == 0 {
        return Err(Error::InvalidInput("k must be positive".into()));
    }
    require_order(a, k as usize)?;
    let seq = a.scalars();
    let out = to_witnessed(&seq, iterate(&seq, k, working_precision(a)));
    if !out.is_empty() {
        let oracle = SumsetMembership::new(a, SignedSumSpec::doubling(k)?, cap)?;
        if let Some(bad) = out.iter().find(|w| !oracle.contains(&w.value)) {
            return Err(Error::PreconditionViolated(format!("squeezed value {} is not in the sumset", bad.value)));
        }
    }
    Ok((out.len(), out))
}

/// `f(x)`, exact when possible.
pub(crate) fn fvalue(f: &FunctionExpr, x: &Scalar, precision: u32) -> Result<Scalar> {
    if let (Some(r), true) = (x.as_rational(), f.is_rational_function()) {
        return evaluate_exact(f, r).map(Scalar::Exact);
    }
    Ok(Scalar::Float(evaluate(f, x, precision)?.into_float()))
}

/// Checks `f' > 0` and `f'' > 0` throughout `[lo, hi]`.
pub fn require_one_convex(f: &FunctionExpr, lo: &Scalar, hi: &Scalar, precision: u32) -> Result<()> {
    let iv = Interval::new(lo.clone(), hi.clone())?;
    let pieces = match monotone_partition(f, &iv, 1, precision) {
        Ok(p) => p,
        Err(Error::TooManyPieces { .. }) => {
            return Err(Error::PreconditionViolated(format!("{f} is not 1-convex on {iv}: f' or f'' changes sign")))
        }
        Err(e) => return Err(e),
    };
    match pieces.as_slice() {
        [p] if p.increasing && p.convex => Ok(()),
        [p] if !p.increasing => Err(Error::PreconditionViolated(format!("{f} is not increasing on {iv}"))),
        _ => Err(Error::PreconditionViolated(format!("{f} is not strictly convex on {iv}"))),
    }
}

/// `f(a) + Δ_d f(s)` for `s ∈ S`; each lands in `(f(a), f(a+d))` when `f`
/// is 1-convex and `sup S < a`.
pub fn squeeze_lemma_elements(
    f: &FunctionExpr,
    d: &Scalar,
    a: &Scalar,
    s: &FiniteSet,
    precision: u32,
) -> Result<Vec<WitnessedElement>> {
    if d.cmp_value(&Scalar::int(0)) != Ordering::Greater {
        return Err(Error::PreconditionViolated(format!("d must be positive, got {d}")));
    }
    let Some(sup) = s.max() else { return Ok(Vec::new()) };
    if sup.cmp_value(a) != Ordering::Less {
        return Err(Error::PreconditionViolated(format!("sup S = {sup} is not below a = {a}")));
    }
    let ad = a.add(d, precision);
    require_one_convex(f, &s.min().unwrap(), &ad, precision)?;
    let fa = fvalue(f, a, precision)?;
    let fad = fvalue(f, &ad, precision)?;
    let mut out = Vec::with_capacity(s.len());
    for (idx, x) in s.scalars().into_iter().enumerate() {
        let xd = x.add(d, precision);
        let (fx, fxd) = (fvalue(f, &x, precision)?, fvalue(f, &xd, precision)?);
        let w = WitnessedElement {
            value: fa.add(&fxd, precision).sub(&fx, precision),
            witness: vec![(fa.clone(), 1), (fxd, 1), (fx, -1)],
            tag: vec![idx],
            lower: fa.clone(),
            upper: fad.clone(),
            upper_closed: false,
        };
        if !w.in_interval() {
            return Err(Error::PreconditionViolated(format!(
                "element {} escaped ({}, {}); f is not 1-convex here",
                w.value, w.lower, w.upper
            )));
        }
        out.push(w);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct GoodSubset {
    pub kept: FiniteSet,
    /// `b_i` with `i < |B|` that fail a condition; the last element is in neither list.
    pub rejected: FiniteSet,
    pub threshold_left: Rational,
    pub threshold_right: Rational,
}

fn sets_from(values: Vec<Scalar>, like: &FiniteSet) -> Result<FiniteSet> {
    match like.mode() {
        crate::set::Mode::Exact => Ok(FiniteSet::from_rationals(values.into_iter().map(|v| v.to_rational().unwrap()))),
        crate::set::Mode::Float { precision, tolerance } => {
            FiniteSet::from_floats(values.into_iter().map(|v| v.to_float(precision)), precision, tolerance)
        }
    }
}

fn value_set(values: &[Scalar], precision: u32) -> Result<FiniteSet> {
    if values.iter().all(|v| v.is_exact()) {
        Ok(FiniteSet::from_rationals(values.iter().map(|v| v.to_rational().unwrap())))
    } else {
        FiniteSet::from_floats(
            values.iter().map(|v| v.to_float(precision)),
            precision,
            crate::scalar::default_tolerance(precision),
        )
    }
}

/// `b_i` is good when both `|(2B-B) ∩ (b_i, b_{i+1}]|` and the matching count
/// for `F(B)` are at most four times their average.
pub fn good_elements(b: &FiniteSet, f: &FunctionExpr, cap: u64) -> Result<GoodSubset> {
    if b.len() < 3 {
        return Err(Error::TooSmall { required: 3, actual: b.len() });
    }
    let p = working_precision(b);
    let bs = b.scalars();
    let fb: Vec<Scalar> = bs.iter().map(|x| fvalue(f, x, p)).collect::<Result<_>>()?;
    if fb.windows(2).any(|w| w[0].cmp_value(&w[1]) != Ordering::Less) {
        return Err(Error::PreconditionViolated(format!("{f} is not increasing on the set")));
    }
    let fset = value_set(&fb, p)?;
    let spec = SignedSumSpec::new(2, 1)?;
    let sb = sumset(b, b, spec, cap)?;
    let sf = sumset(&fset, &fset, spec, cap)?;
    let n = bs.len();
    let total_b = interval_count(&sb, &bs[0], &bs[n - 1], true)?;
    let total_f = interval_count(&sf, &fb[0], &fb[n - 1], true)?;
    let threshold_left = Rational::from((4 * total_b as u64, n as u64));
    let threshold_right = Rational::from((4 * total_f as u64, n as u64));
    let (mut kept, mut rejected) = (Vec::new(), Vec::new());
    for i in 0..n - 1 {
        let cb = interval_count(&sb, &bs[i], &bs[i + 1], true)?;
        let cf = interval_count(&sf, &fb[i], &fb[i + 1], true)?;
        if threshold_left >= cb as u64 && threshold_right >= cf as u64 {
            kept.push(bs[i].clone());
        } else {
            rejected.push(bs[i].clone());
        }
    }
    // the counts over consecutive gaps sum to the totals, so at most a
    // quarter of the gaps can fail each condition
    if kept.len() + 1 < n.div_ceil(2) {
        return Err(Error::HypothesisViolated(format!("only {} of {} elements are good", kept.len(), n)));
    }
    Ok(GoodSubset { kept: sets_from(kept, b)?, rejected: sets_from(rejected, b)?, threshold_left, threshold_right })
}

/// `b_i ↦ (b_{i+1} - b_i, F(b_{i+1}) - F(b_i))` over consecutive elements.
pub fn psi_map(bprime: &FiniteSet, f: &FunctionExpr) -> Result<Vec<(Scalar, Scalar)>> {
    let p = working_precision(bprime);
    let tol = bprime.tolerance().cloned();
    let bs = bprime.scalars();
    let fb: Vec<Scalar> = bs.iter().map(|x| fvalue(f, x, p)).collect::<Result<_>>()?;
    let tol = tol.or_else(|| (!fb.iter().all(|v| v.is_exact())).then(|| crate::scalar::default_tolerance(p)));
    let pairs: Vec<(Scalar, Scalar)> =
        (0..bs.len().saturating_sub(1)).map(|i| (bs[i + 1].sub(&bs[i], p), fb[i + 1].sub(&fb[i], p))).collect();
    for j in 0..pairs.len() {
        for i in 0..j {
            if pairs[i].0.approx_eq(&pairs[j].0, tol.as_ref()) && pairs[i].1.approx_eq(&pairs[j].1, tol.as_ref()) {
                return Err(Error::InjectivityViolation { first: i, second: j });
            }
        }
    }
    Ok(pairs)
}

/// One class `B_d = {b_i : b_{i+1} - b_i = d}`, members in increasing order.
#[derive(Clone, Debug, PartialEq)]
pub struct BdClass {
    pub difference: Scalar,
    pub members: Vec<Scalar>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BdDecomposition {
    /// Sorted by difference.
    pub classes: Vec<BdClass>,
}

impl BdDecomposition {
    /// `B_d(i)`: the `i` smallest members of class `class`.
    pub fn truncation(&self, class: usize, i: usize) -> &[Scalar] {
        let m = &self.classes[class].members;
        &m[..i.min(m.len())]
    }

    pub fn class_of(&self, d: &Scalar) -> Option<&BdClass> {
        self.classes.iter().find(|c| c.difference.cmp_value(d) == Ordering::Equal)
    }

    pub fn total(&self) -> usize {
        self.classes.iter().map(|c| c.members.len()).sum()
    }
}

/// Groups `b_1..b_{|B|-1}` by the gap that follows them. Float gaps within
/// the set's tolerance share a class.
pub fn bd_decomposition(b: &FiniteSet) -> Result<BdDecomposition> {
    if b.len() < 2 {
        return Err(Error::TooSmall { required: 2, actual: b.len() });
    }
    let p = working_precision(b);
    let bs = b.scalars();
    let mut gaps: Vec<(Scalar, usize)> = bs.windows(2).enumerate().map(|(i, w)| (w[1].sub(&w[0], p), i)).collect();
    gaps.sort_by(|x, y| x.0.cmp_value(&y.0).then(x.1.cmp(&y.1)));
    let tol = b.tolerance();
    let mut classes: Vec<(Scalar, Vec<usize>)> = Vec::new();
    for (d, i) in gaps {
        match classes.last_mut() {
            Some((d0, idx)) if d0.approx_eq(&d, tol) => idx.push(i),
            _ => classes.push((d, vec![i])),
        }
    }
    let classes = classes
        .into_iter()
        .map(|(difference, mut idx)| {
            idx.sort_unstable();
            BdClass { difference, members: idx.into_iter().map(|i| bs[i].clone()).collect() }
        })
        .collect();
    Ok(BdDecomposition { classes })
}

/// A minimal-length tuple, its disjoint left translates, and the squeezed
/// lists `T_l(i)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TupleSqueeze {
    pub tuple: Vec<Scalar>,
    /// `δ_l = a_l - a_0` for `l = 1..n`.
    pub shifts: Vec<Scalar>,
    pub translates: FiniteSet,
    /// `lists[l-1][i]` is `T_l(i)`, tagged `[l, i]`.
    pub lists: Vec<Vec<Vec<WitnessedElement>>>,
}

/// Leftmost window of `n+1` consecutive elements with minimal diameter.
fn minimal_window(seq: &[Scalar], n: usize, precision: u32) -> usize {
    let mut best = 0;
    let mut best_len = seq[n].sub(&seq[0], precision);
    for j in 1..seq.len() - n {
        let len = seq[j + n].sub(&seq[j], precision);
        if len.cmp_value(&best_len) == Ordering::Less {
            best = j;
            best_len = len;
        }
    }
    best
}

/// For `h_i < h_j` in `H`, `f(a_0-h_i) + f(a_l-h_j) - f(a_0-h_j)` lies in
/// `(f(a_0-h_i), f(a_l-h_i))` when `f` is 1-convex on the translated span.
pub fn tuple_squeeze_translates(a: &FiniteSet, n: usize, f: &FunctionExpr, precision: u32) -> Result<TupleSqueeze> {
    if n == 0 {
        return Err(Error::InvalidInput("n must be positive".into()));
    }
    if a.len() < n + 1 {
        return Err(Error::TooFewElements { required: n + 1, actual: a.len() });
    }
    let seq = a.scalars();
    let start = minimal_window(&seq, n, precision);
    let tuple: Vec<Scalar> = seq[start..=start + n].to_vec();
    let a0 = tuple[0].clone();
    let shifts: Vec<Scalar> = tuple[1..].iter().map(|x| x.sub(&a0, precision)).collect();
    let length = tuple[n].sub(&a0, precision);

    let mut h: Vec<Scalar> = Vec::new();
    for x in &seq {
        let ok = h.last().is_none_or(|last| x.sub(last, precision).cmp_value(&length) == Ordering::Greater);
        if ok {
            h.push(x.clone());
        }
    }
    let expected = a.len() / (2 * (n + 1));
    if h.len() < expected {
        return Err(Error::DisjointTranslateShortfall { found: h.len(), expected });
    }

    let mut lists = vec![vec![Vec::new(); h.len()]; n];
    if h.len() >= 2 {
        let lo = a0.sub(h.last().unwrap(), precision);
        let hi = tuple[n].sub(&h[0], precision);
        require_one_convex(f, &lo, &hi, precision)?;
        // f(a_l - h_j) for every l in 0..=n and every j
        let vals: Vec<Vec<Scalar>> = tuple
            .iter()
            .map(|t| h.iter().map(|hj| fvalue(f, &t.sub(hj, precision), precision)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        for l in 1..=n {
            for i in 0..h.len() {
                for j in i + 1..h.len() {
                    let w = WitnessedElement {
                        value: vals[0][i].add(&vals[l][j], precision).sub(&vals[0][j], precision),
                        witness: vec![(vals[0][i].clone(), 1), (vals[l][j].clone(), 1), (vals[0][j].clone(), -1)],
                        tag: vec![l, i],
                        lower: vals[0][i].clone(),
                        upper: vals[l][i].clone(),
                        upper_closed: false,
                    };
                    if !w.in_interval() {
                        return Err(Error::PreconditionViolated(format!(
                            "T_{l}({i}) element {} escaped ({}, {})",
                            w.value, w.lower, w.upper
                        )));
                    }
                    lists[l - 1][i].push(w);
                }
            }
        }
    }
    let translates = sets_from(h, a)?;
    Ok(TupleSqueeze { tuple, shifts, translates, lists })
}

/// Which pre-transform makes `f` and `f'` increasing.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Orientation {
    Identity,
    /// `-f`
    Negate,
    /// `f(-x)` on `-A`
    Reflect,
    /// `-f(-x)` on `-A`
    NegateReflect,
}

/// Rewrites `(f, A)` so that `f` is 1-convex on the span of the new set.
/// Negation and reflection preserve every sumset count.
pub fn normalize_orientation(
    f: &FunctionExpr,
    a: &FiniteSet,
    precision: u32,
) -> Result<(FunctionExpr, FiniteSet, Orientation)> {
    let (Some(lo), Some(hi)) = (a.min(), a.max()) else {
        return Err(Error::TooSmall { required: 2, actual: 0 });
    };
    let iv = Interval::new(lo, hi)?;
    let pieces = monotone_partition(f, &iv, 1, precision)
        .map_err(|_| Error::PreconditionViolated(format!("{f} or its derivative is not monotone on {iv}")))?;
    let p = &pieces[0];
    let reflected = || f.substitute(&FunctionExpr::neg(FunctionExpr::x()));
    Ok(match (p.increasing, p.convex) {
        (true, true) => (f.clone(), a.clone(), Orientation::Identity),
        (false, false) => (FunctionExpr::neg(f.clone()), a.clone(), Orientation::Negate),
        (false, true) => (reflected(), a.negated(), Orientation::Reflect),
        (true, false) => (FunctionExpr::neg(reflected()), a.negated(), Orientation::NegateReflect),
    })
}

/// A pair `a' < a` where `|(2A-A) ∩ (a', a]| = N` but `a - a' > d_N`.
#[derive(Clone, Debug, PartialEq)]
pub struct EquidistributionViolation {
    pub lower: Scalar,
    pub upper: Scalar,
    pub count: usize,
    pub bound: Scalar,
}

/// Checks every pair against the N-th smallest positive difference. A
/// non-empty result would contradict the counting argument.
pub fn equidistribution_violations(a: &FiniteSet, cap: u64) -> Result<Vec<EquidistributionViolation>> {
    if a.len() < 2 {
        return Ok(Vec::new());
    }
    let p = working_precision(a);
    let s = sumset(a, a, SignedSumSpec::new(2, 1)?, cap)?;
    let diffs = sumset(a, a, SignedSumSpec::new(1, 1)?, cap)?;
    let zero = Scalar::int(0);
    let positive: Vec<Scalar> =
        diffs.scalars().into_iter().filter(|d| d.cmp_value(&zero) == Ordering::Greater).collect();
    let seq = a.scalars();
    let mut out = Vec::new();
    for (i, lower) in seq.iter().enumerate() {
        for upper in &seq[i + 1..] {
            let count = interval_count(&s, lower, upper, true)?;
            let bound = positive[count.clamp(1, positive.len()) - 1].clone();
            let gap = upper.sub(lower, p);
            if gap.cmp_value(&bound) == Ordering::Greater && !gap.approx_eq(&bound, a.tolerance()) {
                out.push(EquidistributionViolation { lower: lower.clone(), upper: upper.clone(), count, bound });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::parse;
    use crate::sumset::DEFAULT_SIZE_CAP;

    fn ints(v: &[i64]) -> FiniteSet {
        FiniteSet::from_integers(v.iter().copied())
    }

    fn values(ws: &[WitnessedElement]) -> Vec<i64> {
        ws.iter().map(|w| w.value.to_f64() as i64).collect()
    }

    #[test]
    fn basic_on_powers_of_two() {
        let out = squeeze_basic(&ints(&[1, 2, 4, 8])).unwrap();
        assert_eq!(out.len(), 6);
        let last: Vec<_> = out.iter().filter(|w| w.tag == [2]).collect();
        assert_eq!(values(&last.into_iter().cloned().collect::<Vec<_>>()), [5, 6, 8]);
        for w in &out {
            assert!(w.is_consistent(None));
            assert_eq!(w.shape(), (2, 1));
        }
        assert!(matches!(squeeze_basic(&ints(&[1, 2, 3])), Err(Error::NotConvex { order: 0, required: 1 })));
    }

    #[test]
    fn iterated_matches_basic_at_one() {
        let a = ints(&[1, 2, 4, 8]);
        let (c, w) = squeeze_iterated(&a, 1, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(c, 6);
        assert_eq!(w, squeeze_basic(&a).unwrap());
        let (c, w) = squeeze_iterated(&a, 2, DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(c, 4);
        assert_eq!(values(&w), [4, 6, 7, 8]);
        for x in &w {
            assert!(x.is_consistent(None));
            assert_eq!(x.shape(), (4, 3));
        }
        assert!(matches!(squeeze_iterated(&a, 3, DEFAULT_SIZE_CAP), Err(Error::NotConvex { .. })));
    }

    #[test]
    fn lemma_elements() {
        let f = parse("x^2").unwrap();
        let out = squeeze_lemma_elements(&f, &Scalar::int(1), &Scalar::int(10), &ints(&[1, 2]), 128).unwrap();
        assert_eq!(values(&out), [103, 105]);
        assert!(out.iter().all(|w| w.is_consistent(None)));
        assert!(squeeze_lemma_elements(&f, &Scalar::int(1), &Scalar::int(10), &FiniteSet::empty_exact(), 128)
            .unwrap()
            .is_empty());
        let e = squeeze_lemma_elements(&f, &Scalar::int(1), &Scalar::int(2), &ints(&[1, 2]), 128);
        assert!(matches!(e, Err(Error::PreconditionViolated(_))));
        let e = squeeze_lemma_elements(&f, &Scalar::int(0), &Scalar::int(10), &ints(&[1]), 128);
        assert!(matches!(e, Err(Error::PreconditionViolated(_))));
        let e = squeeze_lemma_elements(&parse("x").unwrap(), &Scalar::int(1), &Scalar::int(10), &ints(&[1]), 128);
        assert!(matches!(e, Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn psi_examples() {
        let sq = parse("x^2").unwrap();
        let p = psi_map(&ints(&[1, 2, 4]), &sq).unwrap();
        let p: Vec<_> = p.iter().map(|(a, b)| (a.to_f64(), b.to_f64())).collect();
        assert_eq!(p, [(1.0, 3.0), (2.0, 12.0)]);
        assert_eq!(psi_map(&ints(&[1, 2]), &sq).unwrap().len(), 1);
        assert!(matches!(
            psi_map(&ints(&[1, 2, 3]), &parse("x").unwrap()),
            Err(Error::InjectivityViolation { first: 0, second: 1 })
        ));
    }

    #[test]
    fn bd_examples() {
        let d = bd_decomposition(&ints(&[1, 2, 3, 5])).unwrap();
        assert_eq!(d.classes.len(), 2);
        assert_eq!(d.classes[0].members, [Scalar::int(1), Scalar::int(2)]);
        assert_eq!(d.classes[1].difference, Scalar::int(2));
        assert_eq!(d.truncation(0, 1), [Scalar::int(1)]);
        let ap = bd_decomposition(&FiniteSet::from_integers((0..10).map(|i| 3 * i))).unwrap();
        assert_eq!(ap.classes.len(), 1);
        assert_eq!(ap.total(), 9);
        assert!(bd_decomposition(&ints(&[1])).is_err());
    }

    #[test]
    fn good_subset_bounds() {
        let sq = parse("x^2").unwrap();
        for b in [FiniteSet::from_integers(1..=8), ints(&[1, 2, 4, 8])] {
            let g = good_elements(&b, &sq, DEFAULT_SIZE_CAP).unwrap();
            assert_eq!(g.kept.len() + g.rejected.len(), b.len() - 1);
            assert!(g.kept.len() + 1 >= b.len().div_ceil(2));
        }
        assert!(matches!(good_elements(&ints(&[1, 2]), &sq, DEFAULT_SIZE_CAP), Err(Error::TooSmall { .. })));
    }

    #[test]
    fn translates_example() {
        let a = ints(&[1, 2, 3, 10, 20, 30, 40]);
        let t = tuple_squeeze_translates(&a, 2, &parse("exp(x)").unwrap(), 128).unwrap();
        assert_eq!(t.tuple, [Scalar::int(1), Scalar::int(2), Scalar::int(3)]);
        assert_eq!(t.shifts, [Scalar::int(1), Scalar::int(2)]);
        assert_eq!(t.translates, ints(&[1, 10, 20, 30, 40]));
        assert_eq!(t.lists[0][0].len(), 4);
        assert!(t.lists.iter().flatten().flatten().all(|w| w.in_interval()));

        let t = tuple_squeeze_translates(&ints(&[1, 2, 4]), 2, &parse("exp(x)").unwrap(), 128).unwrap();
        assert_eq!(t.translates.len(), 1);
        assert!(t.lists.iter().flatten().all(|l| l.is_empty()));
        assert!(matches!(
            tuple_squeeze_translates(&ints(&[1, 2]), 2, &parse("exp(x)").unwrap(), 128),
            Err(Error::TooFewElements { required: 3, actual: 2 })
        ));
    }

    #[test]
    fn orientation_cases() {
        let a = ints(&[1, 2, 3]);
        for (src, want) in [
            ("x^2", Orientation::Identity),
            ("-(x^2)", Orientation::Negate),
            ("1/x", Orientation::Reflect),
            ("log(x)", Orientation::NegateReflect),
        ] {
            let (g, b, o) = normalize_orientation(&parse(src).unwrap(), &a, 128).unwrap();
            assert_eq!(o, want, "{src}");
            require_one_convex(&g, &b.min().unwrap(), &b.max().unwrap(), 128).unwrap();
        }
    }

    #[test]
    fn equidistribution_small() {
        for a in [ints(&[1, 2, 4, 8, 16]), FiniteSet::from_integers(1..=10), ints(&[0, 1, 5, 6, 20])] {
            assert!(equidistribution_violations(&a, DEFAULT_SIZE_CAP).unwrap().is_empty());
        }
    }
}
