//! Signed sumsets `sA - tB` by iterated pairwise merges.
//!
//! Every step combines two sorted sets `X ± Y`. Each row `x ± Y` is already
//! sorted, so rows are concatenated into blocks, each block is sorted and
//! deduplicated, and the resulting runs are merged. Peak memory is a block
//! plus the output, never the full tuple count.
//!
//! The size cap bounds the number of pairs a single step may enumerate; a
//! step that would exceed it is refused before any allocation.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use ethnum::I256;
use rug::{Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::set::{ExactElems, FiniteSet, FloatElems, Repr};

/// Default per-step pair budget.
pub const DEFAULT_SIZE_CAP: u64 = 100_000_000;

const BLOCK: usize = 1 << 22;
const MAX_SCALED_DEN_BITS: u32 = 1024;

/// The shape `(s, t)` of `sA - tB`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedSumSpec {
    pub plus: u32,
    pub minus: u32,
}

impl SignedSumSpec {
    pub fn new(plus: u32, minus: u32) -> Result<Self> {
        if plus == 0 && minus == 0 {
            return Err(Error::InvalidSpec { plus, minus });
        }
        Ok(SignedSumSpec { plus, minus })
    }

    /// `(2^k, 2^k - 1)`.
    pub fn doubling(k: u32) -> Result<Self> {
        if k == 0 || k > 30 {
            return Err(Error::InvalidInput(format!("doubling level {k} out of range 1..=30")));
        }
        Ok(SignedSumSpec { plus: 1 << k, minus: (1 << k) - 1 })
    }

    pub fn terms(&self) -> u64 {
        self.plus as u64 + self.minus as u64
    }
}

impl fmt::Display for SignedSumSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.plus, self.minus)
    }
}

impl FromStr for SignedSumSpec {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("spec must be `s,t`, got `{s}`"));
        let (p, m) = s.split_once(',').ok_or_else(bad)?;
        let p = p.trim().parse().map_err(|_| bad())?;
        let m = m.trim().parse().map_err(|_| bad())?;
        SignedSumSpec::new(p, m)
    }
}

/// Element arithmetic for one number representation.
trait Arith<T> {
    fn add(&self, a: &T, b: &T) -> T;
    fn sub(&self, a: &T, b: &T) -> T;
    fn cmp(&self, a: &T, b: &T) -> Ordering;
    /// Whether `b` (>= `a`) merges into `a`.
    fn same(&self, a: &T, b: &T) -> bool;
}

struct OrdArith;

impl Arith<i128> for OrdArith {
    fn add(&self, a: &i128, b: &i128) -> i128 {
        a + b
    }
    fn sub(&self, a: &i128, b: &i128) -> i128 {
        a - b
    }
    fn cmp(&self, a: &i128, b: &i128) -> Ordering {
        a.cmp(b)
    }
    fn same(&self, a: &i128, b: &i128) -> bool {
        a == b
    }
}

impl Arith<I256> for OrdArith {
    fn add(&self, a: &I256, b: &I256) -> I256 {
        a + b
    }
    fn sub(&self, a: &I256, b: &I256) -> I256 {
        a - b
    }
    fn cmp(&self, a: &I256, b: &I256) -> Ordering {
        a.cmp(b)
    }
    fn same(&self, a: &I256, b: &I256) -> bool {
        a == b
    }
}

impl Arith<Integer> for OrdArith {
    fn add(&self, a: &Integer, b: &Integer) -> Integer {
        Integer::from(a + b)
    }
    fn sub(&self, a: &Integer, b: &Integer) -> Integer {
        Integer::from(a - b)
    }
    fn cmp(&self, a: &Integer, b: &Integer) -> Ordering {
        a.cmp(b)
    }
    fn same(&self, a: &Integer, b: &Integer) -> bool {
        a == b
    }
}

impl Arith<Rational> for OrdArith {
    fn add(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a + b)
    }
    fn sub(&self, a: &Rational, b: &Rational) -> Rational {
        Rational::from(a - b)
    }
    fn cmp(&self, a: &Rational, b: &Rational) -> Ordering {
        a.cmp(b)
    }
    fn same(&self, a: &Rational, b: &Rational) -> bool {
        a == b
    }
}

struct FloatArith {
    precision: u32,
    tolerance: Float,
}

impl Arith<Float> for FloatArith {
    fn add(&self, a: &Float, b: &Float) -> Float {
        Float::with_val(self.precision, a + b)
    }
    fn sub(&self, a: &Float, b: &Float) -> Float {
        Float::with_val(self.precision, a - b)
    }
    fn cmp(&self, a: &Float, b: &Float) -> Ordering {
        a.total_cmp(b)
    }
    fn same(&self, a: &Float, b: &Float) -> bool {
        Float::with_val(self.precision, b - a) <= self.tolerance
    }
}

fn check_cap(pairs: u128, cap: u64) -> Result<()> {
    if pairs > cap as u128 {
        return Err(Error::SizeCapExceeded { predicted: pairs, cap });
    }
    Ok(())
}

fn merge_runs<T: Clone, A: Arith<T>>(a: Vec<T>, b: Vec<T>, ar: &A) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(a.len() + b.len());
    let push = |v: T, out: &mut Vec<T>| match out.last() {
        Some(last) if ar.same(last, &v) => {}
        _ => out.push(v),
    };
    let mut ia = a.into_iter().peekable();
    let mut ib = b.into_iter().peekable();
    loop {
        let take_a = match (ia.peek(), ib.peek()) {
            (Some(x), Some(y)) => ar.cmp(x, y) != Ordering::Greater,
            (Some(_), None) => true,
            (None, Some(_)) => false,
            (None, None) => break,
        };
        let v = if take_a { ia.next() } else { ib.next() }.unwrap();
        push(v, &mut out);
    }
    out
}

fn sort_dedup<T, A: Arith<T>>(mut v: Vec<T>, ar: &A) -> Vec<T> {
    v.sort_unstable_by(|a, b| ar.cmp(a, b));
    let mut out: Vec<T> = Vec::with_capacity(v.len());
    for x in v {
        match out.last() {
            Some(last) if ar.same(last, &x) => {}
            _ => out.push(x),
        }
    }
    out
}

/// Accumulates sorted runs, merging neighbours of similar length.
struct RunStack<T> {
    runs: Vec<Vec<T>>,
}

impl<T: Clone> RunStack<T> {
    fn push<A: Arith<T>>(&mut self, run: Vec<T>, ar: &A) {
        self.runs.push(run);
        while self.runs.len() >= 2 {
            let n = self.runs.len();
            if self.runs[n - 2].len() > 2 * self.runs[n - 1].len() {
                break;
            }
            let top = self.runs.pop().unwrap();
            let below = self.runs.pop().unwrap();
            self.runs.push(merge_runs(below, top, ar));
        }
    }

    fn finish<A: Arith<T>>(mut self, ar: &A) -> Vec<T> {
        let mut acc = self.runs.pop().unwrap_or_default();
        while let Some(r) = self.runs.pop() {
            acc = merge_runs(r, acc, ar);
        }
        acc
    }
}

/// `X + Y` (or `X - Y` when `subtract`) as a sorted deduplicated vector.
/// With `symmetric` (only meaningful for `X + X`) pairs `i <= j` suffice.
fn combine<T: Clone, A: Arith<T>>(
    x: &[T],
    y: &[T],
    subtract: bool,
    symmetric: bool,
    ar: &A,
    cap: u64,
) -> Result<Vec<T>> {
    let (nx, ny) = (x.len() as u128, y.len() as u128);
    let pairs = if symmetric { nx * (nx + 1) / 2 } else { nx * ny };
    check_cap(pairs, cap)?;
    let mut stack = RunStack { runs: Vec::new() };
    let mut block: Vec<T> = Vec::with_capacity(BLOCK.min(pairs as usize));
    for (i, xi) in x.iter().enumerate() {
        if symmetric {
            block.extend(y[i..].iter().map(|yj| ar.add(xi, yj)));
        } else if subtract {
            block.extend(y.iter().rev().map(|yj| ar.sub(xi, yj)));
        } else {
            block.extend(y.iter().map(|yj| ar.add(xi, yj)));
        }
        if block.len() >= BLOCK {
            let full = std::mem::replace(&mut block, Vec::with_capacity(BLOCK));
            stack.push(sort_dedup(full, ar), ar);
        }
    }
    if !block.is_empty() {
        stack.push(sort_dedup(block, ar), ar);
    }
    Ok(stack.finish(ar))
}

/// `sX` by binary doubling.
fn multiple<T: Clone, A: Arith<T>>(x: &[T], s: u32, ar: &A, cap: u64) -> Result<Vec<T>> {
    debug_assert!(s >= 1);
    let mut acc: Option<Vec<T>> = None;
    let mut power = x.to_vec();
    let mut rem = s;
    loop {
        if rem & 1 == 1 {
            acc = Some(match acc {
                None => power.clone(),
                Some(a) => combine(&a, &power, false, false, ar, cap)?,
            });
        }
        rem >>= 1;
        if rem == 0 {
            break;
        }
        power = combine(&power, &power, false, true, ar, cap)?;
    }
    Ok(acc.unwrap())
}

fn negate_sorted<T: Clone, A: Arith<T>>(v: &[T], zero: &T, ar: &A) -> Vec<T> {
    v.iter().rev().map(|x| ar.sub(zero, x)).collect()
}

/// `sA - tB` in one representation. `doubling_k` selects the
/// `X_j = X_{j-1} + X_{j-1} - A` route when `A == B` and the shape is
/// `(2^k, 2^k - 1)`, reporting every level to `levels`.
fn engine<T: Clone, A: Arith<T>>(
    a: &[T],
    b: &[T],
    spec: SignedSumSpec,
    same_sets: bool,
    zero: &T,
    ar: &A,
    cap: u64,
    mut levels: Option<&mut Vec<Vec<T>>>,
) -> Result<Vec<T>> {
    if same_sets {
        if let Some(k) = doubling_level(spec) {
            let mut x = a.to_vec();
            for _ in 0..k {
                let doubled = combine(&x, &x, false, true, ar, cap)?;
                x = combine(&doubled, a, true, false, ar, cap)?;
                if let Some(l) = levels.as_deref_mut() {
                    l.push(x.clone());
                }
            }
            return Ok(x);
        }
    }
    let p = (spec.plus > 0).then(|| multiple(a, spec.plus, ar, cap)).transpose()?;
    let q = (spec.minus > 0).then(|| multiple(b, spec.minus, ar, cap)).transpose()?;
    match (p, q) {
        (Some(p), Some(q)) => combine(&p, &q, true, false, ar, cap),
        (Some(p), None) => Ok(p),
        (None, Some(q)) => Ok(negate_sorted(&q, zero, ar)),
        (None, None) => unreachable!("spec validated"),
    }
}

fn doubling_level(spec: SignedSumSpec) -> Option<u32> {
    let s = spec.plus;
    (s >= 2 && s.is_power_of_two() && spec.minus == s - 1).then(|| s.trailing_zeros())
}

/// Both exact sets over a common denominator.
enum Prepared {
    Small(Integer, Vec<i128>, Vec<i128>),
    // fixed width, no allocation per element; large common denominators land here
    Wide(Integer, Vec<I256>, Vec<I256>),
    Big(Integer, Vec<Integer>, Vec<Integer>),
    Ratio(Vec<Rational>, Vec<Rational>),
}

fn scaled(e: &ExactElems, den: &Integer) -> Option<Vec<Integer>> {
    match e {
        ExactElems::Small { den: d, nums } => {
            let f = Integer::from(den / d);
            Some(nums.iter().map(|n| Integer::from(*n) * &f).collect())
        }
        ExactElems::Big { den: d, nums } => {
            let f = Integer::from(den / d);
            Some(nums.iter().map(|n| Integer::from(n * &f)).collect())
        }
        ExactElems::Ratio(_) => None,
    }
}

fn elems_den(e: &ExactElems) -> Option<&Integer> {
    match e {
        ExactElems::Small { den, .. } | ExactElems::Big { den, .. } => Some(den),
        ExactElems::Ratio(_) => None,
    }
}

fn prepare(a: &ExactElems, b: &ExactElems, terms: u64) -> Prepared {
    let ratio = || Prepared::Ratio(a.to_rationals(), b.to_rationals());
    let (Some(da), Some(db)) = (elems_den(a), elems_den(b)) else {
        return ratio();
    };
    let den = Integer::from(da.lcm_ref(db));
    if den.significant_bits() > MAX_SCALED_DEN_BITS {
        return ratio();
    }
    let na = scaled(a, &den).unwrap();
    let nb = scaled(b, &den).unwrap();
    let max_bits = na.iter().chain(&nb).map(|n| n.significant_bits()).max().unwrap_or(0);
    let growth = 64 - terms.leading_zeros();
    if max_bits + growth < 126 {
        let conv = |v: Vec<Integer>| v.iter().map(|n| n.to_i128().unwrap()).collect();
        Prepared::Small(den, conv(na), conv(nb))
    } else if max_bits + growth < 254 {
        let conv = |v: Vec<Integer>| v.iter().map(to_wide).collect();
        Prepared::Wide(den, conv(na), conv(nb))
    } else {
        Prepared::Big(den, na, nb)
    }
}

fn to_wide(n: &Integer) -> I256 {
    let lo = Integer::from(n.keep_bits_ref(128)).to_u128().unwrap();
    let hi = Integer::from(n >> 128).to_i128().expect("fits 254 bits");
    I256::from_words(hi, lo as i128)
}

fn from_wide(w: &I256) -> Integer {
    let (hi, lo) = w.into_words();
    (Integer::from(hi) << 128) + lo as u128
}

/// Word operations the dense path may spend.
const DENSE_BUDGET: u128 = 1 << 31;

/// `dst |= src << by` (or `>> by`) on little-endian bit vectors of equal length.
fn shift_or(dst: &mut [u64], src: &[u64], by: usize, left: bool) {
    let (w, b) = (by / 64, (by % 64) as u32);
    let n = src.len();
    if w >= n {
        return;
    }
    if left {
        for i in (w..n).rev() {
            let lo = src[i - w] << b;
            let carry = if b > 0 && i > w { src[i - w - 1] >> (64 - b) } else { 0 };
            dst[i] |= lo | carry;
        }
    } else {
        for i in 0..n - w {
            let hi = src[i + w] >> b;
            let carry = if b > 0 && i + w + 1 < n { src[i + w + 1] << (64 - b) } else { 0 };
            dst[i] |= hi | carry;
        }
    }
}

/// `sA - tB` for integer-valued sets of small span, one copy of `A` or `B`
/// at a time on a bitset. `None` when the span or the work is too large;
/// the span is held to the size cap so memory stays within it.
fn dense(a: &[i128], b: &[i128], spec: SignedSumSpec, cap: u64) -> Option<Vec<i128>> {
    let (amin, bmin) = (a[0], b[0]);
    let mut g: i128 = 0;
    for v in a.iter().map(|x| x - amin).chain(b.iter().map(|y| y - bmin)) {
        g = gcd(g, v);
    }
    let g = g.max(1);
    let u: Vec<usize> = a.iter().map(|x| ((x - amin) / g) as usize).collect();
    let v: Vec<usize> = b.iter().map(|y| ((y - bmin) / g) as usize).collect();
    let (s, t) = (spec.plus as u128, spec.minus as u128);
    let low = t * *v.last().unwrap() as u128;
    let span = s * *u.last().unwrap() as u128 + low + 1;
    if span > cap as u128 {
        return None;
    }
    let words = span.div_ceil(64);
    let work = (s * u.len() as u128 + t * v.len() as u128) * words;
    if work > DENSE_BUDGET {
        return None;
    }
    let words = words as usize;
    let mut cur = vec![0u64; words];
    cur[(low / 64) as usize] = 1 << (low % 64);
    let steps = std::iter::repeat_n((&u, true), s as usize).chain(std::iter::repeat_n((&v, false), t as usize));
    for (elems, left) in steps {
        let mut next = vec![0u64; words];
        for &e in elems {
            shift_or(&mut next, &cur, e, left);
        }
        cur = next;
    }
    let base = s as i128 * amin - t as i128 * bmin - low as i128 * g;
    let mut out = Vec::new();
    for (i, &word) in cur.iter().enumerate() {
        let mut w = word;
        while w != 0 {
            let bit = w.trailing_zeros() as i128;
            out.push(base + (i as i128 * 64 + bit) * g);
            w &= w - 1;
        }
    }
    Some(out)
}

fn gcd(mut a: i128, mut b: i128) -> i128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a.abs()
}

/// Reduces `nums / den` to the canonical common denominator.
fn exact_from_scaled_small(den: Integer, nums: Vec<i128>) -> ExactElems {
    let mut g = den.clone();
    for n in &nums {
        if g == 1 {
            break;
        }
        g.gcd_mut(&Integer::from(*n));
    }
    if g == 1 {
        return ExactElems::Small { den, nums };
    }
    let gi = g.to_i128().expect("gcd divides the numerators");
    let den = den / &g;
    ExactElems::Small { den, nums: nums.into_iter().map(|n| n / gi).collect() }
}

fn exact_from_scaled_big(den: Integer, nums: Vec<Integer>) -> ExactElems {
    let mut g = den.clone();
    for n in &nums {
        if g == 1 {
            break;
        }
        g.gcd_mut(n);
    }
    let (den, nums): (Integer, Vec<Integer>) =
        if g == 1 { (den, nums) } else { (den / &g, nums.into_iter().map(|n| n / &g).collect()) };
    if nums.iter().all(|n| n.to_i128().is_some()) {
        ExactElems::Small { den, nums: nums.iter().map(|n| n.to_i128().unwrap()).collect() }
    } else {
        ExactElems::Big { den, nums }
    }
}

fn exact_set(e: ExactElems) -> FiniteSet {
    FiniteSet { repr: Repr::Exact(e) }
}

fn run(
    a: &FiniteSet,
    b: &FiniteSet,
    spec: SignedSumSpec,
    cap: u64,
    want_levels: bool,
) -> Result<(FiniteSet, Vec<FiniteSet>)> {
    a.check_same_mode(b)?;
    if a.is_empty() || b.is_empty() {
        return Err(Error::TooSmall { required: 1, actual: 0 });
    }
    let same = a == b;
    match (&a.repr, &b.repr) {
        (Repr::Exact(ea), Repr::Exact(eb)) => match prepare(ea, eb, spec.terms()) {
            Prepared::Small(den, na, nb) => {
                let wrap = |v: Vec<i128>| exact_set(exact_from_scaled_small(den.clone(), v));
                if !want_levels {
                    if let Some(out) = dense(&na, &nb, spec, cap) {
                        return Ok((wrap(out), Vec::new()));
                    }
                }
                let mut lv = Vec::new();
                let out = engine(&na, &nb, spec, same, &0, &OrdArith, cap, want_levels.then_some(&mut lv))?;
                Ok((wrap(out), lv.into_iter().map(wrap).collect()))
            }
            Prepared::Wide(den, na, nb) => {
                let mut lv = Vec::new();
                let out = engine(&na, &nb, spec, same, &I256::ZERO, &OrdArith, cap, want_levels.then_some(&mut lv))?;
                let wrap =
                    |v: Vec<I256>| exact_set(exact_from_scaled_big(den.clone(), v.iter().map(from_wide).collect()));
                Ok((wrap(out), lv.into_iter().map(wrap).collect()))
            }
            Prepared::Big(den, na, nb) => {
                let mut lv = Vec::new();
                let zero = Integer::new();
                let out = engine(&na, &nb, spec, same, &zero, &OrdArith, cap, want_levels.then_some(&mut lv))?;
                let wrap = |v: Vec<Integer>| exact_set(exact_from_scaled_big(den.clone(), v));
                Ok((wrap(out), lv.into_iter().map(wrap).collect()))
            }
            Prepared::Ratio(ra, rb) => {
                let mut lv = Vec::new();
                let zero = Rational::new();
                let out = engine(&ra, &rb, spec, same, &zero, &OrdArith, cap, want_levels.then_some(&mut lv))?;
                let wrap = |v: Vec<Rational>| exact_set(ExactElems::from_sorted_rationals(v));
                Ok((wrap(out), lv.into_iter().map(wrap).collect()))
            }
        },
        (Repr::Float(fa), Repr::Float(fb)) => {
            let precision = fa.precision.max(fb.precision);
            let tolerance = if fa.tolerance >= fb.tolerance { fa.tolerance.clone() } else { fb.tolerance.clone() };
            let ar = FloatArith { precision, tolerance: tolerance.clone() };
            let zero = Float::new(precision);
            let mut lv = Vec::new();
            let out = engine(&fa.values, &fb.values, spec, same, &zero, &ar, cap, want_levels.then_some(&mut lv))?;
            let wrap = |values: Vec<Float>| FiniteSet {
                repr: Repr::Float(FloatElems { values, precision, tolerance: tolerance.clone() }),
            };
            Ok((wrap(out), lv.into_iter().map(wrap).collect()))
        }
        _ => Err(Error::ModeMismatch),
    }
}

/// `{x_1 + ... + x_s - y_1 - ... - y_t : x_i in A, y_j in B}`, sorted and
/// deduplicated (exact equality, or tolerance merge for float sets).
pub fn sumset(a: &FiniteSet, b: &FiniteSet, spec: SignedSumSpec, cap: u64) -> Result<FiniteSet> {
    run(a, b, spec, cap, false).map(|(s, _)| s)
}

/// `[2A - A, 4A - 3A, ..., 2^k A - (2^k - 1) A]`, each level built from the
/// previous one.
pub fn iterated_sumsets(a: &FiniteSet, k: u32, cap: u64) -> Result<Vec<FiniteSet>> {
    let spec = SignedSumSpec::doubling(k)?;
    run(a, a, spec, cap, true).map(|(_, levels)| levels)
}

/// `|(2^k B - (2^k - 1) B) ∩ (min B, max B)|`, open at both ends.
pub fn n_k_count(b: &FiniteSet, k: u32, cap: u64) -> Result<usize> {
    if b.len() < 2 {
        return Err(Error::TooSmall { required: 2, actual: b.len() });
    }
    let s = sumset(b, b, SignedSumSpec::doubling(k)?, cap)?;
    open_span_count(&s, b)
}

/// Elements of `s` strictly between `min B` and `max B`.
pub(crate) fn open_span_count(s: &FiniteSet, b: &FiniteSet) -> Result<usize> {
    let lo: Scalar = b.min().expect("nonempty");
    let hi: Scalar = b.max().expect("nonempty");
    crate::set::interval_count(s, &lo, &hi, false)
}

/// Membership in `sA - tA` without materialising the whole sumset: the
/// shape is split as `L + R` with `L = s_1 A - t_1 A`, `R = s_2 A - t_2 A`,
/// and `v` is a member iff `v - l` is in `R` for some `l` in `L`.
#[derive(Clone, Debug)]
pub struct SumsetMembership {
    left: FiniteSet,
    right: Option<FiniteSet>,
}

impl SumsetMembership {
    pub fn new(a: &FiniteSet, spec: SignedSumSpec, cap: u64) -> Result<Self> {
        let (s1, t1) = (spec.plus.div_ceil(2), spec.minus / 2);
        let (s2, t2) = (spec.plus - s1, spec.minus - t1);
        let left = sumset(a, a, SignedSumSpec::new(s1, t1)?, cap)?;
        let right = if s2 + t2 == 0 { None } else { Some(sumset(a, a, SignedSumSpec::new(s2, t2)?, cap)?) };
        Ok(SumsetMembership { left, right })
    }

    pub fn contains(&self, v: &Scalar) -> bool {
        let Some(right) = &self.right else {
            return self.left.contains(v);
        };
        if let (
            Repr::Exact(ExactElems::Small { den: dl, nums: ln }),
            Repr::Exact(ExactElems::Small { den: dr, nums: rn }),
            Scalar::Exact(r),
        ) = (&self.left.repr, &right.repr, v)
        {
            if dl == dr {
                let scaled = Rational::from(r * dl);
                if *scaled.denom() != 1 {
                    return false;
                }
                let Some(t) = scaled.numer().to_i128() else { return false };
                return ln.iter().any(|l| t.checked_sub(*l).is_some_and(|x| rn.binary_search(&x).is_ok()));
            }
        }
        let p = self.left.precision().unwrap_or(crate::scalar::DEFAULT_PRECISION);
        self.left.scalars().iter().any(|l| right.contains(&v.sub(l, p)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn ints(v: &[i64]) -> FiniteSet {
        FiniteSet::from_integers(v.iter().copied())
    }

    fn brute(a: &[i64], s: u32, t: u32) -> BTreeSet<i64> {
        let mut acc: BTreeSet<i64> = [0].into();
        for _ in 0..s {
            acc = acc.iter().flat_map(|x| a.iter().map(move |y| x + y)).collect();
        }
        for _ in 0..t {
            acc = acc.iter().flat_map(|x| a.iter().map(move |y| x - y)).collect();
        }
        acc
    }

    fn as_i64(s: &FiniteSet) -> Vec<i64> {
        s.rationals().unwrap().iter().map(|r| r.numer().to_i64().unwrap()).collect()
    }

    #[test]
    fn spec_examples() {
        let a = ints(&[1, 2]);
        let s = sumset(&a, &a, SignedSumSpec::new(2, 1).unwrap(), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(as_i64(&s), vec![0, 1, 2, 3]);
        let a = ints(&[1, 2, 4, 8]);
        let s = sumset(&a, &a, SignedSumSpec::new(2, 1).unwrap(), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(s.len(), 21);
        let a = ints(&[5]);
        let s = sumset(&a, &a, SignedSumSpec::new(1, 0).unwrap(), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(as_i64(&s), vec![5]);
    }

    #[test]
    fn matches_brute_force_on_small_shapes() {
        let a = [0, 1, 3, 7, 12, 20];
        for s in 0..=4 {
            for t in 0..=3 {
                if s + t == 0 {
                    continue;
                }
                let got = sumset(&ints(&a), &ints(&a), SignedSumSpec::new(s, t).unwrap(), DEFAULT_SIZE_CAP).unwrap();
                let want: Vec<i64> = brute(&a, s, t).into_iter().collect();
                assert_eq!(as_i64(&got), want, "shape ({s},{t})");
            }
        }
    }

    #[test]
    fn different_sets_and_rationals() {
        let a = FiniteSet::from_rationals([Rational::from((1, 2)), Rational::from((1, 3))]);
        let b = FiniteSet::from_rationals([Rational::from((1, 6)), Rational::from(1)]);
        let s = sumset(&a, &b, SignedSumSpec::new(1, 1).unwrap(), DEFAULT_SIZE_CAP).unwrap();
        let want = FiniteSet::from_rationals([
            Rational::from((1, 3)),
            Rational::from((1, 6)),
            Rational::from((-1, 2)),
            Rational::from((-2, 3)),
        ]);
        assert_eq!(s, want);
        let neg = sumset(&a, &b, SignedSumSpec::new(0, 1).unwrap(), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(neg, b.negated());
    }

    #[test]
    fn large_values_take_the_big_path() {
        let big = 1i64 << 62;
        let a = FiniteSet::from_rationals([Rational::from(big) * Rational::from(big), Rational::from(1)]);
        let s = sumset(&a, &a, SignedSumSpec::new(3, 0).unwrap(), DEFAULT_SIZE_CAP).unwrap();
        assert_eq!(s.len(), 4);
        assert_eq!(s.max().unwrap(), Scalar::Exact(Rational::from(big) * Rational::from(big) * 3));
    }

    #[test]
    fn wide_path_matches_rationals() {
        // lcm of the denominators pushes scaled numerators past 128 bits
        let dens = [61, 59, 64, 53, 47, 43, 41, 37, 31, 29, 23, 19, 17, 13, 11];
        let vals: Vec<Rational> = dens
            .iter()
            .enumerate()
            .map(|(i, &d)| Rational::from((if i % 2 == 0 { i64::MAX - i as i64 } else { -(1 << 40) - i as i64 }, d)))
            .collect();
        let a = FiniteSet::from_rationals(vals.clone());
        let Repr::Exact(e) = &a.repr else { unreachable!() };
        assert!(matches!(prepare(e, e, 3), Prepared::Wide(..)));
        let got = sumset(&a, &a, SignedSumSpec::new(2, 1).unwrap(), DEFAULT_SIZE_CAP).unwrap();
        let mut want = BTreeSet::new();
        for x in &vals {
            for y in &vals {
                for z in &vals {
                    want.insert(Rational::from(x + y) - z);
                }
            }
        }
        assert_eq!(got.rationals().unwrap(), want.into_iter().collect::<Vec<_>>());
        assert_eq!(from_wide(&to_wide(&Integer::from(-5))), -5);
        let huge = Integer::from(-3) << 200;
        assert_eq!(from_wide(&to_wide(&huge)), huge);
    }

    #[test]
    fn cap_and_mode_errors() {
        // squares: the span is too wide for the bitset route, so the pair count decides
        let a = ints(&(1..=101).map(|i| i * i).collect::<Vec<_>>());
        let err = sumset(&a, &a, SignedSumSpec::new(1, 1).unwrap(), 10_000).unwrap_err();
        assert!(matches!(err, Error::SizeCapExceeded { predicted: 10_000.., cap: 10_000 }));
        let f = a.to_float_mode(128, crate::scalar::default_tolerance(128)).unwrap();
        assert_eq!(sumset(&a, &f, SignedSumSpec::new(1, 1).unwrap(), DEFAULT_SIZE_CAP), Err(Error::ModeMismatch));
        assert!(SignedSumSpec::new(0, 0).is_err());
        assert_eq!("2,1".parse::<SignedSumSpec>().unwrap(), SignedSumSpec { plus: 2, minus: 1 });
    }

    #[test]
    fn float_mode_matches_exact_cardinality() {
        let a = ints(&[1, 2, 4, 8, 16, 31]);
        let f = a.to_float_mode(64, crate::scalar::default_tolerance(64)).unwrap();
        for spec in [(2, 1), (1, 1), (4, 3)] {
            let spec = SignedSumSpec::new(spec.0, spec.1).unwrap();
            let e = sumset(&a, &a, spec, DEFAULT_SIZE_CAP).unwrap();
            let g = sumset(&f, &f, spec, DEFAULT_SIZE_CAP).unwrap();
            assert_eq!(e.len(), g.len());
        }
    }

    #[test]
    fn iterated_levels_and_n_k() {
        let a = ints(&[1, 2, 4, 8, 13]);
        let levels = iterated_sumsets(&a, 2, DEFAULT_SIZE_CAP).unwrap();
        let v: Vec<i64> = [1, 2, 4, 8, 13].to_vec();
        assert_eq!(as_i64(&levels[0]), brute(&v, 2, 1).into_iter().collect::<Vec<_>>());
        assert_eq!(as_i64(&levels[1]), brute(&v, 4, 3).into_iter().collect::<Vec<_>>());

        assert_eq!(n_k_count(&ints(&[1, 2, 4]), 1, DEFAULT_SIZE_CAP).unwrap(), 2);
        assert_eq!(n_k_count(&ints(&[0, 1]), 1, DEFAULT_SIZE_CAP).unwrap(), 0);
        assert_eq!(n_k_count(&ints(&[0, 1, 3]), 1, DEFAULT_SIZE_CAP).unwrap(), 2);
    }

    #[test]
    fn membership_oracle_agrees_with_full_sumset() {
        let a = ints(&[1, 2, 4, 8, 13, 19]);
        for (s, t) in [(1, 0), (2, 1), (4, 3), (3, 3), (0, 2)] {
            let spec = SignedSumSpec::new(s, t).unwrap();
            let full = sumset(&a, &a, spec, DEFAULT_SIZE_CAP).unwrap();
            let oracle = SumsetMembership::new(&a, spec, DEFAULT_SIZE_CAP).unwrap();
            let lo = full.min().unwrap().to_f64() as i64 - 3;
            let hi = full.max().unwrap().to_f64() as i64 + 3;
            for v in lo..=hi {
                assert_eq!(oracle.contains(&Scalar::int(v)), full.contains(&Scalar::int(v)), "({s},{t}) {v}");
            }
            assert!(!oracle.contains(&Scalar::Exact(Rational::from((1, 2)))));
        }
    }

    #[test]
    fn block_boundaries_do_not_change_output() {
        // forces several blocks and run merges
        let a: Vec<i64> = (0..2100).map(|i| i * i + (i % 7)).collect();
        let wide: Vec<i128> = a.iter().map(|&x| x as i128).collect();
        let spec = SignedSumSpec::new(1, 1).unwrap();
        let got = engine(&wide, &wide, spec, true, &0, &OrdArith, DEFAULT_SIZE_CAP, None).unwrap();
        let mut want: Vec<i128> = wide.iter().flat_map(|x| wide.iter().map(move |y| x - y)).collect();
        want.sort_unstable();
        want.dedup();
        assert_eq!(got, want);
        assert_eq!(dense(&wide, &wide, spec, DEFAULT_SIZE_CAP), Some(want));
    }

    #[test]
    fn dense_path_matches_pairs() {
        let a: Vec<i128> = vec![-9, -3, 6, 15, 27, 60];
        let b: Vec<i128> = vec![-30, 0, 3, 12];
        for (s, t) in [(1, 0), (0, 2), (2, 1), (3, 2), (1, 3)] {
            let spec = SignedSumSpec::new(s, t).unwrap();
            let pairs = engine(&a, &b, spec, false, &0, &OrdArith, DEFAULT_SIZE_CAP, None).unwrap();
            assert_eq!(dense(&a, &b, spec, DEFAULT_SIZE_CAP), Some(pairs), "({s},{t})");
        }
        // spans beyond the cap fall back
        assert_eq!(dense(&[0, 1, 1 << 40], &[0], SignedSumSpec::new(1, 0).unwrap(), DEFAULT_SIZE_CAP), None);
        // a common factor is divided out first
        assert_eq!(
            dense(&[0, 1 << 40], &[0], SignedSumSpec::new(1, 0).unwrap(), DEFAULT_SIZE_CAP),
            Some(vec![0, 1 << 40])
        );
    }
}
