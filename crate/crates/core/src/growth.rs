//! The exponent sequences, instance generators, log-log fitting and
//! desk-scale checks of the growth inequalities.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rug::{Complete, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::func::{evaluate_float, image, nth_derivative, FunctionExpr, Interval};
use crate::independence::{delta_family_independence, is_k_independent, DeltaFamilySpec, FunctionFamily};
use crate::scalar::Scalar;
use crate::set::{convexity_order, FiniteSet};
use crate::sumset::{n_k_count, sumset, SignedSumSpec};

pub const SCHEMA_VERSION: u32 = 1;
pub const DEFAULT_SLACK: f64 = 0.2;
/// Below this size a short T1_7 fit is reported inconclusive rather than failed.
pub const T1_7_MIN_CONCLUSIVE_SIZE: usize = 16;

/// `φ(1) = 1`, `φ(n) = 1 + 1/(1 + 1/φ(n-1))`.
pub fn phi(n: u32) -> Result<Rational> {
    if n == 0 {
        return Err(Error::InvalidInput("phi is defined for n >= 1".into()));
    }
    let mut v = Rational::from(1);
    for _ in 1..n {
        let inner = Rational::from(1) + Rational::from(v.recip_ref());
        v = Rational::from(1) + inner.recip();
    }
    Ok(v)
}

/// `p(0) = p(1) = 1`, `p(j) = p(j-1) + Σ_{i<j} p(i)`.
pub fn p_seq(j: u32) -> Integer {
    p_table(j).pop().unwrap()
}

fn p_table(j: u32) -> Vec<Integer> {
    let mut p = vec![Integer::from(1)];
    let mut sum = Integer::from(1);
    for i in 1..=j as usize {
        let next = if i == 1 { Integer::from(1) } else { Integer::from(&p[i - 1] + &sum) };
        sum += &next;
        p.push(next);
    }
    p
}

/// `q(k) = Σ_{i<k} p(i)`.
pub fn q_seq(k: u32) -> Integer {
    if k == 0 {
        return Integer::new();
    }
    p_table(k - 1).into_iter().sum()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum FamilyKind {
    /// `{1, ..., N}`
    Ap,
    /// `{2, 4, ..., 2^N}`
    Geometric,
    /// `{1^e, 2^e, ..., N^e}`
    PowerImage { exponent: u32 },
    /// `{4i^2 + η_i}` with `η_i ∈ {-1, 0, 1}`; second differences stay ≥ 4.
    PerturbedConvex { seed: u64 },
    /// `N` distinct integers from `[1, 4N^2]`.
    Random { seed: u64 },
    /// Random positive `(order+1)`-th differences integrated back up.
    RandomConvex { order: u32, seed: u64 },
}

impl FamilyKind {
    pub fn seed(&self) -> Option<u64> {
        match self {
            FamilyKind::PerturbedConvex { seed }
            | FamilyKind::Random { seed }
            | FamilyKind::RandomConvex { seed, .. } => Some(*seed),
            _ => None,
        }
    }
}

impl fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FamilyKind::Ap => write!(f, "ap"),
            FamilyKind::Geometric => write!(f, "geometric"),
            FamilyKind::PowerImage { exponent } => write!(f, "power:{exponent}"),
            FamilyKind::PerturbedConvex { seed } => write!(f, "perturbed_convex:{seed}"),
            FamilyKind::Random { seed } => write!(f, "random:{seed}"),
            FamilyKind::RandomConvex { order, seed } => write!(f, "random_convex:{order}:{seed}"),
        }
    }
}

/// `ap`, `geometric`, `power:E`, `perturbed_convex[:SEED]`, `random[:SEED]`,
/// `random_convex:K[:SEED]`; a missing seed is 0.
impl FromStr for FamilyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidInput(format!("unknown family `{s}`"));
        let mut parts = s.trim().split(':');
        let name = parts.next().unwrap_or("");
        let nums: Vec<u64> = parts.map(|p| p.parse::<u64>().map_err(|_| bad())).collect::<Result<_>>()?;
        let seed = |i: usize| nums.get(i).copied().unwrap_or(0);
        Ok(match (name, nums.len()) {
            ("ap", 0) => FamilyKind::Ap,
            ("geometric", 0) => FamilyKind::Geometric,
            ("power" | "power_image", 1) => {
                FamilyKind::PowerImage { exponent: u32::try_from(nums[0]).map_err(|_| bad())? }
            }
            ("perturbed_convex", 0 | 1) => FamilyKind::PerturbedConvex { seed: seed(0) },
            ("random", 0 | 1) => FamilyKind::Random { seed: seed(0) },
            ("random_convex", 1 | 2) => {
                FamilyKind::RandomConvex { order: u32::try_from(nums[0]).map_err(|_| bad())?, seed: seed(1) }
            }
            _ => return Err(bad()),
        })
    }
}

fn rng_for(seed: u64, size: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ (size as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// A deterministic instance of the given size.
pub fn generate_family(kind: &FamilyKind, size: usize) -> Result<FiniteSet> {
    if size < 3 {
        return Err(Error::TooSmall { required: 3, actual: size });
    }
    let n = size as i64;
    Ok(match kind {
        FamilyKind::Ap => FiniteSet::from_integers(1..=n),
        FamilyKind::Geometric => {
            FiniteSet::from_rationals((1..=size as u32).map(|i| Rational::from(Integer::u_pow_u(2, i).complete())))
        }
        FamilyKind::PowerImage { exponent } => FiniteSet::from_rationals(
            (1..=size as u32).map(|i| Rational::from(Integer::u_pow_u(i, *exponent).complete())),
        ),
        FamilyKind::PerturbedConvex { seed } => {
            let mut rng = rng_for(*seed, size);
            FiniteSet::from_integers((1..=n).map(|i| 4 * i * i + rng.gen_range(-1..=1)))
        }
        FamilyKind::Random { seed } => {
            let mut rng = rng_for(*seed, size);
            let range = 4 * size * size;
            FiniteSet::from_integers(sample(&mut rng, range, size).into_iter().map(|v| v as i64 + 1))
        }
        FamilyKind::RandomConvex { order, seed } => {
            let mut rng = rng_for(*seed, size);
            let levels = *order as usize + 1;
            if size <= levels {
                return Err(Error::TooSmall { required: levels + 1, actual: size });
            }
            let mut seq: Vec<Integer> = (0..size - levels).map(|_| Integer::from(rng.gen_range(1..=4u32))).collect();
            for _ in 0..levels {
                let mut next = vec![Integer::from(rng.gen_range(1..=4u32))];
                for d in &seq {
                    let v = Integer::from(next.last().unwrap() + d);
                    next.push(v);
                }
                seq = next;
            }
            FiniteSet::from_rationals(seq.into_iter().map(Rational::from))
        }
    })
}

/// Least-squares slope of `ln count` against `ln n`, and the largest
/// absolute log deviation from the fitted line.
pub fn exponent_fit(records: &[(f64, f64)]) -> Result<(f64, f64)> {
    if records.len() < 3 {
        return Err(Error::Degenerate(format!("need at least 3 records, got {}", records.len())));
    }
    if records.iter().any(|&(n, c)| n <= 0.0 || c <= 0.0 || !n.is_finite() || !c.is_finite()) {
        return Err(Error::Degenerate("sizes and counts must be positive".into()));
    }
    let xs: Vec<f64> = records.iter().map(|r| r.0.ln()).collect();
    let ys: Vec<f64> = records.iter().map(|r| r.1.ln()).collect();
    let m = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / m, ys.iter().sum::<f64>() / m);
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx <= f64::EPSILON * m {
        return Err(Error::Degenerate("all sizes are equal".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let residual = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).abs()).fold(0.0, f64::max);
    Ok((slope, residual))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremId {
    T1_1,
    T1_3,
    T1_5,
    T1_6,
    T1_7,
    T1_8,
    C1_9,
    /// `A = [N]`, `f = x^{k+1}`: an upper check, not a lower bound.
    Sharpness,
}

impl fmt::Display for TheoremId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            TheoremId::T1_1 => "T1_1",
            TheoremId::T1_3 => "T1_3",
            TheoremId::T1_5 => "T1_5",
            TheoremId::T1_6 => "T1_6",
            TheoremId::T1_7 => "T1_7",
            TheoremId::T1_8 => "T1_8",
            TheoremId::C1_9 => "C1_9",
            TheoremId::Sharpness => "Sharpness",
        };
        f.write_str(s)
    }
}

impl FromStr for TheoremId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s.trim().to_ascii_uppercase().replace('.', "_").as_str() {
            "T1_1" => TheoremId::T1_1,
            "T1_3" => TheoremId::T1_3,
            "T1_5" => TheoremId::T1_5,
            "T1_6" => TheoremId::T1_6,
            "T1_7" => TheoremId::T1_7,
            "T1_8" => TheoremId::T1_8,
            "C1_9" => TheoremId::C1_9,
            "SHARPNESS" => TheoremId::Sharpness,
            _ => return Err(Error::InvalidInput(format!("unknown theorem `{s}`"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthRecord {
    pub n: usize,
    pub count: u64,
    /// `|A+A-A| / |A|`.
    pub k_tripling: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthReport {
    pub schema_version: u32,
    pub theorem: TheoremId,
    pub family: String,
    pub seed: Option<u64>,
    /// k, n, functions, ... as given.
    pub parameters: BTreeMap<String, String>,
    pub records: Vec<GrowthRecord>,
    /// The fit is over `count * K^k_exponent`, which removes the tripling
    /// dependence from the bound.
    pub k_exponent: i64,
    pub fitted: f64,
    pub residual: f64,
    pub target: f64,
    pub slack: f64,
    pub verdict: Verdict,
}

impl GrowthReport {
    /// `n,count,log_n,log_count,fit_exponent`, one row per record.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("n,count,log_n,log_count,fit_exponent\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{:.12},{:.12},{:.12}\n",
                r.n,
                r.count,
                (r.n as f64).ln(),
                (r.count as f64).ln(),
                self.fitted
            ));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TheoremRequest {
    pub theorem: TheoremId,
    pub k: u32,
    pub n: u32,
    pub functions: Vec<FunctionExpr>,
    pub family: FamilyKind,
    pub sizes: Vec<usize>,
    pub slack: f64,
    pub cap: u64,
    pub precision: u32,
}

impl TheoremRequest {
    pub fn new(theorem: TheoremId, family: FamilyKind, sizes: Vec<usize>) -> Self {
        TheoremRequest {
            theorem,
            k: 1,
            n: 1,
            functions: Vec::new(),
            family,
            sizes,
            slack: DEFAULT_SLACK,
            cap: crate::sumset::DEFAULT_SIZE_CAP,
            precision: crate::scalar::DEFAULT_PRECISION,
        }
    }
}

fn tripling(a: &FiniteSet, cap: u64) -> Result<f64> {
    let s = sumset(a, a, SignedSumSpec::new(2, 1)?, cap)?;
    Ok(s.len() as f64 / a.len() as f64)
}

fn span(sets: &[FiniteSet]) -> Result<Interval> {
    let lo = sets.iter().filter_map(|s| s.min()).min_by(|a, b| a.cmp_value(b));
    let hi = sets.iter().filter_map(|s| s.max()).max_by(|a, b| a.cmp_value(b));
    match (lo, hi) {
        (Some(lo), Some(hi)) => Interval::new(lo, hi),
        _ => Err(Error::TooSmall { required: 2, actual: 0 }),
    }
}

/// Samples `f^(j) > 0` for `j = 1..=k+1` on a grid, i.e. `f, ..., f^(k)`
/// strictly increasing.
pub fn is_k_convex_function(f: &FunctionExpr, interval: &Interval, k: u32, precision: u32) -> Result<bool> {
    const GRID: u32 = 512;
    let lo = interval.lo.to_float(precision);
    let width = interval.diameter(precision);
    for j in 1..=k as usize + 1 {
        let d = nth_derivative(f, j);
        for i in 0..=GRID {
            let x = rug::Float::with_val(precision, &lo + rug::Float::with_val(precision, &width * i) / GRID);
            let v = evaluate_float(&d, &x, precision)?;
            if !(v > 0) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

fn one_function(req: &TheoremRequest) -> Result<&FunctionExpr> {
    req.functions.first().ok_or_else(|| Error::InvalidInput(format!("{} needs a function", req.theorem)))
}

fn check_sizes(sizes: &[usize]) -> Result<()> {
    if sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("sizes must be strictly increasing".into()));
    }
    Ok(())
}

fn count_f_difference_set(a: &FiniteSet, f: &FunctionExpr, n: u32, req: &TheoremRequest) -> Result<u64> {
    let diffs = sumset(a, a, SignedSumSpec::new(1, 1)?, req.cap)?;
    let fd = image(f, &diffs, req.precision)?;
    Ok(sumset(&fd, &fd, SignedSumSpec::doubling(n)?, req.cap)?.len() as u64)
}

/// Computes the left side at every size, fits its exponent and compares it
/// with the target minus slack.
pub fn verify_theorem(req: &TheoremRequest) -> Result<GrowthReport> {
    check_sizes(&req.sizes)?;
    if req.k == 0 || req.n == 0 {
        return Err(Error::InvalidInput("k and n must be positive".into()));
    }
    let sets: Vec<FiniteSet> = req.sizes.iter().map(|&n| generate_family(&req.family, n)).collect::<Result<_>>()?;
    let mut params = BTreeMap::new();
    let (k, n) = (req.k, req.n);
    let fns = || req.functions.iter().map(|f| f.to_string()).collect::<Vec<_>>().join("; ");

    let (target, k_exponent): (f64, i64);
    let mut counts = Vec::with_capacity(sets.len());
    match req.theorem {
        TheoremId::T1_1 | TheoremId::T1_3 => {
            let k = if req.theorem == TheoremId::T1_1 { 1 } else { k };
            params.insert("k".into(), k.to_string());
            for a in &sets {
                let order = convexity_order(a, k as usize);
                if order < k as usize {
                    return Err(Error::HypothesisViolated(format!(
                        "set of size {} is only {order}-convex, need {k}",
                        a.len()
                    )));
                }
                counts.push(sumset(a, a, SignedSumSpec::doubling(k)?, req.cap)?.len() as u64);
            }
            target = k as f64 + 1.0;
            k_exponent = 0;
        }
        TheoremId::T1_5 => {
            let f = one_function(req)?;
            params.insert("k".into(), k.to_string());
            params.insert("functions".into(), fns());
            if !is_k_convex_function(f, &span(&sets)?, k, req.precision)? {
                return Err(Error::HypothesisViolated(format!("{f} is not {k}-convex on the instance span")));
            }
            for a in &sets {
                let fa = image(f, a, req.precision)?;
                counts.push(sumset(&fa, &fa, SignedSumSpec::doubling(k)?, req.cap)?.len() as u64);
            }
            target = k as f64 + 1.0;
            k_exponent = (1i64 << (k + 1)) - k as i64 - 2;
        }
        TheoremId::T1_6 => {
            if req.functions.len() != 2 {
                return Err(Error::InvalidInput("T1_6 needs exactly two functions".into()));
            }
            params.insert("k".into(), k.to_string());
            params.insert("functions".into(), fns());
            let fam = FunctionFamily::new(req.functions.clone(), span(&sets)?)?;
            if !is_k_independent(&fam, k as usize, crate::independence::DEFAULT_SAMPLES, req.precision)?.independent {
                return Err(Error::HypothesisViolated(format!("functions are not {k}-independent")));
            }
            for a in &sets {
                let mut prod = 1u64;
                for f in &req.functions {
                    prod = prod.saturating_mul(n_k_count(&image(f, a, req.precision)?, k, req.cap)? as u64);
                }
                counts.push(prod);
            }
            target = 2.0 * k as f64 + 1.0;
            k_exponent = 5 * (1i64 << (k - 1)) - 2 * k as i64 - 3;
        }
        TheoremId::T1_7 => {
            let m = req.functions.len() as u32;
            if m < 2 {
                return Err(Error::InvalidInput("T1_7 needs at least two functions".into()));
            }
            params.insert("functions".into(), fns());
            let fam = FunctionFamily::new(req.functions.clone(), span(&sets)?)?;
            if !is_k_independent(&fam, 1, crate::independence::DEFAULT_SAMPLES, req.precision)?.independent {
                return Err(Error::HypothesisViolated("functions are not 1-independent".into()));
            }
            for a in &sets {
                let mut best = 0u64;
                for f in &req.functions {
                    best = best.max(n_k_count(&image(f, a, req.precision)?, m - 1, req.cap)? as u64);
                }
                counts.push(best);
            }
            target = phi(m)?.to_f64();
            k_exponent = 0;
        }
        TheoremId::T1_8 | TheoremId::C1_9 => {
            let f = one_function(req)?;
            params.insert("n".into(), n.to_string());
            params.insert("functions".into(), fns());
            let degree = f.polynomial_coefficients().map(|c| c.len().saturating_sub(1));
            match (req.theorem, degree) {
                (_, Some(d)) if d > n as usize => {}
                (TheoremId::C1_9, _) => {
                    return Err(Error::HypothesisViolated(format!("{f} is not a polynomial of degree >= {}", n + 1)))
                }
                _ => {
                    // spot-check the shift hypothesis on the smallest gaps of the largest instance
                    let big = sets.last().unwrap();
                    let d = sumset(big, big, SignedSumSpec::new(1, 1)?, req.cap)?;
                    let shifts: Vec<Scalar> = d
                        .scalars()
                        .into_iter()
                        .filter(|x| x.cmp_value(&Scalar::int(0)) == std::cmp::Ordering::Greater)
                        .take(n as usize)
                        .collect();
                    let spec = DeltaFamilySpec::new(f.clone(), shifts)?;
                    let v = delta_family_independence(
                        &spec,
                        &span(&sets)?,
                        crate::independence::DEFAULT_SAMPLES,
                        req.precision,
                    )?;
                    if !v.independent {
                        return Err(Error::HypothesisViolated(format!(
                            "discrete derivatives of {f} are not 1-independent"
                        )));
                    }
                }
            }
            for a in &sets {
                counts.push(count_f_difference_set(a, f, n, req)?);
            }
            target = 1.0 + phi(n)?.to_f64();
            k_exponent = 0;
        }
        TheoremId::Sharpness => return sharpness(k, &req.sizes, req.cap),
    }

    let records: Vec<GrowthRecord> = sets
        .iter()
        .zip(&counts)
        .map(|(a, &count)| Ok(GrowthRecord { n: a.len(), count, k_tripling: tripling(a, req.cap)? }))
        .collect::<Result<_>>()?;
    let points: Vec<(f64, f64)> =
        records.iter().map(|r| (r.n as f64, r.count as f64 * r.k_tripling.powi(k_exponent as i32))).collect();
    let (fitted, residual) = exponent_fit(&points)?;
    let verdict = if fitted >= target - req.slack {
        Verdict::Pass
    } else if req.theorem == TheoremId::T1_7 && req.sizes.iter().max().copied().unwrap_or(0) < T1_7_MIN_CONCLUSIVE_SIZE
    {
        Verdict::Inconclusive
    } else {
        Verdict::Fail
    };
    Ok(GrowthReport {
        schema_version: SCHEMA_VERSION,
        theorem: req.theorem,
        family: req.family.to_string(),
        seed: req.family.seed(),
        parameters: params,
        records,
        k_exponent,
        fitted,
        residual,
        target,
        slack: req.slack,
        verdict,
    })
}

/// `A = [N]`, `f = x^{k+1}`: `|2^k f(A) - (2^k-1) f(A)|` should grow no
/// faster than `N^{k+1}`. Pass iff the fit is at most `k + 1.1`.
pub fn sharpness(k: u32, sizes: &[usize], cap: u64) -> Result<GrowthReport> {
    check_sizes(sizes)?;
    let f = FunctionExpr::pow(FunctionExpr::x(), k as i32 + 1);
    let mut records = Vec::new();
    for &n in sizes {
        let a = generate_family(&FamilyKind::Ap, n)?;
        let fa = image(&f, &a, crate::scalar::DEFAULT_PRECISION)?;
        let count = sumset(&fa, &fa, SignedSumSpec::doubling(k)?, cap)?.len() as u64;
        records.push(GrowthRecord { n, count, k_tripling: tripling(&a, cap)? });
    }
    let points: Vec<(f64, f64)> = records.iter().map(|r| (r.n as f64, r.count as f64)).collect();
    let (fitted, residual) = exponent_fit(&points)?;
    let target = k as f64 + 1.0;
    let slack = 0.1;
    let mut params = BTreeMap::new();
    params.insert("k".into(), k.to_string());
    params.insert("functions".into(), f.to_string());
    Ok(GrowthReport {
        schema_version: SCHEMA_VERSION,
        theorem: TheoremId::Sharpness,
        family: FamilyKind::Ap.to_string(),
        seed: None,
        parameters: params,
        records,
        k_exponent: 0,
        fitted,
        residual,
        target,
        slack,
        verdict: if fitted <= target + slack { Verdict::Pass } else { Verdict::Fail },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::parse;

    #[test]
    fn sequences() {
        assert_eq!(phi(1).unwrap(), 1);
        assert_eq!(phi(2).unwrap(), Rational::from((3, 2)));
        assert_eq!(phi(3).unwrap(), Rational::from((8, 5)));
        assert_eq!([0, 1, 2, 3].map(p_seq), [1, 1, 3, 8].map(Integer::from));
        for n in 2..=30 {
            assert_eq!(phi(n).unwrap(), Rational::from((p_seq(n), q_seq(n))), "n={n}");
            assert_eq!(p_seq(n + 1), (2 * p_seq(n)) + q_seq(n));
        }
        assert!(phi(0).is_err());
    }

    #[test]
    fn generators() {
        assert_eq!(generate_family(&FamilyKind::Ap, 5).unwrap(), FiniteSet::from_integers(1..=5));
        assert_eq!(
            generate_family(&FamilyKind::PowerImage { exponent: 2 }, 4).unwrap(),
            FiniteSet::from_integers([1, 4, 9, 16])
        );
        assert_eq!(generate_family(&FamilyKind::Geometric, 4).unwrap(), FiniteSet::from_integers([2, 4, 8, 16]));
        for seed in 0..5 {
            let a = generate_family(&FamilyKind::PerturbedConvex { seed }, 30).unwrap();
            assert_eq!(a.len(), 30);
            assert!(convexity_order(&a, 1) >= 1);
            assert_eq!(a, generate_family(&FamilyKind::PerturbedConvex { seed }, 30).unwrap());
            let r = generate_family(&FamilyKind::RandomConvex { order: 3, seed }, 12).unwrap();
            assert_eq!(r.len(), 12);
            assert!(convexity_order(&r, 3) >= 3);
            assert_eq!(generate_family(&FamilyKind::Random { seed }, 20).unwrap().len(), 20);
        }
        assert!(generate_family(&FamilyKind::Ap, 2).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for s in ["ap", "geometric", "power:3", "perturbed_convex:7", "random:0", "random_convex:2:9"] {
            let k: FamilyKind = s.parse().unwrap();
            assert_eq!(k.to_string(), s);
        }
        assert!("bogus".parse::<FamilyKind>().is_err());
    }

    #[test]
    fn fits() {
        let (e, _) = exponent_fit(&[(10.0, 28.0), (20.0, 58.0), (40.0, 118.0)]).unwrap();
        assert!((e - 1.0).abs() < 0.05);
        let sq: Vec<(f64, f64)> = [3.0, 7.0, 11.0, 30.0].iter().map(|&n| (n, n * n)).collect();
        let (e, r) = exponent_fit(&sq).unwrap();
        assert!((e - 2.0).abs() < 1e-12 && r < 1e-12);
        assert!(matches!(exponent_fit(&[(5.0, 1.0), (5.0, 2.0), (5.0, 3.0)]), Err(Error::Degenerate(_))));
    }

    #[test]
    fn convex_sets_grow_quadratically() {
        let req =
            TheoremRequest::new(TheoremId::T1_1, FamilyKind::PerturbedConvex { seed: 1 }, vec![8, 16, 24, 32, 40]);
        let r = verify_theorem(&req).unwrap();
        assert!(r.fitted >= 1.8, "{}", r.fitted);
        assert_eq!(r.verdict, Verdict::Pass);
        let csv = r.to_csv();
        assert_eq!(csv.lines().count(), 6);
        assert!(matches!(
            verify_theorem(&TheoremRequest::new(TheoremId::T1_1, FamilyKind::Ap, vec![8, 16, 24])),
            Err(Error::HypothesisViolated(_))
        ));
    }

    #[test]
    fn some_function_grows() {
        let mut req = TheoremRequest::new(TheoremId::T1_7, FamilyKind::Ap, vec![8, 16, 24, 32, 40]);
        req.functions = vec![parse("x^2").unwrap(), parse("x^3").unwrap()];
        let r = verify_theorem(&req).unwrap();
        assert!(r.fitted >= 1.3, "{}", r.fitted);
    }

    #[test]
    fn k_convex_functions() {
        let iv = Interval::new(Scalar::int(1), Scalar::int(10)).unwrap();
        assert!(is_k_convex_function(&parse("x^3").unwrap(), &iv, 2, 128).unwrap());
        assert!(!is_k_convex_function(&parse("x^2").unwrap(), &iv, 2, 128).unwrap());
    }
}
