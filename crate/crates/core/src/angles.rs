//! Pinned angles of Cartesian products `A × A`, and the reduction of their
//! differences to `f(A'' - A'')` with `f(x) = arctan(e^x)`, `A'' = log A`.

use std::cmp::Ordering;

use rug::{Float, Rational};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::func::{image_with_tolerance, parse, pi};
use crate::scalar::{self, Scalar};
use crate::set::FiniteSet;
use crate::sumset::{sumset, SignedSumSpec};

#[derive(Clone, Debug, PartialEq)]
pub struct PinnedAngleSet {
    pub pin: (Scalar, Scalar),
    pub source: FiniteSet,
    /// Radians, in `(0, π)`, merged at the tolerance.
    pub angles: FiniteSet,
    /// Distinct directions seen from the pin.
    pub direction_count: usize,
}

fn check_tolerance(precision: u32, tolerance: &Float) -> Result<()> {
    scalar::check_precision(precision)?;
    if !(*tolerance > 0) {
        return Err(Error::PreconditionViolated("tolerance must be positive; angles are transcendental".into()));
    }
    Ok(())
}

fn check_positive(a: &FiniteSet) -> Result<()> {
    let zero = Scalar::int(0);
    if a.contains(&zero) {
        return Err(Error::Domain { node: "y/x".into(), argument: "0".into() });
    }
    if a.min().is_some_and(|m| m.cmp_value(&zero) == Ordering::Less) {
        return Err(Error::PreconditionViolated("the origin-pinned construction needs A ⊂ (0, ∞)".into()));
    }
    Ok(())
}

/// Direction angles `arctan(y/x)`, `x, y ∈ A`, sorted and merged.
fn directions(a: &FiniteSet, precision: u32, tolerance: &Float) -> Result<FiniteSet> {
    match a.rationals() {
        Some(rs) => {
            let ratios =
                FiniteSet::from_rationals(rs.iter().flat_map(|x| rs.iter().map(move |y| Rational::from(y / x))));
            let vals =
                ratios.rationals().unwrap().iter().map(|r| Float::with_val(precision, r).atan()).collect::<Vec<_>>();
            FiniteSet::from_floats(vals, precision, tolerance.clone())
        }
        None => {
            let fs = a.floats(precision);
            let vals: Vec<Float> =
                fs.iter().flat_map(|x| fs.iter().map(move |y| Float::with_val(precision, y / x).atan())).collect();
            FiniteSet::from_floats(vals, precision, tolerance.clone())
        }
    }
}

fn positive_differences(d: &FiniteSet, tolerance: &Float) -> Result<FiniteSet> {
    let p = d.precision().unwrap_or(scalar::DEFAULT_PRECISION);
    let fs = d.floats(p);
    let mut vals = Vec::new();
    for (i, hi) in fs.iter().enumerate() {
        for lo in &fs[..i] {
            let v = Float::with_val(p, hi - lo);
            if v > *tolerance {
                vals.push(v);
            }
        }
    }
    FiniteSet::from_floats(vals, p, tolerance.clone())
}

/// Angles at the origin between pairs of points of `A × A`, for `A ⊂ (0, ∞)`.
pub fn pinned_angles(a: &FiniteSet, precision: u32, tolerance: &Float) -> Result<PinnedAngleSet> {
    check_tolerance(precision, tolerance)?;
    check_positive(a)?;
    let dirs = directions(a, precision, tolerance)?;
    let angles = positive_differences(&dirs, tolerance)?;
    Ok(PinnedAngleSet { pin: (Scalar::int(0), Scalar::int(0)), source: a.clone(), angles, direction_count: dirs.len() })
}

/// Angles at an arbitrary pin `p` between pairs of other points of `A × A`,
/// excluding the degenerate `0` and `π`. Float arithmetic throughout.
pub fn pinned_angles_at(
    a: &FiniteSet,
    pin: (Scalar, Scalar),
    precision: u32,
    tolerance: &Float,
) -> Result<PinnedAngleSet> {
    check_tolerance(precision, tolerance)?;
    let fs = a.floats(precision);
    let (px, py) = (pin.0.to_float(precision), pin.1.to_float(precision));
    let mut dirs = Vec::new();
    for x in &fs {
        for y in &fs {
            let dx = Float::with_val(precision, x - &px);
            let dy = Float::with_val(precision, y - &py);
            if dx.is_zero() && dy.is_zero() {
                continue;
            }
            dirs.push(dy.atan2(&dx));
        }
    }
    let dirs = FiniteSet::from_floats(dirs, precision, tolerance.clone())?;
    let two_pi = Float::with_val(precision, pi(precision) * 2u32);
    let top = Float::with_val(precision, pi(precision) - tolerance);
    let ds = dirs.floats(precision);
    let mut vals = Vec::new();
    for (i, hi) in ds.iter().enumerate() {
        for lo in &ds[..i] {
            let mut v = Float::with_val(precision, hi - lo);
            if v > pi(precision) {
                v = Float::with_val(precision, &two_pi - &v);
            }
            if v > *tolerance && v < top {
                vals.push(v);
            }
        }
    }
    let angles = FiniteSet::from_floats(vals, precision, tolerance.clone())?;
    Ok(PinnedAngleSet { pin, source: a.clone(), angles, direction_count: dirs.len() })
}

/// With `A ⊂ (0, 1]`: `arctan(exp(log A - log A))` must equal the direction
/// set element by element, and its positive differences must all be
/// pinned angles.
pub fn angle_reduction_check(a: &FiniteSet, precision: u32, tolerance: &Float) -> Result<bool> {
    check_tolerance(precision, tolerance)?;
    if a.len() < 2 {
        return Err(Error::TooSmall { required: 2, actual: a.len() });
    }
    check_positive(a)?;
    if a.max().unwrap().cmp_value(&Scalar::int(1)) == Ordering::Greater {
        return Err(Error::PreconditionViolated("A must lie in (0, 1]".into()));
    }
    let logs = FiniteSet::from_floats(a.floats(precision).into_iter().map(|x| x.ln()), precision, tolerance.clone())?;
    let diffs = sumset(&logs, &logs, SignedSumSpec::new(1, 1)?, crate::sumset::DEFAULT_SIZE_CAP)?;
    let f = parse("arctan(exp(x))")?;
    let lhs = image_with_tolerance(&f, &diffs, precision, tolerance.clone())?;
    let dirs = directions(a, precision, tolerance)?;
    if lhs.len() != dirs.len() {
        return Ok(false);
    }
    let close = |x: &Float, y: &Float| Float::with_val(precision, x - y).abs() <= *tolerance;
    let (l, r) = (lhs.floats(precision), dirs.floats(precision));
    if !l.iter().zip(&r).all(|(x, y)| close(x, y)) {
        return Ok(false);
    }
    let angles = pinned_angles(a, precision, tolerance)?.angles;
    let differences = positive_differences(&lhs, tolerance)?;
    Ok(differences.scalars().iter().all(|d| angles.contains(d)))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AngleGrowthRecord {
    pub n: usize,
    pub spec: String,
    pub direction_count: usize,
    pub angle_count: usize,
    pub count: usize,
    pub precision: u32,
    pub tolerance: String,
}

/// `|s𝒜 - t𝒜|` for the origin-pinned angle set, merged at the tolerance.
pub fn angle_growth_report(
    a: &FiniteSet,
    spec: SignedSumSpec,
    precision: u32,
    tolerance: &Float,
    cap: u64,
) -> Result<AngleGrowthRecord> {
    let pa = pinned_angles(a, precision, tolerance)?;
    let count = if pa.angles.is_empty() { 0 } else { sumset(&pa.angles, &pa.angles, spec, cap)?.len() };
    Ok(AngleGrowthRecord {
        n: a.len(),
        spec: spec.to_string(),
        direction_count: pa.direction_count,
        angle_count: pa.angles.len(),
        count,
        precision,
        tolerance: scalar::format_float(tolerance),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Float {
        Float::with_val(128, Float::i_exp(1, -64))
    }

    fn q(p: i64, d: i64) -> Rational {
        Rational::from((p, d))
    }

    #[test]
    fn two_point_set() {
        let pa = pinned_angles(&FiniteSet::from_integers([1, 2]), 128, &tol()).unwrap();
        assert_eq!(pa.direction_count, 3);
        let got = pa.angles.floats(128);
        let want = [Float::with_val(128, &q(1, 3)).atan(), Float::with_val(128, &q(3, 4)).atan()];
        assert_eq!(got.len(), 2);
        for (g, w) in got.iter().zip(&want) {
            assert!(Float::with_val(128, g - w).abs() < 1e-30);
        }
        assert!(pinned_angles(&FiniteSet::from_integers([1]), 128, &tol()).unwrap().angles.is_empty());
        assert_eq!(pinned_angles(&FiniteSet::from_integers([1, 2, 4]), 128, &tol()).unwrap().direction_count, 5);
        assert!(matches!(pinned_angles(&FiniteSet::from_integers([0, 1]), 128, &tol()), Err(Error::Domain { .. })));
    }

    #[test]
    fn general_pin_agrees_at_origin() {
        let a = FiniteSet::from_integers([1, 2, 5]);
        let x = pinned_angles(&a, 128, &tol()).unwrap();
        let y = pinned_angles_at(&a, (Scalar::int(0), Scalar::int(0)), 128, &tol()).unwrap();
        assert_eq!(x.angles.len(), y.angles.len());
        assert_eq!(x.direction_count, y.direction_count);
    }

    #[test]
    fn reduction() {
        for a in [vec![q(1, 2), q(1, 1)], vec![q(1, 4), q(1, 2), q(1, 1)]] {
            assert!(angle_reduction_check(&FiniteSet::from_rationals(a), 128, &tol()).unwrap());
        }
        let zero = Float::with_val(128, 0);
        assert!(angle_reduction_check(&FiniteSet::from_rationals([q(1, 2), q(1, 1)]), 128, &zero).is_err());
    }

    #[test]
    fn growth_records() {
        let a = FiniteSet::from_integers([1, 2]);
        let cap = crate::sumset::DEFAULT_SIZE_CAP;
        assert_eq!(angle_growth_report(&a, SignedSumSpec::new(1, 0).unwrap(), 128, &tol(), cap).unwrap().count, 2);
        assert_eq!(angle_growth_report(&a, SignedSumSpec::new(1, 1).unwrap(), 128, &tol(), cap).unwrap().count, 3);
        let one = FiniteSet::from_integers([3]);
        assert_eq!(angle_growth_report(&one, SignedSumSpec::new(2, 1).unwrap(), 128, &tol(), cap).unwrap().count, 0);
    }
}
