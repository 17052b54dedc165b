use rug::Float;

use super::ast::FunctionExpr as E;
use super::diff::differentiate;
use super::eval::evaluate_float;
use super::Interval;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_SAMPLES: usize = 4096;

/// A subinterval on which `f'` and `f''` keep a constant sign.
#[derive(Clone, Debug, PartialEq)]
pub struct MonotonePiece {
    pub interval: Interval,
    /// `f' > 0` on the piece.
    pub increasing: bool,
    /// `f'' > 0` on the piece.
    pub convex: bool,
}

/// Splits `I` at the sign changes of `f'` and `f''`.
///
/// Sign changes are found by sampling and then refined by bisection to
/// width `2^(-precision/2)`. Sampling can miss a pair of roots closer than
/// the grid spacing, so the result is best-effort for pathological inputs.
pub fn monotone_partition(f: &E, interval: &Interval, max_pieces: usize, precision: u32) -> Result<Vec<MonotonePiece>> {
    monotone_partition_with(f, interval, max_pieces, precision, DEFAULT_SAMPLES)
}

pub fn monotone_partition_with(
    f: &E,
    interval: &Interval,
    max_pieces: usize,
    precision: u32,
    samples: usize,
) -> Result<Vec<MonotonePiece>> {
    let samples = samples.max(2);
    let d1 = differentiate(f);
    let d2 = differentiate(&d1);
    let lo = interval.lo.to_float(precision);
    let hi = interval.hi.to_float(precision);
    let width = Float::with_val(precision, Float::i_exp(1, -((precision / 2) as i32)));
    let grid: Vec<Float> = (0..samples)
        .map(|i| {
            let t = Float::with_val(precision, &hi - &lo) * i as u32 / (samples - 1) as u32;
            Float::with_val(precision, &lo + t)
        })
        .collect();

    let mut cuts: Vec<Float> = Vec::new();
    for g in [&d1, &d2] {
        let mut last: Option<(Float, i32)> = None;
        for x in &grid {
            let v = evaluate_float(g, x, precision)?;
            let s = sign(&v);
            if s == 0 {
                continue;
            }
            if let Some((ref px, ps)) = last {
                if ps != s {
                    cuts.push(bisect(g, px.clone(), x.clone(), ps, &width, precision)?);
                    if cuts.len() + 1 > max_pieces {
                        return Err(Error::TooManyPieces { found: cuts.len() + 1, max_pieces });
                    }
                }
            }
            last = Some((x.clone(), s));
        }
    }
    cuts.sort_by(|a, b| a.total_cmp(b));
    let mut merged: Vec<Float> = Vec::with_capacity(cuts.len());
    for c in cuts {
        match merged.last() {
            Some(m) if Float::with_val(precision, &c - m) <= width => {}
            _ => merged.push(c),
        }
    }

    let mut bounds = vec![interval.lo.clone()];
    bounds.extend(merged.into_iter().map(Scalar::Float));
    bounds.push(interval.hi.clone());
    let mut pieces = Vec::with_capacity(bounds.len() - 1);
    for w in bounds.windows(2) {
        let a = w[0].to_float(precision);
        let b = w[1].to_float(precision);
        let mid = Float::with_val(precision, &a + &b) / 2u32;
        let s1 = sign(&evaluate_float(&d1, &mid, precision)?);
        let s2 = sign(&evaluate_float(&d2, &mid, precision)?);
        pieces.push(MonotonePiece {
            interval: Interval { lo: w[0].clone(), hi: w[1].clone() },
            increasing: s1 > 0,
            convex: s2 > 0,
        });
    }
    Ok(pieces)
}

fn sign(v: &Float) -> i32 {
    if v.is_zero() {
        0
    } else if v.is_sign_negative() {
        -1
    } else {
        1
    }
}

fn bisect(g: &E, mut a: Float, mut b: Float, sign_a: i32, width: &Float, precision: u32) -> Result<Float> {
    while Float::with_val(precision, &b - &a) > *width {
        let mid = Float::with_val(precision, &a + &b) / 2u32;
        if mid <= a || mid >= b {
            break;
        }
        let s = sign(&evaluate_float(g, &mid, precision)?);
        if s == 0 {
            return Ok(mid);
        }
        if s == sign_a {
            a = mid;
        } else {
            b = mid;
        }
    }
    Ok(Float::with_val(precision, &a + &b) / 2u32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::func::eval::pi;
    use crate::func::parse::parse;

    fn iv(a: i64, b: i64) -> Interval {
        Interval::new(Scalar::int(a), Scalar::int(b)).unwrap()
    }

    #[test]
    fn parabola_splits_at_vertex() {
        let p = monotone_partition(&parse("x^2").unwrap(), &iv(-1, 1), 10, 128).unwrap();
        assert_eq!(p.len(), 2);
        assert!(p[0].interval.hi.to_f64().abs() < 1e-15);
        assert!(!p[0].increasing && p[1].increasing);
        assert!(p[0].convex && p[1].convex);
    }

    #[test]
    fn cubic_on_positive_interval_is_one_piece() {
        let p = monotone_partition(&parse("x^3").unwrap(), &iv(1, 2), 10, 128).unwrap();
        assert_eq!(p.len(), 1);
        assert!(p[0].increasing && p[0].convex);
    }

    #[test]
    fn sine_cuts_near_quarter_periods() {
        let p = monotone_partition(&parse("sin(x)").unwrap(), &iv(0, 7), 10, 128).unwrap();
        assert_eq!(p.len(), 5);
        let pi = pi(128).to_f64();
        let cuts: Vec<f64> = p[1..].iter().map(|q| q.interval.lo.to_f64()).collect();
        for (c, want) in cuts.iter().zip([pi / 2.0, pi, 1.5 * pi, 2.0 * pi]) {
            assert!((c - want).abs() < 1e-15, "{c} vs {want}");
        }
    }

    #[test]
    fn too_many_pieces() {
        let err = monotone_partition(&parse("sin(x)").unwrap(), &iv(0, 20), 3, 128).unwrap_err();
        assert!(matches!(err, Error::TooManyPieces { max_pieces: 3, .. }));
    }
}
