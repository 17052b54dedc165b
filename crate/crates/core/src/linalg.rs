//! Small dense linear algebra over MPFR floats and exact rationals.

use rug::{Float, Rational};

/// Determinant by Gaussian elimination with partial pivoting.
pub fn det_float(mut m: Vec<Vec<Float>>, precision: u32) -> Float {
    let n = m.len();
    let mut det = Float::with_val(precision, 1);
    for col in 0..n {
        let pivot = (col..n).max_by(|&a, &b| m[a][col].clone().abs().total_cmp(&m[b][col].clone().abs())).unwrap();
        if m[pivot][col].is_zero() {
            return Float::with_val(precision, 0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        det *= &m[col][col];
        for row in col + 1..n {
            let factor = Float::with_val(precision, &m[row][col] / &m[col][col]);
            for k in col..n {
                let t = Float::with_val(precision, &factor * &m[col][k]);
                m[row][k] -= t;
            }
        }
    }
    det
}

/// Row-reduces in place and returns the rank.
fn eliminate(m: &mut [Vec<Rational>]) -> (usize, Rational) {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    let mut det = Rational::from(1);
    for col in 0..cols {
        let Some(p) = (rank..rows).find(|&r| m[r][col] != 0) else {
            det = Rational::new();
            continue;
        };
        if p != rank {
            m.swap(p, rank);
            det = -det;
        }
        det *= &m[rank][col];
        for r in rank + 1..rows {
            if m[r][col] == 0 {
                continue;
            }
            let factor = Rational::from(&m[r][col] / &m[rank][col]);
            for k in col..cols {
                let t = Rational::from(&factor * &m[rank][k]);
                m[r][k] -= t;
            }
        }
        rank += 1;
        if rank == rows {
            break;
        }
    }
    (rank, det)
}

pub fn rank_exact(m: &[Vec<Rational>]) -> usize {
    let mut work = m.to_vec();
    eliminate(&mut work).0
}

pub fn det_exact(m: &[Vec<Rational>]) -> Rational {
    assert!(m.iter().all(|r| r.len() == m.len()), "square matrix required");
    if m.is_empty() {
        return Rational::from(1);
    }
    let mut work = m.to_vec();
    let (rank, det) = eliminate(&mut work);
    if rank < m.len() {
        Rational::new()
    } else {
        det
    }
}

/// Least squares `min ||A c - b||` for `A` given by columns, by modified
/// Gram-Schmidt. Columns that are numerically dependent on earlier ones get
/// coefficient 0. Returns the coefficients and the largest absolute residual.
pub fn least_squares(columns: &[Vec<Float>], b: &[Float], precision: u32) -> (Vec<Float>, Float) {
    let rows = b.len();
    let p = columns.len();
    let zero = || Float::with_val(precision, 0);
    let mut q: Vec<Vec<Float>> = Vec::with_capacity(p);
    let mut r = vec![vec![zero(); p]; p];
    let mut kept = vec![false; p];
    let scale =
        columns.iter().flat_map(|c| c.iter()).map(|v| v.clone().abs()).fold(zero(), |a, v| if v > a { v } else { a });
    let drop_below =
        Float::with_val(precision, &scale * Float::with_val(precision, Float::i_exp(1, -((precision * 3 / 4) as i32))));
    for j in 0..p {
        let mut v = columns[j].clone();
        for (i, qi) in q.iter().enumerate() {
            if qi.is_empty() {
                continue;
            }
            let dot = dot(qi, &v, precision);
            for k in 0..rows {
                let t = Float::with_val(precision, &dot * &qi[k]);
                v[k] -= t;
            }
            r[i][j] = dot;
        }
        let norm = dot(&v, &v, precision).sqrt();
        if norm <= drop_below || norm.is_zero() {
            q.push(Vec::new());
            continue;
        }
        kept[j] = true;
        for x in v.iter_mut() {
            *x /= &norm;
        }
        r[j][j] = norm;
        q.push(v);
    }
    // back substitution on the kept columns
    let mut c = vec![zero(); p];
    for j in (0..p).rev() {
        if !kept[j] {
            continue;
        }
        let mut acc = dot(&q[j], b, precision);
        for k in j + 1..p {
            if kept[k] {
                acc -= Float::with_val(precision, &r[j][k] * &c[k]);
            }
        }
        c[j] = acc / &r[j][j];
    }
    let mut worst = zero();
    for i in 0..rows {
        let mut s = Float::with_val(precision, &b[i]);
        for j in 0..p {
            s -= Float::with_val(precision, &columns[j][i] * &c[j]);
        }
        let s = s.abs();
        if s > worst {
            worst = s;
        }
    }
    (c, worst)
}

fn dot(a: &[Float], b: &[Float], precision: u32) -> Float {
    let mut s = Float::with_val(precision, 0);
    for (x, y) in a.iter().zip(b) {
        s += Float::with_val(precision, x * y);
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fm(rows: &[&[i64]]) -> Vec<Vec<Float>> {
        rows.iter().map(|r| r.iter().map(|&v| Float::with_val(128, v)).collect()).collect()
    }

    fn qm(rows: &[&[i64]]) -> Vec<Vec<Rational>> {
        rows.iter().map(|r| r.iter().map(|&v| Rational::from(v)).collect()).collect()
    }

    #[test]
    fn determinants() {
        assert_eq!(det_float(fm(&[&[2, 3], &[4, 9]]), 128), 6);
        assert_eq!(det_float(fm(&[&[0, 1], &[1, 0]]), 128), -1);
        assert_eq!(det_exact(&qm(&[&[2, 3], &[4, 9]])), 6);
        assert_eq!(det_exact(&qm(&[&[0, 1, 2], &[1, 0, 3], &[4, -3, 8]])), -2);
        assert_eq!(det_exact(&qm(&[&[1, 2], &[2, 4]])), 0);
    }

    #[test]
    fn ranks() {
        assert_eq!(rank_exact(&qm(&[&[1, 2, 3], &[2, 4, 6]])), 1);
        assert_eq!(rank_exact(&qm(&[&[1, 0], &[0, 0], &[0, 1]])), 2);
        assert_eq!(rank_exact(&qm(&[&[0, 0]])), 0);
    }

    #[test]
    fn least_squares_exact_fit() {
        // b = 2*c0 - 3*c1
        let c0: Vec<Float> = (0..5).map(|i| Float::with_val(128, i)).collect();
        let c1: Vec<Float> = (0..5).map(|i| Float::with_val(128, i * i + 1)).collect();
        let b: Vec<Float> = (0..5).map(|i| Float::with_val(128, 2 * i - 3 * (i * i + 1))).collect();
        let (c, res) = least_squares(&[c0, c1], &b, 128);
        assert!((c[0].to_f64() - 2.0).abs() < 1e-30);
        assert!((c[1].to_f64() + 3.0).abs() < 1e-30);
        assert!(res < 1e-30);
    }
}
