//! Dense linear algebra over a coefficient ring, pivoting only on units
//! (so it is exact over Z/p^N and over truncated Iwasawa algebras).

use crate::error::{Error, Result};
use crate::padic_core::CoeffRing;

/// Row-major matrix.
pub type Matrix<R> = Vec<Vec<R>>;

pub fn identity<R: CoeffRing>(n: usize, template: &R) -> Matrix<R> {
    (0..n).map(|i| (0..n).map(|j| if i == j { template.one_like() } else { template.zero_like() }).collect()).collect()
}

pub fn mat_mul<R: CoeffRing>(a: &Matrix<R>, b: &Matrix<R>) -> Matrix<R> {
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = row[0].zero_like();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc = acc.add_ref(&row[k].mul_ref(&b[k][j]));
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

/// Row vector times matrix.
pub fn vec_mat<R: CoeffRing>(v: &[R], m: &Matrix<R>) -> Vec<R> {
    mat_mul(&vec![v.to_vec()], m).remove(0)
}

pub fn mat_pow<R: CoeffRing>(a: &Matrix<R>, mut e: u64) -> Matrix<R> {
    let mut r = identity(a.len(), &a[0][0]);
    let mut b = a.clone();
    while e > 0 {
        if e & 1 == 1 {
            r = mat_mul(&r, &b);
        }
        e >>= 1;
        if e > 0 {
            b = mat_mul(&b, &b);
        }
    }
    r
}

pub fn mat_eq<R: CoeffRing>(a: &Matrix<R>, b: &Matrix<R>) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x == y)
}

/// Inverse by Gauss–Jordan elimination with unit pivots.
pub fn inverse<R: CoeffRing>(a: &Matrix<R>) -> Result<Matrix<R>> {
    let n = a.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut m = a.clone();
    let mut inv = identity(n, &a[0][0]);
    for col in 0..n {
        let piv = (col..n)
            .find_map(|r| m[r][col].try_inv().map(|u| (r, u)))
            .ok_or_else(|| Error::RankDeficient(format!("no unit pivot in column {col}")))?;
        let (r, u) = piv;
        m.swap(col, r);
        inv.swap(col, r);
        for j in 0..n {
            m[col][j] = m[col][j].mul_ref(&u);
            inv[col][j] = inv[col][j].mul_ref(&u);
        }
        for i in 0..n {
            if i == col || m[i][col].is_zero() {
                continue;
            }
            let f = m[i][col].clone();
            for j in 0..n {
                let t = f.mul_ref(&m[col][j]);
                m[i][j] = m[i][j].sub_ref(&t);
                let t = f.mul_ref(&inv[col][j]);
                inv[i][j] = inv[i][j].sub_ref(&t);
            }
        }
    }
    Ok(inv)
}

/// Column indices (scanned in increasing order, from `candidates`) on which
/// the rows of `rows` restrict to an invertible square matrix.
pub fn unit_pivots<R: CoeffRing>(rows: &[Vec<R>], candidates: impl IntoIterator<Item = usize>) -> Result<Vec<usize>> {
    let r = rows.len();
    let mut m: Matrix<R> = rows.to_vec();
    let mut pivots = Vec::with_capacity(r);
    let mut used = vec![false; r];
    for col in candidates {
        if pivots.len() == r {
            break;
        }
        let Some(row) = (0..r).find(|&i| !used[i] && m[i][col].try_inv().is_some()) else { continue };
        let u = m[row][col].try_inv().unwrap();
        let prow: Vec<R> = m[row].iter().map(|x| x.mul_ref(&u)).collect();
        for i in 0..r {
            if i != row && !used[i] && !m[i][col].is_zero() {
                let f = m[i][col].clone();
                for (x, y) in m[i].iter_mut().zip(&prow) {
                    *x = x.sub_ref(&f.mul_ref(y));
                }
            }
        }
        used[row] = true;
        pivots.push(col);
    }
    if pivots.len() < r {
        return Err(Error::RankDeficient(format!("found {} unit pivots for {r} vectors", pivots.len())));
    }
    Ok(pivots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic_core::PadicElem;

    fn z(n: i128) -> PadicElem {
        PadicElem::from_int(5, 6, n)
    }

    #[test]
    fn inverse_roundtrip_and_rank_deficiency() {
        let a = vec![vec![z(2), z(5), z(1)], vec![z(3), z(1), z(7)], vec![z(10), z(4), z(1)]];
        let inv = inverse(&a).unwrap();
        assert!(mat_eq(&mat_mul(&a, &inv), &identity(3, &z(0))));
        let sing = vec![vec![z(5), z(10)], vec![z(25), z(5)]];
        assert!(matches!(inverse(&sing), Err(Error::RankDeficient(_))));
    }

    #[test]
    fn pivots_skip_non_unit_columns() {
        let rows = vec![vec![z(5), z(1), z(0)], vec![z(0), z(1), z(1)]];
        assert_eq!(unit_pivots(&rows, 0..3).unwrap(), vec![1, 2]);
        assert!(unit_pivots(&rows, 0..1).is_err());
    }

    #[test]
    fn power_by_squaring_matches_repeated_product() {
        let a = vec![vec![z(2), z(1)], vec![z(5), z(3)]];
        let mut r = identity(2, &z(0));
        for _ in 0..13 {
            r = mat_mul(&r, &a);
        }
        assert!(mat_eq(&r, &mat_pow(&a, 13)));
    }
}
