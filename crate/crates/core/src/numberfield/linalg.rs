//! Small dense linear algebra over F_p and Q.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::poly::Fp;

/// Row reduction in place; returns the pivot columns.
fn rref(fp: Fp, m: &mut [Vec<u64>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(p) = (r..rows).find(|&i| m[i][c] != 0) else { continue };
        m.swap(r, p);
        let inv = fp.inv(m[r][c]);
        for x in m[r].iter_mut() {
            *x = fp.mul(*x, inv);
        }
        for i in 0..rows {
            if i != r && m[i][c] != 0 {
                let f = m[i][c];
                for j in 0..cols {
                    let v = fp.mul(f, m[r][j]);
                    m[i][j] = fp.sub(m[i][j], v);
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

/// Basis of `{x : x M = 0}` for an `r x c` matrix `M` over `F_p`.
pub(crate) fn left_kernel(fp: Fp, m: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let rows = m.len();
    if rows == 0 {
        return Vec::new();
    }
    let cols = m[0].len();
    // right kernel of the transpose
    let mut t: Vec<Vec<u64>> = (0..cols).map(|j| (0..rows).map(|i| m[i][j]).collect()).collect();
    let pivots = rref(fp, &mut t);
    let free: Vec<usize> = (0..rows).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut v = vec![0u64; rows];
            v[f] = 1;
            for (k, &pc) in pivots.iter().enumerate() {
                v[pc] = fp.sub(0, t[k][f]);
            }
            v
        })
        .collect()
}

/// Row-reduced basis of the span of `vectors` over `F_p`.
pub(crate) fn span_basis(fp: Fp, vectors: &[Vec<u64>]) -> Vec<Vec<u64>> {
    let mut m = vectors.to_vec();
    let k = rref(fp, &mut m).len();
    m.truncate(k);
    m
}

pub(crate) fn fp_vec_mat(fp: Fp, x: &[u64], m: &[Vec<u64>]) -> Vec<u64> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![0u64; cols];
    for (xi, row) in x.iter().zip(m) {
        if *xi == 0 {
            continue;
        }
        for (o, &v) in out.iter_mut().zip(row) {
            *o = fp.add(*o, fp.mul(*xi, v));
        }
    }
    out
}

pub(crate) type QMatrix = Vec<Vec<BigRational>>;

pub(crate) fn q_inverse(m: &QMatrix) -> Option<QMatrix> {
    let n = m.len();
    let mut a: QMatrix = m.clone();
    let mut inv: QMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    for c in 0..n {
        let p = (c..n).find(|&i| !a[i][c].is_zero())?;
        a.swap(c, p);
        inv.swap(c, p);
        let piv = a[c][c].clone();
        for j in 0..n {
            a[c][j] /= &piv;
            inv[c][j] /= &piv;
        }
        for i in 0..n {
            if i != c && !a[i][c].is_zero() {
                let f = a[i][c].clone();
                for j in 0..n {
                    let (ac, ic) = (a[c][j].clone(), inv[c][j].clone());
                    a[i][j] -= &f * ac;
                    inv[i][j] -= &f * ic;
                }
            }
        }
    }
    Some(inv)
}

pub(crate) fn q_det(m: &QMatrix) -> BigRational {
    let n = m.len();
    let mut a = m.clone();
    let mut det = BigRational::one();
    for c in 0..n {
        let Some(p) = (c..n).find(|&i| !a[i][c].is_zero()) else { return BigRational::zero() };
        if p != c {
            a.swap(c, p);
            det = -det;
        }
        det *= &a[c][c];
        for i in c + 1..n {
            if !a[i][c].is_zero() {
                let f = &a[i][c] / &a[c][c];
                for j in c..n {
                    let v = &f * &a[c][j];
                    a[i][j] -= v;
                }
            }
        }
    }
    det
}

pub(crate) fn q_vec_mat(x: &[BigRational], m: &QMatrix) -> Vec<BigRational> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut out = vec![BigRational::zero(); cols];
    for (xi, row) in x.iter().zip(m) {
        if xi.is_zero() {
            continue;
        }
        for (o, v) in out.iter_mut().zip(row) {
            *o += xi * v;
        }
    }
    out
}

pub(crate) fn q_mat_mul(a: &QMatrix, b: &QMatrix) -> QMatrix {
    a.iter().map(|row| q_vec_mat(row, b)).collect()
}

/// Characteristic polynomial `det(t I - M)`, little-endian, by Faddeev-LeVerrier.
pub(crate) fn q_charpoly(m: &QMatrix) -> Vec<BigRational> {
    let n = m.len();
    let mut coeffs = vec![BigRational::zero(); n + 1];
    coeffs[n] = BigRational::one();
    let identity: QMatrix = (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigRational::one() } else { BigRational::zero() }).collect())
        .collect();
    let mut mk = identity.clone();
    for k in 1..=n {
        let am = q_mat_mul(m, &mk);
        let tr: BigRational = (0..n).map(|i| am[i][i].clone()).sum();
        let c = -tr / BigRational::from_integer(BigInt::from(k));
        coeffs[n - k] = c.clone();
        mk = am;
        for i in 0..n {
            mk[i][i] += &c;
        }
    }
    coeffs
}

/// The entries as integers, if they all are.
pub(crate) fn q_to_z(v: &[BigRational]) -> Option<Vec<BigInt>> {
    v.iter().map(|x| x.is_integer().then(|| x.to_integer())).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(BigInt::from(n))
    }

    #[test]
    fn fp_kernel() {
        let fp = Fp(5);
        let m = vec![vec![1, 2], vec![2, 4], vec![0, 1]];
        let k = left_kernel(fp, &m);
        assert_eq!(k.len(), 1);
        assert_eq!(fp_vec_mat(fp, &k[0], &m), vec![0, 0]);
    }

    #[test]
    fn rational_inverse_and_charpoly() {
        let m = vec![vec![q(2), q(1)], vec![q(1), q(1)]];
        let inv = q_inverse(&m).unwrap();
        assert_eq!(q_mat_mul(&m, &inv), vec![vec![q(1), q(0)], vec![q(0), q(1)]]);
        assert_eq!(q_det(&m), q(1));
        // t^2 - 3t + 1
        assert_eq!(q_charpoly(&m), vec![q(1), q(-3), q(1)]);
    }
}
