//! Dense integer matrices with Smith and Hermite normal forms.
//!
//! Entries are arbitrary precision. The Smith form is computed by repeated
//! smallest-pivot elimination; the transforms are tracked exactly so that
//! `U * M * V = S` holds as an identity of integer matrices.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[derive(Clone, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, entries: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.entries[i * n + i] = BigInt::one();
        }
        m
    }

    /// Builds a matrix from row vectors. All rows must have length `cols`.
    pub fn from_rows<T: Into<BigInt> + Clone>(cols: usize, rows: &[Vec<T>]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "row {i} has wrong length");
            for (j, x) in row.iter().enumerate() {
                m.entries[i * cols + j] = x.clone().into();
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: BigInt) {
        self.entries[i * self.cols + j] = value;
    }

    pub fn row(&self, i: usize) -> &[BigInt] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Zero::is_zero)
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows, "dimension mismatch in product");
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.entries[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(j, i, self.get(i, j).clone());
            }
        }
        out
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn determinant(&self) -> BigInt {
        assert_eq!(self.rows, self.cols, "determinant of a non-square matrix");
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.to_rows();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                    Some(i) => {
                        a.swap(i, k);
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let t = &a[i][j] * &a[k][k] - &a[i][k] * &a[k][j];
                    a[i][j] = t / &prev;
                }
            }
            prev = a[k][k].clone();
        }
        sign * &a[n - 1][n - 1]
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.entries.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.entries.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += q * row[src]
    fn add_row_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for j in 0..self.cols {
            let v = &self.entries[src * self.cols + j] * q;
            self.entries[dst * self.cols + j] += v;
        }
    }

    /// col[dst] += q * col[src]
    fn add_col_multiple(&mut self, dst: usize, src: usize, q: &BigInt) {
        if q.is_zero() {
            return;
        }
        for i in 0..self.rows {
            let v = &self.entries[i * self.cols + src] * q;
            self.entries[i * self.cols + dst] += v;
        }
    }

    fn negate_row(&mut self, i: usize) {
        for j in 0..self.cols {
            let v = -std::mem::take(&mut self.entries[i * self.cols + j]);
            self.entries[i * self.cols + j] = v;
        }
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

/// Output of [`smith_normal_form`].
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
    /// Inverse of `v`, maintained alongside it.
    pub v_inv: IntMatrix,
}

impl SmithForm {
    /// Diagonal entries `s_ii` for `i < min(rows, cols)`.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows().min(self.s.cols())).map(|i| self.s.get(i, i).clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().take_while(|d| !d.is_zero()).count()
    }
}

/// Smith normal form: unimodular `U`, `V` with `U * M * V = S`, `S` diagonal,
/// nonnegative, and `S[i][i] | S[i+1][i+1]`.
pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let (r, c) = (m.rows(), m.cols());
    let mut s = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    let mut v_inv = IntMatrix::identity(c);

    for t in 0..r.min(c) {
        loop {
            let Some((pi, pj)) = smallest_nonzero(&s, t) else {
                return SmithForm { u, s, v, v_inv };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            v_inv.swap_rows(t, pj);

            let pivot = s.get(t, t).clone();
            let mut dirty = false;
            for i in t + 1..r {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = -(s.get(i, t) / &pivot);
                s.add_row_multiple(i, t, &q);
                u.add_row_multiple(i, t, &q);
                dirty |= !s.get(i, t).is_zero();
            }
            for j in t + 1..c {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = -(s.get(t, j) / &pivot);
                s.add_col_multiple(j, t, &q);
                v.add_col_multiple(j, t, &q);
                // V' = V (I + q e_t e_j^T)  =>  V'^{-1} = (I - q e_t e_j^T) V^{-1}
                v_inv.add_row_multiple(t, j, &-q);
                dirty |= !s.get(t, j).is_zero();
            }
            if dirty {
                continue;
            }
            // Divisibility: fold any offending row into row t and redo.
            let offending = (t + 1..r).find(|&i| {
                (t + 1..c).any(|j| !s.get(i, j).is_zero() && !s.get(i, j).is_multiple_of(&pivot))
            });
            match offending {
                Some(i) => {
                    s.add_row_multiple(t, i, &BigInt::one());
                    u.add_row_multiple(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithForm { u, s, v, v_inv }
}

fn smallest_nonzero(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows() {
        for j in t..s.cols() {
            let x = s.get(i, j);
            if x.is_zero() {
                continue;
            }
            let better = match best {
                None => true,
                Some((bi, bj)) => x.abs() < s.get(bi, bj).abs(),
            };
            if better {
                best = Some((i, j));
                if x.abs().is_one() {
                    return best;
                }
            }
        }
    }
    best
}

/// Row-style Hermite normal form of the lattice spanned by `rows`.
///
/// Returns the nonzero rows, upper triangular with positive pivots and
/// entries above each pivot reduced into `[0, pivot)`.
pub fn hermite_rows(cols: usize, rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut a: Vec<Vec<BigInt>> = rows.to_vec();
    let mut out: Vec<Vec<BigInt>> = Vec::new();
    let mut start = 0usize;
    for col in 0..cols {
        // Euclid down the column among remaining rows.
        loop {
            let mut nz: Vec<usize> = (start..a.len()).filter(|&i| !a[i][col].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by(|&x, &y| a[x][col].abs().cmp(&a[y][col].abs()));
            let p = nz[0];
            for &i in &nz[1..] {
                let q = &a[i][col] / &a[p][col];
                let prow = a[p].clone();
                for (x, y) in a[i].iter_mut().zip(prow.iter()) {
                    *x -= &q * y;
                }
            }
        }
        if let Some(p) = (start..a.len()).find(|&i| !a[i][col].is_zero()) {
            a.swap(start, p);
            if a[start][col].is_negative() {
                for x in a[start].iter_mut() {
                    *x = -std::mem::take(x);
                }
            }
            start += 1;
        }
    }
    a.truncate(start);
    // Reduce above the pivots.
    let pivots: Vec<usize> = a.iter().map(|r| r.iter().position(|x| !x.is_zero()).unwrap()).collect();
    for k in 0..a.len() {
        let pc = pivots[k];
        for i in 0..k {
            let q = a[i][pc].div_floor(&a[k][pc]);
            if q.is_zero() {
                continue;
            }
            let krow = a[k].clone();
            for (x, y) in a[i].iter_mut().zip(krow.iter()) {
                *x -= &q * y;
            }
        }
    }
    out.extend(a);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[Vec<i64>]) -> IntMatrix {
        IntMatrix::from_rows(rows.first().map_or(0, Vec::len), rows)
    }

    fn check(mat: &IntMatrix) -> SmithForm {
        let f = smith_normal_form(mat);
        assert_eq!(f.u.mul(mat).mul(&f.v), f.s);
        assert!(f.u.determinant().abs().is_one());
        assert!(f.v.determinant().abs().is_one());
        assert_eq!(f.v.mul(&f.v_inv), IntMatrix::identity(mat.cols()));
        let d = f.diagonal();
        for w in d.windows(2) {
            if !w[1].is_zero() {
                assert!(w[1].is_multiple_of(&w[0]));
            } else {
                assert!(!w[0].is_negative());
            }
        }
        for i in 0..f.s.rows() {
            for j in 0..f.s.cols() {
                if i != j {
                    assert!(f.s.get(i, j).is_zero());
                }
            }
        }
        f
    }

    #[test]
    fn diag_two_three() {
        let f = check(&m(&[vec![2, 0], vec![0, 3]]));
        assert_eq!(f.diagonal(), vec![BigInt::from(1), BigInt::from(6)]);
    }

    #[test]
    fn zero_matrix() {
        let z = IntMatrix::zeros(3, 2);
        let f = check(&z);
        assert!(f.s.is_zero());
        assert_eq!(f.u, IntMatrix::identity(3));
        assert_eq!(f.v, IntMatrix::identity(2));
    }

    #[test]
    fn one_by_one() {
        let f = check(&m(&[vec![4]]));
        assert_eq!(f.s, m(&[vec![4]]));
        let f = check(&m(&[vec![-4]]));
        assert_eq!(f.s, m(&[vec![4]]));
    }

    #[test]
    fn rectangular() {
        let f = check(&m(&[vec![2, 4, 4], vec![-6, 6, 12], vec![10, -4, -16]]));
        assert_eq!(f.diagonal(), vec![BigInt::from(2), BigInt::from(6), BigInt::from(12)]);
        check(&m(&[vec![6, 4], vec![4, 6], vec![10, 10], vec![0, 2]]));
    }

    #[test]
    fn determinant_small() {
        assert_eq!(m(&[vec![2, 1], vec![7, 4]]).determinant(), BigInt::from(1));
        assert_eq!(m(&[vec![0, 1, 2], vec![1, 0, 3], vec![4, -3, 8]]).determinant(), BigInt::from(-2));
    }

    #[test]
    fn hermite_basic() {
        let rows: Vec<Vec<BigInt>> = vec![
            vec![4.into(), 6.into()],
            vec![2.into(), 2.into()],
            vec![0.into(), 5.into()],
        ];
        let h = hermite_rows(2, &rows);
        assert_eq!(h, vec![vec![BigInt::from(2), BigInt::from(0)], vec![BigInt::from(0), BigInt::from(1)]]);
    }
}
