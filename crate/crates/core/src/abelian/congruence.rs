//! Linear congruence systems `sum_k a_jk x_k = b_j (mod m_j)`.
//!
//! Every row is rescaled to the common modulus `e = lcm(m_j)` and the matrix
//! is diagonalised by integer row and column operations with entries kept
//! reduced mod `e`. Row operations are applied to the right-hand side, column
//! operations are recorded so that solutions can be mapped back.

use num_integer::Integer;

#[derive(Clone, Debug, Default)]
pub struct CongruenceSystem {
    unknowns: usize,
    rows: Vec<(Vec<i128>, i128, u64)>,
}

/// Solution set of a [`CongruenceSystem`], all values reduced mod `modulus`.
///
/// Every solution is `particular + sum c_i * homogeneous[i]` for integers `c_i`.
#[derive(Clone, Debug)]
pub struct CongruenceSolution {
    pub modulus: u64,
    pub particular: Vec<i128>,
    pub homogeneous: Vec<Vec<i128>>,
}

impl CongruenceSystem {
    pub fn new(unknowns: usize) -> Self {
        CongruenceSystem { unknowns, rows: Vec::new() }
    }

    pub fn unknowns(&self) -> usize {
        self.unknowns
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds `coeffs . x = rhs (mod modulus)`. A modulus of 1 is vacuous and dropped.
    pub fn push(&mut self, coeffs: Vec<i128>, rhs: i128, modulus: u64) {
        assert_eq!(coeffs.len(), self.unknowns);
        assert!(modulus >= 1);
        if modulus == 1 {
            return;
        }
        self.rows.push((coeffs, rhs, modulus));
    }

    pub fn solve(&self) -> Option<CongruenceSolution> {
        let n = self.unknowns;
        let e: u64 = self.rows.iter().fold(1u64, |acc, r| acc.lcm(&r.2));
        let ei = e as i128;
        if e == 1 {
            return Some(CongruenceSolution {
                modulus: 1,
                particular: vec![0; n],
                homogeneous: (0..n).map(|k| unit(n, k)).collect(),
            });
        }
        let mut a: Vec<Vec<i128>> = Vec::with_capacity(self.rows.len());
        let mut b: Vec<i128> = Vec::with_capacity(self.rows.len());
        for (coeffs, rhs, m) in &self.rows {
            let scale = (e / m) as i128;
            a.push(coeffs.iter().map(|&x| sym(x.rem_fast(ei) * scale % ei, ei)).collect());
            b.push(sym(rhs.rem_fast(ei) * scale % ei, ei));
        }
        // Zero rows only constrain the right-hand side.
        let mut k = 0;
        while k < a.len() {
            if a[k].iter().all(|&x| x == 0) {
                if b[k] != 0 {
                    return None;
                }
                a.swap_remove(k);
                b.swap_remove(k);
            } else {
                k += 1;
            }
        }
        // Column transform V, x = V y.
        let mut v: Vec<Vec<i128>> = (0..n).map(|k| unit(n, k)).collect();

        let mut t = 0;
        while t < a.len().min(n) {
            // Smallest |entry| in the trailing block.
            let mut best: Option<(usize, usize)> = None;
            'search: for (i, row) in a.iter().enumerate().skip(t) {
                for (j, &x) in row.iter().enumerate().skip(t) {
                    if x != 0 && best.is_none_or(|(bi, bj)| x.abs() < a[bi][bj].abs()) {
                        best = Some((i, j));
                        if x.abs() == 1 {
                            break 'search;
                        }
                    }
                }
            }
            let Some((pi, pj)) = best else { break };
            a.swap(t, pi);
            b.swap(t, pi);
            if pj != t {
                for row in a.iter_mut() {
                    row.swap(t, pj);
                }
                for row in v.iter_mut() {
                    row.swap(t, pj);
                }
            }
            let p = a[t][t];
            let mut dirty = false;
            let mut touched = Vec::new();
            for i in t + 1..a.len() {
                if a[i][t] == 0 {
                    continue;
                }
                touched.push(i);
                let q = a[i][t] / p;
                for j in t..n {
                    a[i][j] = sym((a[i][j] - q * a[t][j]).rem_fast(ei), ei);
                }
                b[i] = sym((b[i] - q * b[t]).rem_fast(ei), ei);
                dirty |= a[i][t] != 0;
            }
            for j in t + 1..n {
                if a[t][j] == 0 {
                    continue;
                }
                let q = a[t][j] / p;
                for row in a.iter_mut().filter(|row| row[t] != 0) {
                    row[j] = sym((row[j] - q * row[t]).rem_fast(ei), ei);
                }
                for row in v.iter_mut() {
                    row[j] = (row[j] - q * row[t]).rem_fast(ei);
                }
                dirty |= a[t][j] != 0;
            }
            if !dirty {
                t += 1;
                // descending, so swap_remove never moves an unchecked touched row
                for &i in touched.iter().rev() {
                    if a[i].iter().all(|&x| x == 0) {
                        if b[i] != 0 {
                            return None;
                        }
                        a.swap_remove(i);
                        b.swap_remove(i);
                    }
                }
            }
        }
        let rows = a.len();

        let mut y = vec![0i128; n];
        let mut hom_y: Vec<Vec<i128>> = Vec::new();
        for k in 0..n {
            let s = if k < rows { a[k][k].rem_fast(ei) } else { 0 };
            let c = if k < rows { b[k].rem_fast(ei) } else { 0 };
            let g = s.gcd(&ei);
            if c % g != 0 {
                return None;
            }
            let m = ei / g;
            if m > 1 {
                y[k] = (c / g) % m * mod_inverse((s / g) % m, m) % m;
            }
            hom_y.push(scaled_unit(n, k, m));
        }
        for i in n..rows {
            if b[i].rem_fast(ei) != 0 {
                return None;
            }
        }
        let apply = |y: &[i128]| -> Vec<i128> {
            let mut acc = vec![0i128; n];
            for (k, &yk) in y.iter().enumerate().filter(|(_, &yk)| yk != 0) {
                for (r, out) in acc.iter_mut().enumerate() {
                    if v[r][k] != 0 {
                        *out = (*out + v[r][k] * yk).rem_fast(ei);
                    }
                }
            }
            acc
        };
        let particular = apply(&y);
        let homogeneous = hom_y
            .iter()
            .map(|h| apply(h))
            .filter(|h| h.iter().any(|&x| x != 0))
            .collect();
        Some(CongruenceSolution { modulus: e, particular, homogeneous })
    }
}

fn unit(n: usize, k: usize) -> Vec<i128> {
    scaled_unit(n, k, 1)
}

fn scaled_unit(n: usize, k: usize, s: i128) -> Vec<i128> {
    let mut u = vec![0; n];
    u[k] = s;
    u
}

trait RemFast {
    fn rem_fast(self, m: i128) -> i128;
}

impl RemFast for i128 {
    /// `rem_euclid`, through 64-bit division when both operands fit.
    #[inline]
    fn rem_fast(self, m: i128) -> i128 {
        match (i64::try_from(self), i64::try_from(m)) {
            (Ok(x), Ok(m)) => x.rem_euclid(m) as i128,
            _ => self.rem_euclid(m),
        }
    }
}

fn sym(x: i128, m: i128) -> i128 {
    if 2 * x > m {
        x - m
    } else {
        x
    }
}

fn mod_inverse(a: i128, m: i128) -> i128 {
    if m == 1 {
        return 0;
    }
    let g = a.extended_gcd(&m);
    debug_assert_eq!(g.gcd, 1);
    g.x.rem_euclid(m)
}
