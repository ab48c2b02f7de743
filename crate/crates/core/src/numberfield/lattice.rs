//! Lattice reduction and short vector enumeration for integral quadratic forms.
//!
//! Forms are integer Gram matrices; a rational T2 form is scaled by the
//! common denominator of its entries, a floating one by a fixed power of two
//! and rounded. Reduction is the integral LLL algorithm, which never leaves
//! exact arithmetic; enumeration is Fincke-Pohst in floating point followed
//! by an exact filter on the candidates.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use super::T2Form;

pub(crate) type Gram = Vec<Vec<BigInt>>;

/// The T2 form on `O_K` as an integer Gram matrix, up to a positive scalar.
pub(crate) fn integral_t2(t2: &T2Form) -> Gram {
    match &t2.exact {
        Some(g) => {
            let den = g.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
            let den = BigRational::from_integer(den);
            g.iter().map(|r| r.iter().map(|x| (x * &den).to_integer()).collect()).collect()
        }
        None => {
            let scale = (1u64 << 24) as f64;
            t2.approx.iter().map(|r| r.iter().map(|&x| BigInt::from((x * scale).round() as i128)).collect()).collect()
        }
    }
}

/// Gram matrix of the rows of `basis` under `form`.
pub(crate) fn gram_of(basis: &[Vec<BigInt>], form: &Gram) -> Gram {
    let bg: Vec<Vec<BigInt>> = basis
        .iter()
        .map(|b| (0..form.len()).map(|j| b.iter().zip(form).map(|(x, row)| x * &row[j]).sum()).collect())
        .collect();
    bg.iter().map(|u| basis.iter().map(|v| u.iter().zip(v).map(|(x, y)| x * y).sum()).collect()).collect()
}

pub(crate) fn form_value(gram: &Gram, x: &[BigInt]) -> BigInt {
    let n = x.len();
    let mut acc = BigInt::zero();
    for i in 0..n {
        if x[i].is_zero() {
            continue;
        }
        let mut row = BigInt::zero();
        for j in 0..n {
            if !x[j].is_zero() {
                row += &gram[i][j] * &x[j];
            }
        }
        acc += &x[i] * row;
    }
    acc
}

fn round_div(a: &BigInt, b: &BigInt) -> BigInt {
    // nearest integer to a/b for b > 0
    let two = BigInt::from(2);
    (a * &two + b).div_floor(&(b * &two))
}

/// Integral LLL with parameter 3/4. Returns the reduced Gram matrix and the
/// transformation `H` whose rows express the new basis in the old one.
pub(crate) fn lll(gram: &Gram) -> (Gram, Vec<Vec<BigInt>>) {
    let n = gram.len();
    let mut a = gram.clone();
    let mut h: Vec<Vec<BigInt>> =
        (0..n).map(|i| (0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect()).collect();
    if n <= 1 {
        return (a, h);
    }
    // d[i + 1] is the Gram determinant of the first i + 1 vectors, d[0] = 1
    let mut d = vec![BigInt::zero(); n + 1];
    let mut lam = vec![vec![BigInt::zero(); n]; n];
    d[0] = BigInt::one();
    d[1] = a[0][0].clone();
    let mut k = 1usize;
    let mut kmax = 0usize;

    let red = |k: usize, l: usize, a: &mut Gram, h: &mut Vec<Vec<BigInt>>, lam: &mut Vec<Vec<BigInt>>, d: &[BigInt]| {
        if (&lam[k][l] * BigInt::from(2)).abs() <= d[l + 1] {
            return;
        }
        let q = round_div(&lam[k][l], &d[l + 1]);
        // b_k -= q b_l
        let hl = h[l].clone();
        for (x, y) in h[k].iter_mut().zip(&hl) {
            *x -= &q * y;
        }
        let al = a[l].clone();
        for (x, y) in a[k].iter_mut().zip(&al) {
            *x -= &q * y;
        }
        for row in a.iter_mut() {
            let v = &q * &row[l];
            row[k] -= v;
        }
        lam[k][l] -= &q * &d[l + 1];
        for i in 0..l {
            let v = &q * &lam[l][i];
            lam[k][i] -= v;
        }
    };

    while k < n {
        if k > kmax {
            kmax = k;
            for j in 0..=k {
                let mut u = a[k][j].clone();
                for i in 0..j {
                    u = (&d[i + 1] * &u - &lam[k][i] * &lam[j][i]) / &d[i];
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    assert!(!u.is_zero(), "LLL input is not positive definite");
                    d[k + 1] = u;
                }
            }
        }
        red(k, k - 1, &mut a, &mut h, &mut lam, &d);
        let lhs = BigInt::from(4) * &d[k + 1] * &d[k - 1];
        let rhs = BigInt::from(3) * &d[k] * &d[k] - BigInt::from(4) * &lam[k][k - 1] * &lam[k][k - 1];
        if lhs < rhs {
            // swap b_k and b_{k-1}
            h.swap(k, k - 1);
            a.swap(k, k - 1);
            for row in a.iter_mut() {
                row.swap(k, k - 1);
            }
            for j in 0..k - 1 {
                let t = lam[k][j].clone();
                lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
            }
            let l = lam[k][k - 1].clone();
            let b = (&d[k - 1] * &d[k + 1] + &l * &l) / &d[k];
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                lam[i][k] = (&d[k + 1] * &lam[i][k - 1] - &l * &t) / &d[k];
                lam[i][k - 1] = (&b * &t + &l * &lam[i][k]) / &d[k + 1];
            }
            d[k] = b;
            if k > 1 {
                k -= 1;
            }
        } else {
            for l in (0..k - 1).rev() {
                red(k, l, &mut a, &mut h, &mut lam, &d);
            }
            k += 1;
        }
    }
    (a, h)
}

/// All nonzero `x` (up to sign) with `x G x^T <= bound`, sorted by value,
/// or `None` when more than `limit` exist.
pub(crate) fn short_vectors(gram: &Gram, bound: &BigInt, limit: usize) -> Option<Vec<(BigInt, Vec<BigInt>)>> {
    let n = gram.len();
    let g: Vec<Vec<f64>> = gram.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::INFINITY)).collect()).collect();
    // Q(x) = sum_i q[i][i] (x_i + sum_{j > i} q[i][j] x_j)^2
    let mut q = g.clone();
    for i in 0..n {
        for j in i + 1..n {
            q[j][i] = q[i][j];
            q[i][j] /= q[i][i];
        }
        for k in i + 1..n {
            for l in k..n {
                q[k][l] -= q[k][i] * q[i][l];
            }
        }
    }
    let c = bound.to_f64().unwrap_or(f64::INFINITY) * (1.0 + 1e-9) + 1e-6;
    let mut out: Vec<(BigInt, Vec<BigInt>)> = Vec::new();
    let mut x = vec![0i64; n];
    let mut overflow = false;
    enumerate(n - 1, 0.0, c, &q, &mut x, &mut |x: &[i64]| {
        if x.iter().all(|&v| v == 0) {
            return true;
        }
        // one of each pair +-x: first nonzero coordinate from the top is positive
        if x.iter().rev().find(|&&v| v != 0).is_some_and(|&v| v < 0) {
            return true;
        }
        let xb: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
        let value = form_value(gram, &xb);
        if &value <= bound {
            out.push((value, xb));
            if out.len() > limit {
                overflow = true;
                return false;
            }
        }
        true
    });
    if overflow {
        return None;
    }
    out.sort();
    Some(out)
}

fn enumerate(i: usize, partial: f64, bound: f64, q: &[Vec<f64>], x: &mut [i64], visit: &mut dyn FnMut(&[i64]) -> bool) -> bool {
    let n = x.len();
    let center: f64 = -(i + 1..n).map(|j| q[i][j] * x[j] as f64).sum::<f64>();
    let room = bound - partial;
    if room < 0.0 {
        return true;
    }
    let r = (room / q[i][i]).sqrt();
    let lo = (center - r).ceil() as i64;
    let hi = (center + r).floor() as i64;
    for v in lo..=hi {
        x[i] = v;
        let t = q[i][i] * (v as f64 - center).powi(2);
        let keep_going = if i == 0 { visit(x) } else { enumerate(i - 1, partial + t, bound, q, x, visit) };
        if !keep_going {
            x[i] = 0;
            return false;
        }
    }
    x[i] = 0;
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn g(rows: &[&[i64]]) -> Gram {
        rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
    }

    #[test]
    fn lll_reduces_skewed_plane_lattice() {
        // basis (1000003, 0), (123457, 1) under the standard form
        let basis = g(&[&[1_000_003, 0], &[123_457, 1]]);
        let id = g(&[&[1, 0], &[0, 1]]);
        let gram = gram_of(&basis, &id);
        let (reduced, h) = lll(&gram);
        // the transformation is unimodular and consistent with the Gram matrix
        let new_basis: Vec<Vec<BigInt>> = h
            .iter()
            .map(|r| (0..2).map(|j| r.iter().zip(&basis).map(|(c, b)| c * &b[j]).sum()).collect())
            .collect();
        assert_eq!(gram_of(&new_basis, &id), reduced);
        let det = &h[0][0] * &h[1][1] - &h[0][1] * &h[1][0];
        assert_eq!(det.abs(), BigInt::one());
        // first vector within 2^((n-1)/2) of the minimum, and the minimum is below sqrt(det)
        assert!(reduced[0][0] <= BigInt::from(2 * 1_000_003));
    }

    #[test]
    fn enumeration_matches_brute_force() {
        let gram = g(&[&[5, 2, 1], &[2, 6, -1], &[1, -1, 4]]);
        let bound = BigInt::from(30);
        let found = short_vectors(&gram, &bound, 10_000).unwrap();
        let mut brute = Vec::new();
        for a in -6i64..=6 {
            for b in -6i64..=6 {
                for c in -6i64..=6 {
                    let x = vec![BigInt::from(a), BigInt::from(b), BigInt::from(c)];
                    let v = form_value(&gram, &x);
                    let first = [c, b, a].into_iter().find(|&t| t != 0);
                    if first.is_some_and(|t| t > 0) && v <= bound {
                        brute.push((v, x));
                    }
                }
            }
        }
        brute.sort();
        assert_eq!(found, brute);
        assert!(short_vectors(&gram, &bound, 3).is_none());
    }
}
