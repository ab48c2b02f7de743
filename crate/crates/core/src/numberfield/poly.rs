//! Polynomials over Z, Q and F_p, as little-endian coefficient vectors.
//!
//! Only what the field machinery needs: factoring modulo a prime
//! (square-free, distinct-degree and equal-degree splitting), Hensel
//! lifting for an exact irreducibility test over Z, Sturm counts and
//! numerical roots.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};

use crate::abelian::IntMatrix;
use crate::arith::{is_prime, pow_mod};

pub(crate) fn trim<T: Zero>(v: &mut Vec<T>) {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
}

/// Degree of a trimmed polynomial; the zero polynomial has no degree.
pub(crate) fn degree<T>(f: &[T]) -> Option<usize> {
    f.len().checked_sub(1)
}

pub(crate) fn z_mul(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![BigInt::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trim(&mut out);
    out
}

pub(crate) fn z_sub(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut out = vec![BigInt::zero(); a.len().max(b.len())];
    for (i, x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, y) in b.iter().enumerate() {
        out[i] -= y;
    }
    trim(&mut out);
    out
}

pub(crate) fn z_derivative(f: &[BigInt]) -> Vec<BigInt> {
    let mut out: Vec<BigInt> = f.iter().enumerate().skip(1).map(|(i, c)| c * BigInt::from(i)).collect();
    trim(&mut out);
    out
}

/// Division by a monic polynomial over Z.
pub(crate) fn z_divrem_monic(a: &[BigInt], b: &[BigInt]) -> (Vec<BigInt>, Vec<BigInt>) {
    let db = b.len() - 1;
    debug_assert!(b[db].is_one());
    let mut r = a.to_vec();
    trim(&mut r);
    if r.len() <= db {
        return (Vec::new(), r);
    }
    let mut q = vec![BigInt::zero(); r.len() - db];
    for k in (0..q.len()).rev() {
        let c = r[k + db].clone();
        if c.is_zero() {
            continue;
        }
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        q[k] = c;
    }
    trim(&mut r);
    trim(&mut q);
    (q, r)
}

/// Discriminant of a monic polynomial, via the Sylvester resultant with its derivative.
pub fn discriminant(f: &[BigInt]) -> BigInt {
    let n = f.len() - 1;
    let df = z_derivative(f);
    if n == 1 {
        return BigInt::one();
    }
    let m = df.len() - 1;
    let size = n + m;
    let mut syl = IntMatrix::zeros(size, size);
    for i in 0..m {
        for (j, c) in f.iter().rev().enumerate() {
            syl.set(i, i + j, c.clone());
        }
    }
    for i in 0..n {
        for (j, c) in df.iter().rev().enumerate() {
            syl.set(m + i, i + j, c.clone());
        }
    }
    let res = syl.determinant();
    if (n * (n - 1) / 2) % 2 == 1 {
        -res
    } else {
        res
    }
}

/// Arithmetic in `F_p[x]` for a prime `p < 2^63`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Fp(pub u64);

impl Fp {
    pub fn p(self) -> u64 {
        self.0
    }

    pub fn add(self, a: u64, b: u64) -> u64 {
        let s = a + b;
        if s >= self.0 {
            s - self.0
        } else {
            s
        }
    }

    pub fn sub(self, a: u64, b: u64) -> u64 {
        if a >= b {
            a - b
        } else {
            a + self.0 - b
        }
    }

    pub fn mul(self, a: u64, b: u64) -> u64 {
        ((a as u128 * b as u128) % self.0 as u128) as u64
    }

    pub fn inv(self, a: u64) -> u64 {
        assert!(a % self.0 != 0, "inverse of zero mod {}", self.0);
        pow_mod(a, self.0 - 2, self.0)
    }

    pub fn from_big(self, x: &BigInt) -> u64 {
        x.mod_floor(&BigInt::from(self.0)).to_u64().expect("reduced residue fits")
    }

    pub fn reduce(self, f: &[BigInt]) -> Vec<u64> {
        let mut v: Vec<u64> = f.iter().map(|c| self.from_big(c)).collect();
        trim(&mut v);
        v
    }

    pub fn poly_add(self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.add(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
        }
        trim(&mut out);
        out
    }

    pub fn poly_sub(self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let mut out = vec![0; a.len().max(b.len())];
        for (i, o) in out.iter_mut().enumerate() {
            *o = self.sub(a.get(i).copied().unwrap_or(0), b.get(i).copied().unwrap_or(0));
        }
        trim(&mut out);
        out
    }

    pub fn poly_mul(self, a: &[u64], b: &[u64]) -> Vec<u64> {
        if a.is_empty() || b.is_empty() {
            return Vec::new();
        }
        let mut out = vec![0u64; a.len() + b.len() - 1];
        for (i, &x) in a.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in b.iter().enumerate() {
                out[i + j] = self.add(out[i + j], self.mul(x, y));
            }
        }
        trim(&mut out);
        out
    }

    pub fn scale(self, a: &[u64], k: u64) -> Vec<u64> {
        let mut out: Vec<u64> = a.iter().map(|&x| self.mul(x, k)).collect();
        trim(&mut out);
        out
    }

    pub fn divrem(self, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>) {
        let db = degree(b).expect("division by the zero polynomial");
        let inv = self.inv(b[db]);
        let mut r = a.to_vec();
        trim(&mut r);
        if r.len() <= db {
            return (Vec::new(), r);
        }
        let mut q = vec![0u64; r.len() - db];
        for k in (0..q.len()).rev() {
            let c = self.mul(r[k + db], inv);
            if c == 0 {
                continue;
            }
            for (j, &bj) in b.iter().enumerate() {
                r[k + j] = self.sub(r[k + j], self.mul(c, bj));
            }
            q[k] = c;
        }
        trim(&mut r);
        trim(&mut q);
        (q, r)
    }

    pub fn rem(self, a: &[u64], b: &[u64]) -> Vec<u64> {
        self.divrem(a, b).1
    }

    pub fn monic(self, a: &[u64]) -> Vec<u64> {
        match a.last() {
            None => Vec::new(),
            Some(&lc) => self.scale(a, self.inv(lc)),
        }
    }

    pub fn gcd(self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let (mut a, mut b) = (a.to_vec(), b.to_vec());
        trim(&mut a);
        trim(&mut b);
        while !b.is_empty() {
            let r = self.rem(&a, &b);
            a = b;
            b = r;
        }
        self.monic(&a)
    }

    /// `(g, s, t)` with `s a + t b = g = gcd(a, b)`, `g` monic.
    pub fn ext_gcd(self, a: &[u64], b: &[u64]) -> (Vec<u64>, Vec<u64>, Vec<u64>) {
        let (mut r0, mut r1) = (a.to_vec(), b.to_vec());
        let (mut s0, mut s1) = (vec![1u64], Vec::new());
        let (mut t0, mut t1) = (Vec::new(), vec![1u64]);
        while !r1.is_empty() {
            let (q, r) = self.divrem(&r0, &r1);
            let s2 = self.poly_sub(&s0, &self.poly_mul(&q, &s1));
            let t2 = self.poly_sub(&t0, &self.poly_mul(&q, &t1));
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
            t0 = std::mem::replace(&mut t1, t2);
        }
        let inv = self.inv(*r0.last().expect("gcd of nonzero polynomials"));
        (self.scale(&r0, inv), self.scale(&s0, inv), self.scale(&t0, inv))
    }

    pub fn mulmod(self, a: &[u64], b: &[u64], f: &[u64]) -> Vec<u64> {
        self.rem(&self.poly_mul(a, b), f)
    }

    pub fn powmod(self, a: &[u64], mut e: u64, f: &[u64]) -> Vec<u64> {
        let mut base = self.rem(a, f);
        let mut acc = self.rem(&[1], f);
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mulmod(&acc, &base, f);
            }
            base = self.mulmod(&base, &base, f);
            e >>= 1;
        }
        acc
    }

    pub fn derivative(self, a: &[u64]) -> Vec<u64> {
        let mut out: Vec<u64> = a.iter().enumerate().skip(1).map(|(i, &c)| self.mul(c, i as u64 % self.0)).collect();
        trim(&mut out);
        out
    }

    /// Monic irreducible factors of a monic `f` with multiplicities, sorted.
    pub fn factor<R: Rng>(self, f: &[u64], rng: &mut R) -> Vec<(Vec<u64>, u32)> {
        let mut out = Vec::new();
        for (g, e) in self.squarefree(f) {
            for (h, d) in self.distinct_degree(&g) {
                for k in self.equal_degree(&h, d, rng) {
                    out.push((k, e));
                }
            }
        }
        out.sort();
        out
    }

    fn squarefree(self, f: &[u64]) -> Vec<(Vec<u64>, u32)> {
        let mut out = Vec::new();
        if degree(f).unwrap_or(0) == 0 {
            return out;
        }
        let df = self.derivative(f);
        if df.is_empty() {
            for (g, e) in self.squarefree(&self.pth_root(f)) {
                out.push((g, e * self.0 as u32));
            }
            return out;
        }
        let mut c = self.gcd(f, &df);
        let mut w = self.divrem(f, &c).0;
        let mut i = 1;
        while w.len() > 1 {
            let y = self.gcd(&w, &c);
            let fac = self.divrem(&w, &y).0;
            if fac.len() > 1 {
                out.push((self.monic(&fac), i));
            }
            i += 1;
            c = self.divrem(&c, &y).0;
            w = y;
        }
        if c.len() > 1 {
            for (g, e) in self.squarefree(&self.pth_root(&c)) {
                out.push((g, e * self.0 as u32));
            }
        }
        out
    }

    fn pth_root(self, f: &[u64]) -> Vec<u64> {
        f.iter().step_by(self.0 as usize).copied().collect()
    }

    fn distinct_degree(self, f: &[u64]) -> Vec<(Vec<u64>, usize)> {
        let mut out = Vec::new();
        let mut rest = self.monic(f);
        let x = vec![0, 1];
        let mut h = self.rem(&x, &rest);
        let mut d = 1;
        while rest.len() > 2 * d {
            h = self.powmod(&h, self.0, &rest);
            let g = self.gcd(&self.poly_sub(&h, &x), &rest);
            if g.len() > 1 {
                rest = self.divrem(&rest, &g).0;
                h = self.rem(&h, &rest);
                out.push((g, d));
            }
            d += 1;
        }
        if rest.len() > 1 {
            let d = rest.len() - 1;
            out.push((rest, d));
        }
        out
    }

    fn equal_degree<R: Rng>(self, f: &[u64], d: usize, rng: &mut R) -> Vec<Vec<u64>> {
        let n = f.len() - 1;
        if n == d {
            return vec![self.monic(f)];
        }
        loop {
            let a: Vec<u64> = (0..n).map(|_| rng.gen_range(0..self.0)).collect();
            let mut a = a;
            trim(&mut a);
            if a.len() < 2 {
                continue;
            }
            let b = if self.0 == 2 {
                // absolute trace a + a^2 + ... + a^(2^(d-1))
                let mut t = self.rem(&a, f);
                let mut acc = t.clone();
                for _ in 1..d {
                    t = self.mulmod(&t, &t, f);
                    acc = self.poly_add(&acc, &t);
                }
                acc
            } else {
                // a^((p^d - 1)/2) = (a^(1 + p + ... + p^(d-1)))^((p-1)/2)
                let mut t = self.rem(&a, f);
                let mut acc = t.clone();
                for _ in 1..d {
                    t = self.powmod(&t, self.0, f);
                    acc = self.mulmod(&acc, &t, f);
                }
                let b = self.powmod(&acc, (self.0 - 1) / 2, f);
                self.poly_sub(&b, &[1])
            };
            let g = self.gcd(&b, f);
            if g.len() > 1 && g.len() < f.len() {
                let h = self.divrem(f, &g).0;
                let mut out = self.equal_degree(&g, d, rng);
                out.extend(self.equal_degree(&h, d, rng));
                return out;
            }
        }
    }
}

/// Exact irreducibility test for a monic squarefree polynomial over Z.
///
/// Irreducible modulo some good prime settles it; otherwise the
/// factorization modulo the prime with fewest factors is Hensel lifted past
/// the Mignotte bound and every small recombination is trial divided.
pub fn is_irreducible(f: &[BigInt]) -> bool {
    let n = f.len() - 1;
    if n <= 1 {
        return n == 1;
    }
    let disc = discriminant(f);
    if disc.is_zero() {
        return false;
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0x1eaf);
    let mut best: Option<(u64, Vec<Vec<u64>>)> = None;
    let mut tried = 0;
    let mut p = 2u64;
    while tried < 24 {
        p += 1;
        if !is_prime(p) || (&disc % BigInt::from(p)).is_zero() {
            continue;
        }
        tried += 1;
        let fp = Fp(p);
        let factors: Vec<Vec<u64>> = fp.factor(&fp.reduce(f), &mut rng).into_iter().map(|(g, _)| g).collect();
        if factors.len() == 1 {
            return true;
        }
        if best.as_ref().is_none_or(|(_, b)| factors.len() < b.len()) {
            best = Some((p, factors));
        }
    }
    let (p, factors) = best.expect("some good prime");
    // coefficients of a monic factor of degree <= n/2 are bounded by 2^(n/2) |f|_1
    let bound: BigInt = f.iter().map(|c| c.abs()).sum::<BigInt>() << (n / 2 + 1);
    let pb = BigInt::from(p);
    let mut k = 1u32;
    let mut modulus = pb.clone();
    while modulus <= bound {
        modulus *= &pb;
        k += 1;
    }
    let lifted = hensel_lift(f, &factors, p, k);
    let r = lifted.len();
    let half = &modulus >> 1;
    for mask in 1u32..(1 << r) - 1 {
        let deg: usize = (0..r).filter(|i| mask >> i & 1 == 1).map(|i| lifted[i].len() - 1).sum();
        if deg > n / 2 {
            continue;
        }
        let mut g = vec![BigInt::one()];
        for (i, li) in lifted.iter().enumerate() {
            if mask >> i & 1 == 1 {
                g = z_mul(&g, li).into_iter().map(|c| c.mod_floor(&modulus)).collect();
            }
        }
        let g: Vec<BigInt> = g.into_iter().map(|c| if c > half { c - &modulus } else { c }).collect();
        if z_divrem_monic(f, &g).1.is_empty() {
            return false;
        }
    }
    true
}

/// Lifts a factorization of `f` modulo `p` into monic pairwise coprime
/// factors to one modulo `p^k`.
pub(crate) fn hensel_lift(f: &[BigInt], factors: &[Vec<u64>], p: u64, k: u32) -> Vec<Vec<BigInt>> {
    let modulus = BigInt::from(p).pow(k);
    if factors.len() == 1 {
        return vec![f.iter().map(|c| c.mod_floor(&modulus)).collect()];
    }
    let fp = Fp(p);
    let g = factors[0].clone();
    let h = factors[1..].iter().fold(vec![1u64], |acc, x| fp.poly_mul(&acc, x));
    let (one, _, t) = fp.ext_gcd(&g, &h);
    assert_eq!(one, vec![1], "modular factors are not coprime");
    let to_z = |v: &[u64]| -> Vec<BigInt> { v.iter().map(|&c| BigInt::from(c)).collect() };
    let (mut big_g, mut big_h) = (to_z(&g), to_z(&h));
    let mut pj = BigInt::from(p);
    for _ in 1..k {
        let diff = z_sub(f, &z_mul(&big_g, &big_h));
        let e: Vec<BigInt> = diff.iter().map(|c| {
            debug_assert!((c % &pj).is_zero());
            c / &pj
        }).collect();
        let e = fp.reduce(&e);
        let dg = fp.rem(&fp.poly_mul(&t, &e), &g);
        let (dh, rem) = fp.divrem(&fp.poly_sub(&e, &fp.poly_mul(&dg, &h)), &g);
        debug_assert!(rem.is_empty());
        big_g = add_scaled(&big_g, &dg, &pj);
        big_h = add_scaled(&big_h, &dh, &pj);
        pj *= p;
    }
    let big_g: Vec<BigInt> = big_g.into_iter().map(|c| c.mod_floor(&modulus)).collect();
    let big_h: Vec<BigInt> = big_h.into_iter().map(|c| c.mod_floor(&modulus)).collect();
    let mut out = vec![big_g];
    out.extend(hensel_lift(&big_h, &factors[1..], p, k));
    out
}

fn add_scaled(a: &[BigInt], d: &[u64], scale: &BigInt) -> Vec<BigInt> {
    let mut out = a.to_vec();
    for (i, &c) in d.iter().enumerate() {
        out[i] += scale * BigInt::from(c);
    }
    out
}

/// Number of real roots of a squarefree polynomial, by Sturm's theorem.
pub fn real_root_count(f: &[BigInt]) -> usize {
    let to_q = |v: &[BigInt]| -> Vec<BigRational> { v.iter().map(|c| BigRational::from_integer(c.clone())).collect() };
    let mut seq: Vec<Vec<BigRational>> = vec![to_q(f), to_q(&z_derivative(f))];
    loop {
        let (a, b) = (&seq[seq.len() - 2], &seq[seq.len() - 1]);
        if b.len() <= 1 {
            break;
        }
        let r = q_rem(a, b);
        if r.is_empty() {
            break;
        }
        seq.push(r.into_iter().map(|c| -c).collect());
    }
    let changes = |signs: Vec<i32>| signs.windows(2).filter(|w| w[0] != w[1]).count();
    let at_pos: Vec<i32> = seq.iter().map(|g| if g.last().unwrap().is_positive() { 1 } else { -1 }).collect();
    let at_neg: Vec<i32> = seq
        .iter()
        .map(|g| {
            let s = if g.last().unwrap().is_positive() { 1 } else { -1 };
            if (g.len() - 1) % 2 == 1 {
                -s
            } else {
                s
            }
        })
        .collect();
    changes(at_neg) - changes(at_pos)
}

fn q_rem(a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
    let db = b.len() - 1;
    let mut r = a.to_vec();
    while r.len() > db && !r.is_empty() {
        let k = r.len() - 1 - db;
        let c = r.last().unwrap() / &b[db];
        for (j, bj) in b.iter().enumerate() {
            r[k + j] -= &c * bj;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// All complex roots of a squarefree polynomial, by Aberth iteration.
pub fn complex_roots(f: &[BigInt]) -> Vec<Complex64> {
    let n = f.len() - 1;
    let lc = f[n].to_f64().unwrap();
    let c: Vec<Complex64> = f.iter().map(|x| Complex64::new(x.to_f64().unwrap() / lc, 0.0)).collect();
    let dc: Vec<Complex64> = (1..=n).map(|i| c[i] * i as f64).collect();
    let eval = |p: &[Complex64], z: Complex64| p.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, &a| acc * z + a);
    let radius = 1.0 + c[..n].iter().map(|a| a.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(radius, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let ratio = eval(&c, z[i]) / eval(&dc, z[i]);
            let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = ratio / (1.0 - ratio * repulsion);
            z[i] -= w;
            moved = moved.max(w.norm() / (1.0 + z[i].norm()));
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&c| BigInt::from(c)).collect()
    }

    #[test]
    fn factoring_mod_p_multiplies_back() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let cases: [(&[i64], u64); 5] = [
            (&[5, 0, 1], 7),
            (&[1, 0, 0, 1, 0, 0, 1], 19),
            (&[1, 0, 0, 1, 0, 0, 1], 2),
            (&[0, 0, 1, 2, 1], 3),
            (&[16, 0, -34, 0, 1], 5),
        ];
        for (f, p) in cases {
            let fp = Fp(p);
            let fr = fp.reduce(&z(f));
            let factors = fp.factor(&fr, &mut rng);
            let mut prod = vec![1u64];
            for (g, e) in &factors {
                for _ in 0..*e {
                    prod = fp.poly_mul(&prod, g);
                }
            }
            assert_eq!(prod, fr, "{f:?} mod {p}");
        }
        // x^2 + 5 = (x - 3)(x + 3) mod 7
        let f = Fp(7).factor(&[5, 0, 1], &mut rng);
        assert_eq!(f, vec![(vec![3, 1], 1), (vec![4, 1], 1)]);
    }

    #[test]
    fn discriminants() {
        assert_eq!(discriminant(&z(&[5, 0, 1])), BigInt::from(-20));
        assert_eq!(discriminant(&z(&[-3, -1, 1])), BigInt::from(13));
        assert_eq!(discriminant(&z(&[1, 0, 0, 1, 0, 0, 1])), BigInt::from(-19683));
    }

    #[test]
    fn irreducibility() {
        assert!(is_irreducible(&z(&[5, 0, 1])));
        assert!(is_irreducible(&z(&[1, 0, 0, 1, 0, 0, 1])));
        // minimal polynomial of sqrt(-3) + sqrt(13)
        assert!(is_irreducible(&z(&[256, 0, -20, 0, 1])));
        assert!(!is_irreducible(&z(&[-4, 0, 1])));
        // (x^2 + 1)(x^2 + 2), reducible but with no rational roots
        assert!(!is_irreducible(&z(&[2, 0, 3, 0, 1])));
        // (x^2 - 2)(x^2 - 3): reducible modulo every prime
        assert!(!is_irreducible(&z(&[6, 0, -5, 0, 1])));
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(real_root_count(&z(&[5, 0, 1])), 0);
        assert_eq!(real_root_count(&z(&[-3, -1, 1])), 2);
        assert_eq!(real_root_count(&z(&[6, 0, -5, 0, 1])), 4);
        assert_eq!(real_root_count(&z(&[-2, 0, 0, 1])), 1);
    }

    #[test]
    fn aberth_roots() {
        let roots = complex_roots(&z(&[5, 0, 1]));
        for r in roots {
            assert!((r * r + 5.0).norm() < 1e-9);
        }
    }
}
