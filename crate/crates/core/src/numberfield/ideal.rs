//! Ideals of `O_K` as Z-lattices, and prime ideals with their valuations.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::linalg::left_kernel;
use super::poly::Fp;
use super::{FieldDescription, FieldError};
use crate::abelian::hermite_rows;

/// A nonzero ideal, stored as its Hermite basis (upper triangular rows in
/// integral-basis coordinates).
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Ideal {
    basis: Vec<Vec<BigInt>>,
}

impl Ideal {
    /// The ideal generated by `gens` together with `modulus`, which must lie in it.
    pub fn from_generators(k: &FieldDescription, gens: &[Vec<BigInt>], modulus: &BigInt) -> Ideal {
        let n = k.degree();
        let mut rows: Vec<Vec<BigInt>> = (0..n)
            .map(|i| {
                let mut r = vec![BigInt::zero(); n];
                r[i] = modulus.clone();
                r
            })
            .collect();
        for g in gens {
            for row in k.mul_matrix(g) {
                rows.push(row.iter().map(|x| x.mod_floor(modulus)).collect());
            }
        }
        Ideal::from_hnf(hermite_rows(n, &rows))
    }

    fn from_hnf(basis: Vec<Vec<BigInt>>) -> Ideal {
        Ideal { basis }
    }

    pub fn principal(k: &FieldDescription, a: &[BigInt]) -> Ideal {
        let norm = k.norm(a).abs();
        assert!(!norm.is_zero(), "principal ideal of zero");
        Ideal::from_generators(k, &[a.to_vec()], &norm)
    }

    pub fn whole(k: &FieldDescription) -> Ideal {
        Ideal::from_generators(k, &[], &BigInt::one())
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    /// `[O_K : I]`, the product of the Hermite pivots.
    pub fn norm(&self) -> BigInt {
        self.basis.iter().enumerate().map(|(i, r)| r[i].clone()).product()
    }

    pub fn is_whole(&self) -> bool {
        self.norm().is_one()
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        let mut x = x.to_vec();
        for (i, row) in self.basis.iter().enumerate() {
            let (q, r) = x[i].div_mod_floor(&row[i]);
            if !r.is_zero() {
                return false;
            }
            if !q.is_zero() {
                for (xj, bj) in x.iter_mut().zip(row) {
                    *xj -= &q * bj;
                }
            }
        }
        true
    }

    pub fn mul(&self, k: &FieldDescription, other: &Ideal) -> Ideal {
        let modulus = self.norm() * other.norm();
        let mut gens = Vec::new();
        for a in &self.basis {
            for b in &other.basis {
                gens.push(k.mul(a, b));
            }
        }
        Ideal::from_generators(k, &gens, &modulus)
    }

    pub fn pow(&self, k: &FieldDescription, e: u32) -> Ideal {
        let mut acc = Ideal::whole(k);
        for _ in 0..e {
            acc = acc.mul(k, self);
        }
        acc
    }

    pub fn contains_ideal(&self, other: &Ideal) -> bool {
        other.basis.iter().all(|b| self.contains(b))
    }
}

/// A prime ideal above the rational prime `p`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrimeIdeal {
    pub p: u64,
    pub residue_degree: u32,
    pub ramification_index: u32,
    ideal: Ideal,
    /// `beta` with `beta P` inside `p O_K` and `beta` outside it.
    #[serde(skip)]
    anti_uniformizer: Vec<BigInt>,
}

impl PrimeIdeal {
    /// Completes a prime ideal from its lattice; `e` is read off `v_P(p)`.
    pub(crate) fn from_ideal(k: &FieldDescription, p: u64, ideal: Ideal) -> Result<PrimeIdeal, FieldError> {
        let norm = ideal.norm();
        let mut f = 0u32;
        let mut rest = norm.clone();
        let pb = BigInt::from(p);
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            f += 1;
        }
        if !rest.is_one() || f == 0 {
            return Err(FieldError::Internal(format!("ideal of norm {norm} is not above {p}")));
        }
        let anti_uniformizer = anti_uniformizer(k, p, &ideal)?;
        let mut prime = PrimeIdeal { p, residue_degree: f, ramification_index: 0, ideal, anti_uniformizer };
        prime.ramification_index = prime.valuation(k, &k.from_integer(&pb));
        if prime.ramification_index == 0 {
            return Err(FieldError::Internal(format!("prime above {p} does not divide {p}")));
        }
        Ok(prime)
    }

    pub fn ideal(&self) -> &Ideal {
        &self.ideal
    }

    pub fn z_basis(&self) -> &[Vec<BigInt>] {
        self.ideal.basis()
    }

    pub fn norm(&self) -> BigInt {
        self.ideal.norm()
    }

    pub fn norm_u64(&self) -> u64 {
        self.p.pow(self.residue_degree)
    }

    pub fn contains(&self, x: &[BigInt]) -> bool {
        self.ideal.contains(x)
    }

    /// `v_P(a)` for nonzero `a` in `O_K`.
    pub fn valuation(&self, k: &FieldDescription, a: &[BigInt]) -> u32 {
        assert!(a.iter().any(|c| !c.is_zero()), "valuation of zero");
        let pb = BigInt::from(self.p);
        let mut x = a.to_vec();
        let mut v = 0;
        loop {
            let y = k.mul(&x, &self.anti_uniformizer);
            if y.iter().all(|c| (c % &pb).is_zero()) {
                x = y.into_iter().map(|c| c / &pb).collect();
                v += 1;
            } else {
                return v;
            }
        }
    }
}

fn anti_uniformizer(k: &FieldDescription, p: u64, ideal: &Ideal) -> Result<Vec<BigInt>, FieldError> {
    let n = k.degree();
    let fp = Fp(p);
    // beta * pi_i = 0 mod p for every basis element pi_i
    let mut big_m: Vec<Vec<u64>> = vec![Vec::with_capacity(n * n); n];
    for pi in ideal.basis() {
        for (r, row) in k.mul_matrix(pi).iter().enumerate() {
            big_m[r].extend(row.iter().map(|x| fp.from_big(x)));
        }
    }
    let kernel = left_kernel(fp, &big_m);
    let beta = kernel.first().ok_or_else(|| FieldError::Internal(format!("no anti-uniformizer above {p}")))?;
    Ok(beta.iter().map(|&c| BigInt::from(c)).collect())
}
