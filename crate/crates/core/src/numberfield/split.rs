//! Factorization of rational primes and Frobenius elements.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::build::fundamental_discriminant;
use super::ideal::{Ideal, PrimeIdeal};
use super::linalg::{fp_vec_mat, left_kernel, span_basis};
use super::poly::Fp;
use super::{FieldDescription, FieldError, FieldKind};
use crate::arith::{is_prime, kronecker};
use crate::extension::ConjugacyClass;

/// The prime ideals above `p`, each with its ramification index and residue degree.
pub fn split_prime(k: &FieldDescription, p: u64) -> Result<Vec<PrimeIdeal>, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    let divides_index = (k.index() % BigInt::from(p)).is_zero();
    let mut primes = if !divides_index {
        dedekind(k, p)?
    } else {
        match k.kind() {
            FieldKind::Quadratic { .. } | FieldKind::Multiquadratic { .. } => decompose_algebra(k, p)?,
            FieldKind::Generic => return Err(FieldError::Excluded(p)),
        }
    };
    primes.sort_by(|a, b| (a.residue_degree, a.z_basis()).cmp(&(b.residue_degree, b.z_basis())));
    verify_factorization(k, p, &primes)?;
    if let Some(ds) = quadratic_generators(k) {
        let (e, f, g) = multiquadratic_type(&ds, p);
        if primes.len() != g || primes.iter().any(|q| q.ramification_index != e || q.residue_degree != f) {
            return Err(FieldError::Internal(format!("splitting of {p} disagrees with the Kronecker symbols")));
        }
    }
    Ok(primes)
}

fn quadratic_generators(k: &FieldDescription) -> Option<Vec<i64>> {
    match k.kind() {
        FieldKind::Quadratic { d } => Some(vec![*d]),
        FieldKind::Multiquadratic { ds } => Some(ds.clone()),
        FieldKind::Generic => None,
    }
}

/// `(e, f, g)` for `p` in `Q(sqrt(d_1), ..., sqrt(d_k))` from quadratic characters.
pub(crate) fn multiquadratic_type(ds: &[i64], p: u64) -> (u32, u32, usize) {
    let n = 1usize << ds.len();
    let mut unramified = 0usize;
    let mut inert_somewhere = false;
    for s in 0..n {
        let d: i64 = (0..ds.len()).filter(|i| s >> i & 1 == 1).map(|i| ds[i]).product();
        let disc = if s == 0 { 1 } else { fundamental_discriminant(squarefree_part(d)) };
        match kronecker(disc, p) {
            0 => {}
            1 => unramified += 1,
            _ => {
                unramified += 1;
                inert_somewhere = true;
            }
        }
    }
    let e = (n / unramified) as u32;
    let f = if inert_somewhere { 2 } else { 1 };
    (e, f, n / (e * f) as usize)
}

fn squarefree_part(x: i64) -> i64 {
    let mut out = x.signum();
    for (q, e) in crate::arith::factorize(x.unsigned_abs()) {
        if e % 2 == 1 {
            out *= q as i64;
        }
    }
    out
}

fn dedekind(k: &FieldDescription, p: u64) -> Result<Vec<PrimeIdeal>, FieldError> {
    let fp = Fp(p);
    let mut rng = ChaCha8Rng::seed_from_u64(p);
    let pb = BigInt::from(p);
    let mut out = Vec::new();
    for (g, e) in fp.factor(&fp.reduce(k.min_poly()), &mut rng) {
        let gz: Vec<BigInt> = g.iter().map(|&c| BigInt::from(c)).collect();
        let generator = k.eval_theta_poly(&gz);
        let ideal = Ideal::from_generators(k, &[generator], &pb);
        let prime = PrimeIdeal::from_ideal(k, p, ideal)?;
        if prime.residue_degree as usize != g.len() - 1 || prime.ramification_index != e {
            return Err(FieldError::Internal(format!("Dedekind data at {p} inconsistent with the computed prime")));
        }
        out.push(prime);
    }
    Ok(out)
}

fn pow_mod_p(k: &FieldDescription, x: &[BigInt], mut e: u64, p: u64) -> Vec<BigInt> {
    let pb = BigInt::from(p);
    let reduce = |v: Vec<BigInt>| -> Vec<BigInt> { v.into_iter().map(|c| ((c % &pb) + &pb) % &pb).collect() };
    let mut base = reduce(x.to_vec());
    let mut acc = reduce(k.one());
    while e > 0 {
        if e & 1 == 1 {
            acc = reduce(k.mul(&acc, &base));
        }
        base = reduce(k.mul(&base, &base));
        e >>= 1;
    }
    acc
}

/// Primes above `p` from the structure of `O_K / p O_K`: the radical is the
/// kernel of a Frobenius power, and idempotents of the reduced quotient cut
/// out one maximal ideal each.
fn decompose_algebra(k: &FieldDescription, p: u64) -> Result<Vec<PrimeIdeal>, FieldError> {
    let n = k.degree();
    let fp = Fp(p);
    let unit = |j: usize| -> Vec<BigInt> {
        let mut e = vec![BigInt::zero(); n];
        e[j] = BigInt::from(1);
        e
    };
    let to_fp = |v: &[BigInt]| -> Vec<u64> { v.iter().map(|c| fp.from_big(c)).collect() };
    let frob: Vec<Vec<u64>> = (0..n).map(|j| to_fp(&pow_mod_p(k, &unit(j), p, p))).collect();
    // x -> x^(p^t) with p^t >= n kills exactly the radical
    let mut t = 1;
    let mut pt = p;
    while (pt as usize) < n {
        pt = pt.saturating_mul(p);
        t += 1;
    }
    let mut frob_t = frob.clone();
    for _ in 1..t {
        frob_t = frob_t.iter().map(|row| fp_vec_mat(fp, row, &frob)).collect();
    }
    let radical = span_basis(fp, &left_kernel(fp, &frob_t));
    // v is in the radical iff v Q = 0
    let q_cols: Vec<Vec<u64>> = if radical.is_empty() {
        (0..n).map(|i| (0..n).map(|j| u64::from(i == j)).collect()).collect()
    } else {
        let transpose: Vec<Vec<u64>> = (0..n).map(|j| radical.iter().map(|r| r[j]).collect()).collect();
        left_kernel(fp, &transpose)
    };
    // as a matrix n x c: column c is q_cols[c]
    let q_mat: Vec<Vec<u64>> = (0..n).map(|i| q_cols.iter().map(|col| col[i]).collect()).collect();
    let project = |v: &[u64]| fp_vec_mat(fp, v, &q_mat);

    let f_minus_i: Vec<Vec<u64>> =
        (0..n).map(|i| (0..n).map(|j| fp.sub(frob[i][j], u64::from(i == j))).collect()).collect();
    let m1: Vec<Vec<u64>> = f_minus_i.iter().map(|r| project(r)).collect();
    let fixed = left_kernel(fp, &m1);
    let g = fixed.len() - radical.len();

    let maximal_ideals: Vec<Vec<Vec<u64>>> = if g == 1 {
        vec![radical.clone()]
    } else {
        let idem = primitive_idempotents(k, fp, &fixed, g, &project)
            .ok_or_else(|| FieldError::Internal(format!("idempotents above {p} do not separate the factors")))?;
        idem.iter()
            .map(|e| {
                let eb: Vec<BigInt> = e.iter().map(|&c| BigInt::from(c)).collect();
                let m: Vec<Vec<u64>> = k.mul_matrix(&eb).iter().map(|r| project(&to_fp(r))).collect();
                left_kernel(fp, &m)
            })
            .collect()
    };
    let pb = BigInt::from(p);
    maximal_ideals
        .into_iter()
        .map(|w| {
            let gens: Vec<Vec<BigInt>> = w.iter().map(|v| v.iter().map(|&c| BigInt::from(c)).collect()).collect();
            PrimeIdeal::from_ideal(k, p, Ideal::from_generators(k, &gens, &pb))
        })
        .collect()
}

/// Lifts of the `g` primitive idempotents of `O_K/p` modulo its radical.
///
/// Elements of the Frobenius-fixed part have all components in `F_p`, so the
/// roots of their minimal polynomials split any idempotent they separate.
fn primitive_idempotents(
    k: &FieldDescription,
    fp: Fp,
    fixed: &[Vec<u64>],
    g: usize,
    project: &dyn Fn(&[u64]) -> Vec<u64>,
) -> Option<Vec<Vec<u64>>> {
    let n = k.degree();
    let mul = |x: &[u64], y: &[u64]| -> Vec<u64> {
        let xb: Vec<BigInt> = x.iter().map(|&c| BigInt::from(c)).collect();
        let yb: Vec<BigInt> = y.iter().map(|&c| BigInt::from(c)).collect();
        k.mul(&xb, &yb).iter().map(|c| fp.from_big(c)).collect()
    };
    let lin = |x: &[u64], a: u64, y: &[u64], b: u64| -> Vec<u64> {
        (0..n).map(|t| fp.add(fp.mul(a, x[t]), fp.mul(b, y[t]))).collect()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(fp.p());
    let mut idem: Vec<Vec<u64>> = vec![k.one().iter().map(|c| fp.from_big(c)).collect()];
    for b in fixed {
        if idem.len() == g {
            break;
        }
        let mut next = Vec::new();
        for e in idem {
            let be = mul(b, &e);
            let mut powers = vec![e.clone()];
            let minpoly = loop {
                let projected: Vec<Vec<u64>> = powers.iter().map(|v| project(v)).collect();
                if let Some(rel) = left_kernel(fp, &projected).first() {
                    let lead = *rel.last().unwrap();
                    break rel.iter().map(|&c| fp.mul(c, fp.inv(lead))).collect::<Vec<u64>>();
                }
                if powers.len() > g + 1 {
                    return None;
                }
                let last = powers.last().unwrap().clone();
                powers.push(mul(&be, &last));
            };
            if minpoly.len() <= 2 {
                next.push(e);
                continue;
            }
            let factors = fp.factor(&minpoly, &mut rng);
            if factors.iter().any(|(f, m)| f.len() != 2 || *m != 1) {
                return None;
            }
            let roots: Vec<u64> = factors.iter().map(|(f, _)| fp.sub(0, f[0])).collect();
            for (i, &ri) in roots.iter().enumerate() {
                let mut part = e.clone();
                for (j, &rj) in roots.iter().enumerate() {
                    if i != j {
                        let scale = fp.inv(fp.sub(ri, rj));
                        let factor = lin(&be, scale, &e, fp.sub(0, fp.mul(scale, rj)));
                        part = mul(&part, &factor);
                    }
                }
                next.push(part);
            }
        }
        idem = next;
    }
    (idem.len() == g).then_some(idem)
}

fn verify_factorization(k: &FieldDescription, p: u64, primes: &[PrimeIdeal]) -> Result<(), FieldError> {
    let n = k.degree() as u32;
    let total: u32 = primes.iter().map(|q| q.ramification_index * q.residue_degree).sum();
    if total != n {
        return Err(FieldError::Internal(format!("sum of e f above {p} is {total}, expected {n}")));
    }
    let mut product = Ideal::whole(k);
    for q in primes {
        product = product.mul(k, &q.ideal().pow(k, q.ramification_index));
    }
    let expected = Ideal::from_generators(k, &[k.from_integer(&BigInt::from(p))], &BigInt::from(p));
    if product != expected {
        return Err(FieldError::Internal(format!("product of the primes above {p} is not p O_K")));
    }
    Ok(())
}

/// The Frobenius element of an unramified `p` as an index into the Galois group.
pub fn frobenius_element(k: &FieldDescription, p: u64) -> Result<usize, FieldError> {
    if !is_prime(p) {
        return Err(FieldError::NotPrime(p));
    }
    if k.is_ramified(p) {
        return Err(FieldError::Ramified(p));
    }
    k.galois()
        .resolve(p)
        .ok_or_else(|| FieldError::Galois(format!("resolver undefined at {p} mod {}", k.galois().conductor())))
}

/// Frobenius class at `p`, checked against the residue degree of the primes above `p`.
pub fn frobenius(k: &FieldDescription, p: u64) -> Result<ConjugacyClass, FieldError> {
    let g = frobenius_element(k, p)?;
    match split_prime(k, p) {
        Ok(primes) => check_frobenius_order(k, p, g, &primes)?,
        Err(FieldError::Excluded(_)) => {}
        Err(e) => return Err(e),
    }
    Ok(k.class_of_element(g))
}

pub(crate) fn check_frobenius_order(k: &FieldDescription, p: u64, g: usize, primes: &[PrimeIdeal]) -> Result<(), FieldError> {
    let order = k.galois().group().element_order(g);
    if primes.iter().any(|q| q.residue_degree as u64 != order) {
        return Err(FieldError::Internal(format!("Frobenius at {p} has order {order}, residue degree differs")));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::super::{build_multiquadratic, build_quadratic};
    use super::*;

    #[test]
    fn quadratic_splitting() {
        let k = build_quadratic(-5).unwrap();
        let seven = split_prime(&k, 7).unwrap();
        assert_eq!(seven.len(), 2);
        assert!(seven.iter().all(|q| q.residue_degree == 1 && q.ramification_index == 1));
        let two = split_prime(&k, 2).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].ramification_index, 2);
        let eleven = split_prime(&k, 11).unwrap();
        assert_eq!((eleven.len(), eleven[0].residue_degree), (1, 2));
        assert!(matches!(split_prime(&k, 9), Err(FieldError::NotPrime(9))));
    }

    #[test]
    fn biquadratic_splitting_everywhere() {
        let k = build_multiquadratic(&[-3, 13]).unwrap();
        let five = split_prime(&k, 5).unwrap();
        assert_eq!(five.len(), 2);
        assert!(five.iter().all(|q| q.residue_degree == 2));
        assert_eq!(frobenius_element(&k, 5).unwrap(), 3);
        assert_eq!(frobenius_element(&k, 61).unwrap(), 0);
        assert_eq!(split_prime(&k, 61).unwrap().len(), 4);
        for p in crate::arith::primes_up_to(200) {
            let primes = split_prime(&k, p).unwrap();
            if !k.is_ramified(p) {
                check_frobenius_order(&k, p, frobenius_element(&k, p).unwrap(), &primes).unwrap();
            }
        }
        assert!(matches!(frobenius(&k, 13), Err(FieldError::Ramified(13))));
    }

    #[test]
    fn primes_dividing_the_index() {
        // Z[sqrt 2 + sqrt 3] has even index in O_K
        let k = build_multiquadratic(&[2, 3]).unwrap();
        assert!((k.index() % BigInt::from(2)).is_zero());
        let two = split_prime(&k, 2).unwrap();
        assert_eq!(two.len(), 1);
        assert_eq!(two[0].ramification_index, 4);
        let k = build_multiquadratic(&[-3, 5]).unwrap();
        for p in [2u64, 3, 5, 7, 11] {
            split_prime(&k, p).unwrap();
        }
        let k = build_multiquadratic(&[-1, 2, 5]).unwrap();
        for p in [2u64, 3, 5, 41] {
            split_prime(&k, p).unwrap();
        }
        // 2 splits completely while dividing the index: more primes than residues
        let k = build_multiquadratic(&[-7, 17]).unwrap();
        assert_eq!(split_prime(&k, 2).unwrap().len(), 4);
        let k = build_multiquadratic(&[-7, 17, -15]).unwrap();
        let two = split_prime(&k, 2).unwrap();
        assert_eq!(two.len(), 8);
        assert!(two.iter().all(|q| q.residue_degree == 1 && q.ramification_index == 1));
    }
}
