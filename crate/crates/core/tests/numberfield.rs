mod common;

use common::forms;
use num_bigint::BigInt;
use num_traits::{One, Signed};
use princheb::arith::is_prime;
use princheb::numberfield::{
    build_multiquadratic, build_quadratic, class_group, frobenius_element, principal_order, principality,
    scan_primes, split_prime, verify_certificate, ClassGroupData, DensityEstimate, FieldDescription, Ideal,
    PrincipalCertificate, ScanOptions, ScanStatus,
};
use proptest::prelude::*;

fn squarefree(d: i64) -> bool {
    d != 0 && d != 1 && (2..=d.unsigned_abs().isqrt() as i64).all(|q| d % (q * q) != 0)
}

fn fundamental_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// `sum e f = n`, `prod P^e = p O_K`, and the Frobenius order is `f` when unramified.
fn check_factorization(k: &FieldDescription, p: u64) {
    let primes = split_prime(k, p).unwrap();
    let n = k.degree() as u32;
    assert_eq!(primes.iter().map(|q| q.ramification_index * q.residue_degree).sum::<u32>(), n, "p = {p}");
    let mut product = Ideal::whole(k);
    for q in &primes {
        assert_eq!(q.norm(), BigInt::from(p).pow(q.residue_degree));
        product = product.mul(k, &q.ideal().pow(k, q.ramification_index));
    }
    let pok = Ideal::principal(k, &k.from_integer(&BigInt::from(p)));
    assert_eq!(product.basis(), pok.basis(), "p = {p}");
    if !k.is_ramified(p) {
        let g = frobenius_element(k, p).unwrap();
        assert_eq!(k.galois().group().element_order(g), primes[0].residue_degree as u64, "p = {p}");
    }
}

fn small_primes(limit: u64) -> Vec<u64> {
    (2..limit).filter(|&p| is_prime(p)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quadratic_factorization(d in -400i64..400, pi in 0usize..60) {
        prop_assume!(squarefree(d));
        let k = build_quadratic(d).unwrap();
        check_factorization(&k, small_primes(300)[pi]);
    }

    #[test]
    fn biquadratic_factorization(d1 in -40i64..40, d2 in -40i64..40, pi in 0usize..40) {
        prop_assume!(squarefree(d1) && squarefree(d2) && d1 != d2);
        prop_assume!(squarefree(d1 * d2 / num_integer::gcd(d1, d2).pow(2)));
        let k = build_multiquadratic(&[d1, d2]).unwrap();
        check_factorization(&k, small_primes(200)[pi]);
    }
}

#[test]
fn triquadratic_factorization() {
    let k = build_multiquadratic(&[-1, 2, -3]).unwrap();
    for p in small_primes(60) {
        check_factorization(&k, p);
    }
}

/// Class of a prime above a split `p`, as a binary quadratic form of discriminant `disc`.
fn prime_form(p: i64, disc: i64) -> forms::Form {
    let b = (0..2 * p).find(|b| (b * b - disc).rem_euclid(4 * p) == 0).expect("p splits");
    forms::reduce((p, b, (b * b - disc) / (4 * p)))
}

#[test]
fn principal_orders_match_forms() {
    for d in [-5i64, -14, -23, -26, -47, -65, -71, -89, -105] {
        let k = build_quadratic(d).unwrap();
        let cg = class_group(&k).unwrap();
        let disc = fundamental_discriminant(d);
        assert_eq!(cg.class_number() as usize, forms::reduced_forms(disc).len(), "d = {d}");
        for p in small_primes(400) {
            if k.is_ramified(p) {
                continue;
            }
            let order = principal_order(&k, &cg, p).unwrap();
            let primes = split_prime(&k, p).unwrap();
            let expected = if primes.len() == 1 { 1 } else { forms::order(prime_form(p as i64, disc), disc) };
            assert_eq!(order, expected, "d = {d}, p = {p}");
        }
    }
}

fn check_certificates(k: &FieldDescription, cg: &ClassGroupData, limit: u64) {
    for p in small_primes(limit) {
        for prime in split_prime(k, p).unwrap() {
            let w = principality(k, cg, &prime).unwrap();
            let zero = w.class.iter().all(|&c| c == 0);
            assert_eq!(zero, w.certificate.is_some(), "p = {p}");
            if let Some(cert) = &w.certificate {
                assert!(verify_certificate(k, cg, &prime, cert));
                if let PrincipalCertificate::Generator { element } = cert {
                    assert_eq!(k.norm(element).abs(), prime.norm(), "p = {p}");
                    assert!(prime.contains(element));
                }
            }
        }
    }
}

#[test]
fn principality_certificates_verify() {
    for k in [
        build_quadratic(-5).unwrap(),
        build_quadratic(10).unwrap(),
        build_quadratic(-23).unwrap(),
        build_multiquadratic(&[-3, 13]).unwrap(),
        build_multiquadratic(&[-1, 5]).unwrap(),
    ] {
        let cg = class_group(&k).unwrap();
        check_certificates(&k, &cg, 120);
    }
}

#[test]
fn generator_above_29_in_minus_five() {
    let k = build_quadratic(-5).unwrap();
    let cg = class_group(&k).unwrap();
    for prime in split_prime(&k, 29).unwrap() {
        let w = principality(&k, &cg, &prime).unwrap();
        match w.certificate {
            Some(PrincipalCertificate::Generator { element }) => {
                // 3 +- 2 sqrt(-5) up to units
                assert_eq!(k.norm(&element), BigInt::from(29));
                let abs: Vec<BigInt> = element.iter().map(|c| c.abs()).collect();
                assert_eq!(abs, [BigInt::from(3), BigInt::from(2)]);
            }
            other => panic!("expected a generator, got {other:?}"),
        }
    }
    let three = &split_prime(&k, 3).unwrap()[0];
    assert!(principality(&k, &cg, three).unwrap().certificate.is_none());
}

#[test]
fn densities_at_the_exponent_sum_to_the_unramified_share() {
    for k in [build_quadratic(-5).unwrap(), build_quadratic(-23).unwrap(), build_multiquadratic(&[-3, 13]).unwrap()] {
        let cg = class_group(&k).unwrap();
        let records = scan_primes(&k, &cg, 20_000, &ScanOptions::default()).unwrap();
        let exponent = cg.structure.exponent().max(1);
        let total: u64 = k
            .galois()
            .group()
            .conjugacy_classes()
            .iter()
            .map(|c| DensityEstimate::tally(&records, c, exponent, 20_000).numerator)
            .sum();
        let unramified = records.iter().filter(|r| r.status == ScanStatus::Scanned).count() as u64;
        assert_eq!(total, unramified);
        assert!(total as f64 / records.len() as f64 > 0.99);
    }
}

#[test]
fn class_group_of_trivial_field_is_certified() {
    let k = build_multiquadratic(&[-1, 2]).unwrap();
    let cg = class_group(&k).unwrap();
    assert!(cg.structure.order().is_one());
    assert!(cg.certification.is_certified());
}
