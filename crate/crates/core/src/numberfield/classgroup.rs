//! Class groups from a Minkowski factor base, and classes of prime ideals.
//!
//! Relations come from elements of small coefficients in an LLL-reduced
//! basis of `O_K` and from short elements of each factor-base prime. Every
//! relation is checked by exact valuations before it enters the lattice.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::bounds::{lenstra_class_bound, minkowski_bound};
use super::ideal::PrimeIdeal;
use super::lattice::{gram_of, integral_t2, lll, short_vectors, Gram};
use super::split::split_prime;
use super::{FieldDescription, FieldError};
use crate::abelian::{hermite_rows, smith_normal_form, AbelianElement, AbelianGroup, IntMatrix};
use crate::arith::primes_up_to;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Certification {
    CertifiedByKnownH,
    CertifiedByBound,
    Tentative,
}

impl Certification {
    pub fn is_certified(self) -> bool {
        self != Certification::Tentative
    }
}

/// `(element) = prod_j P_j^{exponents[j]}` over the factor base.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Relation {
    pub element: Vec<BigInt>,
    pub exponents: Vec<i64>,
}

#[derive(Clone, Debug)]
pub struct ClassGroupOptions {
    /// Starting bound on `max |a_i|` for relation elements.
    pub initial_box: i64,
    /// How many times the box doubles before giving up.
    pub doublings: u32,
    /// Elements tried in the first box; doubles with the box.
    pub element_budget: usize,
    /// Short elements tried per factor-base prime.
    pub prime_relations: usize,
}

impl Default for ClassGroupOptions {
    fn default() -> Self {
        ClassGroupOptions { initial_box: 10, doublings: 4, element_budget: 40_000, prime_relations: 40 }
    }
}

#[derive(Clone, Debug)]
pub struct ClassGroupData {
    pub factor_base: Vec<PrimeIdeal>,
    pub relations: Vec<Relation>,
    /// Hermite basis of the relation lattice.
    pub relation_lattice: Vec<Vec<BigInt>>,
    pub structure: AbelianGroup,
    /// Class of each factor-base prime.
    pub class_map: Vec<AbelianElement>,
    pub certification: Certification,
    pub minkowski_bound: f64,
    pub lenstra_bound: u64,
    /// Box at which the relation search stopped.
    pub search_box: i64,
    /// Columns of the Smith transform `V` that carry the structure.
    projection: Vec<Vec<BigInt>>,
}

impl ClassGroupData {
    pub fn class_number(&self) -> u64 {
        self.structure.order()
    }

    /// Class of `prod_j P_j^{x_j}`.
    pub fn class_of_exponents(&self, x: &[i64]) -> AbelianElement {
        let coords: Vec<BigInt> = self
            .projection
            .iter()
            .map(|col| x.iter().zip(col).map(|(&a, c)| BigInt::from(a) * c).sum())
            .collect();
        self.structure.reduce_big(&coords)
    }

    /// Whether `x` is an integer combination of verified relations.
    pub fn in_relation_lattice(&self, x: &[i64]) -> bool {
        let mut v: Vec<BigInt> = x.iter().map(|&a| BigInt::from(a)).collect();
        for row in &self.relation_lattice {
            let Some(col) = row.iter().position(|c| !c.is_zero()) else { continue };
            let (q, r) = v[col].div_mod_floor(&row[col]);
            if !r.is_zero() {
                return false;
            }
            for (vj, rj) in v.iter_mut().zip(row) {
                *vj -= &q * rj;
            }
        }
        v.iter().all(|c| c.is_zero())
    }

    pub fn factor_base_index(&self, prime: &PrimeIdeal) -> Option<usize> {
        self.factor_base.iter().position(|q| q.p == prime.p && q.ideal() == prime.ideal())
    }
}

fn factor_base(k: &FieldDescription, bound: f64) -> Result<Vec<PrimeIdeal>, FieldError> {
    let mut fb = Vec::new();
    let cutoff = (bound * (1.0 + 1e-9)).floor() as u64;
    for p in primes_up_to(cutoff) {
        let primes = split_prime(k, p).map_err(|e| match e {
            FieldError::Excluded(p) => FieldError::Undetermined(format!("factor-base prime {p} divides the index")),
            other => other,
        })?;
        fb.extend(primes.into_iter().filter(|q| q.norm_u64() <= cutoff));
    }
    Ok(fb)
}

/// Exact factorization of `(alpha)` over the factor base, given that
/// `|N(alpha)| = target * N(extra)` where `extra` divides `(alpha)` once.
fn factor_over_base(k: &FieldDescription, fb: &[PrimeIdeal], alpha: &[BigInt], target: &BigInt) -> Option<Vec<i64>> {
    let mut rest = target.clone();
    let mut exps = vec![0i64; fb.len()];
    let mut ps: Vec<u64> = fb.iter().map(|q| q.p).collect();
    ps.dedup();
    for p in ps {
        let pb = BigInt::from(p);
        let mut e = 0u32;
        while (&rest % &pb).is_zero() {
            rest /= &pb;
            e += 1;
        }
        if e == 0 {
            continue;
        }
        let mut covered = 0u32;
        for (j, q) in fb.iter().enumerate().filter(|(_, q)| q.p == p) {
            let v = q.valuation(k, alpha);
            exps[j] = v as i64;
            covered += v * q.residue_degree;
        }
        if covered != e {
            return None;
        }
    }
    rest.is_one().then_some(exps)
}

/// `max |a_i| = r` vectors with positive leading nonzero coordinate.
fn shell(n: usize, r: i64, mut visit: impl FnMut(&[i64]) -> bool) {
    if r == 0 {
        return;
    }
    let mut x = vec![-r; n];
    loop {
        let leading_positive = x.iter().find(|&&v| v != 0).is_some_and(|&v| v > 0);
        if leading_positive && x.iter().any(|v| v.abs() == r) && !visit(&x) {
            return;
        }
        let mut i = n;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            if x[i] < r {
                x[i] += 1;
                break;
            }
            x[i] = -r;
        }
    }
}

struct Search<'a> {
    k: &'a FieldDescription,
    fb: &'a [PrimeIdeal],
    relations: Vec<Relation>,
    seen: BTreeSet<Vec<i64>>,
    lattice: Vec<Vec<BigInt>>,
    pending: Vec<Vec<BigInt>>,
}

impl Search<'_> {
    fn offer(&mut self, alpha: Vec<BigInt>) {
        let norm = self.k.norm(&alpha).abs();
        if norm.is_zero() {
            return;
        }
        if let Some(exps) = factor_over_base(self.k, self.fb, &alpha, &norm) {
            if exps.iter().all(|&e| e == 0) || !self.seen.insert(exps.clone()) {
                return;
            }
            self.pending.push(exps.iter().map(|&e| BigInt::from(e)).collect());
            self.relations.push(Relation { element: alpha, exponents: exps });
            if self.pending.len() >= 64 {
                self.flush();
            }
        }
    }

    fn flush(&mut self) {
        if self.pending.is_empty() {
            return;
        }
        let mut rows = std::mem::take(&mut self.lattice);
        rows.append(&mut self.pending);
        self.lattice = hermite_rows(self.fb.len(), &rows);
    }

    fn full_rank(&mut self) -> bool {
        self.flush();
        self.lattice.len() == self.fb.len()
    }
}

/// LLL-reduced basis of `O_K` under T2, as rows in integral-basis coordinates.
pub(crate) fn reduced_basis(k: &FieldDescription) -> Vec<Vec<BigInt>> {
    let form = integral_t2(k.t2());
    let (_, h) = lll(&form);
    h
}

fn prime_lattice(k: &FieldDescription, form: &Gram, basis: &[Vec<BigInt>]) -> (Gram, Vec<Vec<BigInt>>) {
    let gram = gram_of(basis, form);
    let (reduced, h) = lll(&gram);
    let rows = h
        .iter()
        .map(|r| (0..k.degree()).map(|j| r.iter().zip(basis).map(|(c, b)| c * &b[j]).sum()).collect())
        .collect();
    (reduced, rows)
}

fn combine(coeffs: &[BigInt], rows: &[Vec<BigInt>]) -> Vec<BigInt> {
    let n = rows[0].len();
    (0..n).map(|j| coeffs.iter().zip(rows).map(|(c, r)| c * &r[j]).sum()).collect()
}

pub fn class_group(k: &FieldDescription) -> Result<ClassGroupData, FieldError> {
    class_group_with(k, &ClassGroupOptions::default())
}

pub fn class_group_with(k: &FieldDescription, opts: &ClassGroupOptions) -> Result<ClassGroupData, FieldError> {
    let mink = minkowski_bound(k);
    let lenstra = lenstra_class_bound(k);
    let fb = factor_base(k, mink)?;
    let n = k.degree();
    let form = integral_t2(k.t2());
    let mut search = Search { k, fb: &fb, relations: Vec::new(), seen: BTreeSet::new(), lattice: Vec::new(), pending: Vec::new() };

    if !fb.is_empty() {
        // rational primes whose primes all lie in the factor base
        let mut ps: Vec<u64> = fb.iter().map(|q| q.p).collect();
        ps.dedup();
        for p in ps {
            search.offer(k.from_integer(&BigInt::from(p)));
        }
        // short elements of each factor-base prime
        for q in &fb {
            let (gram, rows) = prime_lattice(k, &form, q.z_basis());
            let bound = &gram[0][0] * BigInt::from(4 * n as i64);
            let candidates = short_vectors(&gram, &bound, opts.prime_relations).unwrap_or_default();
            for (_, x) in candidates {
                search.offer(combine(&x, &rows));
            }
        }
    }

    let basis = reduced_basis(k);
    let mut history: Vec<(bool, Vec<BigInt>)> = Vec::new();
    let mut search_box = opts.initial_box;
    let mut stable = false;
    let mut r_done = 0i64;
    for stage in 0..=opts.doublings {
        search_box = opts.initial_box << stage;
        let budget = opts.element_budget << stage;
        let mut tried = 0usize;
        if !fb.is_empty() {
            'shells: for r in r_done + 1..=search_box {
                let mut exhausted = false;
                shell(n, r, |x| {
                    let coeffs: Vec<BigInt> = x.iter().map(|&v| BigInt::from(v)).collect();
                    search.offer(combine(&coeffs, &basis));
                    tried += 1;
                    if tried >= budget {
                        exhausted = true;
                        return false;
                    }
                    true
                });
                if exhausted {
                    break 'shells;
                }
                r_done = r;
            }
        }
        let full = search.full_rank();
        let invariants = if full { structure_of(&search.lattice).0 } else { Vec::new() };
        if let Some((prev_full, prev)) = history.last() {
            if full && *prev_full && *prev == invariants {
                stable = true;
                break;
            }
        }
        history.push((full, invariants));
    }
    if !search.full_rank() {
        return Err(FieldError::Undetermined(format!(
            "relation lattice has rank {} < {} after box {search_box} ({} relations)",
            search.lattice.len(),
            fb.len(),
            search.relations.len()
        )));
    }
    let Search { relations, lattice, .. } = search;
    let h = lattice_order(&lattice)?;
    let certification = match k.known_class_number() {
        Some(known) if known == h => Certification::CertifiedByKnownH,
        Some(known) => return Err(FieldError::ClassNumberMismatch { computed: h, known }),
        None if fb.is_empty() || (stable && h <= lenstra) => Certification::CertifiedByBound,
        None => Certification::Tentative,
    };
    assemble(fb, relations, lattice, certification, mink, lenstra, search_box)
}

fn lattice_order(lattice: &[Vec<BigInt>]) -> Result<u64, FieldError> {
    let det: BigInt = lattice.iter().enumerate().map(|(i, r)| r[i].clone()).product();
    det.to_u64().ok_or_else(|| FieldError::Undetermined("class number overflows u64".into()))
}

fn assemble(
    fb: Vec<PrimeIdeal>,
    relations: Vec<Relation>,
    lattice: Vec<Vec<BigInt>>,
    certification: Certification,
    minkowski_bound: f64,
    lenstra_bound: u64,
    search_box: i64,
) -> Result<ClassGroupData, FieldError> {
    let (invariants, projection) = structure_of(&lattice);
    let factors: Vec<u64> = invariants.iter().map(|d| d.to_u64().expect("divides the class number")).collect();
    let structure = AbelianGroup::new(factors).map_err(|e| FieldError::Internal(e.to_string()))?;
    let mut data = ClassGroupData {
        factor_base: fb,
        relations,
        relation_lattice: lattice,
        structure,
        class_map: Vec::new(),
        certification,
        minkowski_bound,
        lenstra_bound,
        search_box,
        projection,
    };
    let k = data.factor_base.len();
    data.class_map = (0..k)
        .map(|j| {
            let mut e = vec![0i64; k];
            e[j] = 1;
            data.class_of_exponents(&e)
        })
        .collect();
    Ok(data)
}

/// Relations and outcome of a class group computation, for reuse across runs.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CachedClassGroup {
    pub field: String,
    pub invariants: Vec<u64>,
    pub certification: Certification,
    pub search_box: i64,
    pub relations: Vec<Relation>,
}

impl ClassGroupData {
    pub fn to_cached(&self, k: &FieldDescription) -> CachedClassGroup {
        CachedClassGroup {
            field: k.name(),
            invariants: self.structure.invariant_factors().to_vec(),
            certification: self.certification,
            search_box: self.search_box,
            relations: self.relations.clone(),
        }
    }

    /// Rebuilds class group data, re-verifying every stored relation.
    pub fn from_cached(k: &FieldDescription, cached: &CachedClassGroup) -> Result<ClassGroupData, FieldError> {
        let bad = |why: String| FieldError::Input(format!("cached class group rejected: {why}"));
        if cached.field != k.name() {
            return Err(bad(format!("it belongs to {}", cached.field)));
        }
        let mink = minkowski_bound(k);
        let fb = factor_base(k, mink)?;
        let mut rows = Vec::with_capacity(cached.relations.len());
        for rel in &cached.relations {
            let norm = k.norm(&rel.element).abs();
            let ok = rel.element.len() == k.degree()
                && !norm.is_zero()
                && factor_over_base(k, &fb, &rel.element, &norm).as_ref() == Some(&rel.exponents);
            if !ok {
                return Err(bad(format!("relation {:?} does not verify", rel.exponents)));
            }
            rows.push(rel.exponents.iter().map(|&e| BigInt::from(e)).collect());
        }
        let lattice = hermite_rows(fb.len(), &rows);
        if lattice.len() != fb.len() {
            return Err(bad("relations do not have full rank".into()));
        }
        let h = lattice_order(&lattice)?;
        if let Some(known) = k.known_class_number() {
            if known != h {
                return Err(FieldError::ClassNumberMismatch { computed: h, known });
            }
        }
        let data = assemble(fb, cached.relations.clone(), lattice, cached.certification, mink, lenstra_class_bound(k), cached.search_box)?;
        if data.structure.invariant_factors() != cached.invariants.as_slice() {
            return Err(bad("structure differs from the stored one".into()));
        }
        Ok(data)
    }
}

/// Nontrivial invariant factors of `Z^k / L` and the matching columns of `V`.
fn structure_of(lattice: &[Vec<BigInt>]) -> (Vec<BigInt>, Vec<Vec<BigInt>>) {
    let k = lattice.len();
    if k == 0 {
        return (Vec::new(), Vec::new());
    }
    let snf = smith_normal_form(&IntMatrix::from_rows(k, lattice));
    let diag = snf.diagonal();
    let mut invariants = Vec::new();
    let mut projection = Vec::new();
    for (i, d) in diag.iter().enumerate() {
        if d > &BigInt::one() {
            invariants.push(d.clone());
            projection.push((0..k).map(|r| snf.v.get(r, i).clone()).collect());
        }
    }
    (invariants, projection)
}

/// How a prime ideal was placed in the class group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PrincipalCertificate {
    /// An element of the ideal whose norm equals the ideal's norm.
    Generator { element: Vec<BigInt> },
    /// `(element) = P * prod_j P_j^{exponents[j]}` with the exponent vector in
    /// the lattice of verified relations.
    FactorBaseWord { element: Vec<BigInt>, exponents: Vec<i64> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PrincipalityWitness {
    pub class: Vec<u64>,
    pub certificate: Option<PrincipalCertificate>,
}

/// Largest number of short elements examined for one ideal.
const CANDIDATE_BUDGET: usize = 4000;

fn class_with_witness(
    k: &FieldDescription,
    cg: &ClassGroupData,
    prime: &PrimeIdeal,
) -> Result<(AbelianElement, Option<PrincipalCertificate>), FieldError> {
    if let Some(j) = cg.factor_base_index(prime) {
        let class = cg.class_map[j].clone();
        let cert = (class == cg.structure.zero()).then(|| {
            let mut e = vec![0i64; cg.factor_base.len()];
            e[j] = -1;
            PrincipalCertificate::FactorBaseWord { element: k.one(), exponents: e }
        });
        return Ok((class, cert));
    }
    let n = k.degree();
    if prime.residue_degree as usize == n {
        return Ok((cg.structure.zero(), Some(PrincipalCertificate::Generator { element: k.from_integer(&BigInt::from(prime.p)) })));
    }
    let form = integral_t2(k.t2());
    let (gram, rows) = prime_lattice(k, &form, prime.z_basis());
    let pnorm = prime.norm();
    let pb = BigInt::from(prime.p);
    let mut bound = &gram[0][0] * BigInt::from(2);
    let mut examined = 0usize;
    let mut below = BigInt::from(-1);
    let mut word: Option<(AbelianElement, PrincipalCertificate)> = None;
    let mut after_word = 0usize;
    while examined < CANDIDATE_BUDGET {
        let Some(candidates) = short_vectors(&gram, &bound, CANDIDATE_BUDGET) else { break };
        for (value, x) in candidates {
            if value <= below {
                continue;
            }
            examined += 1;
            let alpha = combine(&x, &rows);
            let norm = k.norm(&alpha).abs();
            let q = &norm / &pnorm;
            if q.is_one() {
                return Ok((cg.structure.zero(), Some(PrincipalCertificate::Generator { element: alpha })));
            }
            if word.is_none() && q.gcd(&pb).is_one() {
                if let Some(exps) = factor_over_base(k, &cg.factor_base, &alpha, &q) {
                    // [P] = -sum e_j [P_j]
                    let neg: Vec<i64> = exps.iter().map(|&e| -e).collect();
                    let class = cg.class_of_exponents(&neg);
                    if class != cg.structure.zero() {
                        return Ok((class, None));
                    }
                    if !cg.in_relation_lattice(&exps) {
                        return Err(FieldError::Internal("zero class outside the relation lattice".into()));
                    }
                    word = Some((class, PrincipalCertificate::FactorBaseWord { element: alpha, exponents: exps }));
                }
            }
            if word.is_some() {
                after_word += 1;
                if after_word > 64 {
                    let (class, cert) = word.unwrap();
                    return Ok((class, Some(cert)));
                }
            }
        }
        below = bound.clone();
        bound *= 4;
    }
    if let Some((class, cert)) = word {
        return Ok((class, Some(cert)));
    }
    Err(FieldError::Undecided { p: prime.p, reason: format!("no smooth element among {examined} short elements") })
}

pub fn ideal_class(k: &FieldDescription, cg: &ClassGroupData, prime: &PrimeIdeal) -> Result<AbelianElement, FieldError> {
    class_with_witness(k, cg, prime).map(|(c, _)| c)
}

/// Principality of a prime ideal together with its certificate.
pub fn principality(k: &FieldDescription, cg: &ClassGroupData, prime: &PrimeIdeal) -> Result<PrincipalityWitness, FieldError> {
    let (class, certificate) = class_with_witness(k, cg, prime)?;
    if (class == cg.structure.zero()) != certificate.is_some() {
        return Err(FieldError::Internal(format!("principal class above {} without a certificate", prime.p)));
    }
    if let Some(cert) = &certificate {
        if !verify_certificate(k, cg, prime, cert) {
            return Err(FieldError::Internal(format!("certificate above {} fails verification", prime.p)));
        }
    }
    Ok(PrincipalityWitness { class: class.coords().to_vec(), certificate })
}

pub fn is_principal(k: &FieldDescription, cg: &ClassGroupData, prime: &PrimeIdeal) -> Result<bool, FieldError> {
    Ok(principality(k, cg, prime)?.certificate.is_some())
}

/// Rechecks a certificate from scratch.
pub fn verify_certificate(k: &FieldDescription, cg: &ClassGroupData, prime: &PrimeIdeal, cert: &PrincipalCertificate) -> bool {
    match cert {
        PrincipalCertificate::Generator { element } => prime.contains(element) && k.norm(element).abs() == prime.norm(),
        PrincipalCertificate::FactorBaseWord { element, exponents } => {
            if !cg.in_relation_lattice(exponents) {
                return false;
            }
            if let Some(j) = cg.factor_base_index(prime) {
                // the prime itself is the word
                let mut e = vec![0i64; cg.factor_base.len()];
                e[j] = -1;
                return *exponents == e && element == &k.one();
            }
            if !prime.contains(element) {
                return false;
            }
            let mut expected = prime.norm();
            for (q, &e) in cg.factor_base.iter().zip(exponents) {
                if e < 0 || q.valuation(k, element) as i64 != e {
                    return false;
                }
                expected *= q.norm().pow(e as u32);
            }
            k.norm(element).abs() == expected
        }
    }
}

/// Order of the class of a prime above the unramified `p`.
pub fn principal_order(k: &FieldDescription, cg: &ClassGroupData, p: u64) -> Result<u64, FieldError> {
    if k.is_ramified(p) {
        return Err(FieldError::Ramified(p));
    }
    let primes = split_prime(k, p)?;
    principal_order_of(k, cg, &primes)
}

pub(crate) fn principal_order_of(k: &FieldDescription, cg: &ClassGroupData, primes: &[PrimeIdeal]) -> Result<u64, FieldError> {
    let first = ideal_class(k, cg, &primes[0])?;
    let order = cg.structure.element_order(&first);
    if let Some(second) = primes.get(1) {
        let other = cg.structure.element_order(&ideal_class(k, cg, second)?);
        if other != order {
            return Err(FieldError::Internal(format!(
                "primes above {} have classes of orders {order} and {other}",
                primes[0].p
            )));
        }
    }
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::super::{build_multiquadratic, build_quadratic};
    use super::*;

    #[test]
    fn shells_cover_the_box_once() {
        let mut seen = BTreeSet::new();
        for r in 1..=3 {
            shell(3, r, |x| {
                assert!(seen.insert(x.to_vec()));
                true
            });
        }
        // half of the nonzero vectors of [-3, 3]^3
        assert_eq!(seen.len(), (7 * 7 * 7 - 1) / 2);
    }

    #[test]
    fn imaginary_quadratic_minus_five() {
        let k = build_quadratic(-5).unwrap();
        let cg = class_group(&k).unwrap();
        assert_eq!(cg.structure.invariant_factors(), &[2]);
        assert_eq!(cg.certification, Certification::CertifiedByBound);
        let p29 = split_prime(&k, 29).unwrap();
        let w = principality(&k, &cg, &p29[0]).unwrap();
        match w.certificate {
            Some(PrincipalCertificate::Generator { element }) => assert_eq!(k.norm(&element), BigInt::from(29)),
            other => panic!("expected a generator, got {other:?}"),
        }
        let p3 = split_prime(&k, 3).unwrap();
        assert!(!is_principal(&k, &cg, &p3[0]).unwrap());
        assert_eq!(principal_order(&k, &cg, 3).unwrap(), 2);
        assert_eq!(principal_order(&k, &cg, 29).unwrap(), 1);
        // 11 is inert
        assert_eq!(principal_order(&k, &cg, 11).unwrap(), 1);
        assert!(matches!(principal_order(&k, &cg, 5), Err(FieldError::Ramified(5))));
    }

    #[test]
    fn small_real_fields() {
        let k = build_quadratic(13).unwrap();
        let cg = class_group(&k).unwrap();
        assert!(cg.factor_base.is_empty());
        assert_eq!(cg.class_number(), 1);
        let k = build_quadratic(10).unwrap();
        assert_eq!(class_group(&k).unwrap().class_number(), 2);
    }

    #[test]
    fn example_field_class_group() {
        let k = build_multiquadratic(&[-3, 13]).unwrap();
        let cg = class_group(&k).unwrap();
        assert_eq!(cg.class_number(), 2);
        let k = k.with_known_class_number(Some(2));
        assert_eq!(class_group(&k).unwrap().certification, Certification::CertifiedByKnownH);
        let wrong = k.with_known_class_number(Some(4));
        assert!(matches!(class_group(&wrong), Err(FieldError::ClassNumberMismatch { computed: 2, known: 4 })));
    }

    #[test]
    fn cache_round_trip_reverifies() {
        let k = build_quadratic(-47).unwrap();
        let cg = class_group(&k).unwrap();
        let cached = cg.to_cached(&k);
        let back = ClassGroupData::from_cached(&k, &cached).unwrap();
        assert_eq!(back.structure, cg.structure);
        assert_eq!(back.class_map, cg.class_map);
        let mut tampered = cached.clone();
        tampered.relations[0].exponents[0] += 1;
        assert!(ClassGroupData::from_cached(&k, &tampered).is_err());
        let other = build_quadratic(-23).unwrap();
        assert!(ClassGroupData::from_cached(&other, &cached).is_err());
    }
}
