//! Field constructors: quadratic, multiquadratic and generic abelian fields.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;

use super::linalg::{q_charpoly, q_inverse, q_mat_mul, QMatrix};
use super::{big, FieldDescription, FieldError, FieldKind, FieldParts, GaloisData, Resolver};
use crate::abelian::hermite_rows;
use crate::arith::{factorize, is_squarefree};
use crate::extension::FiniteGroup;

fn q(x: i64) -> BigRational {
    BigRational::from_integer(big(x))
}

fn squarefree_part(x: i64) -> i64 {
    let sign = x.signum();
    let mut out = 1i64;
    for (p, e) in factorize(x.unsigned_abs()) {
        if e % 2 == 1 {
            out *= p as i64;
        }
    }
    sign * out
}

/// Discriminant of `Q(sqrt(d))` for squarefree `d != 1`.
pub(crate) fn fundamental_discriminant(d: i64) -> i64 {
    if d.rem_euclid(4) == 1 {
        d
    } else {
        4 * d
    }
}

/// `Q(sqrt(d_1), ..., sqrt(d_k))` in the basis of products `sqrt(d_S)`,
/// `d_S = prod_{i in S} d_i`, indexed by bitmask `S`.
struct PowerProducts {
    ds: Vec<i64>,
}

impl PowerProducts {
    fn dim(&self) -> usize {
        1 << self.ds.len()
    }

    fn d_of(&self, s: usize) -> i64 {
        (0..self.ds.len()).filter(|i| s >> i & 1 == 1).map(|i| self.ds[i]).product()
    }

    fn mul(&self, a: &[BigRational], b: &[BigRational]) -> Vec<BigRational> {
        let n = self.dim();
        let mut out = vec![BigRational::zero(); n];
        for s in 0..n {
            if a[s].is_zero() {
                continue;
            }
            for t in 0..n {
                if b[t].is_zero() {
                    continue;
                }
                out[s ^ t] += &a[s] * &b[t] * q(self.d_of(s & t));
            }
        }
        out
    }

    /// Rows are `e_S * x`.
    fn mul_matrix(&self, x: &[BigRational]) -> QMatrix {
        let n = self.dim();
        (0..n)
            .map(|s| {
                let mut e = vec![BigRational::zero(); n];
                e[s] = BigRational::one();
                self.mul(&e, x)
            })
            .collect()
    }

    fn trace(&self, x: &[BigRational]) -> BigRational {
        &x[0] * q(self.dim() as i64)
    }

    fn discriminant_of(&self, rows: &QMatrix) -> BigRational {
        let tr: QMatrix = rows.iter().map(|a| rows.iter().map(|b| self.trace(&self.mul(a, b))).collect()).collect();
        super::linalg::q_det(&tr)
    }

    /// Exact T2: the products `sqrt(d_S)` are orthogonal with `T2 = n |d_S|`.
    fn t2(&self, rows: &QMatrix) -> QMatrix {
        let n = self.dim();
        rows.iter()
            .map(|a| {
                rows.iter()
                    .map(|b| (0..n).map(|s| &a[s] * &b[s] * q(n as i64 * self.d_of(s).abs())).sum())
                    .collect()
            })
            .collect()
    }

    fn is_integral(&self, x: &[BigRational]) -> bool {
        if !self.trace(x).is_integer() || !self.trace(&self.mul(x, x)).is_integer() {
            return false;
        }
        q_charpoly(&self.mul_matrix(x)).iter().all(|c| c.is_integer())
    }
}

fn hnf_rational(rows: &QMatrix) -> QMatrix {
    let n = rows[0].len();
    let den = rows.iter().flatten().fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let ints: Vec<Vec<BigInt>> =
        rows.iter().map(|r| r.iter().map(|x| (x * BigRational::from_integer(den.clone())).to_integer()).collect()).collect();
    hermite_rows(n, &ints)
        .into_iter()
        .map(|r| r.into_iter().map(|x| BigRational::new(x, den.clone())).collect())
        .collect()
}

/// Saturates `Z[sqrt(d_S)]` to the maximal order, whose discriminant is known.
fn maximal_order(pp: &PowerProducts, target: &BigInt) -> Result<QMatrix, FieldError> {
    let n = pp.dim();
    let mut w: QMatrix = (0..n).map(|i| (0..n).map(|j| if i == j { q(1) } else { q(0) }).collect()).collect();
    loop {
        let disc = pp.discriminant_of(&w);
        let ratio = disc / BigRational::from_integer(target.clone());
        if ratio.is_one() {
            return Ok(w);
        }
        if !ratio.is_integer() || ratio.is_negative() {
            return Err(FieldError::Internal(format!("order discriminant ratio {ratio} is not a positive integer")));
        }
        let ratio = ratio.to_integer().to_u64().ok_or_else(|| FieldError::Internal("index too large".into()))?;
        let mut enlarged = false;
        'primes: for (p, e) in factorize(ratio) {
            if e < 2 {
                continue;
            }
            let total = (p as usize).pow(n as u32);
            for code in 1..total {
                let mut c = code;
                let mut x = vec![BigRational::zero(); n];
                for row in &w {
                    let digit = (c % p as usize) as i64;
                    c /= p as usize;
                    if digit != 0 {
                        for (xi, wi) in x.iter_mut().zip(row) {
                            *xi += wi * q(digit);
                        }
                    }
                }
                let x: Vec<BigRational> = x.into_iter().map(|v| v / q(p as i64)).collect();
                if pp.is_integral(&x) {
                    let mut rows = w.clone();
                    rows.push(x);
                    w = hnf_rational(&rows);
                    enlarged = true;
                    break 'primes;
                }
            }
        }
        if !enlarged {
            return Err(FieldError::Internal("saturation stalled before reaching the maximal order".into()));
        }
    }
}

fn sign_label(mask: usize, k: usize) -> String {
    let signs: Vec<&str> = (0..k).map(|i| if mask >> i & 1 == 1 { "-" } else { "+" }).collect();
    format!("({})", signs.join(","))
}

fn multiquadratic_galois(ds: &[i64]) -> GaloisData {
    let k = ds.len();
    let discs: Vec<i64> = ds.iter().map(|&d| fundamental_discriminant(d)).collect();
    let conductor = discs.iter().fold(1u64, |acc, d| acc.lcm(&d.unsigned_abs()));
    GaloisData {
        group: FiniteGroup::elementary_abelian_2(k as u32),
        labels: (0..1usize << k).map(|m| sign_label(m, k)).collect(),
        conductor,
        resolver: Resolver::Kronecker { discs },
    }
}

fn check_squarefree(d: i64) -> Result<(), FieldError> {
    if d == 0 || d == 1 {
        return Err(FieldError::Input(format!("{d} does not define a quadratic field")));
    }
    if !is_squarefree(d.unsigned_abs()) {
        return Err(FieldError::NotSquarefree(d));
    }
    Ok(())
}

/// `Q(sqrt(d))`, with `theta = (1 + sqrt(d))/2` when `d = 1 mod 4` and `sqrt(d)` otherwise.
pub fn build_quadratic(d: i64) -> Result<FieldDescription, FieldError> {
    check_squarefree(d)?;
    let pp = PowerProducts { ds: vec![d] };
    let (min_poly, theta_pp) = if d.rem_euclid(4) == 1 {
        (vec![big(-(d - 1) / 4), big(-1), big(1)], vec![BigRational::new(big(1), big(2)), BigRational::new(big(1), big(2))])
    } else {
        (vec![big(-d), big(0), big(1)], vec![q(0), q(1)])
    };
    let w = vec![vec![q(1), q(0)], theta_pp];
    let identity = vec![vec![q(1), q(0)], vec![q(0), q(1)]];
    FieldDescription::assemble(FieldParts {
        kind: FieldKind::Quadratic { d },
        min_poly,
        integral_basis: identity,
        galois: multiquadratic_galois(&[d]),
        known_class_number: None,
        claimed_index: Some(BigInt::one()),
        claimed_discriminant: Some(big(fundamental_discriminant(d))),
        t2: Some(pp.t2(&w)),
    })
}

/// `Q(sqrt(d_1), ..., sqrt(d_k))` with `theta = sum sqrt(d_i)`.
pub fn build_multiquadratic(ds: &[i64]) -> Result<FieldDescription, FieldError> {
    if ds.is_empty() || ds.len() > 3 {
        return Err(FieldError::Input(format!("need 1 to 3 generators, got {}", ds.len())));
    }
    for &d in ds {
        check_squarefree(d)?;
    }
    if ds.len() == 1 {
        let field = build_quadratic(ds[0])?;
        return Ok(FieldDescription { kind: FieldKind::Multiquadratic { ds: ds.to_vec() }, ..field });
    }
    let pp = PowerProducts { ds: ds.to_vec() };
    let n = pp.dim();
    let mut target = BigInt::one();
    for s in 1..n {
        let sq = squarefree_part(pp.d_of(s));
        if sq == 1 {
            return Err(FieldError::Input(format!("{ds:?} are dependent modulo squares")));
        }
        target *= fundamental_discriminant(sq);
    }
    let r2 = if ds.iter().any(|&d| d < 0) { n / 2 } else { 0 };
    let target = if r2 % 2 == 1 { -target.abs() } else { target.abs() };

    let mut theta = vec![q(0); n];
    for i in 0..ds.len() {
        theta[1 << i] = q(1);
    }
    // powers of theta, and theta^n for the minimal polynomial
    let mut powers: QMatrix = vec![{
        let mut one = vec![q(0); n];
        one[0] = q(1);
        one
    }];
    for _ in 1..=n {
        let next = pp.mul(powers.last().unwrap(), &theta);
        powers.push(next);
    }
    let top = powers.pop().unwrap();
    let p_inv = q_inverse(&powers).ok_or_else(|| FieldError::Input("theta is not primitive".into()))?;
    let c = super::linalg::q_vec_mat(&top, &p_inv);
    let mut min_poly: Vec<BigInt> = Vec::with_capacity(n + 1);
    for ci in &c {
        if !ci.is_integer() {
            return Err(FieldError::Internal("minimal polynomial of theta is not integral".into()));
        }
        min_poly.push(-ci.to_integer());
    }
    min_poly.push(BigInt::one());

    let w = maximal_order(&pp, &target)?;
    let basis = q_mat_mul(&w, &p_inv);
    FieldDescription::assemble(FieldParts {
        kind: FieldKind::Multiquadratic { ds: ds.to_vec() },
        min_poly,
        integral_basis: basis,
        galois: multiquadratic_galois(ds),
        known_class_number: None,
        claimed_index: None,
        claimed_discriminant: Some(target),
        t2: Some(pp.t2(&w)),
    })
}

/// A rational entry written as an integer or as `[num, den]`.
#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum RationalEntry {
    Integer(i64),
    Fraction([i64; 2]),
}

impl RationalEntry {
    fn to_q(&self) -> Result<BigRational, FieldError> {
        match *self {
            RationalEntry::Integer(a) => Ok(q(a)),
            RationalEntry::Fraction([_, 0]) => Err(FieldError::Basis("zero denominator".into())),
            RationalEntry::Fraction([a, b]) => Ok(BigRational::new(big(a), big(b))),
        }
    }
}

#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct FrobeniusSpec {
    pub conductor: u64,
    /// Residue (as a decimal string) to element label.
    pub classes: BTreeMap<String, u64>,
}

/// Data for an abelian field given by a polynomial, a basis and its Artin map.
#[derive(Clone, Debug, Deserialize, PartialEq, Eq)]
#[serde(deny_unknown_fields)]
pub struct GenericFieldSpec {
    pub min_poly: Vec<i64>,
    /// Row `j` gives `omega_j` in powers of `theta`.
    pub integral_basis: Vec<Vec<RationalEntry>>,
    pub index: u64,
    #[serde(default)]
    pub class_number: Option<u64>,
    pub frobenius: FrobeniusSpec,
    /// Whether each listed prime dividing the index factors principally,
    /// for primes the splitting code cannot handle.
    #[serde(default)]
    pub principal_split_overrides: BTreeMap<u64, bool>,
}

fn generic_galois(spec: &FrobeniusSpec) -> Result<GaloisData, FieldError> {
    let m = spec.conductor;
    if m == 0 || m > 1_000_000 {
        return Err(FieldError::Galois(format!("conductor {m} outside 1..=1000000")));
    }
    let mut by_residue: Vec<Option<u64>> = vec![None; m as usize];
    for (key, &label) in &spec.classes {
        let r: u64 = key.trim().parse().map_err(|_| FieldError::Galois(format!("residue key {key:?} is not an integer")))?;
        if r >= m || r.gcd(&m) != 1 {
            return Err(FieldError::Galois(format!("residue {r} is not a unit mod {m}")));
        }
        by_residue[r as usize] = Some(label);
    }
    let units: Vec<u64> = (1..m.max(2)).filter(|r| r.gcd(&m) == 1).collect();
    let units = if m == 1 { vec![0] } else { units };
    for &r in &units {
        if by_residue[r as usize].is_none() {
            return Err(FieldError::Galois(format!("resolver undefined on the unit {r} mod {m}")));
        }
    }
    let identity_label = by_residue[(1 % m) as usize].expect("1 is a unit");
    let mut labels: Vec<u64> = units.iter().map(|&r| by_residue[r as usize].unwrap()).collect();
    labels.sort_unstable();
    labels.dedup();
    labels.retain(|&l| l != identity_label);
    labels.insert(0, identity_label);
    let index_of = |l: u64| labels.iter().position(|&x| x == l).unwrap();
    let rep: Vec<u64> = labels.iter().map(|&l| *units.iter().find(|&&r| by_residue[r as usize] == Some(l)).unwrap()).collect();
    let k = labels.len();
    let table: Vec<Vec<usize>> = (0..k)
        .map(|a| (0..k).map(|b| index_of(by_residue[((rep[a] * rep[b]) % m) as usize].unwrap())).collect())
        .collect();
    // the labelling must be a homomorphism on the unit group
    let step = if units.len() * units.len() > 4_000_000 { units.len() / 2000 + 1 } else { 1 };
    for &r in &units {
        for &s in units.iter().step_by(step) {
            let lhs = index_of(by_residue[((r * s) % m) as usize].unwrap());
            let rhs = table[index_of(by_residue[r as usize].unwrap())][index_of(by_residue[s as usize].unwrap())];
            if lhs != rhs {
                return Err(FieldError::Galois(format!("labels are not multiplicative at {r} * {s} mod {m}")));
            }
        }
    }
    let group = FiniteGroup::from_table(table).map_err(|e| FieldError::Galois(e.to_string()))?;
    let classes = (0..m).map(|r| by_residue[r as usize].map(index_of)).collect();
    Ok(GaloisData {
        group,
        labels: labels.iter().map(|l| l.to_string()).collect(),
        conductor: m,
        resolver: Resolver::Table { classes },
    })
}

pub fn build_generic(spec: &GenericFieldSpec) -> Result<FieldDescription, FieldError> {
    let min_poly: Vec<BigInt> = spec.min_poly.iter().map(|&c| big(c)).collect();
    let basis = spec
        .integral_basis
        .iter()
        .map(|row| row.iter().map(RationalEntry::to_q).collect::<Result<Vec<_>, _>>())
        .collect::<Result<QMatrix, _>>()?;
    if spec.class_number == Some(0) {
        return Err(FieldError::Input("class_number must be positive".into()));
    }
    FieldDescription::assemble(FieldParts {
        kind: FieldKind::Generic,
        min_poly,
        integral_basis: basis,
        galois: generic_galois(&spec.frobenius)?,
        known_class_number: spec.class_number,
        claimed_index: Some(big(spec.index as i64)),
        claimed_discriminant: None,
        t2: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_invariants() {
        let k = build_quadratic(-5).unwrap();
        assert_eq!(k.discriminant(), &big(-20));
        assert_eq!(k.signature(), (0, 1));
        let k = build_quadratic(13).unwrap();
        assert_eq!(k.discriminant(), &big(13));
        assert_eq!(k.signature(), (2, 0));
        // omega_1 = theta = (1 + sqrt 13)/2
        assert_eq!(k.min_poly(), &[big(-3), big(-1), big(1)]);
        assert!(matches!(build_quadratic(12), Err(FieldError::NotSquarefree(12))));
        assert!(build_quadratic(1).is_err());
    }

    #[test]
    fn biquadratic_example_field() {
        let k = build_multiquadratic(&[-3, 13]).unwrap();
        assert_eq!(k.degree(), 4);
        assert_eq!(k.abs_discriminant(), big(1521));
        assert_eq!(k.signature(), (0, 2));
        assert_eq!(k.galois().group().order(), 4);
        assert!(!k.is_cyclic());
    }

    #[test]
    fn dependent_generators_rejected() {
        assert!(build_multiquadratic(&[2, 3, 6]).is_err());
        assert!(matches!(build_multiquadratic(&[4, 13]), Err(FieldError::NotSquarefree(4))));
    }

    #[test]
    fn maximal_orders_of_biquadratic_fields() {
        // discriminants are products of the three quadratic subfield discriminants
        for (ds, disc) in [([2i64, 3], 2304i64), ([-1, 2], 256), ([5, 13], 4225), ([-1, 3], 144)] {
            let k = build_multiquadratic(&ds).unwrap();
            assert_eq!(k.abs_discriminant(), big(disc), "{ds:?}");
        }
    }

    #[test]
    fn generic_cyclotomic_nine() {
        let spec: GenericFieldSpec = serde_json::from_str(
            r#"{"min_poly":[1,0,0,1,0,0,1],
                "integral_basis":[[1,0,0,0,0,0],[0,1,0,0,0,0],[0,0,1,0,0,0],[0,0,0,1,0,0],[0,0,0,0,1,0],[0,0,0,0,0,1]],
                "index":1,
                "frobenius":{"conductor":9,"classes":{"1":0,"2":1,"4":2,"8":3,"7":4,"5":5}}}"#,
        )
        .unwrap();
        let k = build_generic(&spec).unwrap();
        assert_eq!(k.discriminant(), &big(-19683));
        assert!(k.is_cyclic());
        assert_eq!(k.signature(), (0, 3));
        let bad = GenericFieldSpec { index: 2, ..spec };
        assert!(build_generic(&bad).is_err());
    }
}
