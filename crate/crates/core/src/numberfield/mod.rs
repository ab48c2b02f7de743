//! Number fields over Q: integral bases, prime splitting, Frobenius classes,
//! class groups, principal orders of primes and density scans.
//!
//! Elements of `O_K` are coordinate vectors in the integral basis
//! `omega_0..omega_{n-1}`; multiplication goes through a table of structure
//! constants. Ideals are Z-lattices given by Hermite bases in the same
//! coordinates.

pub mod bounds;
mod build;
mod classgroup;
mod ideal;
mod lattice;
mod linalg;
pub mod poly;
mod scan;
mod split;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::arith::kronecker;
use crate::extension::{ConjugacyClass, FiniteGroup};

pub use bounds::{bach_sorenson_bound, lenstra_class_bound, minkowski_bound};
pub use build::{build_generic, build_multiquadratic, build_quadratic, GenericFieldSpec};
pub use classgroup::{
    class_group, class_group_with, ideal_class, is_principal, principal_order, principality, verify_certificate,
    CachedClassGroup, Certification, ClassGroupData,
    ClassGroupOptions, PrincipalCertificate, PrincipalityWitness, Relation,
};
pub use ideal::{Ideal, PrimeIdeal};
pub use scan::{empirical_density, scan_primes, DensityEstimate, ScanOptions, ScanRecord, ScanStatus};
pub use split::{frobenius, frobenius_element, split_prime};

use linalg::{q_det, q_inverse, q_to_z, q_vec_mat, QMatrix};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error("invalid field input: {0}")]
    Input(String),
    #[error("the minimal polynomial is reducible")]
    Reducible,
    #[error("invalid integral basis: {0}")]
    Basis(String),
    #[error("discriminant mismatch: disc(min_poly) = {poly}, index = {index}, field discriminant = {field}")]
    Discriminant { poly: BigInt, index: BigInt, field: BigInt },
    #[error("invalid Galois data: {0}")]
    Galois(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is ramified")]
    Ramified(u64),
    #[error("excluded prime {0}: it divides [O_K : Z[theta]]")]
    Excluded(u64),
    #[error("class group undetermined: {0}")]
    Undetermined(String),
    #[error("undecided principality above {p}: {reason}")]
    Undecided { p: u64, reason: String },
    #[error("computed class number {computed} disagrees with the known class number {known}")]
    ClassNumberMismatch { computed: u64, known: u64 },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum FieldKind {
    Quadratic { d: i64 },
    Multiquadratic { ds: Vec<i64> },
    Generic,
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Resolver {
    /// Element index has bit `i` set when `(D_i | p) = -1`.
    Kronecker { discs: Vec<i64> },
    /// Element index per residue class, `None` off the units.
    Table { classes: Vec<Option<usize>> },
}

/// The Galois group with its labels and the Artin map on residues.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GaloisData {
    group: FiniteGroup,
    labels: Vec<String>,
    conductor: u64,
    resolver: Resolver,
}

impl GaloisData {
    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, g: usize) -> &str {
        &self.labels[g]
    }

    pub fn conductor(&self) -> u64 {
        self.conductor
    }

    /// The element attached to the residue of `a` mod the conductor, if a unit.
    pub fn resolve(&self, a: u64) -> Option<usize> {
        match &self.resolver {
            Resolver::Kronecker { discs } => {
                let mut g = 0;
                for (i, &d) in discs.iter().enumerate() {
                    match kronecker(d, a) {
                        0 => return None,
                        -1 => g |= 1 << i,
                        _ => {}
                    }
                }
                Some(g)
            }
            Resolver::Table { classes } => classes[(a % self.conductor) as usize],
        }
    }
}

/// Positive definite T2 form `sum |sigma(x)|^2` on the integral basis.
#[derive(Clone, Debug)]
pub(crate) struct T2Form {
    exact: Option<QMatrix>,
    approx: Vec<Vec<f64>>,
}

impl T2Form {
    fn from_exact(exact: QMatrix) -> Self {
        let approx = exact.iter().map(|r| r.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect()).collect();
        T2Form { exact: Some(exact), approx }
    }
}

/// A number field with a chosen primitive element and integral basis.
#[derive(Clone, Debug)]
pub struct FieldDescription {
    kind: FieldKind,
    min_poly: Vec<BigInt>,
    integral_basis: QMatrix,
    discriminant: BigInt,
    signature: (usize, usize),
    index: BigInt,
    galois: GaloisData,
    known_class_number: Option<u64>,
    /// `omega_i omega_j = sum_k table[(i n + j) n + k] omega_k`
    table: Vec<i64>,
    one: Vec<BigInt>,
    theta: Vec<BigInt>,
    t2: T2Form,
}

pub(crate) struct FieldParts {
    pub kind: FieldKind,
    pub min_poly: Vec<BigInt>,
    pub integral_basis: QMatrix,
    pub galois: GaloisData,
    pub known_class_number: Option<u64>,
    pub claimed_index: Option<BigInt>,
    pub claimed_discriminant: Option<BigInt>,
    pub t2: Option<QMatrix>,
}

impl FieldDescription {
    pub(crate) fn assemble(parts: FieldParts) -> Result<Self, FieldError> {
        let f = parts.min_poly;
        let n = f.len().checked_sub(1).ok_or_else(|| FieldError::Input("empty minimal polynomial".into()))?;
        if !(2..=8).contains(&n) {
            return Err(FieldError::Input(format!("degree {n} outside 2..=8")));
        }
        if !f[n].is_one() {
            return Err(FieldError::Input("minimal polynomial must be monic".into()));
        }
        if !poly::is_irreducible(&f) {
            return Err(FieldError::Reducible);
        }
        let basis = parts.integral_basis;
        if basis.len() != n || basis.iter().any(|r| r.len() != n) {
            return Err(FieldError::Basis(format!("expected {n} rows of length {n}")));
        }
        let inv = q_inverse(&basis).ok_or_else(|| FieldError::Basis("basis is singular".into()))?;
        let to_omega = |theta_coords: &[BigRational], what: &str| -> Result<Vec<BigInt>, FieldError> {
            q_to_z(&q_vec_mat(theta_coords, &inv))
                .ok_or_else(|| FieldError::Basis(format!("{what} is not in the span of the basis")))
        };

        let fq: Vec<BigRational> = f.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        let mut table = vec![0i64; n * n * n];
        for i in 0..n {
            for j in i..n {
                let prod = q_poly_mulmod(&basis[i], &basis[j], &fq);
                let coords = to_omega(&prod, &format!("omega_{i} * omega_{j}"))?;
                for (k, c) in coords.iter().enumerate() {
                    let c = c.to_i64().ok_or_else(|| FieldError::Basis("structure constant overflows i64".into()))?;
                    table[(i * n + j) * n + k] = c;
                    table[(j * n + i) * n + k] = c;
                }
            }
        }
        let unit = |k: usize| -> Vec<BigRational> {
            (0..n).map(|i| if i == k { BigRational::one() } else { BigRational::zero() }).collect()
        };
        let one = to_omega(&unit(0), "1")?;
        let theta = to_omega(&unit(1), "theta")?;

        let det_basis = q_det(&basis).abs();
        let index_q = BigRational::one() / det_basis;
        if !index_q.is_integer() {
            return Err(FieldError::Basis("basis does not contain Z[theta]".into()));
        }
        let index = index_q.to_integer();

        let mut field = FieldDescription {
            kind: parts.kind,
            min_poly: f.clone(),
            integral_basis: basis,
            discriminant: BigInt::zero(),
            signature: (0, 0),
            index: index.clone(),
            galois: parts.galois,
            known_class_number: parts.known_class_number,
            table,
            one,
            theta,
            t2: T2Form { exact: None, approx: Vec::new() },
        };
        if field.mul(&field.one, &field.one) != field.one {
            return Err(FieldError::Basis("1 does not act as the identity".into()));
        }

        let trace_form = field.trace_form();
        let disc = crate::abelian::IntMatrix::from_rows(n, &trace_form).determinant();
        let poly_disc = poly::discriminant(&f);
        if poly_disc != &index * &index * &disc {
            return Err(FieldError::Discriminant { poly: poly_disc, index, field: disc });
        }
        if let Some(claimed) = parts.claimed_index {
            if claimed != index {
                return Err(FieldError::Basis(format!("claimed index {claimed}, basis gives {index}")));
            }
        }
        if let Some(claimed) = parts.claimed_discriminant {
            if claimed != disc {
                return Err(FieldError::Discriminant { poly: poly_disc, index, field: disc });
            }
        }
        field.discriminant = disc;
        let r1 = poly::real_root_count(&f);
        field.signature = (r1, (n - r1) / 2);

        field.t2 = match parts.t2 {
            Some(g) => T2Form::from_exact(g),
            None if r1 == n => T2Form::from_exact(
                trace_form.iter().map(|r| r.iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect(),
            ),
            None => field.embedding_t2(),
        };
        field.check_galois()?;
        Ok(field)
    }

    fn check_galois(&self) -> Result<(), FieldError> {
        let g = &self.galois;
        if g.group.order() != self.degree() {
            return Err(FieldError::Galois(format!(
                "Galois group of order {} for a field of degree {}",
                g.group.order(),
                self.degree()
            )));
        }
        if !g.group.is_abelian() {
            return Err(FieldError::Galois("Frobenius by residues needs an abelian group".into()));
        }
        if g.labels.len() != g.group.order() {
            return Err(FieldError::Galois("one label per group element".into()));
        }
        if g.resolve(1) != Some(g.group.identity()) {
            return Err(FieldError::Galois("resolver(1) must be the identity".into()));
        }
        Ok(())
    }

    /// Float Gram matrix from the complex embeddings.
    fn embedding_t2(&self) -> T2Form {
        let n = self.degree();
        let roots = poly::complex_roots(&self.min_poly);
        let images: Vec<Vec<num_complex::Complex64>> = roots
            .iter()
            .map(|&z| {
                self.integral_basis
                    .iter()
                    .map(|row| {
                        row.iter()
                            .rev()
                            .fold(num_complex::Complex64::new(0.0, 0.0), |acc, c| acc * z + c.to_f64().unwrap_or(f64::NAN))
                    })
                    .collect()
            })
            .collect();
        let approx = (0..n)
            .map(|i| (0..n).map(|j| images.iter().map(|v| (v[i] * v[j].conj()).re).sum()).collect())
            .collect();
        T2Form { exact: None, approx }
    }

    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[BigInt] {
        &self.min_poly
    }

    /// Row `j` expresses `omega_j` in powers of `theta`.
    pub fn integral_basis(&self) -> &[Vec<BigRational>] {
        &self.integral_basis
    }

    pub fn discriminant(&self) -> &BigInt {
        &self.discriminant
    }

    pub fn abs_discriminant(&self) -> BigInt {
        self.discriminant.abs()
    }

    pub fn signature(&self) -> (usize, usize) {
        self.signature
    }

    pub fn index(&self) -> &BigInt {
        &self.index
    }

    pub fn galois(&self) -> &GaloisData {
        &self.galois
    }

    pub fn known_class_number(&self) -> Option<u64> {
        self.known_class_number
    }

    pub fn with_known_class_number(mut self, h: Option<u64>) -> Self {
        self.known_class_number = h;
        self
    }

    pub(crate) fn t2(&self) -> &T2Form {
        &self.t2
    }

    pub fn one(&self) -> Vec<BigInt> {
        self.one.clone()
    }

    pub fn theta(&self) -> Vec<BigInt> {
        self.theta.clone()
    }

    pub fn from_integer(&self, k: &BigInt) -> Vec<BigInt> {
        self.one.iter().map(|c| c * k).collect()
    }

    pub fn is_ramified(&self, p: u64) -> bool {
        (&self.discriminant % BigInt::from(p)).is_zero()
    }

    pub fn mul(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        let n = self.degree();
        let mut out = vec![BigInt::zero(); n];
        for (i, ai) in a.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in b.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let ab = ai * bj;
                let row = &self.table[(i * n + j) * n..(i * n + j + 1) * n];
                for (o, &t) in out.iter_mut().zip(row) {
                    if t != 0 {
                        *o += &ab * t;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
        a.iter().zip(b).map(|(x, y)| x + y).collect()
    }

    /// Rows are `omega_i * a`, so `x * a` is `x M` for coordinate rows `x`.
    pub fn mul_matrix(&self, a: &[BigInt]) -> Vec<Vec<BigInt>> {
        let n = self.degree();
        (0..n)
            .map(|i| {
                let mut e = vec![BigInt::zero(); n];
                e[i] = BigInt::one();
                self.mul(&e, a)
            })
            .collect()
    }

    pub fn norm(&self, a: &[BigInt]) -> BigInt {
        if let Some(small) = a.iter().map(|c| c.to_i64()).collect::<Option<Vec<i64>>>() {
            if let Some(v) = self.norm_small(&small) {
                return BigInt::from(v);
            }
        }
        crate::abelian::IntMatrix::from_rows(self.degree(), &self.mul_matrix(a)).determinant()
    }

    /// Norm by Bareiss elimination in `i128`, `None` on overflow.
    pub(crate) fn norm_small(&self, a: &[i64]) -> Option<i128> {
        let n = self.degree();
        let mut m = vec![vec![0i128; n]; n];
        for (j, &aj) in a.iter().enumerate() {
            if aj == 0 {
                continue;
            }
            for (i, row) in m.iter_mut().enumerate() {
                let t = &self.table[(i * n + j) * n..(i * n + j + 1) * n];
                for (r, &c) in row.iter_mut().zip(t) {
                    *r = r.checked_add((aj as i128).checked_mul(c as i128)?)?;
                }
            }
        }
        let mut sign = 1i128;
        let mut prev = 1i128;
        for k in 0..n - 1 {
            if m[k][k] == 0 {
                let Some(p) = (k + 1..n).find(|&i| m[i][k] != 0) else { return Some(0) };
                m.swap(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = m[i][j].checked_mul(m[k][k])?.checked_sub(m[i][k].checked_mul(m[k][j])?)?;
                    m[i][j] = v / prev;
                }
            }
            prev = m[k][k];
        }
        Some(sign * m[n - 1][n - 1])
    }

    pub fn trace(&self, a: &[BigInt]) -> BigInt {
        let traces = self.basis_traces();
        a.iter().zip(&traces).map(|(x, t)| x * t).sum()
    }

    fn basis_traces(&self) -> Vec<BigInt> {
        let n = self.degree();
        (0..n).map(|k| BigInt::from((0..n).map(|i| self.table[(k * n + i) * n + i]).sum::<i64>())).collect()
    }

    /// The matrix `Tr(omega_i omega_j)`.
    pub fn trace_form(&self) -> Vec<Vec<BigInt>> {
        let n = self.degree();
        let traces = self.basis_traces();
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).map(|k| BigInt::from(self.table[(i * n + j) * n + k]) * &traces[k]).sum())
                    .collect()
            })
            .collect()
    }

    /// `g(theta)` for an integer polynomial `g`.
    pub fn eval_theta_poly(&self, g: &[BigInt]) -> Vec<BigInt> {
        let mut acc = vec![BigInt::zero(); self.degree()];
        for c in g.iter().rev() {
            acc = self.mul(&acc, &self.theta);
            acc = self.add(&acc, &self.from_integer(c));
        }
        acc
    }

    /// Powers of `theta` expressing an element, inverse of the basis map.
    pub fn to_theta_coords(&self, a: &[BigInt]) -> Vec<BigRational> {
        let q: Vec<BigRational> = a.iter().map(|c| BigRational::from_integer(c.clone())).collect();
        q_vec_mat(&q, &self.integral_basis)
    }

    /// A short human readable name.
    pub fn name(&self) -> String {
        match &self.kind {
            FieldKind::Quadratic { d } => format!("Q(sqrt({d}))"),
            FieldKind::Multiquadratic { ds } => {
                let parts: Vec<String> = ds.iter().map(|d| format!("sqrt({d})")).collect();
                format!("Q({})", parts.join(", "))
            }
            FieldKind::Generic => format!("Q[x]/({})", poly_string(&self.min_poly)),
        }
    }

    pub fn is_cyclic(&self) -> bool {
        self.galois.group.is_cyclic()
    }

    pub fn class_of_element(&self, g: usize) -> ConjugacyClass {
        self.galois.group.class_of(g)
    }
}

fn poly_string(f: &[BigInt]) -> String {
    let mut out = String::new();
    for (i, c) in f.iter().enumerate().rev() {
        if c.is_zero() {
            continue;
        }
        let sign = if c.is_negative() { "-" } else { "+" };
        if out.is_empty() {
            if c.is_negative() {
                out.push('-');
            }
        } else {
            out.push_str(&format!(" {sign} "));
        }
        let a = c.abs();
        let coeff = if a.is_one() && i > 0 { String::new() } else { a.to_string() };
        match i {
            0 => out.push_str(&coeff),
            1 => out.push_str(&format!("{coeff}x")),
            _ => out.push_str(&format!("{coeff}x^{i}")),
        }
    }
    out
}

/// `a * b mod f` for rational polynomials, `f` monic.
fn q_poly_mulmod(a: &[BigRational], b: &[BigRational], f: &[BigRational]) -> Vec<BigRational> {
    let n = f.len() - 1;
    let mut prod = vec![BigRational::zero(); a.len() + b.len()];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    for k in (n..prod.len()).rev() {
        let c = std::mem::take(&mut prod[k]);
        if c.is_zero() {
            continue;
        }
        for (j, fj) in f.iter().enumerate().take(n) {
            prod[k - n + j] -= &c * fj;
        }
    }
    prod.truncate(n);
    prod
}

pub(crate) fn big(x: i64) -> BigInt {
    BigInt::from(x)
}
