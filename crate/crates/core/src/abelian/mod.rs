//! Finite abelian groups in invariant-factor form.
//!
//! A group is `Z/d_1 x ... x Z/d_r` with `d_1 | ... | d_r`, every `d_i >= 2`.
//! Elements are coordinate vectors kept reduced. Subgroups, quotients, kernels
//! and images are all computed through integer Smith forms, never by listing
//! elements.

mod congruence;
mod matrix;
mod subgroup;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use congruence::{CongruenceSolution, CongruenceSystem};
pub use matrix::{hermite_rows, smith_normal_form, IntMatrix, SmithForm};
pub use subgroup::Subgroup;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AbelianError {
    #[error("invariant factors {0:?} do not form a divisibility chain of integers >= 2")]
    BadInvariantFactors(Vec<u64>),
    #[error("element {coords:?} is not reduced into {group}")]
    NotReduced { coords: Vec<u64>, group: String },
    #[error("torsion index must be positive")]
    ZeroTorsion,
    #[error("matrix of size {rows}x{cols} does not define a map on a rank {rank} group")]
    BadMatrixShape { rows: usize, cols: usize, rank: usize },
    #[error("row {row} of the matrix is not killed by the invariant factor {factor}")]
    NotWellDefined { row: usize, factor: u64 },
}

/// `Z/d_1 x ... x Z/d_r`, stored by its invariant factors.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct AbelianGroup {
    factors: Vec<u64>,
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct AbelianElement {
    coords: Vec<u64>,
}

impl AbelianElement {
    pub fn coords(&self) -> &[u64] {
        &self.coords
    }
}

impl fmt::Debug for AbelianElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.coords)
    }
}

impl TryFrom<Vec<u64>> for AbelianGroup {
    type Error = AbelianError;

    fn try_from(factors: Vec<u64>) -> Result<Self, Self::Error> {
        AbelianGroup::new(factors)
    }
}

impl From<AbelianGroup> for Vec<u64> {
    fn from(g: AbelianGroup) -> Self {
        g.factors
    }
}

impl fmt::Debug for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> = self.factors.iter().map(|d| format!("Z/{d}")).collect();
        write!(f, "{}", parts.join(" x "))
    }
}

impl AbelianGroup {
    pub fn new(factors: Vec<u64>) -> Result<Self, AbelianError> {
        let ok = factors.iter().all(|&d| d >= 2) && factors.windows(2).all(|w| w[1] % w[0] == 0);
        if ok {
            Ok(AbelianGroup { factors })
        } else {
            Err(AbelianError::BadInvariantFactors(factors))
        }
    }

    pub fn trivial() -> Self {
        AbelianGroup { factors: Vec::new() }
    }

    pub fn cyclic(n: u64) -> Self {
        if n <= 1 {
            Self::trivial()
        } else {
            AbelianGroup { factors: vec![n] }
        }
    }

    /// Group `Z/n_1 x ... x Z/n_k` for arbitrary positive `n_i`, brought into
    /// invariant-factor form.
    pub fn from_cyclic_orders(orders: &[u64]) -> Self {
        let rows: Vec<Vec<BigInt>> = orders
            .iter()
            .enumerate()
            .map(|(i, &n)| {
                let mut r = vec![BigInt::from(0); orders.len()];
                r[i] = BigInt::from(n);
                r
            })
            .collect();
        let f = smith_normal_form(&IntMatrix::from_rows(orders.len(), &rows));
        let factors = f
            .diagonal()
            .iter()
            .map(|d| d.to_u64().expect("invariant factor fits in u64"))
            .filter(|&d| d > 1)
            .collect();
        AbelianGroup { factors }
    }

    pub fn invariant_factors(&self) -> &[u64] {
        &self.factors
    }

    pub fn rank(&self) -> usize {
        self.factors.len()
    }

    pub fn order(&self) -> u64 {
        self.factors.iter().product()
    }

    pub fn exponent(&self) -> u64 {
        self.factors.last().copied().unwrap_or(1)
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn zero(&self) -> AbelianElement {
        AbelianElement { coords: vec![0; self.rank()] }
    }

    pub fn basis(&self, i: usize) -> AbelianElement {
        let mut c = vec![0; self.rank()];
        c[i] = 1 % self.factors[i];
        AbelianElement { coords: c }
    }

    /// Checked constructor: coordinates must already be reduced.
    pub fn element(&self, coords: Vec<u64>) -> Result<AbelianElement, AbelianError> {
        if coords.len() == self.rank() && coords.iter().zip(&self.factors).all(|(c, d)| c < d) {
            Ok(AbelianElement { coords })
        } else {
            Err(AbelianError::NotReduced { coords, group: self.to_string() })
        }
    }

    pub fn contains(&self, x: &AbelianElement) -> bool {
        x.coords.len() == self.rank() && x.coords.iter().zip(&self.factors).all(|(c, d)| c < d)
    }

    /// Reduces arbitrary integer coordinates into the group.
    pub fn reduce<I: Into<i128> + Copy>(&self, coords: &[I]) -> AbelianElement {
        assert_eq!(coords.len(), self.rank());
        AbelianElement {
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(&c, &d)| c.into().rem_euclid(d as i128) as u64)
                .collect(),
        }
    }

    pub fn reduce_big(&self, coords: &[BigInt]) -> AbelianElement {
        assert_eq!(coords.len(), self.rank());
        AbelianElement {
            coords: coords
                .iter()
                .zip(&self.factors)
                .map(|(c, &d)| c.mod_floor(&BigInt::from(d)).to_u64().unwrap())
                .collect(),
        }
    }

    pub fn add(&self, x: &AbelianElement, y: &AbelianElement) -> AbelianElement {
        AbelianElement {
            coords: x
                .coords
                .iter()
                .zip(&y.coords)
                .zip(&self.factors)
                .map(|((a, b), d)| ((*a as u128 + *b as u128) % *d as u128) as u64)
                .collect(),
        }
    }

    pub fn neg(&self, x: &AbelianElement) -> AbelianElement {
        AbelianElement {
            coords: x.coords.iter().zip(&self.factors).map(|(a, d)| (d - a) % d).collect(),
        }
    }

    pub fn sub(&self, x: &AbelianElement, y: &AbelianElement) -> AbelianElement {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, k: i64, x: &AbelianElement) -> AbelianElement {
        AbelianElement {
            coords: x
                .coords
                .iter()
                .zip(&self.factors)
                .map(|(a, d)| ((*a as i128 * k as i128).rem_euclid(*d as i128)) as u64)
                .collect(),
        }
    }

    pub fn element_order(&self, x: &AbelianElement) -> u64 {
        x.coords
            .iter()
            .zip(&self.factors)
            .map(|(a, d)| d / a.gcd(d))
            .fold(1, |acc, o| acc.lcm(&o))
    }

    /// Mixed-radix index of an element, in `0..order()`.
    pub fn index_of(&self, x: &AbelianElement) -> usize {
        let mut idx = 0usize;
        for (c, d) in x.coords.iter().zip(&self.factors) {
            idx = idx * (*d as usize) + *c as usize;
        }
        idx
    }

    pub fn element_at(&self, mut idx: usize) -> AbelianElement {
        let mut coords = vec![0u64; self.rank()];
        for i in (0..self.rank()).rev() {
            let d = self.factors[i] as usize;
            coords[i] = (idx % d) as u64;
            idx /= d;
        }
        AbelianElement { coords }
    }

    /// All elements in index order. Intended for small groups.
    pub fn elements(&self) -> impl Iterator<Item = AbelianElement> + '_ {
        (0..self.order() as usize).map(move |i| self.element_at(i))
    }

    /// `A[m] = { x : m x = 0 }`.
    pub fn torsion_subgroup(&self, m: u64) -> Result<Subgroup, AbelianError> {
        if m == 0 {
            return Err(AbelianError::ZeroTorsion);
        }
        let gens = (0..self.rank())
            .map(|i| {
                let d = self.factors[i];
                self.scale((d / d.gcd(&m)) as i64, &self.basis(i))
            })
            .collect();
        Subgroup::generated(self, gens)
    }

    /// The subgroup generated by all elements of order exactly `n`, or `None`
    /// when no such element exists (equivalently `n` does not divide the exponent).
    pub fn exact_order_subgroup(&self, n: u64) -> Option<Subgroup> {
        if n == 0 || self.exponent() % n != 0 {
            return None;
        }
        // Every element of order n lies in A[n]; walk A[n] in its own coordinates.
        let torsion = self.torsion_subgroup(n).expect("n > 0");
        let steps: Vec<u64> = self.factors.iter().map(|d| d / d.gcd(&n)).collect();
        let sizes: Vec<u64> = self.factors.iter().map(|d| d.gcd(&n)).collect();
        let mut gens = Vec::new();
        let total: u64 = sizes.iter().product();
        for mut idx in 0..total {
            let mut coords = vec![0u64; self.rank()];
            for i in (0..self.rank()).rev() {
                coords[i] = (idx % sizes[i]) * steps[i];
                idx /= sizes[i];
            }
            let x = AbelianElement { coords };
            if self.element_order(&x) == n {
                gens.push(x);
            }
        }
        debug_assert!(!gens.is_empty());
        let sub = Subgroup::generated(self, gens).expect("generators reduced");
        debug_assert!(sub.is_subgroup_of(&torsion));
        Some(sub)
    }
}

/// A group endomorphism of an [`AbelianGroup`], stored as the images of the
/// standard generators (row `i` is the image of `e_i`).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Endomorphism {
    group: AbelianGroup,
    images: Vec<AbelianElement>,
}

impl fmt::Debug for Endomorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.images.iter()).finish()
    }
}

impl Endomorphism {
    pub fn identity(group: &AbelianGroup) -> Self {
        Endomorphism { group: group.clone(), images: (0..group.rank()).map(|i| group.basis(i)).collect() }
    }

    pub fn zero(group: &AbelianGroup) -> Self {
        Endomorphism { group: group.clone(), images: vec![group.zero(); group.rank()] }
    }

    pub fn scalar(group: &AbelianGroup, k: i64) -> Self {
        let id = Self::identity(group);
        Endomorphism { group: group.clone(), images: id.images.iter().map(|x| group.scale(k, x)).collect() }
    }

    /// Builds from an integer matrix whose row `i` is the image of `e_i`.
    pub fn from_matrix(group: &AbelianGroup, rows: &[Vec<i64>]) -> Result<Self, AbelianError> {
        let r = group.rank();
        if rows.len() != r || rows.iter().any(|row| row.len() != r) {
            return Err(AbelianError::BadMatrixShape {
                rows: rows.len(),
                cols: rows.first().map_or(0, Vec::len),
                rank: r,
            });
        }
        let images: Vec<AbelianElement> = rows.iter().map(|row| group.reduce(row)).collect();
        for (i, img) in images.iter().enumerate() {
            let d = group.factors[i];
            if group.scale(d as i64, img) != group.zero() {
                return Err(AbelianError::NotWellDefined { row: i, factor: d });
            }
        }
        Ok(Endomorphism { group: group.clone(), images })
    }

    pub fn group(&self) -> &AbelianGroup {
        &self.group
    }

    pub fn images(&self) -> &[AbelianElement] {
        &self.images
    }

    pub fn matrix(&self) -> Vec<Vec<i64>> {
        self.images.iter().map(|x| x.coords.iter().map(|&c| c as i64).collect()).collect()
    }

    pub fn apply(&self, x: &AbelianElement) -> AbelianElement {
        let g = &self.group;
        let mut acc = vec![0u128; g.rank()];
        for (xi, img) in x.coords.iter().zip(&self.images) {
            if *xi == 0 {
                continue;
            }
            for (j, c) in img.coords.iter().enumerate() {
                acc[j] = (acc[j] + *xi as u128 * *c as u128) % g.factors[j] as u128;
            }
        }
        AbelianElement { coords: acc.into_iter().map(|c| c as u64).collect() }
    }

    /// `self` after `first`: `x -> self(first(x))`.
    pub fn after(&self, first: &Endomorphism) -> Endomorphism {
        Endomorphism { group: self.group.clone(), images: first.images.iter().map(|x| self.apply(x)).collect() }
    }

    pub fn add(&self, other: &Endomorphism) -> Endomorphism {
        Endomorphism {
            group: self.group.clone(),
            images: self.images.iter().zip(&other.images).map(|(a, b)| self.group.add(a, b)).collect(),
        }
    }

    pub fn sub(&self, other: &Endomorphism) -> Endomorphism {
        Endomorphism {
            group: self.group.clone(),
            images: self.images.iter().zip(&other.images).map(|(a, b)| self.group.sub(a, b)).collect(),
        }
    }

    pub fn pow(&self, k: u64) -> Endomorphism {
        let mut acc = Endomorphism::identity(&self.group);
        for _ in 0..k {
            acc = self.after(&acc);
        }
        acc
    }

    /// `1 + phi + ... + phi^(k-1)`.
    pub fn norm(&self, k: u64) -> Endomorphism {
        let mut acc = Endomorphism::zero(&self.group);
        let mut power = Endomorphism::identity(&self.group);
        for _ in 0..k {
            acc = acc.add(&power);
            power = self.after(&power);
        }
        acc
    }

    pub fn is_identity(&self) -> bool {
        *self == Endomorphism::identity(&self.group)
    }

    pub fn kernel(&self) -> Subgroup {
        Subgroup::kernel_of(self)
    }

    pub fn image(&self) -> Subgroup {
        Subgroup::generated(&self.group, self.images.clone()).expect("images reduced")
    }

    pub fn is_automorphism(&self) -> bool {
        self.image().order() == self.group.order()
    }

    /// Some `x` with `self(x) = target`, if any.
    pub fn preimage(&self, target: &AbelianElement) -> Option<AbelianElement> {
        let g = &self.group;
        let r = g.rank();
        let mut sys = CongruenceSystem::new(r);
        for j in 0..r {
            let coeffs = (0..r).map(|i| self.images[i].coords[j] as i128).collect();
            sys.push(coeffs, target.coords[j] as i128, g.factors[j]);
        }
        let sol = sys.solve()?;
        let x = g.reduce(&sol.particular);
        debug_assert_eq!(&self.apply(&x), target);
        Some(x)
    }
}
