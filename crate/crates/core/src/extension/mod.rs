//! Extensions `1 -> A -> E -> G -> 1` of a finite group by a finite abelian
//! group, stored as a `G`-module `A` together with a normalized 2-cocycle.

mod group;
mod split;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::abelian::{AbelianElement, AbelianError, AbelianGroup, Endomorphism, Subgroup};

pub use group::{ConjugacyClass, FiniteGroup};
pub use split::Section;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ExtensionError {
    #[error("bad group table: {0}")]
    BadTable(String),
    #[error(transparent)]
    Abelian(#[from] AbelianError),
    #[error("expected {expected} action matrices, got {got}")]
    WrongActionCount { expected: usize, got: usize },
    #[error("the action of element {element} is not an automorphism")]
    NotAutomorphism { element: usize },
    #[error("the action is not a homomorphism at ({g}, {h})")]
    NotHomomorphism { g: usize, h: usize },
    #[error("cocycle table must have {expected} entries, got {got}")]
    CocycleShape { expected: usize, got: usize },
    #[error("cocycle is not normalized at ({g}, {h})")]
    NotNormalized { g: usize, h: usize },
    #[error("cocycle identity fails at ({g}, {h}, {k})")]
    CocycleIdentity { g: usize, h: usize, k: usize },
    #[error("malformed element: {0}")]
    MalformedElement(String),
    #[error("subgroup is not stable: {g} moves {s:?} outside it")]
    NotStable { g: usize, s: AbelianElement },
    #[error("subgroup lives in {found}, expected {expected}")]
    KernelMismatch { expected: String, found: String },
}

/// An action of a [`FiniteGroup`] on an [`AbelianGroup`] by automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GAction {
    module: AbelianGroup,
    maps: Vec<Endomorphism>,
}

impl GAction {
    pub fn trivial(group: &FiniteGroup, module: &AbelianGroup) -> Self {
        GAction { module: module.clone(), maps: vec![Endomorphism::identity(module); group.order()] }
    }

    /// Extends integer matrices given for `group.generators()` to the whole group.
    pub fn from_generators(
        group: &FiniteGroup,
        module: &AbelianGroup,
        matrices: &[Vec<Vec<i64>>],
    ) -> Result<Self, ExtensionError> {
        let gens = group.generators();
        if matrices.len() != gens.len() {
            return Err(ExtensionError::WrongActionCount { expected: gens.len(), got: matrices.len() });
        }
        let gen_maps = matrices
            .iter()
            .map(|m| Endomorphism::from_matrix(module, m))
            .collect::<Result<Vec<_>, _>>()?;
        let mut maps: Vec<Option<Endomorphism>> = vec![None; group.order()];
        maps[0] = Some(Endomorphism::identity(module));
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (&s, phi) in gens.iter().zip(&gen_maps) {
                let y = group.mul(x, s);
                if maps[y].is_none() {
                    maps[y] = Some(maps[x].as_ref().unwrap().after(phi));
                    queue.push_back(y);
                }
            }
        }
        let maps: Vec<Endomorphism> = maps
            .into_iter()
            .map(|m| m.ok_or_else(|| ExtensionError::BadTable("generators do not generate the group".into())))
            .collect::<Result<_, _>>()?;
        Self::from_maps(group, module, maps)
    }

    /// Validates one automorphism per group element.
    pub fn from_maps(group: &FiniteGroup, module: &AbelianGroup, maps: Vec<Endomorphism>) -> Result<Self, ExtensionError> {
        if maps.len() != group.order() {
            return Err(ExtensionError::WrongActionCount { expected: group.order(), got: maps.len() });
        }
        if !maps[0].is_identity() {
            return Err(ExtensionError::NotHomomorphism { g: 0, h: 0 });
        }
        for (element, m) in maps.iter().enumerate() {
            if m.group() != module || !m.is_automorphism() {
                return Err(ExtensionError::NotAutomorphism { element });
            }
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                if maps[group.mul(g, h)] != maps[g].after(&maps[h]) {
                    return Err(ExtensionError::NotHomomorphism { g, h });
                }
            }
        }
        Ok(GAction { module: module.clone(), maps })
    }

    pub fn module(&self) -> &AbelianGroup {
        &self.module
    }

    pub fn of(&self, g: usize) -> &Endomorphism {
        &self.maps[g]
    }

    pub fn apply(&self, g: usize, x: &AbelianElement) -> AbelianElement {
        self.maps[g].apply(x)
    }

    pub fn is_trivial(&self) -> bool {
        self.maps.iter().all(Endomorphism::is_identity)
    }
}

/// A normalized 2-cocycle, `values[g * |G| + h] = c(g, h)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TwoCocycle {
    order: usize,
    values: Vec<AbelianElement>,
}

impl TwoCocycle {
    pub fn zero(group: &FiniteGroup, module: &AbelianGroup) -> Self {
        TwoCocycle { order: group.order(), values: vec![module.zero(); group.order() * group.order()] }
    }

    pub fn new(group: &FiniteGroup, action: &GAction, values: Vec<AbelianElement>) -> Result<Self, ExtensionError> {
        let n = group.order();
        let a = action.module();
        if values.len() != n * n {
            return Err(ExtensionError::CocycleShape { expected: n * n, got: values.len() });
        }
        for v in &values {
            if !a.contains(v) {
                return Err(AbelianError::NotReduced { coords: v.coords().to_vec(), group: a.to_string() }.into());
            }
        }
        let c = |g: usize, h: usize| &values[g * n + h];
        for g in 0..n {
            if *c(0, g) != a.zero() {
                return Err(ExtensionError::NotNormalized { g: 0, h: g });
            }
            if *c(g, 0) != a.zero() {
                return Err(ExtensionError::NotNormalized { g, h: 0 });
            }
        }
        for g in 1..n {
            for h in 1..n {
                let gh = group.mul(g, h);
                for k in 1..n {
                    let lhs = a.add(&action.apply(g, c(h, k)), c(g, group.mul(h, k)));
                    let rhs = a.add(c(gh, k), c(g, h));
                    if lhs != rhs {
                        return Err(ExtensionError::CocycleIdentity { g, h, k });
                    }
                }
            }
        }
        Ok(TwoCocycle { order: n, values })
    }

    pub fn value(&self, g: usize, h: usize) -> &AbelianElement {
        &self.values[g * self.order + h]
    }

    pub fn values(&self) -> &[AbelianElement] {
        &self.values
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().all(|v| v.coords().iter().all(|&x| x == 0))
    }
}

/// An element `(a, g)` of an extension.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtElement {
    pub kernel: AbelianElement,
    pub quotient: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Extension {
    kernel: AbelianGroup,
    quotient: FiniteGroup,
    action: GAction,
    cocycle: TwoCocycle,
}

impl Extension {
    pub fn new(quotient: FiniteGroup, action: GAction, cocycle: TwoCocycle) -> Result<Self, ExtensionError> {
        if action.maps.len() != quotient.order() {
            return Err(ExtensionError::WrongActionCount { expected: quotient.order(), got: action.maps.len() });
        }
        if cocycle.order != quotient.order() {
            return Err(ExtensionError::CocycleShape {
                expected: quotient.order() * quotient.order(),
                got: cocycle.values.len(),
            });
        }
        Ok(Extension { kernel: action.module.clone(), quotient, action, cocycle })
    }

    /// `A x G` with trivial action.
    pub fn direct_product(kernel: &AbelianGroup, quotient: &FiniteGroup) -> Self {
        let action = GAction::trivial(quotient, kernel);
        let cocycle = TwoCocycle::zero(quotient, kernel);
        Extension { kernel: kernel.clone(), quotient: quotient.clone(), action, cocycle }
    }

    pub fn kernel(&self) -> &AbelianGroup {
        &self.kernel
    }

    pub fn quotient(&self) -> &FiniteGroup {
        &self.quotient
    }

    pub fn action(&self) -> &GAction {
        &self.action
    }

    pub fn cocycle(&self) -> &TwoCocycle {
        &self.cocycle
    }

    pub fn order(&self) -> u64 {
        self.kernel.order() * self.quotient.order() as u64
    }

    pub fn identity(&self) -> ExtElement {
        ExtElement { kernel: self.kernel.zero(), quotient: 0 }
    }

    pub fn check(&self, x: &ExtElement) -> Result<(), ExtensionError> {
        if !self.kernel.contains(&x.kernel) {
            return Err(ExtensionError::MalformedElement(format!("{:?} is not an element of {}", x.kernel, self.kernel)));
        }
        if x.quotient >= self.quotient.order() {
            return Err(ExtensionError::MalformedElement(format!(
                "{} is not an element of a group of order {}",
                x.quotient,
                self.quotient.order()
            )));
        }
        Ok(())
    }

    /// `(a,g)(b,h) = (a + g.b + c(g,h), gh)`.
    pub fn multiply(&self, x: &ExtElement, y: &ExtElement) -> ExtElement {
        let a = &self.kernel;
        let twisted = self.action.apply(x.quotient, &y.kernel);
        let kernel = a.add(&a.add(&x.kernel, &twisted), self.cocycle.value(x.quotient, y.quotient));
        ExtElement { kernel, quotient: self.quotient.mul(x.quotient, y.quotient) }
    }

    pub fn try_multiply(&self, x: &ExtElement, y: &ExtElement) -> Result<ExtElement, ExtensionError> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.multiply(x, y))
    }

    pub fn inverse(&self, x: &ExtElement) -> ExtElement {
        let a = &self.kernel;
        let gi = self.quotient.inv(x.quotient);
        let t = a.add(&x.kernel, self.cocycle.value(x.quotient, gi));
        ExtElement { kernel: a.neg(&self.action.apply(gi, &t)), quotient: gi }
    }

    pub fn pow(&self, x: &ExtElement, mut k: u64) -> ExtElement {
        let mut acc = self.identity();
        let mut base = x.clone();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.multiply(&acc, &base);
            }
            base = self.multiply(&base, &base);
            k >>= 1;
        }
        acc
    }

    /// `d * ord(x^d)` where `d` is the order of `pi(x)` and `x^d` lies in `A`.
    pub fn element_order(&self, x: &ExtElement) -> u64 {
        let d = self.quotient.element_order(x.quotient);
        let y = self.pow(x, d);
        d * self.kernel.element_order(&y.kernel)
    }

    pub fn try_element_order(&self, x: &ExtElement) -> Result<u64, ExtensionError> {
        self.check(x)?;
        Ok(self.element_order(x))
    }

    pub fn project(&self, x: &ExtElement) -> usize {
        x.quotient
    }

    /// Index of `(a, g)` in the realized group: `index(a) * |G| + g`.
    pub fn index_of(&self, x: &ExtElement) -> usize {
        self.kernel.index_of(&x.kernel) * self.quotient.order() + x.quotient
    }

    pub fn element_at(&self, idx: usize) -> ExtElement {
        let n = self.quotient.order();
        ExtElement { kernel: self.kernel.element_at(idx / n), quotient: idx % n }
    }

    pub fn elements(&self) -> impl Iterator<Item = ExtElement> + '_ {
        (0..self.order() as usize).map(|i| self.element_at(i))
    }

    /// `pi^{-1}(g)`.
    pub fn fiber(&self, g: usize) -> impl Iterator<Item = ExtElement> + '_ {
        self.kernel.elements().map(move |a| ExtElement { kernel: a, quotient: g })
    }

    /// The extension as a plain [`FiniteGroup`] in the [`Extension::index_of`] numbering.
    pub fn realize(&self) -> FiniteGroup {
        let n = self.order() as usize;
        let elems: Vec<ExtElement> = self.elements().collect();
        let mut table = vec![0; n * n];
        for (i, x) in elems.iter().enumerate() {
            for (j, y) in elems.iter().enumerate() {
                table[i * n + j] = self.index_of(&self.multiply(x, y));
            }
        }
        FiniteGroup::from_flat_unchecked(n, table)
    }

    pub fn conjugacy_classes(&self) -> Vec<ConjugacyClass> {
        self.realize().conjugacy_classes()
    }

    /// `E_g = pi^{-1}(<g>)` as an extension of the cyclic group `<g>`, whose
    /// element `i` corresponds to `g^i`.
    pub fn subextension(&self, g: usize) -> Extension {
        let powers = self.quotient.cyclic_subgroup(g);
        let d = powers.len();
        let quotient = FiniteGroup::cyclic(d);
        let maps = powers.iter().map(|&x| self.action.of(x).clone()).collect();
        let action = GAction { module: self.kernel.clone(), maps };
        let mut values = Vec::with_capacity(d * d);
        for &x in &powers {
            for &y in &powers {
                values.push(self.cocycle.value(x, y).clone());
            }
        }
        let cocycle = TwoCocycle { order: d, values };
        Extension { kernel: self.kernel.clone(), quotient, action, cocycle }
    }

    /// The extension of `G` by `A/S`; `S` must be stable under the action.
    pub fn quotient_extension(&self, s: &Subgroup) -> Result<Extension, ExtensionError> {
        if s.ambient() != &self.kernel {
            return Err(ExtensionError::KernelMismatch { expected: self.kernel.to_string(), found: s.ambient().to_string() });
        }
        for g in 0..self.quotient.order() {
            for x in s.generators() {
                if !s.contains(&self.action.apply(g, x)) {
                    return Err(ExtensionError::NotStable { g, s: x.clone() });
                }
            }
        }
        let module = s.quotient().clone();
        let maps = self.action.maps.iter().map(|m| s.induced(m)).collect();
        let action = GAction { module: module.clone(), maps };
        let values = self.cocycle.values.iter().map(|v| s.project(v)).collect();
        let cocycle = TwoCocycle { order: self.cocycle.order, values };
        Ok(Extension { kernel: module, quotient: self.quotient.clone(), action, cocycle })
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// `Z/4` as an extension of `Z/2` by `Z/2`.
    pub(crate) fn z4_over_z2() -> Extension {
        let g = FiniteGroup::cyclic(2);
        let a = AbelianGroup::cyclic(2);
        let action = GAction::trivial(&g, &a);
        let one = a.element(vec![1]).unwrap();
        let zero = a.zero();
        let cocycle = TwoCocycle::new(&g, &action, vec![zero.clone(), zero.clone(), zero, one]).unwrap();
        Extension::new(g, action, cocycle).unwrap()
    }

    #[test]
    fn direct_product_multiplication() {
        let a = AbelianGroup::new(vec![3]).unwrap();
        let e = Extension::direct_product(&a, &FiniteGroup::symmetric(3));
        let x = ExtElement { kernel: a.element(vec![1]).unwrap(), quotient: 1 };
        let y = ExtElement { kernel: a.element(vec![2]).unwrap(), quotient: 2 };
        let z = e.multiply(&x, &y);
        assert_eq!(z.kernel, a.zero());
        assert_eq!(z.quotient, e.quotient().mul(1, 2));
        assert_eq!(e.element_order(&e.identity()), 1);
    }

    #[test]
    fn z4_orders() {
        let e = z4_over_z2();
        let x = ExtElement { kernel: e.kernel().zero(), quotient: 1 };
        assert_eq!(e.element_order(&x), 4);
        assert_eq!(e.conjugacy_classes().len(), 4);
        assert!(e.realize().is_cyclic());
        for y in e.elements() {
            assert_eq!(e.multiply(&y, &e.inverse(&y)), e.identity());
            assert_eq!(e.order() % e.element_order(&y), 0);
        }
    }

    #[test]
    fn malformed_elements_rejected() {
        let e = z4_over_z2();
        let bad = ExtElement { kernel: AbelianGroup::cyclic(3).element(vec![2]).unwrap(), quotient: 0 };
        assert!(e.try_multiply(&bad, &e.identity()).is_err());
        let bad = ExtElement { kernel: e.kernel().zero(), quotient: 5 };
        assert!(e.try_element_order(&bad).is_err());
    }

    #[test]
    fn rejects_bad_cocycles() {
        let g = FiniteGroup::cyclic(3);
        let a = AbelianGroup::cyclic(3);
        let action = GAction::trivial(&g, &a);
        let one = a.element(vec![1]).unwrap();
        let mut values = vec![a.zero(); 9];
        values[1 * 3 + 1] = one.clone();
        assert!(matches!(TwoCocycle::new(&g, &action, values), Err(ExtensionError::CocycleIdentity { .. })));
        let mut values = vec![a.zero(); 9];
        values[1] = one;
        assert!(matches!(TwoCocycle::new(&g, &action, values), Err(ExtensionError::NotNormalized { .. })));
    }

    #[test]
    fn rejects_bad_actions() {
        let g = FiniteGroup::cyclic(2);
        let a = AbelianGroup::cyclic(4);
        assert!(matches!(GAction::from_generators(&g, &a, &[vec![vec![2]]]), Err(ExtensionError::NotAutomorphism { .. })));
        // an order-4 automorphism cannot represent an involution
        let a5 = AbelianGroup::cyclic(5);
        assert!(matches!(GAction::from_generators(&g, &a5, &[vec![vec![2]]]), Err(ExtensionError::NotHomomorphism { .. })));
        assert!(GAction::from_generators(&g, &a5, &[vec![vec![4]]]).is_ok());
    }

    #[test]
    fn subextension_sizes() {
        let e = z4_over_z2();
        assert_eq!(e.subextension(0).order(), 2);
        assert_eq!(e.subextension(1), e);
        let v4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        let a = AbelianGroup::new(vec![2, 6]).unwrap();
        let big = Extension::direct_product(&a, &v4);
        for g in 1..4 {
            assert_eq!(big.subextension(g).order(), 2 * a.order());
        }
    }

    #[test]
    fn quotient_extensions() {
        let e = z4_over_z2();
        let trivial = Subgroup::trivial(e.kernel());
        let same = e.quotient_extension(&trivial).unwrap();
        assert_eq!(same.order(), e.order());
        assert!(!same.is_split());
        let whole = Subgroup::whole(e.kernel());
        let q = e.quotient_extension(&whole).unwrap();
        assert!(q.kernel().is_trivial());
        assert!(q.is_split());
        let two_torsion = e.kernel().exact_order_subgroup(2).unwrap();
        let q = e.quotient_extension(&two_torsion).unwrap();
        assert_eq!(q.order(), 2);
        assert!(q.is_split());
    }

    #[test]
    fn unstable_subgroup_gives_witness() {
        // S3 acting on Z/2 x Z/2 by permuting the three nonzero elements.
        let g = FiniteGroup::symmetric(3);
        let a = AbelianGroup::new(vec![2, 2]).unwrap();
        // generators: a swap and a 3-cycle
        let swap = vec![vec![0, 1], vec![1, 0]];
        let cycle = vec![vec![0, 1], vec![1, 1]];
        let action = GAction::from_generators(&g, &a, &[swap, cycle]).unwrap();
        let e = Extension::new(g.clone(), action.clone(), TwoCocycle::zero(&g, &a)).unwrap();
        let s = Subgroup::generated(&a, vec![a.element(vec![1, 0]).unwrap()]).unwrap();
        match e.quotient_extension(&s) {
            Err(ExtensionError::NotStable { g, s: x }) => assert!(!s.contains(&action.apply(g, &x))),
            other => panic!("expected a stability failure, got {other:?}"),
        }
    }
}
