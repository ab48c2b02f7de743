//! Exact principal densities of an extension `1 -> A -> E -> G -> 1`.
//!
//! For a class `C` of `G` with common order `d`, the set `C_m` consists of
//! the `sigma` in `E` lying over `C` with `sigma^(d m) = 1`, and the density is
//! `|C_m| / |E|`. Everything here is finite counting or linear algebra on `A`.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::Serialize;
use thiserror::Error;

use crate::abelian::{AbelianElement, AbelianGroup, Endomorphism, Subgroup};
use crate::arith::{divisors, factorize, mobius};
use crate::extension::{ConjugacyClass, ExtElement, Extension, Section};

pub type Rational = Ratio<u64>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DensityError {
    #[error("{0:?} is not a conjugacy class of the quotient group")]
    NotAClass(Vec<usize>),
    #[error("the principal order bound m must be positive")]
    ZeroM,
    #[error("the automorphism does not have order dividing {0}")]
    OrderMismatch(u64),
    #[error("formula inapplicable: {0}")]
    FormulaInapplicable(String),
    #[error("inconsistent density table: {0}")]
    InconsistentTable(String),
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// `|C_m| / |E|` together with `|C_m|`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DensityValue {
    pub value: Rational,
    pub witness_count: u64,
}

fn check_class(e: &Extension, class: &ConjugacyClass) -> Result<(), DensityError> {
    let g = e.quotient();
    let valid = class.members.first().is_some_and(|&rep| rep < g.order() && g.class_of(rep).members == class.members);
    if valid {
        Ok(())
    } else {
        Err(DensityError::NotAClass(class.members.clone()))
    }
}

/// Elements over `class` with their orders.
fn fiber_orders<'a>(e: &'a Extension, class: &'a ConjugacyClass) -> impl Iterator<Item = (ExtElement, u64)> + 'a {
    class.members.iter().flat_map(move |&g| e.fiber(g)).map(move |x| {
        let o = e.element_order(&x);
        (x, o)
    })
}

pub fn mu(e: &Extension, class: &ConjugacyClass, m: u64) -> Result<DensityValue, DensityError> {
    check_class(e, class)?;
    if m == 0 {
        return Err(DensityError::ZeroM);
    }
    let bound = class.common_order * m;
    let id = e.identity();
    let count = class
        .members
        .iter()
        .flat_map(|&g| e.fiber(g))
        .filter(|x| e.pow(x, bound) == id)
        .count() as u64;
    Ok(DensityValue { value: Rational::new(count, e.order()), witness_count: count })
}

/// Density of elements over `class` of principal order exactly `m`.
pub fn theta(e: &Extension, class: &ConjugacyClass, m: u64) -> Result<Rational, DensityError> {
    check_class(e, class)?;
    if m == 0 {
        return Err(DensityError::ZeroM);
    }
    let target = class.common_order * m;
    let direct = fiber_orders(e, class).filter(|(_, o)| *o == target).count() as i64;

    let mut inverted = 0i64;
    for n in divisors(m) {
        let sign = mobius(m / n);
        if sign != 0 {
            inverted += sign * mu(e, class, n)?.witness_count as i64;
        }
    }
    if inverted != direct {
        return Err(DensityError::Internal(format!(
            "theta by counting ({direct}) disagrees with Mobius inversion ({inverted}) at m = {m}"
        )));
    }
    Ok(Rational::new(direct as u64, e.order()))
}

/// The solution set `{x in A : (x sigma)^(d m) = 1}` of the norm map.
///
/// Writing `sigma = (s, g)` and `k = d m`, `(x sigma)^k = N(x) + sigma^k` with
/// `N = 1 + g + ... + g^(k-1)`, so the set is a coset of `ker N`, or empty.
/// It is a subgroup exactly when `sigma^k = 1`.
#[derive(Clone, Debug)]
pub struct NormKernel {
    pub norm: Endomorphism,
    pub kernel: Subgroup,
    pub offset: Option<AbelianElement>,
}

impl NormKernel {
    pub fn len(&self) -> u64 {
        if self.offset.is_some() {
            self.kernel.order()
        } else {
            0
        }
    }

    pub fn is_empty(&self) -> bool {
        self.offset.is_none()
    }

    /// True when the solution set is a subgroup, i.e. `sigma^(d m) = 1`.
    pub fn is_subgroup(&self) -> bool {
        self.offset.as_ref().is_some_and(|o| self.kernel.contains(o))
    }

    pub fn contains(&self, x: &AbelianElement) -> bool {
        self.offset.as_ref().is_some_and(|o| {
            let a = self.kernel.ambient();
            self.kernel.contains(&a.sub(x, o))
        })
    }
}

pub fn norm_map_kernel(e: &Extension, sigma: &ExtElement, m: u64) -> Result<NormKernel, DensityError> {
    if m == 0 {
        return Err(DensityError::ZeroM);
    }
    e.check(sigma).map_err(|err| DensityError::Internal(err.to_string()))?;
    let a = e.kernel();
    let d = e.quotient().element_order(sigma.quotient);
    let k = d * m;
    let norm = e.action().of(sigma.quotient).norm(k);
    let kernel = norm.kernel();
    let power = e.pow(sigma, k);
    debug_assert_eq!(power.quotient, 0);
    let offset = norm.preimage(&a.neg(&power.kernel));
    Ok(NormKernel { norm, kernel, offset })
}

/// `|H^1(<g>, A)| = |ker N| / |im(phi - 1)|` for `phi` of order dividing `g_order`.
pub fn tate_h1(g_order: u64, a: &AbelianGroup, phi: &Endomorphism) -> Result<u64, DensityError> {
    if g_order == 0 || phi.group() != a {
        return Err(DensityError::OrderMismatch(g_order));
    }
    if !phi.pow(g_order).is_identity() {
        return Err(DensityError::OrderMismatch(g_order));
    }
    let ker = phi.norm(g_order).kernel();
    let augmentation = phi.sub(&Endomorphism::identity(a)).image();
    if !augmentation.is_subgroup_of(&ker) {
        return Err(DensityError::Internal("im(phi - 1) is not inside ker N".into()));
    }
    Ok(ker.order() / augmentation.order())
}

/// `|E_g| / (|[E_g, E_g]| d)`, the degree of the genus field over `K`.
pub fn genus_degree(e: &Extension, g: usize) -> u64 {
    let sub = e.subextension(g);
    let commutator = sub.realize().commutator_subgroup().len() as u64;
    let d = e.quotient().element_order(g);
    sub.order() / (commutator * d)
}

/// Why a density is positive: a divisor `i` of `m` and an element `g` of the
/// class such that `E_g / A[i] -> <g>` splits (with `A[1] = 0`). The section
/// is indexed by powers of `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PositivityCertificate {
    pub divisor: u64,
    pub element: usize,
    pub section: Section,
}

pub fn positivity(e: &Extension, class: &ConjugacyClass, m: u64) -> Result<Option<PositivityCertificate>, DensityError> {
    check_class(e, class)?;
    if m == 0 {
        return Err(DensityError::ZeroM);
    }
    let a = e.kernel();
    for i in divisors(m) {
        let torsion = if i == 1 {
            Subgroup::trivial(a)
        } else {
            match a.exact_order_subgroup(i) {
                Some(s) => s,
                None => continue,
            }
        };
        for &g in &class.members {
            let quotient = e
                .subextension(g)
                .quotient_extension(&torsion)
                .map_err(|err| DensityError::Internal(format!("torsion subgroup not stable: {err}")))?;
            if let Some(section) = quotient.splitting() {
                return Ok(Some(PositivityCertificate { divisor: i, element: g, section }));
            }
        }
    }
    Ok(None)
}

/// The minimal element of `C_1`, if any.
fn minimal_order_lift(e: &Extension, class: &ConjugacyClass) -> Option<ExtElement> {
    let id = e.identity();
    let mut best: Option<(usize, ExtElement)> = None;
    for x in class.members.iter().flat_map(|&g| e.fiber(g)) {
        if e.pow(&x, class.common_order) == id {
            let idx = e.index_of(&x);
            if best.as_ref().is_none_or(|(b, _)| idx < *b) {
                best = Some((idx, x));
            }
        }
    }
    best.map(|(_, x)| x)
}

/// The ingredients of the closed density formula for one class.
#[derive(Clone, Debug)]
pub struct DensityFormula {
    /// The minimal element of `C_1`.
    pub sigma: ExtElement,
    pub class_size: u64,
    pub quotient_order: u64,
    pub tate_h1: u64,
    pub genus_degree: u64,
    /// `A / ker N_{sigma,1}`.
    pub norm_cokernel: AbelianGroup,
}

impl DensityFormula {
    /// Requires the density at `m = 1` to be positive.
    pub fn new(e: &Extension, class: &ConjugacyClass) -> Result<Self, DensityError> {
        check_class(e, class)?;
        let sigma = minimal_order_lift(e, class).ok_or_else(|| {
            DensityError::FormulaInapplicable(
                "no element of order d_G(C) lies over the class, so the density at m = 1 vanishes".into(),
            )
        })?;
        let g = sigma.quotient;
        let tate_h1 = tate_h1(class.common_order, e.kernel(), e.action().of(g))?;
        let genus_degree = genus_degree(e, g);
        let nk = norm_map_kernel(e, &sigma, 1)?;
        if !nk.is_subgroup() {
            return Err(DensityError::Internal("norm kernel of an element of C_1 is not a subgroup".into()));
        }
        Ok(DensityFormula {
            sigma,
            class_size: class.members.len() as u64,
            quotient_order: e.quotient().order() as u64,
            tate_h1,
            genus_degree,
            norm_cokernel: nk.kernel.quotient().clone(),
        })
    }

    /// `(|C|/|G|) |H^1(<g>, A)| / [K_F : K]`.
    pub fn mu1(&self) -> Rational {
        Rational::new(self.class_size * self.tate_h1, self.quotient_order * self.genus_degree)
    }

    /// `mu1 * |(A / ker N_{sigma,1})[m]|`.
    pub fn mu(&self, m: u64) -> Result<Rational, DensityError> {
        let torsion = self.norm_cokernel.torsion_subgroup(m).map_err(|_| DensityError::ZeroM)?.order();
        Ok(self.mu1() * Rational::from_integer(torsion))
    }
}

pub fn formula_mu1(e: &Extension, class: &ConjugacyClass) -> Result<Rational, DensityError> {
    Ok(DensityFormula::new(e, class)?.mu1())
}

pub fn formula_mu(e: &Extension, class: &ConjugacyClass, m: u64) -> Result<Rational, DensityError> {
    if m == 0 {
        return Err(DensityError::ZeroM);
    }
    DensityFormula::new(e, class)?.mu(m)
}

/// Recovers `A` from the identity-class densities `m -> mu(E, {id}, m)`.
///
/// `|A[m]| = mu^m / mu^1` and `h = |A| = 1 / (|G| mu^1)`; for each prime `p | h`
/// the table must contain `p, p^2, ...` up to the power at which `|A[p^r]|`
/// reaches the full `p`-part of `h`.
pub fn class_group_from_densities(table: &BTreeMap<u64, Rational>, quotient_order: u64) -> Result<AbelianGroup, DensityError> {
    let bad = |msg: String| DensityError::InconsistentTable(msg);
    let base = *table.get(&1).ok_or_else(|| bad("missing entry for m = 1".into()))?;
    if base == Rational::from_integer(0) || quotient_order == 0 {
        return Err(bad("the m = 1 density must be positive".into()));
    }
    let h = (Rational::from_integer(1) / (base * Rational::from_integer(quotient_order)))
        .to_integer_checked()
        .ok_or_else(|| bad(format!("1 / (|G| mu^1) = 1 / ({quotient_order} * {base}) is not an integer")))?;
    let torsion = |q: u64| -> Result<u64, DensityError> {
        let v = *table.get(&q).ok_or_else(|| bad(format!("missing entry for m = {q}")))?;
        (v / base).to_integer_checked().ok_or_else(|| bad(format!("mu^{q} / mu^1 is not an integer")))
    };

    let mut cyclic_orders = Vec::new();
    for (p, e) in factorize(h) {
        let full = p.pow(e);
        let mut sizes = vec![1u64];
        let mut q = 1u64;
        while *sizes.last().unwrap() < full {
            q *= p;
            if sizes.len() > e as usize {
                return Err(bad(format!("p-torsion sizes for p = {p} never reach {full}")));
            }
            let s = torsion(q)?;
            let prev = *sizes.last().unwrap();
            if s < prev || s % prev != 0 || full % s != 0 {
                return Err(bad(format!("|A[{q}]| = {s} is inconsistent with |A[{}]| = {prev}", q / p)));
            }
            sizes.push(s);
        }
        // n_r = number of cyclic factors of order divisible by p^r
        let ranks: Vec<u32> = sizes.windows(2).map(|w| exact_log(w[1] / w[0], p)).collect::<Result<_, _>>().map_err(bad)?;
        if ranks.windows(2).any(|w| w[1] > w[0]) {
            return Err(bad(format!("p-ranks for p = {p} are not monotone: {ranks:?}")));
        }
        for (r, &n_r) in ranks.iter().enumerate() {
            let next = ranks.get(r + 1).copied().unwrap_or(0);
            for _ in 0..n_r - next {
                cyclic_orders.push(p.pow(r as u32 + 1));
            }
        }
    }
    let group = AbelianGroup::from_cyclic_orders(&cyclic_orders);
    if group.order() != h {
        return Err(bad(format!("recovered group of order {} but h = {h}", group.order())));
    }
    Ok(group)
}

fn exact_log(x: u64, p: u64) -> Result<u32, String> {
    let mut k = 0;
    let mut y = x;
    while y % p == 0 && y > 1 {
        y /= p;
        k += 1;
    }
    if y == 1 {
        Ok(k)
    } else {
        Err(format!("{x} is not a power of {p}"))
    }
}

trait ToIntegerChecked {
    fn to_integer_checked(&self) -> Option<u64>;
}

impl ToIntegerChecked for Rational {
    fn to_integer_checked(&self) -> Option<u64> {
        self.is_integer().then(|| self.to_integer())
    }
}

/// The identity-class densities at every divisor of `|A|`.
pub fn identity_density_table(e: &Extension) -> BTreeMap<u64, Rational> {
    let id_class = e.quotient().class_of(0);
    divisors(e.kernel().order())
        .into_iter()
        .map(|m| (m, mu(e, &id_class, m).expect("identity class is valid").value))
        .collect()
}

/// One line of a density report.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DensityReport {
    pub class_representative: usize,
    pub m: u64,
    pub numerator: u64,
    pub denominator: u64,
    pub positivity: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<PositivityCertificate>,
}

pub fn density_report(e: &Extension, class: &ConjugacyClass, m: u64) -> Result<DensityReport, DensityError> {
    let value = mu(e, class, m)?;
    let certificate = positivity(e, class, m)?;
    if certificate.is_some() != (value.witness_count > 0) {
        return Err(DensityError::Internal(format!(
            "splitting criterion disagrees with counting for class {} at m = {m}",
            class.representative
        )));
    }
    Ok(DensityReport {
        class_representative: class.representative,
        m,
        numerator: *value.value.numer(),
        denominator: *value.value.denom(),
        positivity: certificate.is_some(),
        certificate,
    })
}

/// True when every class of `G` has positive density at `m = 1`.
pub fn all_classes_positive(e: &Extension) -> bool {
    e.quotient()
        .conjugacy_classes()
        .iter()
        .all(|c| positivity(e, c, 1).expect("classes of the quotient are valid").is_some())
}

/// Nonsplit extensions from the synthetic corpus in which every class has
/// positive density at `m = 1`. At most `budget` candidates are examined.
pub fn find_remark_examples(max_kernel: u64, max_quotient: usize, budget: usize) -> Vec<Extension> {
    let candidates = crate::corpus::synthetic_corpus(&crate::corpus::CorpusOptions {
        max_extension_order: max_kernel * max_quotient as u64,
        max_kernel_order: max_kernel,
        max_quotient_order: max_quotient,
        ..Default::default()
    });
    search_remark_examples(candidates.into_iter().map(|c| c.extension).take(budget))
}

pub fn search_remark_examples(candidates: impl IntoIterator<Item = Extension>) -> Vec<Extension> {
    candidates.into_iter().filter(|e| !e.is_split() && all_classes_positive(e)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{FiniteGroup, GAction, TwoCocycle};

    fn z4_over_z2() -> Extension {
        let g = FiniteGroup::cyclic(2);
        let a = AbelianGroup::cyclic(2);
        let action = GAction::trivial(&g, &a);
        let mut values = vec![a.zero(); 4];
        values[3] = a.element(vec![1]).unwrap();
        let cocycle = TwoCocycle::new(&g, &action, values).unwrap();
        Extension::new(g, action, cocycle).unwrap()
    }

    fn r(n: u64, d: u64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn trivial_kernel_recovers_chebotarev() {
        let g = FiniteGroup::symmetric(3);
        let e = Extension::direct_product(&AbelianGroup::trivial(), &g);
        for c in g.conjugacy_classes() {
            for m in 1..5 {
                assert_eq!(mu(&e, &c, m).unwrap().value, r(c.len() as u64, 6));
            }
            assert_eq!(theta(&e, &c, 1).unwrap(), r(c.len() as u64, 6));
            assert_eq!(theta(&e, &c, 2).unwrap(), r(0, 1));
            assert_eq!(formula_mu1(&e, &c).unwrap(), r(c.len() as u64, 6));
            assert_eq!(genus_degree(&e, c.representative), 1);
        }
    }

    #[test]
    fn z4_densities() {
        let e = z4_over_z2();
        let c = e.quotient().class_of(1);
        assert_eq!(mu(&e, &c, 1).unwrap().value, r(0, 1));
        assert_eq!(mu(&e, &c, 2).unwrap().value, r(1, 2));
        assert_eq!(theta(&e, &c, 1).unwrap(), r(0, 1));
        assert_eq!(theta(&e, &c, 2).unwrap(), r(1, 2));
        assert!(positivity(&e, &c, 1).unwrap().is_none());
        let cert = positivity(&e, &c, 2).unwrap().unwrap();
        assert_eq!(cert.divisor, 2);
        assert!(matches!(formula_mu1(&e, &c), Err(DensityError::FormulaInapplicable(_))));
    }

    #[test]
    fn norm_kernel_examples() {
        let e = z4_over_z2();
        let sigma = ExtElement { kernel: e.kernel().zero(), quotient: 1 };
        let nk = norm_map_kernel(&e, &sigma, 1).unwrap();
        assert!(nk.is_empty());
        assert_eq!(nk.len(), 0);
        let nk = norm_map_kernel(&e, &sigma, 2).unwrap();
        assert_eq!(nk.len(), 2);
        assert!(nk.is_subgroup());

        let a = AbelianGroup::new(vec![2, 6]).unwrap();
        let g = FiniteGroup::cyclic(3);
        let prod = Extension::direct_product(&a, &g);
        let nk = norm_map_kernel(&prod, &prod.identity(), 4).unwrap();
        assert!(nk.kernel.same_as(&a.torsion_subgroup(4).unwrap()));
        let sigma = ExtElement { kernel: a.zero(), quotient: 1 };
        let nk = norm_map_kernel(&prod, &sigma, 1).unwrap();
        assert!(nk.kernel.same_as(&a.torsion_subgroup(3).unwrap()));
        assert!(nk.is_subgroup());
    }

    #[test]
    fn tate_examples() {
        let z2 = AbelianGroup::cyclic(2);
        assert_eq!(tate_h1(1, &z2, &Endomorphism::identity(&z2)).unwrap(), 1);
        assert_eq!(tate_h1(2, &z2, &Endomorphism::identity(&z2)).unwrap(), 2);
        let z3 = AbelianGroup::cyclic(3);
        assert_eq!(tate_h1(2, &z3, &Endomorphism::scalar(&z3, -1)).unwrap(), 1);
        assert!(matches!(tate_h1(3, &z3, &Endomorphism::scalar(&z3, -1)), Err(DensityError::OrderMismatch(3))));
    }

    #[test]
    fn genus_examples() {
        let a = AbelianGroup::cyclic(2);
        let e = Extension::direct_product(&a, &FiniteGroup::cyclic(2));
        assert_eq!(genus_degree(&e, 1), 2);
        assert_eq!(genus_degree(&e, 0), 2);
        let c = e.quotient().class_of(1);
        assert_eq!(formula_mu1(&e, &c).unwrap(), r(1, 2));
        assert_eq!(mu(&e, &c, 1).unwrap().value, r(1, 2));
        let id = e.quotient().class_of(0);
        assert_eq!(formula_mu1(&e, &id).unwrap(), r(1, 4));
    }

    #[test]
    fn class_group_round_trips() {
        let g = FiniteGroup::cyclic(2);
        for factors in [vec![], vec![2], vec![2, 4], vec![3, 3, 9], vec![2, 12]] {
            let a = AbelianGroup::new(factors.clone()).unwrap();
            let e = Extension::direct_product(&a, &g);
            let table = identity_density_table(&e);
            assert_eq!(class_group_from_densities(&table, 2).unwrap(), a, "{factors:?}");
        }
        let e = Extension::direct_product(&AbelianGroup::cyclic(2), &g);
        let table = identity_density_table(&e);
        assert_eq!(table[&1], r(1, 4));
        assert_eq!(table[&2], r(1, 2));
    }

    #[test]
    fn class_group_rejects_bad_tables() {
        let mut table = BTreeMap::new();
        table.insert(1, r(1, 8));
        assert!(class_group_from_densities(&table, 2).is_err());
        table.insert(2, r(1, 4));
        table.insert(4, r(1, 8));
        assert!(class_group_from_densities(&table, 2).is_err());
        table.insert(4, r(1, 2));
        assert_eq!(class_group_from_densities(&table, 2).unwrap().invariant_factors(), &[4]);
        table.insert(1, r(1, 3));
        assert!(class_group_from_densities(&table, 2).is_err());
    }

    #[test]
    fn rejects_foreign_classes() {
        let e = z4_over_z2();
        let bogus = ConjugacyClass { representative: 0, members: vec![0, 1], common_order: 1 };
        assert!(matches!(mu(&e, &bogus, 1), Err(DensityError::NotAClass(_))));
        let c = e.quotient().class_of(1);
        assert!(matches!(mu(&e, &c, 0), Err(DensityError::ZeroM)));
    }

    #[test]
    fn remark_search_on_small_inputs() {
        assert!(search_remark_examples([z4_over_z2()]).is_empty());
        let split = Extension::direct_product(&AbelianGroup::cyclic(3), &FiniteGroup::symmetric(3));
        assert!(search_remark_examples([split]).is_empty());
    }
}
