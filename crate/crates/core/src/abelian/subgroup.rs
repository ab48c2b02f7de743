use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

use super::{smith_normal_form, AbelianElement, AbelianError, AbelianGroup, Endomorphism, IntMatrix};

/// A subgroup `S` of an ambient [`AbelianGroup`] `A`, together with its own
/// invariant factors and the quotient `A/S` with an explicit projection.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Subgroup {
    ambient: AbelianGroup,
    generators: Vec<AbelianElement>,
    structure: AbelianGroup,
    quotient: AbelianGroup,
    // projection[i][j]: coefficient of ambient coordinate i in quotient coordinate j
    projection: Vec<Vec<u64>>,
    lifts: Vec<AbelianElement>,
}

impl Subgroup {
    /// Smallest subgroup containing `gens`.
    pub fn generated(ambient: &AbelianGroup, gens: Vec<AbelianElement>) -> Result<Subgroup, AbelianError> {
        for g in &gens {
            if !ambient.contains(g) {
                return Err(AbelianError::NotReduced { coords: g.coords.clone(), group: ambient.to_string() });
            }
        }
        let r = ambient.rank();
        let k = gens.len();
        let d = ambient.invariant_factors();

        // Quotient: Z^r / <d_i e_i, gens>.
        let mut rel: Vec<Vec<BigInt>> = Vec::with_capacity(r + k);
        for (i, &di) in d.iter().enumerate() {
            let mut row = vec![BigInt::zero(); r];
            row[i] = BigInt::from(di);
            rel.push(row);
        }
        for g in &gens {
            rel.push(g.coords.iter().map(|&c| BigInt::from(c)).collect());
        }
        let snf = smith_normal_form(&IntMatrix::from_rows(r, &rel));
        let diag = snf.diagonal();
        let mut qfactors = Vec::new();
        let mut projection = vec![Vec::new(); r];
        let mut lifts = Vec::new();
        for (j, s) in diag.iter().enumerate() {
            let s = s.to_u64().expect("quotient factor fits in u64");
            if s <= 1 {
                continue;
            }
            qfactors.push(s);
            let sb = BigInt::from(s);
            for (i, proj_row) in projection.iter_mut().enumerate() {
                proj_row.push(snf.v.get(i, j).mod_floor(&sb).to_u64().unwrap());
            }
            lifts.push(ambient.reduce_big(snf.v_inv.row(j)));
        }
        let quotient = AbelianGroup::new(qfactors).expect("smith diagonal is a divisibility chain");

        // Structure: Z^k / { y : y.G in diag(d) Z^r }.
        let structure = if k == 0 || r == 0 {
            AbelianGroup::trivial()
        } else {
            let mut m: Vec<Vec<BigInt>> = gens.iter().map(|g| g.coords.iter().map(|&c| BigInt::from(c)).collect()).collect();
            m.extend(rel[..r].iter().cloned());
            let f = smith_normal_form(&IntMatrix::from_rows(r, &m));
            let rank = f.rank();
            let kernel: Vec<Vec<BigInt>> = (rank..k + r).map(|i| f.u.row(i)[..k].to_vec()).collect();
            let kf = smith_normal_form(&IntMatrix::from_rows(k, &kernel));
            let factors = kf
                .diagonal()
                .iter()
                .map(|x| x.to_u64().expect("subgroup is finite"))
                .filter(|&x| x > 1)
                .collect();
            AbelianGroup::new(factors).expect("smith diagonal is a divisibility chain")
        };

        let sub = Subgroup { ambient: ambient.clone(), generators: gens, structure, quotient, projection, lifts };
        debug_assert_eq!(sub.structure.order() * sub.quotient.order(), ambient.order());
        Ok(sub)
    }

    pub fn trivial(ambient: &AbelianGroup) -> Subgroup {
        Subgroup::generated(ambient, Vec::new()).expect("empty generating set")
    }

    pub fn whole(ambient: &AbelianGroup) -> Subgroup {
        let gens = (0..ambient.rank()).map(|i| ambient.basis(i)).collect();
        Subgroup::generated(ambient, gens).expect("basis is reduced")
    }

    /// Kernel of an endomorphism.
    pub(super) fn kernel_of(phi: &Endomorphism) -> Subgroup {
        let a = phi.group();
        let r = a.rank();
        if r == 0 {
            return Subgroup::trivial(a);
        }
        let mut m: Vec<Vec<BigInt>> =
            phi.images().iter().map(|x| x.coords.iter().map(|&c| BigInt::from(c)).collect()).collect();
        for (i, &di) in a.invariant_factors().iter().enumerate() {
            let mut row = vec![BigInt::zero(); r];
            row[i] = BigInt::from(di);
            m.push(row);
        }
        let f = smith_normal_form(&IntMatrix::from_rows(r, &m));
        let rank = f.rank();
        let gens = (rank..2 * r).map(|i| a.reduce_big(&f.u.row(i)[..r])).collect();
        Subgroup::generated(a, gens).expect("reduced generators")
    }

    pub fn ambient(&self) -> &AbelianGroup {
        &self.ambient
    }

    pub fn generators(&self) -> &[AbelianElement] {
        &self.generators
    }

    /// Invariant factors of the subgroup itself.
    pub fn structure(&self) -> &AbelianGroup {
        &self.structure
    }

    pub fn order(&self) -> u64 {
        self.structure.order()
    }

    /// The quotient `A/S`.
    pub fn quotient(&self) -> &AbelianGroup {
        &self.quotient
    }

    pub fn project(&self, x: &AbelianElement) -> AbelianElement {
        let coords: Vec<i128> = (0..self.quotient.rank())
            .map(|j| {
                let s = self.quotient.invariant_factors()[j] as i128;
                x.coords.iter().zip(&self.projection).fold(0i128, |acc, (c, row)| (acc + *c as i128 * row[j] as i128) % s)
            })
            .collect();
        self.quotient.reduce(&coords)
    }

    /// A preimage in `A` of a quotient element.
    pub fn lift(&self, q: &AbelianElement) -> AbelianElement {
        let mut acc = self.ambient.zero();
        for (c, l) in q.coords.iter().zip(&self.lifts) {
            acc = self.ambient.add(&acc, &self.ambient.scale(*c as i64, l));
        }
        acc
    }

    pub fn contains(&self, x: &AbelianElement) -> bool {
        self.project(x) == self.quotient.zero()
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.generators.iter().all(|g| other.contains(g))
    }

    pub fn same_as(&self, other: &Subgroup) -> bool {
        self.order() == other.order() && self.is_subgroup_of(other)
    }

    /// Members of the subgroup. Intended for small ambient groups.
    pub fn elements(&self) -> Vec<AbelianElement> {
        self.ambient.elements().filter(|x| self.contains(x)).collect()
    }

    /// The endomorphism of `A/S` induced by `phi`; `S` must be `phi`-stable.
    pub fn induced(&self, phi: &Endomorphism) -> Endomorphism {
        let rows: Vec<Vec<i64>> = self
            .lifts
            .iter()
            .map(|l| self.project(&phi.apply(l)).coords.iter().map(|&c| c as i64).collect())
            .collect();
        Endomorphism::from_matrix(&self.quotient, &rows).expect("stable subgroup induces a well-defined map")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn cyclic_example() {
        let z4 = AbelianGroup::cyclic(4);
        let s = Subgroup::generated(&z4, vec![z4.element(vec![2]).unwrap()]).unwrap();
        assert_eq!(s.order(), 2);
        assert_eq!(s.quotient().invariant_factors(), &[2]);
    }

    #[test]
    fn klein_inside_z2_z4() {
        let a = AbelianGroup::new(vec![2, 4]).unwrap();
        let s = Subgroup::generated(&a, vec![a.element(vec![1, 0]).unwrap(), a.element(vec![0, 2]).unwrap()]).unwrap();
        assert_eq!(s.order(), 4);
        assert_eq!(s.structure().invariant_factors(), &[2, 2]);
        assert_eq!(s.quotient().order(), 2);
    }

    #[test]
    fn empty_generators() {
        let a = AbelianGroup::new(vec![3, 6]).unwrap();
        let s = Subgroup::generated(&a, vec![]).unwrap();
        assert_eq!(s.order(), 1);
        assert_eq!(s.quotient(), &a);
    }

    #[test]
    fn rejects_unreduced() {
        let a = AbelianGroup::cyclic(4);
        assert!(Subgroup::generated(&a, vec![AbelianElement { coords: vec![5] }]).is_err());
    }

    #[test]
    fn lift_then_project() {
        let a = AbelianGroup::new(vec![2, 4, 12]).unwrap();
        let s = Subgroup::generated(&a, vec![a.element(vec![1, 2, 3]).unwrap()]).unwrap();
        for q in s.quotient().elements() {
            assert_eq!(s.project(&s.lift(&q)), q);
        }
    }

    fn group_strategy() -> impl Strategy<Value = AbelianGroup> {
        prop::collection::vec(1u64..5, 0..4).prop_map(|mut v| {
            // build a divisibility chain from multipliers
            let mut factors = Vec::new();
            let mut cur = 1u64;
            v.sort();
            for m in v {
                cur *= m.max(2);
                factors.push(cur);
            }
            AbelianGroup::new(factors).unwrap()
        })
    }

    proptest! {
        #[test]
        fn orders_multiply(a in group_strategy(), seeds in prop::collection::vec(0usize..10_000, 0..4)) {
            prop_assume!(a.order() <= 10_000);
            let n = a.order() as usize;
            let gens: Vec<AbelianElement> = seeds.iter().map(|s| a.element_at(s % n)).collect();
            let s = Subgroup::generated(&a, gens.clone()).unwrap();
            prop_assert_eq!(s.order() * s.quotient().order(), a.order());
            prop_assert_eq!(a.order() % s.order(), 0);
            for g in &gens {
                prop_assert!(s.contains(g));
            }
            // Membership count agrees with the order on small groups.
            if n <= 2000 {
                prop_assert_eq!(s.elements().len() as u64, s.order());
            }
        }

        #[test]
        fn torsion_order_formula(a in group_strategy(), m in 1u64..=100) {
            prop_assume!(a.order() <= 10_000);
            let t = a.torsion_subgroup(m).unwrap();
            let expected: u64 = a.invariant_factors().iter().map(|d| d.gcd(&m)).product();
            prop_assert_eq!(t.order(), expected);
            prop_assert_eq!(t.order() * t.quotient().order(), a.order());
            if let Some(e) = a.exact_order_subgroup(m) {
                prop_assert!(e.is_subgroup_of(&t));
            }
        }

        #[test]
        fn snf_round_trip(rows in 1usize..5, cols in 1usize..5, seed in prop::collection::vec(-50i64..=50, 16)) {
            let data: Vec<Vec<i64>> = (0..rows).map(|i| (0..cols).map(|j| seed[i * 4 + j]).collect()).collect();
            let m = IntMatrix::from_rows(cols, &data);
            let f = smith_normal_form(&m);
            prop_assert_eq!(f.u.mul(&m).mul(&f.v), f.s.clone());
            prop_assert_eq!(f.u.determinant().magnitude().to_u64(), Some(1));
            prop_assert_eq!(f.v.determinant().magnitude().to_u64(), Some(1));
        }
    }
}
