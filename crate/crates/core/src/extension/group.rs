//! Finite groups given by a full multiplication table.

use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::Serialize;

use super::ExtensionError;

/// A finite group on the indices `0..order`, with `0` the identity.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteGroup {
    order: usize,
    table: Vec<usize>,
    inverse: Vec<usize>,
    element_order: Vec<u64>,
    generators: Vec<usize>,
}

/// A conjugacy class, represented by its smallest member.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct ConjugacyClass {
    pub representative: usize,
    pub members: Vec<usize>,
    pub common_order: u64,
}

impl ConjugacyClass {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, g: usize) -> bool {
        self.members.binary_search(&g).is_ok()
    }
}

impl FiniteGroup {
    /// Validates a multiplication table (`table[a][b] = a*b`) with identity 0.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self, ExtensionError> {
        let n = table.len();
        if n == 0 || table.iter().any(|row| row.len() != n) {
            return Err(ExtensionError::BadTable("table must be a nonempty square".into()));
        }
        if table.iter().flatten().any(|&x| x >= n) {
            return Err(ExtensionError::BadTable("entry out of range".into()));
        }
        for a in 0..n {
            if table[0][a] != a || table[a][0] != a {
                return Err(ExtensionError::BadTable("index 0 is not the identity".into()));
            }
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(ExtensionError::BadTable(format!("not associative at ({a},{b},{c})")));
                    }
                }
            }
        }
        for (a, row) in table.iter().enumerate() {
            if !row.contains(&0) {
                return Err(ExtensionError::BadTable(format!("element {a} has no inverse")));
            }
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        let mut g = Self::from_flat_unchecked(n, flat);
        g.generators = g.greedy_generators();
        Ok(g)
    }

    /// Closure of a set of permutations of `0..degree`.
    ///
    /// Elements are numbered in breadth-first order from the identity, right
    /// multiplying by the generators in the given order; the product `p*q` is
    /// the composition `i -> p[q[i]]`.
    pub fn from_permutations(gens: &[Vec<usize>]) -> Result<Self, ExtensionError> {
        let degree = gens.first().map_or(1, Vec::len);
        for g in gens {
            let mut sorted = g.clone();
            sorted.sort_unstable();
            if g.len() != degree || sorted != (0..degree).collect::<Vec<_>>() {
                return Err(ExtensionError::BadTable(format!("{g:?} is not a permutation of 0..{degree}")));
            }
        }
        let compose = |p: &[usize], q: &[usize]| -> Vec<usize> { q.iter().map(|&i| p[i]).collect() };
        let identity: Vec<usize> = (0..degree).collect();
        let mut elems = vec![identity.clone()];
        let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
        index.insert(identity, 0);
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for s in gens {
                let y = compose(&elems[x], s);
                if !index.contains_key(&y) {
                    index.insert(y.clone(), elems.len());
                    queue.push_back(elems.len());
                    elems.push(y);
                }
            }
        }
        let n = elems.len();
        let mut flat = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                flat[a * n + b] = index[&compose(&elems[a], &elems[b])];
            }
        }
        let mut g = Self::from_flat_unchecked(n, flat);
        let mut gen_idx: Vec<usize> = Vec::new();
        for s in gens {
            let i = index[s];
            if i != 0 && !gen_idx.contains(&i) {
                gen_idx.push(i);
            }
        }
        g.generators = gen_idx;
        Ok(g)
    }

    /// Trusted constructor for tables produced internally.
    pub(crate) fn from_flat_unchecked(n: usize, table: Vec<usize>) -> Self {
        let mut inverse = vec![0; n];
        for a in 0..n {
            inverse[a] = (0..n).find(|&b| table[a * n + b] == 0).expect("every element has an inverse");
        }
        let mut element_order = vec![1u64; n];
        for (a, ord) in element_order.iter_mut().enumerate() {
            let mut x = a;
            while x != 0 {
                x = table[x * n + a];
                *ord += 1;
            }
        }
        let mut g = FiniteGroup { order: n, table, inverse, element_order, generators: Vec::new() };
        g.generators = g.greedy_generators();
        g
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let table = (0..n * n).map(|i| (i / n + i % n) % n).collect();
        let mut g = Self::from_flat_unchecked(n, table);
        g.generators = if n > 1 { vec![1] } else { vec![] };
        g
    }

    /// `(Z/2)^k` with elements as bitmasks multiplied by XOR.
    pub fn elementary_abelian_2(k: u32) -> Self {
        let n = 1usize << k;
        let table = (0..n * n).map(|i| (i / n) ^ (i % n)).collect();
        let mut g = Self::from_flat_unchecked(n, table);
        g.generators = (0..k).map(|i| 1usize << i).collect();
        g
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `G x H` with `(g, h)` at index `g * |H| + h`.
    pub fn direct_product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (ng, nh) = (g.order, h.order);
        let n = ng * nh;
        let mut table = vec![0; n * n];
        for a in 0..n {
            for b in 0..n {
                let x = g.mul(a / nh, b / nh);
                let y = h.mul(a % nh, b % nh);
                table[a * n + b] = x * nh + y;
            }
        }
        let mut out = Self::from_flat_unchecked(n, table);
        let mut gens: Vec<usize> = g.generators.iter().map(|&x| x * nh).collect();
        gens.extend(h.generators.iter().copied());
        out.generators = gens;
        out
    }

    /// Symmetric group on `k` letters.
    pub fn symmetric(k: usize) -> Self {
        if k <= 1 {
            return Self::trivial();
        }
        let mut swap: Vec<usize> = (0..k).collect();
        swap.swap(0, 1);
        let cycle: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
        Self::from_permutations(&[swap, cycle]).expect("valid permutations")
    }

    /// Dihedral group of order `2k`.
    pub fn dihedral(k: usize) -> Self {
        let rot: Vec<usize> = (0..k).map(|i| (i + 1) % k).collect();
        let refl: Vec<usize> = (0..k).map(|i| (k - i) % k).collect();
        Self::from_permutations(&[rot, refl]).expect("valid permutations")
    }

    pub fn alternating4() -> Self {
        Self::from_permutations(&[vec![1, 2, 0, 3], vec![1, 0, 3, 2]]).expect("valid permutations")
    }

    /// Quaternion group of order 8 in its regular representation.
    pub fn quaternion() -> Self {
        // units 1,i,j,k with a sign: index = 4*sign + unit
        let unit_mul = |a: usize, b: usize| -> (usize, usize) {
            // (sign flip, unit)
            const T: [[(usize, usize); 4]; 4] = [
                [(0, 0), (0, 1), (0, 2), (0, 3)],
                [(0, 1), (1, 0), (0, 3), (1, 2)],
                [(0, 2), (1, 3), (1, 0), (0, 1)],
                [(0, 3), (0, 2), (1, 1), (1, 0)],
            ];
            T[a][b]
        };
        let mul = |x: usize, y: usize| -> usize {
            let (s, u) = unit_mul(x % 4, y % 4);
            ((x / 4 + y / 4 + s) % 2) * 4 + u
        };
        let perm = |x: usize| -> Vec<usize> { (0..8).map(|y| mul(x, y)).collect() };
        Self::from_permutations(&[perm(1), perm(2)]).expect("valid permutations")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        0
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn element_order(&self, a: usize) -> u64 {
        self.element_order[a]
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let k = k % self.element_order[a];
        let mut x = 0;
        for _ in 0..k {
            x = self.mul(x, a);
        }
        x
    }

    pub fn generators(&self) -> &[usize] {
        &self.generators
    }

    pub fn table(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(<[usize]>::to_vec).collect()
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order).all(|a| (0..self.order).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn is_cyclic(&self) -> bool {
        self.element_order.iter().any(|&o| o as usize == self.order)
    }

    pub fn exponent(&self) -> u64 {
        use num_integer::Integer;
        self.element_order.iter().fold(1u64, |acc, o| acc.lcm(o))
    }

    /// `[g^0, g^1, ..., g^(d-1)]`.
    pub fn cyclic_subgroup(&self, g: usize) -> Vec<usize> {
        let mut out = vec![0];
        let mut x = g;
        while x != 0 {
            out.push(x);
            x = self.mul(x, g);
        }
        out
    }

    /// The subgroup generated by `elems`, as a sorted list.
    pub fn closure(&self, elems: &[usize]) -> Vec<usize> {
        let mut seen: BTreeSet<usize> = BTreeSet::from([0]);
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &s in elems {
                let y = self.mul(x, s);
                if seen.insert(y) {
                    frontier.push(y);
                }
            }
        }
        seen.into_iter().collect()
    }

    pub fn commutator_subgroup(&self) -> Vec<usize> {
        let mut comms: BTreeSet<usize> = BTreeSet::new();
        for a in 0..self.order {
            for b in 0..self.order {
                let c = self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)));
                comms.insert(c);
            }
        }
        let comms: Vec<usize> = comms.into_iter().collect();
        self.closure(&comms)
    }

    pub fn conjugacy_classes(&self) -> Vec<ConjugacyClass> {
        let n = self.order;
        let mut assigned = vec![false; n];
        let mut classes = Vec::new();
        for x in 0..n {
            if assigned[x] {
                continue;
            }
            let members: BTreeSet<usize> = (0..n).map(|g| self.mul(self.mul(g, x), self.inv(g))).collect();
            for &m in &members {
                assigned[m] = true;
            }
            classes.push(ConjugacyClass {
                representative: x,
                members: members.into_iter().collect(),
                common_order: self.element_order[x],
            });
        }
        classes
    }

    pub fn class_of(&self, g: usize) -> ConjugacyClass {
        self.conjugacy_classes().into_iter().find(|c| c.contains(g)).expect("classes partition the group")
    }

    /// Cyclic subgroups not properly contained in another cyclic subgroup,
    /// each given as a sorted element list, ordered by smallest generator.
    pub fn maximal_cyclic_subgroups(&self) -> Vec<Vec<usize>> {
        let mut subs: Vec<Vec<usize>> = Vec::new();
        for g in 0..self.order {
            let mut s = self.cyclic_subgroup(g);
            s.sort_unstable();
            if !subs.contains(&s) {
                subs.push(s);
            }
        }
        let is_proper_subset = |a: &Vec<usize>, b: &Vec<usize>| a.len() < b.len() && a.iter().all(|x| b.binary_search(x).is_ok());
        subs.iter()
            .filter(|s| !subs.iter().any(|t| is_proper_subset(s, t)))
            .cloned()
            .collect()
    }

    fn greedy_generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![0usize];
        for x in 1..self.order {
            if span.binary_search(&x).is_err() {
                gens.push(x);
                span = self.closure(&gens);
                if span.len() == self.order {
                    break;
                }
            }
        }
        gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_classes_are_singletons() {
        let g = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(4));
        assert!(g.conjugacy_classes().iter().all(|c| c.len() == 1));
        assert_eq!(g.conjugacy_classes().len(), 8);
    }

    #[test]
    fn s3_class_sizes() {
        let s3 = FiniteGroup::symmetric(3);
        assert_eq!(s3.order(), 6);
        let mut sizes: Vec<usize> = s3.conjugacy_classes().iter().map(ConjugacyClass::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![1, 2, 3]);
        for c in s3.conjugacy_classes() {
            assert_eq!(c.representative, c.members[0]);
            assert_eq!(6 % c.len(), 0);
        }
    }

    #[test]
    fn maximal_cyclic_examples() {
        assert_eq!(FiniteGroup::cyclic(4).maximal_cyclic_subgroups().len(), 1);
        let v4 = FiniteGroup::direct_product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        let m = v4.maximal_cyclic_subgroups();
        assert_eq!(m.len(), 3);
        assert!(m.iter().all(|s| s.len() == 2));
        let mut sizes: Vec<usize> = FiniteGroup::symmetric(3).maximal_cyclic_subgroups().iter().map(Vec::len).collect();
        sizes.sort_unstable();
        assert_eq!(sizes, vec![2, 2, 2, 3]);
    }

    #[test]
    fn maximal_cyclic_cover_every_element() {
        for g in [FiniteGroup::quaternion(), FiniteGroup::alternating4(), FiniteGroup::dihedral(6)] {
            let subs = g.maximal_cyclic_subgroups();
            for x in 0..g.order() {
                assert!(subs.iter().any(|s| s.contains(&x)));
            }
        }
    }

    #[test]
    fn table_round_trip_validates() {
        let q = FiniteGroup::quaternion();
        assert_eq!(q.order(), 8);
        assert_eq!(q.conjugacy_classes().len(), 5);
        let again = FiniteGroup::from_table(q.table()).unwrap();
        assert_eq!(again.table(), q.table());
        let mut bad = q.table();
        bad[1][1] = 1;
        assert!(FiniteGroup::from_table(bad).is_err());
    }

    #[test]
    fn named_groups() {
        assert_eq!(FiniteGroup::alternating4().order(), 12);
        assert_eq!(FiniteGroup::dihedral(4).order(), 8);
        assert!(!FiniteGroup::dihedral(4).is_abelian());
        assert!(FiniteGroup::cyclic(6).is_cyclic());
        assert_eq!(FiniteGroup::symmetric(3).commutator_subgroup().len(), 3);
    }
}
