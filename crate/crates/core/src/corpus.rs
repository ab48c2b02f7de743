//! A deterministic corpus of small synthetic extensions.
//!
//! Quotients come from a fixed catalog of groups of order at most 12, kernels
//! run over all abelian groups of admissible order, actions are the trivial
//! one plus automorphism assignments on generators that happen to define a
//! homomorphism, and cocycles are drawn from the solution space of the
//! (homogeneous, linear) cocycle identity.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::abelian::{AbelianElement, AbelianGroup, CongruenceSystem, Endomorphism};
use crate::arith::{divisors, factorize};
use crate::extension::{Extension, FiniteGroup, GAction, TwoCocycle};

/// The named quotient groups used to build the corpus.
pub fn group_catalog() -> Vec<(String, FiniteGroup)> {
    let c = FiniteGroup::cyclic;
    let prod = FiniteGroup::direct_product;
    let mut out: Vec<(String, FiniteGroup)> = (1..=12).map(|n| (format!("C{n}"), c(n))).collect();
    out.push(("C2xC2".into(), prod(&c(2), &c(2))));
    out.push(("C2xC4".into(), prod(&c(2), &c(4))));
    out.push(("C2xC2xC2".into(), prod(&prod(&c(2), &c(2)), &c(2))));
    out.push(("C3xC3".into(), prod(&c(3), &c(3))));
    out.push(("C2xC6".into(), prod(&c(2), &c(6))));
    out.push(("S3".into(), FiniteGroup::symmetric(3)));
    out.push(("D4".into(), FiniteGroup::dihedral(4)));
    out.push(("Q8".into(), FiniteGroup::quaternion()));
    out.push(("D5".into(), FiniteGroup::dihedral(5)));
    out.push(("D6".into(), FiniteGroup::dihedral(6)));
    out.push(("A4".into(), FiniteGroup::alternating4()));
    out
}

/// Every abelian group of order `n`, by invariant factors.
pub fn abelian_groups_of_order(n: u64) -> Vec<AbelianGroup> {
    // Partitions of each prime exponent, combined across primes.
    let mut groups: Vec<Vec<u64>> = vec![vec![]];
    for (p, e) in factorize(n) {
        let mut next = Vec::new();
        for part in partitions(e) {
            for g in &groups {
                let mut orders = g.clone();
                orders.extend(part.iter().map(|&k| p.pow(k)));
                next.push(orders);
            }
        }
        groups = next;
    }
    groups.iter().map(|orders| AbelianGroup::from_cyclic_orders(orders)).collect()
}

fn partitions(n: u32) -> Vec<Vec<u32>> {
    fn go(n: u32, max: u32, prefix: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if n == 0 {
            out.push(prefix.clone());
            return;
        }
        for k in (1..=n.min(max)).rev() {
            prefix.push(k);
            go(n - k, k, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(n, n, &mut Vec::new(), &mut out);
    out
}

#[derive(Clone, Debug)]
pub struct CorpusOptions {
    pub max_extension_order: u64,
    pub max_kernel_order: u64,
    pub max_quotient_order: usize,
    /// Random action assignments attempted per (group, kernel) pair.
    pub action_attempts: usize,
    /// Actions kept per (group, kernel) pair, the trivial one included.
    pub max_actions: usize,
    /// Random cocycles drawn per action, on top of the basis cocycles.
    pub random_cocycles: usize,
    /// Basis cocycles kept per action.
    pub basis_cocycles: usize,
    /// Largest cocycle system (in unknowns) solved; beyond it only the zero cocycle is used.
    pub max_cocycle_unknowns: usize,
    pub seed: u64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        CorpusOptions {
            max_extension_order: 200,
            max_kernel_order: 32,
            max_quotient_order: 12,
            action_attempts: 3,
            max_actions: 3,
            random_cocycles: 2,
            basis_cocycles: 0,
            max_cocycle_unknowns: 100,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug)]
pub struct CorpusEntry {
    pub name: String,
    pub extension: Extension,
}

pub fn synthetic_corpus(opts: &CorpusOptions) -> Vec<CorpusEntry> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut out = Vec::new();
    for (gname, g) in group_catalog() {
        if g.order() > opts.max_quotient_order {
            continue;
        }
        let max_a = (opts.max_extension_order / g.order() as u64).min(opts.max_kernel_order);
        for n in 1..=max_a {
            for a in abelian_groups_of_order(n) {
                for (aname, action) in actions(&g, &a, opts.action_attempts, &mut rng).into_iter().take(opts.max_actions) {
                    for (k, cocycle) in cocycles(&g, &action, opts, &mut rng).into_iter().enumerate() {
                        let extension = Extension::new(g.clone(), action.clone(), cocycle).expect("validated parts");
                        out.push(CorpusEntry { name: format!("{gname}/{a}/{aname}/c{k}"), extension });
                    }
                }
            }
        }
    }
    out
}

fn actions(g: &FiniteGroup, a: &AbelianGroup, attempts: usize, rng: &mut ChaCha8Rng) -> Vec<(String, GAction)> {
    let mut out = vec![("trivial".to_string(), GAction::trivial(g, a))];
    if a.is_trivial() || g.order() == 1 {
        return out;
    }
    let gens = g.generators().to_vec();
    // Sign characters: each generator acts by +1 or -1.
    for mask in 1u32..(1 << gens.len()) {
        let mats: Vec<Vec<Vec<i64>>> = (0..gens.len())
            .map(|i| if mask >> i & 1 == 1 { Endomorphism::scalar(a, -1).matrix() } else { Endomorphism::identity(a).matrix() })
            .collect();
        push_new(&mut out, format!("sign{mask}"), GAction::from_generators(g, a, &mats).ok());
    }
    for t in 0..attempts {
        let mats: Vec<Vec<Vec<i64>>> = gens.iter().map(|_| random_automorphism(a, rng).matrix()).collect();
        push_new(&mut out, format!("rand{t}"), GAction::from_generators(g, a, &mats).ok());
    }
    out
}

fn push_new(out: &mut Vec<(String, GAction)>, name: String, action: Option<GAction>) {
    if let Some(action) = action {
        if !out.iter().any(|(_, b)| *b == action) {
            out.push((name, action));
        }
    }
}

fn random_automorphism(a: &AbelianGroup, rng: &mut ChaCha8Rng) -> Endomorphism {
    let d = a.invariant_factors();
    loop {
        // row i must be killed by d_i: coordinate j is a multiple of d_j / gcd(d_i, d_j)
        let rows: Vec<Vec<i64>> = d
            .iter()
            .map(|&di| {
                d.iter()
                    .map(|&dj| {
                        let g = num_integer::gcd(di, dj);
                        (rng.gen_range(0..g) * (dj / g)) as i64
                    })
                    .collect()
            })
            .collect();
        let phi = Endomorphism::from_matrix(a, &rows).expect("rows are well defined");
        if phi.is_automorphism() {
            return phi;
        }
    }
}

/// Generators of the group of normalized 2-cocycles, each as a full table.
pub fn cocycle_basis(g: &FiniteGroup, action: &GAction) -> Vec<Vec<AbelianElement>> {
    let a = action.module();
    let n = g.order();
    let r = a.rank();
    if n == 1 || r == 0 {
        return Vec::new();
    }
    let d = a.invariant_factors();
    let var = |x: usize, y: usize, j: usize| ((x - 1) * (n - 1) + (y - 1)) * r + j;
    let unknowns = (n - 1) * (n - 1) * r;
    let mut sys = CongruenceSystem::new(unknowns);
    // g.c(h,k) - c(gh,k) + c(g,hk) - c(g,h) = 0, with c(id, .) = c(., id) = 0
    for x in 1..n {
        let act = action.of(x);
        for y in 1..n {
            let xy = g.mul(x, y);
            for z in 1..n {
                let yz = g.mul(y, z);
                for j in 0..r {
                    let mut coeffs = vec![0i128; unknowns];
                    for i in 0..r {
                        coeffs[var(y, z, i)] += act.images()[i].coords()[j] as i128;
                    }
                    if xy != 0 {
                        coeffs[var(xy, z, j)] -= 1;
                    }
                    if yz != 0 {
                        coeffs[var(x, yz, j)] += 1;
                    }
                    coeffs[var(x, y, j)] -= 1;
                    sys.push(coeffs, 0, d[j]);
                }
            }
        }
    }
    let sol = sys.solve().expect("homogeneous systems are solvable");
    sol.homogeneous
        .iter()
        .map(|h| {
            let mut table = vec![a.zero(); n * n];
            for x in 1..n {
                for y in 1..n {
                    table[x * n + y] = a.reduce(&h[var(x, y, 0)..var(x, y, 0) + r]);
                }
            }
            table
        })
        .collect()
}

fn cocycles(g: &FiniteGroup, action: &GAction, opts: &CorpusOptions, rng: &mut ChaCha8Rng) -> Vec<TwoCocycle> {
    let a = action.module();
    let unknowns = (g.order() - 1).pow(2) * a.rank();
    let basis = if unknowns <= opts.max_cocycle_unknowns { cocycle_basis(g, action) } else { Vec::new() };
    let mut tables: Vec<Vec<AbelianElement>> = vec![vec![a.zero(); g.order() * g.order()]];
    let mut candidates: Vec<Vec<AbelianElement>> = basis.iter().take(opts.basis_cocycles).cloned().collect();
    if !basis.is_empty() {
        let e = a.exponent();
        for _ in 0..opts.random_cocycles {
            let mut t = vec![a.zero(); g.order() * g.order()];
            for b in &basis {
                let k = rng.gen_range(0..e) as i64;
                for (ti, bi) in t.iter_mut().zip(b) {
                    *ti = a.add(ti, &a.scale(k, bi));
                }
            }
            candidates.push(t);
        }
    }
    for t in candidates {
        if !tables.contains(&t) {
            tables.push(t);
        }
    }
    tables
        .into_iter()
        .map(|t| TwoCocycle::new(g, action, t).expect("solutions of the cocycle system are cocycles"))
        .collect()
}

/// Divisors of `|A|`, the values of `m` at which corpus checks are run.
pub fn interesting_m(e: &Extension) -> Vec<u64> {
    divisors(e.kernel().order())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn abelian_group_counts() {
        assert_eq!(abelian_groups_of_order(1).len(), 1);
        assert_eq!(abelian_groups_of_order(8).len(), 3);
        assert_eq!(abelian_groups_of_order(16).len(), 5);
        assert_eq!(abelian_groups_of_order(72).len(), 6);
        for a in abelian_groups_of_order(36) {
            assert_eq!(a.order(), 36);
        }
    }

    #[test]
    fn catalog_orders() {
        for (name, g) in group_catalog() {
            assert!(g.order() <= 12, "{name}");
            assert_eq!(g.closure(g.generators()).len(), g.order(), "{name}");
        }
    }

    #[test]
    fn cocycle_space_of_cyclic_group() {
        // Z^2(Z/2, Z/2) with trivial action: c(1,1) is free
        let g = FiniteGroup::cyclic(2);
        let a = AbelianGroup::cyclic(2);
        let basis = cocycle_basis(&g, &GAction::trivial(&g, &a));
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0][3].coords(), &[1]);
    }

    #[test]
    fn small_corpus_is_deterministic() {
        let opts = CorpusOptions { max_extension_order: 24, ..Default::default() };
        let a = synthetic_corpus(&opts);
        let b = synthetic_corpus(&opts);
        assert_eq!(a.len(), b.len());
        assert!(a.iter().zip(&b).all(|(x, y)| x.name == y.name && x.extension == y.extension));
        assert!(a.iter().any(|c| !c.extension.is_split()));
    }
}
