//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::collections::VecDeque;

use princheb::extension::{ExtElement, Extension};

/// Searches every assignment of lifts to the generators of `G` for one that
/// extends to a homomorphic section. Exponential; only for tiny extensions.
pub fn brute_force_split(e: &Extension) -> bool {
    let g = e.quotient();
    let gens = g.generators().to_vec();
    let lifts: Vec<_> = e.kernel().elements().collect();
    let total = lifts.len().pow(gens.len() as u32);
    'choice: for code in 0..total {
        let mut c = code;
        let chosen: Vec<ExtElement> = gens
            .iter()
            .map(|&s| {
                let a = lifts[c % lifts.len()].clone();
                c /= lifts.len();
                ExtElement { kernel: a, quotient: s }
            })
            .collect();
        let mut section: Vec<Option<ExtElement>> = vec![None; g.order()];
        section[0] = Some(e.identity());
        let mut queue = VecDeque::from([0usize]);
        while let Some(x) = queue.pop_front() {
            for (k, &s) in gens.iter().enumerate() {
                let y = g.mul(x, s);
                let img = e.multiply(section[x].as_ref().unwrap(), &chosen[k]);
                match &section[y] {
                    Some(existing) if *existing != img => continue 'choice,
                    Some(_) => {}
                    None => {
                        section[y] = Some(img);
                        queue.push_back(y);
                    }
                }
            }
        }
        let section: Vec<ExtElement> = section.into_iter().map(Option::unwrap).collect();
        let hom = (0..g.order())
            .all(|x| (0..g.order()).all(|y| e.multiply(&section[x], &section[y]) == section[g.mul(x, y)]));
        if hom {
            return true;
        }
    }
    false
}

/// Counts `sigma` over `class` with `sigma^(d m) = 1` by repeated multiplication.
pub fn count_by_multiplication(e: &Extension, members: &[usize], d: u64, m: u64) -> u64 {
    let id = e.identity();
    let mut count = 0;
    for &g in members {
        for x in e.fiber(g) {
            let mut y = id.clone();
            for _ in 0..d * m {
                y = e.multiply(&y, &x);
            }
            if y == id {
                count += 1;
            }
        }
    }
    count
}

/// Positive definite binary quadratic forms `(a, b, c)` of discriminant `b^2 - 4ac < 0`.
pub mod forms {
    pub type Form = (i64, i64, i64);

    fn gcd(a: i64, b: i64) -> i64 {
        if b == 0 {
            a.abs()
        } else {
            gcd(b, a % b)
        }
    }

    /// `(g, x, y)` with `x a + y b = g`.
    fn ext_gcd(a: i64, b: i64) -> (i64, i64, i64) {
        if b == 0 {
            (a.signum() * a, a.signum(), 0)
        } else {
            let (g, x, y) = ext_gcd(b, a.rem_euclid(b));
            (g, y, x - a.div_euclid(b) * y)
        }
    }

    pub fn reduce(f: Form) -> Form {
        let (mut a, mut b, mut c) = f;
        let disc = b * b - 4 * a * c;
        loop {
            if !(-a < b && b <= a) {
                let q = (a - b).div_euclid(2 * a);
                b += 2 * a * q;
                c = (b * b - disc) / (4 * a);
            }
            if a > c {
                b = -b;
                std::mem::swap(&mut a, &mut c);
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            return (a, b, c);
        }
    }

    /// All reduced primitive forms, by direct search over `|b| <= a <= sqrt(|D|/3)`.
    pub fn reduced_forms(disc: i64) -> Vec<Form> {
        let mut out = Vec::new();
        let mut a = 1;
        while 3 * a * a <= -disc {
            for b in -a + 1..=a {
                if (b * b - disc) % (4 * a) != 0 {
                    continue;
                }
                let c = (b * b - disc) / (4 * a);
                if c < a || (b < 0 && a == c) || gcd(gcd(a, b), c) != 1 {
                    continue;
                }
                out.push((a, b, c));
            }
            a += 1;
        }
        out
    }

    pub fn identity(disc: i64) -> Form {
        let b = disc.rem_euclid(2);
        (1, b, (b * b - disc) / 4)
    }

    /// Gauss composition followed by reduction.
    pub fn compose(f1: Form, f2: Form) -> Form {
        let (f1, f2) = if f1.0 > f2.0 { (f2, f1) } else { (f1, f2) };
        let (a1, b1, _) = f1;
        let (a2, b2, c2) = f2;
        let disc = b2 * b2 - 4 * a2 * c2;
        let s = (b1 + b2) / 2;
        let n = b2 - s;
        let (d, y1) = if a2 % a1 == 0 {
            (a1, 0)
        } else {
            let (d, u, _) = ext_gcd(a2, a1);
            (d, u)
        };
        let (d1, x2, y2) = if s % d == 0 {
            (d, 0, -1)
        } else {
            let (d1, x2, y2) = ext_gcd(s, d);
            (d1, x2, -y2)
        };
        let v1 = a1 / d1;
        let v2 = a2 / d1;
        let r = (y1 * y2 * n - x2 * c2).rem_euclid(v1);
        let b3 = b2 + 2 * v2 * r;
        let a3 = v1 * v2;
        let c3 = (b3 * b3 - disc) / (4 * a3);
        reduce((a3, b3, c3))
    }

    pub fn order(f: Form, disc: i64) -> u64 {
        let id = identity(disc);
        let mut x = f;
        let mut k = 1;
        while x != id {
            x = compose(x, f);
            k += 1;
        }
        k
    }

    /// `|Cl(D)[m]|`, counted over the reduced forms.
    pub fn torsion_count(disc: i64, m: u64) -> u64 {
        reduced_forms(disc).into_iter().filter(|&f| m % order(f, disc) == 0).count() as u64
    }
}

/// `|H^1(<s>, A)|` for `s` of order `n` acting through the table `phi`, by
/// listing crossed homomorphisms and principal ones as functions on `<s>`.
///
/// `add[x][y]` is the addition table of `A` with 0 the identity.
pub fn h1_by_enumeration(n: usize, add: &[Vec<usize>], phi: &[usize]) -> u64 {
    let size = add.len();
    let neg: Vec<usize> = (0..size).map(|x| (0..size).find(|&y| add[x][y] == 0).unwrap()).collect();
    // phi^k for k < n
    let mut powers = vec![(0..size).collect::<Vec<usize>>()];
    for k in 1..n {
        let prev = &powers[k - 1];
        powers.push((0..size).map(|x| phi[prev[x]]).collect());
    }
    let mut cocycles = std::collections::BTreeSet::new();
    for a in 0..size {
        // candidate f(s^k) = a + s a + ... + s^{k-1} a
        let mut f = vec![0usize; n];
        for k in 1..n {
            f[k] = add[f[k - 1]][powers[k - 1][a]];
        }
        let is_cocycle = (0..n).all(|g| (0..n).all(|h| f[(g + h) % n] == add[f[g]][powers[g][f[h]]]));
        if is_cocycle {
            cocycles.insert(f);
        }
    }
    let coboundaries: std::collections::BTreeSet<Vec<usize>> =
        (0..size).map(|b| (0..n).map(|g| add[powers[g][b]][neg[b]]).collect()).collect();
    assert!(coboundaries.is_subset(&cocycles));
    (cocycles.len() / coboundaries.len()) as u64
}
