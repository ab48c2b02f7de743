//! Deciding whether an extension splits.
//!
//! A section `g -> (-f(g), g)` is a homomorphism exactly when
//! `c(g,h) = g.f(h) - f(gh) + f(g)` for all `g, h`. With `f(id) = 0` this is a
//! linear congruence system in the coordinates of `f(g)`, `g != id`.

use serde::Serialize;

use super::{ExtElement, Extension};
use crate::abelian::CongruenceSystem;

/// A homomorphic section of `pi`, `images[g]` lying over `g`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Section {
    pub images: Vec<ExtElement>,
}

impl Extension {
    pub fn is_split(&self) -> bool {
        self.splitting().is_some()
    }

    /// A section of `pi` that is a group homomorphism, if one exists.
    pub fn splitting(&self) -> Option<Section> {
        let g = self.quotient();
        let a = self.kernel();
        let n = g.order();
        let r = a.rank();
        let d = a.invariant_factors();
        let var = |x: usize, i: usize| (x - 1) * r + i;

        let mut sys = CongruenceSystem::new((n - 1) * r);
        for x in 1..n {
            let act = self.action().of(x);
            for y in 1..n {
                let xy = g.mul(x, y);
                let c = self.cocycle().value(x, y);
                for j in 0..r {
                    let mut coeffs = vec![0i128; sys.unknowns()];
                    for i in 0..r {
                        coeffs[var(y, i)] += act.images()[i].coords()[j] as i128;
                    }
                    if xy != 0 {
                        coeffs[var(xy, j)] -= 1;
                    }
                    coeffs[var(x, j)] += 1;
                    sys.push(coeffs, c.coords()[j] as i128, d[j]);
                }
            }
        }
        let sol = sys.solve()?;

        let images: Vec<ExtElement> = (0..n)
            .map(|x| {
                let f = if x == 0 { a.zero() } else { a.reduce(&sol.particular[var(x, 0)..var(x, 0) + r]) };
                ExtElement { kernel: a.neg(&f), quotient: x }
            })
            .collect();
        for x in 0..n {
            for y in 0..n {
                assert_eq!(
                    self.multiply(&images[x], &images[y]),
                    images[g.mul(x, y)],
                    "coboundary solution does not give a homomorphic section"
                );
            }
        }
        Some(Section { images })
    }
}

#[cfg(test)]
mod tests {
    use super::super::tests::z4_over_z2;
    use super::super::{FiniteGroup, GAction, TwoCocycle};
    use super::*;
    use crate::abelian::AbelianGroup;

    #[test]
    fn trivial_cocycle_splits_with_zero_section() {
        let a = AbelianGroup::new(vec![2, 4]).unwrap();
        let e = Extension::direct_product(&a, &FiniteGroup::symmetric(3));
        let s = e.splitting().unwrap();
        for (x, img) in s.images.iter().enumerate() {
            assert_eq!(img.quotient, x);
        }
        assert_eq!(s.images[0], e.identity());
    }

    #[test]
    fn z4_does_not_split() {
        assert!(!z4_over_z2().is_split());
    }

    #[test]
    fn coboundary_splits() {
        // c(1,1) = 2 = df for f(1) = 1 under the trivial action
        let g = FiniteGroup::cyclic(2);
        let a = AbelianGroup::cyclic(4);
        let values = vec![a.zero(), a.zero(), a.zero(), a.element(vec![2]).unwrap()];
        let trivial = GAction::trivial(&g, &a);
        let e = Extension::new(g.clone(), trivial.clone(), TwoCocycle::new(&g, &trivial, values.clone()).unwrap()).unwrap();
        assert!(e.is_split());
        // the same values under negation give Q8, which has a unique involution
        let negation = GAction::from_generators(&g, &a, &[vec![vec![3]]]).unwrap();
        let e = Extension::new(g.clone(), negation.clone(), TwoCocycle::new(&g, &negation, values).unwrap()).unwrap();
        assert!(!e.is_split());
        assert_eq!(e.realize().conjugacy_classes().len(), 5);
    }
}
