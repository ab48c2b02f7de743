//! Discriminant bounds: Minkowski, a class number bound of Lenstra, and the
//! GRH-conditional prime bound of Bach and Sorenson.
//!
//! All logarithms are natural.

use num_traits::ToPrimitive;

use super::FieldDescription;

fn abs_disc(k: &FieldDescription) -> f64 {
    k.abs_discriminant().to_f64().unwrap_or(f64::INFINITY)
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

/// `ceil((4 h ln|D| + 2.5 n h + 5)^2)`, conditional on GRH.
pub fn bach_sorenson_value(n: usize, abs_disc: f64, h: u64) -> u64 {
    let h = h as f64;
    let root = 4.0 * h * abs_disc.ln() + 2.5 * n as f64 * h + 5.0;
    (root * root).ceil() as u64
}

/// The same expression with coefficient `n h` in place of `2.5 n h`.
pub fn bach_sorenson_value_unscaled(n: usize, abs_disc: f64, h: u64) -> u64 {
    let h = h as f64;
    let root = 4.0 * h * abs_disc.ln() + n as f64 * h + 5.0;
    (root * root).ceil() as u64
}

/// Every class of `Gal(H_K/Q)` contains the Frobenius of an unramified
/// prime below this bound, assuming GRH.
pub fn bach_sorenson_bound(k: &FieldDescription, h: u64) -> u64 {
    assert!(h >= 1, "class number must be positive");
    bach_sorenson_value(k.degree(), abs_disc(k), h)
}

/// `floor(d (n - 1 + ln d)^(n-1) / (n-1)!)` with `d = (2/pi)^{r2} sqrt|D|`, at least 1.
pub fn lenstra_class_bound(k: &FieldDescription) -> u64 {
    let n = k.degree();
    let s = k.signature().1 as i32;
    let d = (2.0 / std::f64::consts::PI).powi(s) * abs_disc(k).sqrt();
    let value = d * (n as f64 - 1.0 + d.ln()).powi(n as i32 - 1) / factorial(n - 1);
    (value.floor() as u64).max(1)
}

/// `(4/pi)^{r2} n!/n^n sqrt|D|`; every ideal class holds an ideal of norm at most this.
pub fn minkowski_bound(k: &FieldDescription) -> f64 {
    let n = k.degree();
    let r2 = k.signature().1 as i32;
    (4.0 / std::f64::consts::PI).powi(r2) * factorial(n) / (n as f64).powi(n as i32) * abs_disc(k).sqrt()
}

#[cfg(test)]
mod tests {
    use super::super::{build_multiquadratic, build_quadratic};
    use super::*;

    #[test]
    fn example_field_prime_bound() {
        assert_eq!(bach_sorenson_value(4, 1521.0, 2), 6992);
        let k = build_multiquadratic(&[-3, 13]).unwrap();
        assert_eq!(bach_sorenson_bound(&k, 2), 6992);
        assert!(bach_sorenson_value_unscaled(4, 1521.0, 2) < 6992);
    }

    #[test]
    fn prime_bound_growth() {
        let (n, d) = (4, 1521.0);
        assert!(bach_sorenson_value(n, d, 4) > 2 * bach_sorenson_value(n, d, 2));
        assert!(bach_sorenson_value(n, 2.0 * d, 2) >= bach_sorenson_value(n, d, 2));
        assert!(bach_sorenson_value(n + 1, d, 2) >= bach_sorenson_value(n, d, 2));
        // h = 1, |D| = 3, n = 2: (4 ln 3 + 10)^2
        let direct = (4.0 * 3f64.ln() + 10.0).powi(2).ceil() as u64;
        assert_eq!(bach_sorenson_value(2, 3.0, 1), direct);
    }

    #[test]
    fn lenstra_values() {
        assert_eq!(lenstra_class_bound(&build_quadratic(-5).unwrap()), 5);
        assert_eq!(lenstra_class_bound(&build_quadratic(13).unwrap()), 8);
        assert!(lenstra_class_bound(&build_quadratic(-3).unwrap()) >= 1);
    }

    #[test]
    fn minkowski_values() {
        assert!((minkowski_bound(&build_quadratic(-5).unwrap()) - 2.847).abs() < 1e-3);
        assert!((minkowski_bound(&build_multiquadratic(&[-3, 13]).unwrap()) - 5.928).abs() < 1e-3);
        assert!(minkowski_bound(&build_quadratic(2).unwrap()) < 2.0);
    }
}
