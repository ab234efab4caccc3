//! Ball volumes, sphere areas and binomials.

use std::f64::consts::PI;

/// Volume of the unit ball in `R^n`.
pub fn kappa(n: usize) -> f64 {
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / n as f64 * kappa(n - 2),
    }
}

/// Surface area of the unit sphere `S^{n-1}` in `R^n` (so `omega(1) = 2`).
pub fn omega(n: usize) -> f64 {
    n as f64 * kappa(n)
}

pub fn binom(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, j| acc * (n - j) as f64 / (j + 1) as f64)
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, j| acc * j as f64)
}

/// Normalizing constant of the push-forward of the invariant probability
/// measure on `S^{n-1}` to the polar angle: `c_n * sin^{n-2}(theta) d theta`.
pub fn polar_density_constant(n: usize) -> f64 {
    // ∫_0^π sin^k = π·(k-1)!!/k!! (k even) or 2·(k-1)!!/k!! (k odd)
    let k = n - 2;
    let mut integral = if k.is_multiple_of(2) { PI } else { 2.0 };
    let mut j = k;
    while j >= 2 {
        integral *= (j - 1) as f64 / j as f64;
        j -= 2;
    }
    1.0 / integral
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_volumes() {
        assert!((kappa(2) - PI).abs() < 1e-15);
        assert!((kappa(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((kappa(4) - PI * PI / 2.0).abs() < 1e-14);
        assert!((omega(3) - 4.0 * PI).abs() < 1e-14);
        assert_eq!(omega(1), 2.0);
    }

    #[test]
    fn binomials() {
        assert_eq!(binom(4, 2), 6.0);
        assert_eq!(binom(3, 0), 1.0);
        assert_eq!(binom(2, 3), 0.0);
    }

    #[test]
    fn polar_constants() {
        assert!((polar_density_constant(3) - 0.5).abs() < 1e-15);
        assert!((polar_density_constant(4) - 2.0 / PI).abs() < 1e-15);
    }
}
