//! Chebyshev interpolation on `[0, 1]` and Gauss–Legendre rules.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

pub use crate::poly::clenshaw_shifted;

/// The `n + 1` first-kind Chebyshev nodes mapped to `[0, 1]`.
pub fn nodes(degree: usize) -> Vec<f64> {
    let n = degree + 1;
    (0..n)
        .map(|k| 0.5 * (libm::cos(PI * (k as f64 + 0.5) / n as f64) + 1.0))
        .collect()
}

/// Shifted Chebyshev coefficients of the degree-`degree` interpolant through
/// `values` sampled at [`nodes`]`(degree)`.
pub fn coefficients(values: &[f64]) -> Vec<f64> {
    let n = values.len();
    if n == 0 {
        return Vec::new();
    }
    // cos(j π (2k+1) / (2n)) = table[j (2k+1) mod 4n]
    let period = 4 * n;
    let table: Vec<f64> = (0..period)
        .map(|i| libm::cos(PI * i as f64 / (2 * n) as f64))
        .collect();
    let mut out = vec![0.0; n];
    for (j, c) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (k, &y) in values.iter().enumerate() {
            acc += y * table[(j * (2 * k + 1)) % period];
        }
        *c = 2.0 * acc / n as f64;
    }
    out[0] *= 0.5;
    out
}

/// Interpolates `f` on `[0, 1]` at `degree + 1` Chebyshev nodes.
pub fn interpolate<F: Fn(f64) -> f64>(f: F, degree: usize) -> Vec<f64> {
    let values: Vec<f64> = nodes(degree).into_iter().map(f).collect();
    coefficients(&values)
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, by Newton iteration on
/// the Legendre polynomial from the usual cosine initial guesses.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (n as f64 + 0.5));
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_polynomials_exactly() {
        let c = interpolate(|t| 3.0 * t * t - t + 0.5, 2);
        for i in 0..=10 {
            let t = i as f64 / 10.0;
            assert!((clenshaw_shifted(&c, t) - (3.0 * t * t - t + 0.5)).abs() < 1e-14);
        }
        let c = interpolate(|_| 2.5, 0);
        assert_eq!(c.len(), 1);
        assert!((c[0] - 2.5).abs() < 1e-15);
    }

    #[test]
    fn gauss_legendre_integrates_degree_2n_minus_1() {
        let (x, w) = gauss_legendre(5);
        let s: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(8)).sum();
        assert!((s - 2.0 / 9.0).abs() < 1e-15);
        let total: f64 = w.iter().sum();
        assert!((total - 2.0).abs() < 1e-14);
    }
}
