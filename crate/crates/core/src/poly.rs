//! Polynomials with exact rational coefficients and fast float evaluation.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Zero};

use crate::rational::{lcm, ExactRational};

/// `c_0 + c_1 t + … + c_d t^d` with a nonzero leading coefficient; the zero
/// polynomial has no coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct RationalPoly {
    coeffs: Vec<ExactRational>,
}

impl RationalPoly {
    /// Builds a polynomial, dropping trailing zero coefficients.
    pub fn new(mut coeffs: Vec<ExactRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        RationalPoly { coeffs }
    }

    pub fn zero() -> Self {
        RationalPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: ExactRational) -> Self {
        Self::new(vec![c])
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| ExactRational::from_i64(c)).collect())
    }

    pub fn coeffs(&self) -> &[ExactRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn constant_term(&self) -> ExactRational {
        self.coeffs.first().cloned().unwrap_or_default()
    }

    /// Exact Horner evaluation.
    pub fn eval(&self, t: &ExactRational) -> ExactRational {
        let mut acc = ExactRational::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * t) + c;
        }
        acc
    }

    /// `p(1)`, the sum of the coefficients.
    pub fn eval_at_one(&self) -> ExactRational {
        self.coeffs
            .iter()
            .fold(ExactRational::zero(), |acc, c| &acc + c)
    }

    /// Lowest common denominator and the matching integer numerators.
    pub fn integer_form(&self) -> (Vec<BigInt>, BigUint) {
        let den = self
            .coeffs
            .iter()
            .fold(BigUint::one(), |acc, c| lcm(&acc, c.denom()));
        let nums = self
            .coeffs
            .iter()
            .map(|c| c.numer() * BigInt::from(&den / c.denom()))
            .collect();
        (nums, den)
    }

    /// Total bit size of all numerators and denominators.
    pub fn size_bits(&self) -> u64 {
        self.coeffs
            .iter()
            .map(|c| c.numer().bits() + c.denom().bits())
            .sum()
    }
}

impl fmt::Display for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match k {
                0 => write!(f, "{c}")?,
                1 => write!(f, "({c})t")?,
                _ => write!(f, "({c})t^{k}")?,
            }
        }
        Ok(())
    }
}

/// Converts monomial coefficients to the shifted Chebyshev basis
/// `T*_j(t) = T_j(2t - 1)` exactly.
///
/// Works on integers scaled by `den · 4^steps`: Horner's rule in the
/// Chebyshev basis needs only `t·T*_j = (T*_{j+1} + 2T*_j + T*_{j-1})/4`
/// (with `t·T*_0 = (T*_1 + T*_0)/2`), so every step is integer addition.
pub fn monomial_to_shifted_chebyshev(p: &RationalPoly) -> Vec<ExactRational> {
    let n = p.coeffs().len();
    if n == 0 {
        return Vec::new();
    }
    let (nums, den) = p.integer_form();
    let mut acc: Vec<BigInt> = vec![BigInt::zero(); n];
    acc[0] = nums[n - 1].clone();
    for (steps, k) in (0..n - 1).rev().enumerate() {
        let deg = steps + 1;
        let mut next: Vec<BigInt> = vec![BigInt::zero(); n];
        for j in 0..deg {
            let r = &acc[j];
            if r.is_zero() {
                continue;
            }
            if j == 0 {
                next[0] += r * 2u32;
                next[1] += r * 2u32;
            } else {
                next[j + 1] += r;
                next[j] += r * 2u32;
                next[j - 1] += r;
            }
        }
        next[0] += &nums[k] << (2 * deg);
        acc = next;
    }
    let scale = den << (2 * (n - 1));
    acc.into_iter()
        .map(|c| ExactRational::from_parts(c, scale.clone()).expect("positive scale"))
        .collect()
}

/// Converts shifted Chebyshev coefficients back to monomial form exactly,
/// running Clenshaw's recurrence on integer polynomials.
pub fn shifted_chebyshev_to_monomial(cheb: &[ExactRational]) -> RationalPoly {
    let n = cheb.len();
    if n == 0 {
        return RationalPoly::zero();
    }
    let den = cheb.iter().fold(BigUint::one(), |acc, c| lcm(&acc, c.denom()));
    let a: Vec<BigInt> = cheb
        .iter()
        .map(|c| c.numer() * BigInt::from(&den / c.denom()))
        .collect();
    // b_k = a_k + 2(2t-1) b_{k+1} - b_{k+2}, as coefficient vectors.
    let mul_x = |b: &[BigInt]| -> Vec<BigInt> {
        // (2t - 1) · b
        let mut out = vec![BigInt::zero(); b.len() + 1];
        for (i, c) in b.iter().enumerate() {
            out[i + 1] += c * 2u32;
            out[i] -= c;
        }
        out
    };
    let mut b1: Vec<BigInt> = Vec::new();
    let mut b2: Vec<BigInt> = Vec::new();
    for k in (1..n).rev() {
        let mut bk = mul_x(&b1);
        for c in bk.iter_mut() {
            *c *= 2u32;
        }
        for (i, c) in b2.iter().enumerate() {
            bk[i] -= c;
        }
        bk[0] += &a[k];
        b2 = b1;
        b1 = bk;
    }
    let mut out = mul_x(&b1);
    if out.is_empty() {
        out.push(BigInt::zero());
    }
    for (i, c) in b2.iter().enumerate() {
        out[i] -= c;
    }
    out[0] += &a[0];
    RationalPoly::new(
        out.into_iter()
            .map(|c| ExactRational::from_parts(c, den.clone()).expect("positive denominator"))
            .collect(),
    )
}

/// Float evaluation of shifted Chebyshev series on `[0, 1]` by Clenshaw.
pub fn clenshaw_shifted(coeffs: &[f64], t: f64) -> f64 {
    let x = 2.0 * t - 1.0;
    let mut b1 = 0.0;
    let mut b2 = 0.0;
    for &c in coeffs.iter().skip(1).rev() {
        let b0 = c + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    coeffs.first().copied().unwrap_or(0.0) + x * b1 - b2
}

/// Float evaluator for a rational polynomial on `[0, 1]`.
///
/// Monomial coefficients of high-degree approximants are enormous and cancel
/// catastrophically in floating point, so the evaluator keeps the polynomial
/// in the shifted Chebyshev basis, where every basis function is bounded by 1.
#[derive(Clone, Debug, PartialEq)]
pub struct PolyEvaluator {
    cheb: Vec<f64>,
}

impl PolyEvaluator {
    pub fn new(p: &RationalPoly) -> Self {
        Self::from_shifted_chebyshev(&monomial_to_shifted_chebyshev(p))
    }

    pub fn from_shifted_chebyshev(coeffs: &[ExactRational]) -> Self {
        PolyEvaluator {
            cheb: coeffs.iter().map(ExactRational::to_f64).collect(),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        clenshaw_shifted(&self.cheb, t)
    }

    /// `Σ |a_j|`, an upper bound for `|p|` on `[0, 1]`.
    pub fn sup_bound(&self) -> f64 {
        self.cheb.iter().map(|c| c.abs()).sum()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.cheb
    }
}
