//! Continued-fraction convergents of exact rationals.

use num_bigint::BigInt;
use num_traits::{One, Zero};

use crate::rational::ExactRational;

/// Iterator over the convergents `h_k / k_k` of a rational number.
///
/// The expansion of a rational is finite, so the last convergent is the
/// number itself.
#[derive(Clone, Debug)]
pub struct Convergents {
    num: BigInt,
    den: BigInt,
    h: (BigInt, BigInt),
    k: (BigInt, BigInt),
    done: bool,
}

impl Convergents {
    pub fn new(x: &ExactRational) -> Self {
        Convergents {
            num: x.numer().clone(),
            den: BigInt::from(x.denom().clone()),
            h: (BigInt::one(), BigInt::zero()),
            k: (BigInt::zero(), BigInt::one()),
            done: false,
        }
    }
}

impl Iterator for Convergents {
    type Item = ExactRational;

    fn next(&mut self) -> Option<ExactRational> {
        if self.done {
            return None;
        }
        let a = num_integer::Integer::div_floor(&self.num, &self.den);
        let rem = &self.num - &a * &self.den;
        let h = &a * &self.h.0 + &self.h.1;
        let k = &a * &self.k.0 + &self.k.1;
        self.h = (h.clone(), core::mem::take(&mut self.h.0));
        self.k = (k.clone(), core::mem::take(&mut self.k.0));
        if rem.is_zero() {
            self.done = true;
        } else {
            self.num = core::mem::replace(&mut self.den, rem);
        }
        Some(ExactRational::new(h, k).expect("convergent denominators are positive"))
    }
}

/// The first convergent of `x` within `tol` of it (`tol >= 0`).
pub fn first_convergent_within(x: &ExactRational, tol: &ExactRational) -> ExactRational {
    for c in Convergents::new(x) {
        if (&c - x).abs() <= *tol {
            return c;
        }
    }
    x.clone()
}

/// Rationalizes a finite float: the first convergent of its exact value
/// within `tol`.
pub fn rationalize_f64(x: f64, tol: f64) -> ExactRational {
    let exact = ExactRational::from_f64(x).expect("finite coefficient");
    let tol = ExactRational::from_f64(tol.max(0.0)).expect("finite tolerance");
    first_convergent_within(&exact, &tol)
}
