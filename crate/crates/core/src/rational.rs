//! Exact rational numbers over arbitrary-precision integers.
//!
//! Values are always kept in canonical form: the denominator is positive and
//! coprime to the numerator. Enumeration indices routinely run to millions of
//! bits while the denominators stay small, so reduction uses plain Euclid
//! (a single remainder step collapses a huge/small pair) instead of the binary
//! gcd from `num-integer`, which degrades to one subtraction per bit there.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::ops::{Add, Div, Mul, Neg, Sub};
use core::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Greatest common divisor by Euclid's algorithm.
pub fn gcd(a: &BigUint, b: &BigUint) -> BigUint {
    let (mut x, mut y) = if a >= b {
        (a.clone(), b.clone())
    } else {
        (b.clone(), a.clone())
    };
    while !y.is_zero() {
        let r = &x % &y;
        x = y;
        y = r;
    }
    x
}

/// Least common multiple; `lcm(0, x) = 0`.
pub fn lcm(a: &BigUint, b: &BigUint) -> BigUint {
    if a.is_zero() || b.is_zero() {
        return BigUint::zero();
    }
    let g = gcd(a, b);
    (a / &g) * b
}

/// A canonical fraction `num / den` with `den >= 1` and `gcd(|num|, den) = 1`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ExactRational {
    num: BigInt,
    den: BigUint,
}

/// Reasons a rational literal failed to parse.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParseRationalError(pub String);

impl fmt::Display for ParseRationalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid rational literal: {}", self.0)
    }
}

impl ExactRational {
    /// Builds `num / den`, reducing to canonical form.
    ///
    /// Returns `None` when `den` is zero.
    pub fn new(num: BigInt, den: BigInt) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        let (num, den) = if den.is_negative() {
            (-num, den.into_parts().1)
        } else {
            (num, den.into_parts().1)
        };
        Some(Self::reduce(num, den))
    }

    /// Builds `num / den` from a signed numerator and an unsigned denominator.
    pub fn from_parts(num: BigInt, den: BigUint) -> Option<Self> {
        if den.is_zero() {
            return None;
        }
        Some(Self::reduce(num, den))
    }

    fn reduce(num: BigInt, den: BigUint) -> Self {
        if num.is_zero() {
            return Self::zero();
        }
        if den.is_one() {
            return Self { num, den };
        }
        let g = gcd(num.magnitude(), &den);
        if g.is_one() {
            Self { num, den }
        } else {
            let (sign, mag) = num.into_parts();
            Self {
                num: BigInt::from_biguint(sign, mag / &g),
                den: den / g,
            }
        }
    }

    pub fn zero() -> Self {
        Self {
            num: BigInt::zero(),
            den: BigUint::one(),
        }
    }

    pub fn one() -> Self {
        Self::from_integer(BigInt::one())
    }

    pub fn from_integer(n: BigInt) -> Self {
        Self {
            num: n,
            den: BigUint::one(),
        }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_integer(BigInt::from(n))
    }

    /// `n / d` for machine integers; panics if `d == 0`.
    pub fn ratio(n: i64, d: i64) -> Self {
        Self::new(BigInt::from(n), BigInt::from(d)).expect("zero denominator")
    }

    pub fn numer(&self) -> &BigInt {
        &self.num
    }

    pub fn denom(&self) -> &BigUint {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn is_integer(&self) -> bool {
        self.den.is_one()
    }

    pub fn is_negative(&self) -> bool {
        self.num.is_negative()
    }

    pub fn is_positive(&self) -> bool {
        self.num.is_positive()
    }

    pub fn abs(&self) -> Self {
        Self {
            num: self.num.abs(),
            den: self.den.clone(),
        }
    }

    pub fn recip(&self) -> Option<Self> {
        if self.num.is_zero() {
            return None;
        }
        let (sign, mag) = self.num.clone().into_parts();
        Some(Self {
            num: BigInt::from_biguint(sign, self.den.clone()),
            den: mag,
        })
    }

    /// Largest integer not exceeding the value.
    pub fn floor(&self) -> BigInt {
        self.num.div_floor(&BigInt::from(self.den.clone()))
    }

    /// The exact value of a finite `f64`; `None` for NaN and infinities.
    pub fn from_f64(x: f64) -> Option<Self> {
        if !x.is_finite() {
            return None;
        }
        if x == 0.0 {
            return Some(Self::zero());
        }
        let bits = x.to_bits();
        let negative = bits >> 63 == 1;
        let biased = ((bits >> 52) & 0x7ff) as i64;
        let fraction = bits & ((1u64 << 52) - 1);
        let (mut mantissa, mut exp) = if biased == 0 {
            (fraction, -1074i64)
        } else {
            (fraction | (1u64 << 52), biased - 1075)
        };
        // Strip factors of two so the result is already canonical.
        let tz = mantissa.trailing_zeros() as i64;
        mantissa >>= tz;
        exp += tz;
        let mag = BigUint::from(mantissa);
        let (num, den) = if exp >= 0 {
            (mag << (exp as usize), BigUint::one())
        } else {
            (mag, BigUint::one() << ((-exp) as usize))
        };
        let sign = if negative { Sign::Minus } else { Sign::Plus };
        Some(Self {
            num: BigInt::from_biguint(sign, num),
            den,
        })
    }

    /// Nearest `f64` (within one ulp); saturates to infinity or zero outside
    /// the representable range.
    pub fn to_f64(&self) -> f64 {
        if self.num.is_zero() {
            return 0.0;
        }
        let negative = self.num.is_negative();
        let n = self.num.magnitude();
        let d = &self.den;
        let nb = n.bits() as i64;
        let db = d.bits() as i64;
        // Scale so the integer quotient carries 66 significant bits.
        let shift = 66 - (nb - db);
        let q = if shift >= 0 {
            (n << (shift as usize)) / d
        } else {
            (n >> ((-shift) as usize)) / d
        };
        let q = q.to_u128().unwrap_or(u128::MAX) as f64;
        let e = (-shift).clamp(-4000, 4000) as i32;
        let v = libm::ldexp(q, e);
        if negative {
            -v
        } else {
            v
        }
    }

    /// Always `p/q`, including `q = 1`; used for serialized reports.
    pub fn to_fraction_string(&self) -> String {
        let mut s = self.num.to_string();
        s.push('/');
        s.push_str(&self.den.to_string());
        s
    }

    /// Bit length of the numerator's magnitude.
    pub fn numer_bits(&self) -> u64 {
        self.num.bits()
    }

    pub fn pow(&self, e: u32) -> Self {
        Self {
            num: num_traits::pow(self.num.clone(), e as usize),
            den: num_traits::pow(self.den.clone(), e as usize),
        }
    }

    pub fn checked_div(&self, rhs: &Self) -> Option<Self> {
        rhs.recip().map(|r| self * &r)
    }
}

impl Default for ExactRational {
    fn default() -> Self {
        Self::zero()
    }
}

impl From<i64> for ExactRational {
    fn from(n: i64) -> Self {
        Self::from_i64(n)
    }
}

impl From<BigInt> for ExactRational {
    fn from(n: BigInt) -> Self {
        Self::from_integer(n)
    }
}

impl From<BigUint> for ExactRational {
    fn from(n: BigUint) -> Self {
        Self::from_integer(BigInt::from(n))
    }
}

impl fmt::Display for ExactRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den.is_one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "{}/{}", self.num, self.den)
        }
    }
}

impl FromStr for ExactRational {
    type Err = ParseRationalError;

    /// Accepts `p/q`, integers, and decimal literals with an optional
    /// exponent (`-1.25e-3`). Decimal literals are converted exactly.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || ParseRationalError(s.to_string());
        if let Some((p, q)) = s.split_once('/') {
            let p = BigInt::from_str(p.trim()).map_err(|_| err())?;
            let q = BigInt::from_str(q.trim()).map_err(|_| err())?;
            return Self::new(p, q).ok_or_else(err);
        }
        let (mantissa, exponent) = match s.find(['e', 'E']) {
            Some(i) => (&s[..i], s[i + 1..].parse::<i64>().map_err(|_| err())?),
            None => (s, 0),
        };
        let (negative, digits) = match mantissa.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
        };
        let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let mut all: Vec<u8> = int_part.bytes().chain(frac_part.bytes()).collect();
        if all.is_empty() {
            all.push(b'0');
        }
        let mag = BigUint::parse_bytes(&all, 10).ok_or_else(err)?;
        let scale = exponent - frac_part.len() as i64;
        if scale.unsigned_abs() > 100_000 {
            return Err(err());
        }
        let ten = BigUint::from(10u32);
        let sign = if negative { Sign::Minus } else { Sign::Plus };
        let value = if scale >= 0 {
            Self::from_integer(BigInt::from_biguint(sign, mag * num_traits::pow(ten, scale as usize)))
        } else {
            Self::reduce(
                BigInt::from_biguint(sign, mag),
                num_traits::pow(ten, (-scale) as usize),
            )
        };
        Ok(value)
    }
}

impl PartialOrd for ExactRational {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExactRational {
    fn cmp(&self, other: &Self) -> Ordering {
        if self.den == other.den {
            return self.num.cmp(&other.num);
        }
        let lhs = &self.num * BigInt::from(other.den.clone());
        let rhs = &other.num * BigInt::from(self.den.clone());
        lhs.cmp(&rhs)
    }
}

impl<'a> Add<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn add(self, rhs: &ExactRational) -> ExactRational {
        if self.den == rhs.den {
            return ExactRational::reduce(&self.num + &rhs.num, self.den.clone());
        }
        let num = &self.num * BigInt::from(rhs.den.clone()) + &rhs.num * BigInt::from(self.den.clone());
        ExactRational::reduce(num, &self.den * &rhs.den)
    }
}

impl<'a> Sub<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn sub(self, rhs: &ExactRational) -> ExactRational {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    fn mul(self, rhs: &ExactRational) -> ExactRational {
        if self.num.is_zero() || rhs.num.is_zero() {
            return ExactRational::zero();
        }
        // Cross-cancel first so the product is canonical without a big gcd.
        let g1 = gcd(self.num.magnitude(), &rhs.den);
        let g2 = gcd(rhs.num.magnitude(), &self.den);
        let a = if g1.is_one() { self.num.clone() } else { &self.num / BigInt::from(g1.clone()) };
        let d = if g1.is_one() { rhs.den.clone() } else { &rhs.den / &g1 };
        let c = if g2.is_one() { rhs.num.clone() } else { &rhs.num / BigInt::from(g2.clone()) };
        let b = if g2.is_one() { self.den.clone() } else { &self.den / &g2 };
        ExactRational { num: a * c, den: b * d }
    }
}

impl<'a> Div<&'a ExactRational> for &'a ExactRational {
    type Output = ExactRational;
    /// Panics on division by zero; use [`ExactRational::checked_div`] otherwise.
    fn div(self, rhs: &ExactRational) -> ExactRational {
        self.checked_div(rhs).expect("division by zero rational")
    }
}

impl Neg for &ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational {
            num: -&self.num,
            den: self.den.clone(),
        }
    }
}

impl Neg for ExactRational {
    type Output = ExactRational;
    fn neg(self) -> ExactRational {
        ExactRational {
            num: -self.num,
            den: self.den,
        }
    }
}

macro_rules! forward_owned {
    ($($tr:ident $m:ident),*) => {$(
        impl $tr<ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: ExactRational) -> ExactRational { (&self).$m(&rhs) }
        }
        impl<'a> $tr<&'a ExactRational> for ExactRational {
            type Output = ExactRational;
            fn $m(self, rhs: &ExactRational) -> ExactRational { (&self).$m(rhs) }
        }
    )*};
}
forward_owned!(Add add, Sub sub, Mul mul, Div div);
