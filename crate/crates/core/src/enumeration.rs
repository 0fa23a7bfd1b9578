//! A total enumeration `n ↦ p_n` of all polynomials with rational coefficients.
//!
//! Layout (see `docs/enumeration.md` for worked values):
//!
//! * `pair(a, b) = (a+b)(a+b+1)/2 + b` is the Cantor pairing.
//! * A rational `num/den` has code `pair(zigzag(num), den - 1)`, where
//!   `zigzag` sends `0, -1, 1, -2, 2, …` to `0, 1, 2, 3, 4, …`. Decoding any
//!   natural reduces the fraction, so every natural names some rational.
//! * Index 0 is the zero polynomial. Index `n ≥ 1` splits as
//!   `(d, r) = unpair(n - 1)`; `r` is unfolded into `d + 1` coefficient codes
//!   by a balanced binary tree of pairings, constant term first, and trailing
//!   zero coefficients are dropped.
//!
//! Balancing the tree keeps `log2(index)` roughly `deg · Σ log2(codes)`
//! instead of the `2^deg` blowup that right-nested pairing would cause.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::{One, ToPrimitive, Zero};

use crate::poly::RationalPoly;
use crate::rational::ExactRational;
use crate::{Error, Result};

/// Largest polynomial degree `nat_to_poly` will materialize.
pub const MAX_DECODED_DEGREE: usize = 1 << 20;

/// Position of a polynomial in the enumeration; also the segment index of σ.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug, Default)]
pub struct EnumIndex(pub BigUint);

impl EnumIndex {
    pub fn new(n: impl Into<BigUint>) -> Self {
        EnumIndex(n.into())
    }

    pub fn value(&self) -> &BigUint {
        &self.0
    }

    pub fn bits(&self) -> u64 {
        self.0.bits()
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }
}

impl From<u64> for EnumIndex {
    fn from(n: u64) -> Self {
        EnumIndex(BigUint::from(n))
    }
}

impl fmt::Display for EnumIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(&self.0, f)
    }
}

pub fn pair(a: &BigUint, b: &BigUint) -> BigUint {
    let s = a + b;
    let tri = (&s * (&s + 1u32)) >> 1usize;
    tri + b
}

pub fn unpair(n: &BigUint) -> (BigUint, BigUint) {
    let w = (((n << 3usize) + 1u32).sqrt() - 1u32) >> 1usize;
    let t = (&w * (&w + 1u32)) >> 1usize;
    let b = n - t;
    let a = w - &b;
    (a, b)
}

pub fn pair_u64(a: u64, b: u64) -> BigUint {
    pair(&BigUint::from(a), &BigUint::from(b))
}

fn zigzag(v: &BigInt) -> BigUint {
    match v.sign() {
        Sign::Minus => (v.magnitude() << 1usize) - 1u32,
        _ => v.magnitude() << 1usize,
    }
}

fn unzigzag(x: &BigUint) -> BigInt {
    if x.bit(0) {
        -BigInt::from((x + 1u32) >> 1usize)
    } else {
        BigInt::from(x >> 1usize)
    }
}

/// Decodes any natural to a rational; non-canonical pairs are reduced.
pub fn nat_to_rational(n: &BigUint) -> ExactRational {
    let (x, y) = unpair(n);
    ExactRational::from_parts(unzigzag(&x), y + 1u32).expect("denominator is at least one")
}

/// The canonical code of `q`; `nat_to_rational` inverts it.
pub fn rational_to_nat(q: &ExactRational) -> BigUint {
    pair(&zigzag(q.numer()), &(q.denom() - 1u32))
}

fn encode_tuple(codes: &[BigUint]) -> BigUint {
    match codes.len() {
        0 => BigUint::zero(),
        1 => codes[0].clone(),
        k => {
            let h = k.div_ceil(2);
            pair(&encode_tuple(&codes[..h]), &encode_tuple(&codes[h..]))
        }
    }
}

/// Unfolds `code` into `len` leaves, recording only nonzero leaves together
/// with their absolute position.
///
/// Fails as soon as a nonzero leaf would sit past [`MAX_DECODED_DEGREE`]. The
/// left code shrinks to about the square root at every level and `1` is a
/// fixed point of the left projection, so even astronomically long tuples
/// are walked in a handful of steps.
fn decode_tuple_sparse(
    code: BigUint,
    len: BigUint,
    offset: BigUint,
    out: &mut Vec<(BigUint, BigUint)>,
) -> Result<()> {
    if code.is_zero() {
        return Ok(());
    }
    if offset > BigUint::from(MAX_DECODED_DEGREE) {
        return Err(Error::DegreeTooLarge { bits: offset.bits() });
    }
    if len.is_one() || code.is_one() {
        out.push((offset, code));
        return Ok(());
    }
    let h = (&len + 1u32) >> 1usize;
    let (left, right) = unpair(&code);
    let right_offset = &offset + &h;
    decode_tuple_sparse(left, h.clone(), offset, out)?;
    decode_tuple_sparse(right, len - h, right_offset, out)
}

/// Decodes an enumeration index to its polynomial.
///
/// Every index decodes; the only failure is an index whose highest nonzero
/// coefficient sits beyond [`MAX_DECODED_DEGREE`], which cannot be stored
/// densely.
pub fn nat_to_poly(n: &EnumIndex) -> Result<RationalPoly> {
    if n.0.is_zero() {
        return Ok(RationalPoly::zero());
    }
    let (d, r) = unpair(&(&n.0 - 1u32));
    let mut leaves = Vec::new();
    decode_tuple_sparse(r, d + 1u32, BigUint::zero(), &mut leaves)?;
    let positions: Vec<usize> = leaves
        .iter()
        .map(|(pos, _)| pos.to_usize().expect("bounded by MAX_DECODED_DEGREE"))
        .collect();
    let len = positions.iter().max().map_or(0, |&p| p + 1);
    let mut coeffs = vec![ExactRational::zero(); len];
    for (p, (_, code)) in positions.into_iter().zip(leaves) {
        coeffs[p] = nat_to_rational(&code);
    }
    Ok(RationalPoly::new(coeffs))
}

/// The canonical index of `p`; the zero polynomial maps to 0.
pub fn poly_to_nat(p: &RationalPoly) -> EnumIndex {
    let coeffs = p.coeffs();
    if coeffs.is_empty() {
        return EnumIndex(BigUint::zero());
    }
    let codes: Vec<BigUint> = coeffs.iter().map(rational_to_nat).collect();
    let deg = BigUint::from(coeffs.len() - 1);
    EnumIndex(pair(&deg, &encode_tuple(&codes)) + 1u32)
}

/// The σ segment that carries `p`.
///
/// Segments start at 1, so the zero polynomial uses index 1 (which also
/// decodes to zero) rather than its canonical index 0.
pub fn segment_index(p: &RationalPoly) -> EnumIndex {
    if p.is_zero() {
        EnumIndex::from(1u64)
    } else {
        poly_to_nat(p)
    }
}
