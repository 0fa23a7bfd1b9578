use num_bigint::{BigInt, BigUint};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use uat_topo_core::{ErrorCertificate, ExactRational};

pub const SCHEMA_VERSION: &str = "1";

/// Integers above this many bits are written in hex; decimal conversion is
/// quadratic and some lookup indices run to millions of bits.
pub const DECIMAL_BITS_LIMIT: u64 = 1 << 20;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema_version: String,
    pub command: String,
    pub inputs_echo: Value,
    pub results: Value,
    pub certificate: Option<Certificate>,
    pub timing_ms: u64,
}

impl RunReport {
    /// Pretty JSON with a trailing newline.
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("reports are plain data");
        s.push('\n');
        s
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub grid_size: usize,
    pub max_abs_error: f64,
    pub epsilon: f64,
    pub passed: bool,
}

impl From<&ErrorCertificate> for Certificate {
    fn from(c: &ErrorCertificate) -> Self {
        Certificate {
            grid_size: c.grid_size,
            max_abs_error: c.max_abs_error,
            epsilon: c.epsilon,
            passed: c.passed,
        }
    }
}

pub fn uint_text(n: &BigUint) -> String {
    if n.bits() <= DECIMAL_BITS_LIMIT {
        n.to_string()
    } else {
        format!("0x{}", n.to_str_radix(16))
    }
}

pub fn int_text(n: &BigInt) -> String {
    let (sign, mag) = (n.sign(), n.magnitude());
    let body = uint_text(mag);
    if sign == num_bigint::Sign::Minus {
        format!("-{body}")
    } else {
        body
    }
}

/// `p/q`, always with the slash.
pub fn rational_text(q: &ExactRational) -> String {
    format!("{}/{}", int_text(q.numer()), uint_text(q.denom()))
}

/// Parses what [`uint_text`] writes.
pub fn parse_uint_text(s: &str) -> Option<BigUint> {
    match s.strip_prefix("0x") {
        Some(hex) => BigUint::parse_bytes(hex.as_bytes(), 16),
        None => BigUint::parse_bytes(s.as_bytes(), 10),
    }
}

/// Number of decimal digits of `n` (1 for zero), without printing it.
pub fn decimal_digits(n: &BigUint) -> u64 {
    let bits = n.bits();
    if bits == 0 {
        return 1;
    }
    let k = ((bits - 1) as f64 * std::f64::consts::LOG10_2).floor() as u32;
    // 10^k ≤ n < 10^(k+2) always holds; one comparison settles it.
    if *n >= pow10(k + 1) {
        k as u64 + 2
    } else {
        k as u64 + 1
    }
}

fn pow10(e: u32) -> BigUint {
    BigUint::from(10u32).pow(e)
}
