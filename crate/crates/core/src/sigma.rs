//! The superactivation function σ.
//!
//! With scale `α > 0` the real line is cut into
//!
//! * the left tail `(-∞, α]`, where σ is the constant `p_1(0)`;
//! * segments `[(2m-1)α, 2mα]`, `m ≥ 1`, where `σ(α t + (2m-1)α) = p_m(H(t))`
//!   for `t ∈ [0, 1]` with `p_m` the `m`-th enumerated polynomial;
//! * gaps `(2mα, (2m+1)α)`, where σ blends `σ(2mα)` into `σ((2m+1)α)` with a
//!   smooth step built from `β(t) = e^{-1/t}`.
//!
//! `H` is the identity in [`SigmaMode::PaperLiteral`] (continuous, generally
//! with derivative jumps at junctions) and the flat reparameterization
//! [`FlattenMap`] in [`SigmaMode::SmoothGlued`], which kills every derivative
//! at segment ends.
//!
//! Segment indices are arbitrary-precision, so points are located with exact
//! rational arithmetic and never through a float `t`.

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::Zero;

use crate::chebyshev::gauss_legendre;
use crate::enumeration::{nat_to_poly, EnumIndex};
use crate::poly::RationalPoly;
use crate::rational::ExactRational;
use crate::{Error, Result};

/// `β(t) = e^{-1/t}` for `t > 0`, else `0`.
///
/// Arguments at or below `1e-300` return 0 directly; the true value
/// underflows long before that.
pub fn beta(t: f64) -> f64 {
    if t <= 1e-300 {
        0.0
    } else {
        libm::exp(-1.0 / t)
    }
}

/// Smooth step on `[0, 1]`: 0 for `x ≤ 0`, 1 for `x ≥ 1`, `1/2` at `1/2`.
pub fn blend(x: f64) -> f64 {
    let l = beta(x);
    let r = beta(1.0 - x);
    if l == 0.0 {
        0.0
    } else if r == 0.0 {
        1.0
    } else {
        l / (l + r)
    }
}

/// The gap blend `ω` around gap `m`: 0 up to `2mα`, 1 from `(2m+1)α` on.
pub fn omega(t: &ExactRational, m: &EnumIndex, alpha: &ExactRational) -> f64 {
    let start = alpha * &ExactRational::from(BigUint::from(2u32) * &m.0);
    let x = (t - &start).checked_div(alpha).expect("alpha is positive");
    blend(x.to_f64())
}

/// Which reparameterization of the segment polynomials σ uses.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Default)]
pub enum SigmaMode {
    /// `σ(α t + (2m-1)α) = p_m(t)` exactly.
    #[default]
    PaperLiteral,
    /// `σ(α t + (2m-1)α) = p_m(h(t))` with `h` flat at both ends.
    SmoothGlued,
}

impl SigmaMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SigmaMode::PaperLiteral => "literal",
            SigmaMode::SmoothGlued => "smooth",
        }
    }
}

impl fmt::Display for SigmaMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SigmaMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "literal" => Ok(SigmaMode::PaperLiteral),
            "smooth" => Ok(SigmaMode::SmoothGlued),
            other => Err(Error::InvalidArgument(alloc::format!(
                "unknown sigma mode `{other}` (expected literal or smooth)"
            ))),
        }
    }
}

const FLATTEN_PANELS: usize = 4096;
const FLATTEN_ORDER: usize = 8;

/// `h(t) = ∫_0^t e^{-1/(s(1-s))} ds / ∫_0^1 e^{-1/(s(1-s))} ds`.
///
/// The integrand is `β(s)·β(1-s)`, so `h` is a smooth increasing bijection of
/// `[0, 1]` whose derivatives all vanish at both ends. Evaluated by composite
/// Gauss–Legendre quadrature on narrow panels with precomputed panel sums, so
/// each evaluation integrates over at most one panel.
#[derive(Clone, Debug, PartialEq)]
pub struct FlattenMap {
    nodes: Vec<f64>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
}

fn flat_integrand(s: f64) -> f64 {
    if s <= 0.0 || s >= 1.0 {
        0.0
    } else {
        beta(s * (1.0 - s))
    }
}

const PANEL_WIDTH: f64 = 1.0 / FLATTEN_PANELS as f64;

impl FlattenMap {
    pub fn new() -> Self {
        let (nodes, weights) = gauss_legendre(FLATTEN_ORDER);
        let mut map = FlattenMap {
            nodes,
            weights,
            cumulative: Vec::with_capacity(FLATTEN_PANELS + 1),
        };
        let mut acc = 0.0;
        map.cumulative.push(0.0);
        for i in 0..FLATTEN_PANELS {
            let a = i as f64 * PANEL_WIDTH;
            acc += map.integrate(a, a + PANEL_WIDTH);
            map.cumulative.push(acc);
        }
        map
    }

    fn integrate(&self, a: f64, b: f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * flat_integrand(mid + half * x))
            .sum::<f64>()
            * half
    }

    /// `∫_0^1 e^{-1/(s(1-s))} ds`.
    pub fn total(&self) -> f64 {
        self.cumulative[FLATTEN_PANELS]
    }

    /// `h(t)`; `t` outside `[0, 1]` is rejected.
    pub fn h(&self, t: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::OutOfDomain { value: t, lo: 0.0, hi: 1.0 });
        }
        Ok(self.h_unchecked(t))
    }

    fn h_unchecked(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if t >= 1.0 {
            return 1.0;
        }
        let i = ((t / PANEL_WIDTH) as usize).min(FLATTEN_PANELS - 1);
        let a = i as f64 * PANEL_WIDTH;
        let v = (self.cumulative[i] + self.integrate(a, t)) / self.total();
        v.clamp(0.0, 1.0)
    }

    /// `h'(t)`.
    pub fn derivative(&self, t: f64) -> f64 {
        flat_integrand(t) / self.total()
    }

    /// `h⁻¹(s)` to an absolute tolerance of `1e-14`.
    ///
    /// Bisection on the panel table brackets the root within one panel;
    /// inside it, Newton steps are taken while they stay in the bracket and
    /// bisection otherwise.
    pub fn h_inv(&self, s: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&s) {
            return Err(Error::OutOfDomain { value: s, lo: 0.0, hi: 1.0 });
        }
        if s == 0.0 || s == 1.0 {
            return Ok(s);
        }
        let target = s * self.total();
        let (mut lo_i, mut hi_i) = (0usize, FLATTEN_PANELS);
        while hi_i - lo_i > 1 {
            let mid = (lo_i + hi_i) / 2;
            if self.cumulative[mid] < target {
                lo_i = mid;
            } else {
                hi_i = mid;
            }
        }
        let (mut lo, mut hi) = (lo_i as f64 * PANEL_WIDTH, hi_i as f64 * PANEL_WIDTH);
        let mut x = 0.5 * (lo + hi);
        while hi - lo > 1e-14 {
            let f = self.h_unchecked(x) - s;
            if f < 0.0 {
                lo = x;
            } else if f > 0.0 {
                hi = x;
            } else {
                return Ok(x);
            }
            let d = self.derivative(x);
            let newton = if d > 0.0 { x - f / d } else { f64::NAN };
            if newton > lo && newton < hi && (newton - x).abs() < 0.5 * (hi - lo) {
                if (newton - x).abs() < 1e-16 {
                    return Ok(newton);
                }
                x = newton;
            } else {
                x = 0.5 * (lo + hi);
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

impl Default for FlattenMap {
    fn default() -> Self {
        Self::new()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SigmaConfig {
    pub alpha: ExactRational,
    pub mode: SigmaMode,
}

impl SigmaConfig {
    pub fn new(alpha: ExactRational, mode: SigmaMode) -> Result<Self> {
        if !alpha.is_positive() {
            return Err(Error::InvalidArgument(alloc::format!(
                "alpha must be positive, got {alpha}"
            )));
        }
        Ok(SigmaConfig { alpha, mode })
    }
}

impl Default for SigmaConfig {
    fn default() -> Self {
        SigmaConfig {
            alpha: ExactRational::one(),
            mode: SigmaMode::default(),
        }
    }
}

/// A point `α·tau + (2m-1)·α` on segment `m`, kept symbolic.
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentCoord {
    pub m: EnumIndex,
    pub tau: f64,
}

impl SegmentCoord {
    pub fn new(m: EnumIndex, tau: f64) -> Self {
        SegmentCoord { m, tau }
    }

    /// The global coordinate `α(2m - 1 + tau)` for a rational `tau`.
    pub fn global(m: &EnumIndex, tau: &ExactRational, alpha: &ExactRational) -> ExactRational {
        let base = ExactRational::from(BigInt::from(&m.0 * 2u32) - 1);
        alpha * &(&base + tau)
    }
}

/// Where a global point falls.
#[derive(Clone, Debug, PartialEq)]
pub enum Location {
    Tail,
    /// On segment `m` at local coordinate `tau ∈ [0, 1)`.
    Segment { m: EnumIndex, tau: ExactRational },
    /// In the gap after segment `m` at local coordinate `x ∈ [0, 1)`.
    Gap { m: EnumIndex, x: ExactRational },
}

/// The superactivation function for a given scale and gluing mode.
#[derive(Clone, Debug, PartialEq)]
pub struct Superactivation {
    config: SigmaConfig,
    flatten: FlattenMap,
}

impl Superactivation {
    pub fn new(config: SigmaConfig) -> Self {
        Superactivation {
            config,
            flatten: FlattenMap::new(),
        }
    }

    pub fn with_mode(mode: SigmaMode) -> Self {
        Self::new(SigmaConfig {
            alpha: ExactRational::one(),
            mode,
        })
    }

    pub fn config(&self) -> &SigmaConfig {
        &self.config
    }

    pub fn alpha(&self) -> &ExactRational {
        &self.config.alpha
    }

    pub fn mode(&self) -> SigmaMode {
        self.config.mode
    }

    pub fn flatten(&self) -> &FlattenMap {
        &self.flatten
    }

    /// The same σ at a different scale.
    pub fn rescaled(&self, alpha: ExactRational) -> Result<Self> {
        Ok(Superactivation {
            config: SigmaConfig::new(alpha, self.config.mode)?,
            flatten: self.flatten.clone(),
        })
    }

    /// The inner reparameterization `H`: identity or `h`.
    pub fn reparam(&self, tau: f64) -> f64 {
        match self.config.mode {
            SigmaMode::PaperLiteral => tau,
            SigmaMode::SmoothGlued => self.flatten.h_unchecked(tau),
        }
    }

    /// The value on the left tail, `p_1(0)`.
    pub fn tail_value(&self) -> f64 {
        poly_at(&decode(&EnumIndex::from(1)), 0.0)
    }

    pub fn locate(&self, t: &ExactRational) -> Location {
        let alpha = &self.config.alpha;
        let scaled = t.checked_div(alpha).expect("alpha is positive");
        if scaled <= ExactRational::one() {
            return Location::Tail;
        }
        let k = scaled.floor();
        let frac = &scaled - &ExactRational::from(k.clone());
        let (half, odd) = k.div_rem(&BigInt::from(2));
        let half = half.magnitude().clone();
        if odd.is_zero() {
            Location::Gap { m: EnumIndex(half), x: frac }
        } else {
            Location::Segment { m: EnumIndex(half + 1u32), tau: frac }
        }
    }

    /// `σ(α·tau + (2m-1)α) = p_m(H(tau))`.
    pub fn eval_segment(&self, c: &SegmentCoord) -> Result<f64> {
        if !(0.0..=1.0).contains(&c.tau) {
            return Err(Error::OutOfDomain { value: c.tau, lo: 0.0, hi: 1.0 });
        }
        if c.m.0.is_zero() {
            return Err(Error::InvalidArgument("segment index must be at least 1".into()));
        }
        let p = nat_to_poly(&c.m)?;
        Ok(poly_at(&p, self.reparam(c.tau)))
    }

    /// Exact segment value in [`SigmaMode::PaperLiteral`]; `None` in the
    /// smooth mode, whose reparameterization is not rational.
    pub fn eval_segment_exact(&self, m: &EnumIndex, tau: &ExactRational) -> Result<Option<ExactRational>> {
        if self.config.mode != SigmaMode::PaperLiteral {
            return Ok(None);
        }
        if m.0.is_zero() {
            return Err(Error::InvalidArgument("segment index must be at least 1".into()));
        }
        Ok(Some(nat_to_poly(m)?.eval(tau)))
    }

    /// The blend between `σ(2mα) = p_m(1)` and `σ((2m+1)α) = p_{m+1}(0)` at
    /// local gap coordinate `x ∈ [0, 1]`.
    pub fn eval_gap(&self, m: &EnumIndex, x: f64) -> Result<f64> {
        let left = nat_to_poly(m)?.eval_at_one().to_f64();
        let right = nat_to_poly(&EnumIndex(&m.0 + 1u32))?.constant_term().to_f64();
        let w = blend(x);
        Ok((1.0 - w) * left + w * right)
    }

    /// σ at an exact global point.
    pub fn eval_global(&self, t: &ExactRational) -> Result<f64> {
        match self.locate(t) {
            Location::Tail => Ok(self.tail_value()),
            Location::Segment { m, tau } => match self.config.mode {
                SigmaMode::PaperLiteral => Ok(nat_to_poly(&m)?.eval(&tau).to_f64()),
                SigmaMode::SmoothGlued => self.eval_segment(&SegmentCoord::new(m, tau.to_f64())),
            },
            Location::Gap { m, x } => self.eval_gap(&m, x.to_f64()),
        }
    }

    /// Exact σ where it is rational: the tail, segment ends, and whole
    /// segments in literal mode.
    pub fn eval_global_exact(&self, t: &ExactRational) -> Result<Option<ExactRational>> {
        match self.locate(t) {
            Location::Tail => Ok(Some(decode(&EnumIndex::from(1)).constant_term())),
            Location::Segment { m, tau } => self.eval_segment_exact(&m, &tau),
            // The left end of a gap is the right end of segment m, where
            // both modes give p_m(1).
            Location::Gap { m, x } if x.is_zero() => Ok(Some(nat_to_poly(&m)?.eval_at_one())),
            Location::Gap { .. } => Ok(None),
        }
    }

    /// σ at a float point; convenient for moderate arguments only.
    pub fn eval_f64(&self, t: f64) -> f64 {
        match ExactRational::from_f64(t) {
            Some(t) => self.eval_global(&t).unwrap_or(f64::NAN),
            None => f64::NAN,
        }
    }

    /// Checks the segment identity and junction behavior for `m ≤ m_max`.
    pub fn self_check(&self, m_max: u64, grid: usize) -> Result<SelfCheckReport> {
        if m_max < 1 || grid < 2 {
            return Err(Error::InvalidArgument("self check needs m_max >= 1 and grid >= 2".into()));
        }
        let alpha = &self.config.alpha;
        let alpha_f = alpha.to_f64();
        let step = ExactRational::ratio(1, 10_000);
        let step_f = step.to_f64() * alpha_f;
        let step_global = alpha * &step;
        let mut segments = Vec::with_capacity(m_max as usize);
        let mut polys: Vec<RationalPoly> = Vec::with_capacity(m_max as usize + 1);
        for m in 1..=m_max + 1 {
            polys.push(nat_to_poly(&EnumIndex::from(m))?);
        }
        let denom = (grid - 1) as i64;
        for m in 1..=m_max {
            let idx = EnumIndex::from(m);
            let p = &polys[(m - 1) as usize];
            let mut deviation = 0.0f64;
            let mut sup = 0.0f64;
            for i in 0..grid {
                let tau = ExactRational::ratio(i as i64, denom);
                let t = SegmentCoord::global(&idx, &tau, alpha);
                let dev = match self.config.mode {
                    SigmaMode::PaperLiteral => {
                        let reference = p.eval(&tau);
                        let got = self.eval_global_exact(&t)?.unwrap_or_default();
                        sup = sup.max(reference.to_f64().abs());
                        (&got - &reference).abs().to_f64()
                    }
                    SigmaMode::SmoothGlued => {
                        let reference = poly_at(p, self.flatten.h_unchecked(tau.to_f64()));
                        sup = sup.max(reference.abs());
                        (self.eval_global(&t)? - reference).abs()
                    }
                };
                deviation = deviation.max(dev);
            }
            let next = &polys[m as usize];
            let at_end = poly_at(p, self.reparam(1.0));
            let gap_start = self.eval_gap(&idx, 0.0)?;
            let gap_end = self.eval_gap(&idx, 1.0)?;
            let next_start = poly_at(next, self.reparam(0.0));
            let left_junction = ExactRational::from(BigUint::from(2 * m)) * alpha;
            let right_junction = ExactRational::from(BigUint::from(2 * m + 1)) * alpha;
            let (d1_left, d2_left) = self.finite_differences(&left_junction, &step_global, step_f)?;
            let (d1_right, d2_right) = self.finite_differences(&right_junction, &step_global, step_f)?;
            segments.push(SegmentCheck {
                m,
                deviation,
                poly_sup: sup,
                junction_gap_left: (at_end - gap_start).abs(),
                junction_gap_right: (gap_end - next_start).abs(),
                first_derivative: d1_left.abs().max(d1_right.abs()),
                second_derivative: d2_left.abs().max(d2_right.abs()),
            });
        }
        Ok(SelfCheckReport::new(self.config.mode, alpha.clone(), m_max, grid, segments))
    }

    fn finite_differences(&self, t: &ExactRational, step: &ExactRational, step_f: f64) -> Result<(f64, f64)> {
        let lo = self.eval_global(&(t - step))?;
        let mid = self.eval_global(t)?;
        let hi = self.eval_global(&(t + step))?;
        Ok(((hi - lo) / (2.0 * step_f), (hi - 2.0 * mid + lo) / (step_f * step_f)))
    }
}

impl Default for Superactivation {
    fn default() -> Self {
        Self::new(SigmaConfig::default())
    }
}

fn decode(m: &EnumIndex) -> RationalPoly {
    nat_to_poly(m).expect("small indices always decode")
}

/// Evaluates a decoded polynomial at a float point without losing accuracy
/// to large or cancelling coefficients: the point is taken exactly and the
/// result is rounded once.
pub(crate) fn poly_at(p: &RationalPoly, t: f64) -> f64 {
    match p.degree() {
        None => 0.0,
        Some(0) => p.coeffs()[0].to_f64(),
        Some(_) => match ExactRational::from_f64(t) {
            Some(t) => p.eval(&t).to_f64(),
            None => f64::NAN,
        },
    }
}

/// Per-segment results of [`Superactivation::self_check`].
#[derive(Clone, Debug, PartialEq)]
pub struct SegmentCheck {
    pub m: u64,
    /// Max deviation of σ on the segment grid from `p_m(H(tau))`.
    pub deviation: f64,
    /// Max `|p_m(H(tau))|` seen on the grid.
    pub poly_sup: f64,
    /// `|σ(2mα⁻) − σ(2mα⁺)|` from the segment and gap formulas.
    pub junction_gap_left: f64,
    /// `|σ((2m+1)α⁻) − σ((2m+1)α⁺)|`.
    pub junction_gap_right: f64,
    /// Largest central-difference `|σ'|` at the two junctions.
    pub first_derivative: f64,
    /// Largest central-difference `|σ''|` at the two junctions.
    pub second_derivative: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfCheckReport {
    pub mode: SigmaMode,
    pub alpha: ExactRational,
    pub m_max: u64,
    pub grid: usize,
    pub max_deviation: f64,
    pub max_junction_gap: f64,
    /// Max over junctions of `|σ'| / (1 + poly_sup)`.
    pub max_first_derivative_ratio: f64,
    /// Max over junctions of `|σ''| / (1 + poly_sup)`.
    pub max_second_derivative_ratio: f64,
    pub segments: Vec<SegmentCheck>,
}

impl SelfCheckReport {
    fn new(mode: SigmaMode, alpha: ExactRational, m_max: u64, grid: usize, segments: Vec<SegmentCheck>) -> Self {
        let fold = |f: &dyn Fn(&SegmentCheck) -> f64| segments.iter().map(f).fold(0.0f64, f64::max);
        SelfCheckReport {
            mode,
            alpha,
            m_max,
            grid,
            max_deviation: fold(&|s| s.deviation),
            max_junction_gap: fold(&|s| s.junction_gap_left.max(s.junction_gap_right)),
            max_first_derivative_ratio: fold(&|s| s.first_derivative / (1.0 + s.poly_sup)),
            max_second_derivative_ratio: fold(&|s| s.second_derivative / (1.0 + s.poly_sup)),
            segments,
        }
    }

    pub fn mode_name(&self) -> String {
        String::from(self.mode.as_str())
    }
}
