//! Single-neuron approximation: find `(m, w, θ)` with `|u(x) − σ(w x − θ)| < ε`
//! on `[a, b]`.
//!
//! The target is pulled back to `[0, 1]`, interpolated at Chebyshev nodes of
//! increasing degree until the grid error is below `ε/2`, rationalized within
//! another `ε/2`, and the resulting polynomial's enumeration index picks the
//! σ segment. The affine map `x ↦ w x − θ` then lands `[a, b]` exactly on
//! that segment.

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::chebyshev;
use crate::contfrac::rationalize_f64;
use crate::enumeration::{segment_index, EnumIndex};
use crate::par;
use crate::poly::{clenshaw_shifted, shifted_chebyshev_to_monomial, PolyEvaluator, RationalPoly};
use crate::rational::ExactRational;
use crate::sigma::{SegmentCoord, SigmaMode, Superactivation};
use crate::{Error, Result};

/// Default cap for the Chebyshev degree scan.
pub const DEFAULT_MAX_DEGREE: usize = 1024;
/// Default number of points in a certification grid.
pub const DEFAULT_CERT_GRID: usize = 10_000;

type Callable = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// A continuous function on `[a, b]`.
#[derive(Clone)]
pub struct TargetFn1D {
    f: Callable,
    a: ExactRational,
    b: ExactRational,
    label: String,
}

impl TargetFn1D {
    pub fn new<F>(label: impl Into<String>, a: ExactRational, b: ExactRational, f: F) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::from_arc(label, a, b, Arc::new(f))
    }

    pub fn from_arc(label: impl Into<String>, a: ExactRational, b: ExactRational, f: Callable) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidArgument(alloc::format!("empty domain [{a}, {b}]")));
        }
        Ok(TargetFn1D { f, a, b, label: label.into() })
    }

    /// Shorthand for a target on `[0, 1]`.
    pub fn unit<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        Self::new(label, ExactRational::zero(), ExactRational::one(), f).expect("unit interval")
    }

    /// The same function on another interval.
    pub fn with_domain(&self, a: ExactRational, b: ExactRational) -> Result<Self> {
        Self::from_arc(self.label.clone(), a, b, self.f.clone())
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }

    pub fn a(&self) -> &ExactRational {
        &self.a
    }

    pub fn b(&self) -> &ExactRational {
        &self.b
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    fn bounds_f64(&self) -> (f64, f64) {
        (self.a.to_f64(), self.b.to_f64())
    }

    /// `t ↦ u(a + (b − a) t)` on `[0, 1]`.
    fn pulled_back(&self) -> impl Fn(f64) -> f64 + Sync + '_ {
        let (a, b) = self.bounds_f64();
        move |t| self.eval(a + (b - a) * t)
    }
}

impl fmt::Debug for TargetFn1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TargetFn1D")
            .field("label", &self.label)
            .field("a", &self.a)
            .field("b", &self.b)
            .finish_non_exhaustive()
    }
}

/// `σ(w x − θ)` parameters; `w` and `θ` are exact.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NeuronParams {
    pub m: EnumIndex,
    pub w: ExactRational,
    pub theta: ExactRational,
    pub mode: SigmaMode,
}

impl NeuronParams {
    /// `w = α/(b − a)` and `θ = α a/(b − a) − (2m − 1) α`.
    pub fn for_segment(m: EnumIndex, alpha: &ExactRational, a: &ExactRational, b: &ExactRational, mode: SigmaMode) -> Self {
        let width = b - a;
        let w = alpha / &width;
        let s = -(alpha * &ExactRational::from(num_bigint::BigInt::from(&m.0 * 2u32) - 1));
        let theta = &(&(alpha * a) / &width) + &s;
        NeuronParams { m, w, theta, mode }
    }
}

/// Outcome of a sampled sup-norm check.
#[derive(Clone, Debug, PartialEq)]
pub struct ErrorCertificate {
    pub grid_size: usize,
    pub max_abs_error: f64,
    pub epsilon: f64,
    pub passed: bool,
}

impl ErrorCertificate {
    pub fn new(grid_size: usize, max_abs_error: f64, epsilon: f64) -> Self {
        ErrorCertificate {
            grid_size,
            max_abs_error,
            epsilon,
            passed: max_abs_error < epsilon,
        }
    }
}

/// A polynomial with float coefficients, on `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub enum FloatPoly {
    Monomial(Vec<f64>),
    /// Coefficients of `T*_j(t) = T_j(2t − 1)`.
    ShiftedChebyshev(Vec<f64>),
}

impl FloatPoly {
    pub fn degree(&self) -> usize {
        match self {
            FloatPoly::Monomial(c) | FloatPoly::ShiftedChebyshev(c) => c.len().saturating_sub(1),
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        match self {
            FloatPoly::Monomial(c) => c.iter().rev().fold(0.0, |acc, &c| acc * t + c),
            FloatPoly::ShiftedChebyshev(c) => clenshaw_shifted(c, t),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChebyshevFit {
    pub poly: FloatPoly,
    pub degree: usize,
    /// Max deviation on the `10·(degree + 1)`-point check grid.
    pub grid_error: f64,
}

fn uniform_grid(n: usize) -> Vec<f64> {
    if n == 1 {
        return alloc::vec![0.5];
    }
    (0..n).map(|i| i as f64 / (n - 1) as f64).collect()
}

/// Max `|p − f|` over `grid`, or `None` as soon as some point reaches `tol`.
///
/// Points are checked in chunks so that failing degrees stop early.
fn grid_error_below<F>(coeffs: &[f64], f: &F, grid: &[f64], tol: f64) -> Option<f64>
where
    F: Fn(f64) -> f64 + Sync,
{
    let mut worst = 0.0f64;
    for chunk in grid.chunks(1024) {
        let errs = par::map(chunk, |&t| clenshaw_shifted(coeffs, t) - f(t));
        let e = par::max_abs(&errs);
        if e.is_nan() || e >= tol {
            return None;
        }
        worst = worst.max(e);
    }
    Some(worst)
}

/// Lowest-degree Chebyshev interpolant of `f` on `[0, 1]` whose error on a
/// `10·(degree + 1)`-point uniform grid is below `tol`.
pub fn chebyshev_fit_unit<F>(f: F, tol: f64, max_degree: usize) -> Result<ChebyshevFit>
where
    F: Fn(f64) -> f64 + Sync,
{
    for degree in 0..=max_degree {
        let coeffs = chebyshev::interpolate(&f, degree);
        let grid = uniform_grid(10 * (degree + 1));
        if let Some(err) = grid_error_below(&coeffs, &f, &grid, tol) {
            return Ok(ChebyshevFit {
                poly: FloatPoly::ShiftedChebyshev(coeffs),
                degree,
                grid_error: err,
            });
        }
    }
    let coeffs = chebyshev::interpolate(&f, max_degree);
    let grid = uniform_grid(10 * (max_degree + 1));
    let errs = par::map(&grid, |&t| clenshaw_shifted(&coeffs, t) - f(t));
    Err(Error::DegreeExhausted { max_degree, best_error: par::max_abs(&errs) })
}

/// Fits `t ↦ u(a + (b − a) t)` to within `eps / 2` on the check grid.
pub fn chebyshev_fit(target: &TargetFn1D, eps: f64, max_degree: usize) -> Result<ChebyshevFit> {
    check_eps(eps)?;
    chebyshev_fit_unit(target.pulled_back(), eps / 2.0, max_degree)
}

fn check_eps(eps: f64) -> Result<()> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(alloc::format!("epsilon must be positive, got {eps}")))
    }
}

/// Rationalized polynomial together with the coefficients used for fast
/// evaluation and the perturbation actually introduced.
#[derive(Clone, Debug, PartialEq)]
pub struct Rationalized {
    pub poly: RationalPoly,
    /// Exact shifted Chebyshev coefficients of `poly`.
    pub chebyshev: Vec<ExactRational>,
    /// `Σ |Δc_j|`, a bound on the sup-norm change over `[0, 1]`.
    pub perturbation: f64,
}

/// Replaces each coefficient by its first continued-fraction convergent
/// within `budget / (degree + 1)`.
///
/// Both bases have basis functions bounded by 1 on `[0, 1]`, so the sup-norm
/// change is at most the budget. Chebyshev input is rationalized in its own
/// basis and converted to monomial form exactly afterwards.
pub fn rationalize_poly(p: &FloatPoly, budget: f64) -> Rationalized {
    let tol = budget / (p.degree() + 1) as f64;
    let round = |c: &[f64]| -> (Vec<ExactRational>, f64) {
        let mut moved = 0.0;
        let q: Vec<ExactRational> = c
            .iter()
            .map(|&x| {
                let r = rationalize_f64(x, tol);
                moved += (r.to_f64() - x).abs();
                r
            })
            .collect();
        (q, moved)
    };
    match p {
        FloatPoly::Monomial(c) => {
            let (q, perturbation) = round(c);
            let poly = RationalPoly::new(q);
            Rationalized {
                chebyshev: crate::poly::monomial_to_shifted_chebyshev(&poly),
                poly,
                perturbation,
            }
        }
        FloatPoly::ShiftedChebyshev(c) => {
            let (q, perturbation) = round(c);
            Rationalized {
                poly: shifted_chebyshev_to_monomial(&q),
                chebyshev: q,
                perturbation,
            }
        }
    }
}

/// A fitted neuron with its segment polynomial cached, so evaluation never
/// decodes a (possibly enormous) index.
#[derive(Clone, Debug)]
pub struct Neuron {
    pub params: NeuronParams,
    a: ExactRational,
    b: ExactRational,
    a_f: f64,
    b_f: f64,
    poly: RationalPoly,
    evaluator: PolyEvaluator,
    sigma: Superactivation,
}

impl Neuron {
    /// Builds a neuron whose segment carries `poly`.
    pub fn from_poly(poly: RationalPoly, sigma: &Superactivation, a: ExactRational, b: ExactRational) -> Result<Self> {
        let chebyshev = crate::poly::monomial_to_shifted_chebyshev(&poly);
        Self::from_parts(poly, &chebyshev, sigma, a, b)
    }

    fn from_parts(
        poly: RationalPoly,
        chebyshev: &[ExactRational],
        sigma: &Superactivation,
        a: ExactRational,
        b: ExactRational,
    ) -> Result<Self> {
        if a >= b {
            return Err(Error::InvalidArgument(alloc::format!("empty domain [{a}, {b}]")));
        }
        let m = segment_index(&poly);
        let params = NeuronParams::for_segment(m, sigma.alpha(), &a, &b, sigma.mode());
        Ok(Neuron {
            params,
            a_f: a.to_f64(),
            b_f: b.to_f64(),
            a,
            b,
            evaluator: PolyEvaluator::from_shifted_chebyshev(chebyshev),
            poly,
            sigma: sigma.clone(),
        })
    }

    pub fn poly(&self) -> &RationalPoly {
        &self.poly
    }

    pub fn domain(&self) -> (&ExactRational, &ExactRational) {
        (&self.a, &self.b)
    }

    pub fn sigma(&self) -> &Superactivation {
        &self.sigma
    }

    /// `σ(w x − θ)` for `x ∈ [a, b]`, computed as `p_m(H(tau))` with
    /// `tau = (x − a)/(b − a)`.
    pub fn eval(&self, x: f64) -> Result<f64> {
        if !(self.a_f..=self.b_f).contains(&x) {
            return Err(Error::OutOfDomain { value: x, lo: self.a_f, hi: self.b_f });
        }
        Ok(self.eval_unchecked(x))
    }

    pub(crate) fn eval_unchecked(&self, x: f64) -> f64 {
        let tau = ((x - self.a_f) / (self.b_f - self.a_f)).clamp(0.0, 1.0);
        self.evaluator.eval(self.sigma.reparam(tau))
    }

    /// Max `|u(x) − σ(w x − θ)|` on `grid` uniform points of `[a, b]`.
    pub fn certify(&self, target: &TargetFn1D, eps: f64, grid: usize) -> ErrorCertificate {
        let grid = grid.max(2);
        let (a, b) = (self.a_f, self.b_f);
        let errs = par::map_range(grid, |i| {
            let x = a + (b - a) * (i as f64 / (grid - 1) as f64);
            target.eval(x) - self.eval_unchecked(x)
        });
        ErrorCertificate::new(grid, par::max_abs(&errs), eps)
    }
}

/// Knobs for [`neuron_lookup_with`].
#[derive(Clone, Debug, PartialEq)]
pub struct LookupOptions {
    pub max_degree: usize,
    pub cert_grid: usize,
}

impl Default for LookupOptions {
    fn default() -> Self {
        LookupOptions {
            max_degree: DEFAULT_MAX_DEGREE,
            cert_grid: DEFAULT_CERT_GRID,
        }
    }
}

/// Everything [`neuron_lookup`] produced, including budget bookkeeping.
#[derive(Clone, Debug)]
pub struct LookupResult {
    pub neuron: Neuron,
    pub certificate: ErrorCertificate,
    pub degree: usize,
    /// Interpolation error on the fitter's check grid (below `ε/2`).
    pub chebyshev_error: f64,
    /// Sup-norm bound of the rationalization step (at most `ε/2`).
    pub rationalization_error: f64,
}

impl LookupResult {
    pub fn params(&self) -> &NeuronParams {
        &self.neuron.params
    }
}

pub fn neuron_lookup(target: &TargetFn1D, eps: f64, sigma: &Superactivation) -> Result<LookupResult> {
    neuron_lookup_with(target, eps, sigma, &LookupOptions::default())
}

pub fn neuron_lookup_with(
    target: &TargetFn1D,
    eps: f64,
    sigma: &Superactivation,
    opts: &LookupOptions,
) -> Result<LookupResult> {
    check_eps(eps)?;
    let pulled = target.pulled_back();
    let fit = match sigma.mode() {
        SigmaMode::PaperLiteral => chebyshev_fit_unit(&pulled, eps / 2.0, opts.max_degree)?,
        SigmaMode::SmoothGlued => {
            let flatten = sigma.flatten();
            chebyshev_fit_unit(
                |s| pulled(flatten.h_inv(s.clamp(0.0, 1.0)).unwrap_or(s)),
                eps / 2.0,
                opts.max_degree,
            )?
        }
    };
    let rational = rationalize_poly(&fit.poly, eps / 2.0);
    let neuron = Neuron::from_parts(
        rational.poly,
        &rational.chebyshev,
        sigma,
        target.a().clone(),
        target.b().clone(),
    )?;
    let certificate = neuron.certify(target, eps, opts.cert_grid);
    if !certificate.passed {
        return Err(Error::CertificationFailed {
            max_abs_error: certificate.max_abs_error,
            epsilon: eps,
        });
    }
    Ok(LookupResult {
        neuron,
        certificate,
        degree: fit.degree,
        chebyshev_error: fit.grid_error,
        rationalization_error: rational.perturbation,
    })
}

/// `σ(w x − θ)` from bare parameters, decoding `p_m` on every call.
///
/// Prefer [`Neuron::eval`] for anything but small indices.
pub fn eval_neuron(params: &NeuronParams, sigma: &Superactivation, x: f64, a: &ExactRational, b: &ExactRational) -> Result<f64> {
    let (af, bf) = (a.to_f64(), b.to_f64());
    if !(af..=bf).contains(&x) {
        return Err(Error::OutOfDomain { value: x, lo: af, hi: bf });
    }
    let tau = ((x - af) / (bf - af)).clamp(0.0, 1.0);
    sigma.eval_segment(&SegmentCoord::new(params.m.clone(), tau))
}
