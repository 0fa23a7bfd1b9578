//! Kolmogorov-style superposition networks
//! `Σ_q σ(w_q Σ_p ψ_pq(x_p) − θ_q)` on a product of compact spaces.
//!
//! The inner maps `ψ_pq` come from an [`InnerProvider`]; only the outer
//! shifts `θ_q` (through the segment indices) depend on the target. With
//! `α = n` and the inner sums confined to `[0, n]`, every `w_q` is exactly 1.

use alloc::format;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{lstsq_min_norm, Matrix};
use crate::neuron::{neuron_lookup_with, ErrorCertificate, LookupOptions, Neuron, TargetFn1D};
use crate::par;
use crate::poly::{clenshaw_shifted, RationalPoly};
use crate::rational::ExactRational;
use crate::sigma::Superactivation;
use crate::{Error, Result};

/// A family of continuous inner maps `ψ_pq : X_p → [0, 1]` for factors
/// `p < n` and terms `q < 2M + 1`, `M = Σ_p dims[p]`.
///
/// Points are passed as the flat concatenation of their factor coordinates.
pub trait InnerProvider: Send + Sync {
    /// Dimension of each factor.
    fn dims(&self) -> &[usize];

    /// `ψ_pq(x_p)` where `x_p` holds factor `p`'s coordinates.
    fn psi(&self, p: usize, q: usize, x_p: &[f64]) -> f64;

    fn total_dim(&self) -> usize {
        self.dims().iter().sum()
    }

    fn factors(&self) -> usize {
        self.dims().len()
    }

    /// `2M + 1`.
    fn term_count(&self) -> usize {
        2 * self.total_dim() + 1
    }
}

/// `Ψ_q(x) = Σ_p ψ_pq(x_p)`, a value in `[0, n]`.
pub fn big_psi(provider: &dyn InnerProvider, q: usize, x: &[f64]) -> Result<f64> {
    if q >= provider.term_count() {
        return Err(Error::InvalidArgument(format!(
            "term index {q} out of range for {} terms",
            provider.term_count()
        )));
    }
    if x.len() != provider.total_dim() {
        return Err(Error::InvalidArgument(format!(
            "point has {} coordinates, provider expects {}",
            x.len(),
            provider.total_dim()
        )));
    }
    let mut offset = 0;
    let mut sum = 0.0;
    for (p, &d) in provider.dims().iter().enumerate() {
        sum += provider.psi(p, q, &x[offset..offset + d]);
        offset += d;
    }
    Ok(sum)
}

/// Staircase inner maps on unit cubes.
///
/// Each coordinate goes through a shifted staircase `S`: on level-`r` cells
/// of width `γ^{-r}` (`γ = 2M + 2`) it is flat for a fraction `1 − 1/Q` of
/// the cell and climbs linearly to the next step over the rest, so `S` is
/// continuous, nondecreasing, and within one cell width of the identity.
/// Term `q` shifts the input by `q/(γQ)` and weights coordinate `j` by
/// `((q + 1)/Q)^j`, which separates the inner sums of different terms.
#[derive(Clone, Debug, PartialEq)]
pub struct CubeProvider {
    dims: Vec<usize>,
    resolution: u32,
    cell: f64,
    terms: usize,
    max_shift: f64,
}

impl CubeProvider {
    pub fn new(dims: Vec<usize>, resolution: u32) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidArgument("every factor needs a positive dimension".into()));
        }
        if resolution == 0 {
            return Err(Error::InvalidArgument("resolution must be at least 1".into()));
        }
        let m: usize = dims.iter().sum();
        let terms = 2 * m + 1;
        let gamma = (2 * m + 2) as f64;
        let cell = libm::pow(gamma, -(resolution as f64));
        let max_shift = (terms - 1) as f64 / (gamma * terms as f64);
        Ok(CubeProvider { dims, resolution, cell, terms, max_shift })
    }

    pub fn resolution(&self) -> u32 {
        self.resolution
    }

    /// Width of a level-`resolution` cell.
    pub fn cell_width(&self) -> f64 {
        self.cell
    }

    fn shift(&self, q: usize) -> f64 {
        let gamma = (self.terms + 1) as f64;
        q as f64 / (gamma * self.terms as f64)
    }

    fn staircase(&self, s: f64) -> f64 {
        let scaled = s / self.cell;
        let j = libm::floor(scaled);
        let u = scaled - j;
        let gap = 1.0 / self.terms as f64;
        let ramp = ((u - (1.0 - gap)) / gap).clamp(0.0, 1.0);
        (j + ramp) * self.cell
    }

    /// The normalized staircase of one coordinate for term `q`, in `[0, 1]`.
    pub fn coordinate_map(&self, q: usize, x: f64) -> f64 {
        let s = x.clamp(0.0, 1.0) + self.shift(q);
        (self.staircase(s) / (1.0 + self.max_shift)).clamp(0.0, 1.0)
    }
}

impl InnerProvider for CubeProvider {
    fn dims(&self) -> &[usize] {
        &self.dims
    }

    fn psi(&self, p: usize, q: usize, x_p: &[f64]) -> f64 {
        let offset: usize = self.dims[..p].iter().sum();
        let theta = (q + 1) as f64 / self.terms as f64;
        let total: f64 = x_p
            .iter()
            .enumerate()
            .map(|(i, &x)| libm::pow(theta, (offset + i) as f64) * self.coordinate_map(q, x))
            .sum();
        total / x_p.len() as f64
    }
}

/// The staircase provider for `[0, 1]^d` viewed as `d` one-dimensional
/// factors, giving `2d + 1` terms.
pub fn cube_inner_provider(d: usize, resolution: u32) -> Result<CubeProvider> {
    CubeProvider::new(vec![1; d], resolution)
}

/// `Σ_q σ(w_q Ψ_q(x) − θ_q)`, one superactivation neuron per term.
#[derive(Clone)]
pub struct KstNetwork {
    pub terms: Vec<Neuron>,
    provider: Arc<dyn InnerProvider>,
}

impl fmt::Debug for KstNetwork {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("KstNetwork")
            .field("terms", &self.terms.len())
            .field("dims", &self.provider.dims())
            .finish()
    }
}

impl KstNetwork {
    /// Builds a network whose term `q` carries `polys[q]` on `[0, n]`.
    pub fn from_polys(provider: Arc<dyn InnerProvider>, polys: &[RationalPoly], sigma: &Superactivation) -> Result<Self> {
        if polys.len() != provider.term_count() {
            return Err(Error::InvalidArgument(format!(
                "{} polynomials for {} terms",
                polys.len(),
                provider.term_count()
            )));
        }
        let (sigma, a, b) = outer_frame(provider.as_ref(), sigma)?;
        let terms = polys
            .iter()
            .map(|p| Neuron::from_poly(p.clone(), &sigma, a.clone(), b.clone()))
            .collect::<Result<_>>()?;
        Ok(KstNetwork { terms, provider })
    }

    pub fn provider(&self) -> &dyn InnerProvider {
        self.provider.as_ref()
    }
}

/// σ rescaled to `α = n` and the outer domain `[0, n]`.
fn outer_frame(provider: &dyn InnerProvider, sigma: &Superactivation) -> Result<(Superactivation, ExactRational, ExactRational)> {
    let n = ExactRational::from_i64(provider.factors() as i64);
    Ok((sigma.rescaled(n.clone())?, ExactRational::zero(), n))
}

pub fn eval_kst(net: &KstNetwork, x: &[f64]) -> Result<f64> {
    let n = net.provider.factors() as f64;
    let mut sum = 0.0;
    for (q, neuron) in net.terms.iter().enumerate() {
        let s = big_psi(net.provider.as_ref(), q, x)?.clamp(0.0, n);
        sum += neuron.eval(s)?;
    }
    Ok(sum)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KstConfig {
    /// Backfitting sweeps over all terms.
    pub sweeps: usize,
    /// Degree of the polynomial smoother for each outer function.
    pub degree: usize,
    /// Follow backfitting with a joint least-squares correction.
    pub polish: bool,
    pub lookup: LookupOptions,
}

impl Default for KstConfig {
    fn default() -> Self {
        KstConfig { sweeps: 20, degree: 8, polish: true, lookup: LookupOptions::default() }
    }
}

#[derive(Clone, Debug)]
pub struct KstFit {
    pub network: KstNetwork,
    pub certificate: ErrorCertificate,
    /// Max error of the smoothed outer functions before neuron lookup.
    pub backfit_error: f64,
}

fn cheb_basis(s: f64, degree: usize) -> Vec<f64> {
    let x = 2.0 * s - 1.0;
    let mut out = Vec::with_capacity(degree + 1);
    out.push(1.0);
    if degree >= 1 {
        out.push(x);
    }
    for k in 2..=degree {
        let next = 2.0 * x * out[k - 1] - out[k - 2];
        out.push(next);
    }
    out
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Recovers outer functions for the given inner maps and replaces each by a
/// single superactivation neuron with budget `ε/(2M + 1)`.
///
/// The outer functions are found by backfitting: each is repeatedly refit as
/// a degree-`cfg.degree` polynomial in `Ψ_q/n` against the residual of the
/// others. The certificate honestly reports `passed = false` when the inner
/// maps are too coarse for the target.
pub fn fit_kst(
    points: &[Vec<f64>],
    targets: &[f64],
    provider: Arc<dyn InnerProvider>,
    sigma: &Superactivation,
    eps: f64,
    cfg: &KstConfig,
) -> Result<KstFit> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon must be positive, got {eps}")));
    }
    if cfg.sweeps == 0 {
        return Err(Error::InvalidArgument("at least one sweep is required".into()));
    }
    if points.is_empty() || points.len() != targets.len() {
        return Err(Error::InvalidArgument("need a nonempty sample with one target per point".into()));
    }
    let q_count = provider.term_count();
    let n = provider.factors() as f64;
    let npts = points.len();
    let big: Vec<Vec<f64>> = par::map(points, |x| {
        (0..q_count)
            .map(|q| big_psi(provider.as_ref(), q, x).map(|s| (s / n).clamp(0.0, 1.0)))
            .collect::<Result<Vec<f64>>>()
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let d = cfg.degree;
    let bases: Vec<Matrix> = (0..q_count)
        .map(|q| {
            let mut m = Matrix::zeros(npts, d + 1);
            for (i, row) in big.iter().enumerate() {
                for (k, v) in cheb_basis(row[q], d).into_iter().enumerate() {
                    m.set(i, k, v);
                }
            }
            m
        })
        .collect();

    let mean = targets.iter().sum::<f64>() / npts as f64;
    let mut coeffs: Vec<Vec<f64>> = (0..q_count)
        .map(|_| {
            let mut c = vec![0.0; d + 1];
            c[0] = mean / q_count as f64;
            c
        })
        .collect();
    let mut parts: Vec<Vec<f64>> = coeffs.iter().zip(&bases).map(|(c, b)| b.mul_vec(c)).collect();
    for _ in 0..cfg.sweeps {
        for q in 0..q_count {
            let residual: Vec<f64> = (0..npts)
                .map(|i| targets[i] - parts.iter().enumerate().filter(|(k, _)| *k != q).map(|(_, p)| p[i]).sum::<f64>())
                .collect();
            coeffs[q] = lstsq_min_norm(&bases[q], &residual, 1e-13);
            parts[q] = bases[q].mul_vec(&coeffs[q]);
        }
    }
    let total = |parts: &[Vec<f64>]| -> Vec<f64> { (0..npts).map(|i| parts.iter().map(|p| p[i]).sum()).collect() };
    let mut backfit_error = max_abs_diff(&total(&parts), targets);
    if cfg.polish {
        let approx = total(&parts);
        let residual: Vec<f64> = targets.iter().zip(&approx).map(|(g, a)| g - a).collect();
        let mut cols = Vec::with_capacity(q_count * (d + 1));
        for b in &bases {
            for k in 0..=d {
                cols.push((0..npts).map(|i| b.get(i, k)).collect::<Vec<f64>>());
            }
        }
        let joint = Matrix::from_columns(npts, &cols);
        let delta = lstsq_min_norm(&joint, &residual, 1e-13);
        let polished: Vec<Vec<f64>> = coeffs
            .iter()
            .enumerate()
            .map(|(q, c)| c.iter().enumerate().map(|(k, v)| v + delta[q * (d + 1) + k]).collect())
            .collect();
        let polished_parts: Vec<Vec<f64>> = polished.iter().zip(&bases).map(|(c, b)| b.mul_vec(c)).collect();
        let err = max_abs_diff(&total(&polished_parts), targets);
        if err < backfit_error {
            backfit_error = err;
            coeffs = polished;
        }
    }

    let (sigma, a, b) = outer_frame(provider.as_ref(), sigma)?;
    let budget = eps / q_count as f64;
    let mut terms = Vec::with_capacity(q_count);
    for (q, c) in coeffs.into_iter().enumerate() {
        let outer = TargetFn1D::new(format!("h{q}"), a.clone(), b.clone(), move |s| clenshaw_shifted(&c, s / n))?;
        terms.push(neuron_lookup_with(&outer, budget, &sigma, &cfg.lookup)?.neuron);
    }
    let network = KstNetwork { terms, provider };
    let values = par::map(points, |x| eval_kst(&network, x))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    let err = max_abs_diff(&values, targets);
    Ok(KstFit {
        certificate: ErrorCertificate::new(npts, err, eps),
        network,
        backfit_error,
    })
}

/// Points of a uniform `side^d` grid of `[0, 1]^d`.
pub fn cube_grid(d: usize, side: usize) -> Vec<Vec<f64>> {
    let total = side.pow(d as u32);
    (0..total)
        .map(|mut k| {
            (0..d)
                .map(|_| {
                    let i = k % side;
                    k /= side;
                    if side == 1 { 0.5 } else { i as f64 / (side - 1) as f64 }
                })
                .collect()
        })
        .collect()
}
