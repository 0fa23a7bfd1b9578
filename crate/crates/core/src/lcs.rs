//! Networks on normed spaces whose basic family is a set of continuous linear
//! functionals.
//!
//! Two concrete families are provided: dot products with fixed directions in
//! `R^d`, and trapezoid-rule inner products `∫ k(t) x(t) dt` against kernels
//! for functions tabulated on a uniform grid of `[0, 1]`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::linalg::project_in_order;
use crate::tfnn::{fit_span_nested, Activation, BasicFamily, CompactSample, Feature, NodeGrid, SpanFit};
use crate::{Error, Result};

/// Clamp applied to exponents in [`exp_family_probe`].
pub const EXP_CLAMP: f64 = 30.0;

/// A kernel for quadrature functionals.
#[derive(Clone, Debug, PartialEq)]
pub enum Kernel {
    One,
    T,
    T2,
    Cos(u32),
    Sin(u32),
    /// Values on the functional's grid.
    Tabulated(Vec<f64>),
}

impl Kernel {
    fn at(&self, t: f64, i: usize) -> f64 {
        match self {
            Kernel::One => 1.0,
            Kernel::T => t,
            Kernel::T2 => t * t,
            Kernel::Cos(k) => libm::cos(PI * *k as f64 * t),
            Kernel::Sin(k) => libm::sin(PI * *k as f64 * t),
            Kernel::Tabulated(v) => v[i],
        }
    }

    fn name(&self) -> String {
        match self {
            Kernel::One => "1".into(),
            Kernel::T => "t".into(),
            Kernel::T2 => "t^2".into(),
            Kernel::Cos(k) => format!("cos({k}pi t)"),
            Kernel::Sin(k) => format!("sin({k}pi t)"),
            Kernel::Tabulated(_) => "tab".into(),
        }
    }
}

/// The first `count` kernels of `1, t, t², cos πt, sin πt, cos 2πt, …`.
pub fn default_kernels(count: usize) -> Vec<Kernel> {
    let mut out = vec![Kernel::One, Kernel::T, Kernel::T2];
    let mut k = 1;
    while out.len() < count {
        out.push(Kernel::Cos(k));
        out.push(Kernel::Sin(k));
        k += 1;
    }
    out.truncate(count);
    out
}

#[derive(Clone, Debug, PartialEq)]
pub enum FunctionalKind {
    EuclideanLinear { d: usize },
    Quadrature { grid: usize, kernels: Vec<Kernel> },
}

#[derive(Clone, Debug, PartialEq)]
pub struct FunctionalFamilySpec {
    pub kind: FunctionalKind,
    pub count: usize,
}

impl FunctionalFamilySpec {
    pub fn euclidean(d: usize, count: usize) -> Self {
        FunctionalFamilySpec { kind: FunctionalKind::EuclideanLinear { d }, count }
    }

    /// Quadrature functionals against the default kernel sequence.
    pub fn quadrature(grid: usize, count: usize) -> Self {
        FunctionalFamilySpec {
            kind: FunctionalKind::Quadrature { grid, kernels: default_kernels(count) },
            count,
        }
    }
}

/// `x ↦ Σ_i weights_i x_i`.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFunctional {
    pub name: String,
    pub weights: Vec<f64>,
}

impl LinearFunctional {
    pub fn apply(&self, x: &[f64]) -> f64 {
        self.weights.iter().zip(x).map(|(w, v)| w * v).sum()
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let inv = 1.0 / base as f64;
    let mut f = inv;
    let mut r = 0.0;
    while i > 0 {
        r += f * (i % base) as f64;
        i /= base;
        f *= inv;
    }
    r
}

fn primes(n: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(n);
    let mut c = 2u64;
    while out.len() < n {
        if out.iter().all(|p| c % p != 0) {
            out.push(c);
        }
        c += 1;
    }
    out
}

/// Deterministic unit directions in `R^d`: the coordinate axes, then Halton
/// points of `[-1, 1]^d` normalized to the unit sphere. Each prefix of the
/// list is the list for a smaller count.
pub fn directions(d: usize, count: usize) -> Vec<Vec<f64>> {
    let bases = primes(d);
    let mut out = Vec::with_capacity(count);
    for j in 0..d.min(count) {
        let mut e = vec![0.0; d];
        e[j] = 1.0;
        out.push(e);
    }
    let mut i = 1u64;
    while out.len() < count {
        let v: Vec<f64> = bases.iter().map(|&b| 2.0 * radical_inverse(i, b) - 1.0).collect();
        let norm = libm::sqrt(v.iter().map(|x| x * x).sum());
        i += 1;
        if norm > 1e-9 {
            out.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    out
}

/// Trapezoid weights for `grid` uniform points of `[0, 1]`.
pub fn trapezoid_weights(grid: usize) -> Vec<f64> {
    let h = 1.0 / (grid - 1) as f64;
    (0..grid)
        .map(|i| if i == 0 || i + 1 == grid { 0.5 * h } else { h })
        .collect()
}

pub fn make_functionals(spec: &FunctionalFamilySpec) -> Result<Vec<LinearFunctional>> {
    if spec.count == 0 {
        return Err(Error::InvalidArgument("functional count must be at least 1".into()));
    }
    match &spec.kind {
        FunctionalKind::EuclideanLinear { d } => {
            if *d == 0 {
                return Err(Error::InvalidArgument("dimension must be at least 1".into()));
            }
            Ok(directions(*d, spec.count)
                .into_iter()
                .enumerate()
                .map(|(k, w)| LinearFunctional { name: format!("dir{k}"), weights: w })
                .collect())
        }
        FunctionalKind::Quadrature { grid, kernels } => {
            if *grid < 2 {
                return Err(Error::InvalidArgument(format!("quadrature grid must have at least 2 points, got {grid}")));
            }
            if kernels.len() < spec.count {
                return Err(Error::InvalidArgument(format!(
                    "{} kernels supplied for {} functionals",
                    kernels.len(),
                    spec.count
                )));
            }
            let tw = trapezoid_weights(*grid);
            kernels[..spec.count]
                .iter()
                .enumerate()
                .map(|(idx, k)| {
                    if let Kernel::Tabulated(v) = k {
                        if v.len() != *grid {
                            return Err(Error::InvalidArgument(format!(
                                "tabulated kernel has {} values for grid {grid}",
                                v.len()
                            )));
                        }
                    }
                    let weights = tw
                        .iter()
                        .enumerate()
                        .map(|(i, w)| w * k.at(i as f64 / (*grid - 1) as f64, i))
                        .collect();
                    Ok(LinearFunctional { name: format!("f{idx}: int {} x", k.name()), weights })
                })
                .collect()
        }
    }
}

/// Tabulates functionals on a point set as a [`BasicFamily`].
pub fn functional_family(points: &[Vec<f64>], functionals: &[LinearFunctional]) -> Result<BasicFamily> {
    let mut family = BasicFamily::default();
    for f in functionals {
        if let Some(p) = points.iter().find(|p| p.len() != f.weights.len()) {
            return Err(Error::InvalidArgument(format!(
                "point of length {} does not match functional of length {}",
                p.len(),
                f.weights.len()
            )));
        }
        family.push(Feature::tabulated(f.name.clone(), points.iter().map(|p| f.apply(p)).collect()));
    }
    Ok(family)
}

/// Result of [`approximate_lcs`].
#[derive(Clone, Debug)]
pub struct LcsFit {
    pub fit: SpanFit,
    pub functionals: Vec<LinearFunctional>,
    pub passed: bool,
    /// Residual at each rung of the nested family ladder.
    pub ladder: Vec<f64>,
}

/// Fits `Σ c_i σ(w_i f_i(x) − θ_i)` over a family of linear functionals.
///
/// Functionals are added one at a time (each family is a prefix of the
/// next) so the reported ladder of residuals is non-increasing; the last
/// rung uses all of them.
pub fn approximate_lcs(
    points: &[Vec<f64>],
    targets: Vec<f64>,
    spec: &FunctionalFamilySpec,
    activation: &Activation,
    grid: &NodeGrid,
    eps: f64,
) -> Result<LcsFit> {
    approximate_lcs_ladder(points, targets, spec, activation, grid, &[spec.count], eps)
}

/// [`approximate_lcs`] with explicit family sizes, e.g. `[1, 2, 4]`.
pub fn approximate_lcs_ladder(
    points: &[Vec<f64>],
    targets: Vec<f64>,
    spec: &FunctionalFamilySpec,
    activation: &Activation,
    grid: &NodeGrid,
    counts: &[usize],
    eps: f64,
) -> Result<LcsFit> {
    if counts.is_empty() || counts.windows(2).any(|w| w[0] > w[1]) || counts.last() != Some(&spec.count) {
        return Err(Error::InvalidArgument("family sizes must be non-decreasing and end at the spec count".into()));
    }
    let functionals = make_functionals(spec)?;
    let family = functional_family(points, &functionals)?;
    let sample = CompactSample::new(targets, format!("{} points", points.len()))?;
    let names = family.names();
    let all_nodes = grid.nodes(&sample, &family, &names)?;
    let per_functional = all_nodes.len() / names.len();
    let ladder: Vec<_> = counts.iter().map(|&c| all_nodes[..c * per_functional].to_vec()).collect();
    let fits = fit_span_nested(&sample, &family, activation, &ladder)?;
    let residuals = fits.iter().map(|f| f.residual).collect();
    let fit = fits.into_iter().last().expect("ladder is nonempty");
    Ok(LcsFit { passed: fit.residual < eps, fit, functionals, ladder: residuals })
}

/// Result of [`exp_family_probe`].
#[derive(Clone, Debug, PartialEq)]
pub struct ProbeResult {
    pub max_residual: f64,
    pub rms_residual: f64,
    pub columns: usize,
    pub clamped: bool,
}

fn multi_indices(vars: usize, cap: u32) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for _ in 0..vars {
        let mut next = Vec::new();
        for prefix in &out {
            let used: u32 = prefix.iter().sum();
            for k in 0..=cap - used {
                let mut p = prefix.clone();
                p.push(k);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// Relative size below which a new exponential column counts as dependent.
const PROBE_TOL: f64 = 1e-10;

/// Least-squares fit over `{exp(Σ_j k_j f_j(x)) : k_j ≥ 0, Σ k_j ≤ degree_cap}`.
///
/// Columns are ordered by the last functional they use, so the columns of a
/// prefix of `functionals` come first, and are projected out one at a time.
/// Residuals are therefore non-increasing as the family grows. Exponents are
/// clamped to `[-30, 30]`; `clamped` reports whether that happened anywhere.
pub fn exp_family_probe(
    points: &[Vec<f64>],
    targets: &[f64],
    functionals: &[LinearFunctional],
    degree_cap: u32,
) -> Result<ProbeResult> {
    if points.len() != targets.len() {
        return Err(Error::InvalidArgument("one target per point required".into()));
    }
    let values: Vec<Vec<f64>> = functionals.iter().map(|f| points.iter().map(|p| f.apply(p)).collect()).collect();
    let mut indices = multi_indices(functionals.len(), degree_cap);
    indices.sort_by_key(|k| k.iter().rposition(|&e| e > 0).map_or(0, |p| p + 1));
    let mut clamped = false;
    let mut columns = Vec::with_capacity(indices.len());
    for k in &indices {
        let col = (0..points.len())
            .map(|i| {
                let r: f64 = k.iter().zip(&values).map(|(&k, v)| k as f64 * v[i]).sum();
                if r.abs() > EXP_CLAMP {
                    clamped = true;
                }
                libm::exp(r.clamp(-EXP_CLAMP, EXP_CLAMP))
            })
            .collect::<Vec<f64>>();
        columns.push(col);
    }
    let diffs = project_in_order(&columns, targets, PROBE_TOL).residual;
    let max_residual = diffs.iter().fold(0.0f64, |m, d| m.max(d.abs()));
    let rms_residual = libm::sqrt(diffs.iter().map(|d| d * d).sum::<f64>() / diffs.len().max(1) as f64);
    Ok(ProbeResult { max_residual, rms_residual, columns: columns.len(), clamped })
}

/// The curves `t ↦ sin(c t)` tabulated on `grid` points of `[0, 1]` for
/// `curves` values of `c` spread uniformly over `[0, c_max]`, with the
/// closed-form target `(∫_0^1 sin(c t) dt)² = ((1 − cos c)/c)²`.
pub fn sine_curve_sample(curves: usize, grid: usize, c_max: f64) -> (Vec<Vec<f64>>, Vec<f64>) {
    let mut points = Vec::with_capacity(curves);
    let mut targets = Vec::with_capacity(curves);
    for j in 0..curves {
        let c = if curves == 1 { 0.0 } else { c_max * j as f64 / (curves - 1) as f64 };
        points.push((0..grid).map(|i| libm::sin(c * i as f64 / (grid - 1) as f64)).collect());
        let integral = if c == 0.0 { 0.0 } else { (1.0 - libm::cos(c)) / c };
        targets.push(integral * integral);
    }
    (points, targets)
}
