//! Shallow networks `Σ c_i σ(w_i f_i(x) − θ_i)` over a basic family of
//! features on an abstract input space.
//!
//! Points of the input space are opaque: a [`CompactSample`] only knows the
//! target value at each point, and a [`BasicFamily`] maps point indices to
//! feature values.

use alloc::boxed::Box;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::linalg::{lstsq_min_norm, Matrix};
use crate::neuron::{neuron_lookup, ErrorCertificate, Neuron, TargetFn1D};
use crate::par;
use crate::rational::ExactRational;
use crate::sigma::Superactivation;
use crate::{Error, Result};

/// Default padding of a feature hull.
pub const DEFAULT_HULL_MARGIN: f64 = 1e-9;
/// Relative singular-value cutoff for span fits.
///
/// Ridge design matrices are badly conditioned; keeping directions down to
/// `1e-13` lets least squares interpolate the sample with large cancelling
/// coefficients that blow up between sample points. Truncating at `1e-6`
/// gives up a little sample accuracy for fits that hold off the sample.
pub const SPAN_RCOND: f64 = 1e-6;

/// Finite sample of a compact set with target values.
#[derive(Clone, Debug, PartialEq)]
pub struct CompactSample {
    targets: Vec<f64>,
    pub metadata: String,
}

impl CompactSample {
    pub fn new(targets: Vec<f64>, metadata: impl Into<String>) -> Result<Self> {
        if targets.is_empty() {
            return Err(Error::InvalidArgument("a compact sample needs at least one point".into()));
        }
        Ok(CompactSample { targets, metadata: metadata.into() })
    }

    pub fn len(&self) -> usize {
        self.targets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.targets.is_empty()
    }

    pub fn targets(&self) -> &[f64] {
        &self.targets
    }
}

type PointFn = Arc<dyn Fn(usize) -> f64 + Send + Sync>;

#[derive(Clone)]
enum FeatureSource {
    Tabulated(Vec<f64>),
    Callable(PointFn),
}

/// A named real function on the sample's points.
#[derive(Clone)]
pub struct Feature {
    pub name: String,
    source: FeatureSource,
}

impl Feature {
    pub fn tabulated(name: impl Into<String>, values: Vec<f64>) -> Self {
        Feature { name: name.into(), source: FeatureSource::Tabulated(values) }
    }

    pub fn callable<F>(name: impl Into<String>, f: F) -> Self
    where
        F: Fn(usize) -> f64 + Send + Sync + 'static,
    {
        Feature { name: name.into(), source: FeatureSource::Callable(Arc::new(f)) }
    }

    pub fn at(&self, point: usize) -> f64 {
        match &self.source {
            FeatureSource::Tabulated(v) => v[point],
            FeatureSource::Callable(f) => f(point),
        }
    }

    fn values(&self, n: usize) -> Vec<f64> {
        match &self.source {
            FeatureSource::Tabulated(v) => v[..n].to_vec(),
            FeatureSource::Callable(f) => (0..n).map(|i| f(i)).collect(),
        }
    }
}

impl fmt::Debug for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Feature").field("name", &self.name).finish_non_exhaustive()
    }
}

/// The features available to a network.
#[derive(Clone, Debug, Default)]
pub struct BasicFamily {
    features: Vec<Feature>,
}

impl BasicFamily {
    pub fn new(features: Vec<Feature>) -> Self {
        BasicFamily { features }
    }

    pub fn push(&mut self, feature: Feature) {
        self.features.push(feature);
    }

    pub fn features(&self) -> &[Feature] {
        &self.features
    }

    pub fn names(&self) -> Vec<String> {
        self.features.iter().map(|f| f.name.clone()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&Feature> {
        self.features
            .iter()
            .find(|f| f.name == name)
            .ok_or_else(|| Error::MissingFeature(name.into()))
    }

    /// Feature values over the first `n` points.
    pub fn values(&self, name: &str, n: usize) -> Result<Vec<f64>> {
        Ok(self.get(name)?.values(n))
    }

    /// Checks that every feature is defined and finite on the sample; tabulated
    /// features must have one value per point.
    pub fn validate(&self, sample: &CompactSample) -> Result<()> {
        for f in &self.features {
            if let FeatureSource::Tabulated(v) = &f.source {
                if v.len() != sample.len() {
                    return Err(Error::InvalidArgument(alloc::format!(
                        "feature `{}` has {} values for {} points",
                        f.name,
                        v.len(),
                        sample.len()
                    )));
                }
            }
            if f.values(sample.len()).iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidArgument(alloc::format!("feature `{}` is not finite", f.name)));
            }
        }
        Ok(())
    }
}

/// `g ≈ Σ u_i ∘ v_i` with a claimed slack.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub terms: Vec<(TargetFn1D, String)>,
    pub slack: f64,
}

/// A closed interval of feature values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Smallest interval holding every named feature on the sample, padded by
/// `margin` on both sides.
pub fn feature_hull(sample: &CompactSample, family: &BasicFamily, names: &[String], margin: f64) -> Result<Interval> {
    if names.is_empty() {
        return Err(Error::InvalidArgument("feature hull needs at least one feature".into()));
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for name in names {
        for v in family.values(name, sample.len())? {
            lo = lo.min(v);
            hi = hi.max(v);
        }
    }
    Ok(Interval { lo: lo - margin, hi: hi + margin })
}

/// `max_x |g(x) − Σ u_i(v_i(x))|` over the sample.
pub fn verify_decomposition(sample: &CompactSample, family: &BasicFamily, dec: &Decomposition) -> Result<f64> {
    let mut approx = vec![0.0; sample.len()];
    for (outer, name) in &dec.terms {
        for (acc, v) in approx.iter_mut().zip(family.values(name, sample.len())?) {
            *acc += outer.eval(v);
        }
    }
    let diffs: Vec<f64> = sample.targets().iter().zip(&approx).map(|(g, a)| g - a).collect();
    Ok(par::max_abs(&diffs))
}

type ActivationFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// The activation of a network's ridge units.
#[derive(Clone)]
pub enum Activation {
    /// `max(0, t)`.
    Ramp,
    Tanh,
    Logistic,
    Super(Superactivation),
    Custom(String, ActivationFn),
}

impl Activation {
    pub fn eval(&self, t: f64) -> f64 {
        match self {
            Activation::Ramp => t.max(0.0),
            Activation::Tanh => libm::tanh(t),
            Activation::Logistic => 1.0 / (1.0 + libm::exp(-t)),
            Activation::Super(s) => s.eval_f64(t),
            Activation::Custom(_, f) => f(t),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Activation::Ramp => "ramp",
            Activation::Tanh => "tanh",
            Activation::Logistic => "logistic",
            Activation::Super(_) => "super",
            Activation::Custom(name, _) => name,
        }
    }
}

impl fmt::Debug for Activation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The hidden unit of one network term.
#[derive(Clone, Debug)]
pub enum Unit {
    /// `σ(w f − θ)` with the network's activation.
    Ridge { w: f64, theta: f64 },
    /// A superactivation neuron with exact parameters.
    Neuron(Box<Neuron>),
}

#[derive(Clone, Debug)]
pub struct Term {
    pub c: f64,
    pub unit: Unit,
    pub feature: String,
}

/// `Σ c_i σ(w_i f_i(x) − θ_i)`.
#[derive(Clone, Debug)]
pub struct ShallowNetwork {
    pub terms: Vec<Term>,
    pub activation: Activation,
}

impl ShallowNetwork {
    pub fn empty(activation: Activation) -> Self {
        ShallowNetwork { terms: Vec::new(), activation }
    }

    /// Sum of two networks; the activation of `self` applies to ridge units.
    pub fn concat(&self, other: &ShallowNetwork) -> ShallowNetwork {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ShallowNetwork { terms, activation: self.activation.clone() }
    }

    fn term_value(&self, term: &Term, v: f64) -> Result<f64> {
        let h = match &term.unit {
            Unit::Ridge { w, theta } => self.activation.eval(w * v - theta),
            Unit::Neuron(n) => n.eval(v)?,
        };
        Ok(term.c * h)
    }
}

/// Network output at every sample point.
pub fn eval_network(net: &ShallowNetwork, sample: &CompactSample, family: &BasicFamily) -> Result<Vec<f64>> {
    let n = sample.len();
    let mut out = vec![0.0; n];
    for term in &net.terms {
        let values = family.values(&term.feature, n)?;
        for (acc, v) in out.iter_mut().zip(values) {
            *acc += net.term_value(term, v)?;
        }
    }
    Ok(out)
}

/// `max |g − net|` over the sample.
pub fn sup_error(net: &ShallowNetwork, sample: &CompactSample, family: &BasicFamily) -> Result<f64> {
    let out = eval_network(net, sample, family)?;
    let diffs: Vec<f64> = sample.targets().iter().zip(&out).map(|(g, o)| g - o).collect();
    Ok(par::max_abs(&diffs))
}

/// How the error budget was spent by [`assemble_theorem21`].
#[derive(Clone, Debug, PartialEq)]
pub struct BudgetSplit {
    pub epsilon: f64,
    /// `ε/2`, available to the decomposition.
    pub decomposition_budget: f64,
    pub measured_slack: f64,
    /// `ε/(2n)` for each of the `n` outer lookups.
    pub per_term_budget: f64,
    pub term_errors: Vec<f64>,
    /// `ε/2 + Σ ε/(2n)`.
    pub total: f64,
}

#[derive(Clone, Debug)]
pub struct Assembly {
    pub network: ShallowNetwork,
    pub certificate: ErrorCertificate,
    pub budget: BudgetSplit,
    pub hull: Interval,
}

/// Turns a verified decomposition into a network of superactivation neurons.
///
/// Each outer function is replaced by one neuron on the feature hull with
/// budget `ε/(2n)`; together with the decomposition's `ε/2` the network is
/// within `ε` of `g` on the sample.
pub fn assemble_theorem21(
    sample: &CompactSample,
    family: &BasicFamily,
    dec: &Decomposition,
    eps: f64,
    sigma: &Superactivation,
) -> Result<Assembly> {
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(alloc::format!("epsilon must be positive, got {eps}")));
    }
    let measured = verify_decomposition(sample, family, dec)?;
    let half = eps / 2.0;
    if measured.is_nan() || measured > half {
        return Err(Error::SlackTooLarge { measured, allowed: half });
    }
    let n = dec.terms.len();
    let per_term = if n == 0 { 0.0 } else { eps / (2.0 * n as f64) };
    let names: Vec<String> = dec.terms.iter().map(|(_, name)| name.clone()).collect();
    let hull = if names.is_empty() {
        Interval { lo: 0.0, hi: 1.0 }
    } else {
        feature_hull(sample, family, &names, DEFAULT_HULL_MARGIN)?
    };
    let (a, b) = (
        ExactRational::from_f64(hull.lo).ok_or_else(|| Error::InvalidArgument("non-finite hull".into()))?,
        ExactRational::from_f64(hull.hi).ok_or_else(|| Error::InvalidArgument("non-finite hull".into()))?,
    );
    let mut terms = Vec::with_capacity(n);
    let mut term_errors = Vec::with_capacity(n);
    for (outer, name) in &dec.terms {
        let target = outer.with_domain(a.clone(), b.clone())?;
        let found = neuron_lookup(&target, per_term, sigma)?;
        term_errors.push(found.certificate.max_abs_error);
        terms.push(Term { c: 1.0, unit: Unit::Neuron(Box::new(found.neuron)), feature: name.clone() });
    }
    let network = ShallowNetwork { terms, activation: Activation::Super(sigma.clone()) };
    let err = sup_error(&network, sample, family)?;
    Ok(Assembly {
        certificate: ErrorCertificate::new(sample.len(), err, eps),
        budget: BudgetSplit {
            epsilon: eps,
            decomposition_budget: half,
            measured_slack: measured,
            per_term_budget: per_term,
            term_errors,
            total: half + per_term * n as f64,
        },
        network,
        hull,
    })
}

/// One hidden unit candidate `σ(w f − θ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Node {
    pub feature: String,
    pub w: f64,
    pub theta: f64,
}

/// A deterministic `(w, θ)` grid: for each feature, each weight and each of
/// `centers` points `c` spread uniformly over the feature's hull, the unit
/// `σ(w (f − c))`.
#[derive(Clone, Debug, PartialEq)]
pub struct NodeGrid {
    pub weights: Vec<f64>,
    pub centers: usize,
}

impl NodeGrid {
    /// `count` log-spaced magnitudes from `lo` to `hi`, each with both signs.
    pub fn log_spaced(lo: f64, hi: f64, count: usize, centers: usize) -> Self {
        let mut weights = Vec::with_capacity(2 * count);
        for k in 0..count {
            let w = if count == 1 {
                lo
            } else {
                lo * libm::pow(hi / lo, k as f64 / (count - 1) as f64)
            };
            weights.push(w);
            weights.push(-w);
        }
        NodeGrid { weights, centers }
    }

    pub fn nodes(&self, sample: &CompactSample, family: &BasicFamily, names: &[String]) -> Result<Vec<Node>> {
        if self.weights.is_empty() || self.centers == 0 {
            return Err(Error::InvalidArgument("node grid is empty".into()));
        }
        let mut nodes = Vec::new();
        for name in names {
            let hull = feature_hull(sample, family, core::slice::from_ref(name), 0.0)?;
            for k in 0..self.centers {
                let c = if self.centers == 1 {
                    0.5 * (hull.lo + hull.hi)
                } else {
                    hull.lo + hull.width() * k as f64 / (self.centers - 1) as f64
                };
                for &w in &self.weights {
                    nodes.push(Node { feature: name.clone(), w, theta: w * c });
                }
            }
        }
        Ok(nodes)
    }
}

#[derive(Clone, Debug)]
pub struct SpanFit {
    pub network: ShallowNetwork,
    /// `max |g − net|` on the sample.
    pub residual: f64,
}

/// Least-squares coefficients for the given hidden units (least-norm when the
/// design matrix is rank deficient), truncated at [`SPAN_RCOND`].
pub fn fit_span_nodes(sample: &CompactSample, family: &BasicFamily, activation: &Activation, nodes: &[Node]) -> Result<SpanFit> {
    fit_span_nodes_with(sample, family, activation, nodes, SPAN_RCOND)
}

/// [`fit_span_nodes`] with an explicit singular-value cutoff.
pub fn fit_span_nodes_with(
    sample: &CompactSample,
    family: &BasicFamily,
    activation: &Activation,
    nodes: &[Node],
    rcond: f64,
) -> Result<SpanFit> {
    let n = sample.len();
    let mut columns = Vec::with_capacity(nodes.len());
    for node in nodes {
        let values = family.values(&node.feature, n)?;
        columns.push(values.iter().map(|&v| activation.eval(node.w * v - node.theta)).collect::<Vec<f64>>());
    }
    let design = Matrix::from_columns(n, &columns);
    let coeffs = lstsq_min_norm(&design, sample.targets(), rcond);
    let terms = nodes
        .iter()
        .zip(coeffs)
        .filter(|(_, c)| *c != 0.0)
        .map(|(node, c)| Term {
            c,
            unit: Unit::Ridge { w: node.w, theta: node.theta },
            feature: node.feature.clone(),
        })
        .collect();
    let network = ShallowNetwork { terms, activation: activation.clone() };
    let residual = sup_error(&network, sample, family)?;
    Ok(SpanFit { network, residual })
}

/// [`fit_span_nodes`] over a [`NodeGrid`] on the named features.
pub fn fit_span(
    sample: &CompactSample,
    family: &BasicFamily,
    activation: &Activation,
    grid: &NodeGrid,
    names: &[String],
) -> Result<SpanFit> {
    let nodes = grid.nodes(sample, family, names)?;
    fit_span_nodes(sample, family, activation, &nodes)
}

/// Fits a ladder of nested node sets, keeping the best network so far.
///
/// Least squares minimizes the 2-norm, not the max error, so a larger node
/// set can have a slightly worse max error. Any network over a smaller set is
/// also a network over each larger set (with zero coefficients on the new
/// units), so at each rung the better of the fresh fit and the previous rung
/// is returned; residuals are non-increasing by construction.
pub fn fit_span_nested(
    sample: &CompactSample,
    family: &BasicFamily,
    activation: &Activation,
    ladder: &[Vec<Node>],
) -> Result<Vec<SpanFit>> {
    let mut out: Vec<SpanFit> = Vec::with_capacity(ladder.len());
    for (i, nodes) in ladder.iter().enumerate() {
        if i > 0 && !ladder[i - 1].iter().all(|n| nodes.contains(n)) {
            return Err(Error::InvalidArgument(alloc::format!("node set {i} does not contain node set {}", i - 1)));
        }
        let fresh = fit_span_nodes(sample, family, activation, nodes)?;
        match out.last() {
            Some(prev) if prev.residual < fresh.residual => out.push(prev.clone()),
            _ => out.push(fresh),
        }
    }
    Ok(out)
}

/// The product `xy` on a uniform `n × n` grid of the unit square, with
/// features `x + y` and `x − y` and the exact decomposition
/// `xy = ((x + y)² − (x − y)²)/4`.
pub fn xy_ridge_demo(n: usize) -> Result<(CompactSample, BasicFamily, Decomposition)> {
    if n < 2 {
        return Err(Error::InvalidArgument("grid needs at least two points per side".into()));
    }
    let coords: Vec<(f64, f64)> = (0..n * n)
        .map(|k| ((k / n) as f64 / (n - 1) as f64, (k % n) as f64 / (n - 1) as f64))
        .collect();
    let sample = CompactSample::new(
        coords.iter().map(|(x, y)| x * y).collect(),
        alloc::format!("unit square, {n}x{n} grid, g = xy"),
    )?;
    let family = BasicFamily::new(vec![
        Feature::tabulated("x+y", coords.iter().map(|(x, y)| x + y).collect()),
        Feature::tabulated("x-y", coords.iter().map(|(x, y)| x - y).collect()),
    ]);
    let unit = (ExactRational::zero(), ExactRational::one());
    let dec = Decomposition {
        terms: vec![
            (TargetFn1D::new("s^2/4", unit.0.clone(), unit.1.clone(), |s| s * s / 4.0)?, "x+y".into()),
            (TargetFn1D::new("-s^2/4", unit.0, unit.1, |s| -s * s / 4.0)?, "x-y".into()),
        ],
        slack: 0.0,
    };
    Ok((sample, family, dec))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(n: usize) -> (CompactSample, BasicFamily) {
        let ts: Vec<f64> = (0..n).map(|i| -1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
        let sample = CompactSample::new(ts.iter().map(|t| t.abs()).collect(), "|t|").unwrap();
        (sample, BasicFamily::new(vec![Feature::tabulated("t", ts)]))
    }

    #[test]
    fn ramp_represents_abs() {
        let (sample, family) = line(41);
        let grid = NodeGrid { weights: vec![1.0, -1.0], centers: 3 };
        let fit = fit_span(&sample, &family, &Activation::Ramp, &grid, &["t".into()]).unwrap();
        assert!(fit.residual < 1e-12, "{}", fit.residual);
    }

    #[test]
    fn missing_feature_reported() {
        let (sample, family) = line(5);
        let net = ShallowNetwork {
            terms: vec![Term { c: 1.0, unit: Unit::Ridge { w: 1.0, theta: 0.0 }, feature: "nope".into() }],
            activation: Activation::Ramp,
        };
        assert_eq!(eval_network(&net, &sample, &family).unwrap_err(), Error::MissingFeature("nope".into()));
    }

    #[test]
    fn xy_identity_has_no_slack() {
        let (sample, family, dec) = xy_ridge_demo(11).unwrap();
        assert!(verify_decomposition(&sample, &family, &dec).unwrap() < 1e-12);
        let hull = feature_hull(&sample, &family, &["x+y".into(), "x-y".into()], DEFAULT_HULL_MARGIN).unwrap();
        assert!(hull.lo <= -1.0 && hull.hi >= 2.0);
    }
}
