use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigUint;
use serde_json::{json, Value};
use uat_topo_core::kst::{cube_grid, fit_kst, CubeProvider, KstConfig};
use uat_topo_core::lcs::{approximate_lcs_ladder, sine_curve_sample, FunctionalFamilySpec};
use uat_topo_core::neuron::{neuron_lookup_with, LookupOptions};
use uat_topo_core::sigma::{Location, SegmentCoord};
use uat_topo_core::tfnn::{
    assemble_theorem21, fit_span, xy_ridge_demo, Activation, BasicFamily, CompactSample, Feature, NodeGrid, Unit,
};
use uat_topo_core::{
    EnumIndex, ErrorCertificate, ExactRational, Neuron, NeuronParams, SigmaConfig, Superactivation, TargetFn1D,
};

use crate::args::*;
use crate::report::{decimal_digits, rational_text, uint_text, Certificate};
use crate::targets::{halton, named_1d, named_nd, points_and_values, read_table, PiecewiseLinear};
use crate::{golden, CliError, Outcome};

/// Sample grids for `kst fit` beyond this many points are refused.
pub const MAX_KST_POINTS: usize = 1_000_000;

pub fn parse_rational(flag: &str, s: &str) -> Result<ExactRational, CliError> {
    ExactRational::from_str(s).map_err(|_| CliError::Config(format!("--{flag}: `{s}` is not a rational number")))
}

fn check_eps(eps: f64) -> Result<(), CliError> {
    if eps > 0.0 && eps.is_finite() {
        Ok(())
    } else {
        Err(CliError::Config(format!("--eps must be positive and finite, got {eps}")))
    }
}

fn sigma_for(alpha: &str, mode: Mode) -> Result<Superactivation, CliError> {
    let alpha = parse_rational("alpha", alpha)?;
    Ok(Superactivation::new(SigmaConfig::new(alpha, mode.sigma_mode())?))
}

fn activation(kind: SigmaKind, mode: Mode) -> Activation {
    match kind {
        SigmaKind::Ramp => Activation::Ramp,
        SigmaKind::Tanh => Activation::Tanh,
        SigmaKind::Super => Activation::Super(Superactivation::with_mode(mode.sigma_mode())),
    }
}

fn params_json(p: &NeuronParams) -> Value {
    json!({
        "m": uint_text(p.m.value()),
        "m_bits": p.m.bits(),
        "w": rational_text(&p.w),
        "theta": rational_text(&p.theta),
        "mode": p.mode.as_str(),
    })
}

fn neuron_json(n: &Neuron) -> Value {
    let mut v = params_json(&n.params);
    v["poly"] = Value::from(n.poly().coeffs().iter().map(rational_text).collect::<Vec<_>>());
    v
}

fn certified(results: Value, cert: &ErrorCertificate) -> Outcome {
    Outcome { results, certificate: Some(Certificate::from(cert)), passed: cert.passed }
}

pub fn dispatch(command: &Command) -> Result<Outcome, CliError> {
    match command {
        Command::Sigma(SigmaCmd::Eval(a)) => sigma_eval(a),
        Command::Sigma(SigmaCmd::Check(a)) => sigma_check(a),
        Command::Neuron(NeuronCmd::Fit(a)) => neuron_fit(a),
        Command::Tfnn(TfnnCmd::Fit(a)) => tfnn_fit(a),
        Command::Lcs(LcsCmd::Fit(a)) => lcs_fit(a),
        Command::Kst(KstCmd::Fit(a)) => kst_fit(a),
        Command::Golden(GoldenCmd::Dump(a)) => golden::dump(&a.dir),
    }
}

pub fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Sigma(SigmaCmd::Eval(_)) => "sigma eval",
        Command::Sigma(SigmaCmd::Check(_)) => "sigma check",
        Command::Neuron(_) => "neuron fit",
        Command::Tfnn(_) => "tfnn fit",
        Command::Lcs(_) => "lcs fit",
        Command::Kst(_) => "kst fit",
        Command::Golden(_) => "golden dump",
    }
}

fn sigma_eval(a: &SigmaEvalArgs) -> Result<Outcome, CliError> {
    let sigma = sigma_for(&a.alpha, a.mode)?;
    let t = match (&a.t, &a.segment) {
        (Some(t), None) => parse_rational("t", t)?,
        (None, Some(seg)) => {
            let (m, tau) = seg
                .split_once(',')
                .ok_or_else(|| CliError::Config(format!("--segment expects M,TAU, got `{seg}`")))?;
            let m = BigUint::from_str(m.trim())
                .ok()
                .filter(|m| *m >= BigUint::from(1u32))
                .ok_or_else(|| CliError::Config(format!("--segment: `{m}` is not a positive integer")))?;
            let tau = parse_rational("segment", tau)?;
            if tau.is_negative() || tau > ExactRational::one() {
                return Err(CliError::Config(format!("--segment: tau {tau} is outside [0, 1]")));
            }
            SegmentCoord::global(&EnumIndex::new(m), &tau, sigma.alpha())
        }
        _ => return Err(CliError::Config("give exactly one of --t and --segment".into())),
    };
    let location = match sigma.locate(&t) {
        Location::Tail => json!({ "kind": "tail" }),
        Location::Segment { m, tau } => json!({ "kind": "segment", "m": uint_text(m.value()), "tau": rational_text(&tau) }),
        Location::Gap { m, x } => json!({ "kind": "gap", "m": uint_text(m.value()), "x": rational_text(&x) }),
    };
    let value = sigma.eval_global(&t)?;
    let exact = sigma.eval_global_exact(&t)?.map(|v| rational_text(&v));
    let results = json!({
        "t": rational_text(&t),
        "location": location,
        "value": value,
        "exact": exact,
    });
    Ok(Outcome { results, certificate: None, passed: true })
}

/// Junction and segment tolerances for `sigma check`.
pub const JUNCTION_TOL: f64 = 1e-9;
pub const SMOOTH_DEVIATION_TOL: f64 = 1e-12;
pub const DERIVATIVE_RATIO_TOL: f64 = 1e-6;

fn sigma_check(a: &SigmaCheckArgs) -> Result<Outcome, CliError> {
    let sigma = sigma_for(&a.alpha, a.mode)?;
    let report = sigma.self_check(a.mmax, a.grid)?;
    let passed = report.max_junction_gap < JUNCTION_TOL
        && match a.mode {
            Mode::Literal => report.max_deviation == 0.0,
            Mode::Smooth => {
                report.max_deviation < SMOOTH_DEVIATION_TOL
                    && report.max_first_derivative_ratio < DERIVATIVE_RATIO_TOL
                    && report.max_second_derivative_ratio < DERIVATIVE_RATIO_TOL
            }
        };
    Ok(Outcome { results: golden::self_check_json(&report, passed), certificate: None, passed })
}

fn neuron_fit(a: &NeuronFitArgs) -> Result<Outcome, CliError> {
    check_eps(a.eps)?;
    let sigma = sigma_for(&a.alpha, a.mode)?;
    let (lo, hi) = (parse_rational("a", &a.a)?, parse_rational("b", &a.b)?);
    if lo >= hi {
        return Err(CliError::Config(format!("need a < b, got [{lo}, {hi}]")));
    }
    let (label, f) = match (&a.target, &a.csv) {
        (Some(name), None) => (name.clone(), named_1d(name)?),
        (None, Some(path)) => {
            let table = PiecewiseLinear::from_table(&read_table(path)?)?;
            let (x0, x1) = table.range();
            if lo.to_f64() < x0 || hi.to_f64() > x1 {
                return Err(CliError::Config(format!("table covers [{x0}, {x1}], not [{lo}, {hi}]")));
            }
            let f: crate::targets::Fn1 = Arc::new(move |x| table.eval(x));
            (path.display().to_string(), f)
        }
        _ => return Err(CliError::Config("give exactly one of --target and --csv".into())),
    };
    let target = TargetFn1D::from_arc(label, lo, hi, f)?;
    let opts = LookupOptions { max_degree: a.max_degree, ..LookupOptions::default() };
    let found = neuron_lookup_with(&target, a.eps, &sigma, &opts)?;
    let results = json!({
        "neuron": neuron_json(&found.neuron),
        "degree": found.degree,
        "chebyshev_error": found.chebyshev_error,
        "rationalization_error": found.rationalization_error,
    });
    Ok(certified(results, &found.certificate))
}

fn tfnn_fit(a: &TfnnFitArgs) -> Result<Outcome, CliError> {
    check_eps(a.eps)?;
    match (&a.demo, &a.csv) {
        (Some(demo), None) => {
            if demo != "xy" {
                return Err(CliError::Config(format!("unknown demo `{demo}` (expected xy)")));
            }
            if a.grid < 2 {
                return Err(CliError::Config("--grid must be at least 2".into()));
            }
            let (sample, family, dec) = xy_ridge_demo(a.grid)?;
            let sigma = Superactivation::with_mode(a.mode.sigma_mode());
            let asm = assemble_theorem21(&sample, &family, &dec, a.eps, &sigma)?;
            let terms: Vec<Value> = asm
                .network
                .terms
                .iter()
                .map(|t| {
                    let mut v = match &t.unit {
                        Unit::Neuron(n) => neuron_json(n),
                        Unit::Ridge { w, theta } => json!({ "w": w, "theta": theta }),
                    };
                    v["feature"] = Value::from(t.feature.clone());
                    v["c"] = Value::from(t.c);
                    v
                })
                .collect();
            let b = &asm.budget;
            let results = json!({
                "sample": format!("{} points", sample.len()),
                "hull": [asm.hull.lo, asm.hull.hi],
                "budget": {
                    "epsilon": b.epsilon,
                    "decomposition_budget": b.decomposition_budget,
                    "measured_slack": b.measured_slack,
                    "per_term_budget": b.per_term_budget,
                    "term_errors": b.term_errors,
                    "total": b.total,
                },
                "terms": terms,
            });
            Ok(certified(results, &asm.certificate))
        }
        (None, Some(path)) => {
            let table = read_table(path)?;
            if table.header.len() < 3 || table.header[0] != "id" || table.header[1] != "g" {
                return Err(CliError::Config("sample table needs columns id,g and at least one feature".into()));
            }
            let sample = CompactSample::new(table.rows.iter().map(|r| r[1]).collect(), path.display().to_string())?;
            let family = BasicFamily::new(
                table.header[2..]
                    .iter()
                    .enumerate()
                    .map(|(j, name)| Feature::tabulated(name.clone(), table.rows.iter().map(|r| r[j + 2]).collect()))
                    .collect(),
            );
            if a.weights == 0 || a.centers == 0 {
                return Err(CliError::Config("--weights and --centers must be positive".into()));
            }
            let grid = NodeGrid::log_spaced(1.0, 8.0, a.weights, a.centers);
            let fit = fit_span(&sample, &family, &activation(a.sigma, a.mode), &grid, &family.names())?;
            let terms: Vec<Value> = fit
                .network
                .terms
                .iter()
                .map(|t| match &t.unit {
                    Unit::Ridge { w, theta } => json!({ "feature": t.feature, "c": t.c, "w": w, "theta": theta }),
                    Unit::Neuron(n) => json!({ "feature": t.feature, "c": t.c, "neuron": neuron_json(n) }),
                })
                .collect();
            let results = json!({
                "sigma": fit.network.activation.name(),
                "residual": fit.residual,
                "terms": terms,
            });
            Ok(certified(results, &ErrorCertificate::new(sample.len(), fit.residual, a.eps)))
        }
        _ => Err(CliError::Config("give exactly one of --demo and --csv".into())),
    }
}

fn lcs_fit(a: &LcsFitArgs) -> Result<Outcome, CliError> {
    check_eps(a.eps)?;
    if a.family == 0 || a.centers == 0 {
        return Err(CliError::Config("--family and --centers must be positive".into()));
    }
    let (kind, size) = a
        .space
        .split_once(':')
        .and_then(|(k, n)| Some((k, n.parse::<usize>().ok().filter(|&n| n > 0)?)))
        .ok_or_else(|| CliError::Config(format!("--space expects euclidean:D or funcspace:GRID, got `{}`", a.space)))?;
    let spec = match kind {
        "euclidean" => FunctionalFamilySpec::euclidean(size, a.family),
        "funcspace" if size >= 2 => FunctionalFamilySpec::quadrature(size, a.family),
        _ => return Err(CliError::Config(format!("unsupported space `{}`", a.space))),
    };
    let (points, targets) = match (&a.target, &a.csv) {
        (Some(name), None) if kind == "funcspace" => {
            if name != "mean-square" {
                return Err(CliError::Config(format!("unknown function-space target `{name}` (expected mean-square)")));
            }
            sine_curve_sample(a.points, size, 3.0)
        }
        (Some(name), None) => {
            let g = named_nd(name)?;
            let points = halton(size, a.points, -1.0, 1.0);
            let targets = points.iter().map(|p| g(p)).collect();
            (points, targets)
        }
        (None, Some(path)) => points_and_values(&read_table(path)?, size)?,
        _ => return Err(CliError::Config("give exactly one of --target and --csv".into())),
    };
    let mut counts: Vec<usize> = std::iter::successors(Some(1usize), |c| Some(c * 2)).take_while(|&c| c < a.family).collect();
    counts.push(a.family);
    let grid = NodeGrid { weights: vec![1.0, -1.0], centers: a.centers };
    let n = points.len();
    let fit = approximate_lcs_ladder(&points, targets, &spec, &activation(a.sigma, Mode::Literal), &grid, &counts, a.eps)?;
    let ladder: Vec<Value> = counts.iter().zip(&fit.ladder).map(|(c, r)| json!({ "functionals": c, "residual": r })).collect();
    let results = json!({
        "sigma": fit.fit.network.activation.name(),
        "points": n,
        "nodes": a.family * grid.weights.len() * grid.centers,
        "terms": fit.fit.network.terms.len(),
        "residual": fit.fit.residual,
        "ladder": ladder,
    });
    Ok(certified(results, &ErrorCertificate::new(n, fit.fit.residual, a.eps)))
}

fn kst_fit(a: &KstFitArgs) -> Result<Outcome, CliError> {
    check_eps(a.eps)?;
    let provider = Arc::new(CubeProvider::new(a.dims.clone(), a.resolution)?);
    let d: usize = a.dims.iter().sum();
    let (points, targets) = match (&a.target, &a.csv) {
        (Some(name), None) => {
            let g = named_nd(name)?;
            if a.grid < 2 {
                return Err(CliError::Config("--grid must be at least 2".into()));
            }
            let count = (a.grid as f64).powi(d as i32);
            if count > MAX_KST_POINTS as f64 {
                return Err(CliError::Config(format!("{}^{d} sample points is too many", a.grid)));
            }
            let points = cube_grid(d, a.grid);
            let targets = points.iter().map(|p| g(p)).collect();
            (points, targets)
        }
        (None, Some(path)) => points_and_values(&read_table(path)?, d)?,
        _ => return Err(CliError::Config("give exactly one of --target and --csv".into())),
    };
    let sigma = Superactivation::with_mode(a.mode.sigma_mode());
    let cfg = KstConfig { sweeps: a.sweeps, ..KstConfig::default() };
    let fit = fit_kst(&points, &targets, provider.clone(), &sigma, a.eps, &cfg)?;
    let terms: Vec<Value> = fit
        .network
        .terms
        .iter()
        .enumerate()
        .map(|(q, n)| {
            let theta = &n.params.theta;
            json!({
                "q": q,
                "w": rational_text(&n.params.w),
                "theta": rational_text(theta),
                "theta_digits": decimal_digits(theta.numer().magnitude()),
                "m_bits": n.params.m.bits(),
                "poly": n.poly().coeffs().iter().map(rational_text).collect::<Vec<_>>(),
            })
        })
        .collect();
    let results = json!({
        "dims": a.dims,
        "term_count": fit.network.terms.len(),
        "cell_width": provider.cell_width(),
        "points": points.len(),
        "backfit_error": fit.backfit_error,
        "terms": terms,
    });
    Ok(certified(results, &fit.certificate))
}
