use proptest::prelude::*;
use uat_topo_core::tfnn::*;
use uat_topo_core::*;

fn unit_target<F>(label: &str, f: F) -> TargetFn1D
where
    F: Fn(f64) -> f64 + Send + Sync + 'static,
{
    TargetFn1D::unit(label, f)
}

fn line(n: usize, lo: f64, hi: f64, g: impl Fn(f64) -> f64) -> (CompactSample, BasicFamily) {
    let ts: Vec<f64> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect();
    let sample = CompactSample::new(ts.iter().map(|&t| g(t)).collect(), "line").unwrap();
    (sample, BasicFamily::new(vec![Feature::tabulated("t", ts)]))
}

fn max_abs(v: impl IntoIterator<Item = f64>) -> f64 {
    v.into_iter().fold(0.0, |m, x| m.max(x.abs()))
}

#[test]
fn hull_of_ridge_features() {
    let (sample, family, _) = xy_ridge_demo(21).unwrap();
    let hull = feature_hull(&sample, &family, &["x+y".into(), "x-y".into()], DEFAULT_HULL_MARGIN).unwrap();
    assert!(hull.lo <= -1.0 && hull.hi >= 2.0);
    assert!(hull.lo > -1.0 - 1e-6 && hull.hi < 2.0 + 1e-6);
}

#[test]
fn hull_of_constant_feature() {
    let sample = CompactSample::new(vec![0.0; 4], "four points").unwrap();
    let family = BasicFamily::new(vec![Feature::callable("c", |_| 2.5)]);
    let hull = feature_hull(&sample, &family, &["c".into()], 1e-3).unwrap();
    assert_eq!(hull, Interval { lo: 2.5 - 1e-3, hi: 2.5 + 1e-3 });
    assert!(feature_hull(&sample, &family, &[], 1e-3).is_err());
    assert_eq!(
        feature_hull(&sample, &family, &["d".into()], 0.0).unwrap_err(),
        Error::MissingFeature("d".into())
    );
}

#[test]
fn decomposition_slack() {
    let (sample, family, dec) = xy_ridge_demo(17).unwrap();
    assert!(verify_decomposition(&sample, &family, &dec).unwrap() < 1e-12);

    let dropped = Decomposition { terms: dec.terms[..1].to_vec(), slack: 0.0 };
    let diffs = family.values("x-y", sample.len()).unwrap();
    let expected = max_abs(diffs.iter().map(|d| d * d / 4.0));
    assert!((verify_decomposition(&sample, &family, &dropped).unwrap() - expected).abs() < 1e-15);

    let empty = Decomposition { terms: Vec::new(), slack: 0.0 };
    let max_g = max_abs(sample.targets().iter().copied());
    assert_eq!(verify_decomposition(&sample, &family, &empty).unwrap(), max_g);
}

#[test]
fn xy_assembly_certifies() {
    let (sample, family, dec) = xy_ridge_demo(21).unwrap();
    let eps = 1e-2;
    let sigma = Superactivation::default();
    let asm = assemble_theorem21(&sample, &family, &dec, eps, &sigma).unwrap();
    assert!(asm.certificate.passed && asm.certificate.max_abs_error < eps);
    assert_eq!(sup_error(&asm.network, &sample, &family).unwrap(), asm.certificate.max_abs_error);
    let b = &asm.budget;
    assert_eq!(b.decomposition_budget, eps / 2.0);
    assert_eq!(b.per_term_budget, eps / 4.0);
    assert_eq!(b.total, eps / 2.0 + 2.0 * (eps / 4.0));
    assert!(b.term_errors.iter().all(|&e| e < b.per_term_budget));
    assert_eq!(asm.network.terms.len(), 2);
}

#[test]
fn single_term_uses_half_the_budget() {
    let (sample, family) = line(11, 0.0, 1.0, |t| t * t);
    let dec = Decomposition { terms: vec![(unit_target("sq", |s| s * s), "t".into())], slack: 0.0 };
    let asm = assemble_theorem21(&sample, &family, &dec, 0.1, &Superactivation::default()).unwrap();
    assert_eq!(asm.budget.per_term_budget, 0.05);
    assert_eq!(asm.budget.total, 0.1);
}

#[test]
fn exact_outer_function_round_trips() {
    let (sample, family) = line(33, 0.0, 1.0, |t| 0.5 + 0.25 * t);
    let dec = Decomposition { terms: vec![(unit_target("affine", |s| 0.5 + 0.25 * s), "t".into())], slack: 0.0 };
    let asm = assemble_theorem21(&sample, &family, &dec, 1e-12, &Superactivation::default()).unwrap();
    assert!(asm.certificate.max_abs_error < 1e-12, "{}", asm.certificate.max_abs_error);
    assert_eq!(asm.network.terms[0].c, 1.0);
}

#[test]
fn oversized_slack_is_rejected() {
    let (sample, family, dec) = xy_ridge_demo(11).unwrap();
    let dropped = Decomposition { terms: dec.terms[..1].to_vec(), slack: 0.0 };
    let err = assemble_theorem21(&sample, &family, &dropped, 1e-2, &Superactivation::default()).unwrap_err();
    assert!(matches!(err, Error::SlackTooLarge { .. }));
}

#[test]
fn ramp_represents_abs_exactly() {
    let (sample, family) = line(101, -1.0, 1.0, f64::abs);
    let nodes = vec![
        Node { feature: "t".into(), w: 1.0, theta: 0.0 },
        Node { feature: "t".into(), w: -1.0, theta: 0.0 },
    ];
    let fit = fit_span_nodes(&sample, &family, &Activation::Ramp, &nodes).unwrap();
    assert!(fit.residual < 1e-12);
    for term in &fit.network.terms {
        assert!((term.c - 1.0).abs() < 1e-12);
    }
}

#[test]
fn zero_target_gives_zero_network() {
    let (sample, family) = line(21, 0.0, 1.0, |_| 0.0);
    let grid = NodeGrid::log_spaced(1.0, 4.0, 3, 5);
    let fit = fit_span(&sample, &family, &Activation::Tanh, &grid, &["t".into()]).unwrap();
    assert!(fit.network.terms.is_empty());
    assert_eq!(fit.residual, 0.0);
}

#[test]
fn tanh_fits_sine_on_64_nodes() {
    let (sample, family) = line(201, 0.0, 1.0, f64::sin);
    let grid = NodeGrid::log_spaced(1.0, 8.0, 4, 8);
    let nodes = grid.nodes(&sample, &family, &["t".into()]).unwrap();
    assert_eq!(nodes.len(), 64);
    let fit = fit_span_nodes(&sample, &family, &Activation::Tanh, &nodes).unwrap();
    assert!(fit.residual < 1e-3);
    let (dense, dense_family) = line(5001, 0.0, 1.0, f64::sin);
    let err = sup_error(&fit.network, &dense, &dense_family).unwrap();
    assert!(err < 1e-3, "dense error {err}");
}

#[test]
fn nested_node_sets_do_not_get_worse() {
    let (sample, family) = line(121, -1.0, 1.0, |t| (3.0 * t).cos() + t.abs());
    let ladder: Vec<Vec<Node>> = [2, 4, 8, 16]
        .iter()
        .map(|&c| NodeGrid { weights: vec![2.0, -2.0, 6.0, -6.0], centers: c })
        .map(|g| g.nodes(&sample, &family, &["t".into()]).unwrap())
        .collect();
    // Each finer center grid contains the coarser one only at shared points,
    // so build the ladder as cumulative unions.
    let mut cumulative: Vec<Vec<Node>> = Vec::new();
    for nodes in ladder {
        let mut set = cumulative.last().cloned().unwrap_or_default();
        set.extend(nodes.into_iter().filter(|n| !set.contains(n)).collect::<Vec<_>>());
        cumulative.push(set);
    }
    for act in [Activation::Ramp, Activation::Tanh, Activation::Logistic] {
        let fits = fit_span_nested(&sample, &family, &act, &cumulative).unwrap();
        for w in fits.windows(2) {
            assert!(w[1].residual <= w[0].residual + 1e-10);
        }
    }
    let mut broken = cumulative.clone();
    broken.swap(0, 3);
    assert!(fit_span_nested(&sample, &family, &Activation::Ramp, &broken).is_err());
}

#[test]
fn network_evaluation_basics() {
    let (sample, family) = line(9, -2.0, 2.0, |t| t.sin());
    let empty = ShallowNetwork::empty(Activation::Tanh);
    assert!(eval_network(&empty, &sample, &family).unwrap().iter().all(|&v| v == 0.0));
    assert_eq!(sup_error(&empty, &sample, &family).unwrap(), max_abs(sample.targets().iter().copied()));

    let single = ShallowNetwork {
        terms: vec![Term { c: 1.0, unit: Unit::Ridge { w: 0.5, theta: -0.25 }, feature: "t".into() }],
        activation: Activation::Logistic,
    };
    let out = eval_network(&single, &sample, &family).unwrap();
    for (v, t) in out.iter().zip(family.values("t", 9).unwrap()) {
        assert_eq!(*v, Activation::Logistic.eval(0.5 * t + 0.25));
    }
}

#[test]
fn custom_activation_and_superactivation() {
    let (sample, family) = line(5, 0.0, 1.0, |_| 0.0);
    let cube = Activation::Custom("cube".into(), std::sync::Arc::new(|t: f64| t * t * t));
    let net = ShallowNetwork {
        terms: vec![Term { c: 2.0, unit: Unit::Ridge { w: 1.0, theta: 0.0 }, feature: "t".into() }],
        activation: cube,
    };
    assert_eq!(eval_network(&net, &sample, &family).unwrap()[4], 2.0);
    let sigma = Superactivation::default();
    let act = Activation::Super(sigma.clone());
    assert_eq!(act.eval(0.5), sigma.tail_value());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hull_matches_brute_force(values in prop::collection::vec(-1e3f64..1e3, 1..200), margin in 0.0f64..1.0) {
        let sample = CompactSample::new(vec![0.0; values.len()], "random").unwrap();
        let family = BasicFamily::new(vec![Feature::tabulated("v", values.clone())]);
        let hull = feature_hull(&sample, &family, &["v".into()], margin).unwrap();
        let lo = values.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(hull, Interval { lo: lo - margin, hi: hi + margin });
        prop_assert!(values.iter().all(|&v| hull.contains(v)));
    }

    #[test]
    fn concatenation_is_linear(
        a in prop::collection::vec((-3.0f64..3.0, -2.0f64..2.0, -1.0f64..1.0), 0..6),
        b in prop::collection::vec((-3.0f64..3.0, -2.0f64..2.0, -1.0f64..1.0), 0..6),
    ) {
        let (sample, family) = line(50, -1.0, 1.0, |_| 0.0);
        let mk = |v: &[(f64, f64, f64)]| ShallowNetwork {
            terms: v.iter().map(|&(c, w, theta)| Term { c, unit: Unit::Ridge { w, theta }, feature: "t".into() }).collect(),
            activation: Activation::Tanh,
        };
        let (na, nb) = (mk(&a), mk(&b));
        let sum = eval_network(&na.concat(&nb), &sample, &family).unwrap();
        let ea = eval_network(&na, &sample, &family).unwrap();
        let eb = eval_network(&nb, &sample, &family).unwrap();
        for i in 0..sample.len() {
            prop_assert!((sum[i] - ea[i] - eb[i]).abs() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn assembled_networks_respect_the_budget(
        k1 in 1.0f64..3.0,
        k2 in -2.0f64..2.0,
        eps in 1e-3f64..1e-1,
    ) {
        // g(x, y) = sin(k1 (x + y)) + k2 (x − y)², an exact two-term decomposition.
        let n = 15;
        let pts: Vec<(f64, f64)> = (0..n * n)
            .map(|i| ((i / n) as f64 / (n - 1) as f64, (i % n) as f64 / (n - 1) as f64))
            .collect();
        let sample = CompactSample::new(
            pts.iter().map(|(x, y)| (k1 * (x + y)).sin() + k2 * (x - y) * (x - y)).collect(),
            "grid",
        ).unwrap();
        let family = BasicFamily::new(vec![
            Feature::tabulated("s", pts.iter().map(|(x, y)| x + y).collect()),
            Feature::tabulated("d", pts.iter().map(|(x, y)| x - y).collect()),
        ]);
        let dec = Decomposition {
            terms: vec![
                (unit_target("sin", move |s| (k1 * s).sin()), "s".into()),
                (unit_target("sq", move |d| k2 * d * d), "d".into()),
            ],
            slack: 0.0,
        };
        let asm = assemble_theorem21(&sample, &family, &dec, eps, &Superactivation::default()).unwrap();
        prop_assert!(asm.budget.measured_slack <= eps / 2.0);
        prop_assert!(asm.budget.term_errors.iter().all(|&e| e < eps / 4.0));
        prop_assert!(sup_error(&asm.network, &sample, &family).unwrap() <= eps);
    }
}
