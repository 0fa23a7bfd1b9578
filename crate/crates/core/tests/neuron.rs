use proptest::prelude::*;
use uat_topo_core::neuron::{
    chebyshev_fit, eval_neuron, neuron_lookup_with, rationalize_poly, FloatPoly, LookupOptions,
};
use uat_topo_core::sigma::SegmentCoord;
use uat_topo_core::*;

fn rat(n: i64, d: i64) -> ExactRational {
    ExactRational::ratio(n, d)
}

fn corpus() -> Vec<TargetFn1D> {
    vec![
        TargetFn1D::unit("sin", f64::sin),
        TargetFn1D::unit("exp", f64::exp),
        TargetFn1D::unit("abs", |t| (t - 0.5).abs()),
        TargetFn1D::unit("runge", |t| 1.0 / (1.0 + 25.0 * t * t)),
    ]
}

fn check_identities(params: &NeuronParams, alpha: &ExactRational, a: &ExactRational, b: &ExactRational) {
    let width = b - a;
    assert_eq!(&(&params.w * &width), alpha);
    let two_m_minus_one = &(&ExactRational::from(num_bigint::BigInt::from(params.m.value().clone())) * &rat(2, 1))
        - &ExactRational::one();
    let s = -(alpha * &two_m_minus_one);
    assert_eq!(&params.theta - &(&(alpha * a) / &width), s);
}

#[test]
fn fit_constant_and_linear() {
    let c = chebyshev_fit(&TargetFn1D::unit("c", |_| 0.25), 1e-9, 64).unwrap();
    assert_eq!(c.degree, 0);
    assert_eq!(c.grid_error, 0.0);
    assert_eq!(c.poly.eval(0.7), 0.25);
    let t = chebyshev_fit(&TargetFn1D::unit("t", |t| t), 1e-6, 64).unwrap();
    assert_eq!(t.degree, 1);
    assert!(t.grid_error <= 1e-15);
}

#[test]
fn fit_sine_low_degree() {
    let fit = chebyshev_fit(&TargetFn1D::unit("sin", f64::sin), 1e-3, 64).unwrap();
    assert!(fit.degree <= 7, "degree {}", fit.degree);
    assert!(fit.grid_error < 5e-4);
    let dense = (0..=100_000)
        .map(|i| i as f64 / 100_000.0)
        .map(|t| (fit.poly.eval(t) - t.sin()).abs())
        .fold(0.0, f64::max);
    assert!(dense < 5e-4, "dense error {dense}");
}

#[test]
fn fit_reports_exhaustion() {
    let err = chebyshev_fit(&TargetFn1D::unit("abs", |t| (t - 0.5).abs()), 1e-6, 16).unwrap_err();
    match err {
        Error::DegreeExhausted { max_degree, best_error } => {
            assert_eq!(max_degree, 16);
            assert!(best_error >= 5e-7);
        }
        other => panic!("unexpected {other}"),
    }
    assert!(chebyshev_fit(&TargetFn1D::unit("c", |_| 1.0), 0.0, 4).is_err());
}

#[test]
fn rationalization_examples() {
    let exact = FloatPoly::Monomial(vec![0.5, -0.25, 3.0]);
    let r = rationalize_poly(&exact, 1e-9);
    assert_eq!(r.poly, RationalPoly::new(vec![rat(1, 2), rat(-1, 4), rat(3, 1)]));
    assert_eq!(r.perturbation, 0.0);

    let third = FloatPoly::Monomial(vec![0.333333333]);
    assert_eq!(rationalize_poly(&third, 1e-6).poly, RationalPoly::constant(rat(1, 3)));

    let pi = FloatPoly::Monomial(vec![std::f64::consts::PI]);
    let r = rationalize_poly(&pi, 1e-2);
    let c = &r.poly.coeffs()[0];
    assert!((c.to_f64() - std::f64::consts::PI).abs() < 1e-2);
    assert_eq!(c, &rat(22, 7));
}

#[test]
fn rationalization_stays_within_budget() {
    let cheb = FloatPoly::ShiftedChebyshev(vec![0.1, -std::f64::consts::E, 1.0 / 7.0, 2.0f64.sqrt(), -0.3]);
    for budget in [1e-1, 1e-4, 1e-8] {
        let r = rationalize_poly(&cheb, budget);
        assert!(r.perturbation <= budget);
        let worst = (0..=2000)
            .map(|i| i as f64 / 2000.0)
            .map(|t| (r.poly.eval(&ExactRational::from_f64(t).unwrap()).to_f64() - cheb.eval(t)).abs())
            .fold(0.0, f64::max);
        assert!(worst <= budget * (1.0 + 1e-9), "budget {budget}: {worst}");
    }
}

#[test]
fn lookup_constant_target() {
    let r = neuron_lookup(&TargetFn1D::unit("c", |_| 0.75), 1e-3, &Superactivation::default()).unwrap();
    assert_eq!(r.neuron.poly(), &RationalPoly::constant(rat(3, 4)));
    assert_eq!(r.certificate.max_abs_error, 0.0);
    let smooth = Superactivation::with_mode(SigmaMode::SmoothGlued);
    let r = neuron_lookup(&TargetFn1D::unit("c", |_| -2.0), 1e-3, &smooth).unwrap();
    assert_eq!(r.certificate.max_abs_error, 0.0);
}

#[test]
fn lookup_on_shifted_domain() {
    let sigma = Superactivation::default();
    let target = TargetFn1D::new("sq", rat(2, 1), rat(5, 1), |x| x * x).unwrap();
    let r = neuron_lookup(&target, 1e-2, &sigma).unwrap();
    assert_eq!(r.params().w, rat(1, 3));
    check_identities(r.params(), sigma.alpha(), &rat(2, 1), &rat(5, 1));
}

#[test]
fn lookup_sine_certifies() {
    let sigma = Superactivation::default();
    let r = neuron_lookup(&TargetFn1D::unit("sin", f64::sin), 1e-2, &sigma).unwrap();
    assert_eq!(r.certificate.grid_size, 10_000);
    assert!(r.certificate.passed && r.certificate.max_abs_error < 1e-2);
}

#[test]
fn corpus_lookups_certify_with_exact_parameters() {
    for alpha in [rat(1, 1), rat(3, 2)] {
        let sigma = Superactivation::new(SigmaConfig::new(alpha.clone(), SigmaMode::PaperLiteral).unwrap());
        for target in corpus() {
            for eps in [1e-1, 1e-2] {
                let r = neuron_lookup(&target, eps, &sigma).unwrap();
                assert!(r.certificate.max_abs_error < eps, "{} at {eps}", target.label());
                assert!(r.certificate.max_abs_error <= r.chebyshev_error + eps / 2.0);
                assert!(r.rationalization_error <= eps / 2.0);
                check_identities(r.params(), &alpha, target.a(), target.b());
                assert_eq!(poly_to_nat(r.neuron.poly()), r.params().m);
            }
        }
    }
}

#[test]
fn neuron_endpoints() {
    let sigma = Superactivation::default();
    let (a, b) = (rat(-1, 2), rat(3, 1));
    for m in [1u64, 2, 5, 64, 99] {
        let p = nat_to_poly(&EnumIndex::from(m)).unwrap();
        let params = NeuronParams::for_segment(EnumIndex::from(m), sigma.alpha(), &a, &b, sigma.mode());
        assert_eq!(eval_neuron(&params, &sigma, -0.5, &a, &b).unwrap(), p.constant_term().to_f64());
        assert_eq!(eval_neuron(&params, &sigma, 3.0, &a, &b).unwrap(), p.eval_at_one().to_f64());
        assert!(eval_neuron(&params, &sigma, 3.5, &a, &b).is_err());
    }
}

#[test]
fn dual_path_consistency() {
    for mode in [SigmaMode::PaperLiteral, SigmaMode::SmoothGlued] {
        let sigma = Superactivation::new(SigmaConfig::new(rat(2, 3), mode).unwrap());
        let (a, b) = (rat(-1, 1), rat(7, 4));
        for m in 1..=100u64 {
            let poly = nat_to_poly(&EnumIndex::from(m)).unwrap();
            let neuron = Neuron::from_poly(poly.clone(), &sigma, a.clone(), b.clone()).unwrap();
            let params = neuron.params.clone();
            // Several small indices decode to the same polynomial; the neuron
            // uses the canonical one.
            assert_eq!(nat_to_poly(&params.m).unwrap(), poly);
            for k in 0..100 {
                // A fixed low-discrepancy walk through [a, b].
                let u = (k as f64 * 0.618_033_988_749_895).fract();
                let x = a.to_f64() + (b.to_f64() - a.to_f64()) * u;
                let x_exact = ExactRational::from_f64(x).unwrap();
                let t = &(&params.w * &x_exact) - &params.theta;
                let global = sigma.eval_global(&t).unwrap();
                let local = eval_neuron(&params, &sigma, x, &a, &b).unwrap();
                assert!((global - local).abs() < 1e-12, "m = {m}, x = {x}");
                assert!((neuron.eval(x).unwrap() - local).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn segment_coordinates_match_affine_map() {
    let sigma = Superactivation::default();
    let (a, b) = (rat(2, 1), rat(5, 1));
    let params = NeuronParams::for_segment(EnumIndex::from(42), sigma.alpha(), &a, &b, sigma.mode());
    let x = rat(3, 1);
    let t = &(&params.w * &x) - &params.theta;
    assert_eq!(t, SegmentCoord::global(&EnumIndex::from(42), &rat(1, 3), sigma.alpha()));
}

#[test]
fn smooth_lookup_fails_honestly_for_curved_targets() {
    let smooth = Superactivation::with_mode(SigmaMode::SmoothGlued);
    let opts = LookupOptions { max_degree: 24, ..LookupOptions::default() };
    let err = neuron_lookup_with(&TargetFn1D::unit("sin", f64::sin), 1e-1, &smooth, &opts).unwrap_err();
    assert!(matches!(err, Error::DegreeExhausted { max_degree: 24, .. }));
}

#[test]
fn invalid_inputs_are_rejected() {
    assert!(TargetFn1D::new("x", rat(1, 1), rat(1, 1), |x| x).is_err());
    let sigma = Superactivation::default();
    assert!(neuron_lookup(&TargetFn1D::unit("x", |x| x), -1.0, &sigma).is_err());
    assert!(neuron_lookup(&TargetFn1D::unit("x", |x| x), f64::NAN, &sigma).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn polynomial_targets_are_recovered(
        coeffs in prop::collection::vec((-20i64..=20, 1i64..=12), 1..=4),
        lo in -5i64..=5,
        width in 1i64..=4,
    ) {
        let p = RationalPoly::new(coeffs.iter().map(|&(n, d)| rat(n, d)).collect());
        let (a, b) = (rat(lo, 1), rat(lo + width, 1));
        let (af, w) = (lo as f64, width as f64);
        let q = p.clone();
        let target = TargetFn1D::new("poly", a.clone(), b.clone(), move |x| {
            q.eval(&ExactRational::from_f64((x - af) / w).unwrap()).to_f64()
        }).unwrap();
        let sigma = Superactivation::default();
        let r = neuron_lookup(&target, 1e-6, &sigma).unwrap();
        prop_assert!(r.certificate.passed);
        prop_assert!(r.degree <= p.degree().unwrap_or(0));
        check_identities(r.params(), sigma.alpha(), &a, &b);
    }
}
