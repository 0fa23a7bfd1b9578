use proptest::prelude::*;
use uat_topo_core::lcs::*;
use uat_topo_core::tfnn::{sup_error, Activation, CompactSample, NodeGrid};

fn halton_points(d: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    let primes = [2u64, 3, 5, 7, 11, 13];
    (1..=n as u64)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let (mut k, mut f, mut r) = (i, 1.0, 0.0);
                    while k > 0 {
                        f /= primes[j] as f64;
                        r += f * (k % primes[j]) as f64;
                        k /= primes[j];
                    }
                    lo + (hi - lo) * r
                })
                .collect()
        })
        .collect()
}

#[test]
fn euclidean_axis_functional() {
    let f = make_functionals(&FunctionalFamilySpec::euclidean(2, 1)).unwrap();
    assert_eq!(f.len(), 1);
    assert_eq!(f[0].apply(&[0.3, -7.0]), 0.3);
    assert!(make_functionals(&FunctionalFamilySpec::euclidean(0, 1)).is_err());
    assert!(make_functionals(&FunctionalFamilySpec::euclidean(2, 0)).is_err());
}

#[test]
fn quadrature_constant_kernel() {
    let f = make_functionals(&FunctionalFamilySpec::quadrature(101, 1)).unwrap();
    for c in [-2.0, 0.0, 3.75] {
        assert!((f[0].apply(&[c; 101]) - c).abs() < 1e-14);
    }
}

#[test]
fn quadrature_linear_kernel_converges() {
    let err = |grid: usize| {
        let f = make_functionals(&FunctionalFamilySpec::quadrature(grid, 2)).unwrap();
        let x: Vec<f64> = (0..grid).map(|i| i as f64 / (grid - 1) as f64).collect();
        (f[1].apply(&x) - 1.0 / 3.0).abs()
    };
    for grid in [11, 101, 1001] {
        let h = 1.0 / (grid - 1) as f64;
        // Trapezoid error for ∫ t² is exactly h²/6.
        assert!((err(grid) - h * h / 6.0).abs() < 1e-14, "grid {grid}");
    }
    assert!(err(201) < err(101) / 3.9);
}

#[test]
fn tabulated_kernels_are_checked() {
    let spec = FunctionalFamilySpec {
        kind: FunctionalKind::Quadrature { grid: 5, kernels: vec![Kernel::Tabulated(vec![1.0; 4])] },
        count: 1,
    };
    assert!(make_functionals(&spec).is_err());
    let spec = FunctionalFamilySpec {
        kind: FunctionalKind::Quadrature { grid: 5, kernels: vec![Kernel::Tabulated(vec![0.0, 0.0, 4.0, 0.0, 0.0])] },
        count: 1,
    };
    let f = make_functionals(&spec).unwrap();
    assert!((f[0].apply(&[0.0, 0.0, 1.0, 0.0, 0.0]) - 1.0).abs() < 1e-15);
}

#[test]
fn functional_in_family_is_represented_exactly() {
    let points = halton_points(3, 150, -1.0, 1.0);
    let spec = FunctionalFamilySpec::euclidean(3, 4);
    let f = make_functionals(&spec).unwrap();
    let targets: Vec<f64> = points.iter().map(|p| f[2].apply(p)).collect();
    let grid = NodeGrid { weights: vec![1.0, -1.0], centers: 2 };
    let fit = approximate_lcs(&points, targets, &spec, &Activation::Ramp, &grid, 1e-6).unwrap();
    assert!(fit.fit.residual < 1e-12, "{}", fit.fit.residual);
    assert!(fit.passed);
}

#[test]
fn zero_target_gives_zero_network() {
    let points = halton_points(2, 40, 0.0, 1.0);
    let spec = FunctionalFamilySpec::euclidean(2, 3);
    let grid = NodeGrid::log_spaced(1.0, 3.0, 2, 4);
    let fit = approximate_lcs(&points, vec![0.0; 40], &spec, &Activation::Tanh, &grid, 1e-9).unwrap();
    assert!(fit.fit.network.terms.is_empty());
    assert_eq!(fit.fit.residual, 0.0);
}

#[test]
fn squared_mean_on_sine_curves() {
    let (points, targets) = sine_curve_sample(61, 101, 3.0);
    let spec = FunctionalFamilySpec::quadrature(101, 4);
    let grid = NodeGrid { weights: vec![1.0, -1.0], centers: 16 };
    let fit = approximate_lcs_ladder(&points, targets, &spec, &Activation::Ramp, &grid, &[1, 2, 4], 5e-2).unwrap();
    assert!(fit.passed && fit.fit.residual < 5e-2);
    for w in fit.ladder.windows(2) {
        assert!(w[1] <= w[0] + 1e-10);
    }
    // Check against the closed form on curves the fit never saw.
    let (dense, exact) = sine_curve_sample(301, 101, 3.0);
    let family = functional_family(&dense, &fit.functionals).unwrap();
    let sample = CompactSample::new(exact, "dense").unwrap();
    let err = sup_error(&fit.fit.network, &sample, &family).unwrap();
    assert!(err < 5e-2, "dense error {err}");
}

#[test]
fn ladder_must_end_at_count() {
    let (points, targets) = sine_curve_sample(5, 11, 3.0);
    let spec = FunctionalFamilySpec::quadrature(11, 3);
    let grid = NodeGrid { weights: vec![1.0], centers: 2 };
    assert!(approximate_lcs_ladder(&points, targets.clone(), &spec, &Activation::Ramp, &grid, &[1, 2], 1.0).is_err());
    assert!(approximate_lcs_ladder(&points, targets, &spec, &Activation::Ramp, &grid, &[2, 1, 3], 1.0).is_err());
}

#[test]
fn exp_probe_reproduces_members() {
    let points = halton_points(2, 80, -1.0, 1.0);
    let f = make_functionals(&FunctionalFamilySpec::euclidean(2, 3)).unwrap();
    let single: Vec<f64> = points.iter().map(|p| f[1].apply(p).exp()).collect();
    let r = exp_family_probe(&points, &single, &f, 1).unwrap();
    assert!(r.max_residual < 1e-10 && !r.clamped);
    assert_eq!(r.columns, 4);
    // e^{f0} e^{f2} = e^{f0 + f2}, a member once sums of two are allowed.
    let product: Vec<f64> = points.iter().map(|p| f[0].apply(p).exp() * f[2].apply(p).exp()).collect();
    let r = exp_family_probe(&points, &product, &f, 2).unwrap();
    assert!(r.max_residual < 1e-10);
}

#[test]
fn exp_probe_reports_clamping() {
    let points = vec![vec![40.0], vec![0.0], vec![-40.0]];
    let f = make_functionals(&FunctionalFamilySpec::euclidean(1, 1)).unwrap();
    let r = exp_family_probe(&points, &[1.0, 1.0, 1.0], &f, 1).unwrap();
    assert!(r.clamped);
    assert!(r.max_residual.is_finite());
}

#[test]
fn exp_probe_on_max_coordinate() {
    let points = halton_points(2, 400, -1.0, 1.0);
    let targets: Vec<f64> = points.iter().map(|p| p[0].max(p[1])).collect();
    let residuals: Vec<f64> = [8, 32, 128]
        .iter()
        .map(|&n| {
            let f = make_functionals(&FunctionalFamilySpec::euclidean(2, n)).unwrap();
            exp_family_probe(&points, &targets, &f, 1).unwrap().rms_residual
        })
        .collect();
    assert!(residuals[1] < residuals[0] && residuals[2] < residuals[1], "{residuals:?}");
}

proptest! {
    #[test]
    fn quadrature_functionals_are_linear(
        x in prop::collection::vec(-5.0f64..5.0, 21),
        y in prop::collection::vec(-5.0f64..5.0, 21),
        c in -3.0f64..3.0,
    ) {
        for f in make_functionals(&FunctionalFamilySpec::quadrature(21, 7)).unwrap() {
            let sum: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
            let scaled: Vec<f64> = x.iter().map(|a| c * a).collect();
            prop_assert!((f.apply(&sum) - f.apply(&x) - f.apply(&y)).abs() < 1e-12);
            prop_assert!((f.apply(&scaled) - c * f.apply(&x)).abs() < 1e-12);
        }
    }
}
