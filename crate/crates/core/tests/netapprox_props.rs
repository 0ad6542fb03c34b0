use proptest::prelude::*;

use ridgenet::error::Error;
use ridgenet::netapprox::{approx_network, approx_univariate, polynomial_degree_probe, FitOptions, SigmaOracle, ThetaInterval};
use ridgenet::network::{Activation, Network};
use ridgenet::presets;
use ridgenet::rational::{self, int};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn univariate_fits_keep_thresholds_inside(lo in -4.0f64..0.0, width in 1.0f64..6.0, freq in 0.5f64..3.0) {
        let hi = lo + width;
        let theta = ThetaInterval::new(Some(lo), Some(hi)).unwrap();
        let samples: Vec<(f64, f64)> = (0..12).map(|j| {
            let y = -1.0 + j as f64 / 6.0;
            (y, (freq * y).sin())
        }).collect();
        let fit = approx_univariate(&samples, &SigmaOracle::logistic(), &theta, 1e-3, &FitOptions::default()).unwrap();
        prop_assert!(fit.terms.iter().all(|u| u.theta > lo && u.theta < hi));
        let worst = samples.iter().map(|&(y, g)| (fit.eval(&SigmaOracle::logistic(), y) - g).abs()).fold(0.0, f64::max);
        prop_assert!(worst <= fit.error + 1e-12);
        prop_assert!(fit.error <= 1e-3);
    }

    #[test]
    fn polynomial_oracles_are_flagged(coeffs in prop::collection::vec(-3.0f64..3.0, 1..=6)) {
        let c = coeffs.clone();
        let sigma = SigmaOracle::custom("poly", move |t| c.iter().rev().fold(0.0, |acc, a| acc * t + a));
        let degree = polynomial_degree_probe(&sigma, 5);
        prop_assert!(degree.is_some_and(|d| d < coeffs.len()));
    }
}

#[test]
fn smooth_nonpolynomial_oracles_pass_the_probe() {
    assert_eq!(polynomial_degree_probe(&SigmaOracle::logistic(), 5), None);
    assert_eq!(polynomial_degree_probe(&SigmaOracle::tanh_ramp(), 5), None);
}

#[test]
fn network_round_trips_through_json_and_replays() {
    let cfg = presets::parallel_segments();
    let values: Vec<_> = cfg.points().iter().map(|x| &x.coords()[0] * &x.coords()[1]).collect();
    let theta = ThetaInterval::new(Some(-5.0), Some(5.0)).unwrap();
    let build = approx_network(&cfg, &values, &SigmaOracle::tanh_ramp(), &theta, 1e-2, &FitOptions::default()).unwrap();
    let composed = build.ridge_residual + build.component_errors.iter().sum::<f64>();
    assert!(build.max_error <= composed + 1e-9);
    let back = Network::from_json(&build.network.to_json()).unwrap();
    assert!(matches!(back.activation, Activation::Oracle { .. }));
    for (x, f) in cfg.points().iter().zip(&values) {
        assert!((back.eval(x).unwrap() - rational::to_f64(f)).abs() <= 1e-2);
    }
}

#[test]
fn closed_paths_are_refused() {
    let cfg = presets::grid_3x3();
    let values = vec![int(0); cfg.len()];
    let theta = ThetaInterval::new(None, None).unwrap();
    let err = approx_network(&cfg, &values, &SigmaOracle::logistic(), &theta, 0.1, &FitOptions::default()).unwrap_err();
    assert!(matches!(err, Error::ClosedPath(_)));
}
